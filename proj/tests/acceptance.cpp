#include "attrlens/attrlens.hpp"
#include "attrlens/cli/commands.hpp"
int main(){return 0;}
