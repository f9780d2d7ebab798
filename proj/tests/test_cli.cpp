#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"
#include "attrlens/cli/commands.hpp"
