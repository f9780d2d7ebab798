#pragma once

#include "attrlens/analysis/auc.hpp"
#include "attrlens/analysis/confusion.hpp"
#include "attrlens/analysis/csv.hpp"
#include "attrlens/analysis/embedding_metrics.hpp"
#include "attrlens/analysis/frequency.hpp"
#include "attrlens/analysis/linalg.hpp"
#include "attrlens/annotator.hpp"
#include "attrlens/backends/backend.hpp"
#include "attrlens/backends/cache.hpp"
#include "attrlens/backends/http.hpp"
#include "attrlens/backends/mock.hpp"
#include "attrlens/captioner.hpp"
#include "attrlens/core/errors.hpp"
#include "attrlens/core/json_io.hpp"
#include "attrlens/core/normalize.hpp"
#include "attrlens/core/types.hpp"
#include "attrlens/core/validate.hpp"
#include "attrlens/llm/aggregate.hpp"
#include "attrlens/llm/generate.hpp"
#include "attrlens/llm/parse.hpp"
#include "attrlens/llm/prompts.hpp"
#include "attrlens/report.hpp"
