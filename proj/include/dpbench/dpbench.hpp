#pragma once

#include "dpbench/algorithms.hpp"
#include "dpbench/core.hpp"
#include "dpbench/datagen/datagen.hpp"
#include "dpbench/dp/budget.hpp"
#include "dpbench/dp/exponential.hpp"
#include "dpbench/dp/fourier.hpp"
#include "dpbench/dp/haar.hpp"
#include "dpbench/dp/laplace.hpp"
#include "dpbench/dp/strategy.hpp"
#include "dpbench/dp/tree.hpp"
#include "dpbench/errors.hpp"
#include "dpbench/harness/checks.hpp"
#include "dpbench/harness/metrics.hpp"
#include "dpbench/harness/param_table.hpp"
#include "dpbench/harness/registry.hpp"
#include "dpbench/harness/report.hpp"
#include "dpbench/harness/stats.hpp"
#include "dpbench/harness/trials.hpp"
#include "dpbench/harness/tuning.hpp"
#include "dpbench/rng.hpp"
