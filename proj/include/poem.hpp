#pragma once

#include "poem/baselines.hpp"
#include "poem/diagnostics.hpp"
#include "poem/domain.hpp"
#include "poem/estimator.hpp"
#include "poem/libsvm.hpp"
#include "poem/optimizer.hpp"
#include "poem/parallel.hpp"
#include "poem/problems.hpp"
#include "poem/sampling.hpp"
#include "poem/trace.hpp"
#include "poem/vector.hpp"
#include "poem/version.hpp"
