#pragma once

#include "mzv/numeric_types.hpp"
#include "mzv/precision.hpp"
#include "mzv/index.hpp"
#include "mzv/harmonic_sums.hpp"
#include "mzv/bernoulli.hpp"
#include "mzv/constants.hpp"
#include "mzv/asymptotic.hpp"
#include "mzv/stuffle.hpp"
#include "mzv/mzv_eval.hpp"
#include "mzv/series.hpp"
#include "mzv/tail_sums.hpp"
#include "mzv/corpus.hpp"
