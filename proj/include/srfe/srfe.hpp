#pragma once

// Sparse random feature expansions: q-sparse feature sampling, feature
// matrices, basis pursuit denoising, theory diagnostics, and the experiment
// testbed.

#include "srfe/bpdn.hpp"
#include "srfe/combinatorics.hpp"
#include "srfe/diagnostics.hpp"
#include "srfe/errors.hpp"
#include "srfe/experiment.hpp"
#include "srfe/feature_map.hpp"
#include "srfe/io.hpp"
#include "srfe/pipeline.hpp"
#include "srfe/rng.hpp"
#include "srfe/sampling.hpp"
#include "srfe/testbed.hpp"
