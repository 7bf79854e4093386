#pragma once

// Gray-level statistical texture matrices, their fuzzy variants, feature
// vectors and a small cross-validated classifier harness.

#include <fuzzmat/error.hpp>
#include <fuzzmat/eval.hpp>
#include <fuzzmat/features.hpp>
#include <fuzzmat/flat_zones.hpp>
#include <fuzzmat/fuzzy.hpp>
#include <fuzzmat/image.hpp>
#include <fuzzmat/matrices.hpp>
#include <fuzzmat/mlp.hpp>
#include <fuzzmat/pgm.hpp>
#include <fuzzmat/pipeline.hpp>
#include <fuzzmat/quantize.hpp>
#include <fuzzmat/stat_matrix.hpp>
