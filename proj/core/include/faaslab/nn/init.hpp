#pragma once

#include "faaslab/common/rng.hpp"
#include "faaslab/nn/matrix.hpp"

namespace faaslab::nn {

// Uniform on [-L, L] with L = gain * sqrt(6 / (fan_in + fan_out)).
void init_scaled_uniform(Matrix& m, double gain, Rng& rng);

// Gaussian draw followed by row (or column, whichever is shorter) orthonormalization,
// then scaled by gain. Rows of a wide matrix / columns of a tall one come out orthonormal.
void init_orthogonal(Matrix& m, double gain, Rng& rng);

// Orthogonal init restricted to the column block [col_begin, col_end) of m.
// Used for the recurrent block of LSTM input-concat weights.
void init_orthogonal_block(Matrix& m, int col_begin, int col_end, double gain, Rng& rng);

// Scaled-uniform init restricted to a column block; fans are taken from the block shape.
void init_scaled_uniform_block(Matrix& m, int col_begin, int col_end, double gain, Rng& rng);

}  // namespace faaslab::nn
