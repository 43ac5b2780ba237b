#pragma once

#include "uilab/types.hpp"

namespace uilab {

struct SpectralNormResult {
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
};

// Largest singular value by power iteration on M^T M, relative tolerance
// 1e-10, at most 10000 iterations. The start vector is a fixed seeded
// gaussian so results are reproducible.
SpectralNormResult spectral_norm_detailed(const Matrix& m);

// Convenience wrapper returning the estimate (last iterate if the tolerance
// was not reached).
double spectral_norm(const Matrix& m);

}  // namespace uilab
