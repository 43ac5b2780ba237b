#include "uilab/linalg.hpp"

#include <cmath>
#include <stdexcept>

#include "uilab/rng.hpp"

namespace uilab {

SpectralNormResult spectral_norm_detailed(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("spectral_norm: empty matrix");

  // Fixed-seed random start avoids being orthogonal to the top singular
  // subspace; any unit vector works for the degenerate cases below.
  Rng rng(0x53504543u);
  Vector v(m.cols());
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
  v.normalize();

  SpectralNormResult res;
  double sigma_prev = 0.0;
  constexpr int kMaxIters = 10000;
  constexpr double kRelTol = 1e-10;
  Vector mv(m.rows());
  for (int it = 0; it < kMaxIters; ++it) {
    mv.noalias() = m * v;
    const double sigma = mv.norm();
    res.iterations = it + 1;
    res.value = sigma;
    if (sigma == 0.0) {
      if (m.isZero(0.0)) return res;
      // start vector landed in the null space: redraw
      for (Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
      v.normalize();
      sigma_prev = 0.0;
      continue;
    }
    if (it > 0 && std::abs(sigma - sigma_prev) <= kRelTol * sigma) return res;
    sigma_prev = sigma;
    v.noalias() = m.transpose() * mv;
    const double nv = v.norm();
    if (nv == 0.0) return res;
    v /= nv;
  }
  res.converged = false;
  return res;
}

double spectral_norm(const Matrix& m) { return spectral_norm_detailed(m).value; }

}  // namespace uilab
