// Test-only helpers: seeded generators and brute-force oracles that stay
// independent of the library code paths they check.
#ifndef MTTO_TESTS_SUPPORT_HPP
#define MTTO_TESTS_SUPPORT_HPP

#include <cmath>
#include <numbers>
#include <random>

#include "mtto/toeplitz.hpp"

namespace mtto::testing {

inline cplx unit_square(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double re = unit(rng);
  const double im = unit(rng);
  return {re, im};
}

inline Vector random_unit_vector(Index d, std::mt19937_64& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = unit_square(rng);
  return v / v.norm();
}

inline Matrix random_unitary(Index d, std::mt19937_64& rng) {
  Matrix a(d, d);
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < d; ++i) a(i, j) = unit_square(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(d, d);
}

inline GridFunction random_grid_function(const CircleGrid& grid, Index rows, Index cols,
                                         std::mt19937_64& rng) {
  Matrix channels(rows * cols, grid.size());
  for (Index m = 0; m < grid.size(); ++m) {
    for (Index r = 0; r < rows * cols; ++r) channels(r, m) = unit_square(rng);
  }
  return {grid, rows, cols, std::move(channels)};
}

/// O(M^2) transform straight from c_k = (1/M) sum_m f_m e^{-i k t_m}.
inline Matrix direct_dft(const GridFunction& f) {
  const Index size = f.grid().size();
  Matrix out = Matrix::Zero(f.channel_count(), size);
  for (Index s = 0; s < size; ++s) {
    const Index k = s < size / 2 ? s : s - size;
    for (Index m = 0; m < size; ++m) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * m) / static_cast<double>(size);
      out.col(s) += f.channels().col(m) * std::polar(1.0, angle);
    }
  }
  return out / static_cast<double>(size);
}

struct SpecBounds {
  Index d = 1;
  int max_factors = 6;
  double max_zero = 0.9;
  Index max_dim = 8;
  bool require_pure = true;
  /// Require dim K_Theta > d so that D*-perp is nonzero.
  bool require_proper = true;
};

/// Seeded random Blaschke-Potapov product within the given bounds.
inline InnerFunctionSpec random_spec(std::mt19937_64& rng, const SpecBounds& b) {
  std::uniform_int_distribution<int> count(1, b.max_factors);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    InnerFunctionSpec spec;
    spec.d = b.d;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
      if (unit(rng) < 0.15) {
        spec.factors.push_back(PotapovFactor::full_shift(1));
      } else {
        const cplx zero = std::polar(b.max_zero * unit(rng), 2.0 * std::numbers::pi * unit(rng));
        spec.factors.push_back(PotapovFactor::rank1(zero, random_unit_vector(b.d, rng)));
      }
    }
    if (unit(rng) < 0.5) spec.unitary = random_unitary(b.d, rng);
    const Index dim = expected_model_dim(spec);
    if (dim > b.max_dim) continue;
    if (b.require_proper && dim <= b.d) continue;
    if (b.require_pure && !(operator_norm(eval_inner(spec, cplx{0.0, 0.0})) < 1.0 - kPurityMargin)) continue;
    return spec;
  }
}

inline Matrix gram_matrix(const ModelSpaceBasis& basis) {
  const Index n = basis.dim();
  Matrix g(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) g(i, j) = inner_product(basis.vector(j), basis.vector(i));
  }
  return g;
}

/// Numerical rank of a set of grid functions: singular values of the
/// L^2-normalized sample matrix (one column per function) above `tol`.
inline Index gram_rank(const std::vector<GridFunction>& fs, double tol) {
  if (fs.empty()) return 0;
  const Index rows = fs.front().channels().size();
  Matrix samples(rows, static_cast<Index>(fs.size()));
  for (std::size_t j = 0; j < fs.size(); ++j) {
    samples.col(static_cast<Index>(j)) = fs[j].channels().reshaped();
  }
  samples /= std::sqrt(static_cast<double>(fs.front().grid().size()));
  Eigen::JacobiSVD<Matrix> svd(samples);
  return (svd.singularValues().array() > tol).count();
}

} // namespace mtto::testing

#endif // MTTO_TESTS_SUPPORT_HPP
