#include "mtto/toeplitz.hpp"

#include <cmath>
#include <string>

namespace mtto {

namespace {

void require_band(const CircleGrid& grid, Index band) {
  if (band < 0) throw AliasError("symbol band must be nonnegative");
  if (band > grid.size() / 4) {
    throw AliasError("symbol band " + std::to_string(band) + " exceeds M/4 = " +
                     std::to_string(grid.size() / 4));
  }
}

cplx random_unit_square(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double re = unit(rng);
  const double im = unit(rng);
  return {re, im};
}

// Orthonormal basis of D*-perp in coefficient space.
Matrix defect_star_complement(const ModelSpaceBasis& basis) {
  const Index d = basis.theta().d();
  const auto gens = defect_star_generators(basis.theta(), Matrix::Identity(d, d));
  Matrix coords(basis.dim(), d);
  for (Index j = 0; j < d; ++j) coords.col(j) = basis.coordinates(gens[static_cast<std::size_t>(j)]);
  return span_of(basis, coords, "D*").complement("D*-perp").basis;
}

} // namespace

SymbolSpec::SymbolSpec(Index d, Index band)
    : d_(d), band_(band),
      coefficients_(static_cast<std::size_t>(2 * band + 1), Matrix::Zero(d, d)) {
  if (d < 1) throw ShapeError("symbol dimension must be positive");
  if (band < 0) throw AliasError("symbol band must be nonnegative");
}

SymbolSpec::SymbolSpec(Index d, Index band, std::vector<Matrix> coefficients)
    : d_(d), band_(band), coefficients_(std::move(coefficients)) {
  if (d < 1) throw ShapeError("symbol dimension must be positive");
  if (band < 0) throw AliasError("symbol band must be nonnegative");
  if (static_cast<Index>(coefficients_.size()) != 2 * band + 1) {
    throw ShapeError("symbol needs 2*band+1 coefficients");
  }
  for (const Matrix& c : coefficients_) {
    if (c.rows() != d || c.cols() != d) throw ShapeError("symbol coefficient must be d x d");
    if (!c.allFinite()) throw ShapeError("symbol coefficient has non-finite entries");
  }
}

SymbolSpec SymbolSpec::monomial(Index d, Index power, Index row, Index col) {
  SymbolSpec s(d, power < 0 ? -power : power);
  s.coefficient(power)(row, col) = 1.0;
  return s;
}

SymbolSpec SymbolSpec::constant(const Matrix& value) {
  SymbolSpec s(value.rows(), 0);
  s.coefficient(0) = value;
  return s;
}

const Matrix& SymbolSpec::coefficient(Index k) const {
  if (k < -band_ || k > band_) throw ShapeError("frequency outside symbol band");
  return coefficients_[static_cast<std::size_t>(k + band_)];
}

Matrix& SymbolSpec::coefficient(Index k) {
  if (k < -band_ || k > band_) throw ShapeError("frequency outside symbol band");
  return coefficients_[static_cast<std::size_t>(k + band_)];
}

SymbolSpec SymbolSpec::adjoint() const {
  SymbolSpec out(d_, band_);
  for (Index k = -band_; k <= band_; ++k) out.coefficient(k) = coefficient(-k).adjoint();
  return out;
}

GridFunction SymbolSpec::sample(const CircleGrid& grid) const {
  if (2 * band_ >= grid.size()) throw AliasError("symbol band not representable on grid");
  Matrix coeffs = Matrix::Zero(d_ * d_, grid.size());
  for (Index k = -band_; k <= band_; ++k) {
    const Matrix& c = coefficient(k);
    coeffs.col(grid.slot(k)) = Eigen::Map<const Vector>(c.data(), c.size());
  }
  return idft(FourierRep(grid, d_, d_, std::move(coeffs)));
}

SymbolSpec& SymbolSpec::operator+=(const SymbolSpec& other) {
  if (other.d_ != d_) throw ShapeError("symbol dimensions differ");
  if (other.band_ > band_) {
    SymbolSpec widened(d_, other.band_);
    for (Index k = -band_; k <= band_; ++k) widened.coefficient(k) = coefficient(k);
    *this = std::move(widened);
  }
  for (Index k = -other.band_; k <= other.band_; ++k) coefficient(k) += other.coefficient(k);
  return *this;
}

SymbolSpec& SymbolSpec::operator*=(cplx s) {
  for (Matrix& c : coefficients_) c *= s;
  return *this;
}

SymbolSpec random_symbol(Index d, Index band, std::mt19937_64& rng) {
  SymbolSpec s(d, band);
  for (Index k = -band; k <= band; ++k) {
    Matrix& c = s.coefficient(k);
    for (Index j = 0; j < d; ++j) {
      for (Index i = 0; i < d; ++i) c(i, j) = random_unit_square(rng);
    }
  }
  return s;
}

// ---------------------------------------------------------------------------

OperatorMatrix mtto_matrix(const ModelSpaceBasis& basis, const SymbolSpec& phi) {
  require_band(basis.grid(), phi.band());
  if (phi.d() != basis.theta().d()) throw ShapeError("symbol dimension does not match E");
  const GridFunction symbol = phi.sample(basis.grid());
  Matrix a(basis.dim(), basis.dim());
  for (Index j = 0; j < basis.dim(); ++j) {
    a.col(j) = basis.coordinates(multiply(symbol, basis.vector(j)));
  }
  return {basis, basis, std::move(a), "A_Phi"};
}

cplx quadratic_form(const OperatorMatrix& a, const Vector& f) {
  if (a.entries.rows() != a.entries.cols() || f.size() != a.entries.cols()) {
    throw ShapeError("quadratic form needs a square operator matching the vector");
  }
  return f.dot(a.entries * f); // conj(f)^T A f
}

double shift_invariance_residual(const OperatorMatrix& a, const ModelSpaceBasis& basis,
                                 std::uint64_t seed) {
  if (!basis.pure()) {
    throw UnsupportedDomain("shift invariance test domain is only identified for pure Theta");
  }
  const Matrix& entries = a.entries;
  if (entries.rows() != basis.dim() || entries.cols() != basis.dim()) {
    throw ShapeError("operator does not act on this model space");
  }
  const Matrix domain = defect_star_complement(basis);
  if (domain.cols() == 0) return 0.0;

  // Coordinates of z f_i, computed by multiplying on the grid.
  Matrix shifted(basis.dim(), domain.cols());
  for (Index i = 0; i < domain.cols(); ++i) {
    shifted.col(i) = basis.coordinates(times_z(basis.synthesize(domain.col(i)), 1));
  }

  const double scale = operator_norm(entries) + 1.0;
  const auto form = [&](const Vector& f) { return f.dot(entries * f); };
  double worst = 0.0;
  for (Index i = 0; i < domain.cols(); ++i) {
    worst = std::max(worst, std::abs(form(domain.col(i)) - form(shifted.col(i))) / scale);
  }
  std::mt19937_64 rng(seed);
  for (int s = 0; s < kShiftTestSamples; ++s) {
    Vector weights(domain.cols());
    for (Index i = 0; i < weights.size(); ++i) weights(i) = random_unit_square(rng);
    weights /= weights.norm();
    const Vector f = domain * weights;
    const Vector zf = shifted * weights;
    worst = std::max(worst, std::abs(form(f) - form(zf)) / scale);
  }
  return worst;
}

// ---------------------------------------------------------------------------

SymbolFitter::SymbolFitter(const ModelSpaceBasis& basis, Index band)
    : basis_(basis), band_(band) {
  require_band(basis.grid(), band);
  const Index n = basis.dim();
  const Index d = basis.theta().d();
  const CircleGrid& grid = basis.grid();
  design_ = Matrix::Zero(n * n, (2 * band + 1) * d * d);

  // <z^k E_pq e_j, e_i> is the coefficient of frequency -k of e_j,q conj(e_i,p).
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Matrix products(d * d, grid.size());
      for (Index p = 0; p < d; ++p) {
        for (Index q = 0; q < d; ++q) {
          products.row(p * d + q) = basis.vector(j).channels().row(q).cwiseProduct(
              basis.vector(i).channels().row(p).conjugate());
        }
      }
      const FourierRep moments = dft(GridFunction(grid, d * d, 1, std::move(products)));
      for (Index k = -band; k <= band; ++k) {
        for (Index pq = 0; pq < d * d; ++pq) {
          design_(i + j * n, (k + band) * d * d + pq) = moments.coefficients()(pq, grid.slot(-k));
        }
      }
    }
  }
  svd_.compute(design_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd_.singularValues();
  constexpr double relative_cutoff = 1e-11;
  svd_.setThreshold(relative_cutoff);
  const double cutoff = sv.size() > 0 ? sv(0) * relative_cutoff : 0.0;
  while (rank_ < sv.size() && sv(rank_) > cutoff) ++rank_;
}

SymbolRecovery SymbolFitter::fit(const Matrix& a) const {
  const Index n = basis_.dim();
  const Index d = basis_.theta().d();
  if (a.rows() != n || a.cols() != n) throw ShapeError("operator does not act on this model space");
  const Vector target = Eigen::Map<const Vector>(a.data(), a.size());
  const Vector x = svd_.solve(target);
  SymbolSpec symbol(d, band_);
  for (Index k = -band_; k <= band_; ++k) {
    Matrix& c = symbol.coefficient(k);
    for (Index p = 0; p < d; ++p) {
      for (Index q = 0; q < d; ++q) c(p, q) = x((k + band_) * d * d + p * d + q);
    }
  }
  return {std::move(symbol), (design_ * x - target).norm()};
}

Matrix SymbolFitter::residual_matrix(const Matrix& a) const {
  const Vector target = Eigen::Map<const Vector>(a.data(), a.size());
  const auto u = svd_.matrixU().leftCols(rank_);
  const Vector r = target - u * (u.adjoint() * target);
  return Eigen::Map<const Matrix>(r.data(), a.rows(), a.cols());
}

SymbolRecovery recover_symbol(const OperatorMatrix& a, const ModelSpaceBasis& basis, Index band) {
  return SymbolFitter(basis, band).fit(a.entries);
}

MttoReport classify(const OperatorMatrix& a, const ModelSpaceBasis& basis, Index band) {
  MttoReport report;
  report.shift_invariance_residual = shift_invariance_residual(a, basis);
  report.membership = report.shift_invariance_residual < kMembershipTolerance;
  SymbolRecovery recovery = recover_symbol(a, basis, band);
  report.recovery_residual = recovery.residual;
  if (report.membership) report.recovered_symbol = std::move(recovery.symbol);
  return report;
}

// ---------------------------------------------------------------------------

OperatorMatrix conjugate_by_tau(const OperatorMatrix& a, const OperatorMatrix& tau) {
  const Matrix& t = tau.entries;
  if (a.entries.rows() != t.cols() || a.entries.cols() != t.cols()) {
    throw ShapeError("operator does not act on the domain of tau");
  }
  return {tau.rows_basis, tau.rows_basis, t * a.entries * t.adjoint(), "tau " + a.label + " tau*"};
}

OperatorMatrix conjugate_by_tau_adjoint(const OperatorMatrix& a, const OperatorMatrix& tau) {
  const Matrix& t = tau.entries;
  if (a.entries.rows() != t.rows() || a.entries.cols() != t.rows()) {
    throw ShapeError("operator does not act on the range of tau");
  }
  return {tau.cols_basis, tau.cols_basis, t.adjoint() * a.entries * t, "tau* " + a.label + " tau"};
}

std::optional<NonMember> negative_control(const ModelSpaceBasis& basis, const SymbolFitter& fitter,
                                          std::mt19937_64& rng) {
  const Index n = basis.dim();
  for (int attempt = 0; attempt < 8; ++attempt) {
    Matrix r(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) r(i, j) = random_unit_square(rng);
    }
    Matrix outside = fitter.residual_matrix(r);
    const double size = outside.norm();
    if (size <= 1e-3 * r.norm()) continue;
    outside /= size;
    NonMember nm{{basis, basis, std::move(outside), "non-member"}, 0.0, 0.0};
    nm.distance = fitter.fit(nm.matrix.entries).residual;
    if (nm.distance <= 1e-3) continue;
    nm.shift_residual = shift_invariance_residual(nm.matrix, basis);
    return nm;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

Index recovery_band(const ModelSpaceBasis& basis) {
  return std::min<Index>(basis.dim() + 2, basis.grid().size() / 4);
}

SpatialIsomorphismReport verify_spatial_isomorphism(const ModelSpaceBasis& basis_theta,
                                                    const ModelSpaceBasis& basis_tilde,
                                                    const OperatorMatrix& tau,
                                                    const std::vector<SymbolSpec>& phi_samples,
                                                    const std::vector<SymbolSpec>& psi_samples,
                                                    std::uint64_t seed) {
  if (!basis_theta.pure() || !basis_tilde.pure()) {
    throw UnsupportedDomain("spatial isomorphism check requires pure Theta");
  }
  SpatialIsomorphismReport report;
  report.recovery_band = recovery_band(basis_theta);
  const SymbolFitter fit_tilde(basis_tilde, report.recovery_band);
  const SymbolFitter fit_theta(basis_theta, report.recovery_band);
  std::mt19937_64 seeds(seed);

  const auto run = [&](DirectionReport& dir, const OperatorMatrix& image,
                       const ModelSpaceBasis& target, const SymbolFitter& fitter) {
    dir.max_shift_residual =
        std::max(dir.max_shift_residual, shift_invariance_residual(image, target, seeds()));
    dir.max_recovery_residual = std::max(dir.max_recovery_residual, fitter.fit(image.entries).residual);
    ++dir.cases;
  };
  for (const SymbolSpec& phi : phi_samples) {
    run(report.forward, conjugate_by_tau(mtto_matrix(basis_theta, phi), tau), basis_tilde, fit_tilde);
  }
  for (const SymbolSpec& psi : psi_samples) {
    run(report.backward, conjugate_by_tau_adjoint(mtto_matrix(basis_tilde, psi), tau), basis_theta,
        fit_theta);
  }
  const auto passes = [](const DirectionReport& dir) {
    return dir.max_shift_residual < kMembershipTolerance &&
           dir.max_recovery_residual < kMembershipTolerance;
  };
  report.forward.pass = passes(report.forward);
  report.backward.pass = passes(report.backward);
  report.pass = report.forward.pass && report.backward.pass;
  return report;
}

} // namespace mtto
