#include "mtto/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace mtto {

namespace {

constexpr double kDomainTolerance = 1e-10;
constexpr double kDropTolerance = 1e-8;

void require_same_grid(const CircleGrid& a, const CircleGrid& b) {
  if (!(a == b)) throw GridError("operands live on different grids");
}

GridFunction constant_vector(const CircleGrid& grid, const Vector& x) {
  return GridFunction::constant(grid, x);
}

} // namespace

GridFunction project_model_l2(const InnerFunction& theta, const GridFunction& f) {
  require_same_grid(theta.grid(), f.grid());
  if (!f.is_vector() || f.rows() != theta.d()) throw ShapeError("projection expects E-valued f");
  const GridFunction& samples = theta.samples();
  GridFunction beurling = multiply(samples, analytic_project(multiply(adjoint(samples), f)));
  return analytic_project(f) - beurling;
}

GridFunction project_model(const InnerFunction& theta, const GridFunction& f) {
  require_same_grid(theta.grid(), f.grid());
  const double outside = std::sqrt(negative_frequency_energy(f));
  if (outside > kDomainTolerance * norm(f)) {
    throw DomainError("function is not in H^2(E): negative-frequency norm " +
                      std::to_string(outside));
  }
  return project_model_l2(theta, f);
}

// ---------------------------------------------------------------------------

Vector ModelSpaceBasis::coordinates(const GridFunction& f) const {
  Vector c(dim());
  for (Index i = 0; i < dim(); ++i) c(i) = inner_product(f, vector(i));
  return c;
}

GridFunction ModelSpaceBasis::synthesize(const Vector& c) const {
  if (c.size() != dim()) throw ShapeError("coefficient vector does not match basis dimension");
  GridFunction out(grid(), theta().d(), 1);
  for (Index i = 0; i < dim(); ++i) out.channels() += c(i) * vector(i).channels();
  return out;
}

double ModelSpaceBasis::distance(const GridFunction& f) const {
  return norm(f - synthesize(coordinates(f)));
}

ModelSpaceBasis build_basis(const InnerFunction& theta) {
  const Index d = theta.d();
  const Index expected = expected_model_dim(theta.spec());
  const CircleGrid& grid = theta.grid();
  // Degrees 0..n-1 already span K_Theta since det(Theta) H^2(E) lies in
  // Theta H^2(E); two more degrees give slack against weak directions.
  const Index max_degree = expected + 1;

  std::vector<GridFunction> vectors;
  for (Index k = 0; k <= max_degree; ++k) {
    for (Index i = 0; i < d; ++i) {
      const GridFunction monomial =
          GridFunction::monomial(grid, k, Vector::Unit(d, i));
      GridFunction v = project_model(theta, monomial);
      const double initial = norm(v);
      if (initial < kDropTolerance) continue;
      for (int pass = 0; pass < 2; ++pass) {
        for (const GridFunction& q : vectors) v -= inner_product(v, q) * q;
      }
      const double remaining = norm(v);
      if (remaining < kDropTolerance * initial) continue;
      v *= 1.0 / remaining;
      vectors.push_back(std::move(v));
    }
  }
  // Combining nearly dependent projected monomials amplifies roundoff off
  // K_Theta; projecting the orthonormal set again and re-orthonormalizing
  // brings it back to working precision.
  for (int sweep = 0; sweep < 2; ++sweep) {
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      GridFunction v = project_model_l2(theta, vectors[i]);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < i; ++j) v -= inner_product(v, vectors[j]) * vectors[j];
      }
      v *= 1.0 / norm(v);
      vectors[i] = std::move(v);
    }
  }
  if (static_cast<Index>(vectors.size()) != expected) {
    throw DimensionMismatch("model space basis has dimension " + std::to_string(vectors.size()) +
                            ", expected " + std::to_string(expected));
  }
  return ModelSpaceBasis(std::make_shared<const ModelSpaceBasis::Data>(
      ModelSpaceBasis::Data{theta, std::move(vectors)}));
}

// ---------------------------------------------------------------------------

OperatorMatrix compressed_shift(const ModelSpaceBasis& basis) {
  Matrix s(basis.dim(), basis.dim());
  for (Index j = 0; j < basis.dim(); ++j) s.col(j) = basis.coordinates(times_z(basis.vector(j)));
  return {basis, basis, std::move(s), "S"};
}

OperatorMatrix compressed_shift_adjoint(const ModelSpaceBasis& basis) {
  Matrix s(basis.dim(), basis.dim());
  for (Index j = 0; j < basis.dim(); ++j) {
    s.col(j) = basis.coordinates(backward_shift(basis.vector(j)));
  }
  return {basis, basis, std::move(s), "S*"};
}

// ---------------------------------------------------------------------------

Subspace span_of(const ModelSpaceBasis& parent, const Matrix& coords, std::string label,
                 double rank_tol) {
  if (coords.rows() != parent.dim()) throw ShapeError("coordinates do not match parent basis");
  if (coords.cols() == 0 || coords.rows() == 0) {
    return {parent, Matrix(parent.dim(), 0), std::move(label)};
  }
  Eigen::JacobiSVD<Matrix> svd(coords, Eigen::ComputeThinU);
  Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > rank_tol) ++rank;
  return {parent, svd.matrixU().leftCols(rank), std::move(label)};
}

Subspace Subspace::complement(std::string complement_label) const {
  const Index n = parent.dim();
  if (dim() == 0) return {parent, Matrix::Identity(n, n), std::move(complement_label)};
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeFullU);
  return {parent, svd.matrixU().rightCols(n - dim()), std::move(complement_label)};
}

std::string to_string(LemmaCheck c) {
  switch (c) {
  case LemmaCheck::passed: return "passed";
  case LemmaCheck::failed: return "failed";
  case LemmaCheck::skipped: return "skipped";
  }
  return "unknown";
}

std::vector<GridFunction> defect_generators(const InnerFunction& theta, const Matrix& xs) {
  std::vector<GridFunction> out;
  const CircleGrid& grid = theta.grid();
  for (Index j = 0; j < xs.cols(); ++j) {
    const Vector x = xs.col(j);
    const Vector y = theta.theta0().adjoint() * x;
    out.push_back(constant_vector(grid, x) - multiply(theta.samples(), constant_vector(grid, y)));
  }
  return out;
}

std::vector<GridFunction> defect_star_generators(const InnerFunction& theta, const Matrix& xs) {
  std::vector<GridFunction> out;
  const CircleGrid& grid = theta.grid();
  for (Index j = 0; j < xs.cols(); ++j) {
    const Vector x = xs.col(j);
    const GridFunction numerator = multiply(theta.samples(), constant_vector(grid, x)) -
                                   constant_vector(grid, theta.theta0() * x);
    out.push_back(backward_shift(numerator));
  }
  return out;
}

namespace {

// Largest pointwise deviation of `f` from fn(z) over the grid.
double pointwise_deviation(const GridFunction& f, const std::function<Vector(cplx)>& fn) {
  double worst = 0.0;
  for (Index m = 0; m < f.grid().size(); ++m) {
    worst = std::max(worst, (f.at(m) - fn(f.grid().point(m))).norm());
  }
  return worst;
}

} // namespace

DefectSubspaces defect_subspaces(const ModelSpaceBasis& basis, double rank_tol) {
  const InnerFunction& theta = basis.theta();
  const Index d = theta.d();
  const Matrix identity = Matrix::Identity(d, d);
  const auto gens = defect_generators(theta, identity);
  const auto star_gens = defect_star_generators(theta, identity);

  Matrix coords(basis.dim(), d);
  Matrix star_coords(basis.dim(), d);
  double containment = 0.0;
  double formula = 0.0;
  const InnerFunctionSpec& spec = theta.spec();
  for (Index j = 0; j < d; ++j) {
    coords.col(j) = basis.coordinates(gens[static_cast<std::size_t>(j)]);
    star_coords.col(j) = basis.coordinates(star_gens[static_cast<std::size_t>(j)]);
    containment = std::max({containment, basis.distance(gens[static_cast<std::size_t>(j)]),
                            basis.distance(star_gens[static_cast<std::size_t>(j)])});
    // Cross-check against direct pointwise evaluation of the closed forms.
    const Vector x = identity.col(j);
    formula = std::max(formula, pointwise_deviation(gens[static_cast<std::size_t>(j)], [&](cplx z) {
                         return Vector(x - eval_inner(spec, z) * theta.theta0().adjoint() * x);
                       }));
    formula = std::max(formula,
                       pointwise_deviation(star_gens[static_cast<std::size_t>(j)], [&](cplx z) {
                         return Vector((eval_inner(spec, z) - theta.theta0()) * x / z);
                       }));
  }

  DefectSubspaces out{span_of(basis, coords, "D", rank_tol),
                      span_of(basis, star_coords, "D*", rank_tol), containment,
                      formula, LemmaCheck::skipped};
  if (basis.pure()) {
    out.lemma_dim_check = out.d.dim() == d && out.dstar.dim() == d ? LemmaCheck::passed
                                                                   : LemmaCheck::failed;
  }
  return out;
}

// ---------------------------------------------------------------------------

double ResidualReport::max() const {
  double worst = 0.0;
  for (const auto& [name, value] : residuals) {
    if (!(value <= worst)) worst = value; // NaN propagates as a failure
  }
  return worst;
}

ResidualReport verify_theorem4(const ModelSpaceBasis& basis) {
  const InnerFunction& theta = basis.theta();
  const Index d = theta.d();
  const Matrix shift = compressed_shift(basis).entries;
  const Matrix backward = shift.adjoint();
  const double scale = operator_norm(shift) + 1.0;
  const DefectSubspaces defects = defect_subspaces(basis);
  const Matrix identity = Matrix::Identity(d, d);

  ResidualReport report;
  report.threshold = kTheoremTolerance;

  double branch = 0.0;
  const Subspace d_perp = defects.d.complement("D-perp");
  for (Index i = 0; i < d_perp.dim(); ++i) {
    const Vector q = d_perp.basis.col(i);
    const GridFunction lhs = basis.synthesize(backward * q);
    const GridFunction rhs = times_z(basis.synthesize(q), -1);
    branch = std::max(branch, norm(lhs - rhs) / scale);
  }
  report.residuals["backward_shift_on_D_perp"] = branch;

  branch = 0.0;
  const auto gens = defect_generators(theta, identity);
  const auto rhs_d = defect_star_generators(theta, theta.theta0().adjoint());
  for (Index j = 0; j < d; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const GridFunction lhs = basis.synthesize(backward * basis.coordinates(gens[idx]));
    branch = std::max(branch, norm(lhs + rhs_d[idx]) / scale);
  }
  report.residuals["backward_shift_on_D"] = branch;

  branch = 0.0;
  const Subspace dstar_perp = defects.dstar.complement("D*-perp");
  for (Index i = 0; i < dstar_perp.dim(); ++i) {
    const Vector q = dstar_perp.basis.col(i);
    const GridFunction lhs = basis.synthesize(shift * q);
    const GridFunction rhs = times_z(basis.synthesize(q), 1);
    branch = std::max(branch, norm(lhs - rhs) / scale);
  }
  report.residuals["shift_on_D*_perp"] = branch;

  branch = 0.0;
  const auto star_gens = defect_star_generators(theta, identity);
  const auto rhs_dstar = defect_generators(theta, theta.theta0());
  for (Index j = 0; j < d; ++j) {
    const auto idx = static_cast<std::size_t>(j);
    const GridFunction lhs = basis.synthesize(shift * basis.coordinates(star_gens[idx]));
    branch = std::max(branch, norm(lhs + rhs_dstar[idx]) / scale);
  }
  report.residuals["shift_on_D*"] = branch;

  report.finish();
  return report;
}

// ---------------------------------------------------------------------------

GridFunction apply_tau(const InnerFunction& theta, const GridFunction& f) {
  require_same_grid(theta.grid(), f.grid());
  const CircleGrid& grid = f.grid();
  GridFunction out(grid, f.rows(), f.cols());
  for (Index m = 0; m < grid.size(); ++m) {
    const Index r = grid.flipped(m);
    out.at(m).noalias() = std::conj(grid.point(m)) * theta.samples().at(r).adjoint() * f.at(r);
  }
  return out;
}

GridFunction apply_tau_adjoint(const InnerFunction& theta, const GridFunction& f) {
  require_same_grid(theta.grid(), f.grid());
  const CircleGrid& grid = f.grid();
  GridFunction out(grid, f.rows(), f.cols());
  for (Index m = 0; m < grid.size(); ++m) {
    const Index r = grid.flipped(m);
    out.at(m).noalias() = std::conj(grid.point(m)) * theta.samples().at(m) * f.at(r);
  }
  return out;
}

OperatorMatrix tau_matrix(const ModelSpaceBasis& basis_theta, const ModelSpaceBasis& basis_tilde) {
  require_same_grid(basis_theta.grid(), basis_tilde.grid());
  if (basis_theta.theta().d() != basis_tilde.theta().d()) throw ShapeError("dimension mismatch");
  Matrix t(basis_tilde.dim(), basis_theta.dim());
  for (Index j = 0; j < basis_theta.dim(); ++j) {
    t.col(j) = basis_tilde.coordinates(apply_tau(basis_theta.theta(), basis_theta.vector(j)));
  }
  return {basis_tilde, basis_theta, std::move(t), "tau"};
}

ResidualReport verify_tau(const ModelSpaceBasis& basis_theta, const ModelSpaceBasis& basis_tilde,
                          const OperatorMatrix& tau) {
  ResidualReport report;
  report.threshold = tol::identity;
  const Matrix& t = tau.entries;
  const Index n = t.cols();
  if (t.rows() != n) {
    report.residuals["unitarity"] = std::numeric_limits<double>::infinity();
    report.finish();
    return report;
  }
  report.residuals["unitarity_TstarT"] = operator_norm(t.adjoint() * t - Matrix::Identity(n, n));
  report.residuals["unitarity_TTstar"] = operator_norm(t * t.adjoint() - Matrix::Identity(n, n));
  double range = 0.0;
  double inverse = 0.0;
  const InnerFunction& theta = basis_theta.theta();
  for (Index j = 0; j < n; ++j) {
    const GridFunction& e = basis_theta.vector(j);
    const GridFunction image = apply_tau(theta, e);
    range = std::max(range, norm(image - project_model_l2(basis_tilde.theta(), image)));
    inverse = std::max(inverse, norm(apply_tau_adjoint(theta, image) - e));
  }
  report.residuals["range_in_tilde_model_space"] = range;
  report.residuals["tau_adjoint_tau_identity"] = inverse;
  report.finish();
  return report;
}

GridFunction random_l2_function(const CircleGrid& grid, Index d, Index band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Matrix coeffs = Matrix::Zero(d, grid.size());
  for (Index k = -band; k <= band; ++k) {
    for (Index i = 0; i < d; ++i) {
      const double re = unit(rng);
      const double im = unit(rng);
      coeffs(i, grid.slot(k)) = cplx(re, im);
    }
  }
  return idft(FourierRep(grid, d, 1, std::move(coeffs)));
}

ResidualReport verify_intertwinings(const ModelSpaceBasis& basis_theta,
                                    const ModelSpaceBasis& basis_tilde, const OperatorMatrix& tau,
                                    int samples, std::uint64_t seed) {
  ResidualReport report;
  report.threshold = kTheoremTolerance;
  const Matrix s = compressed_shift(basis_theta).entries;
  const Matrix s_tilde = compressed_shift(basis_tilde).entries;
  const Matrix lhs = tau.entries * s;
  report.residuals["T_S_minus_Stilde_adjoint_T"] =
      operator_norm(lhs - s_tilde.adjoint() * tau.entries) / (operator_norm(lhs) + 1.0);

  const InnerFunction& theta = basis_theta.theta();
  const InnerFunction& theta_tilde = basis_tilde.theta();
  const Index band = std::min<Index>(16, theta.grid().size() / 8);
  std::mt19937_64 seeds(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const GridFunction f = random_l2_function(theta.grid(), theta.d(), band, seeds());
    const GridFunction left = apply_tau(theta, project_model_l2(theta, f));
    const GridFunction right = project_model_l2(theta_tilde, apply_tau(theta, f));
    worst = std::max(worst, norm(left - right) / norm(f));
  }
  report.residuals["tau_P_minus_Ptilde_tau"] = worst;
  report.finish();
  return report;
}

ResidualReport verify_proof_steps(const ModelSpaceBasis& basis_theta,
                                  const ModelSpaceBasis& basis_tilde, const OperatorMatrix& tau) {
  ResidualReport report;
  report.threshold = kTheoremTolerance;
  const InnerFunction& theta = basis_theta.theta();
  const Matrix s = compressed_shift(basis_theta).entries;
  const DefectSubspaces defects = defect_subspaces(basis_theta);
  const DefectSubspaces tilde_defects = defect_subspaces(basis_tilde);
  const Matrix d_basis = defects.d.basis;

  double into_d_perp = 0.0;
  double ssstar = 0.0;
  double matrix_agreement = 0.0;
  const Subspace tilde_dstar_perp = tilde_defects.dstar.complement("D~*-perp");
  for (Index i = 0; i < tilde_dstar_perp.dim(); ++i) {
    const GridFunction image = apply_tau_adjoint(theta, tilde_dstar_perp.vector(i));
    const Vector c = basis_theta.coordinates(image);
    const double outside = norm(image - basis_theta.synthesize(c));
    const double along_d = (d_basis.adjoint() * c).norm();
    into_d_perp = std::max(into_d_perp, std::hypot(outside, along_d));
    ssstar = std::max(ssstar, std::hypot((s * s.adjoint() * c - c).norm(), outside));
    const Vector via_matrix = tau.entries.adjoint() * tilde_dstar_perp.basis.col(i);
    matrix_agreement = std::max(matrix_agreement, (via_matrix - c).norm());
  }
  report.residuals["tau_adjoint_maps_Dtilde*_perp_into_D_perp"] = into_d_perp;
  report.residuals["S_Sstar_identity_on_tau_adjoint_image"] = ssstar;
  report.residuals["grid_tau_adjoint_matches_T_adjoint"] = matrix_agreement;

  double zf_in_d_perp = 0.0;
  double sstar_s = 0.0;
  const Subspace dstar_perp = defects.dstar.complement("D*-perp");
  for (Index i = 0; i < dstar_perp.dim(); ++i) {
    const Vector q = dstar_perp.basis.col(i);
    const GridFunction zf = times_z(basis_theta.synthesize(q), 1);
    const Vector c = basis_theta.coordinates(zf);
    const double outside = norm(zf - basis_theta.synthesize(c));
    zf_in_d_perp = std::max(zf_in_d_perp, std::hypot(outside, (d_basis.adjoint() * c).norm()));
    sstar_s = std::max(sstar_s, (s.adjoint() * s * q - q).norm());
  }
  report.residuals["z_maps_D*_perp_into_D_perp"] = zf_in_d_perp;
  report.residuals["Sstar_S_identity_on_D*_perp"] = sstar_s;
  report.finish();
  return report;
}

} // namespace mtto
