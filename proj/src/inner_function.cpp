#include "mtto/inner_function.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mtto {

cplx blaschke_factor(cplx zero, cplx z) {
  const double modulus = std::abs(zero);
  if (modulus == 0.0) return z;
  return (std::conj(zero) / modulus) * (zero - z) / (1.0 - std::conj(zero) * z);
}

PotapovFactor PotapovFactor::rank1(cplx zero, Vector direction) {
  PotapovFactor f;
  f.kind = Kind::rank1;
  f.zero = zero;
  f.direction = std::move(direction);
  return f;
}

PotapovFactor PotapovFactor::full_shift(Index power) {
  PotapovFactor f;
  f.kind = Kind::full_shift;
  f.power = power;
  return f;
}

Matrix PotapovFactor::operator()(cplx z, Index d) const {
  if (kind == Kind::full_shift) {
    return Matrix::Identity(d, d) * std::pow(z, static_cast<int>(power));
  }
  const cplx b = blaschke_factor(zero, z);
  return Matrix::Identity(d, d) + (b - 1.0) * direction * direction.adjoint();
}

void InnerFunctionSpec::validate() const {
  if (d < 1) throw SpecError("dimension d must be positive");
  if (factors.empty()) throw SpecError("inner function needs at least one factor");
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const PotapovFactor& f = factors[i];
    const std::string where = "factor " + std::to_string(i) + ": ";
    if (f.kind == PotapovFactor::Kind::full_shift) {
      if (f.power < 1) throw SpecError(where + "full_shift power must be positive");
      continue;
    }
    const double modulus = std::abs(f.zero);
    if (!std::isfinite(modulus) || modulus >= 1.0) {
      throw SpecError(where + "zero must lie in the open unit disc");
    }
    if (modulus > kMaxZeroModulus) {
      throw SpecError(where + "|a| exceeds the conditioning guard 0.95");
    }
    if (f.direction.size() != d) throw SpecError(where + "direction has wrong length");
    if (!f.direction.allFinite() || std::abs(f.direction.norm() - 1.0) > 1e-12) {
      throw SpecError(where + "direction must be a unit vector");
    }
  }
  if (unitary) {
    if (unitary->rows() != d || unitary->cols() != d) throw SpecError("U must be d x d");
    if (!unitary->allFinite()) throw SpecError("U has non-finite entries");
  }
}

Matrix eval_inner(const InnerFunctionSpec& spec, cplx z) {
  Matrix value = spec.unitary ? *spec.unitary : Matrix::Identity(spec.d, spec.d);
  for (const PotapovFactor& f : spec.factors) value = value * f(z, spec.d);
  return value;
}

std::vector<Matrix> eval_inner(const InnerFunctionSpec& spec, std::span<const cplx> points) {
  spec.validate();
  std::vector<Matrix> values;
  values.reserve(points.size());
  for (const cplx z : points) {
    if (std::abs(z) > 1.0 + 1e-14) throw SpecError("evaluation point outside the closed disc");
    values.push_back(eval_inner(spec, z));
  }
  return values;
}

GridFunction eval_inner(const InnerFunctionSpec& spec, const CircleGrid& grid) {
  spec.validate();
  const Index d = spec.d;
  GridFunction samples(grid, d, d);
  for (Index m = 0; m < grid.size(); ++m) samples.at(m) = eval_inner(spec, grid.point(m));
  return samples;
}

Index expected_model_dim(const InnerFunctionSpec& spec) {
  Index total = 0;
  for (const PotapovFactor& f : spec.factors) {
    total += f.kind == PotapovFactor::Kind::rank1 ? 1 : f.power * spec.d;
  }
  return total;
}

InnerFunctionSpec tilde_spec(const InnerFunctionSpec& spec) {
  // (U B_1 ... B_n)(conj z)^* = B_n~ ... B_1~ U^* = U^* (U B_n~ U^*) ... (U B_1~ U^*)
  InnerFunctionSpec out;
  out.d = spec.d;
  const Matrix u = spec.unitary ? *spec.unitary : Matrix::Identity(spec.d, spec.d);
  for (auto it = spec.factors.rbegin(); it != spec.factors.rend(); ++it) {
    if (it->kind == PotapovFactor::Kind::full_shift) {
      out.factors.push_back(*it);
    } else {
      Vector v = u * it->direction;
      v /= v.norm();
      out.factors.push_back(PotapovFactor::rank1(std::conj(it->zero), std::move(v)));
    }
  }
  if (spec.unitary) out.unitary = spec.unitary->adjoint();
  return out;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double unitarity_residual(const GridFunction& samples) {
  const Index d = samples.rows();
  double worst = 0.0;
  for (Index m = 0; m < samples.grid().size(); ++m) {
    const Matrix gram = samples.at(m).adjoint() * samples.at(m) - Matrix::Identity(d, d);
    // Hermitian: operator norm is the largest |eigenvalue|
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    worst = std::max(worst, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  return worst;
}

InnerFunction::InnerFunction(InnerFunctionSpec spec, GridFunction samples, Matrix theta0)
    : spec_(std::move(spec)), samples_(std::move(samples)), theta0_(std::move(theta0)) {
  pure_ = operator_norm(theta0_) < 1.0 - kPurityMargin;
  unitarity_residual_ = mtto::unitarity_residual(samples_);
  if (!(unitarity_residual_ < kUnitarityTolerance)) {
    throw NotInner("boundary values fail unitarity: residual " +
                   std::to_string(unitarity_residual_));
  }
}

InnerFunction make_inner(const InnerFunctionSpec& spec, const GridOptions& options) {
  spec.validate();
  Matrix theta0 = eval_inner(spec, cplx{0.0, 0.0});
  if (options.size) {
    return InnerFunction(spec, eval_inner(spec, CircleGrid(*options.size)), std::move(theta0));
  }
  if (!is_power_of_two(options.max_size) || options.max_size < 8) {
    throw GridError("adaptive grid cap must be a power of two >= 8");
  }
  Index size = std::min<Index>(256, options.max_size);
  for (;;) {
    GridFunction samples = eval_inner(spec, CircleGrid(size));
    if (max_tail_energy(samples, size / 4) < options.tail_tol) {
      return InnerFunction(spec, std::move(samples), std::move(theta0));
    }
    if (size * 2 > options.max_size) {
      throw GridTooCoarse("spectral tail above tolerance at the grid cap " +
                          std::to_string(options.max_size));
    }
    size *= 2;
  }
}

InnerFunction tilde(const InnerFunction& theta) {
  GridFunction samples = adjoint(flip(theta.samples()));
  return InnerFunction(tilde_spec(theta.spec()), std::move(samples), theta.theta0().adjoint());
}

Index det_winding_number(const InnerFunction& theta) {
  const GridFunction& samples = theta.samples();
  const Index size = samples.grid().size();
  double phase = 0.0;
  cplx previous = samples.at(size - 1).determinant();
  for (Index m = 0; m < size; ++m) {
    const cplx current = samples.at(m).determinant();
    phase += std::arg(current / previous);
    previous = current;
  }
  return static_cast<Index>(std::lround(phase / (2.0 * std::numbers::pi)));
}

} // namespace mtto
