#ifndef MTTO_INNER_FUNCTION_HPP
#define MTTO_INNER_FUNCTION_HPP

#include <optional>
#include <span>
#include <vector>

#include "mtto/circle.hpp"

namespace mtto {

/// Largest admissible zero modulus for a rank-one factor. Zeros closer to
/// the circle push the adaptive grid past its cap.
inline constexpr double kMaxZeroModulus = 0.95;

/// Elementary inner factor: either I + (b_a(z) - 1) v v^* with the scalar
/// Blaschke factor b_a(z) = (conj(a)/|a|)(a - z)/(1 - conj(a) z) (b_0 = z),
/// or the full shift z^k I.
struct PotapovFactor {
  enum class Kind { rank1, full_shift };

  Kind kind = Kind::full_shift;
  cplx zero{0.0, 0.0};
  Vector direction;
  Index power = 1;

  static PotapovFactor rank1(cplx zero, Vector direction);
  static PotapovFactor full_shift(Index power);

  Matrix operator()(cplx z, Index d) const;
};

/// Scalar Blaschke factor normalized so that b_a(0) = |a|.
cplx blaschke_factor(cplx zero, cplx z);

/// Theta(z) = U B_1(z) B_2(z) ... B_n(z) on E = C^d.
struct InnerFunctionSpec {
  Index d = 1;
  std::vector<PotapovFactor> factors;
  std::optional<Matrix> unitary;

  /// Throws SpecError on a malformed spec. Unitarity of U is not checked
  /// here; certification in make_inner reports it as NotInner.
  void validate() const;
};

Matrix eval_inner(const InnerFunctionSpec& spec, cplx z);
std::vector<Matrix> eval_inner(const InnerFunctionSpec& spec, std::span<const cplx> points);
GridFunction eval_inner(const InnerFunctionSpec& spec, const CircleGrid& grid);

/// Dimension of the model space: one per rank-one factor, k*d per z^k.
Index expected_model_dim(const InnerFunctionSpec& spec);

/// Spec of z -> Theta(conj z)^*, again a Blaschke-Potapov product.
InnerFunctionSpec tilde_spec(const InnerFunctionSpec& spec);

struct GridOptions {
  /// Fixed grid size; adaptive doubling from 256 when absent.
  std::optional<Index> size;
  Index max_size = 16384;
  double tail_tol = tol::tail;
};

/// Inner function sampled on a grid and certified: boundary values unitary
/// to 1e-10 at every grid point.
class InnerFunction {
public:
  const InnerFunctionSpec& spec() const noexcept { return spec_; }
  const CircleGrid& grid() const noexcept { return samples_.grid(); }
  const GridFunction& samples() const noexcept { return samples_; }
  const Matrix& theta0() const noexcept { return theta0_; }
  Index d() const noexcept { return spec_.d; }
  bool pure() const noexcept { return pure_; }
  double unitarity_residual() const noexcept { return unitarity_residual_; }

private:
  InnerFunction(InnerFunctionSpec spec, GridFunction samples, Matrix theta0);

  friend InnerFunction make_inner(const InnerFunctionSpec&, const GridOptions&);
  friend InnerFunction tilde(const InnerFunction&);

  InnerFunctionSpec spec_;
  GridFunction samples_;
  Matrix theta0_;
  bool pure_ = false;
  double unitarity_residual_ = 0.0;
};

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kPurityMargin = 1e-8;

/// Samples and certifies. Throws SpecError, NotInner, or GridTooCoarse.
InnerFunction make_inner(const InnerFunctionSpec& spec, const GridOptions& options = {});

/// Theta~(e^{it_m}) = Theta(e^{-it_m})^*, by index permutation.
InnerFunction tilde(const InnerFunction& theta);

/// max_m ||Theta_m^* Theta_m - I|| in operator norm.
double unitarity_residual(const GridFunction& samples);

/// Winding number of det Theta around 0, by phase accumulation on the grid.
Index det_winding_number(const InnerFunction& theta);

/// Spectral norm.
double operator_norm(const Matrix& a);

} // namespace mtto

#endif // MTTO_INNER_FUNCTION_HPP
