#ifndef MTTO_TOEPLITZ_HPP
#define MTTO_TOEPLITZ_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mtto/model_space.hpp"

namespace mtto {

/// Trigonometric-polynomial symbol Phi(e^{it}) = sum_{|k| <= band} Phi_k e^{ikt}.
class SymbolSpec {
public:
  SymbolSpec(Index d, Index band);
  SymbolSpec(Index d, Index band, std::vector<Matrix> coefficients);

  /// z^power times the matrix unit E_{row,col}.
  static SymbolSpec monomial(Index d, Index power, Index row, Index col);
  static SymbolSpec constant(const Matrix& value);

  Index d() const noexcept { return d_; }
  Index band() const noexcept { return band_; }
  const Matrix& coefficient(Index k) const;
  Matrix& coefficient(Index k);
  const std::vector<Matrix>& coefficients() const noexcept { return coefficients_; }

  /// Pointwise conjugate transpose: coefficients Phi_{-k}^*.
  SymbolSpec adjoint() const;
  GridFunction sample(const CircleGrid& grid) const;

  SymbolSpec& operator+=(const SymbolSpec& other);
  SymbolSpec& operator*=(cplx s);
  friend SymbolSpec operator+(SymbolSpec a, const SymbolSpec& b) { return a += b; }
  friend SymbolSpec operator*(cplx s, SymbolSpec a) { return a *= s; }

private:
  Index d_;
  Index band_;
  std::vector<Matrix> coefficients_; // k = -band .. band
};

/// Symbol with coefficient entries uniform in the unit square.
SymbolSpec random_symbol(Index d, Index band, std::mt19937_64& rng);

/// A_Phi with entries <Phi e_j, e_i>. Throws AliasError when band > M/4.
OperatorMatrix mtto_matrix(const ModelSpaceBasis& basis, const SymbolSpec& phi);

/// <A f, f>.
cplx quadratic_form(const OperatorMatrix& a, const Vector& f);

inline constexpr int kShiftTestSamples = 32;
inline constexpr std::uint64_t kShiftTestSeed = 0x5eed5eedULL;
inline constexpr double kMembershipTolerance = 1e-8;
inline constexpr double kNonMemberTolerance = 1e-6;

/// max |Q_A(f) - Q_A(z f)| / (||A|| + 1) over an orthonormal basis of
/// D*-perp and seeded random unit vectors there. D*-perp is exactly the set
/// of f with f, zf in K_Theta when Theta is pure; other inputs throw
/// UnsupportedDomain.
double shift_invariance_residual(const OperatorMatrix& a, const ModelSpaceBasis& basis,
                                 std::uint64_t seed = kShiftTestSeed);

struct SymbolRecovery {
  SymbolSpec symbol;
  double residual = 0.0;
};

/// Least-squares fit of A by the span of A_{z^k E_pq}, |k| <= band, keyed to
/// one basis. The design matrix is assembled from Fourier moments of the
/// products e_j,q conj(e_i,p) rather than from mtto_matrix.
class SymbolFitter {
public:
  SymbolFitter(const ModelSpaceBasis& basis, Index band);

  /// Minimum-norm coefficients and the attained Frobenius distance.
  SymbolRecovery fit(const Matrix& a) const;
  /// A minus its best approximation in the span.
  Matrix residual_matrix(const Matrix& a) const;
  Index band() const noexcept { return band_; }
  /// Dimension of the span of the fitted operators.
  Index span_rank() const noexcept { return rank_; }

private:
  ModelSpaceBasis basis_;
  Index band_;
  Matrix design_; // columns vec(A_{z^k E_pq})
  Eigen::JacobiSVD<Matrix> svd_;
  Index rank_ = 0;
};

/// Throws AliasError when band > M/4.
SymbolRecovery recover_symbol(const OperatorMatrix& a, const ModelSpaceBasis& basis, Index band);

struct MttoReport {
  double shift_invariance_residual = 0.0;
  bool membership = false;
  std::optional<SymbolSpec> recovered_symbol;
  double recovery_residual = 0.0;
};

MttoReport classify(const OperatorMatrix& a, const ModelSpaceBasis& basis, Index band);

/// T A T^*, acting on the model space of T's rows.
OperatorMatrix conjugate_by_tau(const OperatorMatrix& a, const OperatorMatrix& tau);
/// T^* A T, acting on the model space of T's columns.
OperatorMatrix conjugate_by_tau_adjoint(const OperatorMatrix& a, const OperatorMatrix& tau);

/// Operator orthogonal to every A_Phi of the fitter's band, normalized to
/// unit Frobenius norm, with its certified distance to that span.
struct NonMember {
  OperatorMatrix matrix;
  double distance = 0.0;
  double shift_residual = 0.0;
};
std::optional<NonMember> negative_control(const ModelSpaceBasis& basis, const SymbolFitter& fitter,
                                          std::mt19937_64& rng);

struct DirectionReport {
  double max_shift_residual = 0.0;
  double max_recovery_residual = 0.0;
  int cases = 0;
  bool pass = false;
};

struct SpatialIsomorphismReport {
  DirectionReport forward;  ///< tau A_Phi tau^* on K_Theta~
  DirectionReport backward; ///< tau^* A_Psi tau on K_Theta
  Index recovery_band = 0;
  bool pass = false;
};

/// Both inclusions tau T_Theta tau^* in T_Theta~ and tau^* T_Theta~ tau in
/// T_Theta on the sampled symbols. Requires pure theta.
SpatialIsomorphismReport verify_spatial_isomorphism(const ModelSpaceBasis& basis_theta,
                                                    const ModelSpaceBasis& basis_tilde,
                                                    const OperatorMatrix& tau,
                                                    const std::vector<SymbolSpec>& phi_samples,
                                                    const std::vector<SymbolSpec>& psi_samples,
                                                    std::uint64_t seed);

/// Band used when recovering symbols: dim K_Theta + 2, capped at M/4.
Index recovery_band(const ModelSpaceBasis& basis);

} // namespace mtto

#endif // MTTO_TOEPLITZ_HPP
