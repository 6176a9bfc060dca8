#ifndef MTTO_MODEL_SPACE_HPP
#define MTTO_MODEL_SPACE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mtto/inner_function.hpp"

namespace mtto {

/// Orthogonal projection onto K_Theta, computed as P_+ f - Theta P_+(Theta^* f).
/// Throws DomainError when f carries negative-frequency mass above
/// 1e-10 ||f||.
GridFunction project_model(const InnerFunction& theta, const GridFunction& f);
/// Same projection applied to an arbitrary element of L^2(E).
GridFunction project_model_l2(const InnerFunction& theta, const GridFunction& f);

/// Orthonormal basis of K_Theta. Copies share the same immutable data, so
/// identity of two bases is identity of that data.
class ModelSpaceBasis {
public:
  const InnerFunction& theta() const noexcept { return data_->theta; }
  const std::vector<GridFunction>& vectors() const noexcept { return data_->vectors; }
  const GridFunction& vector(Index i) const { return data_->vectors.at(static_cast<std::size_t>(i)); }
  Index dim() const noexcept { return static_cast<Index>(data_->vectors.size()); }
  bool pure() const noexcept { return data_->theta.pure(); }
  const CircleGrid& grid() const noexcept { return data_->theta.grid(); }

  /// <f, e_i> for every basis vector.
  Vector coordinates(const GridFunction& f) const;
  /// sum_i c_i e_i.
  GridFunction synthesize(const Vector& c) const;
  /// ||f - sum_i <f, e_i> e_i||: distance from f to K_Theta.
  double distance(const GridFunction& f) const;

  friend bool operator==(const ModelSpaceBasis& a, const ModelSpaceBasis& b) noexcept {
    return a.data_ == b.data_;
  }

private:
  struct Data {
    InnerFunction theta;
    std::vector<GridFunction> vectors;
  };
  explicit ModelSpaceBasis(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  friend ModelSpaceBasis build_basis(const InnerFunction&);

  std::shared_ptr<const Data> data_;
};

/// Modified Gram-Schmidt over P_Theta(z^k e_i), degree-major, with one
/// re-orthogonalization pass and a relative drop tolerance of 1e-8.
/// Throws DimensionMismatch if the result disagrees with expected_model_dim.
ModelSpaceBasis build_basis(const InnerFunction& theta);

/// Dense matrix of an operator between model spaces in their stored bases.
struct OperatorMatrix {
  ModelSpaceBasis rows_basis;
  ModelSpaceBasis cols_basis;
  Matrix entries;
  std::string label;
};

/// S_Theta: entries <z e_j, e_i>.
OperatorMatrix compressed_shift(const ModelSpaceBasis& basis);
/// S_Theta^* computed independently as the backward shift restricted to K_Theta.
OperatorMatrix compressed_shift_adjoint(const ModelSpaceBasis& basis);

/// Subspace of a model space given by orthonormal coefficient columns in
/// the parent basis.
struct Subspace {
  ModelSpaceBasis parent;
  Matrix basis;
  std::string label;

  Index dim() const noexcept { return basis.cols(); }
  Matrix projector() const { return basis * basis.adjoint(); }
  /// Orthogonal complement inside the parent.
  Subspace complement(std::string complement_label) const;
  GridFunction vector(Index i) const { return parent.synthesize(basis.col(i)); }
};

/// Orthonormal basis for the span of the columns of `coords` (coefficient
/// vectors in `parent`), keeping singular directions above `rank_tol`.
Subspace span_of(const ModelSpaceBasis& parent, const Matrix& coords, std::string label,
                 double rank_tol = tol::rank);

enum class LemmaCheck { passed, failed, skipped };
std::string to_string(LemmaCheck c);

struct DefectSubspaces {
  Subspace d;      ///< span{(I - Theta(z) Theta(0)^*) x}
  Subspace dstar;  ///< span{(Theta(z) - Theta(0)) x / z}
  /// Max over generators of their distance to K_Theta.
  double containment_residual = 0.0;
  /// Max pointwise deviation of the synthesized generators from the formulas.
  double generator_residual = 0.0;
  LemmaCheck lemma_dim_check = LemmaCheck::skipped;
};

/// (I - Theta(z) Theta(0)^*) x for each column x of `xs`.
std::vector<GridFunction> defect_generators(const InnerFunction& theta, const Matrix& xs);
/// (Theta(z) - Theta(0)) x / z for each column x of `xs`, with the division
/// done on Fourier coefficients.
std::vector<GridFunction> defect_star_generators(const InnerFunction& theta, const Matrix& xs);

DefectSubspaces defect_subspaces(const ModelSpaceBasis& basis, double rank_tol = tol::rank);

/// Named residuals with a pass threshold.
struct ResidualReport {
  std::map<std::string, double> residuals;
  double threshold = 0.0;
  bool pass = false;

  double max() const;
  void finish() { pass = max() < threshold; }
};

inline constexpr double kTheoremTolerance = 1e-8;

/// Compares S_Theta and S_Theta^* on each branch domain with the piecewise
/// formulas (f/z on D-perp, zf on D*-perp, and the two defect branches).
/// Residuals are divided by ||S_Theta|| + 1.
ResidualReport verify_theorem4(const ModelSpaceBasis& basis);

/// (tau f)(e^{it}) = e^{-it} Theta(e^{-it})^* f(e^{-it}).
GridFunction apply_tau(const InnerFunction& theta, const GridFunction& f);
/// (tau^* f)(e^{it}) = e^{-it} Theta~(e^{-it})^* f(e^{-it}) = e^{-it} Theta(e^{it}) f(e^{-it}).
GridFunction apply_tau_adjoint(const InnerFunction& theta, const GridFunction& f);

/// Matrix of tau: K_Theta -> K_Theta~, entries <tau e_j, g_i>. Throws
/// GridError when the bases live on different grids.
OperatorMatrix tau_matrix(const ModelSpaceBasis& basis_theta, const ModelSpaceBasis& basis_tilde);

/// Unitarity of T, range of tau in K_Theta~, and tau^* tau = I on K_Theta.
ResidualReport verify_tau(const ModelSpaceBasis& basis_theta, const ModelSpaceBasis& basis_tilde,
                          const OperatorMatrix& tau);

/// Random element of L^2(E) with Fourier coefficients uniform in the unit
/// square for |k| <= band.
GridFunction random_l2_function(const CircleGrid& grid, Index d, Index band, std::uint64_t seed);

/// ||T S_Theta - S_Theta~^* T|| / (||T S_Theta|| + 1) and
/// max ||tau P_Theta f - P_Theta~ tau f|| / ||f|| over `samples` seeded f.
ResidualReport verify_intertwinings(const ModelSpaceBasis& basis_theta,
                                    const ModelSpaceBasis& basis_tilde, const OperatorMatrix& tau,
                                    int samples, std::uint64_t seed);

/// Steps of the spatial-isomorphism argument: tau^* maps D~*-perp into
/// D-perp with S S^* = I there, and S^* S = I on D*-perp.
ResidualReport verify_proof_steps(const ModelSpaceBasis& basis_theta,
                                  const ModelSpaceBasis& basis_tilde, const OperatorMatrix& tau);

} // namespace mtto

#endif // MTTO_MODEL_SPACE_HPP
