#ifndef MTTO_CIRCLE_HPP
#define MTTO_CIRCLE_HPP

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>

#include "mtto/errors.hpp"

namespace mtto {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Default tolerances shared by the whole library.
namespace tol {
inline constexpr double roundtrip = 1e-13;
inline constexpr double identity = 1e-9;
inline constexpr double rank = 1e-8;
inline constexpr double tail = 1e-12;
} // namespace tol

/// Uniform grid t_m = 2*pi*m/M on the unit circle, M a power of two >= 8.
class CircleGrid {
public:
  explicit CircleGrid(Index size);

  Index size() const noexcept { return size_; }
  double angle(Index m) const;
  cplx point(Index m) const;

  /// Index of the point e^{-i t_m}.
  Index flipped(Index m) const noexcept { return (size_ - m) % size_; }

  /// Signed frequency stored at coefficient slot `slot`; negative
  /// frequencies live in the upper half, [-M/2, M/2).
  Index frequency(Index slot) const noexcept {
    return slot < size_ / 2 ? slot : slot - size_;
  }
  /// Coefficient slot of frequency k. Throws GridError when k is outside
  /// [-M/2, M/2).
  Index slot(Index k) const;

  friend bool operator==(const CircleGrid& a, const CircleGrid& b) noexcept {
    return a.size_ == b.size_;
  }

private:
  Index size_;
};

bool is_power_of_two(Index n) noexcept;

/// Samples of an E-valued (rows x 1) or L(E)-valued (rows x cols) function
/// on a CircleGrid. Stored as one channel per matrix entry (column-major
/// entry order), one column per grid point, so the value at point m is a
/// contiguous rows x cols block.
class GridFunction {
public:
  GridFunction(CircleGrid grid, Index rows, Index cols = 1);
  GridFunction(CircleGrid grid, Index rows, Index cols, Matrix channels);

  static GridFunction constant(CircleGrid grid, const Matrix& value);
  static GridFunction sample(CircleGrid grid, Index rows, Index cols,
                             const std::function<Matrix(cplx)>& fn);
  /// z^power times the constant `value`.
  static GridFunction monomial(CircleGrid grid, Index power, const Matrix& value);

  const CircleGrid& grid() const noexcept { return grid_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index channel_count() const noexcept { return rows_ * cols_; }
  bool is_vector() const noexcept { return cols_ == 1; }

  const Matrix& channels() const noexcept { return channels_; }
  Matrix& channels() noexcept { return channels_; }

  Eigen::Map<const Matrix> at(Index m) const {
    return {channels_.col(m).data(), rows_, cols_};
  }
  Eigen::Map<Matrix> at(Index m) { return {channels_.col(m).data(), rows_, cols_}; }

  GridFunction& operator+=(const GridFunction& other);
  GridFunction& operator-=(const GridFunction& other);
  GridFunction& operator*=(cplx s);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, cplx s) { return a *= s; }
  friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

private:
  void require_same_shape(const GridFunction& other) const;

  CircleGrid grid_;
  Index rows_;
  Index cols_;
  Matrix channels_;
};

/// Fourier coefficients c_k = (1/M) sum_m f(e^{i t_m}) e^{-i k t_m}, laid
/// out like GridFunction with slot index in place of grid point.
class FourierRep {
public:
  FourierRep(CircleGrid grid, Index rows, Index cols, Matrix coefficients);

  const CircleGrid& grid() const noexcept { return grid_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  const Matrix& coefficients() const noexcept { return coefficients_; }
  Matrix& coefficients() noexcept { return coefficients_; }

  /// Coefficient of frequency k as a rows x cols matrix.
  Matrix coefficient(Index k) const;
  void set_coefficient(Index k, const Matrix& value);

private:
  CircleGrid grid_;
  Index rows_;
  Index cols_;
  Matrix coefficients_;
};

FourierRep dft(const GridFunction& f);
GridFunction idft(const FourierRep& c);

/// Projection onto the Hardy space: drops every negative frequency.
GridFunction analytic_project(const GridFunction& f);

/// Energy (sum of squared moduli) of the coefficients with k < 0.
double negative_frequency_energy(const GridFunction& f);

/// (1/M) sum_m <f_m, g_m>, linear in f. For matrix-valued arguments the
/// pointwise pairing is the Hilbert-Schmidt one, tr(g_m^* f_m).
cplx inner_product(const GridFunction& f, const GridFunction& g);
double norm(const GridFunction& f);

/// Value at index m replaced by the value at (M - m) mod M.
GridFunction flip(const GridFunction& f);

/// Pointwise product a(e^{it}) b(e^{it}).
GridFunction multiply(const GridFunction& a, const GridFunction& b);
/// Pointwise conjugate transpose.
GridFunction adjoint(const GridFunction& f);
/// Pointwise multiplication by e^{i power t}.
GridFunction times_z(const GridFunction& f, Index power = 1);
/// Backward shift (f - f(0))/z carried out on the coefficients.
GridFunction backward_shift(const GridFunction& f);
/// Energy of the coefficients with |k| >= cutoff, per channel maximum.
double max_tail_energy(const GridFunction& f, Index cutoff);

} // namespace mtto

#endif // MTTO_CIRCLE_HPP
