#include "mtto/circle.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

namespace mtto {

bool is_power_of_two(Index n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

CircleGrid::CircleGrid(Index size) : size_(size) {
  if (size < 8 || !is_power_of_two(size)) {
    throw GridError("grid size must be a power of two >= 8, got " + std::to_string(size));
  }
}

double CircleGrid::angle(Index m) const {
  return 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(size_);
}

cplx CircleGrid::point(Index m) const {
  // Exact values at the quarter points keep z^k bit-stable for small grids.
  const Index r = m % size_;
  if (4 * r == 0) return {1.0, 0.0};
  if (4 * r == size_) return {0.0, 1.0};
  if (4 * r == 2 * size_) return {-1.0, 0.0};
  if (4 * r == 3 * size_) return {0.0, -1.0};
  return std::polar(1.0, angle(r));
}

Index CircleGrid::slot(Index k) const {
  if (k < -size_ / 2 || k >= size_ / 2) {
    throw GridError("frequency " + std::to_string(k) + " not representable on a grid of size " +
                    std::to_string(size_));
  }
  return k >= 0 ? k : k + size_;
}

// ---------------------------------------------------------------------------

GridFunction::GridFunction(CircleGrid grid, Index rows, Index cols)
    : grid_(grid), rows_(rows), cols_(cols),
      channels_(Matrix::Zero(rows * cols, grid.size())) {
  if (rows <= 0 || cols <= 0) throw ShapeError("grid function needs positive shape");
}

GridFunction::GridFunction(CircleGrid grid, Index rows, Index cols, Matrix channels)
    : grid_(grid), rows_(rows), cols_(cols), channels_(std::move(channels)) {
  if (rows <= 0 || cols <= 0) throw ShapeError("grid function needs positive shape");
  if (channels_.rows() != rows * cols || channels_.cols() != grid.size()) {
    throw ShapeError("channel matrix does not match shape and grid");
  }
  if (!channels_.allFinite()) throw ShapeError("grid function has non-finite samples");
}

GridFunction GridFunction::constant(CircleGrid grid, const Matrix& value) {
  GridFunction f(grid, value.rows(), value.cols());
  const Eigen::Map<const Vector> flat(value.data(), value.size());
  f.channels_.colwise() = flat;
  return f;
}

GridFunction GridFunction::sample(CircleGrid grid, Index rows, Index cols,
                                  const std::function<Matrix(cplx)>& fn) {
  GridFunction f(grid, rows, cols);
  for (Index m = 0; m < grid.size(); ++m) {
    const Matrix v = fn(grid.point(m));
    if (v.rows() != rows || v.cols() != cols) throw ShapeError("sampled value has wrong shape");
    f.at(m) = v;
  }
  return f;
}

GridFunction GridFunction::monomial(CircleGrid grid, Index power, const Matrix& value) {
  return times_z(constant(grid, value), power);
}

void GridFunction::require_same_shape(const GridFunction& other) const {
  if (!(grid_ == other.grid_) || rows_ != other.rows_ || cols_ != other.cols_) {
    throw ShapeError("grid functions differ in grid or shape");
  }
}

GridFunction& GridFunction::operator+=(const GridFunction& other) {
  require_same_shape(other);
  channels_ += other.channels_;
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
  require_same_shape(other);
  channels_ -= other.channels_;
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  channels_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------

FourierRep::FourierRep(CircleGrid grid, Index rows, Index cols, Matrix coefficients)
    : grid_(grid), rows_(rows), cols_(cols), coefficients_(std::move(coefficients)) {
  if (coefficients_.rows() != rows * cols || coefficients_.cols() != grid.size()) {
    throw ShapeError("coefficient matrix does not match shape and grid");
  }
}

Matrix FourierRep::coefficient(Index k) const {
  const Index s = grid_.slot(k);
  return Eigen::Map<const Matrix>(coefficients_.col(s).data(), rows_, cols_);
}

void FourierRep::set_coefficient(Index k, const Matrix& value) {
  if (value.rows() != rows_ || value.cols() != cols_) throw ShapeError("coefficient shape");
  const Index s = grid_.slot(k);
  Eigen::Map<Matrix>(coefficients_.col(s).data(), rows_, cols_) = value;
}

namespace {

// Transforms every row of `data` in place. forward: sum_m x_m e^{-2 pi i k m/M}
// scaled by 1/M; inverse: unscaled sum with the opposite sign.
void transform_rows(Matrix& data, bool forward) {
  const Index size = data.cols();
  if (!is_power_of_two(size)) throw GridError("transform length must be a power of two");
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cplx> in(static_cast<std::size_t>(size));
  std::vector<cplx> out(static_cast<std::size_t>(size));
  const double scale = forward ? 1.0 / static_cast<double>(size) : 1.0;
  for (Index r = 0; r < data.rows(); ++r) {
    for (Index m = 0; m < size; ++m) in[static_cast<std::size_t>(m)] = data(r, m);
    if (forward) {
      fft.fwd(out, in);
    } else {
      fft.inv(out, in);
    }
    for (Index m = 0; m < size; ++m) data(r, m) = out[static_cast<std::size_t>(m)] * scale;
  }
}

} // namespace

FourierRep dft(const GridFunction& f) {
  Matrix data = f.channels();
  transform_rows(data, true);
  return {f.grid(), f.rows(), f.cols(), std::move(data)};
}

GridFunction idft(const FourierRep& c) {
  Matrix data = c.coefficients();
  transform_rows(data, false);
  return {c.grid(), c.rows(), c.cols(), std::move(data)};
}

GridFunction analytic_project(const GridFunction& f) {
  FourierRep c = dft(f);
  const Index size = f.grid().size();
  c.coefficients().rightCols(size / 2).setZero();
  return idft(c);
}

double negative_frequency_energy(const GridFunction& f) {
  const FourierRep c = dft(f);
  const Index size = f.grid().size();
  return c.coefficients().rightCols(size / 2).squaredNorm();
}

cplx inner_product(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid()) || f.rows() != g.rows() || f.cols() != g.cols()) {
    throw ShapeError("inner product of grid functions with different grid or shape");
  }
  // sum over channels and points of f * conj(g)
  const cplx total = (g.channels().conjugate().cwiseProduct(f.channels())).sum();
  return total / static_cast<double>(f.grid().size());
}

double norm(const GridFunction& f) {
  return f.channels().norm() / std::sqrt(static_cast<double>(f.grid().size()));
}

GridFunction flip(const GridFunction& f) {
  GridFunction out(f.grid(), f.rows(), f.cols());
  const CircleGrid& grid = f.grid();
  for (Index m = 0; m < grid.size(); ++m) {
    out.channels().col(m) = f.channels().col(grid.flipped(m));
  }
  return out;
}

GridFunction multiply(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid()) || a.cols() != b.rows()) {
    throw ShapeError("pointwise product of incompatible grid functions");
  }
  GridFunction out(a.grid(), a.rows(), b.cols());
  for (Index m = 0; m < a.grid().size(); ++m) out.at(m).noalias() = a.at(m) * b.at(m);
  return out;
}

GridFunction adjoint(const GridFunction& f) {
  GridFunction out(f.grid(), f.cols(), f.rows());
  for (Index m = 0; m < f.grid().size(); ++m) out.at(m) = f.at(m).adjoint();
  return out;
}

GridFunction times_z(const GridFunction& f, Index power) {
  GridFunction out = f;
  const CircleGrid& grid = f.grid();
  const Index size = grid.size();
  for (Index m = 0; m < size; ++m) {
    // index arithmetic keeps z^k exactly periodic on the grid
    Index r = (power % size) * m % size;
    if (r < 0) r += size;
    out.channels().col(m) *= grid.point(r);
  }
  return out;
}

GridFunction backward_shift(const GridFunction& f) {
  FourierRep c = dft(f);
  const Index size = f.grid().size();
  Matrix& coeffs = c.coefficients();
  coeffs.col(0).setZero();
  Matrix shifted(coeffs.rows(), size);
  for (Index s = 0; s < size; ++s) shifted.col(s) = coeffs.col((s + 1) % size);
  coeffs = std::move(shifted);
  return idft(c);
}

double max_tail_energy(const GridFunction& f, Index cutoff) {
  const FourierRep c = dft(f);
  const CircleGrid& grid = f.grid();
  double worst = 0.0;
  for (Index r = 0; r < c.coefficients().rows(); ++r) {
    double energy = 0.0;
    for (Index s = 0; s < grid.size(); ++s) {
      const Index k = grid.frequency(s);
      if (k >= cutoff || k <= -cutoff) energy += std::norm(c.coefficients()(r, s));
    }
    worst = std::max(worst, energy);
  }
  return worst;
}

} // namespace mtto
