#include "qchan/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "qchan/error.hpp"

namespace qchan {

namespace {

std::string shape(const ComplexMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {
  if (rows == 0 || cols == 0) fail(ErrorKind::invalid_argument, "matrix dimensions must be >= 1");
}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows == 0 || cols == 0) fail(ErrorKind::invalid_argument, "matrix dimensions must be >= 1");
  if (data_.size() != rows * cols)
    fail(ErrorKind::invalid_argument, "entry count does not match " + shape(*this));
  check_finite();
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) fail(ErrorKind::invalid_argument, "matrix dimensions must be >= 1");
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(ErrorKind::invalid_argument, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  check_finite();
}

void ComplexMatrix::check_finite() const {
  for (const auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      fail(ErrorKind::invalid_argument, "matrix entry is not finite");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::outer(std::span<const cplx> v, std::span<const cplx> w) {
  ComplexMatrix m(v.size(), w.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < w.size(); ++j) m(i, j) = v[i] * std::conj(w[j]);
  return m;
}

ComplexMatrix ComplexMatrix::diag(std::span<const cplx> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorKind::invalid_argument, "cannot add " + shape(*this) + " and " + shape(o));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(ErrorKind::invalid_argument, "cannot subtract " + shape(o) + " from " + shape(*this));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols_ != b.rows_)
    fail(ErrorKind::invalid_argument, "cannot multiply " + shape(a) + " by " + shape(b));
  ComplexMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx{}) continue;
      const cplx* brow = &b.data_[k * b.cols_];
      cplx* orow = &out.data_[i * out.cols_];
      for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

double ComplexMatrix::max_abs() const noexcept {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b; }

ComplexMatrix adjoint(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

cplx trace(const ComplexMatrix& a) {
  if (!a.square()) fail(ErrorKind::invalid_argument, "trace of non-square " + shape(a));
  cplx t{};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (!a.square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

double unitarity_residual(const ComplexMatrix& a) {
  return max_abs_diff(adjoint(a) * a, ComplexMatrix::identity(a.cols()));
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (!a.square()) fail(ErrorKind::invalid_argument, "eigenvalues of non-square " + shape(a));
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = a(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  if (!op.square()) fail(ErrorKind::invalid_argument, "partial trace of non-square " + shape(op));
  std::size_t total = 1;
  for (auto d : dims) {
    if (d == 0) fail(ErrorKind::invalid_argument, "zero subsystem dimension");
    total *= d;
  }
  if (total != op.rows())
    fail(ErrorKind::invalid_argument,
         "subsystem dimensions multiply to " + std::to_string(total) + ", operator is " + shape(op));

  const std::size_t n = dims.size();
  std::vector<bool> kept(n, false);
  for (auto k : keep) {
    if (k >= n || kept[k]) fail(ErrorKind::invalid_argument, "bad or repeated kept subsystem index");
    kept[k] = true;
  }

  std::size_t keep_dim = 1;
  for (std::size_t s = 0; s < n; ++s)
    if (kept[s]) keep_dim *= dims[s];

  // Maps a full multi-index (as a flat index) to (kept flat index, traced flat index).
  std::vector<std::size_t> kept_of(total), traced_of(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat, kidx = 0, tidx = 0, kscale = 1, tscale = 1;
    for (std::size_t s = n; s-- > 0;) {
      const std::size_t digit = rem % dims[s];
      rem /= dims[s];
      if (kept[s]) {
        kidx += digit * kscale;
        kscale *= dims[s];
      } else {
        tidx += digit * tscale;
        tscale *= dims[s];
      }
    }
    kept_of[flat] = kidx;
    traced_of[flat] = tidx;
  }

  ComplexMatrix out(keep_dim, keep_dim);
  for (std::size_t r = 0; r < total; ++r)
    for (std::size_t c = 0; c < total; ++c)
      if (traced_of[r] == traced_of[c]) out(kept_of[r], kept_of[c]) += op(r, c);
  return out;
}

}  // namespace qchan
