#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qchan {

using cplx = std::complex<double>;

/// Dense complex matrix stored row-major. Entries are always finite.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return {rows, cols}; }
  /// |v><w| for column vectors v, w.
  static ComplexMatrix outer(std::span<const cplx> v, std::span<const cplx> w);
  static ComplexMatrix diag(std::span<const cplx> d);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const cplx> entries() const noexcept { return data_; }

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  /// Largest entrywise modulus.
  double max_abs() const noexcept;

 private:
  void check_finite() const;

  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

ComplexMatrix mat_mul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix adjoint(const ComplexMatrix& a);
cplx trace(const ComplexMatrix& a);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// max_ij |a_ij - b_ij|; shapes must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
double frobenius_norm(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double tol);
/// Max-entry residual of |A^dagger A - I|.
double unitarity_residual(const ComplexMatrix& a);

/// Eigenvalues (ascending) of a Hermitian matrix. Only the lower triangle is read.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a);

/// Traces out every factor not listed in `keep` from an operator on
/// dims[0] x dims[1] x ... (row-major Kronecker ordering, first factor most
/// significant). Kept factors stay in their original order.
ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

}  // namespace qchan
