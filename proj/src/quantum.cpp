#include "qchan/quantum.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qchan/error.hpp"

namespace qchan {

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (!m_.square()) fail(ErrorKind::invalid_argument, "density matrix must be square");
  if (!is_hermitian(m_, kStateTol)) fail(ErrorKind::invalid_argument, "density matrix is not Hermitian");
  const cplx t = trace(m_);
  if (std::abs(t - 1.0) > kStateTol)
    fail(ErrorKind::invalid_argument, "density matrix trace is " + std::to_string(t.real()));
  const double min_eig = hermitian_eigenvalues(m_).front();
  if (min_eig < -kStateTol)
    fail(ErrorKind::invalid_argument, "density matrix has eigenvalue " + std::to_string(min_eig));
}

DensityMatrix DensityMatrix::pure(std::span<const cplx> ket) {
  double norm2 = 0.0;
  for (const auto& z : ket) norm2 += std::norm(z);
  if (ket.empty() || norm2 == 0.0) fail(ErrorKind::invalid_argument, "pure state from zero vector");
  return DensityMatrix(ComplexMatrix::outer(ket, ket) * (1.0 / norm2));
}

DensityMatrix partial_trace(const DensityMatrix& state, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  return DensityMatrix(partial_trace(state.matrix(), dims, keep));
}

DensityMatrix maximally_mixed(std::size_t d) {
  if (d == 0) fail(ErrorKind::invalid_argument, "maximally_mixed needs d >= 1");
  return DensityMatrix(ComplexMatrix::identity(d) * (1.0 / static_cast<double>(d)));
}

CptpCheck validate_cptp(const KrausSet& k) {
  if (k.operators.empty()) fail(ErrorKind::invalid_argument, "empty Kraus set");
  const std::size_t d = k.operators.front().rows();
  ComplexMatrix sum(d, d);
  for (const auto& op : k.operators) {
    if (!op.square() || op.rows() != d)
      fail(ErrorKind::invalid_argument, "Kraus operators must be square and of equal dimension");
    sum += adjoint(op) * op;
  }
  const double residual = max_abs_diff(sum, ComplexMatrix::identity(d));
  return {residual <= 1e-10, residual};
}

ComplexMatrix apply_kraus(std::span<const ComplexMatrix> ops, const ComplexMatrix& rho) {
  ComplexMatrix out(rho.rows(), rho.cols());
  for (const auto& k : ops) out += k * rho * adjoint(k);
  return out;
}

ComplexMatrix beamsplitter() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {{s, s}, {-s, s}};
}

ComplexMatrix phase_shifter(double phi) {
  if (!std::isfinite(phi)) fail(ErrorKind::invalid_argument, "phase must be finite");
  return {{1.0, 0.0}, {0.0, std::polar(1.0, phi)}};
}

RotatedBasis rotated_basis(double theta) {
  if (!std::isfinite(theta)) fail(ErrorKind::invalid_argument, "angle must be finite");
  const double c = std::cos(theta), s = std::sin(theta);
  return {{c, s}, {-s, c}};
}

ComplexMatrix half_waveplate(double theta) {
  if (!std::isfinite(theta)) fail(ErrorKind::invalid_argument, "angle must be finite");
  const double c = std::cos(2.0 * theta), s = std::sin(2.0 * theta);
  return {{c, s}, {s, -c}};
}

}  // namespace qchan
