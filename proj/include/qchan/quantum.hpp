#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "qchan/matrix.hpp"

namespace qchan {

inline constexpr double kStateTol = 1e-10;

/// Trace-one, Hermitian, positive semidefinite operator. Construction
/// validates all three within kStateTol and throws invalid_argument otherwise.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix m);

  /// Normalized projector onto a (not necessarily normalized) pure state.
  static DensityMatrix pure(std::span<const cplx> ket);

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }

 private:
  ComplexMatrix m_;
};

DensityMatrix partial_trace(const DensityMatrix& state, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

DensityMatrix maximally_mixed(std::size_t d);

/// Kraus representation {K_i}; completeness is checked by validate_cptp, not on construction.
struct KrausSet {
  std::vector<ComplexMatrix> operators;
};

struct CptpCheck {
  bool pass;
  double residual;
};

/// Completeness residual max|sum K^dagger K - I|; passes at <= 1e-10.
CptpCheck validate_cptp(const KrausSet& k);

/// rho -> sum K rho K^dagger
ComplexMatrix apply_kraus(std::span<const ComplexMatrix> ops, const ComplexMatrix& rho);

// Optical elements. Basis order is (H, V) for polarization and (|0>, |1>)
// for the interferometer path.

/// (1/sqrt2) [[1, 1], [-1, 1]]
ComplexMatrix beamsplitter();
/// diag(1, e^{i phi})
ComplexMatrix phase_shifter(double phi);

struct RotatedBasis {
  std::array<cplx, 2> ordinary;       // (cos t, sin t)
  std::array<cplx, 2> extraordinary;  // (-sin t, cos t)
};
RotatedBasis rotated_basis(double theta);

/// Jones matrix of a half-wave plate with fast axis at theta, global -i dropped:
/// [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
ComplexMatrix half_waveplate(double theta);

}  // namespace qchan
