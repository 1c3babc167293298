#pragma once

#include <functional>

#include "qchan/matrix.hpp"
#include "qchan/quantum.hpp"

namespace qchan {

using Channel = std::function<DensityMatrix(const DensityMatrix&)>;

/// Process matrix in the Pauli basis {I, X, Y, Z}:
///   E(rho) = sum_mn chi_mn P_m rho P_n,
/// normalized so a trace-preserving channel has Tr chi = 1 (identity reads
/// diag(1, 0, 0, 0)).
struct ProcessMatrix {
  ComplexMatrix chi = ComplexMatrix::zero(4, 4);

  DensityMatrix apply(const DensityMatrix& rho) const;
};

/// Linear-inversion process tomography from the probe states H, V, D, R.
/// Throws invalid_channel if any probe output is not a valid state.
ProcessMatrix qpt(const Channel& channel);

/// Frobenius norm of the chi difference.
double chi_distance(const ProcessMatrix& a, const ProcessMatrix& b);

struct BlindnessReport {
  double chi_distance_upper = 0.0;
  double chi_distance_lower = 0.0;
  double visibility_a = 0.0;
  double visibility_b = 0.0;
  double visibility_gap = 0.0;
};

/// Compares crystal configurations a and c (same per-arm angle sequences,
/// crystal lengths swapped) at the same beta: per-arm process matrices and
/// shared-environment visibilities.
BlindnessReport blindness_demo(double beta);

}  // namespace qchan
