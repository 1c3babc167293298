#pragma once

#include <span>
#include <variant>
#include <vector>

#include "qchan/matrix.hpp"
#include "qchan/quantum.hpp"

namespace qchan {

/// Delays are micrometers of o/e wavepacket separation.
inline constexpr double kDelayMergeTol = 1e-9;
inline constexpr double kZeroOperatorTol = 1e-14;
inline constexpr double kWavelengthUm = 0.78;

/// Birefringent crystal: fast (o) axis at axis_angle from horizontal, e-ray
/// delayed by `delay` relative to the o-ray.
struct CrystalSpec {
  double axis_angle = 0.0;
  double delay = 0.0;
};

struct Waveplate {
  double axis_angle = 0.0;
};

struct RawUnitary {
  ComplexMatrix u = ComplexMatrix::identity(2);
};

using ArmElement = std::variant<CrystalSpec, Waveplate, RawUnitary>;

/// Elements in the order the light traverses them. Empty means identity.
struct ArmSpec {
  std::vector<ArmElement> elements;
};

struct DelayedKraus {
  ComplexMatrix op;
  double delay = 0.0;
};

/// {(|o><o|, 0), (|e><e|, delay)}
std::vector<DelayedKraus> crystal_kraus(const CrystalSpec& c);

/// Delay-tagged Kraus operators of the whole arm, sorted by delay. Branches
/// with equal total delay (within kDelayMergeTol) are summed coherently and
/// vanishing operators are dropped.
std::vector<DelayedKraus> compose_arm(const ArmSpec& arm);

std::vector<ComplexMatrix> kraus_operators(std::span<const DelayedKraus> ks);

struct ArmDilation {
  ComplexMatrix unitary;      // on pol (x) bins, index = pol * bins.size() + bin
  std::vector<double> bins;   // bins[0] == 0 is the initial environment state
};

/// Unitary on pol (x) time-bins whose <bin_k|U|bin_0> block is the Kraus
/// operator with delay bins[k].
ArmDilation arm_dilation(const ArmSpec& arm);

/// Same as arm_dilation but on a caller-supplied bin set, which must contain
/// 0 at index 0 and every delay the arm produces. Bins the arm never reaches
/// are left as identity wherever the unitary completion allows.
ComplexMatrix arm_dilation_on_bins(const ArmSpec& arm, std::span<const double> bins);

/// Polarization channel with time traced out: sum K rho K^dagger.
DensityMatrix arm_channel_apply(const ArmSpec& arm, const DensityMatrix& rho);

/// Sorted distinct delays, always including 0. Merges within kDelayMergeTol.
std::vector<double> merge_bins(std::span<const double> delays);

/// Completes a partially specified unitary. Columns listed in `fixed` are
/// taken from `partial` and must be orthonormal; every other column j is
/// filled by Gram-Schmidt starting from the basis vector e_j, so it stays e_j
/// whenever e_j is already orthogonal to the fixed columns.
ComplexMatrix complete_unitary(const ComplexMatrix& partial, std::span<const std::size_t> fixed);

}  // namespace qchan
