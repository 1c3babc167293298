#pragma once

#include <complex>
#include <span>
#include <vector>

#include "qchan/optics.hpp"
#include "qchan/quantum.hpp"

namespace qchan {

/// Mach-Zehnder interferometer with one arm channel per path acting on the
/// same time-bin environment.
struct InterferometerSpec {
  ArmSpec upper;
  ArmSpec lower;
  DensityMatrix input = maximally_mixed(2);
  double coherence_length = 150.0;  // micrometers, informational only
};

struct FringeResult {
  cplx contrast{0.0, 0.0};
  double visibility = 0.0;
  double fringe_phase = 0.0;

  static FringeResult from_contrast(cplx c);
};

/// C = sum over delay-matched Kraus pairs of Tr[u^dagger v rho].
FringeResult contrast_shared_env(const InterferometerSpec& spec);

/// C = Tr[u0^dagger v0 rho] with u0, v0 the zero-delay Kraus operators of each
/// arm (zero if an arm has none): each arm couples to its own environment.
FringeResult contrast_independent_env(const ArmSpec& upper, const ArmSpec& lower,
                                      const DensityMatrix& rho);

/// P|0>(phi) = (1 + Re[e^{i phi} C]) / 2.
double output_probability(const FringeResult& f, double phi);

inline constexpr std::size_t kMaxJointDim = 4096;

struct PortProbabilities {
  double port0;
  double port1;
};

/// Brute-force evolution on path (x) polarization (x) time-bins using each
/// arm's unitary dilation.
PortProbabilities oracle_ports(const InterferometerSpec& spec, double phi);
double oracle_probability(const InterferometerSpec& spec, double phi);

/// Contrast recovered from the oracle fringe sampled at `phases` equally
/// spaced points (at least 3): C = (2/N) sum (2P_k - 1) e^{-i phi_k}.
FringeResult oracle_contrast(const InterferometerSpec& spec, std::size_t phases = 4);

/// Polarization state in output port |0>, conditioned on detection there.
DensityMatrix output_polarization_state(const InterferometerSpec& spec, double phi);

}  // namespace qchan
