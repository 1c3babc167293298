#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qchan/interferometer.hpp"
#include "qchan/optics.hpp"

namespace qchan {

/// Crystal lengths of the two crystal types, as o/e separation in micrometers.
inline constexpr double kShortCrystalDelay = 150.0;  // ~190 wavelengths
inline constexpr double kLongCrystalDelay = 310.0;   // ~398 wavelengths

enum class Fig4Variant { a, b, c, d };

std::optional<Fig4Variant> parse_variant(std::string_view tag);
char variant_tag(Fig4Variant v);

/// Upper arm: crystal b then crystal a. Lower arm: crystal b' then crystal a'.
///   a: l_a = l_b' = short, l_b = l_a' = long, b = a' = 0, a = b' = beta
///   b: lengths as a, a = a' = 0, b = b' = beta
///   c: l_b = l_b' = short, l_a = l_a' = long, b = a' = 0, a = b' = beta
///   d: half-wave plates only, upper at pi/8, lower at beta
/// Input is the maximally mixed state.
InterferometerSpec config_fig4(Fig4Variant variant, double beta);

/// Closed-form fringe contrast, keeping the sign (variant c goes
/// negative past beta = pi/4). Variant d uses cos(2(beta - pi/8)), which is
/// what the standard Jones half-wave plate gives.
double closed_form_contrast(Fig4Variant variant, double beta);
/// |closed_form_contrast|
double predicted_visibility(Fig4Variant variant, double beta);

/// n evenly spaced points over [0, pi/2] inclusive.
std::vector<double> beta_grid(std::size_t n = 25);

struct SweepRow {
  double beta = 0.0;
  double closed_form_signed = 0.0;
  double v_closed_form = 0.0;
  double v_simulated = 0.0;
  double v_oracle = 0.0;
  double fringe_phase = 0.0;
};

std::vector<SweepRow> sweep(Fig4Variant variant, std::span<const double> betas);

struct CountRecord {
  double phi = 0.0;
  std::uint64_t counts = 0;
  double expected = 0.0;
};

/// Poisson counts with mean mean_total * P|0>(phi); the stream for point k is
/// Rng::stream(seed, k).
std::vector<CountRecord> poisson_fringe(const InterferometerSpec& spec,
                                        std::span<const double> phis,
                                        std::uint64_t mean_total, std::uint64_t seed);

/// n equally spaced phases over [0, 2 pi).
std::vector<double> phase_grid(std::size_t n);

struct FitResult {
  double amplitude = 0.0;
  double visibility_hat = 0.0;
  double phase_hat = 0.0;
  double stderr_visibility = 0.0;
  int iterations = 0;
  bool converged = false;
};

inline constexpr int kFitMaxIterations = 100;
inline constexpr double kFitStepTol = 1e-10;

/// Poisson-weighted least squares of y = A (1 + v cos(phi + phi0)).
FitResult fit_fringe(std::span<const double> phis, std::span<const double> values);
FitResult fit_fringe(std::span<const CountRecord> records);

struct QkdSpec {
  std::vector<ArmElement> u1, u2, u3, u4;
  DensityMatrix input = maximally_mixed(2);
};

struct QkdResult {
  double visibility = 0.0;
  double qber = 0.0;
};

/// With an identity common channel the two unbalanced interferometers reduce
/// to a single one: u1, u2 form the upper arm and u3, u4 the lower.
InterferometerSpec qkd_interferometer(const QkdSpec& spec);
QkdResult qkd_visibility(const QkdSpec& spec);

/// Segments reproducing config_fig4(variant, beta) for a crystal variant.
QkdSpec qkd_from_fig4(Fig4Variant variant, double beta);

/// Random spec for oracle cross-checks: up to 3 elements per arm (crystals,
/// half-wave plates, SU(2) x phase unitaries), angles uniform on [0, pi),
/// delays from {0, 75, 150, 310}, random mixed input.
InterferometerSpec random_interferometer(std::uint64_t seed, std::uint64_t index);

}  // namespace qchan
