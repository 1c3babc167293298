#include "qchan/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "qchan/error.hpp"
#include "qchan/random.hpp"

namespace qchan {

namespace {

constexpr double kPi = std::numbers::pi;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) fail(ErrorKind::invalid_argument, std::string(what) + " must be finite");
}

ArmElement crystal(double angle, double delay) { return CrystalSpec{angle, delay}; }

}  // namespace

std::optional<Fig4Variant> parse_variant(std::string_view tag) {
  if (tag == "a") return Fig4Variant::a;
  if (tag == "b") return Fig4Variant::b;
  if (tag == "c") return Fig4Variant::c;
  if (tag == "d") return Fig4Variant::d;
  return std::nullopt;
}

char variant_tag(Fig4Variant v) {
  switch (v) {
    case Fig4Variant::a: return 'a';
    case Fig4Variant::b: return 'b';
    case Fig4Variant::c: return 'c';
    case Fig4Variant::d: return 'd';
  }
  return '?';
}

InterferometerSpec config_fig4(Fig4Variant variant, double beta) {
  require_finite(beta, "beta");
  constexpr double s = kShortCrystalDelay;
  constexpr double l = kLongCrystalDelay;
  InterferometerSpec spec;
  switch (variant) {
    case Fig4Variant::a:
      spec.upper.elements = {crystal(0.0, l), crystal(beta, s)};
      spec.lower.elements = {crystal(beta, s), crystal(0.0, l)};
      break;
    case Fig4Variant::b:
      spec.upper.elements = {crystal(beta, l), crystal(0.0, s)};
      spec.lower.elements = {crystal(beta, s), crystal(0.0, l)};
      break;
    case Fig4Variant::c:
      spec.upper.elements = {crystal(0.0, s), crystal(beta, l)};
      spec.lower.elements = {crystal(beta, s), crystal(0.0, l)};
      break;
    case Fig4Variant::d:
      spec.upper.elements = {Waveplate{kPi / 8.0}};
      spec.lower.elements = {Waveplate{beta}};
      break;
  }
  return spec;
}

double closed_form_contrast(Fig4Variant variant, double beta) {
  require_finite(beta, "beta");
  const double c = std::cos(beta);
  switch (variant) {
    case Fig4Variant::a: {
      const double s2 = std::sin(2.0 * beta);
      return 1.0 - s2 * s2 / 2.0;
    }
    case Fig4Variant::b: return c * c;
    case Fig4Variant::c: return c * c * std::cos(2.0 * beta);
    case Fig4Variant::d: return std::cos(2.0 * (beta - kPi / 8.0));
  }
  return 0.0;
}

double predicted_visibility(Fig4Variant variant, double beta) {
  return std::abs(closed_form_contrast(variant, beta));
}

std::vector<double> beta_grid(std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {0.0};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (kPi / 2.0) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::vector<double> phase_grid(std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
  return out;
}

std::vector<SweepRow> sweep(Fig4Variant variant, std::span<const double> betas) {
  std::vector<SweepRow> rows;
  rows.reserve(betas.size());
  for (double beta : betas) {
    const auto spec = config_fig4(variant, beta);
    const auto sim = contrast_shared_env(spec);
    SweepRow row;
    row.beta = beta;
    row.closed_form_signed = closed_form_contrast(variant, beta);
    row.v_closed_form = std::abs(row.closed_form_signed);
    row.v_simulated = sim.visibility;
    row.v_oracle = oracle_contrast(spec).visibility;
    row.fringe_phase = sim.fringe_phase;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CountRecord> poisson_fringe(const InterferometerSpec& spec,
                                        std::span<const double> phis,
                                        std::uint64_t mean_total, std::uint64_t seed) {
  if (mean_total < 1) fail(ErrorKind::invalid_argument, "mean_total must be >= 1");
  const auto fringe = contrast_shared_env(spec);
  std::vector<CountRecord> out;
  out.reserve(phis.size());
  for (std::size_t k = 0; k < phis.size(); ++k) {
    const double expected = static_cast<double>(mean_total) * output_probability(fringe, phis[k]);
    auto rng = Rng::stream(seed, k);
    out.push_back({phis[k], rng.poisson(expected), expected});
  }
  return out;
}

FitResult fit_fringe(std::span<const double> phis, std::span<const double> values) {
  if (phis.size() != values.size())
    fail(ErrorKind::invalid_argument, "phase and value counts differ");
  const std::size_t n = phis.size();
  if (n < 4) fail(ErrorKind::invalid_argument, "fringe fit needs at least 4 points");
  for (std::size_t i = 0; i < n; ++i) {
    require_finite(phis[i], "phase");
    require_finite(values[i], "count");
  }
  const auto [lo, hi] = std::minmax_element(phis.begin(), phis.end());
  if (*hi - *lo <= kPi) fail(ErrorKind::invalid_argument, "phases must span more than half a period");

  // y = A + a cos(phi) + b sin(phi), equivalent to A (1 + v cos(phi + phi0)).
  Eigen::MatrixX3d jac(static_cast<Eigen::Index>(n), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    jac(r, 0) = 1.0;
    jac(r, 1) = std::cos(phis[i]);
    jac(r, 2) = std::sin(phis[i]);
    y(r) = values[i];
  }
  if (y.sum() <= 0.0) fail(ErrorKind::invalid_argument, "fringe has no counts");

  // Unit-frequency Fourier component as the starting point.
  const double inv_n = 1.0 / static_cast<double>(n);
  Eigen::Vector3d theta(y.mean(), 2.0 * inv_n * jac.col(1).dot(y), 2.0 * inv_n * jac.col(2).dot(y));

  const auto weights = [&](const Eigen::Vector3d& t) {
    return (jac * t).cwiseMax(1.0).cwiseInverse().eval();
  };

  FitResult result;
  for (int it = 1; it <= kFitMaxIterations; ++it) {
    const Eigen::VectorXd w = weights(theta);
    const Eigen::Matrix3d normal = jac.transpose() * w.asDiagonal() * jac;
    const Eigen::Vector3d grad = jac.transpose() * w.asDiagonal() * (y - jac * theta);
    const Eigen::Vector3d step = normal.ldlt().solve(grad);
    theta += step;
    result.iterations = it;
    if (step.norm() / std::max(std::abs(theta(0)), 1.0) < kFitStepTol) {
      result.converged = true;
      break;
    }
  }

  const double amp = theta(0);
  const double r = std::hypot(theta(1), theta(2));
  result.amplitude = std::max(amp, 0.0);
  if (amp <= 0.0) {
    result.converged = false;
    return result;
  }
  result.visibility_hat = std::min(r / amp, 1.0);
  result.phase_hat = std::atan2(-theta(2), theta(1));

  const Eigen::VectorXd w = weights(theta);
  const Eigen::Matrix3d cov = (jac.transpose() * w.asDiagonal() * jac).inverse();
  if (r > 0.0) {
    const Eigen::Vector3d g(-r / (amp * amp), theta(1) / (r * amp), theta(2) / (r * amp));
    result.stderr_visibility = std::sqrt(std::max(g.dot(cov * g), 0.0));
  } else {
    result.stderr_visibility = std::sqrt(0.5 * (cov(1, 1) + cov(2, 2))) / amp;
  }
  return result;
}

FitResult fit_fringe(std::span<const CountRecord> records) {
  std::vector<double> phis, values;
  phis.reserve(records.size());
  values.reserve(records.size());
  for (const auto& rec : records) {
    phis.push_back(rec.phi);
    values.push_back(static_cast<double>(rec.counts));
  }
  return fit_fringe(phis, values);
}

InterferometerSpec qkd_interferometer(const QkdSpec& spec) {
  InterferometerSpec out;
  out.input = spec.input;
  out.upper.elements = spec.u1;
  out.upper.elements.insert(out.upper.elements.end(), spec.u2.begin(), spec.u2.end());
  out.lower.elements = spec.u3;
  out.lower.elements.insert(out.lower.elements.end(), spec.u4.begin(), spec.u4.end());
  return out;
}

QkdResult qkd_visibility(const QkdSpec& spec) {
  const double v = contrast_shared_env(qkd_interferometer(spec)).visibility;
  return {v, (1.0 - v) / 2.0};
}

QkdSpec qkd_from_fig4(Fig4Variant variant, double beta) {
  const auto spec = config_fig4(variant, beta);
  const auto split = [](const std::vector<ArmElement>& els, std::vector<ArmElement>& first,
                        std::vector<ArmElement>& second) {
    if (els.empty()) return;
    first.assign(els.begin(), els.begin() + 1);
    second.assign(els.begin() + 1, els.end());
  };
  QkdSpec q;
  q.input = spec.input;
  split(spec.upper.elements, q.u1, q.u2);
  split(spec.lower.elements, q.u3, q.u4);
  return q;
}

namespace {

ArmElement random_element(Rng& rng) {
  constexpr double delays[] = {0.0, 75.0, 150.0, 310.0};
  const auto kind = rng.next() % 4;
  if (kind < 2) {
    const double angle = rng.uniform(0.0, kPi);
    return CrystalSpec{angle, delays[rng.next() % 4]};
  }
  if (kind == 2) return Waveplate{rng.uniform(0.0, kPi)};
  const double t = rng.uniform(0.0, kPi / 2.0);
  const cplx a = std::polar(std::cos(t), rng.uniform(0.0, 2.0 * kPi));
  const cplx b = std::polar(std::sin(t), rng.uniform(0.0, 2.0 * kPi));
  const cplx g = std::polar(1.0, rng.uniform(0.0, 2.0 * kPi));
  return RawUnitary{ComplexMatrix{{g * a, -g * std::conj(b)}, {g * b, g * std::conj(a)}}};
}

ArmSpec random_arm(Rng& rng) {
  ArmSpec arm;
  const auto count = rng.next() % 4;
  for (std::uint64_t i = 0; i < count; ++i) arm.elements.push_back(random_element(rng));
  return arm;
}

}  // namespace

InterferometerSpec random_interferometer(std::uint64_t seed, std::uint64_t index) {
  auto rng = Rng::stream(seed, index);
  InterferometerSpec spec;
  spec.upper = random_arm(rng);
  spec.lower = random_arm(rng);
  ComplexMatrix g(2, 2);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) g(i, j) = cplx{rng.normal(), rng.normal()};
  auto rho = g * adjoint(g);
  rho *= 1.0 / trace(rho).real();
  spec.input = DensityMatrix((rho + adjoint(rho)) * 0.5);
  return spec;
}

}  // namespace qchan
