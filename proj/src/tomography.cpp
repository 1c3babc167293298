#include "qchan/tomography.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qchan/error.hpp"
#include "qchan/experiments.hpp"
#include "qchan/interferometer.hpp"
#include "qchan/optics.hpp"

namespace qchan {

namespace {

const std::array<ComplexMatrix, 4>& paulis() {
  using namespace std::complex_literals;
  static const std::array<ComplexMatrix, 4> p{
      ComplexMatrix{{1.0, 0.0}, {0.0, 1.0}},
      ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}},
      ComplexMatrix{{0.0, -1.0i}, {1.0i, 0.0}},
      ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}},
  };
  return p;
}

ComplexMatrix probe(const Channel& channel, std::array<cplx, 2> ket) {
  try {
    auto out = channel(DensityMatrix::pure(ket));
    if (out.dim() != 2) fail(ErrorKind::invalid_channel, "channel output is not a qubit state");
    return out.matrix();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_channel) throw;
    fail(ErrorKind::invalid_channel, std::string("channel output rejected: ") + e.what());
  }
}

}  // namespace

DensityMatrix ProcessMatrix::apply(const DensityMatrix& rho) const {
  if (rho.dim() != 2) fail(ErrorKind::invalid_argument, "process matrix acts on qubit states");
  const auto& p = paulis();
  ComplexMatrix out(2, 2);
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n)
      if (chi(m, n) != cplx{}) out += chi(m, n) * (p[m] * rho.matrix() * p[n]);
  return DensityMatrix(std::move(out));
}

ProcessMatrix qpt(const Channel& channel) {
  using namespace std::complex_literals;
  const double s = 1.0 / std::numbers::sqrt2;
  const auto out_h = probe(channel, {1.0, 0.0});
  const auto out_v = probe(channel, {0.0, 1.0});
  const auto out_d = probe(channel, {s, s});
  const auto out_r = probe(channel, {s, 1.0i * s});

  // Images of the matrix units |i><j|, by linearity from the four probes.
  const auto diag_sum = out_h + out_v;
  const std::array<std::array<ComplexMatrix, 2>, 2> unit_images{{
      {out_h, out_d + 1.0i * out_r - (0.5 + 0.5i) * diag_sum},
      {out_d - 1.0i * out_r - (0.5 - 0.5i) * diag_sum, out_v},
  }};

  // Choi matrix J = sum_ij |i><j| (x) E(|i><j|).
  ComplexMatrix choi(4, 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t l = 0; l < 2; ++l) choi(i * 2 + k, j * 2 + l) = unit_images[i][j](k, l);

  // chi_mn = <<P_m| J |P_n>> / 4 with |P>> = sum_i |i> (x) P|i>.
  const auto& p = paulis();
  std::array<std::array<cplx, 4>, 4> vec{};
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t k = 0; k < 2; ++k) vec[m][i * 2 + k] = p[m](k, i);

  ProcessMatrix result;
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n) {
      cplx acc{};
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) acc += std::conj(vec[m][r]) * choi(r, c) * vec[n][c];
      result.chi(m, n) = acc * 0.25;
    }
  return result;
}

double chi_distance(const ProcessMatrix& a, const ProcessMatrix& b) {
  return frobenius_norm(a.chi - b.chi);
}

BlindnessReport blindness_demo(double beta) {
  if (!std::isfinite(beta)) fail(ErrorKind::invalid_argument, "beta must be finite");
  const auto spec_a = config_fig4(Fig4Variant::a, beta);
  const auto spec_c = config_fig4(Fig4Variant::c, beta);

  const auto arm_qpt = [](const ArmSpec& arm) {
    return qpt([&arm](const DensityMatrix& rho) { return arm_channel_apply(arm, rho); });
  };

  BlindnessReport r;
  r.chi_distance_upper = chi_distance(arm_qpt(spec_a.upper), arm_qpt(spec_c.upper));
  r.chi_distance_lower = chi_distance(arm_qpt(spec_a.lower), arm_qpt(spec_c.lower));
  r.visibility_a = contrast_shared_env(spec_a).visibility;
  r.visibility_b = contrast_shared_env(spec_c).visibility;
  r.visibility_gap = std::abs(r.visibility_a - r.visibility_b);
  return r;
}

}  // namespace qchan
