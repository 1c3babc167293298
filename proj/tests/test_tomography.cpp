#include <doctest.h>

#include "qchan/error.hpp"
#include "qchan/optics.hpp"
#include "qchan/tomography.hpp"
#include "test_support.hpp"

using namespace qchan;
using namespace qchan::test;

namespace {

Channel arm_channel(ArmSpec arm) {
  return [arm = std::move(arm)](const DensityMatrix& rho) { return arm_channel_apply(arm, rho); };
}

ComplexMatrix diag4(double a, double b, double c, double d) {
  const cplx e[] = {a, b, c, d};
  return ComplexMatrix::diag(e);
}

}  // namespace

TEST_CASE("qpt of known channels") {
  const auto identity = qpt([](const DensityMatrix& rho) { return rho; });
  check_close(identity.chi, diag4(1, 0, 0, 0), 1e-14);

  const auto dephasing = qpt(arm_channel({{CrystalSpec{0.0, 310.0}}}));
  check_close(dephasing.chi, diag4(0.5, 0, 0, 0.5), 1e-14);

  const auto z = qpt(arm_channel({{Waveplate{0.0}}}));
  check_close(z.chi, diag4(0, 0, 0, 1), 1e-14);
}

TEST_CASE("qpt rejects channels with invalid output") {
  const Channel broken = [](const DensityMatrix&) { return DensityMatrix(ComplexMatrix::identity(2)); };
  try {
    qpt(broken);
    FAIL("expected invalid channel");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_channel);
  }
}

TEST_CASE("chi_distance") {
  const auto id = qpt([](const DensityMatrix& rho) { return rho; });
  const auto deph = qpt(arm_channel({{CrystalSpec{0.0, 150.0}}}));
  CHECK(chi_distance(id, id) == 0.0);
  CHECK(chi_distance(id, deph) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(chi_distance(id, deph) == chi_distance(deph, id));
}

TEST_CASE("process matrix reproduces the channel") {
  std::mt19937_64 g(21);
  for (int c = 0; c < 10; ++c) {
    const auto arm = random_arm(g, 4);
    const auto chan = arm_channel(arm);
    const auto pm = qpt(chan);
    CHECK(is_hermitian(pm.chi, 1e-10));
    CHECK(std::abs(trace(pm.chi) - 1.0) < 1e-10);
    CHECK(hermitian_eigenvalues(pm.chi).front() > -1e-10);
    for (int s = 0; s < 20; ++s) {
      const auto rho = random_state(g, 2);
      check_close(pm.apply(rho).matrix(), chan(rho).matrix(), 1e-9);
    }
  }
}

TEST_CASE("crystal arms reconstruct as unital processes") {
  std::mt19937_64 g(22);
  for (int c = 0; c < 20; ++c) {
    const auto pm = qpt(arm_channel(random_arm(g, 4, false)));
    check_close(pm.apply(maximally_mixed(2)).matrix(), maximally_mixed(2).matrix(), 1e-10);
  }
}

TEST_CASE("blindness_demo") {
  auto r = blindness_demo(kPi / 4.0);
  CHECK(r.chi_distance_upper < 1e-9);
  CHECK(r.chi_distance_lower < 1e-9);
  CHECK(std::abs(r.visibility_a - 0.5) < 1e-9);
  CHECK(std::abs(r.visibility_b) < 1e-9);
  CHECK(std::abs(r.visibility_gap - 0.5) < 1e-9);

  r = blindness_demo(0.0);
  CHECK(r.chi_distance_upper < 1e-9);
  CHECK(std::abs(r.visibility_a - 1.0) < 1e-12);
  CHECK(std::abs(r.visibility_b - 1.0) < 1e-12);
  CHECK(r.visibility_gap < 1e-12);

  // 1 - sin^2(pi/4)/2 = 0.75 and cos^2(pi/8) cos(pi/4) = (2 + sqrt2)/4 / sqrt2
  r = blindness_demo(kPi / 8.0);
  CHECK(std::abs(r.visibility_a - 0.75) < 1e-12);
  CHECK(std::abs(r.visibility_b - 0.6035533905932737) < 1e-12);
  CHECK(std::abs(r.visibility_gap - 0.1464466094067263) < 1e-12);
}

TEST_CASE("blindness over a beta grid") {
  for (int i = 0; i < 25; ++i) {
    const double beta = (kPi / 2.0) * i / 24.0;
    const auto r = blindness_demo(beta);
    CHECK(r.chi_distance_upper < 1e-9);
    CHECK(r.chi_distance_lower < 1e-9);
    const double s2 = std::sin(2 * beta), c = std::cos(beta);
    const double expected_gap = std::abs((1 - s2 * s2 / 2) - std::abs(c * c * std::cos(2 * beta)));
    CHECK(std::abs(r.visibility_gap - expected_gap) < 1e-9);
    CHECK(r.visibility_gap == doctest::Approx(std::abs(r.visibility_a - r.visibility_b)));
  }
}
