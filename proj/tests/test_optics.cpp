#include <doctest.h>

#include <algorithm>

#include "qchan/error.hpp"
#include "test_support.hpp"

using namespace qchan;
using namespace qchan::test;

namespace {

ComplexMatrix projector(std::array<cplx, 2> v) { return ComplexMatrix::outer(v, v); }

const DelayedKraus* at_delay(const std::vector<DelayedKraus>& ks, double d) {
  const auto it = std::find_if(ks.begin(), ks.end(), [&](const auto& k) { return std::abs(k.delay - d) < 1e-9; });
  return it == ks.end() ? nullptr : &*it;
}

// Independent two-crystal expansion {<a_i|b_j> |a_i><b_j|}: light meets the
// crystal at angle b first, then the one at angle a.
std::vector<DelayedKraus> two_crystal_reference(double b, double lb, double a, double la) {
  const auto ba = rotated_basis(b), aa = rotated_basis(a);
  const std::array<std::array<cplx, 2>, 2> bs{ba.ordinary, ba.extraordinary};
  const std::array<std::array<cplx, 2>, 2> as{aa.ordinary, aa.extraordinary};
  std::vector<DelayedKraus> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const cplx overlap = std::conj(as[i][0]) * bs[j][0] + std::conj(as[i][1]) * bs[j][1];
      out.push_back({ComplexMatrix::outer(as[i], bs[j]) * overlap, i * la + j * lb});
    }
  return out;
}

ComplexMatrix jones(const ArmElement& e) {
  if (const auto* c = std::get_if<CrystalSpec>(&e)) {
    const auto ks = crystal_kraus(*c);
    return ks[0].op + ks[1].op;
  }
  if (const auto* w = std::get_if<Waveplate>(&e)) return half_waveplate(w->axis_angle);
  return std::get<RawUnitary>(e).u;
}

}  // namespace

TEST_CASE("crystal_kraus") {
  auto ks = crystal_kraus({0.0, 310.0});
  REQUIRE(ks.size() == 2);
  check_close(ks[0].op, projector({1.0, 0.0}), 0.0);
  CHECK(ks[0].delay == 0.0);
  check_close(ks[1].op, projector({0.0, 1.0}), 0.0);
  CHECK(ks[1].delay == 310.0);

  ks = crystal_kraus({kPi / 4.0, 75.0});
  check_close(ks[0].op, ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}, 1e-15);
  check_close(ks[1].op, ComplexMatrix{{0.5, -0.5}, {-0.5, 0.5}}, 1e-15);
  CHECK(validate_cptp({kraus_operators(ks)}).pass);

  CHECK_THROWS_AS(crystal_kraus({0.0, -1.0}), Error);
}

TEST_CASE("compose_arm") {
  SUBCASE("empty arm is the identity") {
    const auto ks = compose_arm({});
    REQUIRE(ks.size() == 1);
    check_close(ks[0].op, ComplexMatrix::identity(2), 0.0);
    CHECK(ks[0].delay == 0.0);
  }

  SUBCASE("two crossed-length crystals match the four-pulse expansion") {
    const double beta = 0.37;
    const ArmSpec arm{{CrystalSpec{0.0, 310.0}, CrystalSpec{beta, 150.0}}};
    const auto ks = compose_arm(arm);
    const auto ref = two_crystal_reference(0.0, 310.0, beta, 150.0);
    REQUIRE(ks.size() == 4);
    std::vector<double> delays;
    for (const auto& k : ks) delays.push_back(k.delay);
    CHECK(delays == std::vector<double>{0.0, 150.0, 310.0, 460.0});
    for (const auto& r : ref) {
      const auto* k = at_delay(ks, r.delay);
      REQUIRE(k != nullptr);
      check_close(k->op, r.op, 1e-15);
    }
  }

  SUBCASE("aligned crystals drop the orthogonal cross terms") {
    const ArmSpec arm{{CrystalSpec{0.0, 150.0}, CrystalSpec{0.0, 310.0}}};
    const auto ks = compose_arm(arm);
    REQUIRE(ks.size() == 2);
    check_close(ks[0].op, projector({1.0, 0.0}), 0.0);
    CHECK(ks[0].delay == 0.0);
    check_close(ks[1].op, projector({0.0, 1.0}), 0.0);
    CHECK(ks[1].delay == 460.0);
  }

  SUBCASE("equal total delays add coherently") {
    // 150 + 0 and 0 + 150 land in the same bin.
    const ArmSpec arm{{CrystalSpec{0.0, 150.0}, CrystalSpec{kPi / 4.0, 150.0}}};
    const auto ks = compose_arm(arm);
    REQUIRE(ks.size() == 3);
    const auto ref = two_crystal_reference(0.0, 150.0, kPi / 4.0, 150.0);
    const auto* mid = at_delay(ks, 150.0);
    REQUIRE(mid != nullptr);
    check_close(mid->op, ref[1].op + ref[2].op, 1e-15);
  }

  SUBCASE("non-unitary raw element is rejected") {
    const ArmSpec arm{{RawUnitary{ComplexMatrix::identity(2) * 0.5}}};
    CHECK_THROWS_AS(compose_arm(arm), Error);
  }
}

TEST_CASE("compose_arm properties on random arms") {
  std::mt19937_64 g(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto arm = random_arm(g, 4);
    const auto ks = compose_arm(arm);
    const auto check = validate_cptp({kraus_operators(ks)});
    CHECK(check.pass);
    CHECK(check.residual <= 1e-10);

    const auto crystals = std::count_if(arm.elements.begin(), arm.elements.end(),
                                        [](const auto& e) { return std::holds_alternative<CrystalSpec>(e); });
    CHECK(ks.size() <= (std::size_t{1} << crystals));
    for (std::size_t i = 1; i < ks.size(); ++i) CHECK(ks[i].delay - ks[i - 1].delay > 1e-9);

    // Zero delays collapse the arm onto the plain Jones product.
    ArmSpec flat = arm;
    ComplexMatrix product = ComplexMatrix::identity(2);
    for (auto& e : flat.elements) {
      if (auto* c = std::get_if<CrystalSpec>(&e)) c->delay = 0.0;
      product = jones(e) * product;
    }
    const auto fk = compose_arm(flat);
    REQUIRE(fk.size() == 1);
    check_close(fk[0].op, product, 1e-12);
  }
}

TEST_CASE("arm_dilation") {
  SUBCASE("empty arm") {
    const auto d = arm_dilation({});
    CHECK(d.bins == std::vector<double>{0.0});
    check_close(d.unitary, ComplexMatrix::identity(2), 0.0);
  }

  SUBCASE("single crystal") {
    const auto d = arm_dilation({{CrystalSpec{0.0, 310.0}}});
    REQUIRE(d.bins == std::vector<double>{0.0, 310.0});
    CHECK(unitarity_residual(d.unitary) < 1e-12);
    // <bin_k|U|bin_0> blocks; index = pol * 2 + bin
    const auto block = [&](std::size_t k) {
      ComplexMatrix b(2, 2);
      for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t i = 0; i < 2; ++i) b(o, i) = d.unitary(o * 2 + k, i * 2);
      return b;
    };
    check_close(block(0), projector({1.0, 0.0}), 0.0);
    check_close(block(1), projector({0.0, 1.0}), 0.0);
  }

  SUBCASE("random arms reproduce compose_arm") {
    std::mt19937_64 g(99);
    for (int trial = 0; trial < 50; ++trial) {
      const auto arm = random_arm(g, 3);
      const auto ks = compose_arm(arm);
      const auto d = arm_dilation(arm);
      const std::size_t nb = d.bins.size();
      CHECK(unitarity_residual(d.unitary) < 1e-12);
      for (std::size_t k = 0; k < nb; ++k) {
        ComplexMatrix block(2, 2);
        for (std::size_t o = 0; o < 2; ++o)
          for (std::size_t i = 0; i < 2; ++i) block(o, i) = d.unitary(o * nb + k, i * nb);
        const auto* expected = at_delay(ks, d.bins[k]);
        check_close(block, expected ? expected->op : ComplexMatrix::zero(2, 2), 1e-12);
      }
    }
  }

  SUBCASE("unused bins stay untouched") {
    const double bins[] = {0.0, 75.0, 150.0};
    const auto u = arm_dilation_on_bins({{CrystalSpec{0.0, 150.0}}}, bins);
    CHECK(unitarity_residual(u) < 1e-12);
    // bin 75 is never populated: identity on both polarizations there
    CHECK(u(1, 1) == cplx{1.0});
    CHECK(u(4, 4) == cplx{1.0});
  }

  SUBCASE("missing delay in the bin set") {
    const double bins[] = {0.0, 75.0};
    CHECK_THROWS_AS(arm_dilation_on_bins({{CrystalSpec{0.0, 150.0}}}, bins), Error);
  }
}

TEST_CASE("arm_channel_apply") {
  const auto mixed = maximally_mixed(2);
  const ArmSpec crystal_arm{{CrystalSpec{0.3, 310.0}, CrystalSpec{1.1, 150.0}}};
  check_close(arm_channel_apply(crystal_arm, mixed).matrix(), mixed.matrix(), 1e-12);

  const cplx d[] = {1.0, 1.0};
  const auto diag = DensityMatrix::pure(d);
  check_close(arm_channel_apply({{CrystalSpec{0.0, 310.0}}}, diag).matrix(), mixed.matrix(), 1e-15);
  check_close(arm_channel_apply({}, diag).matrix(), diag.matrix(), 0.0);
}

TEST_CASE("crystal and waveplate arms are unital") {
  std::mt19937_64 g(17);
  const auto mixed = maximally_mixed(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto arm = random_arm(g, 4, false);
    check_close(arm_channel_apply(arm, mixed).matrix(), mixed.matrix(), 1e-12);
  }
}
