#include <doctest.h>

#include "qchan/error.hpp"
#include "test_support.hpp"

using namespace qchan;
using namespace qchan::test;

TEST_CASE("mat_mul") {
  const auto i2 = ComplexMatrix::identity(2);
  check_close(mat_mul(i2, i2), i2, 0.0);

  // (1/2) [[1,1],[-1,1]]^2 = (1/2) [[0,2],[-2,0]]
  check_close(mat_mul(beamsplitter(), beamsplitter()), ComplexMatrix{{0.0, 1.0}, {-1.0, 0.0}}, 1e-15);

  std::mt19937_64 g(1);
  const auto a = random_matrix(g, 3);
  check_close(mat_mul(a, ComplexMatrix::zero(3, 3)), ComplexMatrix::zero(3, 3), 0.0);

  try {
    mat_mul(ComplexMatrix(2, 3), ComplexMatrix(2, 3));
    FAIL("expected dimension mismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_argument);
  }
}

TEST_CASE("matrices reject non-finite entries and empty shapes") {
  CHECK_THROWS_AS(ComplexMatrix(0, 2), Error);
  CHECK_THROWS_AS((ComplexMatrix{{std::nan(""), 0.0}}), Error);
  CHECK_THROWS_AS(ComplexMatrix(1, 2, {1.0}), Error);
}

TEST_CASE("adjoint, trace, kron") {
  check_close(adjoint(phase_shifter(0.7)), phase_shifter(-0.7), 1e-15);
  CHECK(trace(ComplexMatrix::identity(2)) == cplx{2.0, 0.0});
  check_close(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(2)), ComplexMatrix::identity(4), 0.0);
  CHECK_THROWS_AS(trace(ComplexMatrix(2, 3)), Error);

  // block convention: kron(A, B)(i*rb + k, j*cb + l) = A(i,j) B(k,l)
  const ComplexMatrix a{{1.0, 2.0}, {3.0, 4.0}};
  const ComplexMatrix b{{0.0, 1.0}, {1.0, 0.0}};
  const auto k = kron(a, b);
  CHECK(k(0, 1) == cplx{1.0});
  CHECK(k(1, 2) == cplx{2.0});
  CHECK(k(3, 2) == cplx{4.0});
  CHECK(k(2, 2) == cplx{0.0});
}

TEST_CASE("kron trace factorizes") {
  std::mt19937_64 g(7);
  for (int i = 0; i < 50; ++i) {
    const auto a = random_matrix(g, 2), b = random_matrix(g, 2);
    CHECK(std::abs(trace(kron(a, b)) - trace(a) * trace(b)) < 1e-12);
  }
}

TEST_CASE("partial_trace") {
  std::mt19937_64 g(3);
  const auto rho = random_state(g, 2);
  const auto sigma = random_state(g, 2);
  const std::size_t dims2[] = {2, 2};

  SUBCASE("product state keeps the chosen factor") {
    const DensityMatrix joint(kron(rho.matrix(), sigma.matrix()));
    const std::size_t first[] = {0}, second[] = {1};
    check_close(partial_trace(joint, dims2, first).matrix(), rho.matrix(), 1e-14);
    check_close(partial_trace(joint, dims2, second).matrix(), sigma.matrix(), 1e-14);
  }

  SUBCASE("maximally entangled state reduces to I/2") {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx bell[] = {s, 0.0, 0.0, s};
    const auto state = DensityMatrix::pure(bell);
    for (std::size_t k = 0; k < 2; ++k) {
      const std::size_t keep[] = {k};
      check_close(partial_trace(state, dims2, keep).matrix(), maximally_mixed(2).matrix(), 1e-15);
    }
  }

  SUBCASE("middle factor of three") {
    const auto tau = random_state(g, 2);
    const DensityMatrix joint(kron(kron(rho.matrix(), sigma.matrix()), tau.matrix()));
    const std::size_t dims3[] = {2, 2, 2};
    const std::size_t middle[] = {1};
    check_close(partial_trace(joint, dims3, middle).matrix(), sigma.matrix(), 1e-14);
    const std::size_t outer[] = {0, 2};
    check_close(partial_trace(joint, dims3, outer).matrix(), kron(rho.matrix(), tau.matrix()), 1e-14);
  }

  SUBCASE("unequal factor sizes") {
    const auto big = random_state(g, 3);
    const DensityMatrix joint(kron(rho.matrix(), big.matrix()));
    const std::size_t dims[] = {2, 3};
    const std::size_t keep[] = {1};
    check_close(partial_trace(joint, dims, keep).matrix(), big.matrix(), 1e-14);
  }

  SUBCASE("dimension mismatch") {
    const DensityMatrix joint(kron(rho.matrix(), sigma.matrix()));
    const std::size_t bad[] = {2, 3};
    const std::size_t keep[] = {0};
    CHECK_THROWS_AS(partial_trace(joint, bad, keep), Error);
  }
}

TEST_CASE("partial_trace preserves trace and Hermiticity") {
  std::mt19937_64 g(11);
  const std::size_t dims[] = {2, 2, 2};
  for (int i = 0; i < 30; ++i) {
    const auto state = random_state(g, 8);
    const std::size_t keep[] = {static_cast<std::size_t>(i % 3)};
    const auto reduced = partial_trace(state.matrix(), dims, keep);
    CHECK(std::abs(trace(reduced) - 1.0) < 1e-12);
    CHECK(is_hermitian(reduced, 1e-12));
  }
}

TEST_CASE("beamsplitter and phase shifter") {
  const auto ub = beamsplitter();
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(ub(0, 0) == cplx{s});
  CHECK(ub(1, 0) == cplx{-s});
  CHECK(unitarity_residual(ub) <= 1e-15);

  check_close(phase_shifter(0.0), ComplexMatrix::identity(2), 0.0);
  check_close(phase_shifter(kPi), ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}, 1e-15);
  check_close(phase_shifter(0.4) * phase_shifter(1.1), phase_shifter(1.5), 1e-15);
}

TEST_CASE("rotated_basis") {
  auto b = rotated_basis(0.0);
  CHECK(b.ordinary[0] == cplx{1.0});
  CHECK(b.ordinary[1] == cplx{0.0});
  CHECK(b.extraordinary[1] == cplx{1.0});

  b = rotated_basis(kPi / 2.0);
  CHECK(std::abs(b.ordinary[1] - 1.0) < 1e-15);        // |V>
  CHECK(std::abs(b.extraordinary[0] + 1.0) < 1e-15);   // -|H>

  std::mt19937_64 g(5);
  for (int i = 0; i < 100; ++i) {
    const auto r = rotated_basis(uniform(g, -10.0, 10.0));
    const cplx overlap = std::conj(r.ordinary[0]) * r.extraordinary[0] + std::conj(r.ordinary[1]) * r.extraordinary[1];
    CHECK(std::abs(overlap) < 1e-12);
    CHECK(std::abs(std::norm(r.ordinary[0]) + std::norm(r.ordinary[1]) - 1.0) < 1e-12);
    CHECK(std::abs(std::norm(r.extraordinary[0]) + std::norm(r.extraordinary[1]) - 1.0) < 1e-12);
  }
}

TEST_CASE("half_waveplate") {
  check_close(half_waveplate(0.0), ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}, 0.0);
  const double s = 1.0 / std::sqrt(2.0);
  check_close(half_waveplate(kPi / 8.0), ComplexMatrix{{s, s}, {s, -s}}, 1e-15);
  std::mt19937_64 g(9);
  for (int i = 0; i < 50; ++i) {
    const double t = uniform(g, 0.0, 2.0 * kPi);
    const auto h = half_waveplate(t);
    check_close(h * h, ComplexMatrix::identity(2), 1e-12);
    CHECK(unitarity_residual(h) <= 1e-12);
    CHECK(unitarity_residual(phase_shifter(t)) <= 1e-12);
  }
}

TEST_CASE("maximally_mixed") {
  const auto m = maximally_mixed(2);
  check_close(m.matrix(), ComplexMatrix{{0.5, 0.0}, {0.0, 0.5}}, 0.0);
  CHECK(std::abs(trace(maximally_mixed(5).matrix()) - 1.0) < 1e-15);
  for (double ev : hermitian_eigenvalues(maximally_mixed(4).matrix())) CHECK(ev == doctest::Approx(0.25));
  CHECK_THROWS_AS(maximally_mixed(0), Error);
}

TEST_CASE("DensityMatrix validation") {
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(2)), Error);                     // trace 2
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 0.5}, {0.0, 0.5}}), Error);           // not Hermitian
  CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.5, 0.0}, {0.0, -0.5}}), Error);          // negative eigenvalue
  CHECK_NOTHROW(DensityMatrix(ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}));
}

TEST_CASE("validate_cptp") {
  auto r = validate_cptp({{ComplexMatrix::identity(2)}});
  CHECK(r.pass);
  CHECK(r.residual == 0.0);

  const ComplexMatrix hh{{1.0, 0.0}, {0.0, 0.0}}, vv{{0.0, 0.0}, {0.0, 1.0}};
  CHECK(validate_cptp({{hh, vv}}).pass);

  r = validate_cptp({{ComplexMatrix::identity(2) * 0.9}});
  CHECK_FALSE(r.pass);
  CHECK(r.residual == doctest::Approx(0.19));

  CHECK_THROWS_AS(validate_cptp({{ComplexMatrix::identity(2), ComplexMatrix::identity(3)}}), Error);
}
