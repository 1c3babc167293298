#include "qchan/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qchan/error.hpp"

namespace qchan {

FringeResult FringeResult::from_contrast(cplx c) {
  return {c, std::abs(c), std::arg(c)};
}

FringeResult contrast_shared_env(const InterferometerSpec& spec) {
  const auto us = compose_arm(spec.upper);
  const auto vs = compose_arm(spec.lower);
  const auto& rho = spec.input.matrix();
  cplx c{};
  for (const auto& u : us)
    for (const auto& v : vs)
      if (std::abs(u.delay - v.delay) <= kDelayMergeTol) c += trace(adjoint(u.op) * v.op * rho);
  return FringeResult::from_contrast(c);
}

namespace {

ComplexMatrix zero_delay_operator(const ArmSpec& arm) {
  for (auto& k : compose_arm(arm))
    if (std::abs(k.delay) <= kDelayMergeTol) return std::move(k.op);
  return ComplexMatrix::zero(2, 2);
}

}  // namespace

FringeResult contrast_independent_env(const ArmSpec& upper, const ArmSpec& lower,
                                      const DensityMatrix& rho) {
  const auto u0 = zero_delay_operator(upper);
  const auto v0 = zero_delay_operator(lower);
  return FringeResult::from_contrast(trace(adjoint(u0) * v0 * rho.matrix()));
}

double output_probability(const FringeResult& f, double phi) {
  if (!std::isfinite(phi)) fail(ErrorKind::invalid_argument, "phase must be finite");
  double p = 0.5 * (1.0 + (std::polar(1.0, phi) * f.contrast).real());
  if (std::abs(p - 0.5) > 0.5 + 1e-9)
    fail(ErrorKind::internal_error, "fringe probability " + std::to_string(p) + " out of range");
  if (p < 0.0 && p > -1e-12) p = 0.0;
  if (p > 1.0 && p < 1.0 + 1e-12) p = 1.0;
  return p;
}

namespace {

// Joint state after the interferometer, restricted to what the input
// touches: returns A with rho_out = A rho A^dagger on path (x) pol (x) bins.
struct OracleEvolution {
  ComplexMatrix amplitudes;  // joint_dim x 2
  std::size_t bins;
};

OracleEvolution evolve(const InterferometerSpec& spec, double phi) {
  if (spec.input.dim() != 2) fail(ErrorKind::invalid_argument, "input must be a polarization qubit");
  if (!std::isfinite(phi)) fail(ErrorKind::invalid_argument, "phase must be finite");

  std::vector<double> delays;
  for (const auto& k : compose_arm(spec.upper)) delays.push_back(k.delay);
  for (const auto& k : compose_arm(spec.lower)) delays.push_back(k.delay);
  const auto bins = merge_bins(delays);
  const std::size_t nb = bins.size();
  const std::size_t local = 2 * nb;
  const std::size_t joint = 2 * local;
  if (joint > kMaxJointDim)
    fail(ErrorKind::resource_limit, "joint dimension " + std::to_string(joint) + " exceeds limit");

  const auto upper = arm_dilation_on_bins(spec.upper, bins);
  const auto lower = arm_dilation_on_bins(spec.lower, bins);

  // |0><0| (x) U + |1><1| (x) V, with U the upper arm.
  ComplexMatrix arms(joint, joint);
  for (std::size_t i = 0; i < local; ++i)
    for (std::size_t j = 0; j < local; ++j) {
      arms(i, j) = upper(i, j);
      arms(local + i, local + j) = lower(i, j);
    }

  const auto id = ComplexMatrix::identity(local);
  const auto split = kron(beamsplitter(), id);
  const auto phase = kron(phase_shifter(phi), id);
  const auto recombine = kron(adjoint(beamsplitter()), id);

  // Input |0>_path (x) |pol> (x) |e0>, pol in {H, V}.
  ComplexMatrix in(joint, 2);
  in(0, 0) = 1.0;
  in(nb, 1) = 1.0;

  return {recombine * (arms * (phase * (split * in))), nb};
}

ComplexMatrix port_block(const OracleEvolution& ev, const DensityMatrix& rho, std::size_t port) {
  const std::size_t local = 2 * ev.bins;
  ComplexMatrix a(local, 2);
  for (std::size_t i = 0; i < local; ++i)
    for (std::size_t j = 0; j < 2; ++j) a(i, j) = ev.amplitudes(port * local + i, j);
  return a * rho.matrix() * adjoint(a);
}

}  // namespace

PortProbabilities oracle_ports(const InterferometerSpec& spec, double phi) {
  const auto ev = evolve(spec, phi);
  return {trace(port_block(ev, spec.input, 0)).real(), trace(port_block(ev, spec.input, 1)).real()};
}

double oracle_probability(const InterferometerSpec& spec, double phi) {
  const auto ev = evolve(spec, phi);
  return trace(port_block(ev, spec.input, 0)).real();
}

FringeResult oracle_contrast(const InterferometerSpec& spec, std::size_t phases) {
  if (phases < 3) fail(ErrorKind::invalid_argument, "oracle contrast needs at least 3 phases");
  cplx c{};
  for (std::size_t k = 0; k < phases; ++k) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(phases);
    c += (2.0 * oracle_probability(spec, phi) - 1.0) * std::polar(1.0, -phi);
  }
  return FringeResult::from_contrast(c * (2.0 / static_cast<double>(phases)));
}

DensityMatrix output_polarization_state(const InterferometerSpec& spec, double phi) {
  const auto ev = evolve(spec, phi);
  const auto block = port_block(ev, spec.input, 0);
  const double p = trace(block).real();
  if (p < 1e-12)
    fail(ErrorKind::degenerate_postselection, "detection probability in port 0 is " + std::to_string(p));
  const std::size_t dims[] = {2, ev.bins};
  const std::size_t keep[] = {0};
  auto pol = partial_trace(block, dims, keep) * (1.0 / p);
  // Symmetrize away rounding before validation.
  pol = (pol + adjoint(pol)) * 0.5;
  return DensityMatrix(std::move(pol));
}

}  // namespace qchan
