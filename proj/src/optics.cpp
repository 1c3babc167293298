#include "qchan/optics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qchan/error.hpp"

namespace qchan {

namespace {

struct Branch {
  ComplexMatrix op;
  double delay;
};

std::vector<Branch> element_branches(const ArmElement& element) {
  return std::visit(
      [](const auto& e) -> std::vector<Branch> {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, CrystalSpec>) {
          std::vector<Branch> out;
          for (auto& k : crystal_kraus(e)) out.push_back({std::move(k.op), k.delay});
          return out;
        } else if constexpr (std::is_same_v<T, Waveplate>) {
          return {{half_waveplate(e.axis_angle), 0.0}};
        } else {
          if (e.u.rows() != 2 || e.u.cols() != 2)
            fail(ErrorKind::invalid_argument, "raw unitary must be 2x2");
          if (unitarity_residual(e.u) > 1e-10)
            fail(ErrorKind::invalid_argument, "raw unitary element is not unitary");
          return {{e.u, 0.0}};
        }
      },
      element);
}

// Sorts by delay and sums operators whose delays agree within kDelayMergeTol.
std::vector<DelayedKraus> merge(std::vector<DelayedKraus> ks) {
  std::stable_sort(ks.begin(), ks.end(),
                   [](const DelayedKraus& a, const DelayedKraus& b) { return a.delay < b.delay; });
  std::vector<DelayedKraus> out;
  for (auto& k : ks) {
    if (!out.empty() && std::abs(k.delay - out.back().delay) <= kDelayMergeTol)
      out.back().op += k.op;
    else
      out.push_back(std::move(k));
  }
  return out;
}

std::vector<cplx> column(const ComplexMatrix& m, std::size_t j) {
  std::vector<cplx> v(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v[i] = m(i, j);
  return v;
}

// Orthogonalizes v against `basis` (twice, for stability) and returns the residual norm.
double orthogonalize(std::vector<cplx>& v, const std::vector<std::vector<cplx>>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) {
      cplx overlap{};
      for (std::size_t i = 0; i < v.size(); ++i) overlap += std::conj(b[i]) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= overlap * b[i];
    }
  }
  double n2 = 0.0;
  for (const auto& z : v) n2 += std::norm(z);
  return std::sqrt(n2);
}

}  // namespace

std::vector<DelayedKraus> crystal_kraus(const CrystalSpec& c) {
  if (!std::isfinite(c.delay) || c.delay < 0.0)
    fail(ErrorKind::invalid_argument, "crystal delay must be finite and >= 0");
  const auto basis = rotated_basis(c.axis_angle);
  return {{ComplexMatrix::outer(basis.ordinary, basis.ordinary), 0.0},
          {ComplexMatrix::outer(basis.extraordinary, basis.extraordinary), c.delay}};
}

std::vector<DelayedKraus> compose_arm(const ArmSpec& arm) {
  std::vector<DelayedKraus> current{{ComplexMatrix::identity(2), 0.0}};
  for (const auto& element : arm.elements) {
    const auto branches = element_branches(element);
    std::vector<DelayedKraus> next;
    next.reserve(current.size() * branches.size());
    for (const auto& k : current)
      for (const auto& b : branches) next.push_back({b.op * k.op, k.delay + b.delay});
    current = merge(std::move(next));
  }
  std::erase_if(current, [](const DelayedKraus& k) { return k.op.max_abs() < kZeroOperatorTol; });
  return current;
}

std::vector<ComplexMatrix> kraus_operators(std::span<const DelayedKraus> ks) {
  std::vector<ComplexMatrix> out;
  out.reserve(ks.size());
  for (const auto& k : ks) out.push_back(k.op);
  return out;
}

std::vector<double> merge_bins(std::span<const double> delays) {
  std::vector<double> all(delays.begin(), delays.end());
  all.push_back(0.0);
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double d : all) {
    if (!std::isfinite(d) || d < 0.0) fail(ErrorKind::invalid_argument, "delays must be finite and >= 0");
    if (out.empty() || std::abs(d - out.back()) > kDelayMergeTol) out.push_back(d);
  }
  return out;
}

ComplexMatrix complete_unitary(const ComplexMatrix& partial, std::span<const std::size_t> fixed) {
  if (!partial.square()) fail(ErrorKind::invalid_argument, "unitary completion needs a square frame");
  const std::size_t n = partial.rows();
  std::vector<bool> is_fixed(n, false);
  std::vector<std::vector<cplx>> placed;
  for (auto j : fixed) {
    if (j >= n || is_fixed[j]) fail(ErrorKind::invalid_argument, "bad fixed column index");
    is_fixed[j] = true;
    auto v = column(partial, j);
    double n2 = 0.0;
    for (const auto& z : v) n2 += std::norm(z);
    for (const auto& b : placed) {
      cplx overlap{};
      for (std::size_t i = 0; i < n; ++i) overlap += std::conj(b[i]) * v[i];
      if (std::abs(overlap) > 1e-9) fail(ErrorKind::invalid_argument, "fixed columns are not orthogonal");
    }
    if (std::abs(n2 - 1.0) > 1e-9) fail(ErrorKind::invalid_argument, "fixed column is not normalized");
    placed.push_back(std::move(v));
  }

  ComplexMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j)
    if (is_fixed[j])
      for (std::size_t i = 0; i < n; ++i) out(i, j) = partial(i, j);

  for (std::size_t j = 0; j < n; ++j) {
    if (is_fixed[j]) continue;
    bool done = false;
    for (std::size_t attempt = 0; attempt <= n && !done; ++attempt) {
      const std::size_t seed = attempt == 0 ? j : attempt - 1;
      std::vector<cplx> v(n);
      v[seed] = 1.0;
      const double norm = orthogonalize(v, placed);
      if (norm < 1e-6) continue;
      for (auto& z : v) z /= norm;
      for (std::size_t i = 0; i < n; ++i) out(i, j) = v[i];
      placed.push_back(std::move(v));
      done = true;
    }
    if (!done) fail(ErrorKind::internal_error, "unitary completion ran out of basis vectors");
  }
  return out;
}

ComplexMatrix arm_dilation_on_bins(const ArmSpec& arm, std::span<const double> bins) {
  if (bins.empty() || std::abs(bins.front()) > kDelayMergeTol)
    fail(ErrorKind::invalid_argument, "bin set must start with delay 0");
  const auto ks = compose_arm(arm);
  const std::size_t nb = bins.size();
  ComplexMatrix frame(2 * nb, 2 * nb);
  for (const auto& k : ks) {
    const auto it = std::find_if(bins.begin(), bins.end(),
                                 [&](double b) { return std::abs(b - k.delay) <= kDelayMergeTol; });
    if (it == bins.end())
      fail(ErrorKind::invalid_argument, "arm delay " + std::to_string(k.delay) + " missing from bin set");
    const auto bin = static_cast<std::size_t>(it - bins.begin());
    for (std::size_t out_pol = 0; out_pol < 2; ++out_pol)
      for (std::size_t in_pol = 0; in_pol < 2; ++in_pol)
        frame(out_pol * nb + bin, in_pol * nb) = k.op(out_pol, in_pol);
  }
  const std::size_t fixed[] = {0, nb};
  return complete_unitary(frame, fixed);
}

ArmDilation arm_dilation(const ArmSpec& arm) {
  std::vector<double> delays;
  for (const auto& k : compose_arm(arm)) delays.push_back(k.delay);
  auto bins = merge_bins(delays);
  auto u = arm_dilation_on_bins(arm, bins);
  return {std::move(u), std::move(bins)};
}

DensityMatrix arm_channel_apply(const ArmSpec& arm, const DensityMatrix& rho) {
  if (rho.dim() != 2) fail(ErrorKind::invalid_argument, "arm channels act on 2x2 polarization states");
  const auto ops = kraus_operators(compose_arm(arm));
  return DensityMatrix(apply_kraus(ops, rho.matrix()));
}

}  // namespace qchan
