#include "qchan/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "qchan/error.hpp"
#include "qchan/interferometer.hpp"
#include "qchan/tomography.hpp"

namespace qchan::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kOracleTol = 1e-9;

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

bool strip_suffix(std::string_view& s, std::string_view suffix) {
  if (s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix) {
    s = trim(s.substr(0, s.size() - suffix.size()));
    return true;
  }
  return false;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Plain number or [sign][coef][*]pi[/den].
std::optional<double> scalar(std::string_view s) {
  s = trim(s);
  const auto pos = s.find("pi");
  if (pos == std::string_view::npos) return to_double(s);
  std::string_view coef = trim(s.substr(0, pos));
  std::string_view rest = trim(s.substr(pos + 2));
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  double c = 1.0;
  if (coef == "-") {
    c = -1.0;
  } else if (!coef.empty() && coef != "+") {
    auto v = to_double(coef);
    if (!v) return std::nullopt;
    c = *v;
  }
  double den = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') return std::nullopt;
    auto v = to_double(rest.substr(1));
    if (!v || *v == 0.0) return std::nullopt;
    den = *v;
  }
  return c * kPi / den;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

template <typename T>
T parse_count(const std::string& key, const std::string& value) {
  const auto v = trim(value);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw UsageError(key + ": expected a non-negative integer, got '" + value + "'");
  return out;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "command", "variant", "beta", "beta_points", "phases", "mean_total", "seed", "specs",
      "upper",   "lower",   "u1",   "u2",          "u3",     "u4",         "input", "output"};
  return keys;
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  if (name == "fringe") return Command::fringe;
  if (name == "sweep") return Command::sweep;
  if (name == "oracle-check") return Command::oracle_check;
  if (name == "tomography") return Command::tomography;
  if (name == "qkd") return Command::qkd;
  if (name == "fit") return Command::fit;
  return std::nullopt;
}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::fringe: return "fringe";
    case Command::sweep: return "sweep";
    case Command::oracle_check: return "oracle-check";
    case Command::tomography: return "tomography";
    case Command::qkd: return "qkd";
    case Command::fit: return "fit";
  }
  return "?";
}

double parse_angle(std::string_view text) {
  std::string_view s = trim(text);
  double scale = 1.0;
  if (strip_suffix(s, "deg"))
    scale = kPi / 180.0;
  else
    strip_suffix(s, "rad");
  const auto v = scalar(s);
  if (!v) fail(ErrorKind::invalid_argument, "cannot parse angle '" + std::string(text) + "'");
  return *v * scale;
}

double parse_delay(std::string_view text) {
  std::string_view s = trim(text);
  double scale = 1.0;
  if (strip_suffix(s, "lambda"))
    scale = kWavelengthUm;
  else
    strip_suffix(s, "um");
  const auto v = to_double(s);
  if (!v || *v < 0.0) fail(ErrorKind::invalid_argument, "cannot parse delay '" + std::string(text) + "'");
  return *v * scale;
}

std::vector<ArmElement> parse_elements(std::string_view text) {
  std::vector<ArmElement> out;
  const auto body = trim(text);
  if (body.empty() || body == "identity") return out;
  for (auto item : split(body, ';')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto open = item.find('(');
    if (open == std::string_view::npos || item.back() != ')')
      fail(ErrorKind::invalid_argument, "malformed arm element '" + std::string(item) + "'");
    const auto name = trim(item.substr(0, open));
    const auto args = split(item.substr(open + 1, item.size() - open - 2), ',');
    const auto want = [&](std::size_t n) {
      if (args.size() != n)
        fail(ErrorKind::invalid_argument,
             std::string(name) + " takes " + std::to_string(n) + " arguments");
    };
    if (name == "crystal") {
      want(2);
      out.push_back(CrystalSpec{parse_angle(args[0]), parse_delay(args[1])});
    } else if (name == "hwp") {
      want(1);
      out.push_back(Waveplate{parse_angle(args[0])});
    } else if (name == "phase") {
      want(1);
      out.push_back(RawUnitary{ComplexMatrix::identity(2) * std::polar(1.0, parse_angle(args[0]))});
    } else if (name == "unitary") {
      want(8);
      std::vector<cplx> e;
      for (std::size_t i = 0; i < 8; i += 2) {
        const auto re = to_double(args[i]), im = to_double(args[i + 1]);
        if (!re || !im) fail(ErrorKind::invalid_argument, "bad unitary entry in '" + std::string(item) + "'");
        e.emplace_back(*re, *im);
      }
      ComplexMatrix u(2, 2, std::move(e));
      if (unitarity_residual(u) > 1e-10)
        fail(ErrorKind::invalid_argument, "unitary(...) element is not unitary");
      out.push_back(RawUnitary{std::move(u)});
    } else {
      fail(ErrorKind::invalid_argument, "unknown arm element '" + std::string(name) + "'");
    }
  }
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  std::size_t lineno = 0;
  for (auto line : split(text, '\n')) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (!known_keys().contains(key)) throw UsageError("unknown config key '" + key + "'");
    if (out.contains(key)) throw UsageError("duplicate config key '" + key + "'");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig config_from_keys(const std::map<std::string, std::string>& keys) {
  for (const auto& [k, v] : keys)
    if (!known_keys().contains(k)) throw UsageError("unknown config key '" + k + "'");

  const auto get = [&](const std::string& k) -> const std::string* {
    const auto it = keys.find(k);
    return it == keys.end() ? nullptr : &it->second;
  };
  // Library parse errors become usage errors naming the key.
  const auto guarded = [](const std::string& key, auto&& fn) {
    try {
      return fn();
    } catch (const Error& e) {
      throw UsageError(key + ": " + e.what());
    }
  };

  RunConfig c;
  const auto* cmd = get("command");
  if (!cmd) throw UsageError("missing required key 'command'");
  const auto command = parse_command(*cmd);
  if (!command) throw UsageError("command: unknown command '" + *cmd + "'");
  c.command = *command;

  if (const auto* v = get("variant")) {
    c.variant = parse_variant(trim(*v));
    if (!c.variant) throw UsageError("variant: expected one of a, b, c, d, got '" + *v + "'");
  }
  if (const auto* v = get("beta")) c.beta = guarded("beta", [&] { return parse_angle(*v); });
  if (const auto* v = get("beta_points")) c.beta_points = parse_count<std::size_t>("beta_points", *v);
  if (const auto* v = get("phases")) c.phases = parse_count<std::size_t>("phases", *v);
  if (const auto* v = get("mean_total")) c.mean_total = parse_count<std::uint64_t>("mean_total", *v);
  if (const auto* v = get("seed")) c.seed = parse_count<std::uint64_t>("seed", *v);
  if (const auto* v = get("specs")) c.specs = parse_count<std::size_t>("specs", *v);
  if (const auto* v = get("input")) c.input_path = *v;
  if (const auto* v = get("output")) c.output_path = *v;

  const auto* upper = get("upper");
  const auto* lower = get("lower");
  if (upper || lower) {
    ArmSpec u, l;
    if (upper) u.elements = guarded("upper", [&] { return parse_elements(*upper); });
    if (lower) l.elements = guarded("lower", [&] { return parse_elements(*lower); });
    c.arms = std::pair{std::move(u), std::move(l)};
  }
  const char* seg_keys[] = {"u1", "u2", "u3", "u4"};
  for (std::size_t i = 0; i < 4; ++i) {
    if (const auto* v = get(seg_keys[i])) {
      if (!c.segments) c.segments.emplace();
      (*c.segments)[i] = guarded(seg_keys[i], [&] { return parse_elements(*v); });
    }
  }

  if (c.beta_points && *c.beta_points < 2) throw UsageError("beta_points: need at least 2 points");
  if (c.phases && *c.phases < 4) throw UsageError("phases: need at least 4 phases");
  if (c.mean_total && *c.mean_total < 1) throw UsageError("mean_total: must be >= 1");
  if (c.variant && c.arms) throw UsageError("variant: cannot be combined with upper/lower arms");
  if (c.variant && c.segments) throw UsageError("variant: cannot be combined with u1..u4 segments");

  const bool has_setup = c.arms || (c.variant && c.beta);
  if (c.variant && !c.beta && c.command != Command::sweep && c.command != Command::tomography)
    throw UsageError("missing required key 'beta' (needed with 'variant')");

  switch (c.command) {
    case Command::sweep:
      if (!c.variant) throw UsageError("missing required key 'variant' for sweep");
      break;
    case Command::fringe:
      if (!has_setup) throw UsageError("missing required key 'variant' (or 'upper'/'lower') for fringe");
      break;
    case Command::fit:
      if (!c.input_path && !(has_setup && c.mean_total))
        throw UsageError("missing required key 'input' (or inline 'variant', 'beta', 'mean_total') for fit");
      break;
    case Command::oracle_check:
    case Command::tomography:
    case Command::qkd:
      break;
  }
  return c;
}

RunConfig parse_config(std::span<const std::string> args) {
  CLI::App app{"Interference of quantum channels: fringe, sweep, oracle-check, tomography, qkd, fit"};
  std::map<std::string, std::string> flags;
  std::string command, config_path;
  app.add_option("command", command, "fringe | sweep | oracle-check | tomography | qkd | fit");
  app.add_option("--config", config_path, "key = value config file; flags override it");

  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag table[] = {
      {"--variant", "variant", "crystal configuration a, b, c or d"},
      {"--beta", "beta", "angle beta (radians, or suffix deg/rad)"},
      {"--beta-points", "beta_points", "number of beta values over [0, pi/2]"},
      {"--phases", "phases", "number of phase points over [0, 2 pi)"},
      {"--mean-total", "mean_total", "mean counts per phase point"},
      {"--seed", "seed", "random seed"},
      {"--specs", "specs", "number of random specs for oracle-check"},
      {"--upper", "upper", "upper arm elements, e.g. \"crystal(0,310);crystal(pi/4,150)\""},
      {"--lower", "lower", "lower arm elements"},
      {"--u1", "u1", "QKD segment 1"},
      {"--u2", "u2", "QKD segment 2"},
      {"--u3", "u3", "QKD segment 3"},
      {"--u4", "u4", "QKD segment 4"},
      {"--input", "input", "counts CSV for fit (phi,counts columns)"},
      {"--output", "output", "output CSV path"},
  };
  std::map<std::string, std::string> raw;
  for (const auto& f : table) app.add_option(f.name, raw[f.key], f.help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  std::map<std::string, std::string> keys;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("config: cannot read '" + config_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    keys = parse_key_values(ss.str());
  }
  if (!command.empty()) keys["command"] = command;
  for (const auto& f : table)
    if (app.count(f.name) > 0) keys[f.key] = raw[f.key];
  return config_from_keys(keys);
}

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

CsvTable read_csv(std::string_view text) {
  CsvTable t;
  bool first = true;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    for (auto cell : split(line, ',')) cells.emplace_back(trim(cell));
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size())
        fail(ErrorKind::invalid_argument, "CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                              std::to_string(t.header.size()));
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) fail(ErrorKind::invalid_argument, "CSV has no header");
  return t;
}

std::vector<CountRecord> read_counts(std::string_view csv_text) {
  const auto t = read_csv(csv_text);
  const auto col = [&](std::string_view name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) fail(ErrorKind::invalid_argument, "counts file lacks a '" + std::string(name) + "' column");
    return static_cast<std::size_t>(it - t.header.begin());
  };
  const auto phi_col = col("phi");
  const auto count_col = col("counts");
  std::vector<CountRecord> out;
  for (const auto& row : t.rows) {
    const auto phi = to_double(row[phi_col]);
    const auto counts = to_double(row[count_col]);
    if (!phi || !counts || *counts < 0.0 || std::floor(*counts) != *counts)
      fail(ErrorKind::invalid_argument, "bad counts row '" + row[phi_col] + "," + row[count_col] + "'");
    out.push_back({*phi, static_cast<std::uint64_t>(*counts), 0.0});
  }
  return out;
}

namespace {

InterferometerSpec setup_spec(const RunConfig& c) {
  if (c.arms) {
    InterferometerSpec s;
    s.upper = c.arms->first;
    s.lower = c.arms->second;
    return s;
  }
  return config_fig4(*c.variant, *c.beta);
}

struct Output {
  std::ostringstream csv;
  std::string summary;
  int code = 0;
};

void csv_row(std::ostream& os, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const auto& c : cells) {
    if (!first) os << ',';
    os << c;
    first = false;
  }
  os << '\n';
}

std::string fixed6(double x) {
  if (std::abs(x) < 5e-7) x = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void run_fringe(const RunConfig& c, Output& o) {
  const auto spec = setup_spec(c);
  const auto fringe = contrast_shared_env(spec);
  const auto phis = phase_grid(c.phases.value_or(64));
  if (c.mean_total) {
    const auto records = poisson_fringe(spec, phis, *c.mean_total, c.seed.value_or(1));
    csv_row(o.csv, {"phi", "probability", "expected", "counts"});
    for (const auto& r : records)
      csv_row(o.csv, {format_number(r.phi), format_number(output_probability(fringe, r.phi)),
                      format_number(r.expected), std::to_string(r.counts)});
  } else {
    csv_row(o.csv, {"phi", "probability", "oracle_probability"});
    for (double phi : phis)
      csv_row(o.csv, {format_number(phi), format_number(output_probability(fringe, phi)),
                      format_number(oracle_probability(spec, phi))});
  }
  o.summary = "visibility=" + fixed6(fringe.visibility) + " fringe_phase=" + fixed6(fringe.fringe_phase);
}

void run_sweep(const RunConfig& c, Output& o) {
  const auto rows = sweep(*c.variant, beta_grid(c.beta_points.value_or(25)));
  csv_row(o.csv, {"beta", "v_closed_form", "v_simulated", "v_oracle"});
  double worst = 0.0;
  for (const auto& r : rows) {
    csv_row(o.csv, {format_number(r.beta), format_number(r.v_closed_form), format_number(r.v_simulated),
                    format_number(r.v_oracle)});
    worst = std::max({worst, std::abs(r.v_closed_form - r.v_simulated), std::abs(r.v_simulated - r.v_oracle)});
  }
  o.summary = std::string("variant=") + variant_tag(*c.variant) + " points=" + std::to_string(rows.size()) +
              " max_deviation=" + format_number(worst);
}

void run_oracle_check(const RunConfig& c, Output& o) {
  const std::size_t n = c.specs.value_or(200);
  const std::uint64_t seed = c.seed.value_or(1);
  const auto phis = phase_grid(c.phases.value_or(16));
  csv_row(o.csv, {"index", "contrast_re", "contrast_im", "oracle_re", "oracle_im", "contrast_diff", "fringe_diff"});
  double worst_c = 0.0, worst_f = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto spec = random_interferometer(seed, i);
    const auto sim = contrast_shared_env(spec);
    const auto orc = oracle_contrast(spec, phis.size());
    double fdiff = 0.0;
    for (double phi : phis)
      fdiff = std::max(fdiff, std::abs(oracle_probability(spec, phi) - output_probability(sim, phi)));
    const double cdiff = std::abs(sim.contrast - orc.contrast);
    worst_c = std::max(worst_c, cdiff);
    worst_f = std::max(worst_f, fdiff);
    csv_row(o.csv, {std::to_string(i), format_number(sim.contrast.real()), format_number(sim.contrast.imag()),
                    format_number(orc.contrast.real()), format_number(orc.contrast.imag()), format_number(cdiff),
                    format_number(fdiff)});
  }
  o.summary = "specs=" + std::to_string(n) + " max_contrast_diff=" + format_number(worst_c) +
              " max_fringe_diff=" + format_number(worst_f);
  if (worst_c >= kOracleTol || worst_f >= kOracleTol) o.code = 1;
}

void run_tomography(const RunConfig& c, Output& o) {
  std::vector<double> betas = c.beta ? std::vector<double>{*c.beta} : beta_grid(c.beta_points.value_or(25));
  csv_row(o.csv, {"beta", "chi_distance_upper", "chi_distance_lower", "visibility_a", "visibility_b",
                  "visibility_gap"});
  double worst_chi = 0.0, last_gap = 0.0;
  for (double beta : betas) {
    const auto r = blindness_demo(beta);
    csv_row(o.csv, {format_number(beta), format_number(r.chi_distance_upper), format_number(r.chi_distance_lower),
                    format_number(r.visibility_a), format_number(r.visibility_b), format_number(r.visibility_gap)});
    worst_chi = std::max({worst_chi, r.chi_distance_upper, r.chi_distance_lower});
    last_gap = r.visibility_gap;
  }
  o.summary = (c.beta ? "gap=" + fixed6(last_gap) + " " : std::string{}) +
              "max_chi_distance=" + format_number(worst_chi) + " (chi in Pauli basis, trace 1)";
}

void run_qkd(const RunConfig& c, Output& o) {
  QkdSpec q;
  if (c.variant) {
    q = qkd_from_fig4(*c.variant, *c.beta);
  } else if (c.segments) {
    q.u1 = (*c.segments)[0];
    q.u2 = (*c.segments)[1];
    q.u3 = (*c.segments)[2];
    q.u4 = (*c.segments)[3];
  }
  const auto r = qkd_visibility(q);
  csv_row(o.csv, {"visibility", "qber"});
  csv_row(o.csv, {format_number(r.visibility), format_number(r.qber)});
  o.summary = "visibility=" + fixed6(r.visibility) + " qber=" + fixed6(r.qber);
}

void run_fit(const RunConfig& c, Output& o) {
  std::vector<CountRecord> records;
  if (c.input_path) {
    std::ifstream in(*c.input_path);
    if (!in) throw std::runtime_error("cannot read counts file '" + *c.input_path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    records = read_counts(ss.str());
  } else {
    records = poisson_fringe(setup_spec(c), phase_grid(c.phases.value_or(64)), *c.mean_total, c.seed.value_or(1));
  }
  const auto f = fit_fringe(records);
  csv_row(o.csv, {"amplitude", "visibility_hat", "phase_hat", "stderr_visibility", "iterations", "converged"});
  csv_row(o.csv, {format_number(f.amplitude), format_number(f.visibility_hat), format_number(f.phase_hat),
                  format_number(f.stderr_visibility), std::to_string(f.iterations), f.converged ? "1" : "0"});
  o.summary = "visibility_hat=" + fixed6(f.visibility_hat) + " stderr=" + fixed6(f.stderr_visibility) +
              (f.converged ? "" : " (not converged)");
  if (!f.converged) o.code = 1;
}

}  // namespace

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  Output o;
  try {
    switch (config.command) {
      case Command::fringe: run_fringe(config, o); break;
      case Command::sweep: run_sweep(config, o); break;
      case Command::oracle_check: run_oracle_check(config, o); break;
      case Command::tomography: run_tomography(config, o); break;
      case Command::qkd: run_qkd(config, o); break;
      case Command::fit: run_fit(config, o); break;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: io-error: " << e.what() << '\n';
    return 1;
  }

  if (config.output_path.empty()) {
    out << o.csv.str();
    err << o.summary << '\n';
  } else {
    std::ofstream file(config.output_path, std::ios::binary);
    file << o.csv.str();
    if (!file) {
      err << "error: io-error: cannot write '" << config.output_path << "'\n";
      return 1;
    }
    out << o.summary << '\n';
  }
  if (o.code != 0) err << "error: internal-error: " << command_name(config.command) << " check failed\n";
  return o.code;
}

int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  if (std::any_of(args.begin(), args.end(), [](const std::string& a) { return a == "-h" || a == "--help"; })) {
    out << "usage: qchan <fringe|sweep|oracle-check|tomography|qkd|fit> [--config FILE] [flags]\n"
           "flags: --variant --beta --beta-points --phases --mean-total --seed --specs\n"
           "       --upper --lower --u1 --u2 --u3 --u4 --input --output\n";
    return 0;
  }
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  }
  return run(config, out, err);
}

}  // namespace qchan::cli
