#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qchan/experiments.hpp"
#include "qchan/optics.hpp"

namespace qchan::cli {

/// Bad flags or config: exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { fringe, sweep, oracle_check, tomography, qkd, fit };

std::optional<Command> parse_command(std::string_view name);
std::string_view command_name(Command c);

struct RunConfig {
  Command command = Command::fringe;
  std::optional<Fig4Variant> variant;
  std::optional<double> beta;  // radians
  std::optional<std::size_t> beta_points;
  std::optional<std::size_t> phases;
  std::optional<std::uint64_t> mean_total;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> specs;
  std::optional<std::pair<ArmSpec, ArmSpec>> arms;               // upper, lower
  std::optional<std::array<std::vector<ArmElement>, 4>> segments;  // u1..u4
  std::optional<std::string> input_path;                           // counts file for fit
  std::string output_path;  // empty: CSV to stdout, summary to stderr
};

/// Angle literal in radians unless suffixed: "0.39", "0.39rad", "22.5deg".
/// Multiples of pi are accepted: "pi/8", "-3pi/4", "3*pi/8".
double parse_angle(std::string_view text);

/// Delay literal in micrometers, optionally suffixed "um" or "lambda"
/// (780 nm wavelengths).
double parse_delay(std::string_view text);

/// Arm elements separated by ';':
///   crystal(<angle>,<delay>)  hwp(<angle>)  phase(<angle>)
///   unitary(re00,im00,re01,im01,re10,im10,re11,im11)
/// "" or "identity" is the empty arm.
std::vector<ArmElement> parse_elements(std::string_view text);

/// Flat "key = value" document; '#' starts a comment. Keys use underscores.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Builds a validated config from merged key/value pairs.
RunConfig config_from_keys(const std::map<std::string, std::string>& keys);

/// Command-line arguments without the program name. A --config file is read
/// first and explicit flags override its values.
RunConfig parse_config(std::span<const std::string> args);

/// Executes the command. Returns 0 on success, 1 on runtime or numerical failure.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run, map failures onto exit codes 0/1/2.
int main_entry(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// "%.12g"
std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::string_view text);

/// Reads phi and counts columns (by header name) from a fringe CSV.
std::vector<CountRecord> read_counts(std::string_view csv_text);

}  // namespace qchan::cli
