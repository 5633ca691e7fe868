#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subohmic/model.hpp"
#include "subohmic/oracle.hpp"
#include "subohmic/variational.hpp"

namespace subohmic::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { ok = 0, domain_error = 2, no_convergence = 3, usage = 64 };

enum class Command { solve, sweep, critical, phase_diagram, chain, oracle, exponents };
enum class Format { csv, json };

/// lo:hi:n (inclusive, evenly spaced) or an explicit comma-separated list.
struct Grid {
  std::vector<double> values;
  static Grid parse(const std::string& text);
};

struct RunConfig {
  std::optional<Command> command;
  model::ModelParams params;
  variational::Functional functional = variational::Functional::exact;
  std::optional<Grid> alpha_grid;
  std::optional<Grid> s_grid;
  std::optional<Grid> omega_c_list;
  int sites = 400;
  bool displaced_frame = false;
  oracle::OracleConfig oracle;
  std::optional<std::string> output;
  std::optional<Format> format;  // default depends on the command
  bool raw_units = false;
  std::optional<int> threads;
};

/// Thrown for malformed configuration files and flag values (exit 64).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Applies one `key = value` setting; keys are the long flag names with '-' -> '_'.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

/// Reads `key = value` lines ('#' starts a comment) into `config`. Errors name the line.
void load_config(const std::string& path, RunConfig& config);
RunConfig load_config(const std::string& path);

std::optional<Command> parse_command(const std::string& name);
std::string command_name(Command c);

/// Executes the command. Data go to --output (atomically) or to `out`; the
/// one-line summary goes to `out` when a file was written, else to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line handling: flags, optional --config file, run().
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace subohmic::cli
