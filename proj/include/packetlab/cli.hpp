#ifndef PACKETLAB_CLI_HPP
#define PACKETLAB_CLI_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace packetlab::cli {

enum ExitCode : int { kPass = 0, kDomainFailure = 1, kUsageError = 2 };

/// Everything a subcommand reads. Paths are empty when not given.
struct RunConfig {
  std::string command;

  std::string matrix;  // "2,1;0,2"
  std::string bank_path;
  std::string data_path;
  std::string tree_path;
  std::string basis_path;
  std::string unitary_path;
  std::string lowpass_path;
  std::string out_path;

  int grid_n = 0;  // 0 selects the per-command default
  int depth = -1;
  int multiplicity = 1;
  std::string cost = "entropy";
  std::optional<double> tol;
  std::uint64_t seed = 0;
  bool random_unitary = false;
  bool force = false;
  bool json_values = false;  // grids as JSON arrays rather than base64

  std::optional<double> c1;
  std::optional<double> c2;
  int levels = 0;

  std::string n;   // packet index as typed, validated by the command
  std::string xi;  // "x1,x2;y1,y2"
};

/// Runs one subcommand. The JSON report goes to `out` (or to out_path),
/// diagnostics to `err`.
int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace packetlab::cli

#endif  // PACKETLAB_CLI_HPP
