#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace delone {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitCertification = 2, kExitIo = 3 };

struct RunConfig {
  std::string command;
  // inputs
  std::string net_path, complex_path, bundle_path, certificate_path;
  // outputs
  std::string out_path;
  std::string family_out_path;
  std::string metric;  // empty means flat:dim
  int dim = 2;
  std::string mode = "practical";
  std::uint64_t seed = 0;
  // constants
  std::vector<std::string> eps;  // eps0..eps4, "auto" entries are computed
  double dFU = 1.0;
  double lF = 0.0;
  // synthesize
  std::string region;  // box:lo..,hi.. | disk:c..,r
  // certify: smooth:<depth> | adversarial:<depth> | identity:<depth> | file:<path>
  std::string family = "smooth:4";
  // render
  bool circumcircles = false;
};

/// Parses argv into a RunConfig. Returns an exit code when parsing ends the run
/// (help, usage errors); otherwise nullopt.
std::optional<int> parse_args(int argc, char** argv, RunConfig& cfg);

/// Runs one command. Logs go to standard error; data to files or standard output.
int dispatch(const RunConfig& cfg);

int run_cli(int argc, char** argv);

}  // namespace delone
