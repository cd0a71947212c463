#ifndef WIRETAP_APP_COMMANDS_H_
#define WIRETAP_APP_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "wiretap_app/config.h"

namespace wiretap::app {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumeric = 2 };

// Flags shared by every subcommand; set values win over the config file.
struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> lambda;  // one value, or a list for sweep / oracle
  std::optional<double> eps_b;
  std::optional<std::string> eps_e;   // one value, or a list for sweep
  std::optional<std::string> bands;
};

// Loads the config (or defaults), applies flags and validates.
// `list_command` lets --lambda / --eps-e carry comma-separated grids.
ExperimentConfig ResolveConfig(const CommonOptions& options, bool list_command = false);

struct Io {
  std::ostream& out;
  std::ostream& err;
};

int CmdGenData(const CommonOptions& options, Io io);
int CmdTrain(const CommonOptions& options, Io io);
int CmdSweep(const CommonOptions& options, Io io);
int CmdEval(const CommonOptions& options, const std::filesystem::path& checkpoint, Io io);
int CmdParallel(const CommonOptions& options, Io io);
int CmdOracle(const CommonOptions& options, Io io);
int CmdGradCheck(bool corrupt, const CommonOptions& options, Io io);

// Runs `body`, mapping exceptions to exit codes with a message on `err`.
int Guarded(std::ostream& err, const std::function<int()>& body);

}  // namespace wiretap::app

#endif  // WIRETAP_APP_COMMANDS_H_
