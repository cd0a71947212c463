#ifndef WIRETAP_APP_CONFIG_H_
#define WIRETAP_APP_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/evaluation.h"
#include "wiretap/mine.h"
#include "wiretap/oracle.h"
#include "wiretap/training.h"

namespace wiretap::app {

inline constexpr const char* kOutputRootEnv = "WIRETAP_OUTPUT_ROOT";

// Bad configuration or flags; maps to the usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DatasetSection {
  std::string source = "glyphs";  // glyphs | idx
  std::size_t image_size = 16;
  std::size_t train_count = 9000;
  std::size_t test_count = 2000;
  std::uint64_t seed = 1;
  std::string idx_images;
  std::string idx_labels;
  std::string cache_dir;  // load train.bin / test.bin from here when set
};

struct EvaluationSection {
  MineConfig mine;
  std::size_t mine_draws = 5;  // channel realizations per test image
  ClassifierConfig adversary;  // hidden widths follow training.eve_hidden
  std::size_t decoder_epochs = 20;  // Eve decoder and band-isolated decoders
  std::size_t grid_columns = 8;
};

struct SweepSection {
  std::vector<double> lambdas{0, 5, 10, 20};
  std::vector<double> eps_e{0, 0.2, 0.3};
  std::size_t replicates = 1;
  std::size_t jobs = 1;
};

struct OracleSection {
  std::string system = "correlated-bits";  // correlated-bits | random
  std::uint64_t system_seed = 1;
  DiscreteOptions discrete;
  std::vector<double> lambdas{0, 0.5, 1, 2, 5, 10, 20, 50};
  OracleOptions options;
  // Channel for the oracle, sized to the system's code bits; empty means
  // one band with the training channel's first (eps_b, eps_e) pair.
  std::string bands;
};

struct ExperimentConfig {
  DatasetSection dataset;
  TrainConfig training;
  std::size_t checkpoint_every = 0;  // epochs; 0 = only the final model
  EvaluationSection evaluation;
  SweepSection sweep;
  OracleSection oracle;
  std::string output_dir;  // relative paths resolve under the output root

  // Throws ConfigError naming the offending key.
  void Validate() const;
};

// Parses an INI-style file ([section] key = value). Unknown keys are
// rejected so typos do not silently fall back to defaults.
ExperimentConfig LoadConfig(const std::filesystem::path& path);
ExperimentConfig ConfigFromText(const std::string& text);

// Serialized key/value view (section.key -> value), used in checkpoint
// metadata and echoed next to results.
std::map<std::string, std::string> ConfigEntries(const ExperimentConfig& config);

std::vector<double> ParseDoubleList(const std::string& text);
std::vector<std::size_t> ParseSizeList(const std::string& text);
std::string FormatDouble(double v);
std::string FormatList(const std::vector<double>& v);

// $WIRETAP_OUTPUT_ROOT, else "wiretap-out".
std::filesystem::path OutputRoot();
// Absolute output_dir as is; relative (or empty -> fallback) under the root.
std::filesystem::path ResolveOutputDir(const ExperimentConfig& config,
                                       const std::string& fallback);

}  // namespace wiretap::app

#endif  // WIRETAP_APP_CONFIG_H_
