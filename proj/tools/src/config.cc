#include "wiretap_app/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace wiretap::app {
namespace {

namespace pt = boost::property_tree;

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return v;
}

std::uint64_t ToUnsigned(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  std::uint64_t v = 0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw ConfigError(key + ": '" + text + "' is not a nonnegative integer");
  }
  return v;
}

// One setter per recognized "section.key".
using Setter = std::function<void(ExperimentConfig&, const std::string& key,
                                  const std::string& value)>;

template <typename T>
Setter SizeField(T ExperimentConfig::*section, std::size_t T::*field) {
  return [=](ExperimentConfig& c, const std::string& k, const std::string& v) {
    (c.*section).*field = ToUnsigned(k, v);
  };
}

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto str = [](std::string DatasetSection::*f) {
      return [=](ExperimentConfig& c, const std::string&, const std::string& v) {
        c.dataset.*f = Trim(v);
      };
    };
    m["dataset.source"] = str(&DatasetSection::source);
    m["dataset.idx_images"] = str(&DatasetSection::idx_images);
    m["dataset.idx_labels"] = str(&DatasetSection::idx_labels);
    m["dataset.cache_dir"] = str(&DatasetSection::cache_dir);
    m["dataset.image_size"] = SizeField(&ExperimentConfig::dataset, &DatasetSection::image_size);
    m["dataset.train_count"] = SizeField(&ExperimentConfig::dataset, &DatasetSection::train_count);
    m["dataset.test_count"] = SizeField(&ExperimentConfig::dataset, &DatasetSection::test_count);
    m["dataset.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dataset.seed = ToUnsigned(k, v);
    };

    m["channel.bands"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      try {
        c.training.channel = ChannelSpec::Parse(Trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k + ": " + e.what());
      }
    };

    auto train_d = [](double TrainConfig::*f) {
      return [=](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.training.*f = ToDouble(k, v);
      };
    };
    auto train_z = [](std::size_t TrainConfig::*f) {
      return [=](ExperimentConfig& c, const std::string& k, const std::string& v) {
        c.training.*f = ToUnsigned(k, v);
      };
    };
    m["training.lambda"] = train_d(&TrainConfig::lambda);
    m["training.lr"] = train_d(&TrainConfig::lr);
    m["training.eve_lr"] = train_d(&TrainConfig::eve_lr);
    m["training.mi_weight"] = train_d(&TrainConfig::mi_weight);
    m["training.epochs"] = train_z(&TrainConfig::epochs);
    m["training.batch_size"] = train_z(&TrainConfig::batch_size);
    m["training.eve_steps"] = train_z(&TrainConfig::eve_steps_per_main_step);
    m["training.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.training.seed = ToUnsigned(k, v);
    };
    m["training.checkpoint_every"] = [](ExperimentConfig& c, const std::string& k,
                                        const std::string& v) {
      c.checkpoint_every = ToUnsigned(k, v);
    };
    m["training.encoder_hidden"] = [](ExperimentConfig& c, const std::string&,
                                      const std::string& v) {
      c.training.model.encoder_hidden = ParseSizeList(v);
    };
    m["training.decoder_hidden"] = [](ExperimentConfig& c, const std::string&,
                                      const std::string& v) {
      c.training.model.decoder_hidden = ParseSizeList(v);
    };
    m["training.eve_hidden"] = [](ExperimentConfig& c, const std::string&,
                                  const std::string& v) {
      c.training.model.eve_hidden = ParseSizeList(v);
    };
    m["training.sampling"] = [](ExperimentConfig& c, const std::string& k,
                                const std::string& v) {
      const std::string t = Trim(v);
      if (t == "straight-through") {
        c.training.sampling = SamplingMode::kStraightThrough;
      } else if (t == "relaxed") {
        c.training.sampling = SamplingMode::kRelaxed;
      } else {
        throw ConfigError(k + ": expected straight-through or relaxed, got '" + t + "'");
      }
    };

    m["evaluation.mine_epochs"] = [](ExperimentConfig& c, const std::string& k,
                                     const std::string& v) {
      c.evaluation.mine.epochs = ToUnsigned(k, v);
    };
    m["evaluation.mine_batch_size"] = [](ExperimentConfig& c, const std::string& k,
                                         const std::string& v) {
      c.evaluation.mine.batch_size = ToUnsigned(k, v);
    };
    m["evaluation.mine_hidden"] = [](ExperimentConfig& c, const std::string&,
                                     const std::string& v) {
      c.evaluation.mine.hidden = ParseSizeList(v);
    };
    m["evaluation.mine_lr"] = [](ExperimentConfig& c, const std::string& k,
                                 const std::string& v) { c.evaluation.mine.lr = ToDouble(k, v); };
    m["evaluation.mine_holdout"] = [](ExperimentConfig& c, const std::string& k,
                                      const std::string& v) {
      c.evaluation.mine.holdout_fraction = ToDouble(k, v);
    };
    m["evaluation.mine_draws"] = SizeField(&ExperimentConfig::evaluation,
                                           &EvaluationSection::mine_draws);
    m["evaluation.decoder_epochs"] = SizeField(&ExperimentConfig::evaluation,
                                               &EvaluationSection::decoder_epochs);
    m["evaluation.grid_columns"] = SizeField(&ExperimentConfig::evaluation,
                                             &EvaluationSection::grid_columns);
    m["evaluation.adversary_epochs"] = [](ExperimentConfig& c, const std::string& k,
                                          const std::string& v) {
      c.evaluation.adversary.epochs = ToUnsigned(k, v);
    };

    m["sweep.lambdas"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.sweep.lambdas = ParseDoubleList(v);
    };
    m["sweep.eps_e"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.sweep.eps_e = ParseDoubleList(v);
    };
    m["sweep.replicates"] = SizeField(&ExperimentConfig::sweep, &SweepSection::replicates);
    m["sweep.jobs"] = SizeField(&ExperimentConfig::sweep, &SweepSection::jobs);

    m["oracle.system"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.oracle.system = Trim(v);
    };
    m["oracle.system_seed"] = [](ExperimentConfig& c, const std::string& k,
                                 const std::string& v) { c.oracle.system_seed = ToUnsigned(k, v); };
    m["oracle.source_bits"] = [](ExperimentConfig& c, const std::string& k,
                                 const std::string& v) {
      c.oracle.discrete.source_bits = ToUnsigned(k, v);
    };
    m["oracle.sensitive_bit"] = [](ExperimentConfig& c, const std::string& k,
                                   const std::string& v) {
      c.oracle.discrete.sensitive_bit = ToUnsigned(k, v);
    };
    m["oracle.t_size"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.oracle.discrete.t_size = ToUnsigned(k, v);
    };
    m["oracle.s_size"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.oracle.discrete.s_size = ToUnsigned(k, v);
    };
    m["oracle.code_bits"] = [](ExperimentConfig& c, const std::string& k,
                               const std::string& v) {
      c.oracle.discrete.code_bits = ToUnsigned(k, v);
    };
    m["oracle.lambdas"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.oracle.lambdas = ParseDoubleList(v);
    };
    m["oracle.restarts"] = [](ExperimentConfig& c, const std::string& k,
                              const std::string& v) { c.oracle.options.restarts = ToUnsigned(k, v); };
    m["oracle.iterations"] = [](ExperimentConfig& c, const std::string& k,
                                const std::string& v) {
      c.oracle.options.iterations = ToUnsigned(k, v);
    };
    m["oracle.lr"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.oracle.options.lr = ToDouble(k, v);
    };
    m["oracle.bands"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.oracle.bands = Trim(v);
    };

    m["output.dir"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
      c.output_dir = Trim(v);
    };
    return m;
  }();
  return table;
}

std::string SizeListText(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::vector<double> ParseDoubleList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (Trim(item).empty()) continue;
    out.push_back(ToDouble("list", item));
  }
  return out;
}

std::vector<std::size_t> ParseSizeList(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (Trim(item).empty()) continue;
    const auto v = ToUnsigned("width list", item);
    if (v == 0) throw ConfigError("layer widths must be positive");
    out.push_back(v);
  }
  return out;
}

std::string FormatDouble(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string FormatList(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += FormatDouble(v[i]);
  }
  return out;
}

void ExperimentConfig::Validate() const {
  if (dataset.source != "glyphs" && dataset.source != "idx") {
    throw ConfigError("dataset.source must be glyphs or idx, got '" + dataset.source + "'");
  }
  if (dataset.source == "idx" && (dataset.idx_images.empty() || dataset.idx_labels.empty())) {
    throw ConfigError("dataset.source = idx needs dataset.idx_images and dataset.idx_labels");
  }
  if (dataset.image_size < 8) throw ConfigError("dataset.image_size must be >= 8");
  if (dataset.train_count == 0 || dataset.test_count == 0) {
    throw ConfigError("dataset.train_count and dataset.test_count must be positive");
  }
  if (training.model.image_size != dataset.image_size) {
    throw ConfigError("model image size differs from dataset.image_size");
  }
  if (evaluation.mine_draws == 0) throw ConfigError("evaluation.mine_draws must be >= 1");
  if (sweep.replicates == 0) throw ConfigError("sweep.replicates must be >= 1");
  for (double e : sweep.eps_e) {
    try {
      ValidateCrossover(e);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string("sweep.eps_e: ") + ex.what());
    }
  }
  for (double l : sweep.lambdas) {
    if (!(l >= 0.0)) throw ConfigError("sweep.lambdas must be nonnegative");
  }
  if (oracle.system != "correlated-bits" && oracle.system != "random") {
    throw ConfigError("oracle.system must be correlated-bits or random");
  }
  if (oracle.options.restarts == 0) throw ConfigError("oracle.restarts must be >= 1");
  try {
    training.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("training: ") + e.what());
  }
}

ExperimentConfig ConfigFromText(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  ExperimentConfig config;
  const auto& setters = Setters();
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config: key '" + section + "' outside any section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("config: unknown key '" + full + "'");
      it->second(config, full, value.data());
    }
  }
  config.training.model.image_size = config.dataset.image_size;
  config.training.model.code_bits = config.training.channel.total_bits();
  return config;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ConfigFromText(ss.str());
}

std::map<std::string, std::string> ConfigEntries(const ExperimentConfig& c) {
  std::map<std::string, std::string> m;
  m["dataset.source"] = c.dataset.source;
  m["dataset.image_size"] = std::to_string(c.dataset.image_size);
  m["dataset.train_count"] = std::to_string(c.dataset.train_count);
  m["dataset.test_count"] = std::to_string(c.dataset.test_count);
  m["dataset.seed"] = std::to_string(c.dataset.seed);
  m["channel.bands"] = c.training.channel.ToString();
  m["training.lambda"] = FormatDouble(c.training.lambda);
  m["training.epochs"] = std::to_string(c.training.epochs);
  m["training.batch_size"] = std::to_string(c.training.batch_size);
  m["training.eve_steps"] = std::to_string(c.training.eve_steps_per_main_step);
  m["training.seed"] = std::to_string(c.training.seed);
  m["training.lr"] = FormatDouble(c.training.lr);
  m["training.eve_lr"] = FormatDouble(c.training.eve_lr);
  m["training.mi_weight"] = FormatDouble(c.training.mi_weight);
  m["training.encoder_hidden"] = SizeListText(c.training.model.encoder_hidden);
  m["training.decoder_hidden"] = SizeListText(c.training.model.decoder_hidden);
  m["training.eve_hidden"] = SizeListText(c.training.model.eve_hidden);
  m["training.sampling"] =
      c.training.sampling == SamplingMode::kRelaxed ? "relaxed" : "straight-through";
  return m;
}

std::filesystem::path OutputRoot() {
  const char* env = std::getenv(kOutputRootEnv);
  return (env && *env) ? std::filesystem::path(env) : std::filesystem::path("wiretap-out");
}

std::filesystem::path ResolveOutputDir(const ExperimentConfig& config,
                                       const std::string& fallback) {
  std::filesystem::path p = config.output_dir.empty() ? fallback : config.output_dir;
  return p.is_absolute() ? p : OutputRoot() / p;
}

}  // namespace wiretap::app
