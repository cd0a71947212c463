#include "wiretap_app/commands.h"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>

#include "wiretap/checkpoint.h"
#include "wiretap/idx.h"
#include "wiretap/mi.h"
#include "wiretap/oracle.h"
#include "wiretap_app/experiments.h"
#include "wiretap_app/gradcheck_suite.h"
#include "wiretap_app/outputs.h"

namespace wiretap::app {
namespace {

namespace fs = std::filesystem;

double SingleValue(const std::string& flag, const std::string& text) {
  const std::vector<double> v = ParseDoubleList(text);
  if (v.size() != 1) throw ConfigError(flag + " takes a single value here, got '" + text + "'");
  return v.front();
}

ChannelSpec WithEpsilons(const ChannelSpec& spec, std::optional<double> eps_b,
                         std::optional<double> eps_e) {
  std::vector<BandSpec> bands = spec.bands();
  for (auto& b : bands) {
    if (eps_b) b.epsilon_b = *eps_b;
    if (eps_e) b.epsilon_e = *eps_e;
  }
  return ChannelSpec(bands);
}

fs::path PrepareOutputDir(const CommonOptions& options, const ExperimentConfig& config,
                          const std::string& fallback) {
  ExperimentConfig c = config;
  if (!options.out_dir.empty()) c.output_dir = options.out_dir;
  const fs::path dir = ResolveOutputDir(c, fallback);
  fs::create_directories(dir);
  return dir;
}

CsvTable ConfigTable(const ExperimentConfig& config) {
  CsvTable t("config/1", {"key", "value"});
  for (const auto& [k, v] : ConfigEntries(config)) {
    CsvTable::Row r;
    r << k << v;
    t.Add(r);
  }
  return t;
}

std::map<std::string, std::string> CheckpointMetadata(const TrainConfig& t) {
  auto meta = ModelConfigMetadata(t.model);
  meta["channel"] = t.channel.ToString();
  meta["lambda"] = FormatDouble(t.lambda);
  meta["seed"] = std::to_string(t.seed);
  return meta;
}

void SaveModels(const fs::path& path, const Models& m, const TrainConfig& t) {
  SaveCheckpoint(path, PackCheckpoint({&m.encoder.network(), &m.decoder.network(),
                                       &m.eve.network()},
                                      CheckpointMetadata(t)));
}

void WriteGrid(const fs::path& path,
               const std::vector<std::vector<std::vector<double>>>& rows, std::size_t size) {
  WriteFileAtomic(path, ImageGridPpm(rows, size, size, 2));
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

ExperimentConfig ResolveConfig(const CommonOptions& options, bool list_command) {
  ExperimentConfig c = options.config_path.empty() ? ExperimentConfig{}
                                                   : LoadConfig(options.config_path);
  if (options.seed) {
    c.training.seed = *options.seed;
    c.oracle.options.seed = *options.seed;
  }
  if (options.bands) {
    try {
      c.training.channel = ChannelSpec::Parse(*options.bands);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--bands: ") + e.what());
    }
    c.oracle.bands = *options.bands;
  }
  if (options.lambda) {
    if (list_command) {
      c.sweep.lambdas = ParseDoubleList(*options.lambda);
      c.oracle.lambdas = c.sweep.lambdas;
    } else {
      c.training.lambda = SingleValue("--lambda", *options.lambda);
    }
  }
  std::optional<double> eps_e;
  if (options.eps_e) {
    if (list_command) {
      c.sweep.eps_e = ParseDoubleList(*options.eps_e);
      if (c.sweep.eps_e.size() == 1) eps_e = c.sweep.eps_e.front();
    } else {
      eps_e = SingleValue("--eps-e", *options.eps_e);
    }
  }
  if (options.eps_b || eps_e) {
    try {
      c.training.channel = WithEpsilons(c.training.channel, options.eps_b, eps_e);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--eps-b/--eps-e: ") + e.what());
    }
  }
  c.training.model.image_size = c.dataset.image_size;
  c.training.model.code_bits = c.training.channel.total_bits();
  c.Validate();
  return c;
}

int Guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EnumerationBoundError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << "error: checkpoint: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IdxError& e) {
    err << "error: dataset: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int CmdGenData(const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options);
  const fs::path dir = PrepareOutputDir(options, config, "data");
  const DataSplits data = PrepareData(config.dataset);
  SaveDataset(dir / "train.bin", data.train);
  SaveDataset(dir / "test.bin", data.test);

  CsvTable counts("labels/1", {"split", "t_label", "color", "thickness", "count"});
  for (const auto& [name, split] : {std::pair{"train", &data.train}, std::pair{"test", &data.test}}) {
    std::vector<std::size_t> n(kSensitiveClasses, 0);
    for (int t : split->t_labels) ++n[static_cast<std::size_t>(t)];
    for (int t = 0; t < kSensitiveClasses; ++t) {
      CsvTable::Row r;
      r << name << t << ColorOf(t) << ThicknessOf(t) << n[static_cast<std::size_t>(t)];
      counts.Add(r);
    }
  }
  counts.Write(dir / "labels.csv");
  std::vector<std::vector<std::vector<double>>> rows(1);
  for (std::size_t i = 0; i < std::min<std::size_t>(18, data.train.size()); ++i) {
    auto r = data.train.images.row(i);
    rows.front().emplace_back(r.begin(), r.end());
  }
  WriteGrid(dir / "samples.ppm", rows, config.dataset.image_size);
  io.out << "wrote " << data.train.size() << " train and " << data.test.size()
         << " test images to " << dir.string() << "\n";
  return kExitOk;
}

int CmdTrain(const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options);
  const fs::path dir = PrepareOutputDir(options, config, "train");
  const DataSplits data = PrepareData(config.dataset);
  const TrainConfig& t = config.training;
  ConfigTable(config).Write(dir / "config.csv");

  FitResult fit = Fit(t, data.train, [&](const EpochRecord& r, const Models& m) {
    io.out << "epoch " << r.epoch << "  distortion " << Fixed(r.distortion, 3)
           << "  bob bound " << Fixed(r.decoder_bound, 2) << "  eve bound "
           << Fixed(r.eve_bound, 4) << "  eve acc " << Fixed(r.eve_accuracy, 3) << "\n";
    if (config.checkpoint_every > 0 && r.epoch % config.checkpoint_every == 0) {
      SaveModels(dir / ("models_epoch" + std::to_string(r.epoch) + ".ckpt"), m, t);
    }
  });
  HistoryTable(fit.history).Write(dir / "history.csv");
  if (fit.history.aborted) {
    io.err << "numeric failure: " << fit.history.abort_reason << " (partial history in "
           << (dir / "history.csv").string() << ")\n";
    return kExitNumeric;
  }
  SaveModels(dir / "models.ckpt", fit.models, t);
  io.out << "saved " << (dir / "models.ckpt").string() << "\n";
  return kExitOk;
}

int CmdSweep(const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options, true);
  const fs::path dir = PrepareOutputDir(options, config, "sweep");
  const std::vector<SweepCell> cells = SweepCells(config);
  if (cells.empty()) {
    io.err << "warning: empty lambda or eps_e grid; writing an empty table\n";
    PutTable({}).Write(dir / "put.csv");
    WriteFileAtomic(dir / "put.svg", PutPlot({}));
    return kExitOk;
  }
  const DataSplits data = PrepareData(config.dataset);
  ConfigTable(config).Write(dir / "config.csv");
  std::size_t done = 0;
  const auto points = RunSweep(config, data, cells, config.sweep.jobs, [&](const PutPoint& p) {
    ++done;
    io.out << "[" << done << "/" << cells.size() << "] lambda " << FormatDouble(p.cell.lambda)
           << " eps_e " << FormatDouble(p.cell.eps_e) << " rep " << p.cell.replicate << ": "
           << p.status << "  D " << Fixed(p.metrics.test_distortion, 3) << "  leakage "
           << Fixed(p.metrics.mine_leakage_bits, 4) << "  adv acc "
           << Fixed(p.metrics.adversary.t, 3) << "\n";
  });
  PutTable(points).Write(dir / "put.csv");
  WriteFileAtomic(dir / "put.svg", PutPlot(points));
  std::size_t failed = 0;
  for (const auto& p : points) failed += p.status != "ok";
  if (failed > 0) {
    io.err << failed << " of " << points.size() << " cells failed; see put.csv\n";
    return kExitNumeric;
  }
  return kExitOk;
}

int CmdEval(const CommonOptions& options, const fs::path& checkpoint, Io io) {
  const ExperimentConfig config = ResolveConfig(options);
  const Checkpoint ckpt = LoadCheckpoint(checkpoint);
  TrainConfig t = config.training;
  t.model = ModelConfigFromMetadata(ckpt.metadata);
  auto field = [&](const std::string& key) {
    auto it = ckpt.metadata.find(key);
    if (it == ckpt.metadata.end()) throw CheckpointError("missing metadata '" + key + "'");
    return it->second;
  };
  t.channel = ChannelSpec::Parse(field("channel"));
  t.lambda = std::stod(field("lambda"));
  if (t.model.image_size != config.dataset.image_size) {
    throw ConfigError("checkpoint was trained on " + std::to_string(t.model.image_size) +
                      "px images, dataset.image_size is " +
                      std::to_string(config.dataset.image_size));
  }
  Rng rng(0);
  Models models = MakeModels(t, rng);
  UnpackCheckpoint(ckpt, {&models.encoder.network(), &models.decoder.network(),
                          &models.eve.network()});
  const fs::path dir = PrepareOutputDir(options, config, "eval");
  const DataSplits data = PrepareData(config.dataset);
  const EvalReport report =
      EvaluateWithEveDecoder(models, t, data, config.evaluation, DeriveSeed(config.training.seed, 7));
  MetricsTable(t, report).Write(dir / "metrics.csv");
  WriteGrid(dir / "reconstructions.ppm", report.grid, config.dataset.image_size);
  const ModelMetrics& m = report.metrics;
  io.out << "test distortion " << Fixed(m.test_distortion, 3) << "\nleakage (MINE) "
         << Fixed(m.mine_leakage_bits) << " bits" << (m.mine_failed ? " [failed]" : "")
         << "\nadversary acc T " << Fixed(m.adversary.t, 3) << " color "
         << Fixed(m.adversary.color, 3) << " thickness " << Fixed(m.adversary.thickness, 3)
         << "\nT acc on Bob reconstructions " << Fixed(report.bob_recon_accuracy_t, 3)
         << ", on Eve reconstructions " << Fixed(report.eve_recon_accuracy_t, 3) << "\n";
  return m.mine_failed ? kExitNumeric : kExitOk;
}

int CmdParallel(const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options);
  if (config.training.channel.band_count() < 2) {
    throw ConfigError("parallel needs a channel with at least two bands (got " +
                      config.training.channel.ToString() + "); use 'sweep' for a single channel");
  }
  const fs::path dir = PrepareOutputDir(options, config, "parallel");
  const DataSplits data = PrepareData(config.dataset);
  ConfigTable(config).Write(dir / "config.csv");
  std::vector<ParallelRun> runs;
  std::vector<PutPoint> overall;
  for (std::size_t r = 0; r < config.sweep.replicates; ++r) {
    runs.push_back(RunParallel(config, data, r));
    overall.push_back(runs.back().overall);
    WriteGrid(dir / ("reconstructions_rep" + std::to_string(r) + ".ppm"), runs.back().grid,
              config.dataset.image_size);
    for (const auto& b : runs.back().bands) {
      io.out << "rep " << r << " band " << b.band << " (" << FormatDouble(b.spec.epsilon_b)
             << ", " << FormatDouble(b.spec.epsilon_e) << "): leakage "
             << Fixed(b.mine_leakage_bits) << "  acc T " << Fixed(b.adversary.t, 3)
             << " color " << Fixed(b.adversary.color, 3) << " thickness "
             << Fixed(b.adversary.thickness, 3) << "\n";
    }
  }
  BandTable(runs).Write(dir / "bands.csv");
  BandMeanTable(runs).Write(dir / "bands_mean.csv");
  PutTable(overall).Write(dir / "overall.csv");
  PlotSeries leak{"mean leakage", {}, {}};
  for (std::size_t b = 0; b < runs.front().bands.size(); ++b) {
    double sum = 0.0;
    for (const auto& run : runs) sum += run.bands[b].mine_leakage_bits;
    leak.x.push_back(static_cast<double>(b));
    leak.y.push_back(sum / static_cast<double>(runs.size()));
  }
  WriteFileAtomic(dir / "bands.svg",
                  LinePlotSvg("Per-band leakage", "band", "I(T; Y_E band) [bits]", {leak}));
  return kExitOk;
}

int CmdOracle(const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options, true);
  const OracleSection& o = config.oracle;
  DiscreteSystem sys = MakeDiscreteSystem(
      o.system == "random" ? DiscreteKind::kRandom : DiscreteKind::kCorrelatedBits,
      o.system_seed, o.discrete);
  ChannelSpec spec;
  if (!o.bands.empty()) {
    spec = ChannelSpec::Parse(o.bands);
  } else {
    const BandSpec& b = config.training.channel.bands().front();
    spec = ChannelSpec::SingleBand(sys.code_bits, b.epsilon_b, b.epsilon_e);
  }
  CheckEnumerationBound(sys.s_size, spec.total_bits());
  if (spec.total_bits() != sys.code_bits) {
    if (spec.total_bits() > kMaxDiscreteCodeBits) {
      throw ConfigError("oracle channel has " + std::to_string(spec.total_bits()) +
                        " bits, at most " + std::to_string(kMaxDiscreteCodeBits) +
                        " are enumerable");
    }
    // The oracle optimizes its own encoder; only the code length matters.
    sys.code_bits = spec.total_bits();
    sys.encoder.assign(sys.s_size * sys.code_size(), 1.0 / static_cast<double>(sys.code_size()));
  }
  bool funnel = true;
  for (const auto& b : spec.bands()) funnel = funnel && b.epsilon_b == b.epsilon_e;
  const std::string regime = funnel ? "privacy-funnel regime" : "wiretap regime";
  const fs::path dir = PrepareOutputDir(options, config, "oracle");
  if (o.lambdas.empty()) io.err << "warning: empty lambda grid; writing an empty frontier\n";

  const auto points = FrontierSweep(sys, spec, o.lambdas, o.options);
  CsvTable frontier("frontier/1", {"lambda", "distortion", "mi_bob", "mi_eve_leakage",
                                   "objective", "restarts_used", "regime"});
  CsvTable band_mi("frontier_bands/1", {"lambda", "band", "eps_b", "eps_e", "mi_t_eve_band",
                                        "mi_t_bob_band"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    const FrontierPoint& p = points[i];
    CsvTable::Row r;
    r << p.lambda << p.distortion << p.mi_bob << p.mi_eve << p.objective << p.restarts_used
      << regime;
    frontier.Add(r);
    if (spec.band_count() > 1) {
      const OracleResult best = OptimizeExact(sys, spec, p.lambda, o.options);
      const std::vector<double> table = best.encoder.Probabilities();
      for (std::size_t b = 0; b < spec.band_count(); ++b) {
        CsvTable::Row br;
        br << p.lambda << b << spec.bands()[b].epsilon_b << spec.bands()[b].epsilon_e
           << ExactBandMiBits(sys, table, spec, b, Observer::kEve, true)
           << ExactBandMiBits(sys, table, spec, b, Observer::kBob, true);
        band_mi.Add(br);
      }
    }
  }
  frontier.Write(dir / "frontier.csv");
  if (spec.band_count() > 1) band_mi.Write(dir / "frontier_bands.csv");
  PlotSeries leak{"I(T; Y_E)", {}, {}}, bob{"I(S; Y_B)", {}, {}};
  for (const auto& p : points) {
    leak.x.push_back(p.lambda);
    leak.y.push_back(p.mi_eve);
    bob.x.push_back(p.lambda);
    bob.y.push_back(p.mi_bob);
  }
  WriteFileAtomic(dir / "frontier.svg",
                  LinePlotSvg("Exact frontier (" + regime + ")", "lambda", "bits", {leak, bob}));

  io.out << "channel " << spec.ToString() << ": " << regime << "\n";
  io.out << "lambda      distortion  I(S;Y_B)    I(T;Y_E)\n";
  for (const auto& p : points) {
    io.out << std::left << std::setw(12) << FormatDouble(p.lambda) << std::setw(12)
           << Fixed(p.distortion) << std::setw(12) << Fixed(p.mi_bob) << Fixed(p.mi_eve)
           << "\n";
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].lambda > points[i - 1].lambda &&
        points[i].mi_eve > points[i - 1].mi_eve + 1e-3) {
      io.err << "warning: leakage rises from lambda " << FormatDouble(points[i - 1].lambda)
             << " to " << FormatDouble(points[i].lambda)
             << "; more restarts may be needed\n";
    }
  }
  return kExitOk;
}

int CmdGradCheck(bool corrupt, const CommonOptions& options, Io io) {
  const ExperimentConfig config = ResolveConfig(options);
  const auto checks = RunGradCheckSuite(corrupt);
  CsvTable t("gradcheck/1", {"check", "coordinates", "max_relative_error", "worst_parameter",
                             "tolerance", "passed"});
  bool all = true;
  for (const auto& c : checks) {
    all = all && c.report.passed;
    io.out << (c.report.passed ? "PASS " : "FAIL ") << std::left << std::setw(22) << c.name
           << " max rel err " << std::scientific << std::setprecision(2)
           << c.report.max_relative_error << std::defaultfloat << "  ("
           << c.report.coordinates_checked << " coords)\n";
    CsvTable::Row r;
    char err[32];
    std::snprintf(err, sizeof(err), "%.3e", c.report.max_relative_error);
    r << c.name << c.report.coordinates_checked << std::string(err)
      << c.report.worst_parameter << c.report.tolerance << static_cast<int>(c.report.passed);
    t.Add(r);
  }
  const fs::path dir = PrepareOutputDir(options, config, "gradcheck");
  t.Write(dir / "gradcheck.csv");
  io.out << (all ? "all gradient checks passed" : "gradient check FAILED") << "\n";
  return all ? kExitOk : kExitNumeric;
}

}  // namespace wiretap::app
