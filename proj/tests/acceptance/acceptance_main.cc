// Acceptance runner: `wiretap_acceptance <criterion>` prints one PASS/FAIL
// line for that criterion (all of them when no name is given) and exits
// nonzero on any failure. Learned-system criteria read configs/desk_*.ini.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mi_oracle.h"
#include "wiretap/channel.h"
#include "wiretap/discrete_system.h"
#include "wiretap/mi.h"
#include "wiretap/mine.h"
#include "wiretap/oracle.h"
#include "wiretap_app/commands.h"
#include "wiretap_app/config.h"
#include "wiretap_app/experiments.h"
#include "wiretap_app/gradcheck_suite.h"

#ifndef WIRETAP_CONFIG_DIR
#error "WIRETAP_CONFIG_DIR must point at configs/"
#endif

namespace {

using namespace wiretap;
using namespace wiretap::app;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "VIOLATED ") + what;
  }
};

std::string Num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string Sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

ExperimentConfig DeskConfig(const std::string& name) {
  return LoadConfig(fs::path(WIRETAP_CONFIG_DIR) / name);
}

struct RandomCase {
  DiscreteSystem sys;
  ChannelSpec spec;
};

RandomCase MakeCase(std::uint64_t seed) {
  RandomCase c{MakeDiscreteSystem(DiscreteKind::kRandom, seed), {}};
  Rng rng(DeriveSeed(seed, 1));
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<BandSpec> bands;
  for (std::size_t i = 0; i < c.sys.code_bits; ++i) bands.push_back({1, u(rng), u(rng)});
  c.spec = ChannelSpec(bands);
  return c;
}

std::vector<double> RandomRows(std::size_t rows, std::size_t cols, Rng& rng) {
  std::gamma_distribution<double> g(0.5, 1.0);
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += t[r * cols + c] = g(rng) + 1e-12;
    for (std::size_t c = 0; c < cols; ++c) t[r * cols + c] /= total;
  }
  return t;
}

Outcome BoundValidity() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(2024);
  double worst_slack = 1e300, worst_gap = 0.0;
  const std::size_t systems = 200;
  for (std::uint64_t seed = 0; seed < systems; ++seed) {
    const RandomCase c = MakeCase(seed);
    const double ib = ExactMi(c.sys, c.spec, MiPair::kSourceBob).value_bits;
    const double ie = ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits;
    for (int k = 0; k < 5; ++k) {
      const auto dec = RandomRows(c.sys.code_size(), c.sys.s_size, rng);
      const auto cls = RandomRows(c.sys.code_size(), c.sys.t_size, rng);
      worst_slack = std::min(worst_slack, ib - TabularDecoderBound(c.sys, c.spec, dec).value_bits);
      worst_slack = std::min(worst_slack, ie - TabularEveBound(c.sys, c.spec, cls).value_bits);
    }
    worst_gap = std::max(
        worst_gap,
        std::abs(ib - TabularDecoderBound(c.sys, c.spec, SourcePosteriorGivenBob(c.sys, c.spec)).value_bits));
    worst_gap = std::max(
        worst_gap,
        std::abs(ie - TabularEveBound(c.sys, c.spec, SensitivePosteriorGivenEve(c.sys, c.spec)).value_bits));
  }
  const double secs = Seconds(start);
  Outcome o;
  o.Require(worst_slack >= -1e-9, std::to_string(systems) + " systems x 5 tables, min slack " + Sci(worst_slack) + " >= -1e-9");
  o.Require(worst_gap <= 1e-9, "posterior plug-in gap " + Sci(worst_gap) + " <= 1e-9");
  o.Require(secs < 60, "runtime " + Num(secs, 1) + " s < 60 s");
  return o;
}

Outcome ExactMiChecks() {
  Outcome o;
  DiscreteOptions one;
  one.source_bits = 1;
  const DiscreteSystem bit = MakeDiscreteSystem(DiscreteKind::kCorrelatedBits, 1, one);
  const double i01 = ExactMi(bit, ChannelSpec::SingleBand(1, 0.1, 0.1), MiPair::kSourceBob).value_bits;
  const double closed = 1.0 - oracle::H2(0.1);
  o.Require(std::abs(i01 - closed) <= 1e-9 && std::abs(i01 - 0.5310) < 5e-5,
            "BSC(0.1) identity I = " + Num(i01, 10) + " vs 1-h2(0.1) = " + Num(closed, 10));
  double worst_half = 0.0, worst_dpi = 1e300;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const RandomCase c = MakeCase(seed);
    const ChannelSpec half = ChannelSpec::SingleBand(c.sys.code_bits, 0.5, 0.5);
    for (MiPair p : {MiPair::kSourceBob, MiPair::kSensitiveEve, MiPair::kCodewordEve, MiPair::kSourceEve}) {
      worst_half = std::max(worst_half, std::abs(ExactMi(c.sys, half, p).value_bits));
    }
    const double te = ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits;
    const double se = ExactMi(c.sys, c.spec, MiPair::kSourceEve).value_bits;
    const double xe = ExactMi(c.sys, c.spec, MiPair::kCodewordEve).value_bits;
    worst_dpi = std::min({worst_dpi, se - te, xe - se});
  }
  o.Require(worst_half <= 1e-9, "eps = 0.5 max |I| = " + Sci(worst_half));
  o.Require(worst_dpi >= -1e-9, "DPI chain min margin " + Sci(worst_dpi) + " over 200 systems");
  return o;
}

Outcome Gradients() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  double worst = 0.0;
  for (const NamedCheck& c : RunGradCheckSuite()) {
    worst = std::max(worst, c.report.max_relative_error);
    if (!c.report.passed) o.Require(false, c.name + " rel err " + Sci(c.report.max_relative_error));
  }
  const double secs = Seconds(start);
  o.Require(worst < 1e-4, "worst relative error " + Sci(worst) + " < 1e-4");
  o.Require(secs < 30, "runtime " + Num(secs, 1) + " s < 30 s");
  return o;
}

Outcome ChannelStatistics() {
  Outcome o;
  Rng rng(99);
  const std::size_t n = 100000;
  for (double eps : {0.001, 0.1, 0.2, 0.3, 0.5}) {
    Codeword x{std::vector<std::uint8_t>(n)};
    for (std::size_t i = 0; i < n; ++i) x.bits[i] = i % 2;
    const Codeword y = BscSample(x, eps, rng);
    double flips = 0;
    for (std::size_t i = 0; i < n; ++i) flips += x.bits[i] != y.bits[i];
    const double rate = flips / n, sigma = std::sqrt(eps * (1 - eps) / n);
    o.Require(std::abs(rate - eps) <= 3 * sigma,
              "eps " + Num(eps, 3) + ": rate " + Num(rate, 5) + " (3 sigma " + Num(3 * sigma, 5) + ")");
  }
  double worst = 0.0;
  for (std::size_t bits = 1; bits <= 6; ++bits) {
    const std::size_t m = std::size_t{1} << bits;
    for (double eps : {0.001, 0.1, 0.3, 0.5}) {
      for (std::size_t xi = 0; xi < m; ++xi) {
        Codeword x{std::vector<std::uint8_t>(bits)};
        for (std::size_t i = 0; i < bits; ++i) x.bits[i] = (xi >> i) & 1;
        double total = 0.0;
        for (std::size_t yi = 0; yi < m; ++yi) {
          Codeword y{std::vector<std::uint8_t>(bits)};
          for (std::size_t i = 0; i < bits; ++i) y.bits[i] = (yi >> i) & 1;
          total += std::exp(BscLogLikelihood(x, y, eps));
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
  }
  o.Require(worst <= 1e-12, "likelihood normalization error " + Sci(worst) + " for n <= 6");
  return o;
}

MiReport Mine(std::size_t classes, const std::vector<int>& t, const Tensor& y, std::uint64_t seed) {
  Rng rng(seed);
  MineConfig cfg;
  MineNet net(classes, y.cols(), cfg.hidden, rng);
  return MineEstimate(net, t, y, cfg, rng);
}

Outcome MineCalibration() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  const std::size_t n = 10000;
  Rng rng(7);
  std::uniform_int_distribution<int> nine(0, 8), bit(0, 1);
  std::bernoulli_distribution flip(0.1), coin(0.5);

  std::vector<int> t(n);
  Tensor y = Tensor::Matrix(n, 16);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = nine(rng);
    for (std::size_t c = 0; c < 16; ++c) y.at(i, c) = coin(rng);
  }
  const MiReport ind = Mine(9, t, y, 1);
  o.Require(!ind.failed && ind.value_bits <= 0.05, "independent " + Num(ind.value_bits) + " <= 0.05");

  Tensor yb = Tensor::Matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = bit(rng);
    yb.at(i, 0) = t[i] ^ static_cast<int>(flip(rng));
  }
  const double dsbs_exact = 1.0 - oracle::H2(0.1);
  const MiReport dsbs = Mine(2, t, yb, 2);
  o.Require(!dsbs.failed && std::abs(dsbs.value_bits - dsbs_exact) <= 0.05,
            "DSBS(0.1) " + Num(dsbs.value_bits) + " vs " + Num(dsbs_exact));

  Tensor yc = Tensor::Matrix(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = nine(rng);
    yc.at(i, static_cast<std::size_t>(t[i])) = 1.0;
  }
  const MiReport copy = Mine(9, t, yc, 3);
  o.Require(!copy.failed && std::abs(copy.value_bits - std::log2(9.0)) <= 0.1,
            "9-class copy " + Num(copy.value_bits) + " vs " + Num(std::log2(9.0)));
  const double secs = Seconds(start);
  o.Require(secs < 300, "runtime " + Num(secs, 1) + " s < 300 s");
  return o;
}

Outcome OracleFrontier() {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kCorrelatedBits, 1);
  const std::vector<double> lambdas{0, 0.5, 1, 2, 5, 10, 20, 50};
  OracleOptions opts;  // 16 restarts
  for (const auto& [eb, ee] : std::vector<std::pair<double, double>>{{0.0, 0.0}, {0.1, 0.3}}) {
    const ChannelSpec spec = ChannelSpec::SingleBand(2, eb, ee);
    const auto pts = FrontierSweep(sys, spec, lambdas, opts);
    double worst_rise = -1e300;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      worst_rise = std::max(worst_rise, pts[i].mi_eve - pts[i - 1].mi_eve);
    }
    o.Require(worst_rise <= 1e-3, "channel " + spec.ToString() + ": largest leakage rise " +
                                      Sci(worst_rise) + " <= 1e-3");
    if (eb == 0.0 && ee == 0.0) {
      const FrontierPoint& last = pts.back();
      o.Require(last.mi_eve < 0.01, "lambda 50 leakage " + Sci(last.mi_eve) + " < 0.01");
      o.Require(last.mi_bob >= 1.0 - 1e-9, "lambda 50 I(S;Y_B) " + Num(last.mi_bob, 9) + " >= 1");
    }
  }
  const double secs = Seconds(start);
  o.Require(secs < 300, "runtime " + Num(secs, 1) + " s < 300 s");
  return o;
}

// Mean over replicates of a metric for (lambda, eps_e).
double CellMean(const std::vector<PutPoint>& pts, double lambda, double eps_e,
                double ModelMetrics::*field) {
  double sum = 0.0;
  int count = 0;
  for (const auto& p : pts) {
    if (p.cell.lambda == lambda && p.cell.eps_e == eps_e) {
      sum += p.metrics.*field;
      ++count;
    }
  }
  return count ? sum / count : std::nan("");
}

Outcome LearnedPut() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = DeskConfig("desk_put.ini");
  const DataSplits data = PrepareData(config.dataset);
  const auto cells = SweepCells(config);
  const auto pts = RunSweep(config, data, cells, config.sweep.jobs, [](const PutPoint& p) {
    std::cout << "  cell lambda " << Num(p.cell.lambda, 0) << " eps_e " << Num(p.cell.eps_e, 1)
              << " rep " << p.cell.replicate << ": " << p.status << " D "
              << Num(p.metrics.test_distortion, 2) << " leak " << Num(p.metrics.mine_leakage_bits)
              << " adv " << Num(p.metrics.adversary.t, 3) << std::endl;
  });
  Outcome o;
  bool all_ok = true;
  for (const auto& p : pts) all_ok = all_ok && p.status == "ok" && !p.metrics.mine_failed;
  o.Require(all_ok, "all " + std::to_string(pts.size()) + " cells trained and estimated");
  for (double ee : config.sweep.eps_e) {
    const double l0 = CellMean(pts, 0, ee, &ModelMetrics::mine_leakage_bits);
    const double l20 = CellMean(pts, 20, ee, &ModelMetrics::mine_leakage_bits);
    const double d0 = CellMean(pts, 0, ee, &ModelMetrics::test_distortion);
    const double d20 = CellMean(pts, 20, ee, &ModelMetrics::test_distortion);
    o.Require(l20 < 0.5 * l0, "eps_e " + Num(ee, 1) + ": leak(20)/leak(0) = " + Num(l20) + "/" +
                                  Num(l0) + " = " + Num(l20 / l0, 3) + " < 0.5");
    o.Require(d20 > d0, "eps_e " + Num(ee, 1) + ": D(20) " + Num(d20, 2) + " > D(0) " + Num(d0, 2));
  }
  for (double lambda : config.sweep.lambdas) {
    const double quiet = CellMean(pts, lambda, 0.0, &ModelMetrics::mine_leakage_bits);
    const double noisy = CellMean(pts, lambda, 0.3, &ModelMetrics::mine_leakage_bits);
    o.Require(noisy <= quiet, "lambda " + Num(lambda, 0) + ": leak(eps_e 0.3) " + Num(noisy) +
                                  " <= leak(eps_e 0) " + Num(quiet));
  }
  const double secs = Seconds(start);
  o.Require(secs < 3600, "runtime " + Num(secs / 60, 1) + " min < 60 min");
  return o;
}

Outcome ParallelRouting() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig config = DeskConfig("desk_parallel.ini");
  const DataSplits data = PrepareData(config.dataset);
  const std::size_t bands = config.training.channel.band_count();
  std::vector<double> leak(bands, 0.0);
  bool all_ok = true;
  for (std::size_t r = 0; r < config.sweep.replicates; ++r) {
    const ParallelRun run = RunParallel(config, data, r);
    all_ok = all_ok && run.overall.status == "ok";
    std::cout << "  replicate " << r << ":";
    for (const auto& b : run.bands) {
      leak[b.band] += b.mine_leakage_bits / static_cast<double>(config.sweep.replicates);
      all_ok = all_ok && !b.mine_failed;
      std::cout << " band" << b.band << " " << Num(b.mine_leakage_bits);
    }
    std::cout << std::endl;
  }
  // Bands ordered as in the table: (0.1,0.1) (0.001,0.2) (0.2,0.001) (0.001,0.001).
  Outcome o;
  o.Require(all_ok, "all replicates trained and estimated");
  std::string means;
  for (std::size_t b = 0; b < bands; ++b) means += (b ? " " : "") + Num(leak[b]);
  o.Require(leak[1] > leak[2], "mean leakage per band [" + means + "]; (0.001,0.2) band exceeds (0.2,0.001) band");
  bool minimal = true;
  for (std::size_t b = 0; b < bands; ++b) minimal = minimal && leak[2] <= leak[b];
  o.Require(minimal, "(0.2,0.001) band is the minimum");
  const double secs = Seconds(start);
  o.Require(secs < 1800, "runtime " + Num(secs / 60, 1) + " min < 30 min");
  return o;
}

Outcome EveConfusion() {
  const ExperimentConfig config = DeskConfig("desk_put.ini");
  const DataSplits data = PrepareData(config.dataset);
  SweepCell cell;
  cell.lambda = 20;
  cell.eps_b = config.training.channel.bands().front().epsilon_b;
  cell.eps_e = config.training.channel.bands().front().epsilon_e;
  cell.seed = DeriveSeed(config.training.seed, 0);
  const TrainConfig t = CellTrainConfig(config, cell);
  FitResult fit = Fit(t, data.train);
  Outcome o;
  o.Require(!fit.history.aborted, "lambda 20 model trained (eps_e " + Num(cell.eps_e, 1) + ")");
  if (fit.history.aborted) return o;
  const EvalReport r =
      EvaluateWithEveDecoder(fit.models, t, data, config.evaluation, DeriveSeed(cell.seed, 7));
  o.Require(r.eve_recon_accuracy_t < 0.22,
            "T accuracy on Eve-decoder reconstructions " + Num(r.eve_recon_accuracy_t, 3) + " < 0.22");
  o.Require(r.bob_recon_accuracy_t > 0.80,
            "T accuracy on Bob reconstructions " + Num(r.bob_recon_accuracy_t, 3) + " > 0.80");
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome Reproducibility() {
  const fs::path root = fs::temp_directory_path() / "wiretap_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ofstream(root / "small.ini") << "[dataset]\nimage_size = 8\ntrain_count = 180\n"
                                       "test_count = 120\n[channel]\nbands = 8:0.001:0.2,8:0.2:0.001\n"
                                       "[training]\nepochs = 2\nbatch_size = 60\nencoder_hidden = 16\n"
                                       "decoder_hidden = 16\neve_hidden = 8\n[evaluation]\n"
                                       "mine_epochs = 2\nmine_draws = 10\nmine_hidden = 16\n"
                                       "decoder_epochs = 2\nadversary_epochs = 2\n[sweep]\n"
                                       "lambdas = 0,10\neps_e = 0,0.3\njobs = 2\n";
  using Command = std::function<int(const CommonOptions&, Io)>;
  const std::vector<std::pair<std::string, Command>> commands{
      {"data", CmdGenData},
      {"train", CmdTrain},
      {"eval", [&](const CommonOptions& o, Io io) {
         return CmdEval(o, fs::path(o.out_dir).parent_path() / "train" / "models.ckpt", io);
       }},
      {"sweep", CmdSweep},
      {"parallel", CmdParallel},
      {"oracle", CmdOracle},
      {"gradcheck", [](const CommonOptions& o, Io io) { return CmdGradCheck(false, o, io); }}};
  Outcome o;
  std::ostringstream sink;
  for (const char* run : {"first", "second"}) {
    for (const auto& [name, cmd] : commands) {
      CommonOptions opts;
      opts.config_path = (root / "small.ini").string();
      opts.out_dir = (root / run / name).string();
      opts.seed = 5;
      const int code = Guarded(sink, [&] { return cmd(opts, Io{sink, sink}); });
      if (code != kExitOk) o.Require(false, name + " exited " + std::to_string(code));
    }
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(root / "first")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "first");
    ++compared;
    if (Slurp(entry.path()) != Slurp(root / "second" / rel)) {
      o.Require(false, rel.string() + " differs");
    }
  }
  o.Require(compared >= 20, std::to_string(compared) + " artifacts (CSV, SVG, PPM, checkpoints) byte-identical across reruns");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& Criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> c{
      {"bound_validity", BoundValidity},     {"exact_mi", ExactMiChecks},
      {"gradient_suite", Gradients},         {"channel_statistics", ChannelStatistics},
      {"mine_calibration", MineCalibration}, {"oracle_frontier", OracleFrontier},
      {"learned_put_trend", LearnedPut},     {"parallel_routing", ParallelRouting},
      {"eve_confusion", EveConfusion},       {"reproducibility", Reproducibility}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  if (wanted.empty()) {
    for (const auto& [name, fn] : Criteria()) wanted.push_back(name);
  }
  int failures = 0;
  for (const std::string& name : wanted) {
    auto it = std::find_if(Criteria().begin(), Criteria().end(),
                           [&](const auto& c) { return c.first == name; });
    if (it == Criteria().end()) {
      std::cerr << "unknown criterion '" << name << "'; known:";
      for (const auto& c : Criteria()) std::cerr << " " << c.first;
      std::cerr << "\n";
      return 1;
    }
    Outcome out;
    try {
      out = it->second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
    failures += !out.pass;
  }
  return failures == 0 ? 0 : 1;
}
