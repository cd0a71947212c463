#include "wiretap_app/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "wiretap/idx.h"
#include "wiretap/mi.h"

namespace wiretap::app {
namespace {

Dataset Slice(const Dataset& d, std::size_t begin, std::size_t count) {
  std::vector<std::size_t> idx(count);
  std::iota(idx.begin(), idx.end(), begin);
  return d.Subset(idx);
}

std::vector<std::vector<double>> RowsOf(const Tensor& t, std::size_t count) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < std::min(count, t.rows()); ++i) {
    auto r = t.row(i);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

ClassifierConfig AdversaryConfig(const EvaluationSection& evaluation, const TrainConfig& config) {
  ClassifierConfig c = evaluation.adversary;
  c.hidden = config.model.eve_hidden;
  return c;
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string SeedText(std::uint64_t s) { return std::to_string(s); }

}  // namespace

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

DataSplits PrepareData(const DatasetSection& dataset) {
  DataSplits out;
  if (!dataset.cache_dir.empty()) {
    const std::filesystem::path dir = dataset.cache_dir;
    out.train = LoadDataset(dir / "train.bin");
    out.test = LoadDataset(dir / "test.bin");
    if (out.train.height != dataset.image_size || out.test.height != dataset.image_size) {
      throw ConfigError("cached dataset in " + dir.string() + " is " +
                        std::to_string(out.train.height) + "px, config asks for " +
                        std::to_string(dataset.image_size));
    }
    return out;
  }
  const std::size_t total = dataset.train_count + dataset.test_count;
  std::vector<GlyphSample> samples;
  if (dataset.source == "idx") {
    samples = LoadIdxAndColorize(dataset.idx_images, dataset.idx_labels, dataset.image_size,
                                 dataset.seed);
    if (samples.size() < total) {
      throw ConfigError("IDX file has " + std::to_string(samples.size()) +
                        " images, need " + std::to_string(total));
    }
    samples.resize(total);
  } else {
    samples = GenerateGlyphs(total, dataset.image_size, dataset.seed);
  }
  const Dataset all = ToDataset(samples);
  out.train = Slice(all, 0, dataset.train_count);
  out.test = Slice(all, dataset.train_count, dataset.test_count);
  return out;
}

StackedObservations TransmitRepeated(EncoderModel& encoder, const Dataset& data,
                                     const ChannelSpec& spec, std::size_t draws, Rng& rng) {
  const std::size_t n = data.size(), w = spec.total_bits();
  StackedObservations out{Tensor::Matrix(n * draws, w), Tensor::Matrix(n * draws, w), {}};
  out.labels.reserve(n * draws);
  for (std::size_t d = 0; d < draws; ++d) {
    const ChannelOutputs o = Transmit(encoder, data.images, spec, rng);
    std::copy(o.bob.values().begin(), o.bob.values().end(),
              out.bob.values().begin() + static_cast<std::ptrdiff_t>(d * n * w));
    std::copy(o.eve.values().begin(), o.eve.values().end(),
              out.eve.values().begin() + static_cast<std::ptrdiff_t>(d * n * w));
    out.labels.insert(out.labels.end(), data.t_labels.begin(), data.t_labels.end());
  }
  return out;
}

ModelMetrics EvaluateModels(Models& models, const TrainConfig& config, const DataSplits& data,
                            const EvaluationSection& evaluation, std::uint64_t seed) {
  ModelMetrics m;
  Rng rng(seed);
  const ChannelOutputs test_out = Transmit(models.encoder, data.test.images, config.channel, rng);
  const Tensor recon = models.decoder.Decode(test_out.bob, false);
  m.test_distortion = MeanImageDistortion(recon, data.test.images);
  m.decoder_bound_bits = BernoulliLogLikelihoodBits(recon, data.test.images);

  const StackedObservations stacked =
      TransmitRepeated(models.encoder, data.test, config.channel, evaluation.mine_draws, rng);
  const MiReport mine =
      MineLeakage(stacked.labels, stacked.eve, evaluation.mine, DeriveSeed(seed, 1));
  m.mine_leakage_bits = mine.value_bits;
  m.mine_failed = mine.failed;
  m.mine_note = mine.note;

  const ChannelOutputs train_out =
      Transmit(models.encoder, data.train.images, config.channel, rng);
  m.adversary = TrainAndScoreClassifier(train_out.eve, data.train.t_labels, test_out.eve,
                                        data.test.t_labels, AdversaryConfig(evaluation, config),
                                        DeriveSeed(seed, 2));
  return m;
}

std::vector<SweepCell> SweepCells(const ExperimentConfig& config) {
  std::vector<SweepCell> cells;
  const double eps_b = config.training.channel.bands().front().epsilon_b;
  for (double eps_e : config.sweep.eps_e) {
    for (double lambda : config.sweep.lambdas) {
      for (std::size_t r = 0; r < config.sweep.replicates; ++r) {
        cells.push_back({lambda, eps_b, eps_e, r, DeriveSeed(config.training.seed, r)});
      }
    }
  }
  return cells;
}

TrainConfig CellTrainConfig(const ExperimentConfig& config, const SweepCell& cell) {
  TrainConfig t = config.training;
  t.lambda = cell.lambda;
  t.seed = cell.seed;
  std::vector<BandSpec> bands = t.channel.bands();
  for (auto& b : bands) {
    b.epsilon_b = cell.eps_b;
    b.epsilon_e = cell.eps_e;
  }
  t.channel = ChannelSpec(bands);
  return t;
}

PutPoint RunPutCell(const ExperimentConfig& config, const DataSplits& data,
                    const SweepCell& cell) {
  PutPoint p;
  p.cell = cell;
  const double nan = std::nan("");
  p.metrics = {nan, nan, nan, true, "", {nan, nan, nan}};
  try {
    const TrainConfig t = CellTrainConfig(config, cell);
    FitResult fit = Fit(t, data.train);
    p.epochs_completed = fit.history.epochs.size();
    if (fit.history.aborted) {
      p.status = "aborted";
      p.note = fit.history.abort_reason;
      return p;
    }
    p.metrics = EvaluateModels(fit.models, t, data, config.evaluation, DeriveSeed(cell.seed, 7));
    if (p.metrics.mine_failed) p.note = p.metrics.mine_note;
  } catch (const std::exception& e) {
    p.status = "failed";
    p.note = e.what();
  }
  return p;
}

std::vector<PutPoint> RunSweep(const ExperimentConfig& config, const DataSplits& data,
                               const std::vector<SweepCell>& cells, std::size_t jobs,
                               const CellDone& on_done) {
  std::vector<PutPoint> results(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex done_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      results[i] = RunPutCell(config, data, cells[i]);
      if (on_done) {
        std::lock_guard<std::mutex> lock(done_mu);
        on_done(results[i]);
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(cells.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return results;
}

CsvTable PutTable(const std::vector<PutPoint>& points) {
  CsvTable t("put/1", {"lambda", "eps_b", "eps_e", "replicate", "seed", "status",
                       "epochs_completed", "test_distortion", "decoder_bound_bits",
                       "mine_leakage_bits", "mine_failed", "adv_acc_t", "adv_acc_color",
                       "adv_acc_thickness", "note"});
  for (const auto& p : points) {
    CsvTable::Row r;
    r << p.cell.lambda << p.cell.eps_b << p.cell.eps_e << p.cell.replicate
      << SeedText(p.cell.seed) << p.status << p.epochs_completed << p.metrics.test_distortion
      << p.metrics.decoder_bound_bits << p.metrics.mine_leakage_bits
      << static_cast<int>(p.metrics.mine_failed) << p.metrics.adversary.t
      << p.metrics.adversary.color << p.metrics.adversary.thickness << p.note;
    t.Add(r);
  }
  return t;
}

std::string PutPlot(const std::vector<PutPoint>& points) {
  // eps_e -> lambda -> (distortions, leakages)
  std::map<double, std::map<double, std::pair<std::vector<double>, std::vector<double>>>> acc;
  for (const auto& p : points) {
    if (p.status != "ok" || p.metrics.mine_failed) continue;
    auto& cell = acc[p.cell.eps_e][p.cell.lambda];
    cell.first.push_back(p.metrics.test_distortion);
    cell.second.push_back(p.metrics.mine_leakage_bits);
  }
  std::vector<PlotSeries> series;
  for (const auto& [eps_e, by_lambda] : acc) {
    PlotSeries s{"eps_E = " + FormatDouble(eps_e), {}, {}};
    for (const auto& [lambda, v] : by_lambda) {
      s.x.push_back(Mean(v.first));
      s.y.push_back(Mean(v.second));
    }
    series.push_back(std::move(s));
  }
  return LinePlotSvg("Privacy-utility trade-off", "distortion per image",
                     "leakage I(T; Y_E) [bits]", series);
}

ParallelRun RunParallel(const ExperimentConfig& config, const DataSplits& data,
                        std::size_t replicate) {
  const ChannelSpec& spec = config.training.channel;
  if (spec.band_count() < 2) {
    throw ConfigError("parallel needs a channel with at least two bands (got " +
                      spec.ToString() + "); use 'sweep' for a single channel");
  }
  ParallelRun run;
  run.overall.cell = {config.training.lambda, spec.bands()[0].epsilon_b,
                      spec.bands()[0].epsilon_e, replicate,
                      DeriveSeed(config.training.seed, replicate)};
  TrainConfig t = config.training;
  t.seed = run.overall.cell.seed;
  FitResult fit = Fit(t, data.train);
  run.overall.epochs_completed = fit.history.epochs.size();
  if (fit.history.aborted) {
    throw NumericError("training aborted: " + fit.history.abort_reason);
  }
  Models& models = fit.models;
  const std::uint64_t eval_seed = DeriveSeed(t.seed, 7);
  run.overall.metrics = EvaluateModels(models, t, data, config.evaluation, eval_seed);

  Rng rng(DeriveSeed(t.seed, 11));
  const StackedObservations stacked =
      TransmitRepeated(models.encoder, data.test, spec, config.evaluation.mine_draws, rng);
  const ChannelOutputs test_out = Transmit(models.encoder, data.test.images, spec, rng);
  const ChannelOutputs train_out = Transmit(models.encoder, data.train.images, spec, rng);
  const std::size_t columns = config.evaluation.grid_columns;
  EveDecoder eve_decoder = TrainEveDecoder(models.encoder, data.train, t,
                                           config.evaluation.decoder_epochs,
                                           DeriveSeed(t.seed, 12));
  run.grid.push_back(RowsOf(data.test.images, columns));
  run.grid.push_back(RowsOf(models.decoder.Decode(test_out.bob, false), columns));
  run.grid.push_back(RowsOf(eve_decoder.Decode(test_out.eve, false), columns));

  for (std::size_t b = 0; b < spec.band_count(); ++b) {
    BandReport br;
    br.band = b;
    br.spec = spec.bands()[b];
    const MiReport mine = MineLeakage(stacked.labels, BandColumns(stacked.eve, spec, b),
                                      config.evaluation.mine, DeriveSeed(t.seed, 20 + b));
    br.mine_leakage_bits = mine.value_bits;
    br.mine_failed = mine.failed;
    br.adversary = TrainAndScoreClassifier(
        BandColumns(train_out.eve, spec, b), data.train.t_labels,
        BandColumns(test_out.eve, spec, b), data.test.t_labels,
        AdversaryConfig(config.evaluation, t), DeriveSeed(t.seed, 40 + b));
    DecoderModel band_decoder =
        TrainDecoderOnObservation(models.encoder, data.train, t,
                                  ObservationView{Observer::kBob, static_cast<int>(b)},
                                  config.evaluation.decoder_epochs, DeriveSeed(t.seed, 60 + b));
    const Tensor band_recon =
        band_decoder.Decode(ApplyBandView(test_out.bob, spec, static_cast<int>(b)), false);
    br.bob_band_distortion = MeanImageDistortion(band_recon, data.test.images);
    run.grid.push_back(RowsOf(band_recon, columns));
    run.bands.push_back(br);
  }
  return run;
}

CsvTable BandTable(const std::vector<ParallelRun>& runs) {
  CsvTable t("bands/1", {"replicate", "seed", "band", "width", "eps_b", "eps_e",
                         "mine_leakage_bits", "mine_failed", "adv_acc_t", "adv_acc_color",
                         "adv_acc_thickness", "bob_band_distortion"});
  for (const auto& run : runs) {
    for (const auto& b : run.bands) {
      CsvTable::Row r;
      r << run.overall.cell.replicate << SeedText(run.overall.cell.seed) << b.band
        << b.spec.width << b.spec.epsilon_b << b.spec.epsilon_e << b.mine_leakage_bits
        << static_cast<int>(b.mine_failed) << b.adversary.t << b.adversary.color
        << b.adversary.thickness << b.bob_band_distortion;
      t.Add(r);
    }
  }
  return t;
}

CsvTable BandMeanTable(const std::vector<ParallelRun>& runs) {
  CsvTable t("bands_mean/1", {"band", "width", "eps_b", "eps_e", "replicates",
                              "mine_leakage_bits", "adv_acc_t", "adv_acc_color",
                              "adv_acc_thickness", "bob_band_distortion"});
  if (runs.empty()) return t;
  for (std::size_t b = 0; b < runs.front().bands.size(); ++b) {
    std::vector<double> mine, at, ac, ath, dist;
    for (const auto& run : runs) {
      const BandReport& br = run.bands[b];
      if (!br.mine_failed) mine.push_back(br.mine_leakage_bits);
      at.push_back(br.adversary.t);
      ac.push_back(br.adversary.color);
      ath.push_back(br.adversary.thickness);
      dist.push_back(br.bob_band_distortion);
    }
    const BandSpec& s = runs.front().bands[b].spec;
    CsvTable::Row r;
    r << b << s.width << s.epsilon_b << s.epsilon_e << runs.size() << Mean(mine) << Mean(at)
      << Mean(ac) << Mean(ath) << Mean(dist);
    t.Add(r);
  }
  return t;
}

EvalReport EvaluateWithEveDecoder(Models& models, const TrainConfig& config,
                                  const DataSplits& data, const EvaluationSection& evaluation,
                                  std::uint64_t seed) {
  EvalReport rep;
  rep.metrics = EvaluateModels(models, config, data, evaluation, seed);
  EveDecoder eve_decoder = TrainEveDecoder(models.encoder, data.train, config,
                                           evaluation.decoder_epochs, DeriveSeed(seed, 3));
  Rng rng(DeriveSeed(seed, 4));
  const ChannelOutputs test_out = Transmit(models.encoder, data.test.images, config.channel, rng);
  const ChannelOutputs train_out =
      Transmit(models.encoder, data.train.images, config.channel, rng);
  const Tensor bob_test = models.decoder.Decode(test_out.bob, false);
  const Tensor eve_test = eve_decoder.Decode(test_out.eve, false);
  rep.eve_decoder_distortion = MeanImageDistortion(eve_test, data.test.images);

  ClassifierConfig cls = evaluation.adversary;
  cls.hidden = config.model.eve_hidden;
  rep.bob_recon_accuracy_t =
      TrainAndScoreClassifier(models.decoder.Decode(train_out.bob, false), data.train.t_labels,
                              bob_test, data.test.t_labels, cls, DeriveSeed(seed, 5))
          .t;
  rep.eve_recon_accuracy_t =
      TrainAndScoreClassifier(eve_decoder.Decode(train_out.eve, false), data.train.t_labels,
                              eve_test, data.test.t_labels, cls, DeriveSeed(seed, 6))
          .t;
  rep.grid = {RowsOf(data.test.images, evaluation.grid_columns),
              RowsOf(bob_test, evaluation.grid_columns),
              RowsOf(eve_test, evaluation.grid_columns)};
  return rep;
}

CsvTable MetricsTable(const TrainConfig& config, const EvalReport& report) {
  CsvTable t("metrics/1", {"lambda", "bands", "test_distortion", "decoder_bound_bits",
                           "mine_leakage_bits", "mine_failed", "adv_acc_t", "adv_acc_color",
                           "adv_acc_thickness", "eve_decoder_distortion", "bob_recon_acc_t",
                           "eve_recon_acc_t"});
  const ModelMetrics& m = report.metrics;
  CsvTable::Row r;
  r << config.lambda << config.channel.ToString() << m.test_distortion << m.decoder_bound_bits
    << m.mine_leakage_bits << static_cast<int>(m.mine_failed) << m.adversary.t
    << m.adversary.color << m.adversary.thickness << report.eve_decoder_distortion
    << report.bob_recon_accuracy_t << report.eve_recon_accuracy_t;
  t.Add(r);
  return t;
}

CsvTable HistoryTable(const TrainHistory& history) {
  CsvTable t("history/1", {"epoch", "distortion", "decoder_bound_bits", "eve_bound_bits",
                           "total_loss", "eve_accuracy"});
  for (const auto& e : history.epochs) {
    CsvTable::Row r;
    r << e.epoch << e.distortion << e.decoder_bound << e.eve_bound << e.total_loss
      << e.eve_accuracy;
    t.Add(r);
  }
  return t;
}

}  // namespace wiretap::app
