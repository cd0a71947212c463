#ifndef WIRETAP_APP_EXPERIMENTS_H_
#define WIRETAP_APP_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wiretap/dataset.h"
#include "wiretap/evaluation.h"
#include "wiretap/training.h"
#include "wiretap_app/config.h"
#include "wiretap_app/outputs.h"

namespace wiretap::app {

struct DataSplits {
  Dataset train;
  Dataset test;
};

// Cached train.bin / test.bin when dataset.cache_dir is set, otherwise
// glyphs (or colorized IDX digits) generated from dataset.seed.
DataSplits PrepareData(const DatasetSection& dataset);

// Seed for stream `stream` derived from `base` (splitmix64 finalizer), so
// replicates and sub-tasks never share a generator.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream);

// `draws` independent hard transmissions of every image, stacked row-wise
// (draw-major), with labels repeated to match.
struct StackedObservations {
  Tensor bob;
  Tensor eve;
  std::vector<int> labels;
};
StackedObservations TransmitRepeated(EncoderModel& encoder, const Dataset& data,
                                     const ChannelSpec& spec, std::size_t draws, Rng& rng);

// Test-split measurements of a trained system.
struct ModelMetrics {
  double test_distortion = 0.0;      // per image, Bob's decoder on hard bits
  double decoder_bound_bits = 0.0;   // H(S) omitted: mean log2 f_dec(s | y_b)
  double mine_leakage_bits = 0.0;    // I(T; Y_E), MINE on test transmissions
  bool mine_failed = false;
  std::string mine_note;
  AttributeAccuracy adversary;       // fresh classifier on Eve's bits
};

ModelMetrics EvaluateModels(Models& models, const TrainConfig& config, const DataSplits& data,
                            const EvaluationSection& evaluation, std::uint64_t seed);

struct SweepCell {
  double lambda = 0.0;
  double eps_b = 0.0;
  double eps_e = 0.0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
};

// One trade-off measurement.
struct PutPoint {
  SweepCell cell;
  std::string status = "ok";  // ok | aborted | failed
  std::string note;
  std::size_t epochs_completed = 0;
  ModelMetrics metrics;
};

// lambdas x eps_e x replicates; eps_b from the first configured band.
// Replicate r of every cell shares one training seed.
std::vector<SweepCell> SweepCells(const ExperimentConfig& config);

// Config with the cell's lambda, seed and eps_e applied to every band.
TrainConfig CellTrainConfig(const ExperimentConfig& config, const SweepCell& cell);

// Trains and evaluates one cell. Never throws on numeric trouble: the
// failure lands in status/note.
PutPoint RunPutCell(const ExperimentConfig& config, const DataSplits& data,
                    const SweepCell& cell);

using CellDone = std::function<void(const PutPoint&)>;

// Runs cells on up to `jobs` worker threads; results keep cell order.
std::vector<PutPoint> RunSweep(const ExperimentConfig& config, const DataSplits& data,
                               const std::vector<SweepCell>& cells, std::size_t jobs,
                               const CellDone& on_done = {});

CsvTable PutTable(const std::vector<PutPoint>& points);
// Leakage against distortion, one curve per eps_e, replicates averaged.
std::string PutPlot(const std::vector<PutPoint>& points);

struct BandReport {
  std::size_t band = 0;
  BandSpec spec;
  double mine_leakage_bits = 0.0;
  bool mine_failed = false;
  AttributeAccuracy adversary;
  double bob_band_distortion = 0.0;  // band-isolated decoder on Bob's bits
};

struct ParallelRun {
  PutPoint overall;
  std::vector<BandReport> bands;
  // Originals, Bob, Eve, then one row per band-isolated decoder.
  std::vector<std::vector<std::vector<double>>> grid;
};

// Trains at the configured lambda on a multi-band channel and analyses
// each band. Throws ConfigError for a single-band channel.
ParallelRun RunParallel(const ExperimentConfig& config, const DataSplits& data,
                        std::size_t replicate);

CsvTable BandTable(const std::vector<ParallelRun>& runs);
// Per-band means over replicates.
CsvTable BandMeanTable(const std::vector<ParallelRun>& runs);

// Everything cmd_eval reports for one set of trained models.
struct EvalReport {
  ModelMetrics metrics;
  double eve_decoder_distortion = 0.0;
  double bob_recon_accuracy_t = 0.0;  // classifier on Bob's reconstructions
  double eve_recon_accuracy_t = 0.0;  // classifier on Eve-decoder outputs
  std::vector<std::vector<std::vector<double>>> grid;  // originals, Bob, Eve
};

EvalReport EvaluateWithEveDecoder(Models& models, const TrainConfig& config,
                                  const DataSplits& data, const EvaluationSection& evaluation,
                                  std::uint64_t seed);

CsvTable MetricsTable(const TrainConfig& config, const EvalReport& report);
CsvTable HistoryTable(const TrainHistory& history);

}  // namespace wiretap::app

#endif  // WIRETAP_APP_EXPERIMENTS_H_
