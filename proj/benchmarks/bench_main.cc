#include <benchmark/benchmark.h>

#include "wiretap/channel.h"
#include "wiretap/discrete_system.h"
#include "wiretap/mi.h"
#include "wiretap/oracle.h"
#include "wiretap/training.h"

namespace {

using namespace wiretap;

Tensor Uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor t = Tensor::Matrix(rows, cols);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

void BM_EncoderForwardBackward(benchmark::State& state) {
  Rng rng(1);
  ModelConfig cfg;
  cfg.encoder_hidden = {static_cast<std::size_t>(state.range(0))};
  EncoderModel enc(cfg, rng);
  const Tensor x = Uniform(128, cfg.pixel_count(), rng);
  const Tensor g = Uniform(128, cfg.code_bits, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(enc.Encode(x, true));
    benchmark::DoNotOptimize(enc.Backward(g));
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_EncoderForwardBackward)->Arg(128)->Arg(256);

void BM_RelaxedFlip(benchmark::State& state) {
  Rng rng(2);
  const Tensor p = Uniform(128, 200, rng);
  const std::vector<double> eps(200, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(RelaxedFlip(p, eps));
  state.SetItemsProcessed(state.iterations() * p.size());
}
BENCHMARK(BM_RelaxedFlip);

void BM_WiretapSample(benchmark::State& state) {
  Rng rng(3);
  const ChannelSpec spec = ChannelSpec::Parse("50:0.1:0.1,50:0.001:0.2,50:0.2:0.001,50:0.001:0.001");
  Codeword x{std::vector<std::uint8_t>(200, 1)};
  for (auto _ : state) benchmark::DoNotOptimize(WiretapSample(x, spec, rng));
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_WiretapSample);

void BM_ExactMi(benchmark::State& state) {
  DiscreteOptions o;
  o.t_size = 4;
  o.s_size = 16;
  o.code_bits = static_cast<std::size_t>(state.range(0));
  const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kRandom, 4, o);
  const ChannelSpec spec = ChannelSpec::SingleBand(sys.code_bits, 0.1, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(ExactMi(sys, spec, MiPair::kSensitiveEve));
}
BENCHMARK(BM_ExactMi)->DenseRange(2, 6, 2);

void BM_OracleObjectiveGradient(benchmark::State& state) {
  const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kCorrelatedBits, 1);
  const ChannelSpec spec = ChannelSpec::SingleBand(2, 0.1, 0.3);
  TabularEncoder enc{4, 4, std::vector<double>(16, 0.1)};
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ExactObjectiveWithGradient(enc, sys, spec, 10.0, grad));
  }
}
BENCHMARK(BM_OracleObjectiveGradient);

void BM_TotalLoss(benchmark::State& state) {
  TrainConfig cfg;
  cfg.model.encoder_hidden = {128};
  cfg.model.decoder_hidden = {128};
  cfg.model.eve_hidden = {64};
  cfg.lambda = 10.0;
  Rng rng(5);
  Models m = MakeModels(cfg, rng);
  const Dataset batch = ToDataset(GenerateGlyphs(128, 16, 5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(TotalLoss(batch, m, cfg, rng, true));
    m.encoder.network().params().ZeroGrad();
    m.decoder.network().params().ZeroGrad();
  }
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_TotalLoss);

}  // namespace

BENCHMARK_MAIN();
