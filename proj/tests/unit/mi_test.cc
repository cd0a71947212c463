#include <gtest/gtest.h>

#include <cmath>

#include "mi_oracle.h"
#include "wiretap/dataset.h"
#include "wiretap/discrete_system.h"
#include "wiretap/mi.h"
#include "wiretap/mine.h"

namespace wiretap {
namespace {

DiscreteSystem IdentityBit() {
  DiscreteOptions o;
  o.source_bits = 1;
  return MakeDiscreteSystem(DiscreteKind::kCorrelatedBits, 1, o);
}

// Random system plus a matching single-band spec with random crossovers.
struct RandomCase {
  DiscreteSystem sys;
  ChannelSpec spec;
};

RandomCase MakeCase(std::uint64_t seed) {
  RandomCase c{MakeDiscreteSystem(DiscreteKind::kRandom, seed), {}};
  Rng rng(seed * 7919 + 1);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  std::vector<BandSpec> bands;
  for (std::size_t i = 0; i < c.sys.code_bits; ++i) bands.push_back({1, u(rng), u(rng)});
  c.spec = ChannelSpec(bands);
  return c;
}

std::vector<double> RandomRows(std::size_t rows, std::size_t cols, Rng& rng) {
  std::gamma_distribution<double> g(0.7, 1.0);
  std::vector<double> t(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += t[r * cols + c] = g(rng) + 1e-12;
    for (std::size_t c = 0; c < cols; ++c) t[r * cols + c] /= total;
  }
  return t;
}

TEST(ExactMi, IdentityBitThroughBsc) {
  const DiscreteSystem sys = IdentityBit();
  const ChannelSpec spec = ChannelSpec::SingleBand(1, 0.1, 0.1);
  const double expected = 1.0 - oracle::H2(0.1);
  EXPECT_NEAR(expected, 0.5310, 5e-5);
  EXPECT_NEAR(ExactMi(sys, spec, MiPair::kSourceBob).value_bits, expected, 1e-9);
  EXPECT_EQ(ExactMi(sys, spec, MiPair::kSourceBob).method, MiMethod::kExact);
}

TEST(ExactMi, HalfCrossoverGivesZeroForEveryPair) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kRandom, seed);
    const ChannelSpec spec = ChannelSpec::SingleBand(sys.code_bits, 0.5, 0.5);
    for (MiPair p : {MiPair::kSourceBob, MiPair::kSensitiveEve, MiPair::kCodewordEve,
                     MiPair::kSourceEve}) {
      EXPECT_NEAR(ExactMi(sys, spec, p).value_bits, 0.0, 1e-12);
    }
  }
}

TEST(ExactMi, NoiselessIdentityGivesSourceEntropy) {
  for (std::size_t m = 1; m <= 4; ++m) {
    DiscreteOptions o;
    o.source_bits = m;
    const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kCorrelatedBits, 1, o);
    const ChannelSpec spec = ChannelSpec::SingleBand(m, 0.0, 0.0);
    EXPECT_NEAR(ExactMi(sys, spec, MiPair::kSourceBob).value_bits,
                EntropyBits(sys.SourceMarginal()), 1e-12);
  }
}

TEST(ExactMi, AgreesWithBruteForceOracle) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const RandomCase c = MakeCase(seed);
    const auto eb = c.spec.BobEpsilons(), ee = c.spec.EveEpsilons();
    const auto& s = c.sys;
    EXPECT_NEAR(ExactMi(s, c.spec, MiPair::kSourceBob).value_bits,
                oracle::SystemMi(s.joint, s.t_size, s.s_size, s.encoder, eb, oracle::Pair::kSY),
                1e-10);
    EXPECT_NEAR(ExactMi(s, c.spec, MiPair::kSensitiveEve).value_bits,
                oracle::SystemMi(s.joint, s.t_size, s.s_size, s.encoder, ee, oracle::Pair::kTY),
                1e-10);
    EXPECT_NEAR(ExactMi(s, c.spec, MiPair::kCodewordEve).value_bits,
                oracle::SystemMi(s.joint, s.t_size, s.s_size, s.encoder, ee, oracle::Pair::kXY),
                1e-10);
  }
}

TEST(ExactMi, DataProcessingChain) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase c = MakeCase(seed);
    const double te = ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits;
    const double se = ExactMi(c.sys, c.spec, MiPair::kSourceEve).value_bits;
    const double xe = ExactMi(c.sys, c.spec, MiPair::kCodewordEve).value_bits;
    EXPECT_LE(te, se + 1e-9) << "seed " << seed;
    EXPECT_LE(se, xe + 1e-9) << "seed " << seed;
    EXPECT_GE(te, -1e-12);
  }
}

TEST(ExactMi, CapacityCeiling) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DiscreteSystem sys = MakeDiscreteSystem(DiscreteKind::kRandom, seed);
    const double eps = 0.01 * static_cast<double>(seed % 50);
    const ChannelSpec spec = ChannelSpec::SingleBand(sys.code_bits, 0.1, eps);
    EXPECT_LE(ExactMi(sys, spec, MiPair::kCodewordEve).value_bits,
              sys.code_bits * (1.0 - oracle::H2(eps)) + 1e-9);
  }
}

TEST(ExactMi, EntropyCeilings) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RandomCase c = MakeCase(seed);
    EXPECT_LE(ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits,
              EntropyBits(c.sys.SensitiveMarginal()) + 1e-12);
    EXPECT_LE(ExactMi(c.sys, c.spec, MiPair::kSourceBob).value_bits,
              EntropyBits(c.sys.SourceMarginal()) + 1e-12);
  }
}

TEST(ExactMi, EnumerationBound) {
  EXPECT_NO_THROW(CheckEnumerationBound(16, 16));
  EXPECT_THROW(CheckEnumerationBound(32, 16), EnumerationBoundError);
  const DiscreteSystem sys = IdentityBit();
  EXPECT_THROW(ExactMi(sys, ChannelSpec::SingleBand(2, 0.1, 0.1), MiPair::kSourceBob),
               std::invalid_argument);
}

TEST(ChannelTransition, RowsNormalize) {
  const ChannelSpec spec({{2, 0.1, 0.3}, {1, 0.0, 0.45}});
  for (Observer who : {Observer::kBob, Observer::kEve}) {
    const auto w = ChannelTransition(spec, who);
    for (std::size_t x = 0; x < 8; ++x) {
      double total = 0.0;
      for (std::size_t y = 0; y < 8; ++y) total += w[x * 8 + y];
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(TabularBounds, NeverExceedExactMi) {
  Rng rng(17);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase c = MakeCase(seed);
    const std::size_t m = c.sys.code_size();
    const auto dec = RandomRows(m, c.sys.s_size, rng);
    const auto cls = RandomRows(m, c.sys.t_size, rng);
    const MiReport db = TabularDecoderBound(c.sys, c.spec, dec);
    const MiReport eb = TabularEveBound(c.sys, c.spec, cls);
    EXPECT_LE(db.value_bits, ExactMi(c.sys, c.spec, MiPair::kSourceBob).value_bits + 1e-9);
    EXPECT_LE(eb.value_bits, ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits + 1e-9);
    ASSERT_TRUE(db.slack.has_value());
    EXPECT_GE(*db.slack, -1e-9);
    EXPECT_EQ(db.method, MiMethod::kDecoderBound);
    EXPECT_EQ(eb.method, MiMethod::kEveBound);
  }
}

TEST(TabularBounds, TruePosteriorAttainsEquality) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const RandomCase c = MakeCase(seed);
    EXPECT_NEAR(TabularDecoderBound(c.sys, c.spec, SourcePosteriorGivenBob(c.sys, c.spec)).value_bits,
                ExactMi(c.sys, c.spec, MiPair::kSourceBob).value_bits, 1e-9);
    EXPECT_NEAR(TabularEveBound(c.sys, c.spec, SensitivePosteriorGivenEve(c.sys, c.spec)).value_bits,
                ExactMi(c.sys, c.spec, MiPair::kSensitiveEve).value_bits, 1e-9);
  }
}

TEST(TabularBounds, RejectsMisshapedTables) {
  const RandomCase c = MakeCase(3);
  EXPECT_THROW(TabularDecoderBound(c.sys, c.spec, std::vector<double>(3, 0.5)),
               std::invalid_argument);
}

ModelConfig GlyphModel() {
  ModelConfig c;
  c.code_bits = 10;
  c.decoder_hidden = {8};
  c.eve_hidden = {8};
  return c;
}

TEST(DecoderCeBound, ConstantHalfDecoder) {
  Rng rng(1);
  DecoderModel dec(GlyphModel(), rng);
  dec.network().ZeroFinalLayer();
  const Dataset d = ToDataset(GenerateGlyphs(20, 16, 1));
  const MiReport r = DecoderCeBound(dec, d.images, Tensor({20, 10}, 1.0));
  EXPECT_NEAR(r.value_bits, -16.0 * 16.0 * 3.0, 1e-9);
  EXPECT_EQ(r.sample_count, 20u);
}

TEST(DecoderCeBound, PerfectDecoderOnBinaryImages) {
  const Dataset d = ToDataset(GenerateGlyphs(10, 16, 2));
  for (double v : d.images.values()) ASSERT_TRUE(v == 0.0 || v == 1.0);
  const double per_pixel = std::log2(1.0 - kProbabilityClamp);
  EXPECT_NEAR(BernoulliLogLikelihoodBits(d.images, d.images), 768 * per_pixel, 1e-9);
  EXPECT_LT(BernoulliLogLikelihoodBits(d.images, d.images), 0.0);
}

TEST(DecoderCeBound, ClampsInsteadOfUnderflowing) {
  const Tensor target({1, 2}, {1.0, 0.0});
  const Tensor wrong({1, 2}, {0.0, 1.0});
  EXPECT_NEAR(BernoulliLogLikelihoodBits(wrong, target), 2 * std::log2(kProbabilityClamp), 1e-9);
}

TEST(EveCeBound, UniformClassifierBoundIsZero) {
  Rng rng(3);
  EveClassifier eve(GlyphModel(), rng);
  eve.network().ZeroFinalLayer();
  std::vector<int> labels(45);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 9);
  const MiReport r = EveCeBound(eve, labels, Tensor({45, 10}, 0.0), std::log2(9.0));
  EXPECT_NEAR(r.value_bits, 0.0, 1e-12);
}

// Pairs (t, y) with y a one-hot of t passed through a 9-ary symmetric channel.
void NoisyCopy(std::size_t n, double keep, Rng& rng, std::vector<int>& t, Tensor& y) {
  std::uniform_int_distribution<int> label(0, 8);
  std::bernoulli_distribution k(keep);
  t.resize(n);
  y = Tensor::Matrix(n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = label(rng);
    y.at(i, static_cast<std::size_t>(k(rng) ? t[i] : label(rng))) = 1.0;
  }
}

TEST(Mine, IndependentPairNearZero) {
  Rng rng(4);
  std::vector<int> t;
  Tensor y;
  NoisyCopy(3000, 0.0, rng, t, y);
  MineConfig cfg;
  cfg.hidden = {32};
  cfg.epochs = 15;
  MineNet net(9, 9, cfg.hidden, rng);
  const MiReport r = MineEstimate(net, t, y, cfg, rng);
  EXPECT_FALSE(r.failed);
  EXPECT_EQ(r.method, MiMethod::kMine);
  EXPECT_LE(r.value_bits, 0.05);
}

TEST(Mine, DetectsStrongDependence) {
  Rng rng(5);
  std::vector<int> t;
  Tensor y;
  NoisyCopy(4000, 1.0, rng, t, y);
  MineConfig cfg;
  cfg.hidden = {64, 64};
  cfg.epochs = 40;
  MineNet net(9, 9, cfg.hidden, rng);
  const MiReport r = MineEstimate(net, t, y, cfg, rng);
  EXPECT_GT(r.value_bits, 2.5);
  EXPECT_LT(r.value_bits, std::log2(9.0) + 0.1);
}

TEST(Mine, Preconditions) {
  Rng rng(6);
  std::vector<int> t;
  Tensor y;
  NoisyCopy(500, 1.0, rng, t, y);
  MineConfig cfg;
  MineNet net(9, 9, {4}, rng);
  EXPECT_THROW(MineEstimate(net, t, y, cfg, rng), std::invalid_argument);
  NoisyCopy(1200, 1.0, rng, t, y);
  t.pop_back();
  EXPECT_THROW(MineEstimate(net, t, y, cfg, rng), std::invalid_argument);
}

}  // namespace
}  // namespace wiretap
