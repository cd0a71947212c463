#include <gtest/gtest.h>

#include <cmath>

#include "wiretap/channel.h"

namespace wiretap {
namespace {

Codeword Bits(std::initializer_list<int> b) {
  Codeword c;
  for (int v : b) c.bits.push_back(static_cast<std::uint8_t>(v));
  return c;
}

Codeword FromIndex(std::size_t v, std::size_t n) {
  Codeword c{std::vector<std::uint8_t>(n)};
  for (std::size_t i = 0; i < n; ++i) c.bits[i] = (v >> (n - 1 - i)) & 1u;
  return c;
}

double FlipFraction(const Codeword& x, double eps, std::size_t draws, Rng& rng) {
  std::size_t flips = 0;
  for (std::size_t d = 0; d < draws; ++d) {
    const Codeword y = BscSample(x, eps, rng);
    for (std::size_t i = 0; i < x.size(); ++i) flips += x.bits[i] != y.bits[i];
  }
  return static_cast<double>(flips) / static_cast<double>(draws * x.size());
}

TEST(BandSpec, CrossoverRangeIsEnforced) {
  EXPECT_THROW(ChannelSpec::SingleBand(4, 0.6, 0.1), std::invalid_argument);
  EXPECT_THROW(ChannelSpec::SingleBand(4, 0.1, -0.01), std::invalid_argument);
  EXPECT_THROW(ChannelSpec({{0, 0.1, 0.1}}), std::invalid_argument);
  EXPECT_NO_THROW(ChannelSpec::SingleBand(4, 0.5, 0.0));
}

TEST(ChannelSpec, ParsesAndPrintsBandTriples) {
  const ChannelSpec s = ChannelSpec::Parse("50:0.1:0.1, 50:0.001:0.2,50:0.2:0.001,50:0.001:0.001");
  EXPECT_EQ(s.band_count(), 4u);
  EXPECT_EQ(s.total_bits(), 200u);
  EXPECT_EQ(s.offset(2), 100u);
  EXPECT_EQ(s.band_of_bit(149), 2u);
  EXPECT_EQ(s.bands()[1], (BandSpec{50, 0.001, 0.2}));
  EXPECT_EQ(ChannelSpec::Parse(s.ToString()), s);
  EXPECT_THROW(ChannelSpec::Parse("50:0.1"), std::invalid_argument);
  EXPECT_THROW(ChannelSpec::Parse("abc"), std::invalid_argument);
  EXPECT_THROW(ChannelSpec::Parse(""), std::invalid_argument);
}

TEST(ChannelSpec, DefaultSingleChannelSetting) {
  const ChannelSpec s = ChannelSpec::SingleBand(200, 0.1, 0.3);
  EXPECT_EQ(s.total_bits(), 200u);
  EXPECT_EQ(s.BobEpsilons(), std::vector<double>(200, 0.1));
  EXPECT_EQ(s.EveEpsilons(), std::vector<double>(200, 0.3));
}

TEST(BscSample, NoiselessChannelIsIdentity) {
  Rng rng(1);
  const Codeword x = Bits({1, 0, 1, 1, 0, 0, 1});
  EXPECT_EQ(BscSample(x, 0.0, rng), x);
}

TEST(BscSample, RejectsOutOfRange) {
  Rng rng(1);
  EXPECT_THROW(BscSample(Bits({1}), 0.51, rng), std::invalid_argument);
}

// 3 sigma of a binomial proportion over `trials` bits.
double ThreeSigma(double eps, double trials) { return 3.0 * std::sqrt(eps * (1 - eps) / trials); }

TEST(BscSample, HalfNoiseFlipsHalfTheBits) {
  Rng rng(2);
  const Codeword x = FromIndex(0b1011, 4);
  const double f = FlipFraction(x, 0.5, 25000, rng);  // 10^5 bit draws
  EXPECT_NEAR(f, 0.5, ThreeSigma(0.5, 1e5));
}

TEST(BscSample, CrossoverRateOnA200BitWord) {
  Rng rng(3);
  Codeword x{std::vector<std::uint8_t>(200)};
  for (std::size_t i = 0; i < 200; ++i) x.bits[i] = (i * 7 % 3) == 0;
  const double f = FlipFraction(x, 0.1, 100000, rng);  // 2 * 10^7 bit draws
  EXPECT_NEAR(f, 0.1, 3.0 * std::sqrt(0.1 * 0.9 / 2e7));
}

TEST(BscLogLikelihood, DirectEvaluation) {
  EXPECT_NEAR(BscLogLikelihood(Bits({0, 1}), Bits({0, 1}), 0.1), 2 * std::log(0.9), 1e-15);
  EXPECT_NEAR(BscLogLikelihood(Bits({0, 0}), Bits({0, 1}), 0.1), std::log(0.9 * 0.1), 1e-15);
}

TEST(BscLogLikelihood, Errors) {
  EXPECT_THROW(BscLogLikelihood(Bits({0, 1}), Bits({0}), 0.1), std::invalid_argument);
  EXPECT_THROW(BscLogLikelihood(Bits({0}), Bits({1}), 0.0), std::domain_error);
  EXPECT_DOUBLE_EQ(BscLogLikelihood(Bits({1}), Bits({1}), 0.0), 0.0);
}

TEST(BscLogLikelihood, NormalizesForSmallBlocks) {
  for (std::size_t n = 1; n <= 6; ++n) {
    for (double eps : {0.001, 0.1, 0.3, 0.5}) {
      for (std::size_t xi = 0; xi < (std::size_t{1} << n); ++xi) {
        double total = 0.0;
        for (std::size_t yi = 0; yi < (std::size_t{1} << n); ++yi) {
          total += std::exp(BscLogLikelihood(FromIndex(xi, n), FromIndex(yi, n), eps));
        }
        EXPECT_NEAR(total, 1.0, 1e-12) << "n=" << n << " eps=" << eps;
      }
    }
  }
}

TEST(WiretapSample, NoiselessSpecCopiesTheWord) {
  Rng rng(4);
  const ChannelSpec s({{3, 0.0, 0.0}, {2, 0.0, 0.0}});
  const Codeword x = Bits({1, 0, 0, 1, 1});
  const WiretapObservation o = WiretapSample(x, s, rng);
  EXPECT_EQ(o.bob, x);
  EXPECT_EQ(o.eve, x);
  EXPECT_THROW(WiretapSample(Bits({1, 0}), s, rng), std::invalid_argument);
}

TEST(WiretapSample, FourBandRatesPerObserver) {
  const ChannelSpec s =
      ChannelSpec::Parse("50:0.1:0.1,50:0.001:0.2,50:0.2:0.001,50:0.001:0.001");
  Rng rng(5);
  Codeword x{std::vector<std::uint8_t>(200, 0)};
  const std::size_t draws = 4000;  // 2 * 10^5 bits per band
  std::vector<double> bob(4, 0), eve(4, 0);
  for (std::size_t d = 0; d < draws; ++d) {
    const WiretapObservation o = WiretapSample(x, s, rng);
    for (std::size_t i = 0; i < 200; ++i) {
      bob[s.band_of_bit(i)] += o.bob.bits[i];
      eve[s.band_of_bit(i)] += o.eve.bits[i];
    }
  }
  const double trials = 50.0 * draws;
  for (std::size_t b = 0; b < 4; ++b) {
    EXPECT_NEAR(bob[b] / trials, s.bands()[b].epsilon_b, ThreeSigma(s.bands()[b].epsilon_b, trials));
    EXPECT_NEAR(eve[b] / trials, s.bands()[b].epsilon_e, ThreeSigma(s.bands()[b].epsilon_e, trials));
  }
}

TEST(WiretapSample, BandsAreUncorrelated) {
  const ChannelSpec s({{1, 0.3, 0.3}, {1, 0.3, 0.3}});
  Rng rng(6);
  const std::size_t n = 100000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t d = 0; d < n; ++d) {
    const auto o = WiretapSample(Bits({0, 0}), s, rng);
    const double a = o.bob.bits[0], b = o.bob.bits[1];
    sa += a, sb += b, sab += a * b, saa += a * a, sbb += b * b;
  }
  const double N = static_cast<double>(n);
  const double cov = sab / N - (sa / N) * (sb / N);
  const double corr =
      cov / std::sqrt((saa / N - sa * sa / (N * N)) * (sbb / N - sb * sb / (N * N)));
  EXPECT_LT(std::abs(corr), 0.01);
}

TEST(WiretapSample, CascadedChannelsComposeLikeOneBsc) {
  // Chi-square (1 dof) of end-to-end flips against eps1(1-eps2) + (1-eps1)eps2.
  const double e1 = 0.1, e2 = 0.2, eff = e1 * (1 - e2) + (1 - e1) * e2;
  Rng rng(7);
  const Codeword x = Bits({1, 0, 1, 0, 1, 0, 1, 0, 1, 0});
  double flips = 0;
  const std::size_t draws = 10000;
  for (std::size_t d = 0; d < draws; ++d) {
    const Codeword y = BscSample(BscSample(x, e1, rng), e2, rng);
    for (std::size_t i = 0; i < x.size(); ++i) flips += x.bits[i] != y.bits[i];
  }
  const double n = 10.0 * draws;
  const double expected = n * eff;
  const double chi2 = std::pow(flips - expected, 2) / expected +
                      std::pow((n - flips) - (n - expected), 2) / (n - expected);
  EXPECT_LT(chi2, 10.83);  // p = 0.001
}

TEST(RelaxedFlip, ClosedFormCases) {
  const std::vector<double> p{0.0, 0.5, 1.0, 0.3};
  EXPECT_EQ(RelaxedFlip(p, 0.0), p);
  const auto q = RelaxedFlip(p, 0.2);
  EXPECT_DOUBLE_EQ(q[1], 0.5);
  EXPECT_NEAR(q[2], 0.8, 1e-15);
  EXPECT_NEAR(q[0], 0.2, 1e-15);
  EXPECT_NEAR(q[3], 0.3 * 0.8 + 0.7 * 0.2, 1e-15);
  EXPECT_THROW(RelaxedFlip(std::vector<double>{1.2}, 0.1), std::invalid_argument);
}

TEST(RelaxedFlip, BackwardScalesByOneMinusTwoEps) {
  const std::vector<double> eps{0.0, 0.1, 0.5};
  const Tensor g = RelaxedFlipBackward(Tensor({1, 3}, {1.0, 1.0, 1.0}), eps);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(g[2], 0.0);
}

TEST(RelaxedFlip, MatchesEmpiricalOutputMean) {
  Rng rng(8);
  const double p = 0.7, eps = 0.15, q = RelaxedFlip(std::vector<double>{p}, eps)[0];
  std::bernoulli_distribution bx(p);
  const std::size_t n = 100000;
  double ones = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Codeword x{{static_cast<std::uint8_t>(bx(rng))}};
    ones += BscSample(x, eps, rng).bits[0];
  }
  EXPECT_NEAR(ones / n, q, ThreeSigma(q, n));
}

TEST(FlipBits, PerColumnRates) {
  Rng rng(9);
  Tensor bits = Tensor::Matrix(20000, 2, 0.0);
  const Tensor y = FlipBits(bits, std::vector<double>{0.0, 0.25}, rng);
  double c0 = 0, c1 = 0;
  for (std::size_t r = 0; r < y.rows(); ++r) c0 += y.at(r, 0), c1 += y.at(r, 1);
  EXPECT_EQ(c0, 0.0);
  EXPECT_NEAR(c1 / 20000, 0.25, ThreeSigma(0.25, 20000));
}

TEST(BinaryEntropy, KnownValues) {
  EXPECT_DOUBLE_EQ(BinaryEntropyBits(0.0), 0.0);
  EXPECT_DOUBLE_EQ(BinaryEntropyBits(0.5), 1.0);
  EXPECT_NEAR(BinaryEntropyBits(0.1), -(0.1 * std::log2(0.1) + 0.9 * std::log2(0.9)), 1e-15);
}

}  // namespace
}  // namespace wiretap
