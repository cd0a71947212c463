#ifndef WIRETAP_CHANNEL_H_
#define WIRETAP_CHANNEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wiretap/tensor.h"

namespace wiretap {

// One band of a parallel binary symmetric wiretap channel.
struct BandSpec {
  std::size_t width = 0;
  double epsilon_b = 0.0;  // Bob's crossover probability
  double epsilon_e = 0.0;  // Eve's crossover probability

  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

// Ordered bands; band i occupies bits [offset(i), offset(i) + width).
class ChannelSpec {
 public:
  ChannelSpec() = default;
  explicit ChannelSpec(std::vector<BandSpec> bands);

  static ChannelSpec SingleBand(std::size_t n, double epsilon_b, double epsilon_e);
  // Parses "width:eps_b:eps_e,width:eps_b:eps_e,...".
  static ChannelSpec Parse(const std::string& text);
  std::string ToString() const;

  const std::vector<BandSpec>& bands() const { return bands_; }
  std::size_t band_count() const { return bands_.size(); }
  std::size_t total_bits() const { return total_; }
  std::size_t offset(std::size_t band) const;
  std::size_t band_of_bit(std::size_t bit) const;

  // Per-bit crossover probabilities, length total_bits().
  std::vector<double> BobEpsilons() const;
  std::vector<double> EveEpsilons() const;

  friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;

 private:
  std::vector<BandSpec> bands_;
  std::size_t total_ = 0;
};

void ValidateCrossover(double epsilon);

// A word over {0,1}; houses X^n and both observations.
struct Codeword {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const Codeword&, const Codeword&) = default;
};

Codeword BscSample(const Codeword& x, double epsilon, Rng& rng);

// sum_i [(x_i ^ y_i) log eps + (1 - (x_i ^ y_i)) log(1 - eps)], natural log.
// Throws when eps = 0 and x != y (the probability is exactly zero).
double BscLogLikelihood(const Codeword& x, const Codeword& y, double epsilon);

struct WiretapObservation {
  Codeword bob;
  Codeword eve;
};

// Bob's and Eve's flips are drawn independently given x, band by band.
WiretapObservation WiretapSample(const Codeword& x, const ChannelSpec& spec,
                                 Rng& rng);

// Output-bit marginal of a BSC for independent Bernoulli(p_i) inputs:
// q_i = p_i (1 - eps) + (1 - p_i) eps.
std::vector<double> RelaxedFlip(std::span<const double> p, double epsilon);

// Batched form with a per-column crossover; dq/dp = 1 - 2 eps_col.
Tensor RelaxedFlip(const Tensor& p, std::span<const double> column_epsilon);
Tensor RelaxedFlipBackward(const Tensor& grad_q,
                           std::span<const double> column_epsilon);

// Flips each entry of a 0/1 tensor with its column's crossover probability.
Tensor FlipBits(const Tensor& bits, std::span<const double> column_epsilon,
                Rng& rng);

double BinaryEntropyBits(double p);

}  // namespace wiretap

#endif  // WIRETAP_CHANNEL_H_
