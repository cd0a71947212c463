#include "wiretap/channel.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace wiretap {

void ValidateCrossover(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) {
    throw std::invalid_argument("crossover probability " +
                                std::to_string(epsilon) +
                                " outside [0, 0.5]");
  }
}

ChannelSpec::ChannelSpec(std::vector<BandSpec> bands) : bands_(std::move(bands)) {
  if (bands_.empty()) throw std::invalid_argument("channel has no bands");
  for (const auto& b : bands_) {
    if (b.width == 0) throw std::invalid_argument("band width must be positive");
    ValidateCrossover(b.epsilon_b);
    ValidateCrossover(b.epsilon_e);
    total_ += b.width;
  }
}

ChannelSpec ChannelSpec::SingleBand(std::size_t n, double epsilon_b,
                                    double epsilon_e) {
  return ChannelSpec({BandSpec{n, epsilon_b, epsilon_e}});
}

ChannelSpec ChannelSpec::Parse(const std::string& text) {
  std::vector<BandSpec> bands;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream is(item);
    std::string w, eb, ee;
    if (!std::getline(is, w, ':') || !std::getline(is, eb, ':') ||
        !std::getline(is, ee)) {
      throw std::invalid_argument("band '" + item +
                                  "' is not width:eps_b:eps_e");
    }
    try {
      std::size_t used = 0;
      const long width = std::stol(w, &used);
      if (width <= 0) throw std::invalid_argument("width");
      bands.push_back({static_cast<std::size_t>(width), std::stod(eb), std::stod(ee)});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("band '" + item + "' is not width:eps_b:eps_e");
    }
  }
  return ChannelSpec(std::move(bands));
}

namespace {

// Shortest text that parses back to the same double.
std::string Shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string ChannelSpec::ToString() const {
  std::string out;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(bands_[i].width) + ':' + Shortest(bands_[i].epsilon_b) + ':' +
           Shortest(bands_[i].epsilon_e);
  }
  return out;
}

std::size_t ChannelSpec::offset(std::size_t band) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < band; ++i) off += bands_.at(i).width;
  return off;
}

std::size_t ChannelSpec::band_of_bit(std::size_t bit) const {
  std::size_t end = 0;
  for (std::size_t i = 0; i < bands_.size(); ++i) {
    end += bands_[i].width;
    if (bit < end) return i;
  }
  throw std::out_of_range("bit index beyond channel length");
}

std::vector<double> ChannelSpec::BobEpsilons() const {
  std::vector<double> eps;
  eps.reserve(total_);
  for (const auto& b : bands_) eps.insert(eps.end(), b.width, b.epsilon_b);
  return eps;
}

std::vector<double> ChannelSpec::EveEpsilons() const {
  std::vector<double> eps;
  eps.reserve(total_);
  for (const auto& b : bands_) eps.insert(eps.end(), b.width, b.epsilon_e);
  return eps;
}

namespace {

void FlipRange(std::span<const std::uint8_t> in, std::span<std::uint8_t> out,
               double epsilon, Rng& rng) {
  std::bernoulli_distribution flip(epsilon);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i] > 1) throw std::invalid_argument("codeword entries must be 0 or 1");
    out[i] = static_cast<std::uint8_t>(in[i] ^ (flip(rng) ? 1 : 0));
  }
}

}  // namespace

Codeword BscSample(const Codeword& x, double epsilon, Rng& rng) {
  ValidateCrossover(epsilon);
  Codeword y{std::vector<std::uint8_t>(x.size())};
  FlipRange(x.bits, y.bits, epsilon, rng);
  return y;
}

double BscLogLikelihood(const Codeword& x, const Codeword& y, double epsilon) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("codeword length mismatch: " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()));
  }
  ValidateCrossover(epsilon);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < x.size(); ++i) flips += (x.bits[i] ^ y.bits[i]) & 1;
  if (epsilon == 0.0) {
    if (flips != 0) {
      throw std::domain_error("zero-probability observation: noiseless channel "
                              "cannot flip bits");
    }
    return 0.0;
  }
  const double kept = static_cast<double>(x.size() - flips);
  return static_cast<double>(flips) * std::log(epsilon) +
         kept * std::log1p(-epsilon);
}

WiretapObservation WiretapSample(const Codeword& x, const ChannelSpec& spec,
                                 Rng& rng) {
  if (x.size() != spec.total_bits()) {
    throw std::invalid_argument("codeword length " + std::to_string(x.size()) +
                                " != channel length " +
                                std::to_string(spec.total_bits()));
  }
  WiretapObservation obs{Codeword{std::vector<std::uint8_t>(x.size())},
                         Codeword{std::vector<std::uint8_t>(x.size())}};
  std::span<const std::uint8_t> in(x.bits);
  std::size_t off = 0;
  for (const auto& band : spec.bands()) {
    FlipRange(in.subspan(off, band.width),
              std::span(obs.bob.bits).subspan(off, band.width), band.epsilon_b, rng);
    FlipRange(in.subspan(off, band.width),
              std::span(obs.eve.bits).subspan(off, band.width), band.epsilon_e, rng);
    off += band.width;
  }
  return obs;
}

std::vector<double> RelaxedFlip(std::span<const double> p, double epsilon) {
  ValidateCrossover(epsilon);
  std::vector<double> q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) {
      throw std::invalid_argument("bit probability outside [0, 1]");
    }
    q[i] = p[i] * (1.0 - epsilon) + (1.0 - p[i]) * epsilon;
  }
  return q;
}

namespace {

void CheckColumns(const Tensor& t, std::span<const double> eps) {
  if (t.rank() != 2 || t.cols() != eps.size()) {
    throw std::invalid_argument("tensor shape " + t.ShapeString() +
                                " does not match " + std::to_string(eps.size()) +
                                " channel bits");
  }
}

}  // namespace

Tensor RelaxedFlip(const Tensor& p, std::span<const double> column_epsilon) {
  CheckColumns(p, column_epsilon);
  Tensor q(p.shape());
  const std::size_t n = column_epsilon.size();
  for (std::size_t r = 0; r < p.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double e = column_epsilon[c];
      q.at(r, c) = p.at(r, c) * (1.0 - e) + (1.0 - p.at(r, c)) * e;
    }
  }
  return q;
}

Tensor RelaxedFlipBackward(const Tensor& grad_q,
                           std::span<const double> column_epsilon) {
  CheckColumns(grad_q, column_epsilon);
  Tensor g(grad_q.shape());
  const std::size_t n = column_epsilon.size();
  for (std::size_t r = 0; r < grad_q.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      g.at(r, c) = grad_q.at(r, c) * (1.0 - 2.0 * column_epsilon[c]);
    }
  }
  return g;
}

Tensor FlipBits(const Tensor& bits, std::span<const double> column_epsilon,
                Rng& rng) {
  CheckColumns(bits, column_epsilon);
  Tensor out(bits.shape());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = column_epsilon.size();
  for (std::size_t r = 0; r < bits.rows(); ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const bool flip = u(rng) < column_epsilon[c];
      const double b = bits.at(r, c);
      out.at(r, c) = flip ? 1.0 - b : b;
    }
  }
  return out;
}

double BinaryEntropyBits(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace wiretap
