#include "wiretap/discrete_system.h"

#include <bit>
#include <cmath>
#include <string>

namespace wiretap {

std::vector<double> DiscreteSystem::SourceMarginal() const {
  std::vector<double> p(s_size, 0.0);
  for (std::size_t t = 0; t < t_size; ++t) {
    for (std::size_t s = 0; s < s_size; ++s) p[s] += p_ts(t, s);
  }
  return p;
}

std::vector<double> DiscreteSystem::SensitiveMarginal() const {
  std::vector<double> p(t_size, 0.0);
  for (std::size_t t = 0; t < t_size; ++t) {
    for (std::size_t s = 0; s < s_size; ++s) p[t] += p_ts(t, s);
  }
  return p;
}

void DiscreteSystem::Validate() const {
  if (t_size == 0 || t_size > kMaxDiscreteT || s_size == 0 ||
      s_size > kMaxDiscreteS || code_bits == 0 || code_bits > kMaxDiscreteCodeBits) {
    throw std::invalid_argument("discrete system sizes out of bounds (|T| <= 4, "
                                "|S| <= 16, 1 <= n <= 6)");
  }
  if (joint.size() != t_size * s_size || encoder.size() != s_size * code_size()) {
    throw std::invalid_argument("discrete system table sizes inconsistent");
  }
  if ((std::size_t{1} << source_bits) < s_size) {
    throw std::invalid_argument("source_bits too small for the source alphabet");
  }
  double total = 0.0;
  for (double v : joint) {
    if (!(v >= 0.0)) throw std::invalid_argument("negative joint probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("joint table sums to " + std::to_string(total));
  }
  for (std::size_t s = 0; s < s_size; ++s) {
    double row = 0.0;
    for (std::size_t x = 0; x < code_size(); ++x) {
      const double v = p_x_given_s(s, x);
      if (!(v >= 0.0)) throw std::invalid_argument("negative encoder probability");
      row += v;
    }
    if (std::abs(row - 1.0) > 1e-12) {
      throw std::invalid_argument("encoder row " + std::to_string(s) + " sums to " +
                                  std::to_string(row));
    }
  }
}

namespace {

std::vector<double> DirichletOnes(std::size_t k, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> v(k);
  double sum = 0.0;
  for (double& x : v) {
    x = e(rng);
    sum += x;
  }
  for (double& x : v) x /= sum;
  return v;
}

// Renormalizes so the sum is 1 to within one rounding step.
void Normalize(std::vector<double>& v, std::size_t begin, std::size_t count) {
  double sum = 0.0;
  for (std::size_t i = begin; i < begin + count; ++i) sum += v[i];
  for (std::size_t i = begin; i < begin + count; ++i) v[i] /= sum;
}

}  // namespace

DiscreteSystem MakeDiscreteSystem(DiscreteKind kind, std::uint64_t seed,
                                  const DiscreteOptions& options) {
  DiscreteSystem sys;
  if (kind == DiscreteKind::kCorrelatedBits) {
    const std::size_t m = options.source_bits;
    if (m == 0 || m > 4 || options.sensitive_bit == 0 || options.sensitive_bit > m) {
      throw std::invalid_argument("correlated-bits system needs 1 <= bit <= m <= 4");
    }
    sys.t_size = 2;
    sys.s_size = std::size_t{1} << m;
    sys.source_bits = m;
    sys.code_bits = m;
    sys.joint.assign(sys.t_size * sys.s_size, 0.0);
    const std::size_t shift = m - options.sensitive_bit;
    for (std::size_t s = 0; s < sys.s_size; ++s) {
      const std::size_t t = (s >> shift) & 1;
      sys.joint[t * sys.s_size + s] = 1.0 / static_cast<double>(sys.s_size);
    }
    sys.encoder.assign(sys.s_size * sys.code_size(), 0.0);
    for (std::size_t s = 0; s < sys.s_size; ++s) sys.encoder[s * sys.code_size() + s] = 1.0;
  } else {
    Rng rng(seed);
    auto pick = [&](std::size_t fixed, std::size_t lo, std::size_t hi) {
      if (fixed != 0) return fixed;
      return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    };
    sys.t_size = pick(options.t_size, 2, kMaxDiscreteT);
    sys.s_size = pick(options.s_size, 2, kMaxDiscreteS);
    sys.code_bits = pick(options.code_bits, 1, 4);
    sys.source_bits = BitsFor(sys.s_size);
    sys.joint = DirichletOnes(sys.t_size * sys.s_size, rng);
    sys.encoder.clear();
    for (std::size_t s = 0; s < sys.s_size; ++s) {
      auto row = DirichletOnes(sys.code_size(), rng);
      sys.encoder.insert(sys.encoder.end(), row.begin(), row.end());
    }
    Normalize(sys.joint, 0, sys.joint.size());
    for (std::size_t s = 0; s < sys.s_size; ++s) {
      Normalize(sys.encoder, s * sys.code_size(), sys.code_size());
    }
  }
  sys.Validate();
  return sys;
}

double EntropyBits(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

std::size_t HammingDistance(std::size_t a, std::size_t b) {
  return static_cast<std::size_t>(std::popcount(a ^ b));
}

std::size_t BitsFor(std::size_t alphabet_size) {
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < alphabet_size) ++bits;
  return bits == 0 ? 1 : bits;
}

}  // namespace wiretap
