#ifndef WIRETAP_DISCRETE_SYSTEM_H_
#define WIRETAP_DISCRETE_SYSTEM_H_

#include <cstdint>
#include <vector>

#include "wiretap/tensor.h"

namespace wiretap {

inline constexpr std::size_t kMaxDiscreteT = 4;
inline constexpr std::size_t kMaxDiscreteS = 16;
inline constexpr std::size_t kMaxDiscreteCodeBits = 6;

// Explicit P(T, S) and P(X^n | S) over tiny alphabets. Codewords are
// indexed as integers whose most significant bit is position 0 of X^n;
// sources likewise, with `source_bits` bits (used for Hamming distortion).
struct DiscreteSystem {
  std::size_t t_size = 0;
  std::size_t s_size = 0;
  std::size_t source_bits = 0;
  std::size_t code_bits = 0;
  std::vector<double> joint;    // t_size x s_size
  std::vector<double> encoder;  // s_size x 2^code_bits

  std::size_t code_size() const { return std::size_t{1} << code_bits; }
  double p_ts(std::size_t t, std::size_t s) const { return joint[t * s_size + s]; }
  double p_x_given_s(std::size_t s, std::size_t x) const {
    return encoder[s * code_size() + x];
  }
  std::vector<double> SourceMarginal() const;
  std::vector<double> SensitiveMarginal() const;

  // Throws unless sizes are in bounds and tables normalize within 1e-12.
  void Validate() const;
};

enum class DiscreteKind { kCorrelatedBits, kRandom };

struct DiscreteOptions {
  // kCorrelatedBits: S uniform over source_bits-bit strings, T = bit
  // `sensitive_bit` (1-based, most significant first), identity encoder
  // into code_bits = source_bits.
  std::size_t source_bits = 2;
  std::size_t sensitive_bit = 1;
  // kRandom: 0 draws the size at random within the type bounds.
  std::size_t t_size = 0;
  std::size_t s_size = 0;
  std::size_t code_bits = 0;
};

DiscreteSystem MakeDiscreteSystem(DiscreteKind kind, std::uint64_t seed,
                                  const DiscreteOptions& options = {});

double EntropyBits(const std::vector<double>& p);
std::size_t HammingDistance(std::size_t a, std::size_t b);
std::size_t BitsFor(std::size_t alphabet_size);

}  // namespace wiretap

#endif  // WIRETAP_DISCRETE_SYSTEM_H_
