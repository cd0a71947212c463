// Brute-force information quantities for small discrete systems, written
// from the definitions and sharing no code with the library under test.
#ifndef WIRETAP_TESTS_MI_ORACLE_H_
#define WIRETAP_TESTS_MI_ORACLE_H_

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline double H2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

// P(y | x) for independent per-bit flips, bit 0 being the most significant.
inline double Flip(std::size_t x, std::size_t y, const std::vector<double>& eps) {
  const std::size_t n = eps.size();
  double p = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t shift = n - 1 - i;
    const bool differ = ((x >> shift) & 1u) != ((y >> shift) & 1u);
    p *= differ ? eps[i] : 1.0 - eps[i];
  }
  return p;
}

// I(A; B) in bits from a joint table a_size x b_size.
inline double MutualInformation(const std::vector<double>& joint, std::size_t a_size,
                                std::size_t b_size) {
  std::vector<double> pa(a_size, 0.0), pb(b_size, 0.0);
  for (std::size_t a = 0; a < a_size; ++a) {
    for (std::size_t b = 0; b < b_size; ++b) {
      pa[a] += joint[a * b_size + b];
      pb[b] += joint[a * b_size + b];
    }
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < a_size; ++a) {
    for (std::size_t b = 0; b < b_size; ++b) {
      const double p = joint[a * b_size + b];
      if (p > 0) mi += p * std::log2(p / (pa[a] * pb[b]));
    }
  }
  return mi;
}

enum class Pair { kTY, kSY, kXY };

// joint_ts: t_size x s_size, encoder: s_size x 2^n, eps: per-bit crossover.
inline double SystemMi(const std::vector<double>& joint_ts, std::size_t t_size,
                       std::size_t s_size, const std::vector<double>& encoder,
                       const std::vector<double>& eps, Pair pair) {
  const std::size_t m = std::size_t{1} << eps.size();
  const std::size_t a_size = pair == Pair::kTY ? t_size : pair == Pair::kSY ? s_size : m;
  std::vector<double> joint(a_size * m, 0.0);
  for (std::size_t t = 0; t < t_size; ++t) {
    for (std::size_t s = 0; s < s_size; ++s) {
      for (std::size_t x = 0; x < m; ++x) {
        const double pxs = joint_ts[t * s_size + s] * encoder[s * m + x];
        if (pxs == 0.0) continue;
        const std::size_t a = pair == Pair::kTY ? t : pair == Pair::kSY ? s : x;
        for (std::size_t y = 0; y < m; ++y) joint[a * m + y] += pxs * Flip(x, y, eps);
      }
    }
  }
  return MutualInformation(joint, a_size, m);
}

}  // namespace oracle

#endif  // WIRETAP_TESTS_MI_ORACLE_H_
