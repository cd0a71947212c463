#ifndef WIRETAP_ORACLE_H_
#define WIRETAP_ORACLE_H_

#include <cstdint>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/discrete_system.h"

namespace wiretap {

// Softmax-parameterized encoder table P(X = x | S = s).
struct TabularEncoder {
  std::size_t s_size = 0;
  std::size_t code_size = 0;
  std::vector<double> logits;  // s_size x code_size

  std::vector<double> Probabilities() const;
  // Large logits reproducing a deterministic or given stochastic table.
  static TabularEncoder FromTable(const std::vector<double>& table, std::size_t s_size,
                                  std::size_t code_size);
};

struct ObjectiveTerms {
  double distortion = 0.0;  // expected Hamming distortion of the MAP decoder
  double mi_bob = 0.0;      // I(S; Y_B), bits
  double mi_eve = 0.0;      // I(T; Y_E), bits
  double objective = 0.0;   // distortion - mi_bob + lambda * mi_eve
};

// The privacy-utility objective evaluated exactly by enumeration with the
// MAP decoder argmax_s P(s | y_b).
ObjectiveTerms ExactObjective(const TabularEncoder& encoder, const DiscreteSystem& sys,
                              const ChannelSpec& spec, double lambda);

// Analytic gradient w.r.t. the logits, holding the MAP assignment fixed
// (it is piecewise constant in the encoder).
ObjectiveTerms ExactObjectiveWithGradient(const TabularEncoder& encoder,
                                          const DiscreteSystem& sys,
                                          const ChannelSpec& spec, double lambda,
                                          std::vector<double>& grad_logits);

struct FrontierPoint {
  double lambda = 0.0;
  double distortion = 0.0;
  double mi_bob = 0.0;
  double mi_eve = 0.0;
  double objective = 0.0;
  std::size_t restarts_used = 0;
};

struct OracleOptions {
  std::size_t restarts = 16;
  std::size_t iterations = 1500;
  double lr = 0.05;
  double init_scale = 2.0;
  std::uint64_t seed = 1;
};

struct OracleResult {
  TabularEncoder encoder;
  FrontierPoint point;
  double final_grad_norm = 0.0;  // of the best restart
  std::size_t iterations = 0;
};

// Adam descent on the logits from `restarts` random initializations;
// returns the restart with the lowest exact objective.
OracleResult OptimizeExact(const DiscreteSystem& sys, const ChannelSpec& spec,
                           double lambda, const OracleOptions& options);

std::vector<FrontierPoint> FrontierSweep(const DiscreteSystem& sys, const ChannelSpec& spec,
                                         const std::vector<double>& lambdas,
                                         const OracleOptions& options);

}  // namespace wiretap

#endif  // WIRETAP_ORACLE_H_
