#ifndef WIRETAP_MI_H_
#define WIRETAP_MI_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/discrete_system.h"
#include "wiretap/models.h"

namespace wiretap {

enum class MiMethod { kExact, kDecoderBound, kEveBound, kMine };
std::string_view MiMethodName(MiMethod m);

struct MiReport {
  double value_bits = 0.0;
  MiMethod method = MiMethod::kExact;
  std::size_t sample_count = 0;
  std::optional<double> slack;  // exact MI minus bound, when known
  bool failed = false;
  std::string note;
};

enum class MiPair { kSourceBob, kSensitiveEve, kCodewordEve, kSourceEve };
enum class Observer { kBob, kEve };

inline constexpr std::size_t kEnumerationLimit = std::size_t{1} << 20;

class EnumerationBoundError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// |S| * 2^n must not exceed 2^20.
void CheckEnumerationBound(std::size_t s_size, std::size_t code_bits);

// W(y | x) over all 2^n x 2^n codeword pairs for one observer (row x).
std::vector<double> ChannelTransition(const ChannelSpec& spec, Observer who);

// P(Y = y | S = s) (row s) for an explicit encoder table.
std::vector<double> ObservationGivenSource(const DiscreteSystem& sys,
                                           std::span<const double> encoder,
                                           const std::vector<double>& transition);

// Exact MI by full enumeration of P(T,S) P(X|S) P(Y|X).
MiReport ExactMi(const DiscreteSystem& sys, const ChannelSpec& spec, MiPair which);
double ExactMiBits(const DiscreteSystem& sys, std::span<const double> encoder,
                   const ChannelSpec& spec, MiPair which);

// I(T; Y_band) or I(S; Y_band) for the observer's output restricted to one band.
double ExactBandMiBits(const DiscreteSystem& sys, std::span<const double> encoder,
                       const ChannelSpec& spec, std::size_t band, Observer who,
                       bool sensitive);

// True posteriors, row y: P(S = s | Y_B = y) and P(T = t | Y_E = y).
// Rows of zero-probability observations are uniform.
std::vector<double> SourcePosteriorGivenBob(const DiscreteSystem& sys,
                                            const ChannelSpec& spec);
std::vector<double> SensitivePosteriorGivenEve(const DiscreteSystem& sys,
                                               const ChannelSpec& spec);

// H(S) + E[log2 q(S | Y_B)] for a tabular decoder q (row y, 2^n x |S|),
// expectation taken exactly. slack = I(S;Y_B) - bound.
MiReport TabularDecoderBound(const DiscreteSystem& sys, const ChannelSpec& spec,
                             std::span<const double> decoder_table);
// H(T) + E[log2 q(T | Y_E)] for a tabular classifier (row y, 2^n x |T|).
MiReport TabularEveBound(const DiscreteSystem& sys, const ChannelSpec& spec,
                         std::span<const double> classifier_table);

inline constexpr double kProbabilityClamp = 1e-7;

// Mean over the batch of log2 f_dec(s | y_b), with f_dec a factorized
// per-pixel Bernoulli whose parameters are the decoder outputs (clamped to
// [1e-7, 1 - 1e-7]) and whose targets are the pixel intensities. Adding
// H(S) gives a lower bound on I(S; Y_B).
MiReport DecoderCeBound(DecoderModel& decoder, const Tensor& images,
                        const Tensor& y_bob);
// Same quantity from already-decoded reconstructions.
double BernoulliLogLikelihoodBits(const Tensor& reconstructions, const Tensor& images);

// H(T) + mean log2 f_eve(t | y_e); H(T) is supplied from the known label
// marginal. A lower bound on I(T; Y_E) for any classifier.
MiReport EveCeBound(EveClassifier& eve, std::span<const int> t_labels,
                    const Tensor& y_eve, double sensitive_entropy_bits);

}  // namespace wiretap

#endif  // WIRETAP_MI_H_
