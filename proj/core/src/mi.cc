#include "wiretap/mi.h"

#include <algorithm>
#include <cmath>

namespace wiretap {

std::string_view MiMethodName(MiMethod m) {
  switch (m) {
    case MiMethod::kExact: return "exact";
    case MiMethod::kDecoderBound: return "decoder-bound";
    case MiMethod::kEveBound: return "eve-bound";
    case MiMethod::kMine: return "mine";
  }
  return "unknown";
}

void CheckEnumerationBound(std::size_t s_size, std::size_t code_bits) {
  if (code_bits >= 20 || s_size * (std::size_t{1} << code_bits) > kEnumerationLimit) {
    throw EnumerationBoundError(
        "exact enumeration refused: |S| * 2^n = " + std::to_string(s_size) +
        " * 2^" + std::to_string(code_bits) + " exceeds the bound 2^20");
  }
}

namespace {

void CheckCompatible(const DiscreteSystem& sys, const ChannelSpec& spec) {
  CheckEnumerationBound(sys.s_size, sys.code_bits);
  if (spec.total_bits() != sys.code_bits) {
    throw std::invalid_argument("channel length " + std::to_string(spec.total_bits()) +
                                " != system code bits " + std::to_string(sys.code_bits));
  }
}

// I(A;B) in bits from a row-major joint table (rows a, columns b).
double MutualInformationBits(const std::vector<double>& joint, std::size_t rows,
                             std::size_t cols) {
  std::vector<double> pa(rows, 0.0), pb(cols, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      pa[a] += joint[a * cols + b];
      pb[b] += joint[a * cols + b];
    }
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t b = 0; b < cols; ++b) {
      const double p = joint[a * cols + b];
      if (p > 0.0) mi += p * std::log2(p / (pa[a] * pb[b]));
    }
  }
  // Rounding can leave -1e-17 for independent variables.
  return std::max(mi, 0.0);
}

std::vector<double> SourceObservationJoint(const DiscreteSystem& sys,
                                           std::span<const double> encoder,
                                           const ChannelSpec& spec, Observer who) {
  const auto given = ObservationGivenSource(sys, encoder, ChannelTransition(spec, who));
  const auto ps = sys.SourceMarginal();
  std::vector<double> joint(given.size());
  const std::size_t ny = sys.code_size();
  for (std::size_t s = 0; s < sys.s_size; ++s) {
    for (std::size_t y = 0; y < ny; ++y) joint[s * ny + y] = ps[s] * given[s * ny + y];
  }
  return joint;
}

std::vector<double> SensitiveObservationJoint(const DiscreteSystem& sys,
                                              std::span<const double> encoder,
                                              const ChannelSpec& spec, Observer who) {
  const auto given = ObservationGivenSource(sys, encoder, ChannelTransition(spec, who));
  const std::size_t ny = sys.code_size();
  std::vector<double> joint(sys.t_size * ny, 0.0);
  for (std::size_t t = 0; t < sys.t_size; ++t) {
    for (std::size_t s = 0; s < sys.s_size; ++s) {
      const double pts = sys.p_ts(t, s);
      if (pts == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) joint[t * ny + y] += pts * given[s * ny + y];
    }
  }
  return joint;
}

std::vector<double> RowPosterior(const std::vector<double>& joint, std::size_t rows,
                                 std::size_t cols) {
  // joint is rows (hidden) x cols (observation); output is cols x rows.
  std::vector<double> post(rows * cols, 0.0);
  for (std::size_t y = 0; y < cols; ++y) {
    double py = 0.0;
    for (std::size_t a = 0; a < rows; ++a) py += joint[a * cols + y];
    for (std::size_t a = 0; a < rows; ++a) {
      post[y * rows + a] =
          py > 0.0 ? joint[a * cols + y] / py : 1.0 / static_cast<double>(rows);
    }
  }
  return post;
}

double ExpectedLog2(const std::vector<double>& joint, std::size_t rows,
                    std::size_t cols, std::span<const double> table) {
  // table is cols (observation) x rows (hidden).
  double e = 0.0;
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t y = 0; y < cols; ++y) {
      const double p = joint[a * cols + y];
      if (p > 0.0) e += p * std::log2(table[y * rows + a]);
    }
  }
  return e;
}

}  // namespace

std::vector<double> ChannelTransition(const ChannelSpec& spec, Observer who) {
  const std::size_t n = spec.total_bits();
  if (n > 12) throw EnumerationBoundError("channel transition table limited to n <= 12");
  const auto eps = who == Observer::kBob ? spec.BobEpsilons() : spec.EveEpsilons();
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> w(size * size);
  for (std::size_t x = 0; x < size; ++x) {
    for (std::size_t y = 0; y < size; ++y) {
      const std::size_t diff = x ^ y;
      double p = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool flipped = (diff >> (n - 1 - i)) & 1;
        p *= flipped ? eps[i] : 1.0 - eps[i];
      }
      w[x * size + y] = p;
    }
  }
  return w;
}

std::vector<double> ObservationGivenSource(const DiscreteSystem& sys,
                                           std::span<const double> encoder,
                                           const std::vector<double>& transition) {
  const std::size_t nx = sys.code_size();
  if (encoder.size() != sys.s_size * nx || transition.size() != nx * nx) {
    throw std::invalid_argument("encoder/channel table sizes do not match the system");
  }
  std::vector<double> out(sys.s_size * nx, 0.0);
  for (std::size_t s = 0; s < sys.s_size; ++s) {
    for (std::size_t x = 0; x < nx; ++x) {
      const double px = encoder[s * nx + x];
      if (px == 0.0) continue;
      for (std::size_t y = 0; y < nx; ++y) out[s * nx + y] += px * transition[x * nx + y];
    }
  }
  return out;
}

double ExactMiBits(const DiscreteSystem& sys, std::span<const double> encoder,
                   const ChannelSpec& spec, MiPair which) {
  CheckCompatible(sys, spec);
  const std::size_t ny = sys.code_size();
  switch (which) {
    case MiPair::kSourceBob:
      return MutualInformationBits(SourceObservationJoint(sys, encoder, spec, Observer::kBob),
                                   sys.s_size, ny);
    case MiPair::kSourceEve:
      return MutualInformationBits(SourceObservationJoint(sys, encoder, spec, Observer::kEve),
                                   sys.s_size, ny);
    case MiPair::kSensitiveEve:
      return MutualInformationBits(
          SensitiveObservationJoint(sys, encoder, spec, Observer::kEve), sys.t_size, ny);
    case MiPair::kCodewordEve: {
      const auto w = ChannelTransition(spec, Observer::kEve);
      const auto ps = sys.SourceMarginal();
      std::vector<double> px(ny, 0.0);
      for (std::size_t s = 0; s < sys.s_size; ++s) {
        for (std::size_t x = 0; x < ny; ++x) px[x] += ps[s] * encoder[s * ny + x];
      }
      std::vector<double> joint(ny * ny);
      for (std::size_t x = 0; x < ny; ++x) {
        for (std::size_t y = 0; y < ny; ++y) joint[x * ny + y] = px[x] * w[x * ny + y];
      }
      return MutualInformationBits(joint, ny, ny);
    }
  }
  return 0.0;
}

MiReport ExactMi(const DiscreteSystem& sys, const ChannelSpec& spec, MiPair which) {
  MiReport r;
  r.method = MiMethod::kExact;
  r.value_bits = ExactMiBits(sys, sys.encoder, spec, which);
  return r;
}

double ExactBandMiBits(const DiscreteSystem& sys, std::span<const double> encoder,
                       const ChannelSpec& spec, std::size_t band, Observer who,
                       bool sensitive) {
  CheckCompatible(sys, spec);
  const std::size_t n = sys.code_bits;
  const std::size_t ny = sys.code_size();
  const std::size_t width = spec.bands().at(band).width;
  const std::size_t shift = n - spec.offset(band) - width;
  const std::size_t nb = std::size_t{1} << width;
  const std::size_t rows = sensitive ? sys.t_size : sys.s_size;
  const auto full = sensitive ? SensitiveObservationJoint(sys, encoder, spec, who)
                              : SourceObservationJoint(sys, encoder, spec, who);
  std::vector<double> joint(rows * nb, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    for (std::size_t y = 0; y < ny; ++y) {
      joint[a * nb + ((y >> shift) & (nb - 1))] += full[a * ny + y];
    }
  }
  return MutualInformationBits(joint, rows, nb);
}

std::vector<double> SourcePosteriorGivenBob(const DiscreteSystem& sys,
                                            const ChannelSpec& spec) {
  CheckCompatible(sys, spec);
  return RowPosterior(SourceObservationJoint(sys, sys.encoder, spec, Observer::kBob),
                      sys.s_size, sys.code_size());
}

std::vector<double> SensitivePosteriorGivenEve(const DiscreteSystem& sys,
                                               const ChannelSpec& spec) {
  CheckCompatible(sys, spec);
  return RowPosterior(SensitiveObservationJoint(sys, sys.encoder, spec, Observer::kEve),
                      sys.t_size, sys.code_size());
}

MiReport TabularDecoderBound(const DiscreteSystem& sys, const ChannelSpec& spec,
                             std::span<const double> decoder_table) {
  CheckCompatible(sys, spec);
  const std::size_t ny = sys.code_size();
  if (decoder_table.size() != ny * sys.s_size) {
    throw std::invalid_argument("decoder table must be 2^n x |S|");
  }
  const auto joint = SourceObservationJoint(sys, sys.encoder, spec, Observer::kBob);
  MiReport r;
  r.method = MiMethod::kDecoderBound;
  r.value_bits = EntropyBits(sys.SourceMarginal()) +
                 ExpectedLog2(joint, sys.s_size, ny, decoder_table);
  r.slack = MutualInformationBits(joint, sys.s_size, ny) - r.value_bits;
  return r;
}

MiReport TabularEveBound(const DiscreteSystem& sys, const ChannelSpec& spec,
                         std::span<const double> classifier_table) {
  CheckCompatible(sys, spec);
  const std::size_t ny = sys.code_size();
  if (classifier_table.size() != ny * sys.t_size) {
    throw std::invalid_argument("classifier table must be 2^n x |T|");
  }
  const auto joint = SensitiveObservationJoint(sys, sys.encoder, spec, Observer::kEve);
  MiReport r;
  r.method = MiMethod::kEveBound;
  r.value_bits = EntropyBits(sys.SensitiveMarginal()) +
                 ExpectedLog2(joint, sys.t_size, ny, classifier_table);
  r.slack = MutualInformationBits(joint, sys.t_size, ny) - r.value_bits;
  return r;
}

double BernoulliLogLikelihoodBits(const Tensor& reconstructions, const Tensor& images) {
  if (!reconstructions.SameShape(images)) {
    throw std::invalid_argument("reconstruction shape " + reconstructions.ShapeString() +
                                " != image shape " + images.ShapeString());
  }
  if (images.rows() == 0) throw std::invalid_argument("empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double q = std::clamp(reconstructions[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    const double s = images[i];
    total += s * std::log2(q) + (1.0 - s) * std::log2(1.0 - q);
  }
  return total / static_cast<double>(images.rows());
}

MiReport DecoderCeBound(DecoderModel& decoder, const Tensor& images,
                        const Tensor& y_bob) {
  if (images.rows() == 0 || images.rows() != y_bob.rows()) {
    throw std::invalid_argument("decoder bound needs a nonempty, aligned batch");
  }
  MiReport r;
  r.method = MiMethod::kDecoderBound;
  r.sample_count = images.rows();
  r.value_bits = BernoulliLogLikelihoodBits(decoder.Decode(y_bob, false), images);
  r.note = "E[log2 f_dec]; add H(S) for the lower bound";
  return r;
}

MiReport EveCeBound(EveClassifier& eve, std::span<const int> t_labels,
                    const Tensor& y_eve, double sensitive_entropy_bits) {
  if (t_labels.empty() || t_labels.size() != y_eve.rows()) {
    throw std::invalid_argument("eve bound needs a nonempty, aligned batch");
  }
  const Tensor probs = eve.Classify(y_eve, false);
  double total = 0.0;
  for (std::size_t i = 0; i < t_labels.size(); ++i) {
    const double q = std::clamp(probs.at(i, static_cast<std::size_t>(t_labels[i])),
                                kProbabilityClamp, 1.0 - kProbabilityClamp);
    total += std::log2(q);
  }
  MiReport r;
  r.method = MiMethod::kEveBound;
  r.sample_count = t_labels.size();
  r.value_bits = sensitive_entropy_bits + total / static_cast<double>(t_labels.size());
  return r;
}

}  // namespace wiretap
