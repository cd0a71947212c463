#include "wiretap/evaluation.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wiretap/glyphs.h"
#include "wiretap/optimizer.h"

namespace wiretap {

ChannelOutputs Transmit(EncoderModel& encoder, const Tensor& images,
                        const ChannelSpec& spec, Rng& rng) {
  const Tensor p = encoder.Encode(images, false);
  const Tensor x = SampleBitsStraightThrough(p, rng);
  const auto eps_b = spec.BobEpsilons();
  const auto eps_e = spec.EveEpsilons();
  ChannelOutputs out;
  out.bob = FlipBits(x, eps_b, rng);
  out.eve = FlipBits(x, eps_e, rng);
  return out;
}

Tensor ApplyBandView(const Tensor& y, const ChannelSpec& spec, int band) {
  if (band < 0) return y;
  const auto b = static_cast<std::size_t>(band);
  if (b >= spec.band_count()) throw std::out_of_range("band index out of range");
  if (y.cols() != spec.total_bits()) throw std::invalid_argument("observation width mismatch");
  const std::size_t lo = spec.offset(b);
  const std::size_t hi = lo + spec.bands()[b].width;
  Tensor out = y;
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < y.cols(); ++c) {
      if (c < lo || c >= hi) out.at(r, c) = 0.5;
    }
  }
  return out;
}

Tensor BandColumns(const Tensor& y, const ChannelSpec& spec, std::size_t band) {
  if (band >= spec.band_count()) throw std::out_of_range("band index out of range");
  const std::size_t lo = spec.offset(band);
  const std::size_t w = spec.bands()[band].width;
  Tensor out = Tensor::Matrix(y.rows(), w);
  for (std::size_t r = 0; r < y.rows(); ++r) {
    for (std::size_t c = 0; c < w; ++c) out.at(r, c) = y.at(r, lo + c);
  }
  return out;
}

double MeanImageDistortion(const Tensor& reconstructions, const Tensor& images) {
  if (!reconstructions.SameShape(images) || images.rows() == 0) {
    throw std::invalid_argument("distortion needs aligned, nonempty batches");
  }
  return (reconstructions.mat() - images.mat()).squaredNorm() /
         static_cast<double>(images.rows());
}

double ConstantPredictorDistortion(const Tensor& images) {
  const Eigen::RowVectorXd mean = images.mat().colwise().mean();
  return (images.mat().rowwise() - mean).squaredNorm() / static_cast<double>(images.rows());
}

AttributeAccuracy ScorePredictions(const Tensor& probs, std::span<const int> labels) {
  if (labels.empty() || probs.rows() != labels.size()) {
    throw std::invalid_argument("prediction/label count mismatch");
  }
  AttributeAccuracy acc;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int pred = Argmax(probs.row(i));
    acc.t += pred == labels[i];
    acc.color += ColorOf(pred) == ColorOf(labels[i]);
    acc.thickness += ThicknessOf(pred) == ThicknessOf(labels[i]);
  }
  const double n = static_cast<double>(labels.size());
  acc.t /= n;
  acc.color /= n;
  acc.thickness /= n;
  return acc;
}

AttributeAccuracy TrainAndScoreClassifier(const Tensor& train_x,
                                          std::span<const int> train_labels,
                                          const Tensor& test_x,
                                          std::span<const int> test_labels,
                                          const ClassifierConfig& config,
                                          std::uint64_t seed) {
  if (train_x.rows() != train_labels.size() || train_labels.empty()) {
    throw std::invalid_argument("classifier training data misaligned");
  }
  Rng rng(seed);
  Network net = MakeMlp("probe", train_x.cols(), config.hidden, kSensitiveClasses,
                        Activation::kSoftmax);
  net.Initialize(rng);
  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8};
  const std::size_t n = train_labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t b = std::min(config.batch_size, n - start);
      std::span<const std::size_t> rows(order.data() + start, b);
      const Tensor x = train_x.GatherRows(rows);
      const Tensor probs = net.Forward(x, true);
      Tensor grad(probs.shape());
      for (std::size_t i = 0; i < b; ++i) {
        const auto t = static_cast<std::size_t>(train_labels[rows[i]]);
        const double q = probs.at(i, t);
        if (q > kProbabilityClamp) grad.at(i, t) = -1.0 / (static_cast<double>(b) * q);
      }
      net.Backward(grad);
      AdamStep(net.params(), adam);
    }
  }
  return ScorePredictions(net.Forward(test_x, false), test_labels);
}

MiReport MineLeakage(std::span<const int> labels, const Tensor& y,
                     const MineConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  MineNet net(kSensitiveClasses, y.cols(), config.hidden, rng);
  return MineEstimate(net, labels, y, config, rng);
}

}  // namespace wiretap
