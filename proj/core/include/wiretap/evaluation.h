#ifndef WIRETAP_EVALUATION_H_
#define WIRETAP_EVALUATION_H_

#include <span>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/mi.h"
#include "wiretap/mine.h"
#include "wiretap/models.h"

namespace wiretap {

struct ChannelOutputs {
  Tensor bob;
  Tensor eve;
};

// Hard transmission: x ~ Bernoulli(encode(s)), then independent BSC flips
// for Bob and Eve, band by band.
ChannelOutputs Transmit(EncoderModel& encoder, const Tensor& images,
                        const ChannelSpec& spec, Rng& rng);

// Keeps one band and replaces every other bit with the uninformative 0.5;
// band < 0 returns y unchanged.
Tensor ApplyBandView(const Tensor& y, const ChannelSpec& spec, int band);
// Only the columns of one band.
Tensor BandColumns(const Tensor& y, const ChannelSpec& spec, std::size_t band);

// Mean over images of the per-image sum of squared pixel errors.
double MeanImageDistortion(const Tensor& reconstructions, const Tensor& images);
// Distortion of predicting the dataset's mean image for every sample.
double ConstantPredictorDistortion(const Tensor& images);

struct ClassifierConfig {
  std::vector<std::size_t> hidden{128};
  std::size_t epochs = 30;
  std::size_t batch_size = 128;
  double lr = 1e-3;
};

// Accuracy on the 9-way label and on its color / thickness components.
struct AttributeAccuracy {
  double t = 0.0;
  double color = 0.0;
  double thickness = 0.0;
};

AttributeAccuracy ScorePredictions(const Tensor& probs, std::span<const int> labels);

// Fresh softmax MLP trained with cross-entropy on (train_x, train_labels),
// scored on the test split.
AttributeAccuracy TrainAndScoreClassifier(const Tensor& train_x,
                                          std::span<const int> train_labels,
                                          const Tensor& test_x,
                                          std::span<const int> test_labels,
                                          const ClassifierConfig& config,
                                          std::uint64_t seed);

// MINE leakage estimate I(T; y) for 9-class labels.
MiReport MineLeakage(std::span<const int> labels, const Tensor& y,
                     const MineConfig& config, std::uint64_t seed);

}  // namespace wiretap

#endif  // WIRETAP_EVALUATION_H_
