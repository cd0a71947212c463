#ifndef WIRETAP_TRAINING_H_
#define WIRETAP_TRAINING_H_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/dataset.h"
#include "wiretap/glyphs.h"
#include "wiretap/mi.h"
#include "wiretap/models.h"

namespace wiretap {

enum class SamplingMode {
  kStraightThrough,  // hard Bernoulli bits, identity backward
  kRelaxed,          // feed the channel-output marginals q directly
};

struct TrainConfig {
  double lambda = 0.0;
  ChannelSpec channel = ChannelSpec::SingleBand(200, 0.1, 0.3);
  std::size_t epochs = 200;
  std::size_t batch_size = 128;
  std::size_t eve_steps_per_main_step = 5;
  std::uint64_t seed = 1;
  double lr = 1e-3;
  double eve_lr = 1e-3;
  // Weight of the decoder MI-bound term (implicitly 1 in the objective).
  double mi_weight = 1.0;
  // H(T) of the generator's label marginal (uniform over 9 classes).
  double sensitive_entropy_bits = std::log2(static_cast<double>(kSensitiveClasses));
  ModelConfig model;
  SamplingMode sampling = SamplingMode::kStraightThrough;

  // Throws std::invalid_argument on out-of-range settings.
  void Validate() const;
};

struct Models {
  EncoderModel encoder;
  DecoderModel decoder;
  EveClassifier eve;
};

Models MakeModels(const TrainConfig& config, Rng& rng);

struct LossTerms {
  double distortion = 0.0;            // mean per-image squared error
  double distortion_per_pixel = 0.0;  // the same, averaged over pixels
  double decoder_bound = 0.0;         // mean log2 f_dec(s | y_b) per image
  double eve_bound = 0.0;             // H(T) + mean log2 f_eve(t | y_e)
  double total = 0.0;
  double eve_accuracy = 0.0;
};

// Training objective on one batch through
//   encode -> relaxed_flip (per observer) -> straight-through sample
//          -> decode / classify:
//   total = distortion_per_pixel - mi_weight * decoder_bound
//           + lambda * eve_bound   (both bounds in bits per image).
// When `with_gradients`, encoder and decoder grad slots receive the
// gradient; Eve's parameters and grads are never touched.
LossTerms TotalLoss(const Dataset& batch, Models& models, const TrainConfig& config,
                    Rng& rng, bool with_gradients);

struct EveStepResult {
  double cross_entropy = 0.0;  // nats
  double accuracy = 0.0;
};

// One Adam step of Eve's classifier on fresh channel draws of the frozen
// encoder's codes for this batch.
EveStepResult EveStep(const Dataset& batch, Models& models, const TrainConfig& config,
                      Rng& rng);

struct EpochRecord {
  std::size_t epoch = 0;
  double distortion = 0.0;
  double decoder_bound = 0.0;
  double eve_bound = 0.0;
  double total_loss = 0.0;
  double eve_accuracy = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  bool aborted = false;
  std::string abort_reason;
};

struct FitResult {
  Models models;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&, const Models&)>;

// Per batch: eve_steps_per_main_step Eve updates, then one encoder/decoder
// update. Deterministic given config.seed. A numeric failure stops the run
// and returns the partial history with aborted = true.
FitResult Fit(const TrainConfig& config, const Dataset& train,
              const EpochCallback& on_epoch = {});

// Which channel output a stand-alone decoder or classifier is trained on,
// and optionally which single band it keeps (other bands are set to 0.5).
struct ObservationView {
  Observer who = Observer::kEve;
  int band = -1;
};

// Decoder fitted to reconstruct S from the frozen encoder's channel output
// (reconstruction objective only).
DecoderModel TrainDecoderOnObservation(EncoderModel& encoder, const Dataset& train,
                                       const TrainConfig& config, ObservationView view,
                                       std::size_t epochs, std::uint64_t seed);

EveDecoder TrainEveDecoder(EncoderModel& encoder, const Dataset& train,
                           const TrainConfig& config, std::size_t epochs,
                           std::uint64_t seed);

}  // namespace wiretap

#endif  // WIRETAP_TRAINING_H_
