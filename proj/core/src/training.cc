#include "wiretap/training.h"

#include <algorithm>
#include <numeric>

#include "wiretap/evaluation.h"
#include "wiretap/mi.h"
#include "wiretap/optimizer.h"

namespace wiretap {
namespace {

constexpr double kLn2 = 0.69314718055994530942;

void CheckFinite(double v, const char* term) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string("non-finite ") + term + " term in the training loss");
  }
}

struct ReconstructionTerms {
  double distortion = 0.0;      // per-image squared error, batch mean
  double bound_bits = 0.0;      // mean per-image log2 likelihood
  Tensor grad;                  // d(loss)/d(reconstruction)
};

// loss = mean_pixels (r - s)^2 - mi_weight * bound_bits, the bound in bits
// per image.
ReconstructionTerms Reconstruction(const Tensor& recon, const Tensor& images,
                                   double mi_weight) {
  ReconstructionTerms out;
  out.grad = Tensor(recon.shape());
  const double b = static_cast<double>(images.rows());
  const double d = static_cast<double>(images.cols());
  double sq = 0.0, ll = 0.0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double r = recon[i];
    const double s = images[i];
    sq += (r - s) * (r - s);
    const double q = std::clamp(r, kProbabilityClamp, 1.0 - kProbabilityClamp);
    ll += s * std::log2(q) + (1.0 - s) * std::log2(1.0 - q);
    double g = 2.0 * (r - s) / (b * d);
    if (q == r) g -= mi_weight * (s / q - (1.0 - s) / (1.0 - q)) / (kLn2 * b);
    out.grad[i] = g;
  }
  out.distortion = sq / b;
  out.bound_bits = ll / b;
  return out;
}

Tensor Observe(const Tensor& q, SamplingMode mode, Rng& rng) {
  return mode == SamplingMode::kStraightThrough ? SampleBitsStraightThrough(q, rng) : q;
}

EveStepResult EveStepOnCodes(const Tensor& p, std::span<const int> labels, Models& models,
                             const TrainConfig& config, Rng& rng) {
  const auto eps_e = config.channel.EveEpsilons();
  const Tensor y_e = SampleBitsStraightThrough(RelaxedFlip(p, eps_e), rng);
  const Tensor probs = models.eve.Classify(y_e, true);
  Tensor grad(probs.shape());
  const double b = static_cast<double>(labels.size());
  EveStepResult res;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto t = static_cast<std::size_t>(labels[i]);
    const double raw = probs.at(i, t);
    const double q = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
    res.cross_entropy -= std::log(q) / b;
    if (q == raw) grad.at(i, t) = -1.0 / (b * q);
    res.accuracy += (Argmax(probs.row(i)) == labels[i]) / b;
  }
  CheckFinite(res.cross_entropy, "eve cross-entropy");
  models.eve.Backward(grad);
  AdamStep(models.eve.network().params(), AdamConfig{config.eve_lr, 0.9, 0.999, 1e-8});
  return res;
}

void TrainReconstruction(DecoderModel& decoder, EncoderModel& encoder,
                         const Dataset& train, const TrainConfig& config,
                         ObservationView view, std::size_t epochs, Rng& rng) {
  const auto eps = view.who == Observer::kBob ? config.channel.BobEpsilons()
                                              : config.channel.EveEpsilons();
  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8};
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t b = std::min(config.batch_size, order.size() - start);
      std::span<const std::size_t> rows(order.data() + start, b);
      const Tensor images = train.images.GatherRows(rows);
      const Tensor p = encoder.Encode(images, false);
      Tensor y = SampleBitsStraightThrough(RelaxedFlip(p, eps), rng);
      y = ApplyBandView(y, config.channel, view.band);
      const Tensor recon = decoder.Decode(y, true);
      auto terms = Reconstruction(recon, images, config.mi_weight);
      CheckFinite(terms.distortion, "distortion");
      decoder.Backward(terms.grad);
      AdamStep(decoder.network().params(), adam);
    }
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("lambda must be a finite nonnegative number");
  }
  if (eve_steps_per_main_step < 1) throw std::invalid_argument("eve steps must be >= 1");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (!(lr > 0.0) || !(eve_lr > 0.0)) throw std::invalid_argument("learning rates must be > 0");
  if (channel.total_bits() != model.code_bits) {
    throw std::invalid_argument("channel bands sum to " + std::to_string(channel.total_bits()) +
                                " bits but the encoder emits " +
                                std::to_string(model.code_bits));
  }
}

Models MakeModels(const TrainConfig& config, Rng& rng) {
  Models m;
  m.encoder = EncoderModel(config.model, rng);
  m.decoder = DecoderModel(config.model, rng);
  m.eve = EveClassifier(config.model, rng);
  return m;
}

LossTerms TotalLoss(const Dataset& batch, Models& models, const TrainConfig& config,
                    Rng& rng, bool with_gradients) {
  if (batch.size() == 0) throw std::invalid_argument("empty batch");
  if (batch.pixel_count() != config.model.pixel_count()) {
    throw std::invalid_argument("batch image size does not match the model");
  }
  const auto eps_b = config.channel.BobEpsilons();
  const auto eps_e = config.channel.EveEpsilons();

  const Tensor p = models.encoder.Encode(batch.images, with_gradients);
  const Tensor y_b = Observe(RelaxedFlip(p, eps_b), config.sampling, rng);
  const Tensor y_e = Observe(RelaxedFlip(p, eps_e), config.sampling, rng);

  // The decoder and Eve see only channel outputs.
  const Tensor recon = models.decoder.Decode(y_b, with_gradients);
  const Tensor probs = models.eve.Classify(y_e, with_gradients);

  LossTerms terms;
  auto rec = Reconstruction(recon, batch.images, config.mi_weight);
  terms.distortion = rec.distortion;
  terms.distortion_per_pixel = rec.distortion / static_cast<double>(batch.pixel_count());
  terms.decoder_bound = rec.bound_bits;
  CheckFinite(terms.distortion, "distortion");
  CheckFinite(terms.decoder_bound, "decoder bound");

  const double b = static_cast<double>(batch.size());
  Tensor grad_probs(probs.shape());
  double log_lik = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto t = static_cast<std::size_t>(batch.t_labels[i]);
    const double raw = probs.at(i, t);
    const double q = std::clamp(raw, kProbabilityClamp, 1.0 - kProbabilityClamp);
    log_lik += std::log2(q);
    if (q == raw) grad_probs.at(i, t) = config.lambda / (b * q * kLn2);
    terms.eve_accuracy += (Argmax(probs.row(i)) == batch.t_labels[i]) / b;
  }
  terms.eve_bound = config.sensitive_entropy_bits + log_lik / b;
  CheckFinite(terms.eve_bound, "eve bound");

  terms.total = terms.distortion_per_pixel - config.mi_weight * terms.decoder_bound +
                config.lambda * terms.eve_bound;
  CheckFinite(terms.total, "total");

  if (with_gradients) {
    const Tensor grad_yb = models.decoder.Backward(rec.grad);
    Tensor grad_p = RelaxedFlipBackward(StraightThroughBackward(grad_yb), eps_b);
    if (config.lambda != 0.0) {
      const Tensor grad_ye = models.eve.Backward(grad_probs, GradMode::kInputOnly);
      grad_p.mat() += RelaxedFlipBackward(StraightThroughBackward(grad_ye), eps_e).mat();
    }
    models.encoder.Backward(grad_p);
  }
  return terms;
}

EveStepResult EveStep(const Dataset& batch, Models& models, const TrainConfig& config,
                      Rng& rng) {
  const Tensor p = models.encoder.Encode(batch.images, false);
  return EveStepOnCodes(p, batch.t_labels, models, config, rng);
}

FitResult Fit(const TrainConfig& config, const Dataset& train,
              const EpochCallback& on_epoch) {
  config.Validate();
  if (train.size() == 0) throw std::invalid_argument("training set is empty");
  Rng rng(config.seed);
  FitResult result{MakeModels(config, rng), {}};
  Models& models = result.models;
  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8};

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  try {
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      EpochRecord rec;
      rec.epoch = epoch + 1;
      double seen = 0.0;
      for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
        const std::size_t bsz = std::min(config.batch_size, order.size() - start);
        const Dataset batch =
            train.Subset(std::span<const std::size_t>(order.data() + start, bsz));

        const Tensor p = models.encoder.Encode(batch.images, false);
        for (std::size_t k = 0; k < config.eve_steps_per_main_step; ++k) {
          EveStepOnCodes(p, batch.t_labels, models, config, rng);
        }
        const LossTerms terms = TotalLoss(batch, models, config, rng, true);
        AdamStep(models.encoder.network().params(), adam);
        AdamStep(models.decoder.network().params(), adam);

        const double w = static_cast<double>(bsz);
        rec.distortion += w * terms.distortion;
        rec.decoder_bound += w * terms.decoder_bound;
        rec.eve_bound += w * terms.eve_bound;
        rec.total_loss += w * terms.total;
        rec.eve_accuracy += w * terms.eve_accuracy;
        seen += w;
      }
      rec.distortion /= seen;
      rec.decoder_bound /= seen;
      rec.eve_bound /= seen;
      rec.total_loss /= seen;
      rec.eve_accuracy /= seen;
      result.history.epochs.push_back(rec);
      if (on_epoch) on_epoch(rec, models);
    }
  } catch (const NumericError& e) {
    result.history.aborted = true;
    result.history.abort_reason = e.what();
  }
  return result;
}

DecoderModel TrainDecoderOnObservation(EncoderModel& encoder, const Dataset& train,
                                       const TrainConfig& config, ObservationView view,
                                       std::size_t epochs, std::uint64_t seed) {
  Rng rng(seed);
  std::string name = view.who == Observer::kBob ? "bob" : "eve";
  name += view.band < 0 ? std::string("_decoder") : "_band" + std::to_string(view.band) + "_decoder";
  DecoderModel decoder(config.model, rng, name);
  TrainReconstruction(decoder, encoder, train, config, view, epochs, rng);
  return decoder;
}

EveDecoder TrainEveDecoder(EncoderModel& encoder, const Dataset& train,
                           const TrainConfig& config, std::size_t epochs,
                           std::uint64_t seed) {
  Rng rng(seed);
  EveDecoder decoder(config.model, rng);
  TrainReconstruction(decoder, encoder, train, config, ObservationView{Observer::kEve, -1},
                      epochs, rng);
  return decoder;
}

}  // namespace wiretap
