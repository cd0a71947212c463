#ifndef WIRETAP_MODELS_H_
#define WIRETAP_MODELS_H_

#include <map>
#include <string>
#include <vector>

#include "wiretap/channel.h"
#include "wiretap/checkpoint.h"
#include "wiretap/network.h"

namespace wiretap {

struct ModelConfig {
  std::size_t image_size = 16;
  std::size_t code_bits = 200;
  std::vector<std::size_t> encoder_hidden{256};
  std::vector<std::size_t> decoder_hidden{256};
  std::vector<std::size_t> eve_hidden{128};

  std::size_t pixel_count() const { return image_size * image_size * 3; }
};

// Stochastic encoder: image -> per-bit probabilities P(X_i = 1 | S).
class EncoderModel {
 public:
  EncoderModel() = default;
  EncoderModel(const ModelConfig& config, Rng& rng);

  Tensor Encode(const Tensor& images, bool record);
  Tensor Backward(const Tensor& grad_p) { return net_.Backward(grad_p); }

  std::size_t code_bits() const { return net_.output_width(); }
  Network& network() { return net_; }
  const Network& network() const { return net_; }

 private:
  Network net_;
};

// Channel output (hard bits or relaxed probabilities) -> image in (0, 1).
class DecoderModel {
 public:
  DecoderModel() = default;
  DecoderModel(const ModelConfig& config, Rng& rng, std::string name = "decoder");

  Tensor Decode(const Tensor& y, bool record);
  Tensor Backward(const Tensor& grad_out,
                  GradMode mode = GradMode::kAccumulate) {
    return net_.Backward(grad_out, mode);
  }

  Network& network() { return net_; }
  const Network& network() const { return net_; }

 private:
  Network net_;
};

// Illustrative decoder trained on Eve's observation.
class EveDecoder : public DecoderModel {
 public:
  EveDecoder() = default;
  EveDecoder(const ModelConfig& config, Rng& rng)
      : DecoderModel(config, rng, "eve_decoder") {}
};

// Eve's classifier: observation -> probabilities over the 9 sensitive classes.
class EveClassifier {
 public:
  EveClassifier() = default;
  EveClassifier(const ModelConfig& config, Rng& rng, std::size_t input_width = 0,
                std::string name = "eve");

  Tensor Classify(const Tensor& y, bool record);
  Tensor Backward(const Tensor& grad_probs,
                  GradMode mode = GradMode::kAccumulate) {
    return net_.Backward(grad_probs, mode);
  }

  Network& network() { return net_; }
  const Network& network() const { return net_; }

 private:
  Network net_;
};

// Forward: x_i = 1 with probability p_i. The backward contract is the
// identity Jacobian, applied by StraightThroughBackward.
Tensor SampleBitsStraightThrough(const Tensor& p, Rng& rng);
inline Tensor StraightThroughBackward(const Tensor& grad_x) { return grad_x; }
Codeword SampleCodeword(std::span<const double> p, Rng& rng);

int Argmax(std::span<const double> v);

inline constexpr const char* kModelFormat = "wiretap-models/1";

// Weights of several networks plus hyperparameters in one checkpoint.
Checkpoint PackCheckpoint(const std::vector<const Network*>& nets,
                          std::map<std::string, std::string> metadata);
// Loads into networks built with matching hyperparameters. Throws
// CheckpointError on a model-format mismatch.
void UnpackCheckpoint(const Checkpoint& ckpt, const std::vector<Network*>& nets);

std::map<std::string, std::string> ModelConfigMetadata(const ModelConfig& config);
ModelConfig ModelConfigFromMetadata(const std::map<std::string, std::string>& meta);

}  // namespace wiretap

#endif  // WIRETAP_MODELS_H_
