#include "wiretap/models.h"

#include <sstream>

#include "wiretap/glyphs.h"

namespace wiretap {

EncoderModel::EncoderModel(const ModelConfig& config, Rng& rng)
    : net_(MakeMlp("encoder", config.pixel_count(), config.encoder_hidden,
                   config.code_bits, Activation::kSigmoid)) {
  net_.Initialize(rng);
}

Tensor EncoderModel::Encode(const Tensor& images, bool record) {
  return net_.Forward(images, record);
}

DecoderModel::DecoderModel(const ModelConfig& config, Rng& rng, std::string name)
    : net_(MakeMlp(std::move(name), config.code_bits, config.decoder_hidden,
                   config.pixel_count(), Activation::kSigmoid)) {
  net_.Initialize(rng);
}

Tensor DecoderModel::Decode(const Tensor& y, bool record) {
  return net_.Forward(y, record);
}

EveClassifier::EveClassifier(const ModelConfig& config, Rng& rng,
                             std::size_t input_width, std::string name)
    : net_(MakeMlp(std::move(name), input_width ? input_width : config.code_bits,
                   config.eve_hidden, kSensitiveClasses, Activation::kSoftmax)) {
  net_.Initialize(rng);
}

Tensor EveClassifier::Classify(const Tensor& y, bool record) {
  return net_.Forward(y, record);
}

Tensor SampleBitsStraightThrough(const Tensor& p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor x(p.shape());
  for (std::size_t i = 0; i < p.size(); ++i) x[i] = u(rng) < p[i] ? 1.0 : 0.0;
  return x;
}

Codeword SampleCodeword(std::span<const double> p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Codeword x{std::vector<std::uint8_t>(p.size())};
  for (std::size_t i = 0; i < p.size(); ++i) x.bits[i] = u(rng) < p[i] ? 1 : 0;
  return x;
}

int Argmax(std::span<const double> v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

Checkpoint PackCheckpoint(const std::vector<const Network*>& nets,
                          std::map<std::string, std::string> metadata) {
  Checkpoint ckpt;
  ckpt.metadata = std::move(metadata);
  ckpt.metadata["format"] = kModelFormat;
  for (const Network* net : nets) {
    for (auto& [name, t] : net->params().Weights()) ckpt.tensors.emplace(name, t);
  }
  return ckpt;
}

void UnpackCheckpoint(const Checkpoint& ckpt, const std::vector<Network*>& nets) {
  auto it = ckpt.metadata.find("format");
  if (it == ckpt.metadata.end() || it->second != kModelFormat) {
    throw CheckpointError("model checkpoint format '" +
                          (it == ckpt.metadata.end() ? std::string("<none>") : it->second) +
                          "' does not match '" + kModelFormat + "'");
  }
  for (Network* net : nets) net->params().LoadWeights(ckpt.tensors);
}

namespace {

std::string JoinWidths(const std::vector<std::size_t>& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) os << (i ? "," : "") << w[i];
  return os.str();
}

std::vector<std::size_t> SplitWidths(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> ModelConfigMetadata(const ModelConfig& config) {
  return {{"image_size", std::to_string(config.image_size)},
          {"code_bits", std::to_string(config.code_bits)},
          {"encoder_hidden", JoinWidths(config.encoder_hidden)},
          {"decoder_hidden", JoinWidths(config.decoder_hidden)},
          {"eve_hidden", JoinWidths(config.eve_hidden)}};
}

ModelConfig ModelConfigFromMetadata(const std::map<std::string, std::string>& meta) {
  auto get = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw CheckpointError(std::string("checkpoint metadata lacks '") + key + "'");
    }
    return it->second;
  };
  ModelConfig c;
  c.image_size = std::stoul(get("image_size"));
  c.code_bits = std::stoul(get("code_bits"));
  c.encoder_hidden = SplitWidths(get("encoder_hidden"));
  c.decoder_hidden = SplitWidths(get("decoder_hidden"));
  c.eve_hidden = SplitWidths(get("eve_hidden"));
  return c;
}

}  // namespace wiretap
