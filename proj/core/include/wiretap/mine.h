#ifndef WIRETAP_MINE_H_
#define WIRETAP_MINE_H_

#include <span>
#include <vector>

#include "wiretap/mi.h"
#include "wiretap/network.h"

namespace wiretap {

struct MineConfig {
  std::vector<std::size_t> hidden{128, 128};
  std::size_t epochs = 40;
  std::size_t batch_size = 256;
  double lr = 1e-3;
  double ema_decay = 0.99;
  std::size_t smoothing_window = 50;
  std::size_t min_samples = 1000;
  // Share of samples held out from training; the reported value is the
  // objective on this split. 0 reports the smoothed training objective.
  double holdout_fraction = 0.3;
};

// Statistics network T(t, y): [one-hot(t), y] -> scalar.
class MineNet {
 public:
  MineNet(std::size_t classes, std::size_t y_width,
          const std::vector<std::size_t>& hidden, Rng& rng);

  std::size_t classes() const { return classes_; }
  std::size_t y_width() const { return y_width_; }
  Network& network() { return net_; }

  // Builds the input rows [one-hot(t[i]), y[row_of_y[i]]].
  Tensor Inputs(std::span<const int> t, const Tensor& y,
                std::span<const std::size_t> y_rows) const;

 private:
  std::size_t classes_;
  std::size_t y_width_;
  Network net_;
};

// Trains the statistics network on the Donsker-Varadhan objective
//   E_joint[T] - log E_marginal[exp T],
// marginal pairs formed by shuffling t within each batch, with the
// log-partition gradient normalized by an exponential moving average of
// the batch partition. With a holdout split, the objective is evaluated on
// it after every epoch (marginal term summed over the empirical label
// distribution) and the best epoch is reported; otherwise the mean training
// objective over the last `smoothing_window` steps. Bits. Divergence
// yields failed = true.
MiReport MineEstimate(MineNet& net, std::span<const int> t, const Tensor& y,
                      const MineConfig& config, Rng& rng);

}  // namespace wiretap

#endif  // WIRETAP_MINE_H_
