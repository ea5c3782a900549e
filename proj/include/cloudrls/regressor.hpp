#pragma once

#include "cloudrls/types.hpp"

#include <vector>

namespace cloudrls {

/// Builds the ARX regressor
///   X(t) = [y(t-1) ... y(t-n_a)  u(t-n_k-1) ... u(t-n_k-n_b)]'
/// from scalar signal history ordered most-recent-first:
/// past_outputs[0] = y(t-1), past_inputs[0] = u(t-1), and so on.
///
/// Throws WarmupError when fewer than n_a outputs or n_k + n_b inputs are
/// available; the caller decides the padding policy.
Matrix build_arx_regressor(const ArxModelSpec& spec,
                           const std::vector<double>& past_outputs,
                           const std::vector<double>& past_inputs);

/// Same stacking, but missing history is treated as zero. This is the
/// warm-up policy used by the data generator, which starts every signal
/// from rest.
Matrix build_arx_regressor_padded(const ArxModelSpec& spec,
                                  const std::vector<double>& past_outputs,
                                  const std::vector<double>& past_inputs);

/// Fixed-depth most-recent-first history of one agent's scalar signals.
class SignalHistory {
 public:
  explicit SignalHistory(const ArxModelSpec& spec)
      : output_depth_(spec.n_a), input_depth_(spec.n_k + spec.n_b) {}

  void push(double y, double u);

  const std::vector<double>& outputs() const { return outputs_; }
  const std::vector<double>& inputs() const { return inputs_; }

 private:
  int output_depth_;
  int input_depth_;
  std::vector<double> outputs_;  // outputs_[0] = y(t-1)
  std::vector<double> inputs_;   // inputs_[0] = u(t-1)
};

}  // namespace cloudrls
