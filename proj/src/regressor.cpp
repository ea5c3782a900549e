#include "cloudrls/regressor.hpp"

#include <string>

namespace cloudrls {

namespace {

Matrix stack_regressor(const ArxModelSpec& spec, const std::vector<double>& past_outputs,
                       const std::vector<double>& past_inputs, bool pad_missing) {
  if (spec.n_y != 1 || spec.n_u != 1)
    throw ConfigError("build_arx_regressor: only scalar signals (n_y = n_u = 1) are supported");
  spec.validate();

  const int need_y = spec.n_a;
  const int need_u = spec.n_k + spec.n_b;
  if (!pad_missing) {
    if (static_cast<int>(past_outputs.size()) < need_y)
      throw WarmupError("build_arx_regressor: need " + std::to_string(need_y) +
                        " past outputs, have " + std::to_string(past_outputs.size()));
    if (static_cast<int>(past_inputs.size()) < need_u)
      throw WarmupError("build_arx_regressor: need " + std::to_string(need_u) +
                        " past inputs, have " + std::to_string(past_inputs.size()));
  }

  const auto at = [](const std::vector<double>& v, int i) {
    return i < static_cast<int>(v.size()) ? v[static_cast<size_t>(i)] : 0.0;
  };

  Matrix X(spec.n_theta(), 1);
  int row = 0;
  for (int i = 0; i < spec.n_a; ++i) X(row++, 0) = at(past_outputs, i);
  for (int i = 0; i < spec.n_b; ++i) X(row++, 0) = at(past_inputs, spec.n_k + i);
  return X;
}

}  // namespace

Matrix build_arx_regressor(const ArxModelSpec& spec, const std::vector<double>& past_outputs,
                           const std::vector<double>& past_inputs) {
  return stack_regressor(spec, past_outputs, past_inputs, false);
}

Matrix build_arx_regressor_padded(const ArxModelSpec& spec,
                                  const std::vector<double>& past_outputs,
                                  const std::vector<double>& past_inputs) {
  return stack_regressor(spec, past_outputs, past_inputs, true);
}

void SignalHistory::push(double y, double u) {
  outputs_.insert(outputs_.begin(), y);
  if (static_cast<int>(outputs_.size()) > output_depth_) outputs_.resize(output_depth_);
  inputs_.insert(inputs_.begin(), u);
  if (static_cast<int>(inputs_.size()) > input_depth_) inputs_.resize(input_depth_);
}

}  // namespace cloudrls
