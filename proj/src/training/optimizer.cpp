#include <cmath>

#include "bcgnn/training.hpp"

namespace bcgnn::train {

AdamW::AdamW(ParamStore& params, AdamWOptions options) : params_(params), options_(options) {
  for (const auto& e : params_.entries()) {
    m_.emplace_back(e.tensor.numel(), 0.0);
    v_.emplace_back(e.tensor.numel(), 0.0);
  }
}

void AdamW::step() {
  ++step_;
  const auto t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(options_.beta1, t);
  const double correction2 = 1.0 - std::pow(options_.beta2, t);
  auto& entries = params_.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    auto& tensor = entries[k].tensor;
    if (!tensor.has_grad()) continue;
    auto values = tensor.mutable_values();
    const auto grad = tensor.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      m[i] = options_.beta1 * m[i] + (1.0 - options_.beta1) * grad[i];
      v[i] = options_.beta2 * v[i] + (1.0 - options_.beta2) * grad[i] * grad[i];
      const double update = (m[i] / correction1) / (std::sqrt(v[i] / correction2) + options_.epsilon);
      values[i] -= options_.learning_rate * (update + options_.weight_decay * values[i]);
    }
  }
  params_.round_to_float();
}

}  // namespace bcgnn::train
