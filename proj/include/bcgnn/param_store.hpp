#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcgnn/errors.hpp"
#include "bcgnn/tensor.hpp"

namespace bcgnn {

/// Named trainable parameters in insertion order.
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
    std::size_t fan_in = 1;
  };

  /// Registers a zero-initialised parameter. Throws std::invalid_argument on
  /// duplicate names.
  Tensor& add(std::string name, Shape shape, std::size_t fan_in);

  bool contains(std::string_view name) const;
  const Tensor& at(std::string_view name) const;
  Tensor& at(std::string_view name);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t element_count() const;
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<Entry>& entries() noexcept { return entries_; }

  void zero_grad();

  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], drawn in insertion order.
  void initialize_uniform(std::uint64_t seed);

  /// Rounds every value to the nearest float32 so that checkpoints, which
  /// store f32, reproduce the in-memory parameters exactly.
  void round_to_float();

  /// Deep copy: independent storage, no gradients.
  ParamStore clone() const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Maximum over all parameter entries of
///   |analytic - central difference| / max(1, |central difference|).
/// Throws NumericError when a loss evaluation is not finite and
/// std::invalid_argument for eps outside [1e-5, 1e-2]. Leaves analytic grads
/// from the unperturbed evaluation in `params`.
double grad_check(const std::function<Tensor(const ParamStore&)>& loss_fn, ParamStore& params,
                  double eps);

}  // namespace bcgnn
