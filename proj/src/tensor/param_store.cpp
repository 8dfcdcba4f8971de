#include "bcgnn/param_store.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bcgnn/random.hpp"

namespace bcgnn {

Tensor& ParamStore::add(std::string name, Shape shape, std::size_t fan_in) {
  if (index_.contains(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), Tensor::zeros(std::move(shape), true), fan_in});
  return entries_.back().tensor;
}

bool ParamStore::contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

const Tensor& ParamStore::at(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + std::string(name));
  return entries_[it->second].tensor;
}

Tensor& ParamStore::at(std::string_view name) {
  return const_cast<Tensor&>(std::as_const(*this).at(name));
}

std::size_t ParamStore::element_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.tensor.zero_grad();
}

void ParamStore::initialize_uniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& e : entries_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(e.fan_in));
    for (double& v : e.tensor.mutable_values()) v = uniform(rng, -bound, bound);
  }
  round_to_float();
}

void ParamStore::round_to_float() {
  for (auto& e : entries_)
    for (double& v : e.tensor.mutable_values()) v = static_cast<double>(static_cast<float>(v));
}

ParamStore ParamStore::clone() const {
  ParamStore copy;
  for (const auto& e : entries_) {
    auto& t = copy.add(e.name, e.tensor.shape(), e.fan_in);
    std::copy(e.tensor.values().begin(), e.tensor.values().end(), t.mutable_values().begin());
  }
  return copy;
}

}  // namespace bcgnn
