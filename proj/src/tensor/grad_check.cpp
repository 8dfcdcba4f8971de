#include <algorithm>
#include <cmath>
#include <string>

#include "bcgnn/param_store.hpp"

namespace bcgnn {
namespace {

double finite_loss(const std::function<Tensor(const ParamStore&)>& loss_fn, const ParamStore& params,
                   const char* where) {
  const double v = loss_fn(params).item();
  if (!std::isfinite(v)) throw NumericError(std::string("grad_check: non-finite loss at ") + where);
  return v;
}

}  // namespace

double grad_check(const std::function<Tensor(const ParamStore&)>& loss_fn, ParamStore& params,
                  double eps) {
  if (!(eps >= 1e-5 && eps <= 1e-2)) {
    throw std::invalid_argument("grad_check: eps must lie in [1e-5, 1e-2], got " +
                                std::to_string(eps));
  }
  params.zero_grad();
  const Tensor loss = loss_fn(params);
  if (!std::isfinite(loss.item())) throw NumericError("grad_check: non-finite loss at base point");
  loss.backward();

  double worst = 0.0;
  for (auto& entry : params.entries()) {
    auto values = entry.tensor.mutable_values();
    const std::vector<double> analytic = entry.tensor.has_grad()
                                             ? std::vector<double>(entry.tensor.grad().begin(),
                                                                   entry.tensor.grad().end())
                                             : std::vector<double>(values.size(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double up = finite_loss(loss_fn, params, "positive perturbation");
      values[i] = saved - eps;
      const double down = finite_loss(loss_fn, params, "negative perturbation");
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      worst = std::max(worst, std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric)));
    }
  }
  return worst;
}

}  // namespace bcgnn
