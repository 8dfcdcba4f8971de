#include "bcgnn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bcgnn::ops {
namespace {

using detail::GradNode;
using detail::TensorImpl;
using ImplPtr = std::shared_ptr<TensorImpl>;
using BackwardFn = std::function<void(const TensorImpl&)>;

Tensor make_result(Shape shape, std::vector<double> data, std::vector<ImplPtr> inputs,
                   BackwardFn backward) {
  auto out = std::make_shared<TensorImpl>();
  out->shape = std::move(shape);
  out->data = std::move(data);
  const bool tracked =
      std::any_of(inputs.begin(), inputs.end(), [](const ImplPtr& p) { return p->requires_grad; });
  if (tracked) {
    out->requires_grad = true;
    out->grad_fn = std::make_shared<GradNode>(GradNode{std::move(inputs), std::move(backward)});
  }
  return Tensor(std::move(out));
}

TensorImpl& impl_of(const Tensor& t, const char* op) {
  if (!t.defined()) throw ShapeError(op, "undefined operand");
  return *t.impl();
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    std::string detail = "operand shapes " + shape_string(a.shape()) + " and " +
                         shape_string(b.shape()) + " differ";
    if (a.rank() == b.rank()) {
      for (std::size_t d = 0; d < a.rank(); ++d) {
        if (a.dim(d) != b.dim(d)) {
          detail += " at dimension " + std::to_string(d);
          break;
        }
      }
    } else {
      detail += " in rank";
    }
    throw ShapeError(op, detail);
  }
}

void require_rank(const char* op, const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(op, std::string(what) + " must have rank " + std::to_string(rank) +
                             ", got " + shape_string(t.shape()));
  }
}

template <typename Fwd, typename Bwd>
Tensor unary(const Tensor& a, const char* op, Fwd fwd, Bwd bwd) {
  auto& ai = impl_of(a, op);
  std::vector<double> out(ai.data.size());
  std::transform(ai.data.begin(), ai.data.end(), out.begin(), fwd);
  auto* ap = a.impl().get();
  return make_result(ai.shape, std::move(out), {a.impl()}, [ap, bwd](const TensorImpl& o) {
    for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i] * bwd(ap->data[i], o.data[i]);
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  auto& ai = impl_of(a, "add");
  auto& bi = impl_of(b, "add");
  std::vector<double> out(ai.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ai.data[i] + bi.data[i];
  auto* ap = a.impl().get();
  auto* bp = b.impl().get();
  return make_result(ai.shape, std::move(out), {a.impl(), b.impl()}, [ap, bp](const TensorImpl& o) {
    if (ap->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i];
    if (bp->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) bp->grad[i] += o.grad[i];
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  auto& ai = impl_of(a, "sub");
  auto& bi = impl_of(b, "sub");
  std::vector<double> out(ai.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ai.data[i] - bi.data[i];
  auto* ap = a.impl().get();
  auto* bp = b.impl().get();
  return make_result(ai.shape, std::move(out), {a.impl(), b.impl()}, [ap, bp](const TensorImpl& o) {
    if (ap->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i];
    if (bp->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) bp->grad[i] -= o.grad[i];
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  auto& ai = impl_of(a, "mul");
  auto& bi = impl_of(b, "mul");
  std::vector<double> out(ai.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ai.data[i] * bi.data[i];
  auto* ap = a.impl().get();
  auto* bp = b.impl().get();
  return make_result(ai.shape, std::move(out), {a.impl(), b.impl()}, [ap, bp](const TensorImpl& o) {
    if (ap->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i] * bp->data[i];
    if (bp->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) bp->grad[i] += o.grad[i] * ap->data[i];
  });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_same_shape("div", a, b);
  auto& ai = impl_of(a, "div");
  auto& bi = impl_of(b, "div");
  std::vector<double> out(ai.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ai.data[i] / bi.data[i];
  auto* ap = a.impl().get();
  auto* bp = b.impl().get();
  return make_result(ai.shape, std::move(out), {a.impl(), b.impl()}, [ap, bp](const TensorImpl& o) {
    if (ap->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i] / bp->data[i];
    if (bp->requires_grad)
      for (std::size_t i = 0; i < o.grad.size(); ++i) bp->grad[i] -= o.grad[i] * o.data[i] / bp->data[i];
  });
}

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, "scale", [factor](double x) { return x * factor; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(
      a, "add_scalar", [offset](double x) { return x + offset; }, [](double, double) { return 1.0; });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  require_rank("add_bias", x, 2, "input");
  require_rank("add_bias", bias, 1, "bias");
  if (bias.dim(0) != x.dim(1)) {
    throw ShapeError("add_bias", "bias length " + std::to_string(bias.dim(0)) +
                                     " does not match input dimension 1 of size " +
                                     std::to_string(x.dim(1)));
  }
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  auto& xi = impl_of(x, "add_bias");
  auto& bi = impl_of(bias, "add_bias");
  std::vector<double> out(xi.data);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += bi.data[c];
  auto* xp = x.impl().get();
  auto* bp = bias.impl().get();
  return make_result(xi.shape, std::move(out), {x.impl(), bias.impl()},
                     [xp, bp, rows, cols](const TensorImpl& o) {
                       if (xp->requires_grad)
                         for (std::size_t i = 0; i < o.grad.size(); ++i) xp->grad[i] += o.grad[i];
                       if (bp->requires_grad)
                         for (std::size_t r = 0; r < rows; ++r)
                           for (std::size_t c = 0; c < cols; ++c) bp->grad[c] += o.grad[r * cols + c];
                     });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor log(const Tensor& a) {
  return unary(
      a, "log", [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor log_sigmoid(const Tensor& a) {
  return unary(
      a, "log_sigmoid",
      [](double x) { return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); },
      [](double x, double) {
        // d/dx log(sigmoid(x)) = 1 - sigmoid(x) = sigmoid(-x)
        if (x >= 0.0) {
          const double e = std::exp(-x);
          return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(x));
      });
}

Tensor sqrt(const Tensor& a) {
  return unary(
      a, "sqrt", [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / y; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank("matmul", a, 2, "left operand");
  require_rank("matmul", b, 2, "right operand");
  if (a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul", "inner dimensions differ: left dimension 1 is " +
                                   std::to_string(a.dim(1)) + ", right dimension 0 is " +
                                   std::to_string(b.dim(0)));
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  const auto& ad = impl_of(a, "matmul").data;
  const auto& bd = impl_of(b, "matmul").data;
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ad[i * k + p];
      if (av == 0.0) continue;
      const double* brow = bd.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  auto* ap = a.impl().get();
  auto* bp = b.impl().get();
  return make_result({m, n}, std::move(out), {a.impl(), b.impl()},
                     [ap, bp, m, k, n](const TensorImpl& o) {
                       const double* g = o.grad.data();
                       if (ap->requires_grad) {
                         // dA = dC * B^T
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             const double* brow = bp->data.data() + p * n;
                             const double* grow = g + i * n;
                             double acc = 0.0;
                             for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
                             ap->grad[i * k + p] += acc;
                           }
                       }
                       if (bp->requires_grad) {
                         // dB = A^T * dC
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t p = 0; p < k; ++p) {
                             const double av = ap->data[i * k + p];
                             if (av == 0.0) continue;
                             double* bg = bp->grad.data() + p * n;
                             const double* grow = g + i * n;
                             for (std::size_t j = 0; j < n; ++j) bg[j] += av * grow[j];
                           }
                       }
                     });
}

Tensor transpose(const Tensor& a) {
  require_rank("transpose", a, 2, "input");
  const std::size_t r = a.dim(0), c = a.dim(1);
  const auto& ad = impl_of(a, "transpose").data;
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = ad[i * c + j];
  auto* ap = a.impl().get();
  return make_result({c, r}, std::move(out), {a.impl()}, [ap, r, c](const TensorImpl& o) {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) ap->grad[i * c + j] += o.grad[j * r + i];
  });
}

Tensor sum(const Tensor& a) {
  const auto& ad = impl_of(a, "sum").data;
  double total = 0.0;
  for (double v : ad) total += v;
  auto* ap = a.impl().get();
  return make_result({1}, {total}, {a.impl()}, [ap](const TensorImpl& o) {
    for (double& g : ap->grad) g += o.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ShapeError("mean", "empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat", "no operands");
  if (axis > 1) throw ShapeError("concat", "axis must be 0 or 1");
  for (const auto& p : parts) require_rank("concat", p, 2, "operand");
  const std::size_t fixed = parts[0].dim(1 - axis);
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.dim(1 - axis) != fixed) {
      throw ShapeError("concat", "dimension " + std::to_string(1 - axis) + " mismatch: " +
                                     std::to_string(p.dim(1 - axis)) + " vs " +
                                     std::to_string(fixed));
    }
    total += p.dim(axis);
  }
  const std::size_t rows = axis == 0 ? total : fixed;
  const std::size_t cols = axis == 0 ? fixed : total;
  std::vector<double> out(rows * cols);
  std::vector<ImplPtr> inputs;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const auto& pd = p.impl()->data;
    const std::size_t pr = p.dim(0), pc = p.dim(1);
    for (std::size_t i = 0; i < pr; ++i)
      for (std::size_t j = 0; j < pc; ++j) {
        const std::size_t r = axis == 0 ? i + offset : i;
        const std::size_t c = axis == 0 ? j : j + offset;
        out[r * cols + c] = pd[i * pc + j];
      }
    inputs.push_back(p.impl());
    offsets.push_back(offset);
    offset += p.dim(axis);
  }
  std::vector<TensorImpl*> raw;
  for (const auto& p : inputs) raw.push_back(p.get());
  return make_result({rows, cols}, std::move(out), std::move(inputs),
                     [raw, offsets, axis, cols](const TensorImpl& o) {
                       for (std::size_t k = 0; k < raw.size(); ++k) {
                         auto* p = raw[k];
                         if (!p->requires_grad) continue;
                         const std::size_t pr = p->shape[0], pc = p->shape[1];
                         for (std::size_t i = 0; i < pr; ++i)
                           for (std::size_t j = 0; j < pc; ++j) {
                             const std::size_t r = axis == 0 ? i + offsets[k] : i;
                             const std::size_t c = axis == 0 ? j : j + offsets[k];
                             p->grad[i * pc + j] += o.grad[r * cols + c];
                           }
                       }
                     });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end) {
  require_rank("slice", a, 2, "input");
  if (axis > 1) throw ShapeError("slice", "axis must be 0 or 1");
  if (begin >= end || end > a.dim(axis)) {
    throw ShapeError("slice", "range [" + std::to_string(begin) + ", " + std::to_string(end) +
                                  ") invalid for dimension " + std::to_string(axis) +
                                  " of size " + std::to_string(a.dim(axis)));
  }
  const std::size_t rows = a.dim(0), cols = a.dim(1);
  const std::size_t out_rows = axis == 0 ? end - begin : rows;
  const std::size_t out_cols = axis == 0 ? cols : end - begin;
  const auto& ad = a.impl()->data;
  std::vector<double> out(out_rows * out_cols);
  const std::size_t r0 = axis == 0 ? begin : 0, c0 = axis == 0 ? 0 : begin;
  for (std::size_t i = 0; i < out_rows; ++i)
    for (std::size_t j = 0; j < out_cols; ++j) out[i * out_cols + j] = ad[(i + r0) * cols + j + c0];
  auto* ap = a.impl().get();
  return make_result({out_rows, out_cols}, std::move(out), {a.impl()},
                     [ap, out_rows, out_cols, cols, r0, c0](const TensorImpl& o) {
                       for (std::size_t i = 0; i < out_rows; ++i)
                         for (std::size_t j = 0; j < out_cols; ++j)
                           ap->grad[(i + r0) * cols + j + c0] += o.grad[i * out_cols + j];
                     });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("reshape", "cannot view " + shape_string(a.shape()) + " as " +
                                    shape_string(shape));
  }
  auto* ap = a.impl().get();
  return make_result(std::move(shape), a.impl()->data, {a.impl()}, [ap](const TensorImpl& o) {
    for (std::size_t i = 0; i < o.grad.size(); ++i) ap->grad[i] += o.grad[i];
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows) {
  if (a.rank() == 0) throw ShapeError("gather_rows", "input has rank 0");
  const std::size_t n = a.dim(0);
  const std::size_t width = n == 0 ? 0 : a.numel() / n;
  for (std::size_t r : rows) {
    if (r >= n) {
      throw ShapeError("gather_rows", "row index " + std::to_string(r) +
                                          " out of range for dimension 0 of size " +
                                          std::to_string(n));
    }
  }
  Shape shape = a.shape();
  shape[0] = rows.size();
  const auto& ad = a.impl()->data;
  std::vector<double> out(rows.size() * width);
  for (std::size_t k = 0; k < rows.size(); ++k)
    std::copy_n(ad.begin() + static_cast<std::ptrdiff_t>(rows[k] * width), width,
                out.begin() + static_cast<std::ptrdiff_t>(k * width));
  auto* ap = a.impl().get();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return make_result(std::move(shape), std::move(out), {a.impl()},
                     [ap, idx = std::move(idx), width](const TensorImpl& o) {
                       for (std::size_t k = 0; k < idx.size(); ++k)
                         for (std::size_t c = 0; c < width; ++c)
                           ap->grad[idx[k] * width + c] += o.grad[k * width + c];
                     });
}

Tensor segment_sum(const Tensor& a, std::span<const std::size_t> segment, std::size_t segments) {
  if (a.rank() == 0) throw ShapeError("segment_sum", "input has rank 0");
  if (segment.size() != a.dim(0)) {
    throw ShapeError("segment_sum", "segment list length " + std::to_string(segment.size()) +
                                        " does not match dimension 0 of size " +
                                        std::to_string(a.dim(0)));
  }
  const std::size_t width = a.dim(0) == 0 ? 0 : a.numel() / a.dim(0);
  for (std::size_t s : segment) {
    if (s >= segments) {
      throw ShapeError("segment_sum", "segment id " + std::to_string(s) + " out of range " +
                                          std::to_string(segments));
    }
  }
  Shape shape = a.shape();
  shape[0] = segments;
  const auto& ad = a.impl()->data;
  std::vector<double> out(segments * width, 0.0);
  for (std::size_t r = 0; r < segment.size(); ++r)
    for (std::size_t c = 0; c < width; ++c) out[segment[r] * width + c] += ad[r * width + c];
  auto* ap = a.impl().get();
  std::vector<std::size_t> idx(segment.begin(), segment.end());
  return make_result(std::move(shape), std::move(out), {a.impl()},
                     [ap, idx = std::move(idx), width](const TensorImpl& o) {
                       for (std::size_t r = 0; r < idx.size(); ++r)
                         for (std::size_t c = 0; c < width; ++c)
                           ap->grad[r * width + c] += o.grad[idx[r] * width + c];
                     });
}

Tensor conv1d(const Tensor& input, const Tensor& weight, const Tensor& bias) {
  require_rank("conv1d", input, 2, "input");
  require_rank("conv1d", weight, 3, "weight");
  require_rank("conv1d", bias, 1, "bias");
  const std::size_t d_in = input.dim(0), len = input.dim(1);
  const std::size_t d_out = weight.dim(0), k = weight.dim(2);
  if (weight.dim(1) != d_in) {
    throw ShapeError("conv1d", "weight dimension 1 is " + std::to_string(weight.dim(1)) +
                                   " but input dimension 0 (channels) is " + std::to_string(d_in));
  }
  if (bias.dim(0) != d_out) {
    throw ShapeError("conv1d", "bias dimension 0 is " + std::to_string(bias.dim(0)) +
                                   " but weight dimension 0 (output channels) is " +
                                   std::to_string(d_out));
  }
  if (k % 2 == 0) {
    throw ShapeError("conv1d", "kernel size (weight dimension 2) must be odd, got " +
                                   std::to_string(k));
  }
  if (len == 0) throw ShapeError("conv1d", "input dimension 1 (length) must be at least 1");

  const auto pad = static_cast<std::ptrdiff_t>(k / 2);
  const auto L = static_cast<std::ptrdiff_t>(len);
  const auto& x = input.impl()->data;
  const auto& w = weight.impl()->data;
  const auto& b = bias.impl()->data;
  std::vector<double> out(d_out * len);
  for (std::size_t o = 0; o < d_out; ++o) {
    double* orow = out.data() + o * len;
    std::fill(orow, orow + len, b[o]);
    for (std::size_t c = 0; c < d_in; ++c) {
      const double* xrow = x.data() + c * len;
      for (std::size_t t = 0; t < k; ++t) {
        const double wv = w[(o * d_in + c) * k + t];
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(t) - pad;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(L, L - shift);
        for (std::ptrdiff_t p = lo; p < hi; ++p) orow[p] += wv * xrow[p + shift];
      }
    }
  }
  auto* xp = input.impl().get();
  auto* wp = weight.impl().get();
  auto* bp = bias.impl().get();
  return make_result(
      {d_out, len}, std::move(out), {input.impl(), weight.impl(), bias.impl()},
      [xp, wp, bp, d_in, d_out, len, k, pad, L](const TensorImpl& o) {
        for (std::size_t oc = 0; oc < d_out; ++oc) {
          const double* g = o.grad.data() + oc * len;
          if (bp->requires_grad)
            for (std::size_t p = 0; p < len; ++p) bp->grad[oc] += g[p];
          for (std::size_t c = 0; c < d_in; ++c) {
            for (std::size_t t = 0; t < k; ++t) {
              const std::size_t widx = (oc * d_in + c) * k + t;
              const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(t) - pad;
              const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -shift);
              const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(L, L - shift);
              if (wp->requires_grad) {
                const double* xrow = xp->data.data() + c * len;
                double acc = 0.0;
                for (std::ptrdiff_t p = lo; p < hi; ++p) acc += g[p] * xrow[p + shift];
                wp->grad[widx] += acc;
              }
              if (xp->requires_grad) {
                const double wv = wp->data[widx];
                double* xg = xp->grad.data() + c * len;
                for (std::ptrdiff_t p = lo; p < hi; ++p) xg[p + shift] += g[p] * wv;
              }
            }
          }
        }
      });
}

namespace {

struct LerpTable {
  std::vector<std::size_t> left;  // left neighbour per position
  std::vector<double> frac;       // weight of the right neighbour
};

LerpTable lerp_table(const char* op, std::span<const double> positions, std::size_t len) {
  const double last = static_cast<double>(len) - 1.0;
  LerpTable t{std::vector<std::size_t>(positions.size()), std::vector<double>(positions.size())};
  for (std::size_t q = 0; q < positions.size(); ++q) {
    const double pos = positions[q];
    if (!(pos >= 0.0 && pos <= last)) {
      throw ShapeError(op, "position " + std::to_string(pos) + " outside [0, " +
                               std::to_string(last) + "] of source dimension 1");
    }
    if (len == 1) continue;
    auto x0 = static_cast<std::size_t>(std::floor(pos));
    if (x0 > len - 2) x0 = len - 2;
    t.left[q] = x0;
    t.frac[q] = pos - static_cast<double>(x0);
  }
  return t;
}

}  // namespace

Tensor lerp_gather(const Tensor& source, std::span<const double> positions, std::size_t samples) {
  require_rank("lerp_gather", source, 2, "source");
  if (samples == 0 || positions.size() % samples != 0) {
    throw ShapeError("lerp_gather", "position count " + std::to_string(positions.size()) +
                                        " is not a multiple of samples " + std::to_string(samples));
  }
  const std::size_t channels = source.dim(0), len = source.dim(1);
  const std::size_t groups = positions.size() / samples;
  auto [left, frac] = lerp_table("lerp_gather", positions, len);

  const auto& src = source.impl()->data;
  const std::size_t width = channels * samples;
  std::vector<double> out(groups * width);
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t c = 0; c < channels; ++c)
      for (std::size_t n = 0; n < samples; ++n) {
        const std::size_t q = g * samples + n;
        const double* row = src.data() + c * len;
        const double v0 = row[left[q]];
        const double v1 = len == 1 ? v0 : row[left[q] + 1];
        out[g * width + c * samples + n] = (1.0 - frac[q]) * v0 + frac[q] * v1;
      }
  auto* sp = source.impl().get();
  return make_result({groups, width}, std::move(out), {source.impl()},
                     [sp, left = std::move(left), frac = std::move(frac), groups, channels,
                      samples, len, width](const TensorImpl& o) {
                       for (std::size_t g = 0; g < groups; ++g)
                         for (std::size_t c = 0; c < channels; ++c)
                           for (std::size_t n = 0; n < samples; ++n) {
                             const std::size_t q = g * samples + n;
                             const double gv = o.grad[g * width + c * samples + n];
                             double* row = sp->grad.data() + c * len;
                             if (len == 1) {
                               row[0] += gv;
                               continue;
                             }
                             row[left[q]] += (1.0 - frac[q]) * gv;
                             row[left[q] + 1] += frac[q] * gv;
                           }
                     });
}

Tensor lerp_project(const Tensor& source, const Tensor& weight, std::span<const double> positions,
                    std::size_t samples) {
  require_rank("lerp_project", source, 2, "source");
  require_rank("lerp_project", weight, 2, "weight");
  if (samples == 0 || positions.size() % samples != 0) {
    throw ShapeError("lerp_project", "position count " + std::to_string(positions.size()) +
                                         " is not a multiple of samples " + std::to_string(samples));
  }
  const std::size_t channels = source.dim(0), len = source.dim(1);
  const std::size_t outputs = weight.dim(0);
  if (weight.dim(1) != channels * samples) {
    throw ShapeError("lerp_project", "weight dimension 1 is " + std::to_string(weight.dim(1)) +
                                         ", expected channels * samples = " +
                                         std::to_string(channels * samples));
  }
  const std::size_t groups = positions.size() / samples;
  auto table = lerp_table("lerp_project", positions, len);

  // proj[n][o][l] = sum_c W[o, c * samples + n] * source[c, l]
  const auto& src = source.impl()->data;
  const auto& w = weight.impl()->data;
  const std::size_t plane = outputs * len;
  std::vector<double> proj(samples * plane, 0.0);
  for (std::size_t n = 0; n < samples; ++n)
    for (std::size_t o = 0; o < outputs; ++o) {
      double* dst = proj.data() + n * plane + o * len;
      for (std::size_t c = 0; c < channels; ++c) {
        const double wv = w[o * channels * samples + c * samples + n];
        const double* row = src.data() + c * len;
        for (std::size_t l = 0; l < len; ++l) dst[l] += wv * row[l];
      }
    }

  std::vector<double> out(groups * outputs, 0.0);
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t n = 0; n < samples; ++n) {
      const std::size_t q = g * samples + n;
      const std::size_t l0 = table.left[q];
      const std::size_t l1 = len == 1 ? l0 : l0 + 1;
      const double f = table.frac[q];
      const double* p = proj.data() + n * plane;
      for (std::size_t o = 0; o < outputs; ++o)
        out[g * outputs + o] += (1.0 - f) * p[o * len + l0] + f * p[o * len + l1];
    }

  auto* sp = source.impl().get();
  auto* wp = weight.impl().get();
  return make_result(
      {groups, outputs}, std::move(out), {source.impl(), weight.impl()},
      [sp, wp, table = std::move(table), groups, channels, samples, len, outputs,
       plane](const TensorImpl& o) {
        std::vector<double> dproj(samples * plane, 0.0);
        for (std::size_t g = 0; g < groups; ++g)
          for (std::size_t n = 0; n < samples; ++n) {
            const std::size_t q = g * samples + n;
            const std::size_t l0 = table.left[q];
            const std::size_t l1 = len == 1 ? l0 : l0 + 1;
            const double f = table.frac[q];
            double* dp = dproj.data() + n * plane;
            for (std::size_t k = 0; k < outputs; ++k) {
              const double gv = o.grad[g * outputs + k];
              dp[k * len + l0] += (1.0 - f) * gv;
              dp[k * len + l1] += f * gv;
            }
          }
        for (std::size_t n = 0; n < samples; ++n)
          for (std::size_t k = 0; k < outputs; ++k) {
            const double* dp = dproj.data() + n * plane + k * len;
            for (std::size_t c = 0; c < channels; ++c) {
              const std::size_t widx = k * channels * samples + c * samples + n;
              const double* row = sp->data.data() + c * len;
              if (wp->requires_grad) {
                double acc = 0.0;
                for (std::size_t l = 0; l < len; ++l) acc += dp[l] * row[l];
                wp->grad[widx] += acc;
              }
              if (sp->requires_grad) {
                const double wv = wp->data[widx];
                double* srow = sp->grad.data() + c * len;
                for (std::size_t l = 0; l < len; ++l) srow[l] += wv * dp[l];
              }
            }
          }
      });
}

}  // namespace bcgnn::ops
