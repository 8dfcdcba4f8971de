#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bcgnn/tensor.hpp"

// Differentiable primitives. Every function records a backward rule when any
// operand requires a gradient and throws ShapeError on mismatched operands.
namespace bcgnn::ops {

// Elementwise, operands of identical shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);

/// x[R x C] + bias[C], bias broadcast over rows.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor log(const Tensor& a);
/// log(sigmoid(a)), stable for large |a|.
Tensor log_sigmoid(const Tensor& a);
Tensor sqrt(const Tensor& a);

/// [M x K] x [K x N] -> [M x N].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

/// Concatenation of rank-2 tensors along axis 0 (rows) or 1 (columns).
Tensor concat(std::span<const Tensor> parts, std::size_t axis);
/// Half-open range [begin, end) along `axis` of a rank-2 tensor.
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& a, Shape shape);

/// Rows of `a` (leading axis) selected by `rows`, duplicates allowed.
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> rows);
/// out[segment[r]] += a[r] over leading-axis rows; out has `segments` rows.
Tensor segment_sum(const Tensor& a, std::span<const std::size_t> segment, std::size_t segments);

/// Same-padded 1D convolution: input [D_in x L], weight [D_out x D_in x k]
/// with k odd, bias [D_out] -> [D_out x L].
Tensor conv1d(const Tensor& input, const Tensor& weight, const Tensor& bias);

/// Linear-interpolation gather from source [D x L]. `positions` holds
/// `groups * samples` fractional column coordinates in [0, L-1]; the result
/// is [groups x (D * samples)] with element (g, c * samples + n) equal to
/// channel c interpolated at positions[g * samples + n].
Tensor lerp_gather(const Tensor& source, std::span<const double> positions, std::size_t samples);

/// matmul(lerp_gather(source, positions, samples), transpose(weight)) with
/// weight [G x (D * samples)], computed by projecting every source column
/// first and interpolating the projections. Result [groups x G].
Tensor lerp_project(const Tensor& source, const Tensor& weight, std::span<const double> positions,
                    std::size_t samples);

}  // namespace bcgnn::ops
