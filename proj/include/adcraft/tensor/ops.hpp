#pragma once

// Differentiable operations. Tensors are rank 1 or rank 2, row-major.
// Every op checks shapes (DimensionError) and input finiteness
// (NumericError), and records a backward rule when an input needs grads.

#include <cstddef>
#include <span>
#include <vector>

#include "adcraft/tensor/tensor.hpp"

namespace adcraft::tensor {

// [n,k]x[k,m] -> [n,m];  [k]x[k,m] -> [m];  [n,k]x[k] -> [n];  [k]x[k] -> [1]
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor dot(const Tensor& a, const Tensor& b);

// Elementwise. `b` may also be a trailing-shape match of `a` (broadcast over
// the leading dim) or a single value; the arguments may come in either order.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
// 1 - a
Tensor one_minus(const Tensor& a);

// Concatenates along axis 0 (vectors end to end, matrices row-wise).
Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);
// Stacks equal-length vectors into a matrix, one per row.
Tensor stack(std::span<const Tensor> rows);

// Rows of `table` selected by `ids` -> [ids.size(), d].
Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids);
// Single row as a vector [d].
Tensor embedding_row(const Tensor& table, std::size_t id);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
// Natural log of max(a, floor). Entries at or below the floor get zero grad.
Tensor log(const Tensor& a, double floor = 0.0);

// Axis 0 for vectors; 0 (down columns) or 1 (along rows) for matrices.
Tensor softmax(const Tensor& a, std::size_t axis = 0);
Tensor log_softmax(const Tensor& a);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);

// Half-open range [begin, end) along axis 0.
Tensor slice(const Tensor& a, std::size_t begin, std::size_t end);
Tensor reshape(const Tensor& a, Shape shape);

// a[index] as a one-element tensor.
Tensor pick(const Tensor& a, std::size_t index);
Tensor gather(const Tensor& a, std::span<const std::size_t> indices);
// out[ids[i]] += a[i] for a vector `a`; result has `size` entries.
Tensor scatter_add(const Tensor& a, std::span<const std::size_t> ids, std::size_t size);

// Cosine similarity of every row of q [n,d] against every row of c [m,d]
// -> [n,m]. A zero-norm row gives similarity 0 and no gradient.
Tensor cosine_matrix(const Tensor& q, const Tensor& c);

// Per row: values sorted descending (ties by column), truncated or padded
// with `pad` to exactly k columns -> [n,k].
Tensor topk_rows(const Tensor& m, std::size_t k, double pad);

}  // namespace adcraft::tensor
