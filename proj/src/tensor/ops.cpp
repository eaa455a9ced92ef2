#include "adcraft/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "adcraft/errors.hpp"
#include "adcraft/simd/kernels.hpp"

namespace adcraft::tensor {
namespace {

const simd::KernelTable& K() { return simd::active(); }

void check_finite(const Tensor& t, const char* op) {
  for (double v : t.values())
    if (!std::isfinite(v))
      throw NumericError(std::string(op) + ": non-finite input in tensor of shape " +
                         shape_str(t.shape()));
}

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                       shape_str(b));
}

void require_rank(const Tensor& t, std::size_t lo, std::size_t hi, const char* op) {
  if (!t.defined()) throw ContractError(std::string(op) + ": undefined tensor");
  if (t.rank() < lo || t.rank() > hi)
    throw DimensionError(std::string(op) + ": unsupported shape " + shape_str(t.shape()));
}

// Grad slot of a parent, or null when that parent is not differentiated.
double* grad_of(const NodePtr& p) {
  if (!p->requires_grad) return nullptr;
  p->ensure_grad();
  return p->grad.data();
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() >= big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

enum class BinOp { kAdd, kSub, kMul };

Tensor binary(const Tensor& a, const Tensor& b, BinOp op, const char* name) {
  require_rank(a, 1, 2, name);
  require_rank(b, 1, 2, name);
  check_finite(a, name);
  check_finite(b, name);
  // big index i pairs with small index i % period
  bool swapped = false;
  const Tensor* big = &a;
  const Tensor* small = &b;
  if (a.shape() != b.shape()) {
    if (b.size() == 1 || is_suffix(b.shape(), a.shape())) {
    } else if (a.size() == 1 || is_suffix(a.shape(), b.shape())) {
      std::swap(big, small);
      swapped = true;
    } else {
      mismatch(name, a.shape(), b.shape());
    }
  }
  const std::size_t n = big->size();
  const std::size_t period = small->size();
  const auto bv = big->values();
  const auto sv = small->values();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = bv[i], y = sv[i % period];
    switch (op) {
      case BinOp::kAdd: out[i] = x + y; break;
      case BinOp::kSub: out[i] = swapped ? y - x : x - y; break;
      case BinOp::kMul: out[i] = x * y; break;
    }
  }
  return make_result(big->shape(), std::move(out), {big->node(), small->node()},
                     [op, swapped, n, period](Node& self) {
                       const NodePtr& pb = self.parents[0];
                       const NodePtr& ps = self.parents[1];
                       double* gb = grad_of(pb);
                       double* gs = grad_of(ps);
                       const double* g = self.grad.data();
                       // sign of d(out)/d(operand) for subtraction
                       const double sign_b = (op == BinOp::kSub && swapped) ? -1.0 : 1.0;
                       const double sign_s = (op == BinOp::kSub && !swapped) ? -1.0 : 1.0;
                       for (std::size_t i = 0; i < n; ++i) {
                         const std::size_t j = i % period;
                         if (op == BinOp::kMul) {
                           if (gb) gb[i] += g[i] * ps->value[j];
                           if (gs) gs[j] += g[i] * pb->value[i];
                         } else {
                           if (gb) gb[i] += sign_b * g[i];
                           if (gs) gs[j] += sign_s * g[i];
                         }
                       }
                     });
}

template <typename Fwd, typename Deriv>
Tensor unary(const Tensor& a, const char* name, Fwd fwd, Deriv deriv) {
  require_rank(a, 1, 2, name);
  check_finite(a, name);
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = fwd(av[i]);
  return make_result(a.shape(), std::move(out), {a.node()}, [deriv](Node& self) {
    const NodePtr& p = self.parents[0];
    double* gp = grad_of(p);
    if (!gp) return;
    for (std::size_t i = 0; i < self.value.size(); ++i)
      gp[i] += self.grad[i] * deriv(p->value[i], self.value[i]);
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 1, 2, "matmul");
  require_rank(b, 1, 2, "matmul");
  const std::size_t n = a.rank() == 2 ? a.dim(0) : 1;
  const std::size_t k = a.rank() == 2 ? a.dim(1) : a.dim(0);
  const std::size_t kb = b.dim(0);
  const std::size_t m = b.rank() == 2 ? b.dim(1) : 1;
  if (k != kb) mismatch("matmul", a.shape(), b.shape());
  check_finite(a, "matmul");
  check_finite(b, "matmul");
  Shape shape;
  if (a.rank() == 2) shape.push_back(n);
  if (b.rank() == 2) shape.push_back(m);
  if (shape.empty()) shape.push_back(1);
  std::vector<double> out(n * m, 0.0);
  K().gemm_nn(a.values().data(), b.values().data(), out.data(), n, k, m);
  return make_result(std::move(shape), std::move(out), {a.node(), b.node()},
                     [n, k, m](Node& self) {
                       const NodePtr& pa = self.parents[0];
                       const NodePtr& pb = self.parents[1];
                       if (double* ga = grad_of(pa))
                         K().gemm_nt(self.grad.data(), pb->value.data(), ga, n, m, k);
                       if (double* gb = grad_of(pb))
                         K().gemm_tn(pa->value.data(), self.grad.data(), gb, n, k, m);
                     });
}

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.rank() != 1 || b.rank() != 1 || a.size() != b.size())
    mismatch("dot", a.shape(), b.shape());
  return matmul(a, b);
}

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kAdd, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kSub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(a, b, BinOp::kMul, "mul"); }

Tensor scale(const Tensor& a, double factor) {
  return unary(
      a, "scale", [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return unary(
      a, "add_scalar", [offset](double x) { return x + offset; },
      [](double, double) { return 1.0; });
}

Tensor one_minus(const Tensor& a) {
  return unary(
      a, "one_minus", [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat: no inputs");
  const std::size_t rank = parts[0].rank();
  std::size_t rows = 0;
  for (const Tensor& t : parts) {
    require_rank(t, 1, 2, "concat");
    if (t.rank() != rank || (rank == 2 && t.dim(1) != parts[0].dim(1)))
      mismatch("concat", parts[0].shape(), t.shape());
    check_finite(t, "concat");
    rows += t.dim(0);
  }
  Shape shape = parts[0].shape();
  shape[0] = rows;
  std::vector<double> out;
  out.reserve(shape_size(shape));
  std::vector<NodePtr> parents;
  std::vector<std::size_t> offsets;
  for (const Tensor& t : parts) {
    offsets.push_back(out.size());
    out.insert(out.end(), t.values().begin(), t.values().end());
    parents.push_back(t.node());
  }
  return make_result(std::move(shape), std::move(out), std::move(parents),
                     [offsets](Node& self) {
                       for (std::size_t i = 0; i < self.parents.size(); ++i) {
                         const NodePtr& p = self.parents[i];
                         double* gp = grad_of(p);
                         if (!gp) continue;
                         const double* g = self.grad.data() + offsets[i];
                         for (std::size_t j = 0; j < p->value.size(); ++j) gp[j] += g[j];
                       }
                     });
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor stack(std::span<const Tensor> rows) {
  if (rows.empty()) throw ContractError("stack: no inputs");
  const std::size_t width = rows[0].size();
  for (const Tensor& r : rows) {
    if (r.rank() != 1 || r.size() != width) mismatch("stack", rows[0].shape(), r.shape());
  }
  Tensor flat = concat(rows);
  return reshape(flat, {rows.size(), width});
}

Tensor embedding_lookup(const Tensor& table, std::span<const std::size_t> ids) {
  require_rank(table, 2, 2, "embedding_lookup");
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  for (std::size_t id : ids)
    if (id >= vocab)
      throw ContractError("embedding_lookup: id " + std::to_string(id) +
                          " outside table of " + std::to_string(vocab) + " rows");
  std::vector<double> out(ids.size() * d);
  const auto tv = table.values();
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy_n(tv.begin() + ids[i] * d, d, out.begin() + i * d);
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  return make_result({ids.size(), d}, std::move(out), {table.node()},
                     [idv = std::move(idv), d](Node& self) {
                       double* gt = grad_of(self.parents[0]);
                       if (!gt) return;
                       for (std::size_t i = 0; i < idv.size(); ++i)
                         K().axpy(1.0, self.grad.data() + i * d, gt + idv[i] * d, d);
                     });
}

Tensor embedding_row(const Tensor& table, std::size_t id) {
  const std::size_t ids[1] = {id};
  return reshape(embedding_lookup(table, ids), {table.dim(1)});
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a, "sigmoid",
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(
      a, "tanh", [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor exp(const Tensor& a) {
  return unary(
      a, "exp", [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a, double floor) {
  for (double v : a.values())
    if (!(v > floor) && floor <= 0.0)
      throw NumericError("log: non-positive input " + std::to_string(v));
  return unary(
      a, "log", [floor](double x) { return std::log(std::max(x, floor)); },
      [floor](double x, double) { return x > floor ? 1.0 / x : 0.0; });
}

namespace {

// Splits a rank<=2 tensor into `lanes` independent lines of `len` elements
// with `stride` between consecutive elements of a line.
struct Lines {
  std::size_t lanes, len, stride, lane_step;
};

Lines lines_for(const Tensor& a, std::size_t axis, const char* op) {
  require_rank(a, 1, 2, op);
  if (a.rank() == 1) {
    if (axis != 0) throw DimensionError(std::string(op) + ": axis out of range");
    return {1, a.dim(0), 1, 0};
  }
  const std::size_t r = a.dim(0), c = a.dim(1);
  if (axis == 0) return {c, r, c, 1};
  if (axis == 1) return {r, c, 1, c};
  throw DimensionError(std::string(op) + ": axis out of range");
}

}  // namespace

Tensor softmax(const Tensor& a, std::size_t axis) {
  const Lines ln = lines_for(a, axis, "softmax");
  check_finite(a, "softmax");
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t l = 0; l < ln.lanes; ++l) {
    const std::size_t base = l * ln.lane_step;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ln.len; ++i) mx = std::max(mx, av[base + i * ln.stride]);
    double z = 0.0;
    for (std::size_t i = 0; i < ln.len; ++i) {
      const double e = std::exp(av[base + i * ln.stride] - mx);
      out[base + i * ln.stride] = e;
      z += e;
    }
    for (std::size_t i = 0; i < ln.len; ++i) out[base + i * ln.stride] /= z;
  }
  return make_result(a.shape(), std::move(out), {a.node()}, [ln](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    const double* y = self.value.data();
    const double* g = self.grad.data();
    for (std::size_t l = 0; l < ln.lanes; ++l) {
      const std::size_t base = l * ln.lane_step;
      double inner = 0.0;
      for (std::size_t i = 0; i < ln.len; ++i) {
        const std::size_t j = base + i * ln.stride;
        inner += g[j] * y[j];
      }
      for (std::size_t i = 0; i < ln.len; ++i) {
        const std::size_t j = base + i * ln.stride;
        gp[j] += y[j] * (g[j] - inner);
      }
    }
  });
}

Tensor log_softmax(const Tensor& a) {
  require_rank(a, 1, 1, "log_softmax");
  check_finite(a, "log_softmax");
  const auto av = a.values();
  const double mx = *std::max_element(av.begin(), av.end());
  double z = 0.0;
  for (double v : av) z += std::exp(v - mx);
  const double lz = mx + std::log(z);
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - lz;
  return make_result(a.shape(), std::move(out), {a.node()}, [](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    double gsum = 0.0;
    for (double g : self.grad) gsum += g;
    for (std::size_t i = 0; i < self.value.size(); ++i)
      gp[i] += self.grad[i] - std::exp(self.value[i]) * gsum;
  });
}

Tensor sum(const Tensor& a) {
  require_rank(a, 1, 2, "sum");
  check_finite(a, "sum");
  double s = 0.0;
  for (double v : a.values()) s += v;
  return make_result({1}, {s}, {a.node()}, [](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    for (std::size_t i = 0; i < self.parents[0]->value.size(); ++i) gp[i] += self.grad[0];
  });
}

Tensor mean(const Tensor& a) {
  if (a.size() == 0) throw ContractError("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor slice(const Tensor& a, std::size_t begin, std::size_t end) {
  require_rank(a, 1, 2, "slice");
  if (begin > end || end > a.dim(0))
    throw DimensionError("slice [" + std::to_string(begin) + "," + std::to_string(end) +
                         ") out of range for shape " + shape_str(a.shape()));
  const std::size_t width = a.rank() == 2 ? a.dim(1) : 1;
  Shape shape = a.shape();
  shape[0] = end - begin;
  const auto av = a.values();
  std::vector<double> out(av.begin() + begin * width, av.begin() + end * width);
  const std::size_t offset = begin * width;
  return make_result(std::move(shape), std::move(out), {a.node()}, [offset](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gp[offset + i] += self.grad[i];
  });
}

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_size(shape) != a.size()) mismatch("reshape", a.shape(), shape);
  std::vector<double> out(a.values().begin(), a.values().end());
  return make_result(std::move(shape), std::move(out), {a.node()}, [](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    for (std::size_t i = 0; i < self.grad.size(); ++i) gp[i] += self.grad[i];
  });
}

Tensor pick(const Tensor& a, std::size_t index) {
  const std::size_t idx[1] = {index};
  return gather(a, idx);
}

Tensor gather(const Tensor& a, std::span<const std::size_t> indices) {
  require_rank(a, 1, 1, "gather");
  std::vector<double> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= a.size())
      throw ContractError("gather: index " + std::to_string(indices[i]) + " outside " +
                          shape_str(a.shape()));
    out[i] = a[indices[i]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  return make_result({idx.size()}, std::move(out), {a.node()}, [idx](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    for (std::size_t i = 0; i < idx.size(); ++i) gp[idx[i]] += self.grad[i];
  });
}

Tensor scatter_add(const Tensor& a, std::span<const std::size_t> ids, std::size_t size) {
  require_rank(a, 1, 1, "scatter_add");
  if (ids.size() != a.size())
    throw DimensionError("scatter_add: " + std::to_string(ids.size()) + " ids for " +
                         shape_str(a.shape()));
  check_finite(a, "scatter_add");
  std::vector<double> out(size, 0.0);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= size)
      throw ContractError("scatter_add: id " + std::to_string(ids[i]) + " >= size " +
                          std::to_string(size));
    out[ids[i]] += a[i];
  }
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  return make_result({size}, std::move(out), {a.node()}, [idv](Node& self) {
    double* gp = grad_of(self.parents[0]);
    if (!gp) return;
    for (std::size_t i = 0; i < idv.size(); ++i) gp[i] += self.grad[idv[i]];
  });
}

Tensor cosine_matrix(const Tensor& q, const Tensor& c) {
  require_rank(q, 2, 2, "cosine_matrix");
  require_rank(c, 2, 2, "cosine_matrix");
  if (q.dim(1) != c.dim(1)) mismatch("cosine_matrix", q.shape(), c.shape());
  check_finite(q, "cosine_matrix");
  check_finite(c, "cosine_matrix");
  const std::size_t n = q.dim(0), m = c.dim(0), d = q.dim(1);
  const double* qv = q.values().data();
  const double* cv = c.values().data();
  std::vector<double> qn(n), cn(m);
  for (std::size_t i = 0; i < n; ++i) qn[i] = std::sqrt(K().dot(qv + i * d, qv + i * d, d));
  for (std::size_t j = 0; j < m; ++j) cn[j] = std::sqrt(K().dot(cv + j * d, cv + j * d, d));
  std::vector<double> out(n * m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (qn[i] > 0.0 && cn[j] > 0.0)
        out[i * m + j] = K().dot(qv + i * d, cv + j * d, d) / (qn[i] * cn[j]);
  return make_result({n, m}, std::move(out), {q.node(), c.node()},
                     [n, m, d, qn = std::move(qn), cn = std::move(cn)](Node& self) {
                       const NodePtr& pq = self.parents[0];
                       const NodePtr& pc = self.parents[1];
                       double* gq = grad_of(pq);
                       double* gc = grad_of(pc);
                       const double* qv = pq->value.data();
                       const double* cv = pc->value.data();
                       for (std::size_t i = 0; i < n; ++i)
                         for (std::size_t j = 0; j < m; ++j) {
                           if (!(qn[i] > 0.0 && cn[j] > 0.0)) continue;
                           const double g = self.grad[i * m + j];
                           if (g == 0.0) continue;
                           const double cosv = self.value[i * m + j];
                           const double inv = 1.0 / (qn[i] * cn[j]);
                           // d cos / dq = c/(|q||c|) - cos q/|q|^2, symmetric for c
                           if (gq) {
                             K().axpy(g * inv, cv + j * d, gq + i * d, d);
                             K().axpy(-g * cosv / (qn[i] * qn[i]), qv + i * d, gq + i * d, d);
                           }
                           if (gc) {
                             K().axpy(g * inv, qv + i * d, gc + j * d, d);
                             K().axpy(-g * cosv / (cn[j] * cn[j]), cv + j * d, gc + j * d, d);
                           }
                         }
                     });
}

Tensor topk_rows(const Tensor& mat, std::size_t k, double pad) {
  require_rank(mat, 2, 2, "topk_rows");
  check_finite(mat, "topk_rows");
  const std::size_t n = mat.dim(0), m = mat.dim(1);
  const std::size_t take = std::min(k, m);
  std::vector<double> out(n * k, pad);
  std::vector<std::size_t> src(n * take);
  std::vector<std::size_t> order(m);
  const auto mv = mat.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const double* row = mv.data() + i * m;
    std::stable_sort(order.begin(), order.end(),
                     [row](std::size_t x, std::size_t y) { return row[x] > row[y]; });
    for (std::size_t r = 0; r < take; ++r) {
      out[i * k + r] = row[order[r]];
      src[i * take + r] = i * m + order[r];
    }
  }
  return make_result({n, k}, std::move(out), {mat.node()},
                     [n, k, take, src = std::move(src)](Node& self) {
                       double* gp = grad_of(self.parents[0]);
                       if (!gp) return;
                       for (std::size_t i = 0; i < n; ++i)
                         for (std::size_t r = 0; r < take; ++r)
                           gp[src[i * take + r]] += self.grad[i * k + r];
                     });
}

}  // namespace adcraft::tensor
