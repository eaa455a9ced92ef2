#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/grad_check.hpp"
#include "adcraft/tensor/ops.hpp"
#include "doctest.h"

namespace t = adcraft::tensor;
using t::Tensor;

namespace {

Tensor rand_param(t::Shape shape, std::mt19937_64& rng, double scale = 0.5) {
  return Tensor::uniform(std::move(shape), -scale, scale, rng, true);
}

void expect_passes(const std::function<Tensor()>& f, std::vector<t::NamedTensor> params) {
  const auto report = t::grad_check(f, params);
  for (const auto& p : report.params) {
    INFO(p.name << " worst element " << p.worst_index << ": analytic " << p.worst_analytic
                << " numeric " << p.worst_numeric);
    CHECK(p.max_rel_error < 1e-4);
  }
}

}  // namespace

TEST_CASE("gradient of sum(x*x) is 2x") {
  Tensor x = Tensor::vector({1, 2, 3}, true);
  t::backward(t::sum(t::mul(x, x)));
  CHECK(x.grad()[0] == 2);
  CHECK(x.grad()[1] == 4);
  CHECK(x.grad()[2] == 6);
}

TEST_CASE("gradient of sum(a+b) is ones for both") {
  Tensor a = Tensor::vector({1, -2}, true);
  Tensor b = Tensor::vector({5, 7}, true);
  t::backward(t::sum(t::add(a, b)));
  for (double g : a.grad()) CHECK(g == 1);
  for (double g : b.grad()) CHECK(g == 1);
}

TEST_CASE("reuse accumulates gradients") {
  Tensor x = Tensor::scalar(3, true);
  // y = x*x + x -> dy/dx = 2x + 1
  t::backward(t::add(t::mul(x, x), x));
  CHECK(x.grad()[0] == 7);
  // a second backward without zeroing adds on top
  t::backward(t::add(t::mul(x, x), x));
  CHECK(x.grad()[0] == 14);
}

TEST_CASE("backward on a non-scalar is a contract error") {
  Tensor x = Tensor::vector({1, 2}, true);
  const Tensor y = t::scale(x, 2.0);
  CHECK_THROWS_AS(t::backward(y), adcraft::ContractError);
  t::Tape::current().clear();
}

TEST_CASE("tape records in topological order and is released by backward") {
  t::Tape::current().clear();
  Tensor x = Tensor::vector({1, 2}, true);
  const Tensor y = t::tanh(x);
  const Tensor z = t::sum(y);
  CHECK(t::Tape::current().size() == 2);
  CHECK(y.node()->tape_index < z.node()->tape_index);
  t::backward(z);
  CHECK(t::Tape::current().empty());
}

TEST_CASE("no-grad guard records nothing") {
  t::Tape::current().clear();
  Tensor x = Tensor::vector({1, 2}, true);
  {
    t::NoGradGuard guard;
    const Tensor y = t::sum(t::mul(x, x));
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(t::Tape::current().empty());
}

TEST_CASE("grad_check: x^2 at 3") {
  Tensor x = Tensor::scalar(3, true);
  std::vector<t::NamedTensor> params{{"x", x}};
  const auto report = t::grad_check([&] { return t::mul(x, x); }, params);
  REQUIRE(report.params.size() == 1);
  CHECK(report.params[0].worst_analytic == 6.0);
  CHECK(report.params[0].worst_numeric == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(report.max_rel_error < 1e-9);
}

TEST_CASE("grad_check: frozen parameter is left out") {
  Tensor x = Tensor::scalar(3, true);
  Tensor frozen = Tensor::scalar(2, false);
  std::vector<t::NamedTensor> params{{"x", x}, {"frozen", frozen}};
  const auto report = t::grad_check([&] { return t::mul(x, frozen); }, params);
  REQUIRE(report.params.size() == 1);
  CHECK(report.params[0].name == "x");
}

TEST_CASE("grad_check: nondeterministic function is rejected") {
  Tensor x = Tensor::scalar(1, true);
  std::vector<t::NamedTensor> params{{"x", x}};
  int calls = 0;
  CHECK_THROWS_AS(t::grad_check(
                      [&] {
                        ++calls;
                        return t::scale(x, static_cast<double>(calls));
                      },
                      params),
                  adcraft::OracleError);
}

TEST_CASE("grad_check: bilinear attention scorer on random 4x4") {
  std::mt19937_64 rng(3);
  Tensor h = rand_param({4, 4}, rng);  // four encoder states
  Tensor w = rand_param({4, 4}, rng);
  Tensor s = rand_param({4}, rng);
  const Tensor r = Tensor::uniform({4}, -1, 1, rng, false);
  auto f = [&] { return t::sum(t::mul(t::matmul(h, t::matmul(w, s)), r)); };
  expect_passes(f, {{"h", h}, {"w_att", w}, {"s", s}});
}

TEST_CASE("grad_check: full LSTM cell step") {
  std::mt19937_64 rng(17);
  const std::size_t d = 3, hidden = 4;
  Tensor x = rand_param({d}, rng);
  Tensor h = rand_param({hidden}, rng);
  Tensor c = rand_param({hidden}, rng);
  Tensor w = rand_param({d + hidden, 4 * hidden}, rng);
  Tensor b = rand_param({4 * hidden}, rng);
  const Tensor rh = Tensor::uniform({hidden}, -1, 1, rng, false);
  const Tensor rc = Tensor::uniform({hidden}, -1, 1, rng, false);
  auto f = [&] {
    const Tensor gates = t::add(t::matmul(t::concat({x, h}), w), b);
    const Tensor i = t::sigmoid(t::slice(gates, 0, hidden));
    const Tensor fg = t::sigmoid(t::slice(gates, hidden, 2 * hidden));
    const Tensor g = t::tanh(t::slice(gates, 2 * hidden, 3 * hidden));
    const Tensor o = t::sigmoid(t::slice(gates, 3 * hidden, 4 * hidden));
    const Tensor c2 = t::add(t::mul(fg, c), t::mul(i, g));
    const Tensor h2 = t::mul(o, t::tanh(c2));
    return t::add(t::sum(t::mul(h2, rh)), t::sum(t::mul(c2, rc)));
  };
  expect_passes(f, {{"x", x}, {"h", h}, {"c", c}, {"w", w}, {"b", b}});
}

TEST_CASE("grad_check: every primitive op on random inputs") {
  std::mt19937_64 rng(29);
  Tensor a = rand_param({3, 4}, rng);
  Tensor v = rand_param({4}, rng);
  Tensor p = Tensor::uniform({5}, 0.2, 1.0, rng, true);
  Tensor table = rand_param({6, 4}, rng);
  Tensor cands = rand_param({5, 4}, rng);
  const Tensor r12 = Tensor::uniform({3, 4}, -1, 1, rng, false);
  const Tensor r3 = Tensor::uniform({3}, -1, 1, rng, false);
  const std::size_t ids[] = {1, 4, 1};
  const std::size_t scatter_ids[] = {0, 2, 2, 1, 0};

  const std::vector<std::pair<const char*, std::function<Tensor()>>> cases = {
      {"broadcast add/mul/sub",
       [&] { return t::sum(t::mul(t::sub(t::add(a, v), t::mul(a, v)), r12)); }},
      {"matmul vec", [&] { return t::sum(t::mul(t::matmul(a, v), r3)); }},
      {"softmax rows", [&] { return t::sum(t::mul(t::softmax(a, 1), r12)); }},
      {"softmax cols", [&] { return t::sum(t::mul(t::softmax(a, 0), r12)); }},
      {"log_softmax", [&] { return t::pick(t::log_softmax(v), 2); }},
      {"log/exp", [&] { return t::sum(t::add(t::log(p), t::exp(p))); }},
      {"tanh/sigmoid", [&] { return t::sum(t::mul(t::tanh(t::sigmoid(a)), r12)); }},
      {"embedding", [&] { return t::sum(t::mul(t::embedding_lookup(table, ids), t::reshape(r12, {3, 4}))); }},
      {"scatter/gather",
       [&] { return t::sum(t::mul(t::scatter_add(p, scatter_ids, 3), r3)); }},
      {"cosine+topk",
       [&] { return t::sum(t::mul(t::topk_rows(t::cosine_matrix(a, cands), 4, -1.0), r12)); }},
      {"mean/scale/one_minus", [&] { return t::mean(t::one_minus(t::scale(p, 3.0))); }},
  };
  for (const auto& [name, f] : cases) {
    INFO(name);
    expect_passes(f, {{"a", a}, {"v", v}, {"p", p}, {"table", table}, {"cands", cands}});
  }
}
