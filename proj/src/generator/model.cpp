#include "adcraft/generator/model.hpp"

#include <random>

#include "adcraft/errors.hpp"
#include "adcraft/tensor/ops.hpp"

namespace adcraft::generator {

namespace ops = adcraft::tensor;

std::vector<tensor::NamedTensor> GenModelParams::named() const {
  return {{"embedding", embedding}, {"enc_fwd_w", enc_fwd_w}, {"enc_fwd_b", enc_fwd_b},
          {"enc_bwd_w", enc_bwd_w}, {"enc_bwd_b", enc_bwd_b}, {"dec_w", dec_w},
          {"dec_b", dec_b},         {"init_h_w", init_h_w},   {"init_h_b", init_h_b},
          {"init_c_w", init_c_w},   {"init_c_b", init_c_b},   {"w_att", w_att},
          {"w_c", w_c},             {"w_s", w_s},             {"w_x", w_x},
          {"b_ptr", b_ptr},         {"v_w", v_w},             {"v_b", v_b},
          {"vp_w", vp_w},           {"vp_b", vp_b}};
}

std::vector<tensor::NamedTensor> GenModelParams::named_trainable() const {
  auto all = named();
  if (hyper.copy) return all;
  std::vector<tensor::NamedTensor> out;
  for (auto& nt : all)
    if (nt.first != "w_c" && nt.first != "w_s" && nt.first != "w_x" && nt.first != "b_ptr")
      out.push_back(nt);
  return out;
}

std::vector<Tensor> GenModelParams::trainable() const {
  std::vector<Tensor> out;
  for (auto& nt : named_trainable()) out.push_back(nt.second);
  return out;
}

GenModelParams init_params(const GenHyper& hyper, std::size_t vocab_size, std::uint64_t seed) {
  if (vocab_size <= kNumSpecials) throw ContractError("generator: vocabulary holds only specials");
  const std::size_t d = hyper.embed_dim, h = hyper.hidden;
  std::mt19937_64 rng(seed);
  auto w = [&](tensor::Shape s) { return Tensor::uniform(std::move(s), -0.1, 0.1, rng); };
  auto b = [](std::size_t n) { return Tensor::zeros({n}, true); };
  GenModelParams p;
  p.hyper = hyper;
  p.vocab_size = vocab_size;
  p.embedding = w({vocab_size, d});
  p.enc_fwd_w = w({4 * h, d + h});
  p.enc_fwd_b = b(4 * h);
  p.enc_bwd_w = w({4 * h, d + h});
  p.enc_bwd_b = b(4 * h);
  p.dec_w = w({4 * h, d + h});
  p.dec_b = b(4 * h);
  p.init_h_w = w({h, 2 * h});
  p.init_h_b = b(h);
  p.init_c_w = w({h, 2 * h});
  p.init_c_b = b(h);
  p.w_att = w({2 * h, h});
  p.w_c = w({2 * h});
  p.w_s = w({h});
  p.w_x = w({d});
  p.b_ptr = b(1);
  p.v_w = w({h, 3 * h});
  p.v_b = b(h);
  p.vp_w = w({vocab_size, h});
  p.vp_b = b(vocab_size);
  return p;
}

LstmState lstm_cell(const Tensor& w, const Tensor& b, const Tensor& x, const LstmState& prev) {
  const std::size_t h = prev.h.size();
  Tensor z = ops::add(ops::matmul(w, ops::concat({x, prev.h})), b);
  Tensor i = ops::sigmoid(ops::slice(z, 0, h));
  Tensor f = ops::sigmoid(ops::slice(z, h, 2 * h));
  Tensor g = ops::tanh(ops::slice(z, 2 * h, 3 * h));
  Tensor o = ops::sigmoid(ops::slice(z, 3 * h, 4 * h));
  Tensor c = ops::add(ops::mul(f, prev.c), ops::mul(i, g));
  return {ops::mul(o, ops::tanh(c)), c};
}

Encoding encode(const GenModelParams& params, std::span<const std::size_t> source_ids) {
  const std::size_t n = source_ids.size(), h = params.hyper.hidden;
  if (n == 0) throw ContractError("encode: empty source");
  for (std::size_t id : source_ids)
    if (id >= params.vocab_size)
      throw ContractError("encode: id " + std::to_string(id) + " outside the fixed vocabulary of " +
                          std::to_string(params.vocab_size));
  std::vector<Tensor> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = ops::embedding_row(params.embedding, source_ids[i]);

  std::vector<Tensor> fwd(n), bwd(n);
  LstmState st{Tensor::zeros({h}), Tensor::zeros({h})};
  for (std::size_t i = 0; i < n; ++i) {
    st = lstm_cell(params.enc_fwd_w, params.enc_fwd_b, xs[i], st);
    fwd[i] = st.h;
  }
  st = {Tensor::zeros({h}), Tensor::zeros({h})};
  for (std::size_t i = n; i-- > 0;) {
    st = lstm_cell(params.enc_bwd_w, params.enc_bwd_b, xs[i], st);
    bwd[i] = st.h;
  }
  std::vector<Tensor> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = ops::concat({fwd[i], bwd[i]});

  Encoding enc;
  enc.states = ops::stack(rows);
  enc.att_keys = ops::matmul(enc.states, params.w_att);
  Tensor last = ops::concat({fwd[n - 1], bwd[0]});
  enc.init.h = ops::tanh(ops::add(ops::matmul(params.init_h_w, last), params.init_h_b));
  enc.init.c = ops::add(ops::matmul(params.init_c_w, last), params.init_c_b);
  return enc;
}

Attention attend(const GenModelParams&, const Encoding& enc, const Tensor& s) {
  Tensor a = ops::softmax(ops::matmul(enc.att_keys, s));
  return {a, ops::matmul(a, enc.states)};
}

Tensor generation_prob(const GenModelParams& params, const Tensor& context, const Tensor& s,
                       const Tensor& x) {
  Tensor z = ops::add(ops::add(ops::dot(params.w_c, context), ops::dot(params.w_s, s)),
                      ops::add(ops::dot(params.w_x, x), params.b_ptr));
  return ops::sigmoid(z);
}

Tensor mixture_dist(const Tensor& p_gen, const Tensor& p_vocab, const Tensor& attention,
                    std::span<const std::size_t> source_ext_ids, std::size_t n_ext) {
  if (attention.size() != source_ext_ids.size())
    throw DimensionError("mixture_dist: " + std::to_string(attention.size()) +
                         " attention weights for " + std::to_string(source_ext_ids.size()) +
                         " source ids");
  const std::size_t total = p_vocab.size() + n_ext;
  for (std::size_t id : source_ext_ids)
    if (id >= total)
      throw ContractError("mixture_dist: source id " + std::to_string(id) + " needs more than " +
                          std::to_string(n_ext) + " extended slots");
  Tensor gen = ops::mul(p_vocab, p_gen);
  if (n_ext > 0) gen = ops::concat({gen, Tensor::zeros({n_ext})});
  Tensor copy = ops::scatter_add(ops::mul(attention, ops::one_minus(p_gen)), source_ext_ids, total);
  return ops::add(gen, copy);
}

StepOutput decoder_step(const GenModelParams& params, const Encoding& enc, const GenExample& ex,
                        std::size_t prev_token, const LstmState& state,
                        const StepOptions& options) {
  const std::size_t fixed = prev_token < params.vocab_size ? prev_token : kUnk;
  Tensor x = ops::embedding_row(params.embedding, fixed);
  StepOutput out;
  out.state = lstm_cell(params.dec_w, params.dec_b, x, state);
  const Tensor& s = out.state.h;
  out.attention = attend(params, enc, s);
  Tensor hidden = ops::add(ops::matmul(params.v_w, ops::concat({s, out.attention.context})),
                           params.v_b);
  out.p_vocab = ops::softmax(ops::add(ops::matmul(params.vp_w, hidden), params.vp_b));
  if (!params.hyper.copy) {
    out.p_gen = Tensor::scalar(1.0);
    out.dist = out.p_vocab;
    return out;
  }
  out.p_gen = options.force_p_gen ? Tensor::scalar(*options.force_p_gen)
                                  : generation_prob(params, out.attention.context, s, x);
  out.dist = mixture_dist(out.p_gen, out.p_vocab, out.attention.weights, ex.source_ext_ids,
                          ex.n_ext());
  return out;
}

Tensor sequence_loss(const GenModelParams& params, const GenExample& ex,
                     const StepOptions& options) {
  if (ex.target_ext_ids.size() < 2) throw ContractError("sequence_loss: empty target");
  Encoding enc = encode(params, ex.source_ids);
  LstmState state = enc.init;
  std::vector<Tensor> picked;
  for (std::size_t t = 1; t < ex.target_ext_ids.size(); ++t) {
    StepOutput step = decoder_step(params, enc, ex, ex.target_ext_ids[t - 1], state, options);
    std::size_t gold = ex.target_ext_ids[t];
    if (!params.hyper.copy && gold >= params.vocab_size) gold = kUnk;
    picked.push_back(ops::pick(step.dist, gold));
    state = step.state;
  }
  return ops::scale(ops::mean(ops::log(ops::concat(picked), kLossFloor)), -1.0);
}

}  // namespace adcraft::generator
