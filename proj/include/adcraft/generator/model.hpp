#pragma once

// Pointer-generator network: BiLSTM encoder, LSTM decoder, bilinear
// attention, and a soft switch p_gen between generating from the fixed
// vocabulary and copying source tokens through the attention weights.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adcraft/generator/vocab.hpp"
#include "adcraft/tensor/grad_check.hpp"
#include "adcraft/tensor/tensor.hpp"

namespace adcraft::generator {

using tensor::Tensor;

struct GenHyper {
  std::size_t embed_dim = 64;
  std::size_t hidden = 64;
  // false: plain attention decoder, P(y) = P_vocab(y), OOV targets become UNK.
  bool copy = true;
};

struct GenModelParams {
  GenHyper hyper;
  std::size_t vocab_size = 0;

  Tensor embedding;                         // [V, d]
  Tensor enc_fwd_w, enc_fwd_b;              // [4H, d+H], [4H]
  Tensor enc_bwd_w, enc_bwd_b;
  Tensor dec_w, dec_b;                      // [4H, d+H], [4H]
  Tensor init_h_w, init_h_b;                // [H, 2H], [H]
  Tensor init_c_w, init_c_b;
  Tensor w_att;                             // [2H, H]
  Tensor w_c, w_s, w_x, b_ptr;              // [2H], [H], [d], [1]
  Tensor v_w, v_b;                          // [H, 3H], [H]
  Tensor vp_w, vp_b;                        // [V, H], [V]

  // Every tensor, in checkpoint order.
  std::vector<tensor::NamedTensor> named() const;
  // The tensors the loss depends on (the p_gen head drops out without copy).
  std::vector<Tensor> trainable() const;
  std::vector<tensor::NamedTensor> named_trainable() const;
};

// Weights uniform(-0.1, 0.1), biases zero.
GenModelParams init_params(const GenHyper& hyper, std::size_t vocab_size, std::uint64_t seed);

struct LstmState {
  Tensor h, c;
};

// gates = W [x; h] + b split as input, forget, cell, output.
LstmState lstm_cell(const Tensor& w, const Tensor& b, const Tensor& x, const LstmState& prev);

struct Encoding {
  Tensor states;    // [n, 2H], row i = [forward_i; backward_i]
  Tensor att_keys;  // states * W_att, [n, H]
  LstmState init;   // decoder start state
};

Encoding encode(const GenModelParams& params, std::span<const std::size_t> source_ids);

struct Attention {
  Tensor weights;  // a^t, [n]
  Tensor context;  // c_t, [2H]
};

// e_i = h_i^T W_att s_t, a = softmax(e), c = sum_i a_i h_i.
Attention attend(const GenModelParams& params, const Encoding& enc, const Tensor& s);

// sigmoid(w_c.c + w_s.s + w_x.x + b_ptr) as a one-element tensor.
Tensor generation_prob(const GenModelParams& params, const Tensor& context, const Tensor& s,
                       const Tensor& x);

// p_gen * P_vocab over the fixed vocabulary, padded with zeros to V + n_ext,
// plus (1 - p_gen) * a_i scattered onto source_ext_ids.
Tensor mixture_dist(const Tensor& p_gen, const Tensor& p_vocab, const Tensor& attention,
                    std::span<const std::size_t> source_ext_ids, std::size_t n_ext);

struct StepOptions {
  std::optional<double> force_p_gen;
};

struct StepOutput {
  LstmState state;
  Attention attention;
  Tensor p_gen;
  Tensor p_vocab;
  Tensor dist;  // over V + n_ext with copy, V without
};

// One decoder step fed with the previous token (extended ids map to UNK).
StepOutput decoder_step(const GenModelParams& params, const Encoding& enc, const GenExample& ex,
                        std::size_t prev_token, const LstmState& state,
                        const StepOptions& options = {});

inline constexpr double kLossFloor = 1e-12;

// Teacher-forced mean over target steps of -log P(y*_t).
Tensor sequence_loss(const GenModelParams& params, const GenExample& ex,
                     const StepOptions& options = {});

}  // namespace adcraft::generator
