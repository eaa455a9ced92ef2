#pragma once

// Greedy and beam decoding over the mixture distribution. PAD, BOS and SEP
// are never emitted. Decoding runs without recording gradients and only
// reads the parameters, so one parameter set can serve concurrent decodes.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adcraft/generator/model.hpp"
#include "adcraft/generator/vocab.hpp"

namespace adcraft::generator {

struct DecodeOptions {
  std::size_t max_len = 30;
  std::optional<double> force_p_gen;
};

struct DecodeResult {
  std::vector<std::string> tokens;  // EOS excluded, extended ids resolved
  std::vector<std::size_t> ids;     // extended ids of every step, EOS included
  double log_prob = 0.0;            // sum over steps, EOS included
  std::vector<double> p_gen;        // per step
  bool finished = false;            // ended with EOS

  // log_prob divided by the number of steps.
  double normalized() const;
  double p_gen_mean() const;
};

DecodeResult greedy_decode(const GenModelParams& params, const GenVocab& vocab,
                           const GenExample& ex, const DecodeOptions& options = {});
DecodeResult greedy_decode(const GenModelParams& params, const GenVocab& vocab,
                           std::span<const std::string> source, const DecodeOptions& options = {});

// Keeps the beam_width best partial sequences by summed log-prob at every
// step; finished sequences are ranked by normalized log-prob, best first.
// beam_width = 1 reproduces greedy_decode.
std::vector<DecodeResult> beam_decode(const GenModelParams& params, const GenVocab& vocab,
                                      const GenExample& ex, std::size_t beam_width,
                                      const DecodeOptions& options = {});
std::vector<DecodeResult> beam_decode(const GenModelParams& params, const GenVocab& vocab,
                                      std::span<const std::string> source,
                                      std::size_t beam_width, const DecodeOptions& options = {});

// True for ids the decoder may emit.
bool emittable(std::size_t id);

}  // namespace adcraft::generator
