#include "adcraft/generator/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adcraft/errors.hpp"

namespace adcraft::generator {

double DecodeResult::normalized() const {
  return ids.empty() ? 0.0 : log_prob / static_cast<double>(ids.size());
}

double DecodeResult::p_gen_mean() const {
  if (p_gen.empty()) return 0.0;
  double s = 0.0;
  for (double p : p_gen) s += p;
  return s / static_cast<double>(p_gen.size());
}

bool emittable(std::size_t id) { return id != kPad && id != kBos && id != kSep; }

namespace {

struct Hyp {
  std::vector<std::size_t> ids;
  double log_prob = 0.0;
  std::vector<double> p_gen;
  LstmState state;
};

double safe_log(double p) { return std::log(std::max(p, kLossFloor)); }

DecodeResult finish(const Hyp& h, const GenVocab& vocab, const GenExample& ex, bool done) {
  DecodeResult r;
  r.ids = h.ids;
  r.log_prob = h.log_prob;
  r.p_gen = h.p_gen;
  r.finished = done;
  for (std::size_t id : h.ids)
    if (id != kEos) r.tokens.push_back(resolve_token(vocab, ex, id));
  return r;
}

}  // namespace

DecodeResult greedy_decode(const GenModelParams& params, const GenVocab& vocab,
                           const GenExample& ex, const DecodeOptions& options) {
  auto beams = beam_decode(params, vocab, ex, 1, options);
  return beams.front();
}

DecodeResult greedy_decode(const GenModelParams& params, const GenVocab& vocab,
                           std::span<const std::string> source, const DecodeOptions& options) {
  return greedy_decode(params, vocab, make_source_example(vocab, source), options);
}

std::vector<DecodeResult> beam_decode(const GenModelParams& params, const GenVocab& vocab,
                                      std::span<const std::string> source,
                                      std::size_t beam_width, const DecodeOptions& options) {
  return beam_decode(params, vocab, make_source_example(vocab, source), beam_width, options);
}

std::vector<DecodeResult> beam_decode(const GenModelParams& params, const GenVocab& vocab,
                                      const GenExample& ex, std::size_t beam_width,
                                      const DecodeOptions& options) {
  if (beam_width == 0) throw ContractError("beam_decode: beam width must be at least 1");
  if (vocab.size() != params.vocab_size)
    throw ContractError("decode: vocabulary size " + std::to_string(vocab.size()) +
                        " does not match the model's " + std::to_string(params.vocab_size));
  tensor::NoGradGuard no_grad;
  const Encoding enc = encode(params, ex.source_ids);
  const StepOptions step_opts{options.force_p_gen};

  std::vector<Hyp> live{Hyp{{}, 0.0, {}, enc.init}};
  std::vector<DecodeResult> done;
  for (std::size_t t = 0; t < options.max_len && !live.empty(); ++t) {
    struct Cand {
      std::size_t parent;
      std::size_t id;
      double log_prob;
    };
    std::vector<Cand> cands;
    std::vector<StepOutput> steps;
    for (std::size_t h = 0; h < live.size(); ++h) {
      const std::size_t prev = live[h].ids.empty() ? kBos : live[h].ids.back();
      steps.push_back(decoder_step(params, enc, ex, prev, live[h].state, step_opts));
      const auto dist = steps.back().dist.values();
      for (std::size_t y = 0; y < dist.size(); ++y)
        if (emittable(y)) cands.push_back({h, y, live[h].log_prob + safe_log(dist[y])});
    }
    // Stable order: score, then parent rank, then token id.
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Cand& a, const Cand& b) { return a.log_prob > b.log_prob; });
    if (cands.size() > beam_width) cands.resize(beam_width);
    std::vector<Hyp> next;
    for (const Cand& c : cands) {
      Hyp h;
      h.ids = live[c.parent].ids;
      h.ids.push_back(c.id);
      h.log_prob = c.log_prob;
      h.p_gen = live[c.parent].p_gen;
      h.p_gen.push_back(steps[c.parent].p_gen.item());
      h.state = steps[c.parent].state;
      if (c.id == kEos)
        done.push_back(finish(h, vocab, ex, true));
      else if (h.ids.size() == options.max_len)
        done.push_back(finish(h, vocab, ex, false));
      else
        next.push_back(std::move(h));
    }
    live = std::move(next);
  }
  for (const Hyp& h : live) done.push_back(finish(h, vocab, ex, false));
  std::stable_sort(done.begin(), done.end(), [](const DecodeResult& a, const DecodeResult& b) {
    return a.normalized() > b.normalized();
  });
  if (done.size() > beam_width) done.resize(beam_width);
  return done;
}

}  // namespace adcraft::generator
