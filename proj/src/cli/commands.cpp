#include "adcraft/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "adcraft/cli/gradient_suite.hpp"
#include "adcraft/corpus/io.hpp"
#include "adcraft/corpus/splits.hpp"
#include "adcraft/corpus/synth.hpp"
#include "adcraft/generator/decode.hpp"
#include "adcraft/metrics/reports.hpp"
#include "adcraft/service/server.hpp"

namespace adcraft::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kSplits[] = {"train", "test", "val"};

fs::path split_file(const fs::path& dir, corpus::PairKind kind, const std::string& split) {
  return dir / (std::string(corpus::pair_kind_name(kind)) + "." + split + ".jsonl");
}

std::vector<corpus::CreativePair> load_split(const fs::path& dir, corpus::PairKind kind,
                                             const std::string& split) {
  const fs::path p = split_file(dir, kind, split);
  if (!fs::exists(p)) throw ContractError("missing dataset file " + p.string());
  return corpus::read_pairs_file(p);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ContractError("cannot write " + p.string());
  return out;
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ContractError(what + " not found: " + p.string());
}

corpus::PairKind kind_for(ranker::RankTask task) {
  return task == ranker::RankTask::kKeyphrase ? corpus::PairKind::kDtsi
                                              : corpus::PairKind::kDist;
}

std::string gen_row_name(const generator::GenTrainConfig& c) {
  std::string n = c.model.copy ? "ATTN+CP" : "ATTN";
  if (c.use_cat) n += "+CAT";
  if (c.use_img) n += "+IMG";
  return n;
}

std::string rank_row_name(const ranker::RankTrainConfig& c) {
  std::string n = "DRMM";
  if (c.use_cat) n += "+CAT";
  if (c.use_img) n += "+IMG";
  return n;
}

void print_rows(std::ostream& out, const std::vector<metrics::ReportRow>& rows, bool json) {
  out << (json ? metrics::rows_to_json(rows) + "\n" : metrics::rows_to_tsv(rows));
}

// ---- synth-data

struct SynthArgs {
  fs::path out;
  fs::path embeddings;
  std::size_t dim = 16;
  corpus::SynthConfig config;
};

int synth_data(const SynthArgs& a, std::ostream& out, bool json) {
  const auto ads = corpus::synthesize_ads(a.config);
  {
    auto f = open_out(a.out);
    corpus::write_ads(f, ads);
  }
  if (!a.embeddings.empty()) {
    auto f = open_out(a.embeddings);
    corpus::write_synthetic_embeddings(f, a.config, a.dim);
  }
  if (json)
    out << ordered_json{{"ads", ads.size()}, {"path", a.out.string()}}.dump() << "\n";
  else
    out << "wrote " << ads.size() << " ads to " << a.out.string() << "\n";
  return 0;
}

// ---- pipeline

struct PipelineArgs {
  fs::path ads;
  fs::path out;
  corpus::PairOptions pair_options;
  std::string split = "vanilla";
  std::uint64_t seed = 1;
  corpus::ExtractOptions extract;
};

struct StatsRow {
  std::string kind, split;
  std::size_t pairs = 0;
  double src_tokens = 0, tgt_tokens = 0, src_kp = 0, tgt_kp = 0, src_tags = 0, tgt_tags = 0;
};

StatsRow stats_for(const std::string& kind, const std::string& split,
                   const std::vector<corpus::CreativePair>& pairs) {
  StatsRow r{kind, split, pairs.size()};
  for (const auto& p : pairs) {
    r.src_tokens += static_cast<double>(p.source.text.size());
    r.tgt_tokens += static_cast<double>(p.target.text.size());
    r.src_kp += static_cast<double>(p.source_keyphrases.size());
    r.tgt_kp += static_cast<double>(p.target_keyphrases.size());
    r.src_tags += static_cast<double>(p.source_tags.size());
    r.tgt_tags += static_cast<double>(p.target_tags.size());
  }
  if (!pairs.empty()) {
    const double n = static_cast<double>(pairs.size());
    for (double* v : {&r.src_tokens, &r.tgt_tokens, &r.src_kp, &r.tgt_kp, &r.src_tags,
                      &r.tgt_tags})
      *v /= n;
  }
  return r;
}

int pipeline(const PipelineArgs& a, std::ostream& out, bool json) {
  const auto mode = corpus::parse_split_mode(a.split);
  const auto ads = corpus::ingest_ads_file(a.ads);
  std::vector<std::vector<std::string>> texts;
  texts.reserve(ads.size());
  for (const auto& ad : ads) texts.push_back(ad.text);
  const auto vocab = corpus::extract_keyphrases(texts, a.extract);

  fs::create_directories(a.out);
  {
    auto f = open_out(a.out / "keyphrases.tsv");
    corpus::write_vocabulary(f, vocab);
  }
  std::vector<StatsRow> stats;
  for (auto kind : {corpus::PairKind::kDtsi, corpus::PairKind::kDist}) {
    const auto pairs = corpus::build_pairs(ads, kind, a.pair_options, &vocab);
    const auto split = corpus::make_splits(pairs, mode, {}, a.seed);
    const std::string kn(corpus::pair_kind_name(kind));
    stats.push_back(stats_for(kn, "all", pairs));
    const std::vector<corpus::CreativePair>* parts[] = {&split.train, &split.test, &split.val};
    for (std::size_t i = 0; i < 3; ++i) {
      corpus::write_pairs_file(split_file(a.out, kind, kSplits[i]), *parts[i]);
      stats.push_back(stats_for(kn, kSplits[i], *parts[i]));
    }
  }

  std::ostringstream tsv;
  tsv << "kind\tsplit\tpairs\tsrc_tokens\ttgt_tokens\tsrc_keyphrases\ttgt_keyphrases\t"
         "src_tags\ttgt_tags\n";
  tsv << std::fixed << std::setprecision(4);
  for (const auto& r : stats)
    tsv << r.kind << '\t' << r.split << '\t' << r.pairs << '\t' << r.src_tokens << '\t'
        << r.tgt_tokens << '\t' << r.src_kp << '\t' << r.tgt_kp << '\t' << r.src_tags << '\t'
        << r.tgt_tags << '\n';
  {
    auto f = open_out(a.out / "stats.tsv");
    f << tsv.str();
  }
  if (json) {
    ordered_json j;
    j["ads"] = ads.size();
    j["keyphrases"] = vocab.size();
    j["splits"] = ordered_json::array();
    for (const auto& r : stats) j["splits"].push_back({{"kind", r.kind}, {"split", r.split},
                                                       {"pairs", r.pairs}});
    out << j.dump() << "\n";
  } else {
    out << tsv.str();
  }
  return 0;
}

// ---- train-gen

struct TrainGenArgs {
  fs::path data;
  fs::path out;
  std::string kind = "dtsi";
  std::string optimizer = "sgd";
  bool no_copy = false;
  generator::GenTrainConfig config;
};

int train_gen(TrainGenArgs a, std::ostream& out, bool json) {
  const auto kind = corpus::parse_pair_kind(a.kind);
  a.config.optimizer = tensor::parse_optimizer(a.optimizer);
  a.config.model.copy = !a.no_copy;
  const auto train = load_split(a.data, kind, "train");
  const auto val = load_split(a.data, kind, "val");
  const auto tp = generator::text_pairs(train, a.config.use_cat, a.config.use_img);
  const auto vp = generator::text_pairs(val, a.config.use_cat, a.config.use_img);
  const auto result = generator::train_generator(tp, vp, a.config);
  tensor::save_checkpoint(a.out, result.model.to_checkpoint());

  if (json) {
    ordered_json j;
    j["checkpoint"] = a.out.string();
    j["version"] = result.model.version();
    j["vocab"] = result.model.vocab.size();
    j["steps"] = result.steps;
    j["epochs"] = ordered_json::array();
    for (const auto& e : result.log)
      j["epochs"].push_back({{"epoch", e.epoch},
                             {"train_loss", e.train_loss},
                             {"val_loss", std::isfinite(e.val_loss) ? ordered_json(e.val_loss)
                                                                    : ordered_json(nullptr)},
                             {"learning_rate", e.learning_rate}});
    out << j.dump() << "\n";
  } else {
    out << "epoch\ttrain_loss\tval_loss\tlearning_rate\n" << std::fixed << std::setprecision(6);
    for (const auto& e : result.log)
      out << e.epoch << '\t' << e.train_loss << '\t' << e.val_loss << '\t' << e.learning_rate
          << '\n';
    out << "saved " << result.model.version() << " to " << a.out.string() << "\n";
  }
  return 0;
}

// ---- train-rank

struct TrainRankArgs {
  fs::path data;
  fs::path out;
  fs::path embeddings;
  std::string task = "keyphrase";
  ranker::RankTrainConfig config;
};

std::vector<std::string> candidates_for(ranker::RankTask task, const fs::path& data,
                                        const std::vector<corpus::CreativePair>& train) {
  if (task == ranker::RankTask::kImageTag) return ranker::tag_candidates(train);
  require_file(data / "keyphrases.tsv", "keyphrase vocabulary");
  return corpus::read_vocabulary_file(data / "keyphrases.tsv").texts();
}

int train_rank(TrainRankArgs a, std::ostream& out, bool json) {
  a.config.task = ranker::parse_rank_task(a.task);
  const auto train = load_split(a.data, kind_for(a.config.task), "train");
  const auto candidates = candidates_for(a.config.task, a.data, train);
  const auto examples =
      ranker::rank_examples(train, a.config.task, a.config.use_cat, a.config.use_img);
  std::optional<ranker::WordVectors> wv;
  if (!a.embeddings.empty()) wv = ranker::WordVectors::load(a.embeddings);
  const auto result =
      ranker::train_ranker(examples, candidates, a.config, wv ? &*wv : nullptr);
  tensor::save_checkpoint(a.out, result.model.to_checkpoint());

  if (json) {
    ordered_json j;
    j["checkpoint"] = a.out.string();
    j["version"] = result.model.version();
    j["candidates"] = candidates.size();
    j["triples"] = result.triples;
    j["epochs"] = ordered_json::array();
    for (const auto& e : result.log)
      j["epochs"].push_back({{"epoch", e.epoch},
                             {"mean_hinge", e.mean_hinge},
                             {"active_fraction", e.active_fraction}});
    out << j.dump() << "\n";
  } else {
    out << "epoch\tmean_hinge\tactive_fraction\n" << std::fixed << std::setprecision(6);
    for (const auto& e : result.log)
      out << e.epoch << '\t' << e.mean_hinge << '\t' << e.active_fraction << '\n';
    out << "saved " << result.model.version() << " to " << a.out.string() << "\n";
  }
  return 0;
}

// ---- eval-gen

struct EvalGenArgs {
  fs::path data;
  std::vector<std::string> checkpoints;
  std::string kind = "dtsi";
  std::string split = "test";
  std::size_t beam = 1;
  std::size_t max_len = 30;
  fs::path predictions;
  fs::path assist_checkpoint;
  std::vector<std::size_t> assist_r{1, 3};
};

int eval_gen(const EvalGenArgs& a, std::ostream& out, bool json) {
  const auto kind = corpus::parse_pair_kind(a.kind);
  require_file(a.data / "keyphrases.tsv", "keyphrase vocabulary");
  const auto vocab = corpus::read_vocabulary_file(a.data / "keyphrases.tsv");
  const auto pairs = load_split(a.data, kind, a.split);
  if (pairs.empty()) throw ContractError("no pairs in the " + a.split + " split");
  std::vector<generator::GenModel> models;
  for (const auto& c : a.checkpoints)
    models.push_back(generator::GenModel::from_checkpoint(tensor::load_checkpoint(c)));
  std::optional<ranker::RankModel> assist;
  if (!a.assist_checkpoint.empty())
    assist = ranker::RankModel::from_checkpoint(tensor::load_checkpoint(a.assist_checkpoint));

  std::vector<metrics::ReportRow> rows{
      metrics::gen_row("pred=src", metrics::baseline_pred_src(pairs, vocab))};
  tensor::NoGradGuard no_grad;
  for (const auto& m : models) {
    const std::string name = gen_row_name(m.config);
    std::vector<metrics::GenExampleEval> ex;
    std::ofstream pred;
    if (!a.predictions.empty()) pred = open_out(a.predictions / (name + ".jsonl"));
    for (const auto& p : pairs) {
      const auto src = corpus::augment_input(p, m.config.use_cat, m.config.use_img);
      const auto best =
          generator::beam_decode(m.params, m.vocab, src, a.beam, {a.max_len}).front();
      if (pred)
        pred << ordered_json{{"source", corpus::join_tokens(p.source.text)},
                             {"generated", corpus::join_tokens(best.tokens)},
                             {"log_prob", best.log_prob},
                             {"p_gen_mean", best.p_gen_mean()}}
                    .dump()
             << "\n";
      ex.push_back({p.target.text, best.tokens, corpus::match_keyphrases(p.target.text, vocab)});
    }
    const auto report = metrics::evaluate_generation(ex, vocab);
    rows.push_back(metrics::gen_row(name, report));
    if (!assist) continue;
    for (std::size_t r : a.assist_r) {
      metrics::GenEvalReport assisted = report;
      double kp_p = 0, kp_r = 0;
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto q = ranker::make_query(pairs[i].source.text, pairs[i].source.category,
                                          pairs[i].source_tags, assist->config.use_cat,
                                          assist->config.use_img);
        std::vector<std::string> ranked;
        for (const auto& item : ranker::top_k(assist->rank(q), r)) ranked.push_back(item.text);
        const auto s =
            metrics::assisted_kp(ex[i].hypothesis, ranked, r, ex[i].gold_keyphrases, vocab);
        kp_p += s.p;
        kp_r += s.r;
      }
      assisted.kp_p = kp_p / static_cast<double>(pairs.size());
      assisted.kp_r = kp_r / static_cast<double>(pairs.size());
      assisted.kp_f = metrics::f_score(assisted.kp_p, assisted.kp_r);
      rows.push_back(metrics::gen_row(name + " add-" + std::to_string(r), assisted));
    }
  }
  print_rows(out, rows, json);
  return 0;
}

// ---- eval-rank

struct EvalRankArgs {
  fs::path data;
  std::string task = "keyphrase";
  std::string split = "test";
  fs::path embeddings;
  std::vector<std::string> checkpoints;
  fs::path rankings;
};

int eval_rank(const EvalRankArgs& a, std::ostream& out, bool json) {
  const auto task = ranker::parse_rank_task(a.task);
  const auto kind = kind_for(task);
  const auto train = load_split(a.data, kind, "train");
  const auto test = load_split(a.data, kind, a.split);
  const auto candidates = candidates_for(task, a.data, train);
  std::vector<ranker::RankModel> models;
  for (const auto& c : a.checkpoints) {
    models.push_back(ranker::RankModel::from_checkpoint(tensor::load_checkpoint(c)));
    if (models.back().config.task != task)
      throw ContractError(c + " was trained for the " +
                          std::string(ranker::rank_task_name(models.back().config.task)) +
                          " task");
  }
  std::optional<ranker::WordVectors> wv;
  if (!a.embeddings.empty()) wv = ranker::WordVectors::load(a.embeddings);

  std::vector<std::vector<std::string>> docs;
  for (const auto& p : train) {
    docs.push_back(p.source.text);
    docs.push_back(p.target.text);
  }
  const ranker::TfidfIndex index(docs);
  const auto base_examples = ranker::rank_examples(test, task, false, false);

  std::vector<metrics::ReportRow> rows;
  auto evaluate = [&](const std::string& name, const std::vector<ranker::RankExample>& examples,
                      const auto& rank) {
    std::vector<metrics::RankQuery> queries;
    std::ofstream dump;
    if (!a.rankings.empty()) dump = open_out(a.rankings / (name + ".jsonl"));
    for (const auto& ex : examples) {
      const ranker::RankedList list = rank(ex);
      metrics::RankQuery q;
      q.relevant = ex.relevant;
      for (const auto& item : list) q.ranked.push_back(item.text);
      if (dump) {
        ordered_json j{{"query_id", ex.query_id}, {"candidates", ordered_json::array()}};
        for (const auto& item : ranker::top_k(list, 10))
          j["candidates"].push_back({{"text", item.text}, {"score", item.score}});
        dump << j.dump() << "\n";
      }
      queries.push_back(std::move(q));
    }
    rows.push_back(metrics::rank_row(name, metrics::evaluate_ranking(queries)));
  };

  if (wv)
    evaluate("EMB-SIM", base_examples, [&](const ranker::RankExample& ex) {
      return ranker::baseline_emb_sim(*wv, ex.text, candidates);
    });
  evaluate("TF-IDF", base_examples, [&](const ranker::RankExample& ex) {
    return ranker::baseline_tfidf(index, ex.text, candidates);
  });
  tensor::NoGradGuard no_grad;
  for (const auto& m : models)
    evaluate(rank_row_name(m.config),
             ranker::rank_examples(test, task, m.config.use_cat, m.config.use_img),
             [&](const ranker::RankExample& ex) { return m.rank(ex.query); });
  print_rows(out, rows, json);
  return 0;
}

// ---- recommend

struct RecommendArgs {
  service::ModelPaths models;
  service::RefineRequest request;
};

int recommend(const RecommendArgs& a, std::ostream& out) {
  const auto refiner = service::Refiner::load(a.models);
  out << service::to_json(refiner.refine(a.request)).dump(2) << "\n";
  return 0;
}

// ---- grad-check

int grad_check(std::uint64_t seed, std::ostream& out, bool json) {
  const auto results = gradient_suite(seed);
  bool ok = true;
  ordered_json j = ordered_json::array();
  if (!json) out << "model\ttensor\telements\tmax_rel_error\n";
  for (const auto& r : results) {
    ok = ok && r.report.passed();
    for (const auto& p : r.report.params) {
      if (json) {
        j.push_back({{"model", r.model},
                     {"tensor", p.name},
                     {"elements", p.elements},
                     {"max_rel_error", p.max_rel_error}});
      } else {
        std::ostringstream e;
        e << std::scientific << std::setprecision(3) << p.max_rel_error;
        out << r.model << '\t' << p.name << '\t' << p.elements << '\t' << e.str() << '\n';
      }
    }
  }
  if (json)
    out << ordered_json{{"passed", ok}, {"tensors", j}}.dump() << "\n";
  else
    out << (ok ? "all gradients within tolerance\n" : "gradient check FAILED\n");
  return ok ? 0 : 1;
}

// ---- serve

int serve(service::ServerConfig cfg, const std::vector<std::string>& explicit_flags,
          std::ostream& err) {
  cfg = service::apply_env(std::move(cfg), explicit_flags);
  auto refiner = std::make_shared<const service::Refiner>(service::Refiner::load(cfg.models));
  service::Server server(refiner, cfg.static_dir);
  err << "adcraft serving on http://" << cfg.host << ":" << cfg.port
      << (refiner->ready() ? "" : " (degraded: models missing)") << std::endl;
  if (!server.listen(cfg.host, cfg.port)) {
    err << "error: cannot listen on " << cfg.host << ":" << cfg.port << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"adcraft: ad-creative refinement toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  bool json = false;
  app.add_flag("--json", json, "Machine-readable JSON output");

  std::function<int()> action;

  // synth-data
  SynthArgs synth;
  auto* s = app.add_subcommand("synth-data", "Write a seeded synthetic ad log");
  s->add_option("--out", synth.out, "Output JSON-lines ad log")->required();
  s->add_option("--seed", synth.config.seed, "Random seed")->capture_default_str();
  s->add_option("--advertisers", synth.config.advertisers, "Number of advertisers")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->add_option("--embeddings", synth.embeddings, "Also write word vectors here");
  s->add_option("--dim", synth.dim, "Word vector dimension")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  s->callback([&] { action = [&] { return synth_data(synth, out, json); }; });

  // pipeline
  PipelineArgs pipe;
  auto* p = app.add_subcommand("pipeline", "Build pairs, splits and statistics from an ad log");
  p->add_option("--ads", pipe.ads, "Input JSON-lines ad log")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pipe.out, "Output directory")->required();
  p->add_option("--delta", pipe.pair_options.delta_percent, "Minimum relative CTR lift, percent")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  p->add_option("--min-impressions", pipe.pair_options.min_impressions,
                "Ads need strictly more impressions")
      ->capture_default_str();
  p->add_option("--split", pipe.split, "Split mode")
      ->capture_default_str()
      ->check(CLI::IsMember({"vanilla", "cold-start", "cold_start"}));
  p->add_option("--seed", pipe.seed, "Split seed")->capture_default_str();
  p->add_option("--kp-max-len", pipe.extract.max_len, "Longest keyphrase")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  p->add_option("--kp-min-freq", pipe.extract.min_freq, "Minimum keyphrase frequency")
      ->capture_default_str();
  p->add_option("--kp-top", pipe.extract.top_n, "Keyphrase vocabulary size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  p->callback([&] { action = [&] { return pipeline(pipe, out, json); }; });

  // train-gen
  TrainGenArgs tg;
  auto* g = app.add_subcommand("train-gen", "Train the pointer-generator refiner");
  g->add_option("--data", tg.data, "Pipeline output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  g->add_option("--out", tg.out, "Checkpoint path")->required();
  g->add_option("--kind", tg.kind, "Pair kind")
      ->capture_default_str()
      ->check(CLI::IsMember({"dtsi", "dist"}));
  g->add_flag("--cat", tg.config.use_cat, "Prefix the advertiser category");
  g->add_flag("--img", tg.config.use_img, "Prefix the source image tags");
  g->add_flag("--no-copy", tg.no_copy, "Disable the copy mechanism");
  g->add_option("--embed-dim", tg.config.model.embed_dim)->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--hidden", tg.config.model.hidden)->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--optimizer", tg.optimizer)
      ->capture_default_str()
      ->check(CLI::IsMember({"sgd", "adam"}));
  g->add_option("--lr", tg.config.learning_rate)->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--lr-decay", tg.config.lr_decay)->capture_default_str()->check(CLI::Range(0.0, 1.0));
  g->add_option("--patience", tg.config.patience)->capture_default_str();
  g->add_option("--clip", tg.config.clip_norm)->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--batch-size", tg.config.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--epochs", tg.config.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--max-steps", tg.config.max_steps, "0 for no cap")->capture_default_str();
  g->add_option("--min-freq", tg.config.min_freq, "Vocabulary frequency cut")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  g->add_option("--seed", tg.config.seed)->capture_default_str();
  g->callback([&] { action = [&] { return train_gen(tg, out, json); }; });

  // train-rank
  TrainRankArgs tr;
  auto* r = app.add_subcommand("train-rank", "Train the DRMM keyphrase or image-tag ranker");
  r->add_option("--data", tr.data, "Pipeline output directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  r->add_option("--out", tr.out, "Checkpoint path")->required();
  r->add_option("--task", tr.task)->capture_default_str()->check(CLI::IsMember({"keyphrase", "tag"}));
  r->add_option("--embeddings", tr.embeddings, "Word vectors to seed the term table")
      ->check(CLI::ExistingFile);
  r->add_flag("--cat", tr.config.use_cat, "Add the category to the query");
  r->add_flag("--img", tr.config.use_img, "Add the source image tags to the query");
  r->add_option("--embed-dim", tr.config.model.embed_dim)->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--hidden", tr.config.model.hidden, "MLP layer widths")->capture_default_str();
  r->add_option("--k", tr.config.model.k, "Interaction top-k")->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--lr", tr.config.learning_rate)->capture_default_str()->check(CLI::NonNegativeNumber);
  r->add_option("--epochs", tr.config.epochs)->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--batch-size", tr.config.batch_size)->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--negatives", tr.config.negatives)->capture_default_str()->check(CLI::PositiveNumber);
  r->add_option("--seed", tr.config.seed)->capture_default_str();
  r->callback([&] { action = [&] { return train_rank(tr, out, json); }; });

  // eval-gen
  EvalGenArgs eg;
  auto* eg_cmd = app.add_subcommand("eval-gen", "BLEU, ROUGE and keyphrase metrics for refiners");
  eg_cmd->add_option("--data", eg.data)->required()->check(CLI::ExistingDirectory);
  eg_cmd->add_option("--checkpoint", eg.checkpoints, "Generator checkpoint (repeatable)")
      ->check(CLI::ExistingFile);
  eg_cmd->add_option("--kind", eg.kind)->capture_default_str()->check(CLI::IsMember({"dtsi", "dist"}));
  eg_cmd->add_option("--split", eg.split)->capture_default_str()->check(CLI::IsMember({"train", "test", "val"}));
  eg_cmd->add_option("--beam", eg.beam)->capture_default_str()->check(CLI::PositiveNumber);
  eg_cmd->add_option("--max-len", eg.max_len)->capture_default_str()->check(CLI::PositiveNumber);
  eg_cmd->add_option("--predictions", eg.predictions, "Directory for decoded JSON-lines");
  eg_cmd->add_option("--assist-checkpoint", eg.assist_checkpoint,
                     "Keyphrase ranker for add-r rows")
      ->check(CLI::ExistingFile);
  eg_cmd->add_option("--assist-r", eg.assist_r, "Ranked phrases added per row")->capture_default_str();
  eg_cmd->callback([&] { action = [&] { return eval_gen(eg, out, json); }; });

  // eval-rank
  EvalRankArgs er;
  auto* er_cmd = app.add_subcommand("eval-rank", "P/R/NDCG@5,10 for baselines and rankers");
  er_cmd->add_option("--data", er.data)->required()->check(CLI::ExistingDirectory);
  er_cmd->add_option("--task", er.task)->capture_default_str()->check(CLI::IsMember({"keyphrase", "tag"}));
  er_cmd->add_option("--split", er.split)->capture_default_str()->check(CLI::IsMember({"train", "test", "val"}));
  er_cmd->add_option("--embeddings", er.embeddings, "Word vectors for the EMB-SIM row")
      ->check(CLI::ExistingFile);
  er_cmd->add_option("--checkpoint", er.checkpoints, "Ranker checkpoint (repeatable)")
      ->check(CLI::ExistingFile);
  er_cmd->add_option("--rankings", er.rankings, "Directory for ranked JSON-lines");
  er_cmd->callback([&] { action = [&] { return eval_rank(er, out, json); }; });

  // recommend
  RecommendArgs rec;
  auto* rc = app.add_subcommand("recommend", "Refine one creative with trained models");
  rc->add_option("--gen-checkpoint", rec.models.generator)->required()->check(CLI::ExistingFile);
  rc->add_option("--kp-checkpoint", rec.models.keyphrase_ranker)->required()->check(CLI::ExistingFile);
  rc->add_option("--tag-checkpoint", rec.models.tag_ranker)->required()->check(CLI::ExistingFile);
  rc->add_option("--text", rec.request.text)->required();
  rc->add_option("--category", rec.request.category);
  rc->add_option("--tag", rec.request.image_tags, "Image tag (repeatable)");
  rc->add_option("--top-k", rec.request.top_k)->capture_default_str()->check(CLI::PositiveNumber);
  rc->add_option("--beam-width", rec.request.beam_width)
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{1}, service::kMaxBeamWidth));
  rc->callback([&] { action = [&] { return recommend(rec, out); }; });

  // grad-check
  std::uint64_t gc_seed = 1;
  auto* gc = app.add_subcommand("grad-check", "Finite-difference check of both models");
  gc->add_option("--seed", gc_seed)->capture_default_str();
  gc->callback([&] { action = [&] { return grad_check(gc_seed, out, json); }; });

  // serve
  service::ServerConfig srv;
  std::string gen_ckpt, kp_ckpt, tag_ckpt;
  auto* sv = app.add_subcommand("serve", "Serve /v1/refine and /v1/health");
  sv->add_option("--host", srv.host)->capture_default_str();
  auto* port_opt = sv->add_option("--port", srv.port)->capture_default_str()->check(CLI::Range(0, 65535));
  auto* gen_opt = sv->add_option("--gen-checkpoint", gen_ckpt)->check(CLI::ExistingFile);
  auto* kp_opt = sv->add_option("--kp-checkpoint", kp_ckpt)->check(CLI::ExistingFile);
  auto* tag_opt = sv->add_option("--tag-checkpoint", tag_ckpt)->check(CLI::ExistingFile);
  auto* dir_opt = sv->add_option("--static-dir", srv.static_dir)->check(CLI::ExistingDirectory);
  sv->callback([&] {
    srv.models = {gen_ckpt, kp_ckpt, tag_ckpt};
    std::vector<std::string> given;
    for (auto* o : {port_opt, gen_opt, kp_opt, tag_opt, dir_opt})
      if (o->count()) given.push_back(o->get_name().substr(2));
    action = [&, given] { return serve(srv, given, err); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    return action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace adcraft::cli
