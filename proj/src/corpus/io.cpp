#include "adcraft/corpus/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_set>

#include "adcraft/errors.hpp"

namespace adcraft::corpus {

using nlohmann::json;

json to_json(const AdRecord& r) {
  json tags = json::array();
  for (const auto& t : r.image_tags) tags.push_back({{"tag", t.tag}, {"score", t.score}});
  return {{"advertiser_id", r.advertiser_id},
          {"category", r.category},
          {"campaign_id", r.campaign_id},
          {"ad_group_id", r.ad_group_id},
          {"ad_id", r.ad_id},
          {"text", join_tokens(r.text)},
          {"image_id", r.image_id},
          {"image_tags", tags},
          {"impressions", r.impressions},
          {"clicks", r.clicks}};
}

AdRecord ad_from_json(const json& j, std::size_t line) {
  try {
    AdRecord r;
    r.advertiser_id = j.at("advertiser_id").get<std::string>();
    r.category = j.at("category").get<std::string>();
    r.campaign_id = j.at("campaign_id").get<std::string>();
    r.ad_group_id = j.at("ad_group_id").get<std::string>();
    r.ad_id = j.at("ad_id").get<std::string>();
    r.text = tokenize(j.at("text").get<std::string>());
    r.image_id = j.at("image_id").get<std::string>();
    for (const auto& t : j.at("image_tags"))
      r.image_tags.push_back({t.at("tag").get<std::string>(), t.at("score").get<double>()});
    const auto& imp = j.at("impressions");
    const auto& clk = j.at("clicks");
    if (!imp.is_number_unsigned() || !clk.is_number_unsigned())
      throw ParseError("impressions and clicks must be nonnegative integers", line);
    r.impressions = imp.get<std::uint64_t>();
    r.clicks = clk.get<std::uint64_t>();
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed ad record: ") + e.what(), line);
  }
}

json to_json(const CreativePair& p) {
  return {{"kind", std::string(pair_kind_name(p.kind))},
          {"source", to_json(p.source)},
          {"target", to_json(p.target)},
          {"rel_lift", p.rel_lift},
          {"source_keyphrases", p.source_keyphrases},
          {"target_keyphrases", p.target_keyphrases},
          {"source_tags", p.source_tags},
          {"target_tags", p.target_tags}};
}

CreativePair pair_from_json(const json& j, std::size_t line) {
  try {
    CreativePair p;
    p.kind = parse_pair_kind(j.at("kind").get<std::string>());
    p.source = ad_from_json(j.at("source"), line);
    p.target = ad_from_json(j.at("target"), line);
    p.rel_lift = j.at("rel_lift").get<double>();
    p.source_keyphrases = j.at("source_keyphrases").get<std::vector<std::string>>();
    p.target_keyphrases = j.at("target_keyphrases").get<std::vector<std::string>>();
    p.source_tags = j.at("source_tags").get<std::vector<std::string>>();
    p.target_tags = j.at("target_tags").get<std::vector<std::string>>();
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed pair: ") + e.what(), line);
  } catch (const ContractError& e) {
    throw ParseError(e.what(), line);
  }
}

std::vector<AdRecord> ingest_ads(std::istream& in) {
  std::vector<AdRecord> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    AdRecord r = ad_from_json(j, lineno);
    try {
      validate(r);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!seen.insert(r.ad_id).second)
      throw ConflictError("line " + std::to_string(lineno) + ": duplicate ad_id '" + r.ad_id +
                          "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<AdRecord> ingest_ads_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open ad log " + path.string());
  return ingest_ads(in);
}

void write_ads(std::ostream& out, std::span<const AdRecord> records) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

void write_pairs(std::ostream& out, std::span<const CreativePair> pairs) {
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

std::vector<CreativePair> read_pairs(std::istream& in) {
  std::vector<CreativePair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), lineno);
    }
    out.push_back(pair_from_json(j, lineno));
  }
  return out;
}

void write_pairs_file(const std::filesystem::path& path, std::span<const CreativePair> pairs) {
  std::ofstream out(path);
  if (!out) throw ContractError("cannot open " + path.string() + " for writing");
  write_pairs(out, pairs);
}

std::vector<CreativePair> read_pairs_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open pair file " + path.string());
  return read_pairs(in);
}

void write_vocabulary(std::ostream& out, const KeyphraseVocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out << vocab.text(i) << '\t' << std::setprecision(17) << vocab.score(i) << '\n';
}

KeyphraseVocabulary read_vocabulary(std::istream& in) {
  std::vector<std::vector<std::string>> phrases;
  std::vector<double> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected 'phrase<TAB>score'", lineno);
    phrases.push_back(tokenize(line.substr(0, tab)));
    try {
      scores.push_back(std::stod(line.substr(tab + 1)));
    } catch (const std::exception&) {
      throw ParseError("bad score", lineno);
    }
  }
  return KeyphraseVocabulary(std::move(phrases), std::move(scores));
}

KeyphraseVocabulary read_vocabulary_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open vocabulary " + path.string());
  return read_vocabulary(in);
}

}  // namespace adcraft::corpus
