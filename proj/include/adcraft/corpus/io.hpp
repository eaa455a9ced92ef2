#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "adcraft/corpus/ad_record.hpp"
#include "adcraft/corpus/keyphrases.hpp"
#include "adcraft/corpus/pairs.hpp"
#include "json.hpp"

namespace adcraft::corpus {

nlohmann::json to_json(const AdRecord& record);
AdRecord ad_from_json(const nlohmann::json& j, std::size_t line);

nlohmann::json to_json(const CreativePair& pair);
CreativePair pair_from_json(const nlohmann::json& j, std::size_t line);

// JSON-lines ad log -> validated records. Blank lines are skipped.
// Malformed lines raise ParseError (1-based line number), invariant breaks
// ValidationError, a repeated ad_id ConflictError.
std::vector<AdRecord> ingest_ads(std::istream& in);
std::vector<AdRecord> ingest_ads_file(const std::filesystem::path& path);

void write_ads(std::ostream& out, std::span<const AdRecord> records);

void write_pairs(std::ostream& out, std::span<const CreativePair> pairs);
std::vector<CreativePair> read_pairs(std::istream& in);
void write_pairs_file(const std::filesystem::path& path, std::span<const CreativePair> pairs);
std::vector<CreativePair> read_pairs_file(const std::filesystem::path& path);

// "phrase<TAB>score" per line, in vocabulary order.
void write_vocabulary(std::ostream& out, const KeyphraseVocabulary& vocab);
KeyphraseVocabulary read_vocabulary(std::istream& in);
KeyphraseVocabulary read_vocabulary_file(const std::filesystem::path& path);

}  // namespace adcraft::corpus
