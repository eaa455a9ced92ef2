#pragma once

// Evaluation tables as JSON or tab-separated text.

#include <string>
#include <utility>
#include <vector>

#include "adcraft/metrics/ranking_metrics.hpp"
#include "adcraft/metrics/text_metrics.hpp"

namespace adcraft::metrics {

struct ReportRow {
  std::string name;
  std::vector<std::pair<std::string, double>> values;
};

ReportRow gen_row(const std::string& name, const GenEvalReport& report);
ReportRow rank_row(const std::string& name, const RankEvalReport& report);

// {"rows":[{"name":..., "<metric>": value, ...}, ...]}
std::string rows_to_json(const std::vector<ReportRow>& rows);
// Header line then one line per row, columns padded to a common width,
// values with 4 decimals. Every row must carry the first row's columns.
std::string rows_to_tsv(const std::vector<ReportRow>& rows);

}  // namespace adcraft::metrics
