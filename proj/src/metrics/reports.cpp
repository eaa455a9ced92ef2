#include "adcraft/metrics/reports.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "json.hpp"

#include "adcraft/errors.hpp"

namespace adcraft::metrics {

ReportRow gen_row(const std::string& name, const GenEvalReport& r) {
  return {name,
          {{"bleu", r.bleu},
           {"rouge1_f", r.rouge1_f},
           {"rouge2_f", r.rouge2_f},
           {"rougeL_f", r.rougeL_f},
           {"kp_p", r.kp_p},
           {"kp_r", r.kp_r},
           {"kp_f", r.kp_f}}};
}

ReportRow rank_row(const std::string& name, const RankEvalReport& r) {
  return {name,
          {{"p@5", r.p5},
           {"p@10", r.p10},
           {"r@5", r.r5},
           {"r@10", r.r10},
           {"ndcg@5", r.ndcg5},
           {"ndcg@10", r.ndcg10}}};
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
  nlohmann::ordered_json out;
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["name"] = row.name;
    for (const auto& [k, v] : row.values) j[k] = v;
    out["rows"].push_back(std::move(j));
  }
  return out.dump(2);
}

std::string rows_to_tsv(const std::vector<ReportRow>& rows) {
  if (rows.empty()) return {};
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{"model"};
  for (const auto& [k, v] : rows.front().values) header.push_back(k);
  cells.push_back(header);
  for (const auto& row : rows) {
    if (row.values.size() + 1 != header.size())
      throw ContractError("rows_to_tsv: row '" + row.name + "' has a different column set");
    std::vector<std::string> line{row.name};
    for (std::size_t i = 0; i < row.values.size(); ++i) {
      if (row.values[i].first != header[i + 1])
        throw ContractError("rows_to_tsv: row '" + row.name + "' has a different column set");
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4f", row.values[i].second);
      line.push_back(buf);
    }
    cells.push_back(std::move(line));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  std::ostringstream os;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      os << line[i];
      if (i + 1 < line.size()) os << std::string(width[i] - line[i].size(), ' ') << '\t';
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace adcraft::metrics
