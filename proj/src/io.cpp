#include "qqt/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qqt::io {

std::string format_number(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", x);
  return buffer;
}

namespace {

std::string format_int(std::int64_t x) { return std::to_string(x); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  parts.push_back(current);
  return parts;
}

}  // namespace

std::int64_t parse_budget(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty budget");
  double scale = 1.0;
  std::string digits = text;
  switch (digits.back()) {
    case 'k': case 'K': scale = 1e3; digits.pop_back(); break;
    case 'm': case 'M': scale = 1e6; digits.pop_back(); break;
    case 'b': case 'B': case 'g': case 'G': scale = 1e9; digits.pop_back(); break;
    default: break;
  }
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(digits, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid budget '" + text + "'");
  }
  if (used != digits.size() || !(value > 0.0))
    throw std::invalid_argument("invalid budget '" + text + "'");
  const double samples = value * scale;
  if (samples > 9.0e18) throw std::invalid_argument("budget '" + text + "' out of range");
  const auto rounded = static_cast<std::int64_t>(std::llround(samples));
  if (rounded < 1) throw std::invalid_argument("budget '" + text + "' is below one sample");
  return rounded;
}

std::vector<std::int64_t> parse_budget_list(const std::string& text) {
  std::vector<std::int64_t> budgets;
  for (const auto& part : split(text, ','))
    if (!part.empty()) budgets.push_back(parse_budget(part));
  if (budgets.empty()) throw std::invalid_argument("empty budget list");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1])
      throw std::invalid_argument("budgets must be strictly increasing");
  return budgets;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> values;
  for (const auto& part : split(text, ',')) {
    if (part.empty()) continue;
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("invalid number '" + part + "'");
    }
    if (used != part.size()) throw std::invalid_argument("invalid number '" + part + "'");
    values.push_back(value);
  }
  if (values.empty()) throw std::invalid_argument("empty number list");
  return values;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "': " +
                             std::strerror(errno));
  }
}

std::vector<ObsRow> read_observation_rows(const std::string& path, bool as_accuracy) {
  const std::string content = read_file(path);
  std::istringstream in(content);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw ParseError(path, 1, "empty file, expected header");
  ++line_no;
  if (!line.empty() && line.back() == '\r')
    throw ParseError(path, line_no, "CRLF line ending, expected LF");
  const char* value_column = as_accuracy ? "accuracy" : "error";
  const std::vector<std::string> header = split(line, ',');
  const std::vector<std::string> expected = {"pool_id", "samples_seen", value_column};
  if (header.size() != expected.size())
    throw ParseError(path, line_no, "expected 3 header columns, got " +
                                        std::to_string(header.size()));
  for (std::size_t c = 0; c < expected.size(); ++c)
    if (header[c] != expected[c])
      throw ParseError(path, line_no, "header column " + std::to_string(c + 1) +
                                          ": expected '" + expected[c] + "', got '" +
                                          header[c] + "'");

  std::vector<ObsRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      throw ParseError(path, line_no, "CRLF line ending, expected LF");
    if (line.empty()) continue;
    const std::vector<std::string> fields = split(line, ',');
    if (fields.size() != 3)
      throw ParseError(path, line_no, "expected 3 fields, got " +
                                          std::to_string(fields.size()));
    ObsRow row;
    row.pool_id = fields[0];
    if (row.pool_id.empty()) throw ParseError(path, line_no, "empty pool_id");
    try {
      std::size_t used = 0;
      row.samples_seen = std::stoll(fields[1], &used);
      if (used != fields[1].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError(path, line_no, "invalid samples_seen '" + fields[1] + "'");
    }
    if (row.samples_seen < 1) throw ParseError(path, line_no, "samples_seen must be >= 1");
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(fields[2], &used);
      if (used != fields[2].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ParseError(path, line_no,
                       std::string("invalid ") + value_column + " '" + fields[2] + "'");
    }
    if (!(value >= 0.0 && value <= 1.0))
      throw ParseError(path, line_no, std::string(value_column) + " must lie in [0,1]");
    row.error = as_accuracy ? 1.0 - value : value;

    if (!rows.empty()) {
      const ObsRow& prev = rows.back();
      if (row.pool_id < prev.pool_id ||
          (row.pool_id == prev.pool_id && row.samples_seen < prev.samples_seen))
        throw ParseError(path, line_no, "rows must be sorted by (pool_id, samples_seen)");
      if (row.pool_id == prev.pool_id && row.samples_seen == prev.samples_seen)
        throw ParseError(path, line_no, "duplicate (pool_id, samples_seen)");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path, line_no, "no observation rows");
  return rows;
}

void write_observation_log(const std::string& path,
                           const std::vector<PoolObservations>& pools) {
  std::vector<const PoolObservations*> ordered;
  ordered.reserve(pools.size());
  for (const auto& pool : pools) ordered.push_back(&pool);
  std::sort(ordered.begin(), ordered.end(),
            [](const PoolObservations* l, const PoolObservations* r) {
              return l->pool_id < r->pool_id;
            });

  std::string out = "pool_id,samples_seen,error\n";
  for (const PoolObservations* pool : ordered)
    for (const auto& point : pool->points)
      out += pool->pool_id + "," + format_int(point.samples_seen) + "," +
             format_number(point.error) + "\n";
  atomic_write(path, out);
}

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 1, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError(path, 1, "manifest must be a JSON array");
  if (doc.empty()) throw ParseError(path, 1, "manifest must list at least one pool");

  std::vector<ManifestEntry> entries;
  std::set<std::string> ids;
  std::set<int> ranks;
  for (const auto& item : doc) {
    if (!item.is_object()) throw ParseError(path, 1, "manifest entries must be objects");
    ManifestEntry entry;
    try {
      entry.pool_id = item.at("pool_id").get<std::string>();
      entry.size = item.at("size").get<std::int64_t>();
      entry.quality_rank = item.at("quality_rank").get<int>();
      entry.description = item.value("description", std::string());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, 1, std::string("manifest entry: ") + e.what());
    }
    if (entry.pool_id.empty()) throw ParseError(path, 1, "manifest entry with empty pool_id");
    if (entry.size < 1)
      throw ParseError(path, 1, "pool '" + entry.pool_id + "': size must be >= 1");
    if (!ids.insert(entry.pool_id).second)
      throw ParseError(path, 1, "duplicate pool_id '" + entry.pool_id + "'");
    if (!ranks.insert(entry.quality_rank).second)
      throw ParseError(path, 1,
                       "duplicate quality_rank " + std::to_string(entry.quality_rank));
    entries.push_back(std::move(entry));
  }
  for (int rank = 1; rank <= static_cast<int>(entries.size()); ++rank)
    if (!ranks.count(rank))
      throw ParseError(path, 1, "quality_rank values must be contiguous from 1; missing " +
                                    std::to_string(rank));
  std::sort(entries.begin(), entries.end(), [](const ManifestEntry& l, const ManifestEntry& r) {
    return l.quality_rank < r.quality_rank;
  });
  return entries;
}

void write_manifest(const std::string& path, std::vector<ManifestEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const ManifestEntry& l, const ManifestEntry& r) {
    return l.quality_rank < r.quality_rank;
  });
  std::string out = "[\n";
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    out += "  {\"pool_id\": " + nlohmann::json(e.pool_id).dump() +
           ", \"size\": " + format_int(e.size) +
           ", \"quality_rank\": " + std::to_string(e.quality_rank) +
           ", \"description\": " + nlohmann::json(e.description).dump() + "}";
    out += i + 1 < entries.size() ? ",\n" : "\n";
  }
  out += "]\n";
  atomic_write(path, out);
}

std::vector<PoolObservations> assemble_observations(const std::vector<ObsRow>& rows,
                                                    const std::vector<ManifestEntry>& manifest,
                                                    const std::string& source_path) {
  std::map<std::string, std::int64_t> sizes;
  for (const auto& entry : manifest) sizes[entry.pool_id] = entry.size;

  std::vector<PoolObservations> pools;
  for (const auto& row : rows) {
    if (!sizes.count(row.pool_id))
      throw std::invalid_argument(source_path + ": pool '" + row.pool_id +
                                  "' is not in the manifest");
    if (pools.empty() || pools.back().pool_id != row.pool_id) {
      pools.push_back(PoolObservations{row.pool_id, sizes[row.pool_id], {}});
    }
    pools.back().points.push_back(ObsPoint{row.samples_seen, row.error});
  }
  for (auto& pool : pools)
    pool = PoolObservations::validated(pool.pool_id, pool.pool_size, std::move(pool.points));
  return pools;
}

void write_fit_result(const std::string& path, const FitResult& result) {
  std::string out = "{\n";
  out += "  \"grid_version\": " + nlohmann::json(result.grid_version).dump() + ",\n";
  out += "  \"a\": " + format_number(result.a) + ",\n";
  out += "  \"pools\": [\n";
  std::size_t i = 0;
  for (const auto& [pool_id, fit] : result.per_pool) {
    out += "    {\"pool_id\": " + nlohmann::json(pool_id).dump() +
           ", \"b\": " + format_number(fit.b) + ", \"tau\": " + format_number(fit.tau) +
           ", \"d\": " + format_number(fit.d) + ", \"l2_loss\": " + format_number(fit.l2_loss) +
           "}";
    out += ++i < result.per_pool.size() ? ",\n" : "\n";
  }
  out += "  ],\n";
  out += "  \"total_l2_loss\": " + format_number(result.total_l2_loss) + "\n";
  out += "}\n";
  atomic_write(path, out);
}

FitResult read_fit_result(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path, 1, std::string("invalid JSON: ") + e.what());
  }
  FitResult result;
  try {
    result.grid_version = doc.at("grid_version").get<std::string>();
    const ParamGrid grid = ParamGrid::from_version(result.grid_version);
    result.a = grid.snap_a(doc.at("a").get<double>());
    for (const auto& item : doc.at("pools")) {
      PoolFit fit;
      fit.b = grid.snap_b(item.at("b").get<double>());
      fit.tau = grid.snap_tau(item.at("tau").get<double>());
      fit.d = grid.snap_d(item.at("d").get<double>());
      fit.l2_loss = item.at("l2_loss").get<double>();
      const std::string pool_id = item.at("pool_id").get<std::string>();
      if (!result.per_pool.emplace(pool_id, fit).second)
        throw ParseError(path, 1, "duplicate pool_id '" + pool_id + "'");
      result.total_l2_loss += fit.l2_loss;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 1, std::string("fit result: ") + e.what());
  }
  if (result.per_pool.empty()) throw ParseError(path, 1, "fit result lists no pools");
  return result;
}

void write_series(const std::string& path,
                  const std::vector<std::pair<std::int64_t, double>>& rows) {
  std::string out = "samples_seen,predicted_error\n";
  for (const auto& [samples, error] : rows)
    out += format_int(samples) + "," + format_number(error) + "\n";
  atomic_write(path, out);
}

void write_strategy_series(const std::string& path, const StrategyReport& report) {
  std::string out = "strategy,samples_seen,predicted_error\n";
  for (std::size_t s = 0; s < report.strategy_labels.size(); ++s)
    for (std::size_t j = 0; j < report.budgets.size(); ++j)
      out += report.strategy_labels[s] + "," + format_int(report.budgets[j]) + "," +
             format_number(report.per_strategy_error[s][j]) + "\n";
  atomic_write(path, out);
}

void write_strategy_report(const std::string& path, const StrategyReport& report) {
  std::string out = "{\n";
  out += "  \"budgets\": [";
  for (std::size_t j = 0; j < report.budgets.size(); ++j)
    out += (j ? ", " : "") + format_int(report.budgets[j]);
  out += "],\n  \"strategies\": [";
  for (std::size_t s = 0; s < report.strategy_labels.size(); ++s)
    out += (s ? ", " : "") + nlohmann::json(report.strategy_labels[s]).dump();
  out += "],\n  \"errors\": [\n";
  for (std::size_t s = 0; s < report.per_strategy_error.size(); ++s) {
    out += "    [";
    for (std::size_t j = 0; j < report.per_strategy_error[s].size(); ++j)
      out += (j ? ", " : "") + format_number(report.per_strategy_error[s][j]);
    out += s + 1 < report.per_strategy_error.size() ? "],\n" : "]\n";
  }
  out += "  ],\n  \"best_strategy_per_budget\": [";
  for (std::size_t j = 0; j < report.best_strategy_per_budget.size(); ++j)
    out += (j ? ", " : "") +
           nlohmann::json(report.strategy_labels[report.best_strategy_per_budget[j]]).dump();
  out += "],\n  \"crossovers\": [";
  for (std::size_t c = 0; c < report.crossovers.size(); ++c) {
    const auto& x = report.crossovers[c];
    out += std::string(c ? ", " : "") + "{\"budget_lo\": " + format_int(x.budget_lo) +
           ", \"budget_hi\": " + format_int(x.budget_hi) + ", \"from\": " +
           nlohmann::json(report.strategy_labels[x.from_strategy]).dump() + ", \"to\": " +
           nlohmann::json(report.strategy_labels[x.to_strategy]).dump() + "}";
  }
  out += "]\n}\n";
  atomic_write(path, out);
}

void write_k_sweep(const std::string& path,
                   const std::vector<std::pair<double, double>>& rows) {
  std::string out = "k,l2_loss\n";
  for (const auto& [k, loss] : rows)
    out += format_number(k) + "," + format_number(loss) + "\n";
  atomic_write(path, out);
}

}  // namespace qqt::io
