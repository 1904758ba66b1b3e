#ifndef QQT_IO_HPP
#define QQT_IO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qqt/curation.hpp"
#include "qqt/fitting.hpp"

namespace qqt::io {

/// Input rejection with a file/line position the CLI can show verbatim.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_;
};

// All emitted numbers use 9 significant digits so reruns diff cleanly.
std::string format_number(double x);

// Sample counts with optional decimal-scale suffix: "128M" = 128000000,
// "12.8M", "64k", "3B"/"3G". Plain integers pass through.
std::int64_t parse_budget(const std::string& text);
std::vector<std::int64_t> parse_budget_list(const std::string& text);

// Comma-separated doubles, e.g. a k grid "0,0.25,0.5".
std::vector<double> parse_double_list(const std::string& text);

struct ObsRow {
  std::string pool_id;
  std::int64_t samples_seen;
  double error;
};

// CSV log with exact header pool_id,samples_seen,error (third column
// "accuracy" under as_accuracy, converted to error on read). Rows must be
// sorted by (pool_id, samples_seen) with no duplicates.
std::vector<ObsRow> read_observation_rows(const std::string& path, bool as_accuracy = false);
void write_observation_log(const std::string& path,
                           const std::vector<PoolObservations>& pools);

struct ManifestEntry {
  std::string pool_id;
  std::int64_t size = 0;
  int quality_rank = 0;
  std::string description;
};

// JSON array of {pool_id, size, quality_rank, description}; ranks must be
// unique and contiguous from 1. Returned sorted by rank (best first).
std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path, std::vector<ManifestEntry> entries);

// Groups log rows into per-pool observations, taking sizes from the
// manifest; rows naming pools absent from the manifest are rejected.
std::vector<PoolObservations> assemble_observations(const std::vector<ObsRow>& rows,
                                                    const std::vector<ManifestEntry>& manifest,
                                                    const std::string& source_path);

// JSON {grid_version, a, pools:[{pool_id,b,tau,d,l2_loss}], total_l2_loss}.
// On read, parameters snap back onto the grid named by grid_version, so a
// write/read cycle reproduces the exact fitted grid values.
void write_fit_result(const std::string& path, const FitResult& result);
FitResult read_fit_result(const std::string& path);

// CSV series samples_seen,predicted_error.
void write_series(const std::string& path,
                  const std::vector<std::pair<std::int64_t, double>>& rows);

// CSV series strategy,samples_seen,predicted_error plus the JSON report.
void write_strategy_series(const std::string& path, const StrategyReport& report);
void write_strategy_report(const std::string& path, const StrategyReport& report);

// CSV series k,l2_loss.
void write_k_sweep(const std::string& path,
                   const std::vector<std::pair<double, double>>& rows);

// Writes content to a temporary sibling then renames it into place, so
// readers never observe a partial file.
void atomic_write(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace qqt::io

#endif
