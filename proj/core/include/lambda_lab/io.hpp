#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lambda_lab/expsum.hpp"
#include "lambda_lab/frequency_set.hpp"
#include "lambda_lab/kp.hpp"

namespace lambda_lab {

inline constexpr std::string_view kSetSchema = "fset/1";

/// {schema, kind, d, m, R, provenance:{method, seed, params}, points:[[n...],...]}.
/// Tails are not stored; they are recomputed from n on load.
nlohmann::json set_to_json(const FrequencySet& fset);
FrequencySet set_from_json(const nlohmann::json& j);

/// Canonical text form (stable key order, two-space indent, trailing newline).
std::string dump_set(const FrequencySet& fset);
void save_set(const FrequencySet& fset, const std::filesystem::path& path);
FrequencySet load_set(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

/// Shortest round-trip decimal form of a double.
std::string format_number(double v);

/// CSV file whose first lines are `# config: <json>` and `# config_hash: <hex>`.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const nlohmann::json& config,
            std::vector<std::string> columns);

  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const noexcept { return path_; }
  const std::vector<std::string>& columns() const noexcept { return columns_; }

 private:
  std::filesystem::path path_;
  std::vector<std::string> columns_;
  std::ofstream out_;
};

std::vector<std::string> norm_report_columns();
std::vector<std::string> norm_report_row(std::string_view set_id, const NormReport& r);
std::vector<std::string> kp_report_columns();
std::vector<std::string> kp_report_row(std::string_view set_id, const KpProbeReport& r);

/// Writes `<csv stem>.plot.py` next to the CSV: reads the data with the csv
/// module and draws y_columns against x_column with matplotlib.
std::filesystem::path write_plot_script(const std::filesystem::path& csv, std::string_view x_column,
                                        const std::vector<std::string>& y_columns, bool loglog);

}  // namespace lambda_lab
