#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabeval/framework.hpp"
#include "tabeval/metric_result.hpp"

namespace tabeval {

inline constexpr const char* kToolVersion = "0.1.0";

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

/// Everything a run produced. report.json is this document; report.txt is
/// rendered from its JSON form only.
struct ReportDocument {
  std::string tool_version = kToolVersion;
  std::string command = "evaluate";
  std::vector<InputDigest> inputs;
  Json config = Json::object();
  std::vector<MetricResult> results;
  std::optional<BenchmarkReport> benchmark;
  /// Only set when the caller asks for it; leaving it out keeps reports
  /// byte-identical across runs.
  std::optional<std::string> generated_at;
};

Json to_json(const ReportDocument& doc);
ReportDocument report_from_json(const Json& j);

/// "0.036(11)": the value rounded to the first two digits of its error, or
/// to two significant figures without one.
std::string format_with_error(double value, std::optional<double> error = std::nullopt);

std::string render_report(const Json& doc);
inline std::string render_report(const ReportDocument& doc) { return render_report(to_json(doc)); }

std::string sha256_hex(const std::string& bytes);
/// Throws IoError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

/// (file name, SVG text) for every result carrying a drawable payload.
std::vector<std::pair<std::string, std::string>> render_svg_plots(const std::vector<MetricResult>& results);

}  // namespace tabeval
