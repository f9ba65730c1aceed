#include "tabeval/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tabeval {

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string short_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Json to_json(const ReportDocument& doc) {
  Json j;
  j["tool_version"] = doc.tool_version;
  j["command"] = doc.command;
  if (doc.generated_at) j["generated_at"] = *doc.generated_at;
  Json inputs = Json::array();
  for (const auto& in : doc.inputs) inputs.push_back({{"role", in.role}, {"path", in.path}, {"sha256", in.sha256}});
  j["inputs"] = std::move(inputs);
  j["config"] = doc.config;
  Json results = Json::array();
  for (const auto& r : doc.results) results.push_back(to_json(r));
  j["results"] = std::move(results);
  if (doc.benchmark) j["benchmark"] = to_json(*doc.benchmark);
  return j;
}

ReportDocument report_from_json(const Json& j) {
  ReportDocument doc;
  doc.tool_version = j.at("tool_version").get<std::string>();
  doc.command = j.at("command").get<std::string>();
  if (j.contains("generated_at")) doc.generated_at = j.at("generated_at").get<std::string>();
  for (const auto& in : j.at("inputs")) {
    doc.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                          in.at("sha256").get<std::string>()});
  }
  doc.config = j.at("config");
  for (const auto& r : j.at("results")) doc.results.push_back(metric_result_from_json(r));
  if (j.contains("benchmark")) doc.benchmark = benchmark_report_from_json(j.at("benchmark"));
  return doc;
}

std::string format_with_error(double value, std::optional<double> error) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  if (error && std::isfinite(*error) && *error > 0.0) {
    int decimals = std::max(0, 1 - static_cast<int>(std::floor(std::log10(*error))));
    long long digits = std::llround(*error * std::pow(10.0, decimals));
    if (digits >= 100 && decimals > 0) {
      --decimals;
      digits = std::llround(*error * std::pow(10.0, decimals));
    }
    return fixed(value, decimals) + "(" + std::to_string(digits) + ")";
  }
  if (value == 0.0) return "0";
  const int decimals = std::clamp(1 - static_cast<int>(std::floor(std::log10(std::abs(value)))), 0, 15);
  return fixed(value, decimals);
}

std::string render_report(const Json& doc) {
  std::ostringstream out;
  out << "Synthetic data evaluation report\n";
  out << "tool version: " << doc.value("tool_version", "") << "\n";
  if (doc.contains("generated_at")) out << "generated at: " << doc.at("generated_at").get<std::string>() << "\n";
  if (doc.contains("config") && doc.at("config").is_object()) {
    const auto& c = doc.at("config");
    if (c.contains("seed")) out << "seed: " << c.at("seed").dump() << "\n";
    if (c.contains("distance")) out << "distance: " << c.at("distance").get<std::string>() << "\n";
  }
  if (doc.contains("inputs") && !doc.at("inputs").empty()) {
    out << "inputs:\n";
    for (const auto& in : doc.at("inputs")) {
      out << "  " << pad(in.at("role").get<std::string>(), 12) << in.at("path").get<std::string>() << "  sha256 "
          << in.at("sha256").get<std::string>().substr(0, 16) << "\n";
    }
  }

  const Json empty = Json::array();
  const Json& results = doc.contains("results") ? doc.at("results") : empty;
  for (const char* group : {"utility", "privacy"}) {
    std::vector<std::string> lines;
    for (const auto& r : results) {
      const std::string key = r.at("key").get<std::string>();
      const std::string status = r.at("status").get<std::string>();
      if (status != "ok") {
        if (r.at("category").get<std::string>() != group) continue;
        if (status == "disabled") lines.push_back("  " + key + ": disabled (" + r.at("reason").get<std::string>() + ")");
        else lines.push_back("  " + key + ": failed (" + r.at("error").get<std::string>() + ")");
        continue;
      }
      for (const auto& o : r.at("outputs")) {
        if (o.at("category").get<std::string>() != group) continue;
        std::optional<double> err;
        if (o.contains("error")) err = o.at("error").get<double>();
        const std::string dir = o.at("direction").get<std::string>();
        const char* arrow = dir == "higher_better" ? "higher" : dir == "lower_better" ? "lower" : "";
        lines.push_back("  " + pad(key, 20) + pad(o.at("name").get<std::string>(), 26) +
                        pad(format_with_error(o.at("value").get<double>(), err), 18) + arrow);
      }
    }
    if (lines.empty()) continue;
    out << "\n" << (std::string(group) == "utility" ? "Utility" : "Privacy") << "\n";
    out << "  " << pad("metric", 20) << pad("output", 26) << pad("value", 18) << "better\n";
    for (const auto& l : lines) out << l << "\n";
  }
  bool any_notes = false;
  for (const auto& r : results) {
    for (const auto& n : r.at("notes")) {
      if (!any_notes) out << "\nNotes\n";
      any_notes = true;
      out << "  " << r.at("key").get<std::string>() << ": " << n.get<std::string>() << "\n";
    }
  }

  if (doc.contains("benchmark")) {
    const auto& b = doc.at("benchmark");
    out << "\nBenchmark (" << b.at("strategy").get<std::string>() << " ranking)\n";
    out << "  " << pad("dataset", 24) << pad("utility", 12) << pad("privacy", 12) << "total\n";
    const auto& names = b.at("datasets");
    for (std::size_t d = 0; d < names.size(); ++d) {
      out << "  " << pad(names[d].get<std::string>(), 24)
          << pad(format_with_error(b.at("utility_rank")[d].get<double>()), 12)
          << pad(format_with_error(b.at("privacy_rank")[d].get<double>()), 12)
          << format_with_error(b.at("total_rank")[d].get<double>()) << "\n";
    }
    for (std::size_t d = 0; d < names.size(); ++d) {
      out << "\n" << names[d].get<std::string>() << "\n";
      for (const auto& r : b.at("results")[d]) {
        const std::string key = r.at("key").get<std::string>();
        const std::string status = r.at("status").get<std::string>();
        if (status == "disabled") {
          out << "  " << key << ": disabled (" << r.at("reason").get<std::string>() << ")\n";
          continue;
        }
        if (status == "failed") {
          out << "  " << key << ": failed (" << r.at("error").get<std::string>() << ")\n";
          continue;
        }
        for (const auto& o : r.at("outputs")) {
          std::optional<double> err;
          if (o.contains("error")) err = o.at("error").get<double>();
          out << "  " << pad(key, 20) << pad(o.at("name").get<std::string>(), 26)
              << format_with_error(o.at("value").get<double>(), err) << "\n";
        }
      }
    }
    for (const auto& w : b.at("warnings")) out << "warning: " << w.get<std::string>() << "\n";
  }
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

// ---- SVG -------------------------------------------------------------------

namespace {

constexpr double kWidth = 640, kHeight = 420, kMargin = 60;

std::string svg_open(const std::string& title) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape_xml(title)
    << "</text>\n";
  return s.str();
}

std::string scatter(const std::string& title, const std::vector<std::pair<std::string, Json>>& series) {
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  bool first = true;
  for (const auto& [name, pts] : series) {
    for (const auto& p : pts) {
      const double x = p[0].get<double>(), y = p[1].get<double>();
      if (first) {
        xmin = xmax = x;
        ymin = ymax = y;
        first = false;
      }
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
  std::ostringstream s;
  s << svg_open(title);
  s << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
    << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n";
  std::size_t c = 0;
  for (const auto& [name, pts] : series) {
    const char* color = colors[c % 3];
    s << "<g fill=\"" << color << "\" fill-opacity=\"0.5\">\n";
    for (const auto& p : pts) {
      const double x = kMargin + (p[0].get<double>() - xmin) / (xmax - xmin) * (kWidth - 2 * kMargin);
      const double y = kHeight - kMargin - (p[1].get<double>() - ymin) / (ymax - ymin) * (kHeight - 2 * kMargin);
      s << "<circle cx=\"" << short_number(x) << "\" cy=\"" << short_number(y) << "\" r=\"2\"/>\n";
    }
    s << "</g>\n";
    s << "<text x=\"" << kWidth - kMargin - 80 << "\" y=\"" << kMargin + 14 + 14 * c << "\" fill=\"" << color
      << "\">" << escape_xml(name) << "</text>\n";
    ++c;
  }
  s << "</svg>\n";
  return s.str();
}

std::string heatmap(const std::string& title, const Json& matrix) {
  const auto names = matrix.at("names").get<std::vector<std::string>>();
  const auto& values = matrix.at("values");
  const std::size_t n = names.size();
  double scale = 0.0;
  for (const auto& row : values) {
    for (const auto& v : row) scale = std::max(scale, std::abs(v.get<double>()));
  }
  if (scale <= 0.0) scale = 1.0;
  const double cell = std::min((kWidth - 2 * kMargin) / std::max<std::size_t>(n, 1),
                               (kHeight - 2 * kMargin) / std::max<std::size_t>(n, 1));
  std::ostringstream s;
  s << svg_open(title);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = values[i][j].get<double>() / scale;
      const int shade = static_cast<int>(255 - 200 * std::min(1.0, std::abs(v)));
      const std::string fill = v >= 0 ? "rgb(255," + std::to_string(shade) + "," + std::to_string(shade) + ")"
                                      : "rgb(" + std::to_string(shade) + "," + std::to_string(shade) + ",255)";
      s << "<rect x=\"" << short_number(kMargin + j * cell) << "\" y=\"" << short_number(kMargin + i * cell)
        << "\" width=\"" << short_number(cell) << "\" height=\"" << short_number(cell) << "\" fill=\"" << fill
        << "\"><title>" << escape_xml(names[i] + " / " + names[j]) << ": " << short_number(values[i][j].get<double>())
        << "</title></rect>\n";
    }
    s << "<text x=\"" << kMargin - 4 << "\" y=\"" << short_number(kMargin + (i + 0.6) * cell)
      << "\" text-anchor=\"end\">" << escape_xml(names[i]) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string bars(const std::string& title, const std::vector<std::pair<std::string, double>>& items) {
  double top = 0.0;
  for (const auto& [name, v] : items) top = std::max(top, std::abs(v));
  if (top <= 0.0) top = 1.0;
  const double slot = (kWidth - 2 * kMargin) / std::max<std::size_t>(items.size(), 1);
  std::ostringstream s;
  s << svg_open(title);
  s << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
    << kHeight - kMargin << "\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double h = std::abs(items[i].second) / top * (kHeight - 2 * kMargin);
    const double x = kMargin + i * slot;
    s << "<rect x=\"" << short_number(x + 0.1 * slot) << "\" y=\"" << short_number(kHeight - kMargin - h)
      << "\" width=\"" << short_number(0.8 * slot) << "\" height=\"" << short_number(h)
      << "\" fill=\"#1f77b4\"><title>" << escape_xml(items[i].first) << ": " << short_number(items[i].second)
      << "</title></rect>\n";
    s << "<text x=\"" << short_number(x + 0.5 * slot) << "\" y=\"" << kHeight - kMargin + 14
      << "\" text-anchor=\"middle\">" << escape_xml(items[i].first) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::pair<std::string, double>> column_values(const Json& columns, const char* field) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& c : columns) out.emplace_back(c.at("name").get<std::string>(), c.at(field).get<double>());
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_svg_plots(const std::vector<MetricResult>& results) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& r : results) {
    if (!r.ok()) continue;
    const Json& p = r.plots;
    if (r.key == "pca" && p.contains("pca")) {
      out.emplace_back("pca.svg", scatter("First two principal components",
                                          {{"real", p.at("pca").at("real")}, {"synthetic", p.at("pca").at("synthetic")}}));
    } else if ((r.key == "corr_diff" || r.key == "mi_diff") && p.contains("difference")) {
      out.emplace_back(r.key + ".svg", heatmap(r.key + ": real minus synthetic", p.at("difference")));
    } else if (r.key == "ks_test" && p.contains("columns")) {
      out.emplace_back("ks_test.svg", bars("Per-column KS / TVD statistic", column_values(p.at("columns"), "statistic")));
    } else if (r.key == "h_dist" && p.contains("columns")) {
      out.emplace_back("h_dist.svg", bars("Per-column Hellinger distance", column_values(p.at("columns"), "hellinger")));
    } else if (r.key == "cio" && p.contains("cio")) {
      out.emplace_back("cio.svg", bars("Confidence interval overlap", column_values(p.at("cio"), "overlap")));
    } else if (r.key == "dwm" && p.contains("dwm")) {
      std::vector<std::pair<std::string, double>> items;
      for (const auto& a : p.at("dwm").at("attributes")) {
        items.emplace_back(a.at("name").get<std::string>(), std::abs(a.at("difference").get<double>()));
      }
      out.emplace_back("dwm.svg", bars("Absolute difference of normalized means", items));
    } else if (r.key == "auroc_diff" && p.contains("roc_real")) {
      out.emplace_back("auroc_diff.svg",
                       scatter("ROC curves", {{"real", p.at("roc_real")}, {"synthetic", p.at("roc_synthetic")}}));
    } else if (r.key == "att_discl" && p.contains("columns")) {
      out.emplace_back("att_discl.svg", bars("Per-column attribute disclosure F1", column_values(p.at("columns"), "f1")));
    }
  }
  return out;
}

}  // namespace tabeval
