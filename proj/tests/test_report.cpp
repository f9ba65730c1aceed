#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "tabeval/metrics.hpp"
#include "tabeval/report.hpp"
#include "test_support.hpp"

using namespace tabeval;

TEST(FormatWithError, TwoDigitsOfError) {
  EXPECT_EQ(format_with_error(0.0362, 0.0114), "0.036(11)");
  EXPECT_EQ(format_with_error(1.2345, 0.25), "1.23(25)");
  EXPECT_EQ(format_with_error(123.4, 12.0), "123(12)");
  EXPECT_EQ(format_with_error(0.5, 0.0), "0.50");
  EXPECT_EQ(format_with_error(0.01234), "0.012");
  EXPECT_EQ(format_with_error(12.0), "12");
}

TEST(Render, DisabledAndFailedLines) {
  ReportDocument doc;
  doc.results.push_back(MetricResult::make_disabled("auroc_diff", Category::Utility, "no holdout data"));
  doc.results.push_back(MetricResult::make_failed("dcr", Category::Privacy, "boom"));
  MetricResult ok("dwm", Category::Utility);
  ok.add("avg", 0.0362, Direction::LowerBetter, 0.0114);
  doc.results.push_back(ok);
  const auto text = render_report(doc);
  EXPECT_NE(text.find("auroc_diff: disabled (no holdout data)"), std::string::npos) << text;
  EXPECT_NE(text.find("dcr: failed (boom)"), std::string::npos) << text;
  EXPECT_NE(text.find("0.036(11)"), std::string::npos) << text;
}

TEST(Render, EmptyDocument) {
  const auto text = render_report(ReportDocument{});
  EXPECT_FALSE(text.empty());
  EXPECT_NE(text.find(kToolVersion), std::string::npos);
}

TEST(ReportJson, RoundTrip) {
  Rng rng(1);
  const auto real = testing_support::random_table(rng, 40, 3, 2);
  const auto syn = testing_support::random_table(rng, 40, 3, 2, 4, 0.3);
  const auto ctx = validate_context(real, syn);
  ReportDocument doc;
  doc.inputs = {{"real", "real.csv", sha256_hex("x")}};
  doc.config = Json{{"metrics", Json::object()}, {"seed", 3}};
  doc.results = {dwm(ctx), ks_test(ctx, {0.05, 50}), pca_plot(ctx),
                 MetricResult::make_disabled("mia_risk", Category::Privacy, "no holdout data")};
  const auto j = to_json(doc);
  EXPECT_FALSE(j.contains("generated_at"));
  EXPECT_EQ(to_json(report_from_json(j)), j);
  EXPECT_EQ(render_report(report_from_json(j)), render_report(doc));
  doc.generated_at = "2026-01-01T00:00:00Z";
  EXPECT_EQ(to_json(doc)["generated_at"], "2026-01-01T00:00:00Z");
}

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto path = std::filesystem::temp_directory_path() / "tabeval_sha.txt";
  std::ofstream(path, std::ios::binary) << "abc";
  EXPECT_EQ(sha256_file(path), sha256_hex("abc"));
  EXPECT_THROW(sha256_file(path.string() + ".missing"), IoError);
}

TEST(Svg, PlotsForDrawablePayloads) {
  Rng rng(2);
  const auto real = testing_support::random_table(rng, 40, 3, 2);
  const auto syn = testing_support::random_table(rng, 40, 3, 2, 4, 0.3);
  const auto ctx = validate_context(real, syn);
  const auto plots = render_svg_plots({pca_plot(ctx), corr_diff(ctx), ks_test(ctx, {0.05, 50}), h_dist(ctx),
                                       MetricResult::make_disabled("cio", Category::Utility, "x")});
  EXPECT_GE(plots.size(), 3u);
  for (const auto& [name, svg] : plots) {
    EXPECT_EQ(name.substr(name.size() - 4), ".svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u) << name;
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}
