#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tabeval/metrics.hpp"
#include "test_support.hpp"

using namespace tabeval;
using testing_support::random_table;

namespace {

Table line(std::vector<double> x) { return Table({Column::numerical("x", std::move(x))}); }

// Each column is a shuffled balanced sample of the same level set, so every
// column has the same entropy.
Table balanced_categoricals(Rng& rng, std::size_t rows, std::size_t cols, std::size_t levels) {
  const auto names = testing_support::level_names(levels);
  std::vector<Column> out;
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < rows; ++i) v.push_back(names[i % levels]);
    shuffle(v, rng);
    out.push_back(Column::categorical("c" + std::to_string(j), std::move(v)));
  }
  return Table(std::move(out));
}

std::size_t mismatches(const Table& a, std::size_t i, const Table& b, std::size_t r) {
  std::size_t n = 0;
  for (std::size_t j = 0; j < a.n_cols(); ++j) n += a.column(j).labels()[i] != b.column(j).labels()[r];
  return n;
}

// Unweighted nearest-neighbour comparison on mismatch counts.
double eps_oracle(const Table& real, const Table& syn) {
  double closer = 0;
  for (std::size_t i = 0; i < real.n_rows(); ++i) {
    std::size_t to_real = real.n_cols() + 1, to_syn = real.n_cols() + 1;
    for (std::size_t r = 0; r < real.n_rows(); ++r) {
      if (r != i) to_real = std::min(to_real, mismatches(real, i, real, r));
    }
    for (std::size_t s = 0; s < syn.n_rows(); ++s) to_syn = std::min(to_syn, mismatches(real, i, syn, s));
    closer += to_syn < to_real;
  }
  return closer / static_cast<double>(real.n_rows());
}

Table with_copies(const Table& syn, const Table& real, std::size_t count) {
  std::vector<Column> cols;
  for (std::size_t j = 0; j < syn.n_cols(); ++j) {
    const auto& s = syn.column(j);
    const auto& r = real.column(s.name());
    if (s.is_numerical()) {
      auto v = s.numbers();
      std::copy_n(r.numbers().begin(), count, v.begin());
      cols.push_back(Column::numerical(s.name(), v));
    } else {
      auto v = s.labels();
      std::copy_n(r.labels().begin(), count, v.begin());
      cols.push_back(Column::categorical(s.name(), v));
    }
  }
  return Table(std::move(cols));
}

}  // namespace

TEST(Nndr, CopyGivesZeroAndMidpointGivesOne) {
  const auto real = line({0, 2, 10, 13});
  EXPECT_EQ(nndr(validate_context(real, real)).value("avg"), 0.0);
  EXPECT_DOUBLE_EQ(nndr(validate_context(real, line({1}))).value("avg"), 1.0);
  EXPECT_DOUBLE_EQ(nndr(validate_context(real, line({1, 2}))).value("avg"), 0.5);
}

TEST(Nndr, ZeroSecondDistanceRowsAreExcluded) {
  const auto real = line({0, 0, 5});
  const auto r = nndr(validate_context(real, line({0, 4})));
  EXPECT_DOUBLE_EQ(r.value("avg"), 0.25);
  EXPECT_EQ(r.notes.size(), 1u);
  EXPECT_THROW(nndr(validate_context(real, line({0}))), DataError);
}

TEST(Nndr, PrivacyLossIsClampedAndNeedsHoldout) {
  Rng rng(5);
  const auto real = random_table(rng, 100, 3, 2);
  const auto hold = random_table(rng, 100, 3, 2);
  const auto syn = random_table(rng, 100, 3, 2);
  EXPECT_EQ(nndr(validate_context(real, syn)).find("privacy_loss"), nullptr);
  EXPECT_GE(nndr(validate_context(real, syn, hold)).value("privacy_loss"), 0.0);
  EXPECT_GT(nndr(validate_context(real, real, hold)).value("privacy_loss"), 0.3);
}

TEST(NnaaPrivacyLoss, MemorizedCopyLeaks) {
  Rng rng(6);
  const auto real = random_table(rng, 120, 3, 2);
  const auto hold = random_table(rng, 120, 3, 2);
  const auto copy = nnaa_privacy_loss(validate_context(real, real, hold), {5});
  EXPECT_EQ(copy.value("nnaa_train"), 0.0);
  EXPECT_GT(copy.value("privacy_loss"), 0.2);
  const auto fresh = nnaa_privacy_loss(validate_context(real, random_table(rng, 120, 3, 2), hold), {5});
  EXPECT_GE(fresh.value("privacy_loss"), 0.0);
  EXPECT_LT(fresh.value("privacy_loss"), 0.15);
  EXPECT_TRUE(nnaa_privacy_loss(validate_context(real, real)).disabled);
}

TEST(Dcr, LatticeExamples) {
  std::vector<double> x, y, sx, sy;
  for (int i = 0; i < 10; ++i) {
    x.push_back(i);
    y.push_back(0);
    sx.push_back(i);
    sy.push_back(1);
  }
  // Anchor row stretching the y range to 9, so the y offset of 1 equals the
  // normalized x spacing.
  x.push_back(0);
  y.push_back(9);
  const Table real({Column::numerical("x", x), Column::numerical("y", y)});
  const Table syn({Column::numerical("x", sx), Column::numerical("y", sy)});
  for (auto kind : {DistanceKind::Gower, DistanceKind::Euclidean}) {
    EXPECT_NEAR(dcr(validate_context(real, syn, std::nullopt, std::nullopt, 0, kind)).value("median_ratio"), 1.0,
                1e-12);
    EXPECT_EQ(dcr(validate_context(real, real, std::nullopt, std::nullopt, 0, kind)).value("median_ratio"), 0.0);
  }
  const Table far({Column::numerical("x", {500, 600}), Column::numerical("y", {0, 0})});
  EXPECT_GT(dcr(validate_context(real, far)).value("median_ratio"), 100.0);
}

TEST(Dcr, DuplicatedRealRowsAreAnError) {
  EXPECT_THROW(dcr(validate_context(line({1, 1, 1, 2}), line({3}))), DataError);
}

TEST(HitRate, Examples) {
  Rng rng(7);
  const auto real = random_table(rng, 50, 3, 2);
  EXPECT_EQ(hit_rate(validate_context(real, real)).value("rate"), 1.0);
  // Range 30 and tau 1/30: a gap of exactly 1 is a hit.
  const auto two = line({0, 30});
  EXPECT_EQ(hit_rate(validate_context(two, line({1}))).value("rate"), 0.5);
  EXPECT_EQ(hit_rate(validate_context(two, line({1, 29}))).value("rate"), 1.0);
  EXPECT_EQ(hit_rate(validate_context(two, line({1.01, 28.99}))).value("rate"), 0.0);
}

TEST(HitRate, ShiftedNumericalsNeverHit) {
  Rng rng(8);
  const auto real = random_table(rng, 60, 2, 1);
  std::vector<Column> cols;
  for (const auto& c : real.columns()) {
    if (!c.is_numerical()) {
      cols.push_back(c);
      continue;
    }
    auto v = c.numbers();
    for (auto& x : v) x += 100;
    cols.push_back(Column::numerical(c.name(), v));
  }
  EXPECT_EQ(hit_rate(validate_context(real, Table(cols))).value("rate"), 0.0);
}

TEST(EpsRisk, ExtremeCases) {
  Rng rng(9);
  const auto real = random_table(rng, 80, 3, 2);
  EXPECT_EQ(eps_risk(validate_context(real, real)).value("risk"), 1.0);
  const auto far = random_table(rng, 80, 3, 0, 4, 1000.0);
  const auto real_num = random_table(rng, 80, 3, 0);
  EXPECT_EQ(eps_risk(validate_context(real_num, far)).value("risk"), 0.0);
}

TEST(EpsRisk, EqualEntropiesMatchUnweightedOracle) {
  Rng rng(10);
  for (int t = 0; t < 10; ++t) {
    const auto real = balanced_categoricals(rng, 40, 5, 4);
    const auto syn = random_table(rng, 60, 0, 5, 4);
    std::vector<Column> renamed;
    for (std::size_t j = 0; j < 5; ++j) {
      renamed.push_back(Column::categorical("c" + std::to_string(j), syn.column(j).labels()));
    }
    const Table syn_t(std::move(renamed));
    const auto weights = inverse_entropy_weights(real);
    for (double w : weights) EXPECT_NEAR(w, 1.0, 1e-12);
    EXPECT_EQ(eps_risk(validate_context(real, syn_t)).value("risk"), eps_oracle(real, syn_t)) << "trial " << t;
  }
}

TEST(EpsRisk, WeightsNormalizeToColumnCount) {
  const Table t({Column::categorical("a", {"x", "y", "x", "y"}), Column::categorical("b", {"p", "q", "r", "s"}),
                 Column::categorical("k", {"z", "z", "z", "z"})});
  const auto w = inverse_entropy_weights(t);
  EXPECT_EQ(w[2], 0.0);
  EXPECT_NEAR(w[0] + w[1] + w[2], 3.0, 1e-12);
  EXPECT_NEAR(w[0] / w[1], 2.0, 1e-12);
}

TEST(PrivacyMonotonicity, CopiedRowsRaiseHitRateAndEpsRisk) {
  Rng rng(11);
  const auto real = random_table(rng, 200, 4, 3, 4, 0.0, 2);
  const auto syn = random_table(rng, 200, 4, 3, 4, 0.5, 2);
  double last_hit = -1, last_eps = -1;
  for (double f : {0.0, 0.25, 0.5, 1.0}) {
    const auto mixed = with_copies(syn, real, static_cast<std::size_t>(f * 200));
    const auto ctx = validate_context(real, mixed);
    const double h = hit_rate(ctx).value("rate"), e = eps_risk(ctx).value("risk");
    EXPECT_GE(h, last_hit) << "f=" << f;
    EXPECT_GE(e, last_eps) << "f=" << f;
    last_hit = h;
    last_eps = e;
  }
  EXPECT_EQ(last_hit, 1.0);
}

TEST(MiaRisk, DisabledWithoutHoldoutAndSeeded) {
  Rng rng(12);
  const auto real = random_table(rng, 80, 2, 2);
  const auto hold = random_table(rng, 80, 2, 2);
  EXPECT_TRUE(mia_risk(validate_context(real, real)).disabled);
  const auto a = mia_risk(validate_context(real, real, hold, std::nullopt, 4), {3});
  const auto b = mia_risk(validate_context(real, real, hold, std::nullopt, 4), {3});
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(MiaRisk, SeparablePopulationsExposeMembers) {
  Rng rng(13);
  const auto real = random_table(rng, 200, 3, 1);
  const auto hold = random_table(rng, 200, 3, 1, 4, 5.0);
  EXPECT_GT(mia_risk(validate_context(real, real, hold)).value("recall"), 0.9);
}

TEST(MiaRisk, ExchangeableSynthesisIsNearChance) {
  Rng rng(14);
  const auto real = random_table(rng, 300, 3, 1);
  const auto hold = random_table(rng, 300, 3, 1);
  const auto syn = random_table(rng, 300, 3, 1);
  const double recall = mia_risk(validate_context(real, syn, hold)).value("recall");
  EXPECT_GT(recall, 0.25);
  EXPECT_LT(recall, 0.75);
}

TEST(AttDiscl, FunctionalDependencyIsRecovered) {
  Rng rng(15);
  std::vector<std::string> a;
  for (int i = 0; i < 200; ++i) a.push_back("L" + std::to_string(uniform_index(rng, 3)));
  const Table real({Column::categorical("a", a), Column::categorical("b", a), Column::categorical("c", a)});
  EXPECT_GE(att_discl(validate_context(real, real)).value("recall"), 0.99);
}

TEST(AttDiscl, IndependentUniformTargetsHitNearTwiceTau) {
  Rng rng(16);
  std::vector<double> x, y, sx, sy;
  for (int i = 0; i < 2000; ++i) {
    x.push_back(uniform_real(rng));
    y.push_back(uniform_real(rng));
    sx.push_back(uniform_real(rng));
    sy.push_back(uniform_real(rng));
  }
  const Table real({Column::numerical("x", x), Column::numerical("y", y)});
  const Table syn({Column::numerical("x", sx), Column::numerical("y", sy)});
  const double recall = att_discl(validate_context(real, syn)).value("recall");
  EXPECT_NEAR(recall, 2.0 / 30.0, 0.03);
}

TEST(AttDiscl, GapOfExactlyTauIsAHit) {
  // Constant predictor: every synthetic target is 0, real targets sit at 0 and tau.
  const Table syn({Column::numerical("p", {0, 1}), Column::numerical("y", {0, 0})});
  const Table real({Column::numerical("p", {0, 1, 0, 1}), Column::numerical("y", {0, 1.0 / 30, 0, 1})});
  const auto r = att_discl(validate_context(real, syn));
  const auto& cols = r.plots["columns"];
  ASSERT_EQ(cols[1]["name"], "y");
  EXPECT_DOUBLE_EQ(cols[1]["f1"].get<double>(), 0.75);
}

TEST(PrivacyLosses, NeverNegative) {
  Rng rng(17);
  for (int t = 0; t < 4; ++t) {
    const auto real = random_table(rng, 60, 2, 2);
    const auto hold = random_table(rng, 60, 2, 2, 4, 0.3 * t);
    const auto syn = random_table(rng, 60, 2, 2, 4, -0.3 * t);
    const auto ctx = validate_context(real, syn, hold, std::nullopt, t);
    EXPECT_GE(nndr(ctx).value("privacy_loss"), 0.0);
    EXPECT_GE(nnaa_privacy_loss(ctx, {3}).value("privacy_loss"), 0.0);
  }
}

TEST(PrivacySchema, DistanceKindChangesValuesNotOutputs) {
  Rng rng(18);
  const auto real = random_table(rng, 60, 3, 2);
  const auto syn = random_table(rng, 60, 3, 2, 4, 0.4);
  for (auto fn : {+[](const EvalContext& c) { return nndr(c); }, +[](const EvalContext& c) { return dcr(c); },
                  +[](const EvalContext& c) { return eps_risk(c); }}) {
    const auto g = fn(validate_context(real, syn, std::nullopt, std::nullopt, 0, DistanceKind::Gower));
    const auto e = fn(validate_context(real, syn, std::nullopt, std::nullopt, 0, DistanceKind::Euclidean));
    ASSERT_EQ(g.outputs.size(), e.outputs.size());
    for (std::size_t i = 0; i < g.outputs.size(); ++i) EXPECT_EQ(g.outputs[i].name, e.outputs[i].name);
  }
}
