#include <gtest/gtest.h>

#include <cmath>

#include "qgeval/human_eval/pipeline.hpp"
#include "qgeval/human_eval/simulate.hpp"

using namespace qgeval;
using namespace qgeval::human_eval;

namespace {

const std::vector<std::string> kOne{"overall"};

RatingRecord rec(const std::string& worker, const std::string& hit, const std::string& system, ItemKind kind,
                 double score) {
  RatingRecord r;
  r.worker_id = worker;
  r.hit_id = hit;
  r.system = system;
  r.kind = kind;
  const std::string ord = hit + ":" + system + ":ORD";
  r.item_id = kind == ItemKind::ord ? ord : hit + ":" + system + ":" + to_string(kind);
  if (kind != ItemKind::ord) r.pair_of = ord;
  r.scores["overall"] = score;
  return r;
}

// Five (ORD, BADREF) pairs with distinct positive gaps.
std::vector<RatingRecord> pairs_worker(const std::string& w, double sign) {
  std::vector<RatingRecord> rs;
  for (int i = 0; i < 5; ++i) {
    const std::string sys = "S" + std::to_string(i);
    rs.push_back(rec(w, "h", sys, ItemKind::ord, 50 + sign * (i + 1) * 5));
    rs.push_back(rec(w, "h", sys, ItemKind::badref, 50));
  }
  return rs;
}

}  // namespace

TEST(QC, PairsOrderedAndMatched) {
  auto rs = pairs_worker("w", 1);
  const auto s = qc_pairs(rs, kOne);
  ASSERT_EQ(s.pairs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(s.pairs[i].first, 50);
    EXPECT_EQ(s.pairs[i].second, 50 + (static_cast<double>(i) + 1) * 5);
  }
}

TEST(QC, PassesOnlyWhenOrdBeatsBadref) {
  auto good = pairs_worker("good", 1);
  auto bad = pairs_worker("bad", -1);
  good.insert(good.end(), bad.begin(), bad.end());
  const auto r = qc_filter(good, 0.05, kOne);
  EXPECT_EQ(r.report.at("good").reason, "pass");
  EXPECT_DOUBLE_EQ(*r.report.at("good").p_value, 0.03125);
  EXPECT_EQ(r.report.at("bad").reason, "fail");
  EXPECT_EQ(r.passed_workers, std::set<std::string>{"good"});
  EXPECT_EQ(r.passed_ratings.size(), 10u);
}

TEST(QC, AlphaIsStrict) {
  const auto rs = pairs_worker("w", 1);
  EXPECT_FALSE(qc_filter(rs, 0.03125, kOne).report.at("w").passed);
  EXPECT_TRUE(qc_filter(rs, 0.0313, kOne).report.at("w").passed);
}

TEST(QC, NoEvidenceAndDegenerate) {
  std::vector<RatingRecord> rs{rec("a", "h", "S", ItemKind::ord, 40), rec("b", "h", "S", ItemKind::ord, 60),
                               rec("b", "h", "S", ItemKind::badref, 60)};
  const auto r = qc_filter(rs, 0.05, kOne);
  EXPECT_EQ(r.report.at("a").reason, "no-qc-evidence");
  EXPECT_EQ(r.report.at("b").reason, "degenerate");
  EXPECT_TRUE(r.passed_workers.empty());
  EXPECT_THROW(qc_filter({}, 0.05, kOne), InvalidArgument);
  EXPECT_THROW(qc_filter(rs, 1.5, kOne), InvalidArgument);
}

TEST(QC, SimulatedWorkers) {
  Rng rng(3);
  QCWorkerConfig diligent;
  QCWorkerConfig random;
  random.profile = WorkerProfile::random_clicker;
  auto rs = simulate_qc_worker("d", diligent, rng);
  const auto rr = simulate_qc_worker("r", random, rng);
  rs.insert(rs.end(), rr.begin(), rr.end());
  const auto r = qc_filter(rs, 0.05);
  EXPECT_TRUE(r.report.at("d").passed);
  EXPECT_EQ(r.report.at("d").n_pairs, 24u);
}

TEST(Standardize, PopulationSigma) {
  std::vector<RatingRecord> rs{rec("w", "h", "A", ItemKind::ord, 0), rec("w", "h", "B", ItemKind::ord, 50),
                               rec("w", "h", "C", ItemKind::ord, 100)};
  const auto z = standardize(rs, kOne);
  ASSERT_EQ(z.questions.size(), 3u);
  std::map<std::string, double> by;
  for (const auto& q : z.questions) by[q.system] = q.overall;
  EXPECT_NEAR(by["A"], -1.224744871391589, 1e-12);
  EXPECT_NEAR(by["B"], 0.0, 1e-12);
  EXPECT_NEAR(by["C"], 1.224744871391589, 1e-12);
  const auto zs = standardize(rs, kOne, SigmaConvention::sample);
  for (const auto& q : zs.questions)
    if (q.system == "C") {
      EXPECT_NEAR(q.overall, 1.0, 1e-12);
    }
}

TEST(Standardize, BadrefCountsTowardStatsRepeatAverages) {
  std::vector<RatingRecord> rs{rec("w", "h", "A", ItemKind::ord, 80), rec("w", "h", "A", ItemKind::repeat, 60),
                               rec("w", "h", "A", ItemKind::badref, 10), rec("w", "h", "B", ItemKind::ord, 50)};
  const auto z = standardize(rs, kOne);
  const auto& st = z.workers.at("w");
  EXPECT_DOUBLE_EQ(st.mean, 50.0);
  EXPECT_EQ(st.n, 4u);
  ASSERT_EQ(z.questions.size(), 2u);
  const double sd = std::sqrt((900.0 + 100.0 + 1600.0 + 0.0) / 4.0);
  for (const auto& q : z.questions) {
    if (q.system == "A") {
      EXPECT_NEAR(q.overall, ((80 - 50) / sd + (60 - 50) / sd) / 2, 1e-12);
    }
    if (q.system == "B") {
      EXPECT_NEAR(q.overall, 0.0, 1e-12);
    }
  }
}

TEST(Standardize, ConstantRaterExcluded) {
  std::vector<RatingRecord> rs{rec("flat", "h", "A", ItemKind::ord, 50), rec("flat", "h", "B", ItemKind::ord, 50),
                               rec("w", "h", "A", ItemKind::ord, 10), rec("w", "h", "B", ItemKind::ord, 90)};
  const auto z = standardize(rs, kOne);
  EXPECT_EQ(z.excluded.at("flat"), "constant-rater");
  EXPECT_EQ(z.questions.size(), 2u);
}

TEST(Standardize, PerCriterionAndOverall) {
  RatingRecord a = rec("w", "h", "A", ItemKind::ord, 0);
  RatingRecord b = rec("w", "h", "B", ItemKind::ord, 0);
  a.scores = {{"x", 100}, {"y", 0}};
  b.scores = {{"x", 0}, {"y", 100}};
  const std::vector<RatingRecord> rs{a, b};
  const auto z = standardize(rs, {"x", "y"});
  for (const auto& q : z.questions) {
    EXPECT_NEAR(q.z[0], q.system == "A" ? 1.0 : -1.0, 1e-12);
    EXPECT_NEAR(q.overall, 0.0, 1e-12);
  }
  RatingRecord missing = rec("w", "h", "C", ItemKind::ord, 0);
  missing.scores = {{"x", 3}};
  const std::vector<RatingRecord> bad{a, missing};
  EXPECT_THROW(standardize(bad, {"x", "y"}), InvalidArgument);
}

TEST(SystemScores, MeansSortingAndWarnings) {
  std::vector<RatingRecord> rs;
  for (int h = 0; h < 3; ++h) {
    const std::string hit = "h" + std::to_string(h);
    rs.push_back(rec("w", hit, "Low", ItemKind::ord, 10 + h));
    rs.push_back(rec("w", hit, "High", ItemKind::ord, 90 - h));
  }
  const auto table = system_scores(standardize(rs, kOne), {"High", "Low", "Ghost"});
  ASSERT_EQ(table.rows.size(), 2u);
  EXPECT_EQ(table.rows[0].system, "High");
  EXPECT_EQ(table.rows[0].n, 3u);
  EXPECT_NEAR(table.rows[0].z_overall, -table.rows[1].z_overall, 1e-12);
  ASSERT_EQ(table.warnings.size(), 1u);
  EXPECT_NE(table.warnings[0].find("Ghost"), std::string::npos);
  EXPECT_EQ(table.find("Low")->n, 3u);
  EXPECT_EQ(table.find("Ghost"), nullptr);
}

TEST(Validate, Records) {
  RatingRecord r = rec("w", "h", "A", ItemKind::badref, 10);
  r.pair_of.reset();
  EXPECT_THROW(validate(r), InvalidArgument);
  RatingRecord out_of_range = rec("w", "h", "A", ItemKind::ord, 101);
  EXPECT_THROW(validate(out_of_range), InvalidArgument);
  EXPECT_EQ(parse_item_kind("REPEAT"), ItemKind::repeat);
  EXPECT_THROW(parse_item_kind("ord"), InvalidArgument);
}

TEST(Analyze, SimulatedPipeline) {
  SimulationConfig cfg;
  cfg.hits = 120;
  cfg.workers = 40;
  const auto run = simulate_run(cfg, Rng(17));
  EXPECT_EQ(run.ratings.size(), 120u * kHitItems);
  const auto a = analyze(run.ratings);
  EXPECT_FALSE(a.qc.passed_workers.empty());
  EXPECT_EQ(a.systems.rows.size(), 11u);
  ASSERT_TRUE(a.matrix.has_value());
  EXPECT_EQ(a.matrix->systems.front(), a.systems.rows.front().system);
  // Random clickers should mostly be filtered out.
  std::size_t random_passed = 0;
  for (const auto& w : a.qc.passed_workers)
    if (run.workers.at(w) == WorkerProfile::random_clicker) ++random_passed;
  EXPECT_LE(random_passed, 2u);
}

TEST(Analyze, NobodyPasses) {
  const auto rs = pairs_worker("bad", -1);
  const auto a = analyze(rs, {0.05, 0.1, kOne, SigmaConvention::population});
  EXPECT_TRUE(a.systems.rows.empty());
  EXPECT_FALSE(a.matrix.has_value());
}
