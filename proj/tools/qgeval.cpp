// qgeval command-line tool.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 degenerate analysis,
// 3 model transport failure.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qgeval/qgeval.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace qgeval;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitTransport = 3;

struct Global {
  std::uint64_t seed = 0;
  std::string out = ".";
  double alpha = 0.05;
  double sig_threshold = 0.1;
  std::string model = "mock";
  std::string bridge_addr;
};

struct DegenerateExit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Global& g, const std::string& name, const std::string& content) {
  io::write_file(fs::path(g.out) / name, content);
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

// Doubles in JSON reports go through the same fixed formatting as CSV so
// reports are byte-stable.
ordered_json num(double v) { return ordered_json::parse(io::fmt(v) == "nan" ? "null" : io::fmt(v)); }

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string input;
  std::string config;
  std::string synonyms;
  std::string smoothing = "epsilon";
};

int cmd_metrics(const Global& g, const MetricsArgs& a) {
  const auto items = io::read_items(a.input);
  MetricOptions opt;
  opt.smoothing = a.smoothing == "none" ? Smoothing::none : Smoothing::epsilon;
  if (!a.config.empty()) opt.answerability = load_answerability_config(a.config);
  SynonymTable syn;
  if (!a.synonyms.empty()) {
    syn = load_synonym_table(a.synonyms);
    opt.synonyms = &syn;
  }
  const auto res = corpus_metrics(items, opt);

  std::ostringstream per_item;
  per_item << "id,system";
  for (const auto& c : metric_columns()) per_item << ',' << c;
  per_item << '\n';
  for (const auto& m : res.items) {
    per_item << io::csv_field(m.id) << ',' << io::csv_field(m.system);
    for (double v : m.values) per_item << ',' << io::fmt(v);
    per_item << '\n';
  }
  std::ostringstream per_sys;
  per_sys << "system,n";
  for (const auto& c : metric_columns()) per_sys << ',' << c;
  per_sys << '\n';
  for (const auto& [sys, vals] : res.systems) {
    per_sys << io::csv_field(sys) << ',' << res.system_counts.at(sys);
    for (double v : vals) per_sys << ',' << io::fmt(v);
    per_sys << '\n';
  }
  emit(g, "metrics_items.csv", per_item.str());
  emit(g, "metrics_systems.csv", per_sys.str());
  if (res.skipped > 0) std::cerr << "warning: " << res.skipped << " item(s) skipped (missing reference)\n";
  std::cout << res.items.size() << " item(s), " << res.systems.size() << " system(s)\n";
  return kExitOk;
}

// ---------------------------------------------------------------- qascore

struct QAScoreArgs {
  std::string input;
  std::string aggregation = "per_word_mean";
  unsigned workers = 1;
  double logit_scale = 4.0;
};

int cmd_qascore(const Global& g, const QAScoreArgs& a) {
  const auto items = io::read_items(a.input);
  std::unique_ptr<MaskedLanguageModel> model;
  if (g.model == "bridge") {
    const auto addr = resolve_bridge_address(g.bridge_addr);
    if (addr.empty())
      throw InvalidArgument(std::string("--model bridge needs --bridge-addr or ") + kBridgeAddrEnv);
    model = std::make_unique<BridgeModel>(addr);
  } else {
    MockMLMOptions mo;
    mo.seed = g.seed;
    mo.logit_scale = a.logit_scale;
    model = std::make_unique<MockMLM>(MockMLM::corpus_vocab(items), mo);
  }
  const auto how = a.aggregation == "sum" ? QAScoreAggregation::sum : QAScoreAggregation::per_word_mean;

  std::vector<QAScoreResult> results;
  if (auto* bridge = dynamic_cast<BridgeModel*>(model.get()); bridge != nullptr && !items.empty()) {
    const auto ll = bridge->score_many(items);
    for (std::size_t i = 0; i < items.size(); ++i) results.push_back(qascore_from_logliks(items[i], ll[i]));
  } else {
    results = qascore_corpus(items, *model, a.workers);
  }

  std::ostringstream per_item;
  per_item << "id,system,words,qascore_sum,qascore_per_word\n";
  std::map<std::string, std::vector<std::size_t>> by_system;
  for (std::size_t i = 0; i < items.size(); ++i) {
    per_item << io::csv_field(items[i].id) << ',' << io::csv_field(items[i].system) << ','
             << results[i].word_count << ',' << io::fmt(results[i].total, 9) << ','
             << io::fmt(results[i].per_word_mean, 9) << '\n';
    by_system[items[i].system].push_back(i);
  }
  std::ostringstream per_sys;
  per_sys << "system,n,qascore\n";
  for (const auto& [sys, idx] : by_system) {
    std::vector<EvalItem> si;
    std::vector<QAScoreResult> sr;
    for (auto i : idx) {
      si.push_back(items[i]);
      sr.push_back(results[i]);
    }
    per_sys << io::csv_field(sys) << ',' << idx.size() << ',' << io::fmt(aggregate_system(si, sr, how), 9) << '\n';
  }
  emit(g, "qascore_items.csv", per_item.str());
  emit(g, "qascore_systems.csv", per_sys.str());
  std::cout << items.size() << " item(s) scored with " << model->name() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- hits build

struct HitsArgs {
  std::string input;
  std::string human = human_eval::kHumanSystem;
};

// Items sharing (passage, answer) form one HIT; each group must hold one
// question from each of the 11 systems.
int cmd_hits_build(const Global& g, const HitsArgs& a) {
  const auto items = io::read_items(a.input);
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::string>> groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& it : items) {
    const auto key = std::make_pair(it.passage, it.answer);
    if (!groups.count(key)) order.push_back(key);
    auto& g2 = groups[key];
    if (g2.count(it.system)) throw InvalidArgument("item '" + it.id + "': duplicate system in its passage group");
    g2[it.system] = it.question;
  }
  std::vector<human_eval::DonorPassage> donors;
  for (std::size_t i = 0; i < order.size(); ++i) donors.push_back({"p" + std::to_string(i), split_words(order[i].first)});

  Rng root(g.seed);
  std::string out;
  std::size_t built = 0;
  std::size_t skipped = 0;
  std::size_t long_questions = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto& qs = groups[order[i]];
    if (qs.size() != human_eval::kHitSystems || !qs.count(a.human)) {
      ++skipped;
      continue;
    }
    for (const auto& [sys, q] : qs) {
      const auto n = split_words(q).size();
      if (n >= 21 && n <= 24) ++long_questions;
    }
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    char id[32];
    std::snprintf(id, sizeof id, "hit-%05zu", built);
    const auto hit = human_eval::build_hit(id, donors[i].id, order[i].first, order[i].second, qs, donors, rng, a.human);
    out += io::hit_to_json(hit).dump() + "\n";
    ++built;
  }
  emit(g, "hits.jsonl", out);
  if (skipped > 0) std::cerr << "warning: " << skipped << " passage group(s) skipped (need 11 systems incl. " << a.human << ")\n";
  if (long_questions > 0)
    std::cerr << "note: " << long_questions
              << " question(s) of 21-24 words get a floor(n/5)=4-word bad-reference span, shorter than for 16-20 words\n";
  std::cout << built << " HIT(s) written\n";
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string input;
  std::string metrics;
  std::string human_column = "z";
};

ordered_json system_table_json(const human_eval::SystemScoreTable& t) {
  ordered_json rows = ordered_json::array();
  for (const auto& r : t.rows) {
    ordered_json o;
    o["system"] = r.system;
    o["n"] = r.n;
    o["z"] = num(r.z_overall);
    ordered_json c = ordered_json::object();
    for (std::size_t i = 0; i < t.criteria.size(); ++i) c[t.criteria[i]] = num(r.z_criteria[i]);
    o["criteria"] = c;
    rows.push_back(o);
  }
  return rows;
}

ordered_json correlation_json(const human_eval::CorrelationReport& rep) {
  ordered_json j;
  ordered_json m = ordered_json::array();
  for (const auto& c : rep.metrics)
    m.push_back({{"metric", c.metric}, {"n", c.n}, {"pearson", num(c.pearson)}, {"spearman", num(c.spearman)},
                 {"kendall", num(c.kendall)}});
  ordered_json w = ordered_json::array();
  for (const auto& c : rep.williams)
    w.push_back({{"metric_a", c.metric_a}, {"metric_b", c.metric_b}, {"n", c.n}, {"r12", num(c.r12)},
                 {"r13", num(c.r13)}, {"r23", num(c.r23)}, {"t", num(c.t)}, {"p", num(c.p_value)}});
  j["metrics"] = m;
  j["williams"] = w;
  j["warnings"] = rep.warnings;
  return j;
}

int cmd_analyze(const Global& g, const AnalyzeArgs& a) {
  const auto ratings = io::read_ratings(a.input);
  human_eval::AnalysisConfig cfg;
  cfg.alpha = g.alpha;
  cfg.sig_threshold = g.sig_threshold;
  const auto res = human_eval::analyze(ratings, cfg);

  ordered_json report;
  report["alpha"] = g.alpha;
  report["sig_threshold"] = g.sig_threshold;
  ordered_json qc = ordered_json::object();
  for (const auto& [w, r] : res.qc.report) {
    qc[w] = {{"p_value", r.p_value ? num(*r.p_value) : ordered_json(nullptr)},
             {"passed", r.passed},
             {"reason", r.reason},
             {"n_pairs", r.n_pairs}};
  }
  report["qc"] = qc;
  report["systems"] = system_table_json(res.systems);
  if (res.matrix) {
    ordered_json p = ordered_json::object();
    for (std::size_t i = 0; i < res.matrix->systems.size(); ++i) {
      ordered_json row = ordered_json::object();
      for (std::size_t j = 0; j < res.matrix->systems.size(); ++j)
        if (i != j) row[res.matrix->systems[j]] = num(res.matrix->p_values[i][j]);
      p[res.matrix->systems[i]] = row;
    }
    report["significance_p"] = p;
  }
  if (!a.metrics.empty() && !res.systems.rows.empty()) {
    const auto table = io::read_score_table(a.metrics, a.human_column);
    report["correlation"] = correlation_json(human_eval::correlate_metrics(res.systems, table.metrics));
  }
  report["warnings"] = res.warnings;

  emit(g, "report.json", json_text(report));
  if (res.matrix) {
    emit(g, "sigmatrix.csv", io::significance_csv(*res.matrix));
    emit(g, "heatmap.svg", io::heatmap_svg(*res.matrix));
  }
  if (res.systems.rows.empty()) throw DegenerateExit("no worker passed quality control; system table is empty");
  std::cout << res.qc.passed_workers.size() << "/" << res.qc.report.size() << " worker(s) passed QC, "
            << res.systems.rows.size() << " system(s) scored\n";
  return kExitOk;
}

// ---------------------------------------------------------------- overlap

int cmd_overlap(const std::string& a, const std::string& b) {
  const auto ma = io::read_significance_csv(a);
  const auto mb = io::read_significance_csv(b);
  std::cout << io::fmt(human_eval::matrix_overlap(ma, mb)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- correlate

struct CorrelateArgs {
  std::string input;
  std::string human_column = "z";
};

int cmd_correlate(const Global& g, const CorrelateArgs& a) {
  const auto table = io::read_score_table(a.input, a.human_column);
  const auto rep = human_eval::correlate_metrics(table.human, table.metrics);
  std::ostringstream corr;
  corr << "metric,n,pearson,spearman,kendall\n";
  for (const auto& c : rep.metrics)
    corr << io::csv_field(c.metric) << ',' << c.n << ',' << io::fmt(c.pearson) << ',' << io::fmt(c.spearman)
         << ',' << io::fmt(c.kendall) << '\n';
  std::ostringstream will;
  will << "metric_a,metric_b,n,r12,r13,r23,t,p\n";
  for (const auto& w : rep.williams)
    will << io::csv_field(w.metric_a) << ',' << io::csv_field(w.metric_b) << ',' << w.n << ',' << io::fmt(w.r12)
         << ',' << io::fmt(w.r13) << ',' << io::fmt(w.r23) << ',' << io::fmt(w.t) << ',' << io::fmt(w.p_value)
         << '\n';
  emit(g, "correlation.csv", corr.str());
  emit(g, "williams.csv", will.str());
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << corr.str();
  if (rep.metrics.empty()) throw DegenerateExit("no metric could be correlated");
  return kExitOk;
}

// ---------------------------------------------------------------- test

struct TestArgs {
  std::string input;
  std::string x;
  std::string y;
  std::string alternative = "greater";
  double r12 = 0, r13 = 0, r23 = 0;
  std::size_t n = 0;
};

std::vector<std::optional<double>> csv_column(const io::CsvTable& t, const std::string& name) {
  std::vector<std::optional<double>> out;
  const auto c = t.column(name);
  for (const auto& row : t.rows) out.push_back(io::parse_cell(row[c]));
  return out;
}

void print_result(const stats::TestResult& r) {
  ordered_json j;
  j["statistic"] = num(r.statistic);
  j["p_value"] = num(r.p_value);
  j["method"] = stats::to_string(r.method);
  j["alternative"] = stats::to_string(r.alternative);
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  std::cout << j.dump() << "\n";
}

int cmd_test(const std::string& which, const TestArgs& a) {
  const auto alt = stats::parse_alternative(a.alternative);
  if (which == "williams") {
    print_result(stats::williams_test(a.r12, a.r13, a.r23, a.n, alt));
    return kExitOk;
  }
  const auto t = io::read_csv(a.input);
  const auto xs = csv_column(t, a.x);
  const auto ys = csv_column(t, a.y);
  if (which == "rank-sum") {
    std::vector<double> x, y;
    for (const auto& v : xs)
      if (v) x.push_back(*v);
    for (const auto& v : ys)
      if (v) y.push_back(*v);
    print_result(stats::wilcoxon_rank_sum(x, y, alt));
  } else {
    stats::PairedSample s;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] && ys[i]) s.pairs.emplace_back(*xs[i], *ys[i]);
    print_result(stats::wilcoxon_signed_rank(s, alt));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::size_t hits = 300;
  std::size_t workers = 100;
  double random_fraction = 0.2;
  std::string prefix = "w";
};

int cmd_simulate(const Global& g, const SimulateArgs& a) {
  human_eval::SimulationConfig cfg;
  cfg.hits = a.hits;
  cfg.workers = a.workers;
  cfg.random_worker_fraction = a.random_fraction;
  cfg.worker_prefix = a.prefix;
  const auto run = human_eval::simulate_run(cfg, Rng(g.seed));
  std::string ratings;
  for (const auto& r : run.ratings) ratings += io::rating_to_json(r).dump() + "\n";
  std::string hits;
  for (const auto& h : run.hits) hits += io::hit_to_json(h).dump() + "\n";
  emit(g, "ratings.jsonl", ratings);
  emit(g, "hits.jsonl", hits);
  std::cout << run.ratings.size() << " rating(s) over " << run.hits.size() << " HIT(s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qgeval: question-generation evaluation toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--seed", g.seed, "Seed for every randomized step")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--alpha", g.alpha, "QC signed-rank significance level")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--sig-threshold", g.sig_threshold, "p-value threshold for the significance matrix")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--model", g.model, "Masked LM backend")
      ->capture_default_str()
      ->check(CLI::IsMember({"mock", "bridge"}));
  app.add_option("--bridge-addr", g.bridge_addr, "Bridge address host:port or unix:/path");

  MetricsArgs ma;
  auto* metrics = app.add_subcommand("metrics", "Reference-based metrics per item and per system");
  metrics->add_option("input", ma.input, "EvalItem JSONL with references")->required();
  metrics->add_option("--config", ma.config, "Answerability config file");
  metrics->add_option("--synonyms", ma.synonyms, "METEOR synonym table (TSV)");
  metrics->add_option("--smoothing", ma.smoothing, "BLEU smoothing")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "epsilon"}));

  QAScoreArgs qa;
  auto* qascore = app.add_subcommand("qascore", "Reference-free QAScore per item and per system");
  qascore->add_option("input", qa.input, "EvalItem JSONL")->required();
  qascore->add_option("--aggregation", qa.aggregation, "System aggregation")
      ->capture_default_str()
      ->check(CLI::IsMember({"per_word_mean", "sum"}));
  qascore->add_option("--workers", qa.workers, "Scoring threads (mock only)")->capture_default_str();
  qascore->add_option("--logit-scale", qa.logit_scale, "Mock logit range")->capture_default_str();

  HitsArgs ha;
  auto* hits = app.add_subcommand("hits", "HIT construction");
  hits->require_subcommand(1);
  auto* hits_build = hits->add_subcommand("build", "Build HITs from grouped system questions");
  hits_build->add_option("input", ha.input, "EvalItem JSONL, 11 systems per (passage, answer)")->required();
  hits_build->add_option("--human", ha.human, "Name of the human-written system")->capture_default_str();

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "QC, standardisation, system scores and significance");
  analyze->add_option("input", aa.input, "RatingRecord JSONL")->required();
  analyze->add_option("--metrics", aa.metrics, "System-score CSV to correlate against");
  analyze->add_option("--human-column", aa.human_column, "Human score column of the metrics CSV")
      ->capture_default_str();

  std::string ov_a, ov_b;
  auto* overlap = app.add_subcommand("overlap", "Agreement between two significance matrices");
  overlap->add_option("a", ov_a, "sigmatrix.csv")->required();
  overlap->add_option("b", ov_b, "sigmatrix.csv")->required();

  CorrelateArgs ca;
  auto* correlate = app.add_subcommand("correlate", "Metric vs human correlations and Williams tests");
  correlate->add_option("input", ca.input, "System-score CSV")->required();
  correlate->add_option("--human-column", ca.human_column, "Human score column")->capture_default_str();

  TestArgs ta;
  auto* test = app.add_subcommand("test", "Statistical tests");
  test->require_subcommand(1);
  auto add_columns = [&](CLI::App* sub) {
    sub->add_option("input", ta.input, "CSV file")->required();
    sub->add_option("--x", ta.x, "First column")->required();
    sub->add_option("--y", ta.y, "Second column")->required();
    sub->add_option("--alternative", ta.alternative, "greater, less or two-sided")->capture_default_str();
  };
  auto* rank_sum = test->add_subcommand("rank-sum", "Wilcoxon rank-sum (x vs y)");
  add_columns(rank_sum);
  auto* signed_rank = test->add_subcommand("signed-rank", "Wilcoxon signed-rank on row pairs (d = y - x)");
  add_columns(signed_rank);
  auto* williams = test->add_subcommand("williams", "Williams test for dependent correlations");
  williams->add_option("--r12", ta.r12, "Correlation between the two metrics")->required();
  williams->add_option("--r13", ta.r13, "Metric 1 vs human")->required();
  williams->add_option("--r23", ta.r23, "Metric 2 vs human")->required();
  williams->add_option("--n", ta.n, "Number of systems")->required();
  williams->add_option("--alternative", ta.alternative, "greater, less or two-sided")->capture_default_str();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Synthetic rating run with planted system qualities");
  simulate->add_option("--hits", sa.hits, "Number of HITs")->capture_default_str();
  simulate->add_option("--workers", sa.workers, "Worker pool size")->capture_default_str();
  simulate->add_option("--random-fraction", sa.random_fraction, "Share of random clickers")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--worker-prefix", sa.prefix, "Worker id prefix")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*metrics) return cmd_metrics(g, ma);
    if (*qascore) return cmd_qascore(g, qa);
    if (*hits_build) return cmd_hits_build(g, ha);
    if (*analyze) return cmd_analyze(g, aa);
    if (*overlap) return cmd_overlap(ov_a, ov_b);
    if (*correlate) return cmd_correlate(g, ca);
    if (*rank_sum) return cmd_test("rank-sum", ta);
    if (*signed_rank) return cmd_test("signed-rank", ta);
    if (*williams) return cmd_test("williams", ta);
    if (*simulate) return cmd_simulate(g, sa);
  } catch (const DegenerateExit& e) {
    std::cerr << "qgeval: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const DegenerateInput& e) {
    std::cerr << "qgeval: degenerate input: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const TransportError& e) {
    std::cerr << "qgeval: " << e.what() << "\n";
    return kExitTransport;
  } catch (const ModelError& e) {
    std::cerr << "qgeval: model error at word " << e.word_index() << ": " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "qgeval: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
