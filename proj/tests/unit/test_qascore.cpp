#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "qgeval/io.hpp"
#include "qgeval/qascore.hpp"
#include "support.hpp"

using namespace qgeval;

namespace {

std::vector<std::string> vocab_of(std::size_t v) {
  std::vector<std::string> out{"<unk>"};
  for (std::size_t i = 1; i < v; ++i) out.push_back("w" + std::to_string(i));
  return out;
}

class ConstantModel : public MaskedLanguageModel {
 public:
  explicit ConstantModel(double v) : v_(v) {}
  std::string name() const override { return "constant"; }
  std::size_t vocab_size() const override { return 1; }
  double word_log_likelihood(const std::string&, const std::string&, const std::string&,
                             std::size_t) const override {
    return v_;
  }

 private:
  double v_;
};

class FailingModel : public MaskedLanguageModel {
 public:
  std::string name() const override { return "failing"; }
  std::size_t vocab_size() const override { return 1; }
  double word_log_likelihood(const std::string&, const std::string&, const std::string&,
                             std::size_t w) const override {
    if (w == 2) throw std::runtime_error("socket closed");
    return -1.0;
  }
};

}  // namespace

TEST(LogSoftmax, Uniform) {
  const std::vector<double> x{0, 0, 0, 0};
  for (double v : log_softmax(x)) EXPECT_NEAR(v, std::log(0.25), 1e-15);
}

TEST(LogSoftmax, NoOverflow) {
  const std::vector<double> x{1000.0, 0.0};
  const auto lp = log_softmax(x);
  EXPECT_NEAR(lp[0], 0.0, 1e-15);
  EXPECT_NEAR(lp[1], -1000.0, 1e-9);
}

TEST(LogSoftmax, HighPrecisionOracle) {
  const std::vector<double> x{1, 2, 3};
  const auto lp = log_softmax(x);
  EXPECT_NEAR(lp[0], -2.4076059644443803045, 1e-14);
  EXPECT_NEAR(lp[1], -1.4076059644443803045, 1e-14);
  EXPECT_NEAR(lp[2], -0.40760596444438030448, 1e-14);
}

TEST(LogSoftmax, ShiftInvariantAndNormalised) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> x(1 + rng.index(40));
    for (auto& v : x) v = rng.uniform(-20, 20);
    auto shifted = x;
    const double c = rng.uniform(-500, 500);
    for (auto& v : shifted) v += c;
    const auto a = log_softmax(x), b = log_softmax(shifted);
    double mass = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-9);
      mass += std::exp(a[i]);
    }
    EXPECT_NEAR(mass, 1.0, 1e-9);
  }
}

TEST(LogSoftmax, Errors) {
  EXPECT_THROW(log_softmax(std::vector<double>{}), InvalidArgument);
  EXPECT_THROW(log_softmax(std::vector<double>{1.0, NAN}), InvalidArgument);
  EXPECT_THROW(log_softmax(std::vector<double>{INFINITY}), InvalidArgument);
}

TEST(TrueWordLoglik, Cases) {
  const auto uniform = log_softmax(std::vector<double>(16, 0.0));
  EXPECT_NEAR(true_word_loglik(uniform, 7), std::log(1.0 / 16.0), 1e-15);
  const auto peaked = log_softmax(std::vector<double>{10, 0, 0, 0});
  EXPECT_NEAR(true_word_loglik(peaked, 0), -0.00013619051493825362849, 1e-15);
  EXPECT_THROW(true_word_loglik(uniform, 16), InvalidArgument);
}

TEST(QAScoreQuestion, UniformMockClosedForm) {
  MockMLM model(vocab_of(16), {.seed = 1, .logit_scale = 0.0});
  const EvalItem item{"i", "s", "some passage", "a question", "three word answer", std::nullopt};
  const auto r = qascore_question(item, model);
  EXPECT_EQ(r.word_count, 3u);
  EXPECT_NEAR(r.total, -8.317766166719343713, 1e-12);
  EXPECT_NEAR(r.per_word_mean, std::log(1.0 / 16.0), 1e-12);
  ASSERT_EQ(r.per_word.size(), 3u);
  EXPECT_EQ(r.per_word[1].first, "word");
}

TEST(QAScoreQuestion, ConstantModel) {
  const EvalItem item{"i", "s", "p", "q", "yes", std::nullopt};
  const auto r = qascore_question(item, ConstantModel(-0.5));
  EXPECT_DOUBLE_EQ(r.total, -0.5);
  EXPECT_DOUBLE_EQ(r.per_word_mean, -0.5);
}

TEST(QAScoreQuestion, Errors) {
  const EvalItem empty{"i", "s", "p", "q", "   ", std::nullopt};
  EXPECT_THROW(qascore_question(empty, ConstantModel(-1)), InvalidArgument);
  const EvalItem item{"i", "s", "p", "q", "a b c d", std::nullopt};
  EXPECT_THROW(qascore_question(item, ConstantModel(0.5)), ModelError);
  EXPECT_THROW(qascore_question(item, ConstantModel(NAN)), ModelError);
  try {
    qascore_question(item, FailingModel());
    FAIL() << "expected ModelError";
  } catch (const ModelError& e) {
    EXPECT_EQ(e.word_index(), 2u);
  }
}

TEST(QAScoreQuestion, TotalIsSumOfWordLogliks) {
  MockMLM model(vocab_of(30), {.seed = 3});
  std::string answer = "w1";
  for (int k = 2; k < 10; ++k) {
    const auto r = qascore_question({"i", "s", "passage w1 w2", "question", answer, std::nullopt}, model);
    double sum = 0.0;
    for (const auto& [word, ll] : r.per_word) {
      EXPECT_LE(ll, 0.0);
      sum += ll;
    }
    EXPECT_DOUBLE_EQ(r.total, sum);
    EXPECT_EQ(r.word_count, static_cast<std::size_t>(k - 1));
    answer += " w" + std::to_string(k);
  }
}

TEST(MockMLM, DeterministicAndSeedSensitive) {
  const EvalItem item{"i", "s", "the liffey flows", "what flows", "the liffey", std::nullopt};
  const std::vector<std::string> v{"<unk>", "flows", "liffey", "the", "what"};
  MockMLM a(v, {.seed = 5}), b(v, {.seed = 5}), c(v, {.seed = 6});
  EXPECT_EQ(qascore_question(item, a).total, qascore_question(item, b).total);
  EXPECT_NE(qascore_question(item, a).total, qascore_question(item, c).total);
  EXPECT_EQ(a.token_index("Liffey."), 2u);
  EXPECT_EQ(a.token_index("nowhere"), 0u);
}

TEST(MockMLM, MatchesIndependentScript) {
  const auto items = io::read_items(fixture::test_data_dir() / "qascore_corpus.jsonl");
  const auto o = fixture::oracle("mock_qascore");
  const auto vocab = MockMLM::corpus_vocab(items);
  ASSERT_EQ(vocab.size(), o.at("vocab_size").get<std::size_t>());
  for (const auto& cfg : o.at("configs")) {
    MockMLMOptions opt;
    opt.seed = cfg.at("seed").get<std::uint64_t>();
    opt.logit_scale = cfg.at("logit_scale").get<double>();
    opt.cooccurrence_bias = cfg.at("cooccurrence_bias").get<double>();
    opt.cooccurrence_window = cfg.at("cooccurrence_window").get<std::size_t>();
    MockMLM model(vocab, opt);
    for (const auto& it : items)
      EXPECT_NEAR(qascore_question(it, model).total, cfg.at("items").at(it.id).get<double>(), 1e-9) << it.id;
    for (const auto& [sys, expected] : cfg.at("systems").items()) {
      std::vector<EvalItem> si;
      for (const auto& it : items)
        if (it.system == sys) si.push_back(it);
      EXPECT_NEAR(qascore_system(si, model), expected.get<double>(), 1e-9) << sys;
    }
  }
}

TEST(QAScoreCorpus, ParallelMatchesSerial) {
  const auto items = io::read_items(fixture::test_data_dir() / "qascore_corpus.jsonl");
  MockMLM model(MockMLM::corpus_vocab(items), {.seed = 99});
  const auto serial = qascore_corpus(items, model, 1);
  const auto parallel = qascore_corpus(items, model, 4);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) EXPECT_EQ(serial[i].total, parallel[i].total);
}

TEST(QAScoreSystem, Aggregation) {
  const EvalItem a{"a", "s", "p", "q", "x", std::nullopt};
  const EvalItem b{"b", "s", "p", "q", "x y", std::nullopt};
  const std::vector<EvalItem> items{a, b};
  QAScoreResult ra, rb;
  ra.total = -1.0, ra.per_word_mean = -1.0, ra.word_count = 1;
  rb.total = -6.0, rb.per_word_mean = -3.0, rb.word_count = 2;
  const std::vector<QAScoreResult> res{ra, rb};
  EXPECT_DOUBLE_EQ(aggregate_system(items, res, QAScoreAggregation::per_word_mean), -2.0);
  EXPECT_DOUBLE_EQ(aggregate_system(items, res, QAScoreAggregation::sum), -3.5);
  EXPECT_DOUBLE_EQ(qascore_system(std::vector<EvalItem>{a}, ConstantModel(-0.25)), -0.25);
  EXPECT_THROW(qascore_system(std::vector<EvalItem>{}, ConstantModel(-1)), InvalidArgument);
}

// A mock that favours passage tokens near the question's cue words should
// prefer the question that was actually asked about the answer's sentence.
TEST(MockMLM, MatchedQuestionOutscoresShuffled) {
  constexpr int kFixtures = 100;
  Rng rng(2024);
  std::vector<EvalItem> matched, shuffled;
  std::vector<std::vector<std::string>> passages;
  std::vector<std::string> questions, answers;
  for (int f = 0; f < kFixtures; ++f) {
    std::vector<std::string> p(30);
    for (auto& w : p) w = "t" + std::to_string(rng.index(400));
    const std::size_t pos = 2 + rng.index(26);
    questions.push_back("what is " + p[pos - 1] + " " + p[pos + 1]);
    answers.push_back(p[pos]);
    passages.push_back(p);
  }
  for (int f = 0; f < kFixtures; ++f) {
    const std::string passage = join(passages[f]);
    matched.push_back({"m" + std::to_string(f), "m", passage, questions[f], answers[f], std::nullopt});
    shuffled.push_back({"s" + std::to_string(f), "s", passage, questions[(f + 1) % kFixtures], answers[f], std::nullopt});
  }
  std::vector<EvalItem> all = matched;
  all.insert(all.end(), shuffled.begin(), shuffled.end());
  MockMLM model(MockMLM::corpus_vocab(all),
                {.seed = 17, .logit_scale = 1.0, .cooccurrence_bias = 6.0, .cooccurrence_window = 2});
  int wins = 0;
  for (int f = 0; f < kFixtures; ++f)
    if (qascore_question(matched[f], model).total > qascore_question(shuffled[f], model).total) ++wins;
  // Chance token collisions can flip an occasional fixture.
  EXPECT_GE(wins, 95);
}
