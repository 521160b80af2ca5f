#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "tweetalpha/decimal.hpp"
#include "tweetalpha/features.hpp"
#include "tweetalpha/gbdt.hpp"
#include "tweetalpha/sentiment.hpp"

using namespace tweetalpha;

namespace {

std::vector<double> random_doubles(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

sentiment::Lexicon synthetic_lexicon(std::size_t n_terms) {
  sentiment::Lexicon lex;
  lex.id = "bench";
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (std::size_t i = 0; i < n_terms; ++i)
    lex.entries["termo" + std::to_string(i)] = dist(rng);
  lex.entries["bom"] = 2.0;
  lex.entries["ruim"] = -2.0;
  lex.entries["muito bom"] = 3.0;
  lex.has_bigrams = true;
  lex.scale_min = -3.0;
  lex.scale_max = 3.0;
  lex.neutral_band = {-0.5, 0.5};
  return lex;
}

std::string synthetic_sentence(std::size_t n_tokens) {
  std::mt19937_64 rng(11);
  static const char* kWords[] = {"mercado", "bom",  "ruim",   "muito",
                                 "nao",     "alta", "termo3", "hoje"};
  std::string text;
  for (std::size_t i = 0; i < n_tokens; ++i) {
    if (i) text += ' ';
    text += kWords[rng() % (sizeof kWords / sizeof *kWords)];
  }
  return text;
}

struct TrainFixture {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> columns;
  gbdt::TrainParams params;
};

TrainFixture make_train_fixture(std::size_t n_rows, std::size_t n_features) {
  TrainFixture fx;
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  fx.rows.resize(n_rows, std::vector<double>(n_features));
  fx.labels.resize(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (double& v : fx.rows[i]) v = dist(rng);
    fx.labels[i] = fx.rows[i][0] + 0.3 * dist(rng) > 0.65 ? 1 : 0;
  }
  for (std::size_t j = 0; j < n_features; ++j)
    fx.columns.push_back("f" + std::to_string(j));
  fx.params.eta = 0.1;
  fx.params.n_estimators = 10;
  fx.params.max_depth = 4;
  fx.params.scale_pos_weight = 1.0;
  return fx;
}

void BM_AggregateValues(benchmark::State& state) {
  std::vector<double> values = random_doubles(state.range(0), 5);
  for (auto _ : state) {
    features::Aggregates agg = features::aggregate_values(values);
    benchmark::DoNotOptimize(agg);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AggregateValues)->Arg(64)->Arg(1024);

void BM_TokenizeLower(benchmark::State& state) {
  std::string text = synthetic_sentence(32);
  for (auto _ : state) {
    auto tokens = sentiment::tokenize_lower(text);
    benchmark::DoNotOptimize(tokens);
  }
}
BENCHMARK(BM_TokenizeLower);

void BM_SignedSum(benchmark::State& state) {
  sentiment::Lexicon lex = synthetic_lexicon(1000);
  std::string text = synthetic_sentence(24);
  for (auto _ : state) {
    sentiment::Scored s = sentiment::score_signed_sum(text, lex);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SignedSum);

void BM_HeuristicValence(benchmark::State& state) {
  sentiment::Lexicon lex = synthetic_lexicon(1000);
  sentiment::HeuristicRules rules;
  rules.negations = {"nao", "nunca"};
  rules.intensifiers = {"muito", "bem"};
  std::string text = synthetic_sentence(24);
  for (auto _ : state) {
    sentiment::Scored s = sentiment::score_heuristic_valence(text, lex, rules);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_HeuristicValence);

void BM_GbdtTrain(benchmark::State& state) {
  TrainFixture fx = make_train_fixture(state.range(0), 8);
  for (auto _ : state) {
    gbdt::Model model = gbdt::train(fx.rows, fx.labels, fx.columns, fx.params);
    benchmark::DoNotOptimize(model);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) *
                          fx.params.n_estimators);
}
BENCHMARK(BM_GbdtTrain)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_GbdtPredict(benchmark::State& state) {
  TrainFixture fx = make_train_fixture(1024, 8);
  gbdt::Model model = gbdt::train(fx.rows, fx.labels, fx.columns, fx.params);
  for (auto _ : state) {
    std::vector<double> p = gbdt::predict_proba(model, fx.rows, fx.columns);
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * fx.rows.size());
}
BENCHMARK(BM_GbdtPredict);

void BM_Auc(benchmark::State& state) {
  std::size_t n = 4096;
  std::mt19937_64 rng(31);
  std::vector<int> labels(n);
  std::vector<double> scores(n);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = int(rng() & 1);
    scores[i] = dist(rng);
  }
  for (auto _ : state) {
    double v = gbdt::auc(labels, scores);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Auc);

void BM_DecimalParse(benchmark::State& state) {
  for (auto _ : state) {
    Decimal d = Decimal::parse("12345.678901");
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_DecimalParse);

}  // namespace

BENCHMARK_MAIN();
