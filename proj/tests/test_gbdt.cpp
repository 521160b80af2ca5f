#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tweetalpha/error.hpp"
#include "tweetalpha/gbdt.hpp"

using namespace tweetalpha;
using namespace tweetalpha::gbdt;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> feature_names(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("f" + std::to_string(i));
  return names;
}

TrainParams loose_params() {
  TrainParams p;
  p.eta = 0.3;
  p.n_estimators = 1;
  p.max_depth = 1;
  p.scale_pos_weight = 1.0;
  p.reg_lambda = 1.0;
  p.gamma = 0.0;
  p.min_child_weight = 0.0;
  return p;
}

}  // namespace

TEST_CASE("first split on a four-row ramp lands at the midpoint") {
  std::vector<std::vector<double>> rows{{1.0}, {2.0}, {3.0}, {4.0}};
  std::vector<int> labels{1, 1, 0, 0};

  Model model = train(rows, labels, {"x"}, loose_params());
  REQUIRE(model.trees.size() == 1);
  const Tree& tree = model.trees[0];
  REQUIRE(tree.nodes.size() == 3);
  CHECK(tree.nodes[0].feature == 0);
  CHECK(tree.nodes[0].threshold == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(tree.nodes[0].default_left);  // no missing rows, tie resolves left
  // g = +-0.5, h = 0.25 per row: each leaf is -G/(H+1) = -(+-1)/1.5.
  CHECK(tree.nodes[tree.nodes[0].left].leaf_value ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(tree.nodes[tree.nodes[0].right].leaf_value ==
        doctest::Approx(-2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("identical feature rows produce a single-leaf tree") {
  std::vector<std::vector<double>> rows{{5.0}, {5.0}, {5.0}};
  std::vector<int> labels{1, 1, 1};
  Model model = train(rows, labels, {"x"}, loose_params());
  REQUIRE(model.trees.size() == 1);
  REQUIRE(model.trees[0].nodes.size() == 1);
  CHECK(model.trees[0].nodes[0].feature == -1);
  CHECK(model.trees[0].nodes[0].leaf_value > 0.0);  // every label is 1
}

TEST_CASE("first tree matches the exhaustive oracle on random problems") {
  std::mt19937_64 rng(20250817);
  for (int trial = 0; trial < 80; ++trial) {
    std::size_t n = 4 + rng() % 29;
    std::size_t n_features = 1 + rng() % 2;
    TrainParams p = loose_params();
    p.max_depth = 1 + static_cast<int>(rng() % 2);
    p.scale_pos_weight = (trial % 3 == 0) ? 0.5 : (trial % 3 == 1 ? 1.0 : 2.0);
    p.reg_lambda = trial % 2 ? 1.0 : 0.0;
    p.gamma = trial % 5 ? 0.0 : 0.1;
    p.min_child_weight = trial % 4 ? 0.0 : 1.0;

    std::vector<std::vector<double>> rows(n, std::vector<double>(n_features));
    std::vector<int> labels(n);
    bool saw[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t f = 0; f < n_features; ++f) {
        if (rng() % 8 == 0)
          rows[i][f] = kNaN;
        else
          rows[i][f] = static_cast<double>(rng() % 6);  // force value ties
      }
      labels[i] = static_cast<int>(rng() % 2);
      saw[labels[i]] = true;
    }
    if (!saw[0]) labels[0] = 0;
    if (!saw[1]) labels[1 % n] = 1;

    Model model = train(rows, labels, feature_names(n_features), p);
    testing::OracleTree oracle = testing::oracle_first_tree(rows, labels, p);
    CAPTURE(trial);
    CHECK(testing::trees_match(model.trees[0], oracle, 1e-9));
  }
}

TEST_CASE("auc hand values and failure modes") {
  CHECK(auc({0, 1}, {0.1, 0.9}) == 1.0);
  CHECK(auc({1, 0}, {0.1, 0.9}) == 0.0);
  CHECK(auc({0, 1}, {0.5, 0.5}) == 0.5);
  CHECK(auc({0, 1, 1, 0}, {0.1, 0.2, 0.2, 0.3}) == 0.5);
  CHECK(auc({0, 0, 1, 1}, {1.0, 2.0, 2.0, 3.0}) == doctest::Approx(0.875));
  CHECK_THROWS_WITH_AS(auc({1, 1}, {0.1, 0.2}), doctest::Contains("both classes"),
                       Error);
  CHECK_THROWS_WITH_AS(auc({}, {}), doctest::Contains("bad input"), Error);
  CHECK_THROWS_AS(auc({0, 1}, {0.1}), Error);
}

TEST_CASE("auc equals the quadratic pairwise count") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 2 + rng() % 58;
    std::vector<int> labels(n);
    std::vector<double> scores(n);
    bool saw[2] = {false, false};
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng() % 2);
      saw[labels[i]] = true;
      scores[i] = static_cast<double>(rng() % 7) / 3.0;  // heavy ties
    }
    if (!saw[0]) labels[0] = 0;
    if (!saw[1]) labels[n - 1] = 1;
    CHECK(auc(labels, scores) ==
          doctest::Approx(testing::pairwise_auc(labels, scores)).epsilon(1e-12));
  }
}

TEST_CASE("training loss is recorded and non-increasing at small eta") {
  std::mt19937_64 rng(5);
  std::size_t n = 80;
  std::vector<std::vector<double>> rows(n, std::vector<double>(4));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : rows[i]) v = static_cast<double>(rng() % 100) / 10.0;
    labels[i] = (rows[i][0] + rows[i][2] > 10.0) ? 1 : 0;
  }
  labels[0] = 0;
  labels[1] = 1;

  TrainParams p;
  p.eta = 0.05;
  p.n_estimators = 50;
  p.max_depth = 3;
  p.scale_pos_weight = 1.0;
  Model model = train(rows, labels, feature_names(4), p);

  REQUIRE(model.history.size() == 50);
  CHECK(model.best_round == 0);  // no eval set
  for (std::size_t i = 0; i < model.history.size(); ++i) {
    CHECK(model.history[i].round == static_cast<int>(i) + 1);
    CHECK(std::isnan(model.history[i].eval_logloss));
    if (i > 0) {
      CHECK(model.history[i].train_logloss <=
            model.history[i - 1].train_logloss + 1e-6);
    }
  }

  // The recorded final-round loss is the loss of the returned model.
  std::vector<double> probs = predict_proba(model, rows, feature_names(4));
  CHECK(logloss(labels, probs) ==
        doctest::Approx(model.history.back().train_logloss).epsilon(1e-13));
}

TEST_CASE("row order never changes the fitted trees") {
  std::mt19937_64 rng(99);
  std::size_t n = 60;
  std::vector<std::vector<double>> rows(n, std::vector<double>(3));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : rows[i])
      v = (rng() % 9 == 0) ? kNaN : static_cast<double>(rng() % 12);
    labels[i] = static_cast<int>(rng() % 2);
  }
  labels[0] = 0;
  labels[1] = 1;

  TrainParams p;
  p.eta = 0.1;
  p.n_estimators = 12;
  p.max_depth = 3;
  p.scale_pos_weight = 0.7;

  Model a = train(rows, labels, feature_names(3), p);

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<double>> shuffled_rows;
  std::vector<int> shuffled_labels;
  for (std::size_t i : perm) {
    shuffled_rows.push_back(rows[i]);
    shuffled_labels.push_back(labels[i]);
  }
  Model b = train(shuffled_rows, shuffled_labels, feature_names(3), p);

  CHECK(a.trees == b.trees);
  CHECK(a.base_margin == b.base_margin);
  std::vector<double> pa = predict_proba(a, rows, feature_names(3));
  std::vector<double> pb = predict_proba(b, rows, feature_names(3));
  CHECK(pa == pb);
}

TEST_CASE("duplicating every row leaves the unregularized fit unchanged") {
  std::mt19937_64 rng(123);
  std::size_t n = 30;
  std::vector<std::vector<double>> rows(n, std::vector<double>(2));
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i] = {static_cast<double>(rng() % 10), static_cast<double>(rng() % 10)};
    labels[i] = static_cast<int>(rng() % 2);
  }
  labels[0] = 0;
  labels[1] = 1;

  std::vector<std::vector<double>> doubled = rows;
  std::vector<int> doubled_labels = labels;
  doubled.insert(doubled.end(), rows.begin(), rows.end());
  doubled_labels.insert(doubled_labels.end(), labels.begin(), labels.end());

  TrainParams p;
  p.eta = 0.2;
  p.n_estimators = 4;
  p.max_depth = 2;
  p.scale_pos_weight = 1.0;
  p.reg_lambda = 0.0;
  p.gamma = 0.0;
  p.min_child_weight = 0.0;

  Model single = train(rows, labels, feature_names(2), p);
  Model twice = train(doubled, doubled_labels, feature_names(2), p);
  CHECK(single.trees == twice.trees);
}

TEST_CASE("best round is the earliest eval-loss argmin and gates prediction") {
  std::mt19937_64 rng(321);
  auto make = [&rng](std::size_t n, std::vector<std::vector<double>>& rows,
                     std::vector<int>& labels) {
    rows.assign(n, std::vector<double>(2));
    labels.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = {static_cast<double>(rng() % 20), static_cast<double>(rng() % 20)};
      labels[i] = rows[i][0] > 9.5 ? 1 : 0;
      if (rng() % 4 == 0) labels[i] ^= 1;  // noise so eval loss turns back up
    }
    labels[0] = 0;
    labels[1] = 1;
  };
  std::vector<std::vector<double>> rows, eval_rows;
  std::vector<int> labels, eval_labels;
  make(120, rows, labels);
  make(40, eval_rows, eval_labels);

  TrainParams p;
  p.eta = 0.4;
  p.n_estimators = 40;
  p.max_depth = 4;
  p.scale_pos_weight = 1.0;
  Model model =
      train(rows, labels, feature_names(2), p, &eval_rows, &eval_labels);

  REQUIRE(model.best_round >= 1);
  int argmin = 1;
  for (const EvalRecord& rec : model.history) {
    CHECK_FALSE(std::isnan(rec.eval_logloss));
    if (rec.eval_logloss <
        model.history[static_cast<std::size_t>(argmin) - 1].eval_logloss)
      argmin = rec.round;
  }
  CHECK(model.best_round == argmin);

  // Predicting with best_round = k equals predicting with the first k trees.
  Model truncated = model;
  truncated.trees.resize(static_cast<std::size_t>(model.best_round));
  truncated.best_round = 0;
  CHECK(predict_proba(model, eval_rows, feature_names(2)) ==
        predict_proba(truncated, eval_rows, feature_names(2)));
}

TEST_CASE("missing values follow the learned default direction") {
  Tree tree;
  tree.nodes.push_back({0, 5.0, false, 1, 2, 0.0});
  tree.nodes.push_back({-1, 0.0, true, -1, -1, -3.0});
  tree.nodes.push_back({-1, 0.0, true, -1, -1, 4.0});
  CHECK(tree.value({1.0}) == -3.0);
  CHECK(tree.value({9.0}) == 4.0);
  CHECK(tree.value({kNaN}) == 4.0);  // default_left = false
  tree.nodes[0].default_left = true;
  CHECK(tree.value({kNaN}) == -3.0);
}

TEST_CASE("model document round trip is exact") {
  std::mt19937_64 rng(55);
  std::vector<std::vector<double>> rows(40, std::vector<double>(2));
  std::vector<int> labels(40);
  for (std::size_t i = 0; i < 40; ++i) {
    rows[i] = {static_cast<double>(rng() % 16) / 3.0,
               (rng() % 10 == 0) ? kNaN : static_cast<double>(rng() % 5)};
    labels[i] = static_cast<int>(rng() % 2);
  }
  labels[0] = 0;
  labels[1] = 1;
  TrainParams p;
  p.eta = 0.17;
  p.n_estimators = 6;
  p.max_depth = 3;
  p.scale_pos_weight = 0.85;
  Model model = train(rows, labels, {"alpha", "beta"}, p, &rows, &labels);

  std::string text = serialize(model);
  Model back = deserialize(text);
  CHECK(back == model);
  CHECK(serialize(back) == text);
}

TEST_CASE("model document without an eval set keeps NaN as null") {
  std::vector<std::vector<double>> rows{{0.0}, {1.0}};
  std::vector<int> labels{0, 1};
  TrainParams p = loose_params();
  Model model = train(rows, labels, {"x"}, p);

  std::string text = serialize(model);
  CHECK(text.find("null") != std::string::npos);
  Model back = deserialize(text);
  CHECK(back.trees == model.trees);
  REQUIRE(back.history.size() == model.history.size());
  CHECK(back.history[0].train_logloss == model.history[0].train_logloss);
  CHECK(std::isnan(back.history[0].eval_logloss));
}

TEST_CASE("model document rejects foreign or tampered input") {
  std::vector<std::vector<double>> rows{{0.0}, {1.0}};
  std::vector<int> labels{0, 1};
  Model model = train(rows, labels, {"x"}, loose_params());
  std::string text = serialize(model);

  std::string wrong_version = text;
  wrong_version.replace(wrong_version.find("\"format_version\": 1"),
                        std::string("\"format_version\": 1").size(),
                        "\"format_version\": 2");
  CHECK_THROWS_WITH_AS(deserialize(wrong_version),
                       doctest::Contains("format_version"), Error);

  std::string wrong_kind = text;
  wrong_kind.replace(wrong_kind.find("gbdt-logistic"),
                     std::string("gbdt-logistic").size(), "linear-svm!!!");
  CHECK_THROWS_WITH_AS(deserialize(wrong_kind), doctest::Contains("kind"), Error);

  std::string wrong_schema = text;
  wrong_schema.replace(wrong_schema.find("\"x\""), 3, "\"y\"");
  CHECK_THROWS_WITH_AS(deserialize(wrong_schema),
                       doctest::Contains("schema hash"), Error);

  CHECK_THROWS_AS(deserialize("{not json"), Error);
  CHECK_THROWS_AS(deserialize("{}"), Error);
}

TEST_CASE("prediction validates the feature schema") {
  std::vector<std::vector<double>> rows{{0.0}, {1.0}};
  std::vector<int> labels{0, 1};
  Model model = train(rows, labels, {"x"}, loose_params());

  CHECK_THROWS_WITH_AS(predict_proba(model, rows, {"y"}),
                       doctest::Contains("schema"), Error);
  std::vector<std::vector<double>> ragged{{0.0, 1.0}};
  CHECK_THROWS_WITH_AS(predict_proba(model, ragged, {"x"}),
                       doctest::Contains("width"), Error);
}

TEST_CASE("parameter validation bounds") {
  TrainParams p;  // defaults are valid
  validate_params(p);

  auto reject = [](auto mutate, const char* needle) {
    TrainParams q;
    mutate(q);
    CHECK_THROWS_WITH_AS(validate_params(q), doctest::Contains(needle), Error);
  };
  reject([](TrainParams& q) { q.eta = 0.0; }, "eta");
  reject([](TrainParams& q) { q.eta = -1.0; }, "eta");
  reject([](TrainParams& q) { q.n_estimators = 0; }, "n_estimators");
  reject([](TrainParams& q) { q.max_depth = -1; }, "max_depth");
  reject([](TrainParams& q) { q.scale_pos_weight = 0.0; }, "scale_pos_weight");
  reject([](TrainParams& q) { q.scale_pos_weight = 4096.0; }, "scale_pos_weight");
  reject([](TrainParams& q) { q.reg_lambda = -0.5; }, "reg_lambda");
  reject([](TrainParams& q) { q.gamma = -0.1; }, "gamma");
  reject([](TrainParams& q) { q.min_child_weight = -1.0; }, "min_child_weight");
  reject([](TrainParams& q) { q.base_score = 0.0; }, "base_score");
  reject([](TrainParams& q) { q.base_score = 1.0; }, "base_score");
}

TEST_CASE("logloss clamps extreme probabilities") {
  CHECK(logloss({1}, {1.0}) == doctest::Approx(-std::log(1.0 - 1e-15)));
  CHECK(logloss({1}, {0.0}) == doctest::Approx(-std::log(1e-15)));
  // 1 - (1 - 1e-15) re-rounds near 1.0, so spell the clamp out exactly.
  CHECK(logloss({0}, {1.0}) == doctest::Approx(-std::log(1.0 - (1.0 - 1e-15))));
  CHECK(logloss({1, 0}, {0.5, 0.5}) == doctest::Approx(std::log(2.0)));
  CHECK_THROWS_AS(logloss({1}, {kNaN}), Error);
  CHECK_THROWS_AS(logloss({}, {}), Error);
}

TEST_CASE("history csv lists one row per round") {
  std::vector<std::vector<double>> rows{{0.0}, {1.0}, {2.0}, {3.0}};
  std::vector<int> labels{0, 1, 0, 1};
  TrainParams p = loose_params();
  p.n_estimators = 3;
  Model model = train(rows, labels, {"x"}, p, &rows, &labels);

  std::string csv = history_csv(model, "run deadbeef");
  CHECK(csv.find("# run deadbeef") != std::string::npos);
  CHECK(csv.find("round,train_logloss,eval_logloss") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // comment + header + 3
  CHECK(csv.find("\n1,") != std::string::npos);
  CHECK(csv.find("\n3,") != std::string::npos);
}

TEST_CASE("schema hash is order-sensitive and stable") {
  std::string a = schema_hash({"open", "close"});
  std::string b = schema_hash({"close", "open"});
  CHECK(a.size() == 16);
  CHECK(a != b);
  CHECK(a == schema_hash({"open", "close"}));
  // Concatenation must not collide with a shifted boundary.
  CHECK(schema_hash({"ab", "c"}) != schema_hash({"a", "bc"}));
}
