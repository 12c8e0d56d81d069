#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "miml/learners.hpp"
#include "miml/metrics.hpp"
#include "miml/model.hpp"
#include "miml/rng.hpp"
#include "support/test_util.hpp"

using namespace miml;
using testutil::make_d_easy;
using testutil::vec;

namespace {

struct TrainEval {
  double average_precision = 0.0;
  double hamming = 1.0;
};

TrainEval evaluate_on_training_set(const Model& m, const MIMLDataset& d) {
  std::vector<Eigen::VectorXd> scores;
  std::vector<LabelSet> decided, truth;
  for (const Case& c : d.cases) {
    Prediction p = predict(m, c.bag);
    scores.push_back(std::move(p.scores));
    decided.push_back(std::move(p.decided));
    truth.push_back(c.labels);
  }
  return {average_precision(scores, truth), hamming_loss(decided, truth, d.num_labels())};
}

// Single-label clusters: `per_label` bags per label, two instances each.
MIMLDataset clustered_dataset(int num_labels, int per_label, std::uint64_t seed) {
  MIMLDataset d;
  d.manifest.dim = 2;
  for (int l = 0; l < num_labels; ++l)
    d.manifest.label_names.push_back("c" + std::to_string(l));
  Rng rng(seed);
  int id = 0;
  for (int l = 0; l < num_labels; ++l) {
    for (int i = 0; i < per_label; ++i) {
      Eigen::MatrixXd inst(2, 2);
      const double angle = 2.0 * 3.14159265358979 * l / num_labels;
      const double cx = 8.0 * std::cos(angle);
      const double cy = 8.0 * std::sin(angle);
      inst << cx + 0.3 * rng.normal(), cy + 0.3 * rng.normal(),
          cx + 0.3 * rng.normal(), cy + 0.3 * rng.normal();
      Case c;
      c.case_id = "case-" + std::to_string(id++);
      c.expert_id = "synthetic";
      c.bag = Bag{inst};
      c.labels = LabelSet({l});
      d.cases.push_back(std::move(c));
    }
  }
  return d;
}

}  // namespace

TEST_CASE("D_easy labels are exactly recoverable by the nearest-center oracle") {
  const MIMLDataset d = make_d_easy();
  REQUIRE(d.num_cases() == 12);
  REQUIRE(validate_dataset(d).empty());
  CHECK(testutil::verify_d_easy_oracle(d));
}

TEST_CASE("decide_labels thresholds at zero with argmax fallback") {
  CHECK(decide_labels(vec({0.5, -0.1, 0.2})) == LabelSet({0, 2}));
  // all negative: top label wins
  CHECK(decide_labels(vec({-3.0, -2.0, -0.5, -1.0})) == LabelSet({2}));
  // all-negative tie at indices 1 and 3: lowest index wins
  CHECK(decide_labels(vec({-2.0, -1.0, -2.0, -1.0})) == LabelSet({1}));
  // never empty
  CHECK_FALSE(decide_labels(vec({0.0, 0.0})).empty());
}

TEST_CASE("MIML-kNN recovers D_easy and validates preconditions") {
  const MIMLDataset d = make_d_easy();
  MimlKnnParams p;
  p.r = 3;
  p.c = 3;
  const auto model = train_miml_knn(d, p, BagDistance::kAvgHausdorff, 1);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));

  // r must stay below the case count
  MimlKnnParams too_big;
  too_big.r = 10;
  too_big.c = 3;
  const MIMLDataset five = clustered_dataset(1, 5, 3);
  CHECK_THROWS_AS(train_miml_knn(five, too_big, BagDistance::kAvgHausdorff, 1),
                  std::invalid_argument);
}

TEST_CASE("MIML-kNN on an all-one-label dataset always decides that label") {
  MIMLDataset d = clustered_dataset(1, 8, 5);  // L = 1, every case labelled {0}
  MimlKnnParams p;
  p.r = 3;
  p.c = 3;
  const auto model = train_miml_knn(d, p, BagDistance::kAvgHausdorff, 2);
  for (const Case& c : d.cases) {
    const Prediction pred = predict(*model, c.bag);
    CHECK(pred.decided == LabelSet({0}));
  }
}

TEST_CASE("MIMLRBF hidden layer sizing follows round(alpha * n_l)") {
  // 5 labels x 40 positive bags: alpha=0.1 gives 4 medoids per label,
  // 20 hidden units in total.
  const MIMLDataset d = clustered_dataset(5, 40, 7);
  MimlRbfParams p;  // alpha = 0.1, mu = 0.6
  const auto model = train_miml_rbf(d, p, BagDistance::kAvgHausdorff, 3);
  CHECK(model->num_hidden_units() == 20);
  CHECK(model->sigma() > 0.0);

  // alpha small enough that round(alpha * n_l) = 0 clamps to one medoid
  MimlRbfParams tiny;
  tiny.alpha = 0.001;
  const auto clamped = train_miml_rbf(d, tiny, BagDistance::kAvgHausdorff, 3);
  CHECK(clamped->num_hidden_units() == 5);
}

TEST_CASE("MIMLRBF recovers D_easy with the reported defaults") {
  const MIMLDataset d = make_d_easy();
  const auto model = train_miml_rbf(d, MimlRbfParams{}, BagDistance::kAvgHausdorff, 11);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));
}

TEST_CASE("MIMLRBF flags labels without positives") {
  MIMLDataset d = clustered_dataset(2, 6, 9);
  d.manifest.label_names.push_back("never");  // label 2 has no positive case
  const auto model = train_miml_rbf(d, MimlRbfParams{}, BagDistance::kAvgHausdorff, 1);
  CHECK(model->flagged_labels() == std::vector<int>({2}));
  const Prediction pred = predict(*model, d.cases.front().bag);
  CHECK(pred.scores(2) == doctest::Approx(-1.0));
}

TEST_CASE("MIMLSVM embedding dimension follows round(ratio * n)") {
  const MIMLDataset d = clustered_dataset(3, 58, 13);  // 174 cases
  REQUIRE(d.num_cases() == 174);
  // trim one to the comparison protocol's 173 training cases
  MIMLDataset d173 = d;
  d173.cases.pop_back();
  MimlSvmParams p;  // ratio = 0.2
  const auto model = train_miml_svm(d173, p, BagDistance::kAvgHausdorff, 17);
  CHECK(model->embedding_dim() == 35);

  // ratio small enough for a single medoid still trains
  MimlSvmParams one;
  one.ratio = 0.001;
  const MIMLDataset small = clustered_dataset(2, 6, 15);
  const auto tiny = train_miml_svm(small, one, BagDistance::kAvgHausdorff, 17);
  CHECK(tiny->embedding_dim() == 1);
  CHECK(predict(*tiny, small.cases.front().bag).scores.size() == 2);
}

TEST_CASE("MIMLSVM recovers D_easy at ratio 0.5") {
  const MIMLDataset d = make_d_easy();
  MimlSvmParams p;
  p.ratio = 0.5;
  const auto model = train_miml_svm(d, p, BagDistance::kAvgHausdorff, 19);
  CHECK(model->embedding_dim() == 6);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));
}

TEST_CASE("MIMLBOOST expansion yields L tagged pairs per case") {
  MIMLDataset d;
  d.manifest.dim = 2;
  d.manifest.label_names = {"a", "b", "c", "d"};
  Case c;
  c.case_id = "only";
  c.bag = Bag{Eigen::MatrixXd::Zero(2, 2)};
  c.labels = LabelSet({1, 3});
  d.cases.push_back(c);

  const auto pairs = expand_to_misl(d);
  REQUIRE(pairs.size() == 4);
  for (int y = 0; y < 4; ++y) {
    CHECK(pairs[static_cast<std::size_t>(y)].case_index == 0);
    CHECK(pairs[static_cast<std::size_t>(y)].label == y);
    CHECK(pairs[static_cast<std::size_t>(y)].sign == (c.labels.contains(y) ? 1.0 : -1.0));
  }
}

TEST_CASE("MIMLBOOST recovers D_easy in five rounds") {
  const MIMLDataset d = make_d_easy();
  MimlBoostParams p;
  p.rounds = 5;
  const auto model = train_miml_boost(d, p, 23);
  CHECK_FALSE(model->degenerate());
  CHECK(model->num_rounds() <= 5);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));
}

TEST_CASE("MIMLBOOST ensemble stays within the round budget with finite coefficients") {
  const MIMLDataset d = make_d_easy();
  MimlBoostParams p;  // rounds = 25
  const auto model = train_miml_boost(d, p, 29);
  CHECK(model->num_rounds() <= 25);
  CHECK(model->num_rounds() >= 1);
  for (const BoostRound& r : model->rounds()) {
    CHECK(std::isfinite(r.coef));
    CHECK(r.coef > 0.0);
  }
}

TEST_CASE("MIMLBOOST flags a round-one coin flip as degenerate") {
  // identical bags with complementary labels: no scorer beats chance
  MIMLDataset d;
  d.manifest.dim = 2;
  d.manifest.label_names = {"a", "b"};
  for (int i = 0; i < 2; ++i) {
    Case c;
    c.case_id = "dup-" + std::to_string(i);
    c.bag = Bag{Eigen::MatrixXd::Constant(2, 2, 1.0)};
    c.labels = LabelSet({i});
    d.cases.push_back(c);
  }
  MimlBoostParams p;
  p.rounds = 3;
  const auto model = train_miml_boost(d, p, 31);
  CHECK(model->degenerate());
  CHECK(model->num_rounds() == 0);
  const Prediction pred = predict(*model, d.cases.front().bag);
  CHECK(pred.scores.isZero(0.0));
  CHECK_FALSE(pred.decided.empty());
}

TEST_CASE("M3MIML recovers D_easy") {
  const MIMLDataset d = make_d_easy();
  M3MimlParams p;  // cost 1, 2000 iters, step 1e-2
  const auto model = train_m3miml(d, p, 37);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));

  const auto& trace = model->objective_trace();
  REQUIRE(trace.size() >= 2);
  CHECK(trace.back() <= trace.front());
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("M3MIML max-instance score ignores duplicated instances") {
  const MIMLDataset d = make_d_easy();
  const auto model = train_m3miml(d, M3MimlParams{}, 41);
  const Bag& bag = d.cases.front().bag;
  Eigen::MatrixXd dup(bag.size() + 1, bag.dim());
  dup.topRows(bag.size()) = bag.instances();
  dup.row(bag.size()) = bag.instances().row(0);
  CHECK(model->score(bag) == model->score(Bag{dup}));
}

TEST_CASE("M3MIML with zero iterations keeps the zero initialization") {
  const MIMLDataset d = make_d_easy();
  M3MimlParams p;
  p.max_iters = 0;
  const auto model = train_m3miml(d, p, 43);
  CHECK(model->weight().isZero(0.0));
  CHECK(model->bias().isZero(0.0));
  const Prediction pred = predict(*model, d.cases.front().bag);
  CHECK(pred.scores.isZero(0.0));
  CHECK(pred.decided == LabelSet({0}));  // fallback to the top (first) label
}

TEST_CASE("M3MIML flags one-sided labels") {
  MIMLDataset d = clustered_dataset(2, 5, 47);
  d.manifest.label_names.push_back("allpos");
  for (Case& c : d.cases) c.labels.add(2);  // label 2 has no negatives
  d.manifest.label_names.push_back("allneg");  // label 3 has no positives
  const auto model = train_m3miml(d, M3MimlParams{}, 49);
  const Prediction pred = predict(*model, d.cases.front().bag);
  CHECK(pred.scores(2) == doctest::Approx(1.0));
  CHECK(pred.scores(3) == doctest::Approx(-1.0));
}

TEST_CASE("KISAR embeddings ignore duplicated instances and co-occurrence is cosine") {
  const MIMLDataset d = make_d_easy();
  const auto model = train_kisar(d, KisarParams{}, 53);
  const Bag& bag = d.cases.back().bag;
  Eigen::MatrixXd dup(bag.size() + 1, bag.dim());
  dup.topRows(bag.size()) = bag.instances();
  dup.row(bag.size()) = bag.instances().row(bag.size() - 1);
  CHECK(model->embed(bag) == model->embed(Bag{dup}));
  CHECK(model->score(bag) == model->score(Bag{dup}));

  // two labels that always co-occur have correlation exactly 1
  MIMLDataset co = clustered_dataset(2, 4, 59);
  co.manifest.label_names = {"x", "y"};
  for (Case& c : co.cases) c.labels = LabelSet({0, 1});
  const Eigen::MatrixXd corr = label_correlation(co);
  CHECK(corr(0, 1) == doctest::Approx(1.0));
  CHECK(corr(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("KISAR recovers D_easy") {
  const MIMLDataset d = make_d_easy();
  const auto model = train_kisar(d, KisarParams{}, 61);
  const TrainEval ev = evaluate_on_training_set(*model, d);
  CHECK(ev.average_precision == doctest::Approx(1.0));
  CHECK(ev.hamming == doctest::Approx(0.0));

  const auto& trace = model->objective_trace();
  REQUIRE(trace.size() >= 2);
  CHECK(trace.back() <= trace.front());
  for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("trained model scores a pure label-0 bag the right way around") {
  const MIMLDataset d = make_d_easy();
  MimlKnnParams p;
  p.r = 3;
  p.c = 3;
  const auto model = train_miml_knn(d, p, BagDistance::kAvgHausdorff, 67);
  const Prediction pred = predict(*model, d.cases.front().bag);  // pure label-0 bag
  CHECK(pred.scores(0) > 0.0);
  CHECK(pred.scores(1) < 0.0);
  CHECK(pred.decided == LabelSet({0}));
}

TEST_CASE("predict validates bag dimension and rejects empty bags") {
  const MIMLDataset d = make_d_easy();
  const auto model = train_m3miml(d, M3MimlParams{}, 71);
  CHECK_THROWS_AS(predict(*model, Bag{Eigen::MatrixXd::Zero(1, 3)}), std::invalid_argument);
  CHECK_THROWS_AS(predict(*model, Bag{}), std::invalid_argument);
}

TEST_CASE("all six trainers are deterministic and serialize bit-identically") {
  const MIMLDataset d = make_d_easy();
  MimlKnnParams knn;
  knn.r = 3;
  knn.c = 3;
  MimlSvmParams svm;
  svm.ratio = 0.5;
  MimlBoostParams boost;
  boost.rounds = 5;

  const auto train_all = [&](std::uint64_t seed) {
    std::vector<std::string> dumps;
    dumps.push_back(model_to_json(*train_miml_knn(d, knn, BagDistance::kAvgHausdorff, seed)).dump());
    dumps.push_back(
        model_to_json(*train_miml_rbf(d, MimlRbfParams{}, BagDistance::kAvgHausdorff, seed)).dump());
    dumps.push_back(
        model_to_json(*train_miml_svm(d, svm, BagDistance::kAvgHausdorff, seed)).dump());
    dumps.push_back(model_to_json(*train_miml_boost(d, boost, seed)).dump());
    dumps.push_back(model_to_json(*train_m3miml(d, M3MimlParams{}, seed)).dump());
    dumps.push_back(model_to_json(*train_kisar(d, KisarParams{}, seed)).dump());
    return dumps;
  };
  const auto a = train_all(12345);
  const auto b = train_all(12345);
  CHECK(a == b);

  // save -> load -> save round-trips bit-exactly
  for (const std::string& dump : a) {
    const auto loaded = model_from_json(nlohmann::json::parse(dump));
    CHECK(model_to_json(*loaded).dump() == dump);
  }
}

TEST_CASE("scores have length L, stay finite, and never decide the empty set") {
  const MIMLDataset d = make_d_easy();
  MimlKnnParams knn;
  knn.r = 3;
  knn.c = 3;
  MimlSvmParams svm;
  svm.ratio = 0.5;
  MimlBoostParams boost;
  boost.rounds = 5;

  std::vector<std::unique_ptr<Model>> models;
  models.push_back(train_miml_knn(d, knn, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_rbf(d, MimlRbfParams{}, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_svm(d, svm, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_boost(d, boost, 5));
  models.push_back(train_m3miml(d, M3MimlParams{}, 5));
  models.push_back(train_kisar(d, KisarParams{}, 5));

  Rng rng(73);
  for (const auto& m : models) {
    for (int trial = 0; trial < 20; ++trial) {
      const Bag bag = testutil::random_bag(rng, 2);
      const Prediction p = predict(*m, bag);
      CHECK(p.scores.size() == 2);
      CHECK(p.scores.allFinite());
      CHECK_FALSE(p.decided.empty());
    }
  }
}

TEST_CASE("scores are invariant to instance order within a bag") {
  const MIMLDataset d = make_d_easy();
  MimlKnnParams knn;
  knn.r = 3;
  knn.c = 3;
  MimlSvmParams svm;
  svm.ratio = 0.5;
  MimlBoostParams boost;
  boost.rounds = 5;

  std::vector<std::unique_ptr<Model>> models;
  models.push_back(train_miml_knn(d, knn, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_rbf(d, MimlRbfParams{}, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_svm(d, svm, BagDistance::kAvgHausdorff, 5));
  models.push_back(train_miml_boost(d, boost, 5));
  models.push_back(train_m3miml(d, M3MimlParams{}, 5));
  models.push_back(train_kisar(d, KisarParams{}, 5));

  Rng rng(79);
  for (const auto& m : models) {
    for (const Case& c : d.cases) {
      const std::vector<int> perm = Rng(rng.next_u64()).permutation(c.bag.size());
      Eigen::MatrixXd shuffled(c.bag.size(), c.bag.dim());
      for (int i = 0; i < c.bag.size(); ++i)
        shuffled.row(i) = c.bag.instances().row(perm[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd base = m->score(c.bag);
      const Eigen::VectorXd permuted = m->score(Bag{shuffled});
      CHECK((base - permuted).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}
