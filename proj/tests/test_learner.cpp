#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dynsel/corpus.hpp"
#include "dynsel/learner.hpp"
#include "dynsel/rng.hpp"

using namespace dynsel;

namespace {

InstructionRecord payload_record(int id, std::vector<double> x, int y) {
  InstructionRecord r;
  r.id = id;
  r.payload_features = std::move(x);
  r.payload_label = y;
  return r;
}

ValidationSet tiny_val() {
  ValidationSet val;
  val.features = {{1.0, 0.0}, {0.0, 2.0}};
  val.labels = {0, 1};
  return val;
}

}  // namespace

TEST_CASE("the initial learner predicts uniformly: P0 = -ln L") {
  const ValidationSet val = tiny_val();
  CHECK(performance(learner_init(1, 2, 2), val) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(performance(learner_init(1, 2, 2), val) == doctest::Approx(-0.6931471805599453));

  ValidationSet val4 = val;
  val4.labels = {0, 3};
  CHECK(performance(learner_init(9, 2, 4), val4) ==
        doctest::Approx(-std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("learner_init validates shapes and is seed-stable") {
  CHECK_THROWS(learner_init(1, 0, 2));
  CHECK_THROWS(learner_init(1, 3, 1));
  const auto a = learner_init(5, 3, 2);
  const auto b = learner_init(5, 3, 2);
  CHECK(a.W == b.W);
  CHECK(a.b == b.b);
}

TEST_CASE("mean_cross_entropy matches hand arithmetic on two examples") {
  LearnerState s = learner_init(0, 2, 2);
  s.W = {1.0, 0.0,   // class-0 row
         0.0, 1.0};  // class-1 row
  const ValidationSet val = tiny_val();
  // Example 1: logits (1,0), label 0 -> ln(1+e^-1); example 2: logits (0,2),
  // label 1 -> ln(1+e^-2).
  const double expected = 0.5 * (std::log1p(std::exp(-1.0)) + std::log1p(std::exp(-2.0)));
  CHECK(mean_cross_entropy(s, val.features, val.labels) ==
        doctest::Approx(expected).epsilon(1e-14));
  CHECK(performance(s, val) == doctest::Approx(-expected).epsilon(1e-14));
}

TEST_CASE("near-perfect predictions push performance toward zero") {
  LearnerState s = learner_init(0, 2, 2);
  s.W = {50.0, 0.0, 0.0, 50.0};
  CHECK(performance(s, tiny_val()) > -1e-8);
  CHECK(performance(s, tiny_val()) <= 0.0);
}

TEST_CASE("a single-example step strictly decreases that example's loss") {
  const auto rec = payload_record(0, {0.5, -1.0}, 1);
  const std::vector<std::vector<double>> fx = {rec.payload_features};
  const std::vector<int> fy = {rec.payload_label};
  LearnerState s = learner_init(3, 2, 2);
  const double before = mean_cross_entropy(s, fx, fy);
  s = learner_update(std::move(s), {&rec}, 0.05);
  CHECK(mean_cross_entropy(s, fx, fy) < before);
  CHECK(s.step == 1);
}

TEST_CASE("learner_update rejects an empty batch and bad payload shapes") {
  LearnerState s = learner_init(1, 2, 2);
  CHECK_THROWS(learner_update(s, {}, 0.1));
  const auto bad = payload_record(0, {1.0, 2.0, 3.0}, 0);
  CHECK_THROWS(learner_update(s, {&bad}, 0.1));
  const auto bad_label = payload_record(0, {1.0, 2.0}, 5);
  CHECK_THROWS(learner_update(s, {&bad_label}, 0.1));
}

TEST_CASE("update gradient matches central finite differences") {
  Rng rng(17);
  LearnerState s = learner_init(2, 3, 4);
  for (auto& w : s.W) w = rng.uniform(-0.5, 0.5);
  for (auto& b : s.b) b = rng.uniform(-0.2, 0.2);

  std::vector<InstructionRecord> recs;
  std::vector<std::vector<double>> fx;
  std::vector<int> fy;
  for (int i = 0; i < 5; ++i) {
    std::vector<double> x = {rng.normal(), rng.normal(), rng.normal()};
    const int y = static_cast<int>(rng.uniform_int(4));
    recs.push_back(payload_record(i, x, y));
    fx.push_back(x);
    fy.push_back(y);
  }
  std::vector<const InstructionRecord*> batch;
  for (const auto& r : recs) batch.push_back(&r);

  const double lr = 1.0;  // so W_old - W_new equals the gradient itself
  const LearnerState stepped = learner_update(s, batch, lr);

  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t i = 0; i < s.W.size(); ++i) {
    LearnerState up = s, down = s;
    up.W[i] += h;
    down.W[i] -= h;
    const double fd =
        (mean_cross_entropy(up, fx, fy) - mean_cross_entropy(down, fx, fy)) / (2 * h);
    const double analytic = (s.W[i] - stepped.W[i]) / lr;
    worst = std::max(worst, std::fabs(fd - analytic) /
                                std::max(1.0, std::fabs(fd) + std::fabs(analytic)));
  }
  for (std::size_t i = 0; i < s.b.size(); ++i) {
    LearnerState up = s, down = s;
    up.b[i] += h;
    down.b[i] -= h;
    const double fd =
        (mean_cross_entropy(up, fx, fy) - mean_cross_entropy(down, fx, fy)) / (2 * h);
    const double analytic = (s.b[i] - stepped.b[i]) / lr;
    worst = std::max(worst, std::fabs(fd - analytic) /
                                std::max(1.0, std::fabs(fd) + std::fabs(analytic)));
  }
  CHECK(worst <= 1e-4);
}

TEST_CASE("the batch gradient is permutation-invariant") {
  Rng rng(23);
  std::vector<InstructionRecord> recs;
  for (int i = 0; i < 6; ++i)
    recs.push_back(payload_record(i, {rng.normal(), rng.normal()},
                                  static_cast<int>(rng.uniform_int(3))));
  std::vector<const InstructionRecord*> fwd, rev;
  for (const auto& r : recs) fwd.push_back(&r);
  rev.assign(fwd.rbegin(), fwd.rend());

  const LearnerState a = learner_update(learner_init(1, 2, 3), fwd, 0.3);
  const LearnerState b = learner_update(learner_init(1, 2, 3), rev, 0.3);
  CHECK(a.W == b.W);
  CHECK(a.b == b.b);
}

TEST_CASE("performance is invariant to validation ordering") {
  Rng rng(29);
  LearnerState s = learner_init(2, 3, 3);
  for (auto& w : s.W) w = rng.normal();
  ValidationSet val;
  for (int i = 0; i < 9; ++i) {
    val.features.push_back({rng.normal(), rng.normal(), rng.normal()});
    val.labels.push_back(static_cast<int>(rng.uniform_int(3)));
  }
  ValidationSet rev;
  rev.features.assign(val.features.rbegin(), val.features.rend());
  rev.labels.assign(val.labels.rbegin(), val.labels.rend());
  CHECK(performance(s, val) == doctest::Approx(performance(s, rev)).epsilon(1e-15));
}

TEST_CASE("training on aligned samples beats training on distractors") {
  const Corpus full = generate_synthetic(11, 300, 0.2, 16, 8, 4);
  const auto [train, val] = split_validation(full, 7, 40);

  std::vector<const InstructionRecord*> aligned, junk;
  for (const auto& r : train.records)
    (*r.utility_tag ? aligned : junk).push_back(&r);
  REQUIRE(aligned.size() >= 10);
  REQUIRE(junk.size() >= 10);

  LearnerState on_aligned = learner_init(1, 8, 4);
  LearnerState on_junk = learner_init(1, 8, 4);
  for (int step = 0; step < 15; ++step) {
    on_aligned = learner_update(std::move(on_aligned), aligned, 0.3);
    on_junk = learner_update(std::move(on_junk), junk, 0.3);
  }
  CHECK(performance(on_aligned, val) > performance(on_junk, val));
}
