#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "stgf/core/rng.hpp"
#include "stgf/core/spd.hpp"
#include "stgf/sim/scenario.hpp"
#include "stgf/stgnn/network.hpp"
#include "stgf/stgnn/tape.hpp"
#include "stgf/stgnn/train.hpp"
#include "test_util.hpp"

using namespace stgf;
using namespace stgf::stgnn;

namespace {

Mat3 local_spd(Rng& rng) {
  Mat3 a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = rng.uniform(-1.0, 1.0);
  }
  return symmetrized(a * a.transpose() + 0.2 * Mat3::Identity());
}

}  // namespace

TEST_CASE("lstm_encode_step with zero parameters stays at zero") {
  const ModelParams p = ModelParams::zeros();
  LstmState s = LstmState::zero(1);
  s = lstm_encode_step(s, Vec3(4.0, -2.0, 1.0), p.encoder);
  CHECK(s.h.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("lstm_encode_step outputs stay inside the tanh envelope") {
  const ModelParams p = ModelParams::seeded(5);
  Rng rng(6);
  LstmState s = LstmState::zero(1);
  for (int k = 0; k < 50; ++k) {
    s = lstm_encode_step(s, Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10)),
                         p.encoder);
    CHECK(s.h.lpNorm<Eigen::Infinity>() < 1.0);
    CHECK(s.h.lpNorm<Eigen::Infinity>() > 0.0);
  }
}

TEST_CASE("lstm_encode_step converges to a fixed point on constant input") {
  const ModelParams p = ModelParams::seeded(7);
  LstmState s = LstmState::zero(1);
  double prev_delta = -1.0;
  Tensor prev_h = s.h;
  for (int k = 0; k < 60; ++k) {
    s = lstm_encode_step(s, Vec3::Zero(), p.encoder);
    const double delta = (s.h - prev_h).lpNorm<Eigen::Infinity>();
    if (k >= 10) CHECK(delta <= prev_delta + 1e-15);
    prev_delta = delta;
    prev_h = s.h;
  }
  CHECK(prev_delta < 1e-8);
}

TEST_CASE("attention_scores degenerate and symmetric cases") {
  const ModelParams p = ModelParams::seeded(8);

  const Tensor one = Tensor::Random(1, kHiddenDim);
  const auto nbrs1 = neighborhoods(1, {});
  const Eigen::MatrixXd alpha1 = attention_scores(one, nbrs1, p.gat1);
  CHECK(alpha1(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  Tensor twin(2, kHiddenDim);
  twin.row(0) = one.row(0);
  twin.row(1) = one.row(0);
  const auto nbrs2 = neighborhoods(2, complete_edges(2));
  const Eigen::MatrixXd alpha2 = attention_scores(twin, nbrs2, p.gat1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(alpha2(i, j) == doctest::Approx(0.5).epsilon(1e-12));
  }

  const ModelParams zero = ModelParams::zeros();
  const Tensor trio = Tensor::Random(3, kHiddenDim);
  const auto nbrs3 = neighborhoods(3, complete_edges(3));
  const Eigen::MatrixXd alpha3 = attention_scores(trio, nbrs3, zero.gat1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(alpha3(i, j) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("attention rows are a probability distribution") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const int m = rng.uniform_int(1, 7);
    const ModelParams p = ModelParams::seeded(rng.next_u64());
    const Tensor emb = Tensor::Random(m, kHiddenDim) * 2.0;
    const auto nbrs = neighborhoods(m, complete_edges(m));
    const Eigen::MatrixXd alpha = attention_scores(emb, nbrs, p.gat1);
    for (int i = 0; i < m; ++i) {
      CHECK(alpha.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
      for (int j = 0; j < m; ++j) CHECK(alpha(i, j) >= 0.0);
    }
  }
}

TEST_CASE("gat_layer zero weights and isolated node") {
  const Tensor emb = Tensor::Random(3, kHiddenDim);
  const auto nbrs = neighborhoods(3, complete_edges(3));
  const ModelParams zero = ModelParams::zeros();
  CHECK(gat_layer(emb, nbrs, zero.gat1).lpNorm<Eigen::Infinity>() == 0.0);

  const ModelParams p = ModelParams::seeded(10);
  const Tensor lone = Tensor::Random(1, kHiddenDim);
  const Tensor out = gat_layer(lone, neighborhoods(1, {}), p.gat1);
  const Tensor expected = (lone * p.gat1.w).cwiseMax(0.0);
  CHECK((out - expected).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("gat_layer is permutation equivariant") {
  Rng rng(11);
  const ModelParams p = ModelParams::seeded(12);
  const int m = 5;
  const Tensor emb = Tensor::Random(m, kHiddenDim);
  const auto nbrs = neighborhoods(m, complete_edges(m));
  const Tensor base = gat_layer(emb, nbrs, p.gat1);

  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);

  Tensor permuted(m, kHiddenDim);
  for (int i = 0; i < m; ++i) permuted.row(i) = emb.row(perm[i]);
  const Tensor out = gat_layer(permuted, nbrs, p.gat1);
  for (int i = 0; i < m; ++i) {
    CHECK((out.row(i) - base.row(perm[i])).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}

TEST_CASE("forward with zero parameters returns the last observed positions") {
  const auto inst = test_util::make_mini_instance(3, 5, 13);
  const auto out = forward(inst.histories, ModelParams::zeros());
  REQUIRE(out.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK((out[i] - inst.histories[i].back().mean).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("forward handles a single object and rejects bad histories") {
  const auto inst = test_util::make_mini_instance(1, 4, 14);
  const ModelParams p = ModelParams::seeded(15);
  CHECK_NOTHROW(forward(inst.histories, p));

  auto short_hist = inst.histories;
  short_hist[0].points.resize(1);
  CHECK_THROWS_AS(forward(short_hist, p), HistoryTooShortError);

  auto ragged = test_util::make_mini_instance(2, 4, 16).histories;
  ragged[1].points.pop_back();
  CHECK_THROWS_AS(forward(ragged, p), RaggedHistoriesError);

  auto shifted = test_util::make_mini_instance(2, 4, 17).histories;
  for (auto& pt : shifted[1].points) pt.first += 1;
  CHECK_THROWS_AS(forward(shifted, p), RaggedHistoriesError);

  CHECK_THROWS_AS(forward({}, p), RaggedHistoriesError);
}

TEST_CASE("forward is permutation equivariant") {
  const auto inst = test_util::make_mini_instance(5, 6, 18);
  const ModelParams p = ModelParams::seeded(19);
  const auto base = forward(inst.histories, p);

  const std::vector<int> perm = {3, 0, 4, 1, 2};
  std::vector<TrajectoryHistory> shuffled;
  for (int i : perm) shuffled.push_back(inst.histories[i]);
  const auto out = forward(shuffled, p);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    CHECK((out[i] - base[perm[i]]).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("forward is translation covariant") {
  const auto inst = test_util::make_mini_instance(3, 6, 20);
  const ModelParams p = ModelParams::seeded(21);
  const auto base = forward(inst.histories, p);

  const Vec3 offset(12.5, -7.0, 3.25);
  auto moved = inst.histories;
  for (auto& h : moved) {
    for (auto& pt : h.points) pt.second.mean += offset;
  }
  const auto out = forward(moved, p);
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK((out[i] - (base[i] + offset)).lpNorm<Eigen::Infinity>() < 1e-9);
  }
}

TEST_CASE("propagate_uncertainty adds the process noise") {
  const Mat3 p0 = 10000.0 * Mat3::Identity();
  const Mat3 out = propagate_uncertainty(p0, ProcessNoise::isotropic(2000.0));
  CHECK((out - 12000.0 * Mat3::Identity()).lpNorm<Eigen::Infinity>() == 0.0);

  const Mat3 same = propagate_uncertainty(p0, ProcessNoise{});
  CHECK((same - p0).lpNorm<Eigen::Infinity>() == 0.0);

  Rng rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 a = local_spd(rng);
    const Mat3 b = local_spd(rng);
    CHECK(is_spd(propagate_uncertainty(a, ProcessNoise{b})));
  }
}

TEST_CASE("loss basics") {
  const std::vector<Vec3> truth = {Vec3(1, 2, 3), Vec3(-1, 0, 2)};
  CHECK(loss(truth, truth) == 0.0);
  CHECK(loss({Vec3(3, 4, 0)}, {Vec3(0, 0, 0)}) == doctest::Approx(25.0));
  CHECK(loss({Vec3(3, 4, 0), Vec3(1, 1, 1)}, {Vec3(0, 0, 0), Vec3(1, 1, 1)}) ==
        doctest::Approx(12.5));
  CHECK_THROWS_AS(loss({Vec3::Zero()}, truth), CountMismatchError);
}

TEST_CASE("backward is exactly zero at zero loss") {
  auto inst = test_util::make_mini_instance(2, 4, 23);
  const ModelParams zero = ModelParams::zeros();
  // Zero parameters predict the last observed position; make that the truth.
  for (std::size_t i = 0; i < inst.histories.size(); ++i) {
    inst.truth[i] = inst.histories[i].back().mean;
  }
  const ModelParams grads = backward(inst.histories, inst.truth, zero);
  for_each_tensor(grads, [](const char*, const Tensor& t) {
    CHECK(t.lpNorm<Eigen::Infinity>() == 0.0);
  });
}

TEST_CASE("tape leaves an unused parameter with an exactly zero gradient") {
  Tape tape;
  const Tape::Var used = tape.param(Tensor::Ones(2, 2));
  const Tape::Var unused = tape.param(Tensor::Ones(3, 3));
  const Tape::Var out = tape.relu(used);
  tape.backward(out, Tensor::Ones(2, 2));
  CHECK(tape.grad(unused).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(tape.grad(unused).rows() == 3);
  CHECK(tape.grad(used).lpNorm<Eigen::Infinity>() == 1.0);
}

TEST_CASE("backward matches central finite differences on every tensor") {
  const auto inst = test_util::make_mini_instance(2, 4, 24);
  const ModelParams params = ModelParams::seeded(25);
  const auto results = test_util::gradient_check(inst, params);
  REQUIRE(results.size() == 13);
  for (const auto& r : results) {
    INFO(r.tensor);
    CHECK(r.max_rel_error < 1e-4);
  }
}

TEST_CASE("train determinism and epoch-zero behavior") {
  sim::ScenarioConfig cfg = sim::ScenarioConfig::mpl_defaults();
  cfg.n_objects = 2;
  cfg.n_views = 2;
  cfg.n_frames = 6;
  cfg.noise_sigma_per_view.assign(2, 0.1);
  cfg.interaction_strength = 0.0;
  cfg.seed = 77;
  const auto data = sim::generate(cfg, 8);

  TrainConfig tc;
  tc.epochs = 0;
  tc.seed = 99;
  const auto init = train(data, tc);
  CHECK(same_values(init.params, ModelParams::seeded(99)));
  CHECK(init.epoch_loss.empty());

  tc.epochs = 3;
  const auto a = train(data, tc);
  const auto b = train(data, tc);
  CHECK(same_values(a.params, b.params));
  CHECK(a.epoch_loss == b.epoch_loss);
  CHECK(a.epoch_loss.size() == 3);

  CHECK_THROWS_AS(train({}, tc), EmptyDatasetError);
}

TEST_CASE("training on linear motion reduces the loss") {
  sim::ScenarioConfig cfg = sim::ScenarioConfig::mpl_defaults();
  cfg.n_objects = 3;
  cfg.n_views = 2;
  cfg.n_frames = 10;
  cfg.noise_sigma_per_view.assign(2, 0.1);
  cfg.interaction_strength = 0.0;
  cfg.seed = 31;
  const auto data = sim::generate(cfg, 30);

  TrainConfig tc;
  tc.epochs = 12;
  tc.learning_rate = 0.05;
  tc.batch_size = 4;
  tc.seed = 5;
  const auto result = train(data, tc);
  REQUIRE(result.epoch_loss.size() == 12);
  CHECK(result.epoch_loss.back() < result.epoch_loss.front());
}
