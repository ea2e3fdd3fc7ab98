#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "stgf/core/rng.hpp"
#include "stgf/core/spd.hpp"
#include "stgf/core/types.hpp"

using namespace stgf;

namespace {

Mat3 random_matrix(Rng& rng, double lo = -1.0, double hi = 1.0) {
  Mat3 a;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a(r, c) = rng.uniform(lo, hi);
  }
  return a;
}

Mat3 random_spd(Rng& rng) {
  const Mat3 a = random_matrix(rng);
  return symmetrized(a * a.transpose() + 0.5 * Mat3::Identity());
}

}  // namespace

TEST_CASE("invert_spd on identity and diagonals") {
  CHECK((invert_spd(Mat3::Identity()) - Mat3::Identity()).lpNorm<Eigen::Infinity>() == 0.0);

  const Mat3 d = Vec3(2.0, 4.0, 8.0).asDiagonal();
  const Mat3 expected = Vec3(0.5, 0.25, 0.125).asDiagonal();
  CHECK((invert_spd(d) - expected).lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("invert_spd multiplies back to identity") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 a = random_spd(rng);
    const Mat3 b = invert_spd(a);
    CHECK((a * b - Mat3::Identity()).lpNorm<Eigen::Infinity>() < 1e-9);
    CHECK((b - b.transpose()).lpNorm<Eigen::Infinity>() == 0.0);  // exactly symmetric
  }
}

TEST_CASE("invert_spd is an involution to 1e-8") {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const Mat3 a = random_spd(rng);
    CHECK((invert_spd(invert_spd(a)) - a).lpNorm<Eigen::Infinity>() < 1e-8);
  }
}

TEST_CASE("invert_spd rejects matrices that are not SPD") {
  Mat3 asym = Mat3::Identity();
  asym(0, 1) = 0.1;  // not mirrored
  CHECK_THROWS_AS(invert_spd(asym), NotSpdError);

  const Mat3 negative = Vec3(1.0, 1.0, -1.0).asDiagonal();
  CHECK_THROWS_AS(invert_spd(negative), NotSpdError);

  const Mat3 below_floor = Vec3(1.0, 1.0, 1e-31).asDiagonal();
  CHECK_THROWS_AS(invert_spd(below_floor), NotSpdError);
}

TEST_CASE("is_spd basic verdicts") {
  CHECK(is_spd(Mat3::Identity()));
  CHECK_FALSE(is_spd(Mat3(Vec3(1.0, 1.0, -1.0).asDiagonal())));

  Mat3 asym = Mat3::Identity();
  asym(2, 0) = 1e-6;
  CHECK_FALSE(is_spd(asym));
  CHECK(is_spd(asym, 1e-3));
}

TEST_CASE("is_spd accepts diagonally dominant symmetrizations") {
  // Gershgorin: after adding the absolute row sums to the diagonal, every
  // disc sits in the right half plane. Eigen's solver double-checks.
  Rng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Mat3 s = symmetrized(random_matrix(rng));
    for (int r = 0; r < 3; ++r) {
      s(r, r) += s.row(r).cwiseAbs().sum() + 0.01;
    }
    CHECK(is_spd(s));
    Eigen::SelfAdjointEigenSolver<Mat3> eig(s, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("complete_edges enumerates all unordered pairs") {
  CHECK(complete_edges(1).empty());

  const auto three = complete_edges(3);
  REQUIRE(three.size() == 3);
  CHECK(three[0] == std::pair<int, int>{0, 1});
  CHECK(three[1] == std::pair<int, int>{0, 2});
  CHECK(three[2] == std::pair<int, int>{1, 2});

  CHECK(complete_edges(5).size() == 10);
}

TEST_CASE("complete_edges is a symmetric relation of the right size") {
  for (int n = 1; n <= 9; ++n) {
    const auto edges = complete_edges(n);
    CHECK(static_cast<int>(edges.size()) == n * (n - 1) / 2);
    // Every unordered pair appears exactly once with i < j.
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : edges) {
      CHECK(a < b);
      CHECK_FALSE(seen[a][b]);
      seen[a][b] = seen[b][a] = true;
    }
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j) CHECK(seen[i][j]);
      }
    }
  }
}
