#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "ctsnet/intensity.hpp"

using namespace ctsnet;

namespace {

IntensityMatrix two_state(double q01, double q10) {
  IntensityMatrix q(2);
  q.at(0, 1) = q01;
  q.at(1, 0) = q10;
  q.set_diagonal_from_rows();
  return q;
}

}  // namespace

TEST_CASE("intensity matrix validation") {
  auto q = two_state(0.4, 1.1);
  CHECK_NOTHROW(q.validate());
  q.at(0, 1) = -0.1;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
  q = two_state(0.4, 1.1);
  q.at(0, 0) = 0;
  CHECK_THROWS_AS(q.validate(), std::invalid_argument);
}

TEST_CASE("kernel at t = 0 is the identity") {
  const auto k = exact_transition_kernel(two_state(0.7, 0.2), 0.0);
  CHECK(k.at(0, 0) == 1.0);
  CHECK(k.at(0, 1) == 0.0);
  CHECK(k.at(1, 1) == 1.0);
}

TEST_CASE("symmetric two-state kernel matches the closed form") {
  // rate q both ways: entry (0,0) = (1 + e^{-2qt}) / 2
  const double q = 0.8;
  for (const double t : {0.1, 0.5, 2.0, 10.0, 200.0}) {
    const auto k = exact_transition_kernel(two_state(q, q), t);
    const double expect = 0.5 * (1.0 + std::exp(-2.0 * q * t));
    CHECK(k.at(0, 0) == Catch::Approx(expect).margin(1e-11));
    CHECK(k.at(1, 1) == Catch::Approx(expect).margin(1e-11));
  }
}

TEST_CASE("kernel rows sum to one") {
  IntensityMatrix q(4);
  q.at(0, 1) = 0.3;
  q.at(0, 3) = 0.9;
  q.at(1, 0) = 1.4;
  q.at(1, 2) = 0.2;
  q.at(2, 3) = 2.5;
  q.at(3, 0) = 0.1;
  q.set_diagonal_from_rows();
  for (const double t : {0.05, 1.0, 7.0, 60.0}) {
    const auto k = exact_transition_kernel(q, t);
    for (int i = 0; i < 4; ++i) {
      double s = 0;
      for (int j = 0; j < 4; ++j) {
        s += k.at(i, j);
        CHECK(k.at(i, j) >= -1e-14);
      }
      CHECK(std::abs(s - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("Chapman-Kolmogorov semigroup property") {
  IntensityMatrix q(3);
  q.at(0, 1) = 0.6;
  q.at(1, 2) = 1.2;
  q.at(2, 0) = 0.4;
  q.at(2, 1) = 0.3;
  q.set_diagonal_from_rows();
  const double t1 = 0.7, t2 = 1.9;
  const auto k1 = exact_transition_kernel(q, t1);
  const auto k2 = exact_transition_kernel(q, t2);
  const auto k12 = exact_transition_kernel(q, t1 + t2);
  const auto prod = multiply(k1, k2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(prod.at(i, j) == Catch::Approx(k12.at(i, j)).margin(1e-8));
}

TEST_CASE("sub-generator exponential loses mass") {
  IntensityMatrix a(2);
  a.at(0, 1) = 0.5;
  a.at(0, 0) = -1.5;  // extra killing rate 1.0 in state 0
  a.at(1, 0) = 0.5;
  a.at(1, 1) = -0.5;
  const auto k = detail::expm_subgenerator(a, 1.0);
  CHECK(k.at(0, 0) + k.at(0, 1) < 1.0);
  CHECK(k.at(1, 0) + k.at(1, 1) <= 1.0 + 1e-12);
  // 1x1 check: exp(-(q + kill) t)
  IntensityMatrix b(1);
  b.at(0, 0) = -2.0;
  const auto kb = detail::expm_subgenerator(b, 3.0);
  CHECK(kb.at(0, 0) == Catch::Approx(std::exp(-6.0)).epsilon(1e-10));
}
