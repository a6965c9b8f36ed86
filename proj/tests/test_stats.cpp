#include <cmath>
#include <span>

#include <catch2/catch_amalgamated.hpp>

#include "ctsnet/stats.hpp"
#include "ctsnet/trajectory.hpp"
#include "support/test_oracles.hpp"

using namespace ctsnet;

namespace {

// context-free bookkeeping: every variable has an empty parent set
const ContextFn no_context = [](int, std::span<const int>) {
  return ContextKey{};
};
const ValueIndexFn identity_index = [](int, int v) { return v; };

Trajectory binary_example() {
  // one binary variable over [0, 10], flips 0->1 at t=2 and 1->0 at t=5
  TrajectoryBuilder b({VariableId::link(0, 1)}, {0}, 10.0);
  b.add(2.0, 0, 1);
  b.add(5.0, 0, 0);
  return b.take();
}

}  // namespace

TEST_CASE("sufficient statistics of a single binary path") {
  const auto stats =
      collect_sufficient_stats(binary_example(), no_context, {2}, identity_index);
  const auto& cell = stats.by_var[0].at(ContextKey{});
  CHECK(cell.dwell[0] == Catch::Approx(7.0));
  CHECK(cell.dwell[1] == Catch::Approx(3.0));
  CHECK(cell.jump(0, 1) == 1.0);
  CHECK(cell.jump(1, 0) == 1.0);
  CHECK(cell.leave_count(0) == 1.0);
  CHECK(stats.total_dwell(0) == Catch::Approx(10.0));
}

TEST_CASE("no transitions leaves all mass on the initial state") {
  TrajectoryBuilder b({VariableId::link(0, 1)}, {1}, 4.0);
  const auto stats =
      collect_sufficient_stats(b.take(), no_context, {2}, identity_index);
  const auto& cell = stats.by_var[0].at(ContextKey{});
  CHECK(cell.dwell[1] == Catch::Approx(4.0));
  CHECK(cell.dwell[0] == 0.0);
  CHECK(cell.leave_count(0) + cell.leave_count(1) == 0.0);
}

TEST_CASE("log likelihood of the binary example") {
  const auto stats =
      collect_sufficient_stats(binary_example(), no_context, {2}, identity_index);
  const auto ll = log_likelihood(
      stats, [](int, const ContextKey&, int) { return 0.5; },
      [](int, const ContextKey&, int, int) { return 1.0; });
  CHECK_FALSE(ll.impossible);
  // 2 ln 0.5 - 0.5 * 10
  CHECK(ll.value == Catch::Approx(2.0 * std::log(0.5) - 5.0).epsilon(1e-12));
  CHECK(ll.value == Catch::Approx(-6.3863).margin(5e-5));
}

TEST_CASE("empty transition set gives pure survival") {
  TrajectoryBuilder b({VariableId::link(0, 1)}, {0}, 8.0);
  const auto stats =
      collect_sufficient_stats(b.take(), no_context, {2}, identity_index);
  const auto ll = log_likelihood(
      stats, [](int, const ContextKey&, int) { return 1.7; },
      [](int, const ContextKey&, int, int) { return 1.0; });
  CHECK(ll.value == Catch::Approx(-1.7 * 8.0).epsilon(1e-12));
}

TEST_CASE("log likelihood factorizes over variables") {
  TrajectoryBuilder b({VariableId::link(0, 1), VariableId::link(1, 0)}, {0, 0},
                      6.0);
  b.add(1.0, 0, 1);
  b.add(2.5, 1, 1);
  b.add(4.0, 0, 0);
  const auto traj = b.take();

  const RateFn rate = [](int v, const ContextKey&, int x) {
    return v == 0 ? (x == 0 ? 0.4 : 0.9) : 0.3;
  };
  const ThetaFn theta = [](int, const ContextKey&, int, int) { return 1.0; };
  const auto both = collect_sufficient_stats(traj, no_context, {2, 2},
                                             identity_index);
  const auto whole = log_likelihood(both, rate, theta);

  double parts = 0;
  for (int keep = 0; keep < 2; ++keep) {
    TrajectoryBuilder sb({traj.variables[keep]}, {traj.initial[keep]}, 6.0);
    for (const int k : traj.per_var[keep])
      sb.add(traj.transitions[k].time, 0, traj.transitions[k].to);
    const auto stats =
        collect_sufficient_stats(sb.take(), no_context, {2}, identity_index);
    parts += log_likelihood(
                 stats,
                 [&](int, const ContextKey& c, int x) { return rate(keep, c, x); },
                 theta)
                 .value;
  }
  CHECK(whole.value == Catch::Approx(parts).epsilon(1e-12));
}

TEST_CASE("transition against a zero-probability move flags impossibility") {
  const auto stats =
      collect_sufficient_stats(binary_example(), no_context, {2}, identity_index);
  const auto ll = log_likelihood(
      stats, [](int, const ContextKey&, int) { return 0.5; },
      [](int, const ContextKey&, int from, int) { return from == 0 ? 0.0 : 1.0; });
  CHECK(ll.impossible);
  CHECK(std::isinf(ll.value));
}

TEST_CASE("context split by a parent flip matches a fine-grid tally") {
  // variable 1's context is variable 0's value; variable 0 flips mid-path
  TrajectoryBuilder b({VariableId::link(0, 1), VariableId::link(1, 0)}, {0, 0},
                      3.0);
  b.add(0.8, 1, 1);
  b.add(1.3, 0, 1);   // parent flip splits variable 1's dwell
  b.add(2.1, 1, 0);
  const auto traj = b.take();

  const ContextFn parent_ctx = [](int v, std::span<const int> values) {
    return v == 1 ? ContextKey{values[0]} : ContextKey{};
  };
  const auto stats =
      collect_sufficient_stats(traj, parent_ctx, {2, 2}, identity_index);

  CHECK(stats.by_var[1].at(ContextKey{0}).dwell[1] == Catch::Approx(0.5));
  CHECK(stats.by_var[1].at(ContextKey{1}).dwell[1] == Catch::Approx(0.8));
  CHECK(stats.by_var[1].at(ContextKey{0}).jump(0, 1) == 1.0);
  CHECK(stats.by_var[1].at(ContextKey{1}).jump(1, 0) == 1.0);

  const auto tally = test_oracles::grid_dwell_tally(traj, parent_ctx, 1e-4);
  for (const auto& [key, cell] : stats.by_var[1]) {
    for (int x = 0; x < 2; ++x) {
      if (cell.dwell[x] == 0) continue;
      const auto it = tally.find({1, x, key});
      REQUIRE(it != tally.end());
      CHECK(it->second == Catch::Approx(cell.dwell[x]).margin(5e-4));
    }
  }
}
