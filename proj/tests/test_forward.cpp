#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "ctsnet/forward.hpp"
#include "ctsnet/intensity.hpp"
#include "ctsnet/joint.hpp"
#include "ctsnet/model.hpp"
#include "support/model_glue.hpp"
#include "support/test_oracles.hpp"

using namespace ctsnet;

namespace {

ModelSkeleton two_actor_links() {
  ModelSkeleton s;
  s.n_actors = 2;
  s.network_effects = {{EffectKind::Density}, {EffectKind::Reciprocity}};
  return s;
}

ModelSkeleton coevolution_skeleton(int n) {
  ModelSkeleton s;
  s.n_actors = n;
  s.attributes.push_back(
      {"attr", {1, 5}, {{EffectKind::Tendency, 0}, {EffectKind::Similarity, 0}}});
  s.network_effects = {{EffectKind::Density},
                       {EffectKind::Reciprocity},
                       {EffectKind::Similarity, 0}};
  return s;
}

ModelParams coevolution_params() {
  ModelParams p;
  p.net_rate = {0.5};
  p.attr_rate = {0.5};
  p.net_weights = {-1.0, 1.5, 1.0};
  p.attr_weights = {{0.1, 1.0}};
  return p;
}

}  // namespace

TEST_CASE("zero rates give an empty trajectory") {
  auto skel = two_actor_links();
  ModelParams p;
  p.net_rate = {0.0};
  p.net_weights = {0.0, 0.0};
  CoevolutionModel m(skel, p);
  RngStream rng(1);
  const auto sample = forward_sample(m, skel.make_state(), 5.0, rng);
  CHECK(sample.traj.transitions.empty());
  CHECK(sample.log_density == 0.0);
}

TEST_CASE("per-actor transition counts follow the clock rate") {
  ModelSkeleton skel;
  skel.n_actors = 2;
  skel.network_effects = {{EffectKind::Density}};
  ModelParams p;
  p.net_rate = {0.4};
  p.net_weights = {0.0};
  CoevolutionModel m(skel, p);

  RngStream rng(1234);
  const double t_end = 5.0;
  const int reps = 10000;
  double count0 = 0;
  for (int r = 0; r < reps; ++r) {
    auto stream = rng.split(r);
    const auto sample = forward_sample(m, skel.make_state(), t_end, stream);
    count0 += sample.traj.transition_count(0);  // Y:0:1 is actor 0's only move
  }
  const double mean = count0 / reps;
  const double expect = 0.4 * t_end;  // Poisson count of a constant clock
  const double sigma = std::sqrt(expect / reps);
  CHECK(std::abs(mean - expect) < 3.0 * sigma);
}

TEST_CASE("attribute paths never leave the declared range") {
  auto skel = coevolution_skeleton(4);
  CoevolutionModel m(skel, coevolution_params());
  RngStream rng(7);
  for (int r = 0; r < 20; ++r) {
    auto stream = rng.split(r);
    const auto sample = forward_sample(m, skel.make_state(), 20.0, stream);
    const auto layout = skel.layout();
    for (const auto& tr : sample.traj.transitions) {
      const auto id = layout.id_of(tr.var);
      if (id.kind == VarKind::Attribute) {
        CHECK(tr.to >= 1);
        CHECK(tr.to <= 5);
        CHECK(std::abs(tr.to - tr.from) == 1);
      }
    }
  }
}

TEST_CASE("system holding times are exponential with the total rate") {
  auto skel = coevolution_skeleton(3);
  CoevolutionModel m(skel, coevolution_params());
  const double total = m.total_rate();
  REQUIRE(total == Catch::Approx(3.0));

  RngStream rng(99);
  std::vector<double> holds;
  int r = 0;
  while (holds.size() < 10000) {
    auto stream = rng.split(r++);
    const auto sample = forward_sample(m, skel.make_state(), 8.0, stream);
    double prev = 0;
    for (const auto& tr : sample.traj.transitions) {
      holds.push_back(tr.time - prev);
      prev = tr.time;
    }
  }
  holds.resize(10000);
  std::sort(holds.begin(), holds.end());
  double ks = 0;
  for (std::size_t k = 0; k < holds.size(); ++k) {
    const double f = 1.0 - std::exp(-total * holds[k]);
    ks = std::max(ks, std::abs(f - (k + 1.0) / holds.size()));
    ks = std::max(ks, std::abs(f - static_cast<double>(k) / holds.size()));
  }
  CHECK(ks < 1.628 / std::sqrt(10000.0));
}

TEST_CASE("occupancy at t matches the matrix-exponential oracle") {
  auto skel = two_actor_links();
  ModelParams p;
  p.net_rate = {0.9};
  p.net_weights = {-0.5, 1.0};
  CoevolutionModel m(skel, p);

  const auto vars = skel.layout().all_variables();
  const NetworkState start = skel.make_state();
  const JointSpace space(skel, start, vars);
  const auto gen = build_joint_generator(m, space);
  const auto kernel = exact_transition_kernel(gen, 1.0);
  const int row = space.index_of(start);

  RngStream rng(2024);
  std::vector<double> occupancy(space.size(), 0.0);
  const int reps = 100000;
  for (int r = 0; r < reps; ++r) {
    auto stream = rng.split(r);
    const auto sample = forward_sample(m, start, 1.0, stream);
    occupancy[space.index_of(state_at(skel, sample.traj, 1.0))] += 1.0;
  }
  for (int s = 0; s < space.size(); ++s)
    CHECK(occupancy[s] / reps ==
          Catch::Approx(kernel.at(row, s)).margin(0.01));
}

TEST_CASE("generation log density equals both likelihood routes") {
  auto skel = coevolution_skeleton(3);
  CoevolutionModel m(skel, coevolution_params());
  RngStream rng(5);
  NetworkState start = skel.make_state();
  start.set_attr(0, 0, 2);
  start.set_attr(0, 1, 4);
  start.set_attr(0, 2, 3);

  for (int r = 0; r < 100; ++r) {
    auto stream = rng.split(r);
    const auto sample = forward_sample(m, start, 5.0, stream);
    const auto swept = trajectory_log_density(m, sample.traj);
    REQUIRE_FALSE(swept.impossible);
    CHECK(std::abs(swept.value - sample.log_density) < 1e-8);
    const double via_stats = model_glue::stats_route_log_density(m, sample.traj);
    CHECK(std::abs(via_stats - sample.log_density) < 1e-8);
  }
}

TEST_CASE("snapshot reconstruction matches the builder's final state") {
  auto skel = coevolution_skeleton(3);
  CoevolutionModel m(skel, coevolution_params());
  RngStream rng(6);
  const auto sample = forward_sample(m, skel.make_state(), 4.0, rng);
  const auto snap = state_at(skel, sample.traj, 4.0);
  const auto layout = skel.layout();
  for (int k = 0; k < layout.n_variables(); ++k)
    CHECK(snap.value_of(layout.id_of(k)) == sample.traj.final_value(k));
  // initial snapshot reproduces the start state
  const auto snap0 = state_at(skel, sample.traj, 0.0);
  CHECK(snap0 == skel.make_state());
}

TEST_CASE("same seed reproduces the same trajectory") {
  auto skel = coevolution_skeleton(4);
  CoevolutionModel m(skel, coevolution_params());
  RngStream a(77), b(77);
  const auto s1 = forward_sample(m, skel.make_state(), 10.0, a);
  const auto s2 = forward_sample(m, skel.make_state(), 10.0, b);
  REQUIRE(s1.traj.transitions.size() == s2.traj.transitions.size());
  for (std::size_t k = 0; k < s1.traj.transitions.size(); ++k) {
    CHECK(s1.traj.transitions[k].time == s2.traj.transitions[k].time);
    CHECK(s1.traj.transitions[k].var == s2.traj.transitions[k].var);
    CHECK(s1.traj.transitions[k].to == s2.traj.transitions[k].to);
  }
  CHECK(s1.log_density == s2.log_density);
}
