#ifndef CTSNET_FORWARD_HPP
#define CTSNET_FORWARD_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ctsnet/model.hpp"
#include "ctsnet/rng.hpp"
#include "ctsnet/trajectory.hpp"

namespace ctsnet {

inline std::vector<int> state_to_values(const ModelSkeleton& skel,
                                        const NetworkState& s) {
  const auto layout = skel.layout();
  std::vector<int> out(layout.n_variables());
  for (int k = 0; k < layout.n_variables(); ++k)
    out[k] = s.value_of(layout.id_of(k));
  return out;
}

inline NetworkState values_to_state(const ModelSkeleton& skel,
                                    std::span<const int> values) {
  const auto layout = skel.layout();
  NetworkState s = skel.make_state();
  for (int k = 0; k < layout.n_variables(); ++k)
    s.set_value(layout.id_of(k), values[k]);
  return s;
}

// System state at time t reconstructed from a trajectory.
inline NetworkState state_at(const ModelSkeleton& skel, const Trajectory& traj,
                             double t) {
  NetworkState s = skel.make_state();
  const auto layout = skel.layout();
  for (int k = 0; k < layout.n_variables(); ++k)
    s.set_value(layout.id_of(k), traj.value_at(k, t));
  return s;
}

struct ForwardSample {
  Trajectory traj;
  // log density of the realized path under the generating model (Eq.-style
  // factored form, starting distribution omitted), accumulated during
  // generation
  double log_density = 0;
};

// Event-driven simulation of the co-evolution process: per-actor competing
// exponential clocks; on a firing, the move is drawn from the actor's
// choice distribution; cached distributions are refreshed through the
// dependency analysis.
inline ForwardSample forward_sample(const CoevolutionModel& model,
                                    const NetworkState& initial, double t_end,
                                    RngStream& rng) {
  const auto& skel = model.skeleton();
  const auto layout = skel.layout();
  if (initial.n != skel.n_actors ||
      initial.n_attrs != skel.n_attributes())
    throw std::invalid_argument("initial state does not match the model");

  TrajectoryBuilder builder(layout.all_variables(),
                            state_to_values(skel, initial), t_end);
  NetworkState state = initial;
  ChoiceCache cache(model);

  const int n = model.n_actors();
  const int H = model.n_attributes();
  const double total = model.total_rate();
  double log_density = 0;
  double t = 0;

  while (total > 0) {
    const double dt = sample_exponential(total, rng);
    if (t + dt >= t_end || !(dt > 0 && std::isfinite(dt))) break;
    t += dt;
    log_density -= total * dt;

    // pick (actor, decision type) proportional to the clock rates
    double u = rng.uniform() * total;
    int actor = n - 1;
    bool network_move = true;
    for (int i = 0; i < n; ++i) {
      const double rn = model.net_rate(i);
      const double ra = model.attr_rate(i);
      if (u < rn) {
        actor = i;
        network_move = true;
        break;
      }
      u -= rn;
      if (u < ra) {
        actor = i;
        network_move = false;
        break;
      }
      u -= ra;
    }

    if (network_move) {
      const auto& alt = cache.net(actor, state);
      double v = rng.uniform();
      int pick = static_cast<int>(alt.targets.size()) - 1;
      for (std::size_t a = 0; a < alt.targets.size(); ++a) {
        if (v < alt.probs[a]) {
          pick = static_cast<int>(a);
          break;
        }
        v -= alt.probs[a];
      }
      const int j = alt.targets[pick];
      const VariableId var = VariableId::link(actor, j);
      const int old = state.link(actor, j) ? 1 : 0;
      log_density += std::log(model.net_rate(actor) * alt.probs[pick]);
      state.toggle_link(actor, j);
      builder.add(t, layout.index_of(var), 1 - old);
      cache.notify_flip(var, state);
    } else {
      const int h = H == 1 ? 0 : rng.uniform_int(H);
      const auto& alt = cache.attr(actor, h, state);
      double v = rng.uniform();
      int pick = static_cast<int>(alt.deltas.size()) - 1;
      for (std::size_t a = 0; a < alt.deltas.size(); ++a) {
        if (v < alt.probs[a]) {
          pick = static_cast<int>(a);
          break;
        }
        v -= alt.probs[a];
      }
      const VariableId var = VariableId::attribute(h, actor);
      const int nv = state.attr(h, actor) + alt.deltas[pick];
      log_density += std::log(model.attr_rate(actor) *
                              model.attribute_pick_prob() * alt.probs[pick]);
      state.set_attr(h, actor, nv);
      builder.add(t, layout.index_of(var), nv);
      cache.notify_flip(var, state);
    }
  }
  log_density -= total * (t_end - t);
  return {builder.take(), log_density};
}

struct LogDensityResult {
  double value = 0;
  bool impossible = false;
};

// Exact log density of a complete trajectory under the model (starting
// distribution omitted). Equals the factored per-variable likelihood: the
// survival part integrates to total_rate * t_end because every actor's
// choice probabilities sum to one, and each transition contributes the log
// of its intensity in the state just before it.
inline LogDensityResult trajectory_log_density(const CoevolutionModel& model,
                                               const Trajectory& traj) {
  const auto& skel = model.skeleton();
  const auto layout = skel.layout();
  if (traj.n_variables() != layout.n_variables())
    throw std::invalid_argument("trajectory does not match the model");

  LogDensityResult out;
  NetworkState state = values_to_state(skel, traj.initial);
  ChoiceCache cache(model);
  out.value = -model.total_rate() * traj.t_end;

  for (const auto& tr : traj.transitions) {
    const VariableId var = layout.id_of(tr.var);
    double rate = 0;
    if (var.kind == VarKind::Link) {
      rate = cache.link_rate(var.a, var.b, state);
    } else {
      const auto& alt = cache.attr(var.b, var.a, state);
      const int delta = tr.to - tr.from;
      for (std::size_t a = 0; a < alt.deltas.size(); ++a)
        if (alt.deltas[a] == delta)
          rate = model.attr_rate(var.b) * model.attribute_pick_prob() *
                 alt.probs[a];
    }
    if (!(rate > 0)) {
      out.impossible = true;
      out.value = -std::numeric_limits<double>::infinity();
      return out;
    }
    out.value += std::log(rate);
    state.set_value(var, tr.to);
    cache.notify_flip(var, state);
  }
  return out;
}

}  // namespace ctsnet

#endif
