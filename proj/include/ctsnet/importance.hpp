#ifndef CTSNET_IMPORTANCE_HPP
#define CTSNET_IMPORTANCE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsnet/evidence.hpp"
#include "ctsnet/forward.hpp"
#include "ctsnet/model.hpp"
#include "ctsnet/rng.hpp"
#include "ctsnet/trajectory.hpp"

namespace ctsnet {

struct DegenerateSampleSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// kappa scales every free and forced proposal rate; the importance weight
// always carries the exact target-vs-proposal density ratio, so estimates
// stay unbiased for any kappa in (0, 1]. kappa = 0.5 reproduces the
// halved-intensity learning proposal, kappa = 1 the plain sampler.
struct ProposalConfig {
  double rate_scale = 0.5;

  void validate() const {
    if (!(rate_scale > 0.0 && rate_scale <= 1.0))
      throw std::invalid_argument("rate_scale must lie in (0, 1]");
  }
};

struct WeightedTrajectory {
  Trajectory traj;
  double log_weight = 0;

  bool failed() const { return !std::isfinite(log_weight); }
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Case { Free, Forced, Pull };  // the three proposal cases

struct VarProposalState {
  // evidence timeline
  std::vector<Window> windows;
  std::vector<std::pair<double, int>> forced;
  std::size_t window_cursor = 0;
  std::size_t forced_cursor = 0;

  // per-step scratch
  Case cas = Case::Free;
  double rate = 0;         // target leave rate q
  double proposal_rate = 0;  // kappa q
  double horizon = kInf;   // t_e - t for the pull case
  double candidate = kInf; // absolute time of the sampled/forced transition

  const Window* active(double t) const {
    for (std::size_t k = window_cursor; k < windows.size(); ++k) {
      const auto& w = windows[k];
      if (w.start > t) break;
      if (!w.point() && t < w.end) return &w;
    }
    return nullptr;
  }
  const Window* next(double t) const {
    for (std::size_t k = window_cursor; k < windows.size(); ++k) {
      if (windows[k].start > t) return &windows[k];
    }
    return nullptr;
  }
  const std::pair<double, int>* next_forced(double t) const {
    if (forced_cursor < forced.size() && forced[forced_cursor].first > t)
      return &forced[forced_cursor];
    return nullptr;
  }
};

}  // namespace detail

// Evidence-constrained proposal for the converted network-attribute system.
// Produces a complete trajectory conforming to the evidence together with
// its log importance weight ln[P(traj, e) / P'(traj)]. An unsatisfiable
// constraint yields log_weight = -inf rather than a throw.
inline WeightedTrajectory propose_trajectory(const CoevolutionModel& model,
                                             const NetworkState& initial,
                                             const Evidence& evidence,
                                             double t_end,
                                             const ProposalConfig& config,
                                             RngStream& rng) {
  using detail::Case;
  using detail::kInf;

  config.validate();
  const double kappa = config.rate_scale;
  const auto& skel = model.skeleton();
  const auto layout = skel.layout();
  const int nv = layout.n_variables();
  const int H = model.n_attributes();

  TrajectoryBuilder builder(layout.all_variables(),
                            state_to_values(skel, initial), t_end);
  NetworkState state = initial;
  ChoiceCache cache(model);

  // index the compiled evidence by dense variable position
  std::vector<detail::VarProposalState> vars(nv);
  for (auto& [id, ve] : evidence.compile(t_end)) {
    auto& vp = vars[layout.index_of(id)];
    vp.windows = std::move(ve.windows);
    vp.forced = std::move(ve.forced);
  }

  double log_weight = 0;
  const auto fail = [&]() {
    WeightedTrajectory out;
    out.traj = builder.take();
    out.log_weight = -kInf;
    return out;
  };

  // validate constraints that bind at exactly time t
  const auto consume_boundaries = [&](double t) {
    for (int v = 0; v < nv; ++v) {
      auto& vp = vars[v];
      while (vp.window_cursor < vp.windows.size()) {
        const auto& w = vp.windows[vp.window_cursor];
        if (w.point() && w.start <= t) {
          if (state.value_of(layout.id_of(v)) != w.value) return false;
          ++vp.window_cursor;
        } else if (!w.point() && w.end <= t) {
          ++vp.window_cursor;
        } else {
          break;
        }
      }
      while (vp.forced_cursor < vp.forced.size() &&
             vp.forced[vp.forced_cursor].first <= t)
        ++vp.forced_cursor;
    }
    return true;
  };

  // entering a window requires the state to match its value already
  const auto check_window_entries = [&](double t) {
    for (int v = 0; v < nv; ++v) {
      const auto* w = vars[v].active(t);
      if (w && state.value_of(layout.id_of(v)) != w->value) return false;
    }
    return true;
  };

  if (!consume_boundaries(0.0)) return fail();
  if (!check_window_entries(0.0)) return fail();

  double t = 0;
  std::uint64_t guard = 0;
  while (t < t_end) {
    if (++guard > 50'000'000ull) return fail();

    // per-variable case analysis and candidate times, ascending id order;
    // evidence boundaries cap the step so cases and rates stay piecewise
    // constant within it
    double boundary = t_end;
    for (int v = 0; v < nv; ++v) {
      auto& vp = vars[v];
      const auto id = layout.id_of(v);
      vp.rate = (id.kind == VarKind::Link)
                    ? cache.link_rate(id.a, id.b, state)
                    : model.attr_rate(id.b) * model.attribute_pick_prob();
      vp.proposal_rate = kappa * vp.rate;
      vp.candidate = kInf;
      vp.horizon = kInf;

      if (const auto* w = vp.active(t)) {
        vp.cas = Case::Forced;
        if (const auto* f = vp.next_forced(t))
          if (f->first <= w->end) vp.candidate = f->first;
        boundary = std::min(boundary, w->end);
      } else {
        const auto* nw = vp.next(t);
        if (nw == nullptr || state.value_of(id) == nw->value) {
          vp.cas = Case::Free;
          if (vp.proposal_rate > 0)
            vp.candidate = t + sample_exponential(vp.proposal_rate, rng);
        } else {
          vp.cas = Case::Pull;
          vp.horizon = nw->start - t;
          if (!(vp.proposal_rate > 0)) return fail();  // cannot reach evidence
          double dt_pull =
              sample_truncated_exponential(vp.proposal_rate, vp.horizon, rng);
          if (dt_pull >= vp.horizon) dt_pull = vp.horizon * (1.0 - 1e-12);
          vp.candidate = t + dt_pull;
        }
        if (nw != nullptr) boundary = std::min(boundary, nw->start);
      }
    }

    int winner = -1;  // variable with the earliest sampled/forced transition
    double min_candidate = kInf;
    for (int v = 0; v < nv; ++v) {
      if (vars[v].candidate < min_candidate) {
        min_candidate = vars[v].candidate;
        winner = v;
      }
    }
    double t_next;
    bool winner_forced = false;
    if (winner >= 0 && min_candidate <= boundary && min_candidate < t_end) {
      t_next = min_candidate;
      winner_forced = (vars[winner].cas == Case::Forced);
    } else {
      t_next = boundary;
      winner = -1;
    }

    const double dt = t_next - t;

    // per-variable weight contributions over [t, t_next)
    for (int v = 0; v < nv; ++v) {
      const auto& vp = vars[v];
      const bool fires = (v == winner);
      switch (vp.cas) {
        case Case::Forced:
          log_weight -= vp.rate * dt;
          break;
        case Case::Free:
          log_weight -= (vp.rate - vp.proposal_rate) * dt;
          if (fires) log_weight -= std::log(kappa);
          break;
        case Case::Pull: {
          log_weight -= (vp.rate - vp.proposal_rate) * dt;
          log_weight += log1m_exp(vp.proposal_rate * vp.horizon);
          if (fires)
            log_weight -= std::log(kappa);
          else if (dt < vp.horizon)
            log_weight -= log1m_exp(vp.proposal_rate * (vp.horizon - dt));
          else
            return fail();  // pulled variable missed its deadline
          break;
        }
      }
    }

    t = t_next;
    if (winner >= 0) {
      const auto id = layout.id_of(winner);
      auto& vp = vars[winner];
      if (winner_forced) {
        const int new_value = vp.forced[vp.forced_cursor].second;
        // density of the evidence-dictated move under the target
        double move_rate = 0;
        if (id.kind == VarKind::Link) {
          move_rate = vp.rate;
        } else {
          const auto& alt = cache.attr(id.b, id.a, state);
          const int delta = new_value - state.attr(id.a, id.b);
          for (std::size_t a = 0; a < alt.deltas.size(); ++a)
            if (alt.deltas[a] == delta)
              move_rate = model.attr_rate(id.b) * model.attribute_pick_prob() *
                          alt.probs[a];
        }
        if (!(move_rate > 0)) return fail();
        log_weight += std::log(move_rate);
        state.set_value(id, new_value);
        builder.add(t, winner, new_value);
        cache.notify_flip(id, state);
      } else {
        int new_value;
        if (id.kind == VarKind::Link) {
          new_value = state.link(id.a, id.b) ? 0 : 1;
        } else {
          const auto& alt = cache.attr(id.b, id.a, state);
          double u = rng.uniform();
          int pick = static_cast<int>(alt.deltas.size()) - 1;
          for (std::size_t a = 0; a < alt.deltas.size(); ++a) {
            if (u < alt.probs[a]) {
              pick = static_cast<int>(a);
              break;
            }
            u -= alt.probs[a];
          }
          new_value = state.attr(id.a, id.b) + alt.deltas[pick];
        }
        state.set_value(id, new_value);
        builder.add(t, winner, new_value);
        cache.notify_flip(id, state);
      }
    }
    if (!consume_boundaries(t)) return fail();
    if (!check_window_entries(t)) return fail();
  }

  WeightedTrajectory out;
  out.traj = builder.take();
  out.log_weight = log_weight;
  return out;
}

// log(sum exp(x)) over finite entries; -inf when all are -inf
inline double log_sum_exp(std::span<const double> xs) {
  double mx = -detail::kInf;
  for (const double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return -detail::kInf;
  double s = 0;
  for (const double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Normalized weights w_m / sum(w), computed in log space.
inline std::vector<double> normalized_weights(
    std::span<const WeightedTrajectory> samples) {
  std::vector<double> lw(samples.size());
  for (std::size_t m = 0; m < samples.size(); ++m)
    lw[m] = samples[m].log_weight;
  const double total = log_sum_exp(lw);
  if (!std::isfinite(total))
    throw DegenerateSampleSet("all importance weights vanished");
  std::vector<double> out(samples.size());
  for (std::size_t m = 0; m < samples.size(); ++m)
    out[m] = std::isfinite(lw[m]) ? std::exp(lw[m] - total) : 0.0;
  return out;
}

// Self-normalized estimate of E[f | evidence] over weighted samples.
inline std::vector<double> estimate_expectation(
    const std::function<std::vector<double>(const Trajectory&)>& f,
    std::span<const WeightedTrajectory> samples) {
  if (samples.empty())
    throw std::invalid_argument("estimate_expectation needs samples");
  const auto w = normalized_weights(samples);
  std::vector<double> acc;
  for (std::size_t m = 0; m < samples.size(); ++m) {
    if (w[m] == 0.0) continue;
    const auto fx = f(samples[m].traj);
    if (acc.empty()) acc.assign(fx.size(), 0.0);
    if (fx.size() != acc.size())
      throw std::invalid_argument("f must return a fixed-size vector");
    for (std::size_t k = 0; k < fx.size(); ++k) acc[k] += w[m] * fx[k];
  }
  if (acc.empty())
    throw DegenerateSampleSet("all importance weights vanished");
  return acc;
}

// (sum w)^2 / sum w^2 in [1, m]
inline double effective_sample_size(
    std::span<const WeightedTrajectory> samples) {
  std::vector<double> lw;
  lw.reserve(samples.size());
  for (const auto& s : samples)
    if (std::isfinite(s.log_weight)) lw.push_back(s.log_weight);
  if (lw.empty())
    throw DegenerateSampleSet("all importance weights vanished");
  std::vector<double> lw2(lw.size());
  for (std::size_t m = 0; m < lw.size(); ++m) lw2[m] = 2.0 * lw[m];
  return std::exp(2.0 * log_sum_exp(lw) - log_sum_exp(lw2));
}

// One line of sampler diagnostics per batch.
struct BatchDiagnostics {
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  double log_weight_mean = 0;
  double log_weight_variance = 0;
  double ess = 0;
};

inline BatchDiagnostics batch_diagnostics(
    std::span<const WeightedTrajectory> samples) {
  BatchDiagnostics d;
  d.n_samples = samples.size();
  double sum = 0, sum2 = 0;
  std::size_t n = 0;
  for (const auto& s : samples) {
    if (!std::isfinite(s.log_weight)) {
      ++d.n_failed;
      continue;
    }
    sum += s.log_weight;
    sum2 += s.log_weight * s.log_weight;
    ++n;
  }
  if (n > 0) {
    d.log_weight_mean = sum / n;
    d.log_weight_variance =
        n > 1 ? (sum2 - sum * sum / n) / (n - 1) : 0.0;
    d.ess = effective_sample_size(samples);
  }
  return d;
}

}  // namespace ctsnet

#endif
