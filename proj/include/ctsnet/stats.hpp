#ifndef CTSNET_STATS_HPP
#define CTSNET_STATS_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "ctsnet/trajectory.hpp"

namespace ctsnet {

// Parent instantiation of a variable, used as the aggregation key for
// sufficient statistics. Any refinement of the true context partition gives
// the same likelihood, so callers may use the full rest-of-system state.
using ContextKey = std::vector<std::int32_t>;

struct ContextKeyHash {
  std::size_t operator()(const ContextKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto v : k) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// T[x|u] and M[x,x'|u] for one (variable, context) cell. States are indexed
// 0..n_states-1 in the variable's own value coding (caller-defined).
struct ContextCell {
  int n_states = 0;
  std::vector<double> dwell;   // T[x|u]
  std::vector<double> jumps;   // M[x,x'|u], row-major n_states^2

  explicit ContextCell(int k = 0)
      : n_states(k),
        dwell(k, 0.0),
        jumps(static_cast<std::size_t>(k) * k, 0.0) {}

  double& jump(int from, int to) {
    return jumps[static_cast<std::size_t>(from) * n_states + to];
  }
  double jump(int from, int to) const {
    return jumps[static_cast<std::size_t>(from) * n_states + to];
  }
  double leave_count(int from) const {  // M[x|u]
    double s = 0;
    for (int to = 0; to < n_states; ++to)
      if (to != from) s += jump(from, to);
    return s;
  }
};

struct SufficientStats {
  double t_end = 0;
  std::vector<int> n_states;  // per variable
  std::vector<std::unordered_map<ContextKey, ContextCell, ContextKeyHash>>
      by_var;

  double total_dwell(int var) const {
    double s = 0;
    for (const auto& [key, cell] : by_var[var])
      for (const double d : cell.dwell) s += d;
    return s;
  }
};

// context_fn(var, current_values) -> parent instantiation key. The values
// span is indexed like trajectory.variables and must not include var's own
// value in the key (own state indexes the cell internally).
using ContextFn =
    std::function<ContextKey(int var, std::span<const int> values)>;

// value_index_fn(var, raw_value) -> dense state index in [0, n_states(var))
using ValueIndexFn = std::function<int(int var, int value)>;

inline SufficientStats collect_sufficient_stats(
    const Trajectory& traj, const ContextFn& context_fn,
    const std::vector<int>& n_states, const ValueIndexFn& value_index) {
  const int nv = traj.n_variables();
  if (static_cast<int>(n_states.size()) != nv)
    throw std::invalid_argument("n_states size mismatch");
  SufficientStats stats;
  stats.t_end = traj.t_end;
  stats.n_states = n_states;
  stats.by_var.resize(nv);

  std::vector<int> values = traj.initial;
  double t = 0;
  std::size_t k = 0;
  while (true) {
    const double t_next =
        k < traj.transitions.size() ? traj.transitions[k].time : traj.t_end;
    const double dt = t_next - t;
    if (dt > 0) {
      const std::span<const int> vals(values);
      for (int v = 0; v < nv; ++v) {
        auto key = context_fn(v, vals);
        auto it = stats.by_var[v].find(key);
        if (it == stats.by_var[v].end())
          it = stats.by_var[v].emplace(std::move(key), ContextCell(n_states[v]))
                   .first;
        it->second.dwell[value_index(v, values[v])] += dt;
      }
    }
    if (k >= traj.transitions.size()) break;
    const auto& tr = traj.transitions[k];
    {
      // the jump is attributed to the context in force just before it
      const std::span<const int> vals(values);
      auto key = context_fn(tr.var, vals);
      auto it = stats.by_var[tr.var].find(key);
      if (it == stats.by_var[tr.var].end())
        it = stats.by_var[tr.var]
                 .emplace(std::move(key), ContextCell(n_states[tr.var]))
                 .first;
      it->second.jump(value_index(tr.var, tr.from),
                      value_index(tr.var, tr.to)) += 1.0;
    }
    values[tr.var] = tr.to;
    t = t_next;
    ++k;
  }
  return stats;
}

struct LogDensity {
  double value = 0;
  bool impossible = false;  // a recorded move had probability zero
};

// rate_fn(var, context, state_index) -> q_{x|u}
// theta_fn(var, context, from_index, to_index) -> transition distribution
using RateFn = std::function<double(int, const ContextKey&, int)>;
using ThetaFn = std::function<double(int, const ContextKey&, int, int)>;

// Trajectory log density from sufficient statistics:
//   sum over variables, contexts, states of
//     M[x|u] ln q_{x|u} - q_{x|u} T[x|u] + sum_{x' != x} M[x,x'|u] ln theta.
// The starting distribution is omitted.
inline LogDensity log_likelihood(const SufficientStats& stats,
                                 const RateFn& rate_fn,
                                 const ThetaFn& theta_fn) {
  LogDensity out;
  for (int v = 0; v < static_cast<int>(stats.by_var.size()); ++v) {
    for (const auto& [key, cell] : stats.by_var[v]) {
      for (int x = 0; x < cell.n_states; ++x) {
        const double T = cell.dwell[x];
        const double M = cell.leave_count(x);
        if (T == 0 && M == 0) continue;
        const double q = rate_fn(v, key, x);
        if (M > 0) {
          if (!(q > 0)) {
            out.impossible = true;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
          }
          out.value += M * std::log(q);
        }
        out.value -= q * T;
        for (int x2 = 0; x2 < cell.n_states; ++x2) {
          if (x2 == x) continue;
          const double m = cell.jump(x, x2);
          if (m == 0) continue;
          const double th = theta_fn(v, key, x, x2);
          if (!(th > 0)) {
            out.impossible = true;
            out.value = -std::numeric_limits<double>::infinity();
            return out;
          }
          out.value += m * std::log(th);
        }
      }
    }
  }
  return out;
}

}  // namespace ctsnet

#endif
