#ifndef CTSNET_TRAJECTORY_HPP
#define CTSNET_TRAJECTORY_HPP

#include <algorithm>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctsnet/variable.hpp"

namespace ctsnet {

struct Transition {
  double time = 0;
  int var = 0;  // index into Trajectory::variables
  int from = 0;
  int to = 0;
};

// Piecewise-constant sample path of a set of variables over [0, t_end].
// Stored as initial values plus the global time-ordered transition list;
// per-variable segment views are derived. Timestamps are strictly
// increasing across the whole system (simultaneous transitions are
// excluded by construction).
struct Trajectory {
  double t_end = 0;
  std::vector<VariableId> variables;  // ascending VariableId order
  std::vector<int> initial;           // per variable
  std::vector<Transition> transitions;

  // derived; rebuilt by finalize()
  std::vector<std::vector<int>> per_var;

  int n_variables() const { return static_cast<int>(variables.size()); }

  int index_of(const VariableId& v) const {
    const auto it = std::lower_bound(variables.begin(), variables.end(), v);
    if (it == variables.end() || *it != v)
      throw std::invalid_argument("variable not in trajectory: " +
                                  to_string(v));
    return static_cast<int>(it - variables.begin());
  }

  // Value at time t, right-continuous; t == t_end gives the final value.
  int value_at(int var, double t) const {
    const auto& idx = per_var[var];
    int v = initial[var];
    // last transition of var with time <= t
    int lo = 0, hi = static_cast<int>(idx.size());
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (transitions[idx[mid]].time <= t)
        lo = mid + 1;
      else
        hi = mid;
    }
    if (lo > 0) v = transitions[idx[lo - 1]].to;
    return v;
  }

  int final_value(int var) const {
    const auto& idx = per_var[var];
    return idx.empty() ? initial[var] : transitions[idx.back()].to;
  }

  // (start_time, value) pairs tiling [0, t_end)
  std::vector<std::pair<double, int>> segments(int var) const {
    std::vector<std::pair<double, int>> out;
    out.emplace_back(0.0, initial[var]);
    for (const int k : per_var[var])
      out.emplace_back(transitions[k].time, transitions[k].to);
    return out;
  }

  void finalize() {
    per_var.assign(variables.size(), {});
    double prev = -1.0;
    for (int k = 0; k < static_cast<int>(transitions.size()); ++k) {
      const auto& tr = transitions[k];
      if (!(tr.time > prev))
        throw std::invalid_argument(
            "transition times must be strictly increasing");
      if (!(tr.time >= 0 && tr.time <= t_end))
        throw std::invalid_argument("transition time outside [0, t_end]");
      if (tr.var < 0 || tr.var >= n_variables())
        throw std::invalid_argument("transition references unknown variable");
      if (tr.from == tr.to)
        throw std::invalid_argument("transition must change the state");
      prev = tr.time;
      per_var[tr.var].push_back(k);
    }
    // per-variable continuity: each transition leaves the previous value
    for (int v = 0; v < n_variables(); ++v) {
      int cur = initial[v];
      for (const int k : per_var[v]) {
        if (transitions[k].from != cur)
          throw std::invalid_argument("transition chain broken for " +
                                      to_string(variables[v]));
        cur = transitions[k].to;
      }
    }
  }

  int transition_count(int var) const {
    return static_cast<int>(per_var[var].size());
  }
};

// Incremental construction with invariant checks.
class TrajectoryBuilder {
 public:
  TrajectoryBuilder(std::vector<VariableId> variables,
                    std::vector<int> initial, double t_end) {
    if (variables.size() != initial.size())
      throw std::invalid_argument("initial values / variables size mismatch");
    if (!std::is_sorted(variables.begin(), variables.end()))
      throw std::invalid_argument("variables must be in ascending id order");
    if (!(t_end >= 0)) throw std::invalid_argument("t_end must be >= 0");
    traj_.t_end = t_end;
    traj_.variables = std::move(variables);
    traj_.initial = std::move(initial);
    current_ = traj_.initial;
  }

  double last_time() const { return last_time_; }
  int current_value(int var) const { return current_[var]; }

  void add(double time, int var, int new_state) {
    if (!(time > last_time_))
      throw std::invalid_argument("transition times must strictly increase");
    if (!(time <= traj_.t_end))
      throw std::invalid_argument("transition beyond t_end");
    if (new_state == current_[var])
      throw std::invalid_argument("transition must change the state");
    traj_.transitions.push_back({time, var, current_[var], new_state});
    current_[var] = new_state;
    last_time_ = time;
  }

  Trajectory take() {
    traj_.finalize();
    return std::move(traj_);
  }

 private:
  Trajectory traj_;
  std::vector<int> current_;
  double last_time_ = 0;
};

}  // namespace ctsnet

#endif
