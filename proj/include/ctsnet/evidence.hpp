#ifndef CTSNET_EVIDENCE_HPP
#define CTSNET_EVIDENCE_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ctsnet/trajectory.hpp"
#include "ctsnet/variable.hpp"

namespace ctsnet {

struct PointObservation {
  double time = 0;
  VariableId var;
  int value = 0;
};

struct IntervalObservation {
  VariableId var;
  double t_start = 0;
  double t_end = 0;
  int value = 0;
};

struct FullyObservedVariable {
  VariableId var;
  int initial = 0;
  std::vector<std::pair<double, int>> transitions;  // (time, new value)
};

namespace detail {

// Per-variable normalized evidence: constraint windows (end == start means a
// point constraint) plus forced transitions from full observations.
struct Window {
  double start = 0;
  double end = 0;
  int value = 0;
  bool point() const { return end == start; }
};

struct VarEvidence {
  std::vector<Window> windows;                     // sorted by start
  std::vector<std::pair<double, int>> forced;      // (time, new value)
  bool fully_observed = false;
  int forced_initial = 0;                          // valid iff fully_observed
};

}  // namespace detail

// Observation set: point snapshots, interval observations, fully observed
// variables. Items for one variable must not overlap with conflicting
// values.
struct Evidence {
  std::vector<PointObservation> points;
  std::vector<IntervalObservation> intervals;
  std::vector<FullyObservedVariable> full;

  bool empty() const {
    return points.empty() && intervals.empty() && full.empty();
  }

  void validate(double t_end) const { compile(t_end); }

  // Normalize into per-variable timelines; throws on inconsistency.
  std::map<VariableId, detail::VarEvidence> compile(double t_end) const {
    std::map<VariableId, detail::VarEvidence> out;
    for (const auto& f : full) {
      auto& ve = out[f.var];
      if (ve.fully_observed || !ve.windows.empty())
        throw std::invalid_argument("duplicate evidence for " +
                                    to_string(f.var));
      ve.fully_observed = true;
      ve.forced_initial = f.initial;
      double prev = 0;
      int value = f.initial;
      for (const auto& [time, nv] : f.transitions) {
        if (!(time > prev) || !(time < t_end))
          throw std::invalid_argument("full observation times out of order");
        if (nv == value)
          throw std::invalid_argument("full observation repeats a value");
        ve.windows.push_back({prev, time, value});
        ve.forced.emplace_back(time, nv);
        prev = time;
        value = nv;
      }
      ve.windows.push_back({prev, t_end, value});
    }
    for (const auto& iv : intervals) {
      if (!(iv.t_start < iv.t_end) || iv.t_start < 0 || iv.t_end > t_end)
        throw std::invalid_argument("interval observation outside [0, t_end]");
      auto& ve = out[iv.var];
      if (ve.fully_observed)
        throw std::invalid_argument("interval overlaps full observation of " +
                                    to_string(iv.var));
      ve.windows.push_back({iv.t_start, iv.t_end, iv.value});
    }
    for (const auto& p : points) {
      if (p.time < 0 || p.time > t_end)
        throw std::invalid_argument("point observation outside [0, t_end]");
      auto& ve = out[p.var];
      if (ve.fully_observed) {
        // must agree with the recorded path; fold into it
        int v = ve.forced_initial;
        for (const auto& [time, nv] : ve.forced) {
          if (time <= p.time) v = nv;
        }
        if (v != p.value)
          throw std::invalid_argument("point conflicts with full observation");
        continue;
      }
      ve.windows.push_back({p.time, p.time, p.value});
    }
    for (auto& [var, ve] : out) {
      // A fully observed variable's windows tile [0, t_end] by construction,
      // with the forced transitions joining them.
      if (ve.fully_observed) continue;
      std::sort(ve.windows.begin(), ve.windows.end(),
                [](const auto& a, const auto& b) {
                  if (a.start != b.start) return a.start < b.start;
                  return a.end < b.end;
                });
      // Conflict check. Touching windows with different values are also
      // rejected: they would require a transition at an exact deterministic
      // time, which the continuous dynamics produce with probability zero.
      for (std::size_t k = 0; k < ve.windows.size(); ++k) {
        for (std::size_t l = k + 1; l < ve.windows.size(); ++l) {
          const auto& a = ve.windows[k];
          const auto& b = ve.windows[l];
          if (b.start > a.end) break;
          if (a.value != b.value)
            throw std::invalid_argument("conflicting evidence for " +
                                        to_string(var));
        }
      }
      // merge overlapping / touching same-value windows
      std::vector<detail::Window> merged;
      for (const auto& w : ve.windows) {
        if (!merged.empty() && w.start <= merged.back().end &&
            w.value == merged.back().value) {
          merged.back().end = std::max(merged.back().end, w.end);
        } else {
          merged.push_back(w);
        }
      }
      ve.windows = std::move(merged);
    }
    return out;
  }
};

// True iff the trajectory agrees with every evidence item.
inline bool validate_trajectory_against_evidence(const Trajectory& traj,
                                                 const Evidence& ev) {
  for (const auto& p : ev.points) {
    const int var = traj.index_of(p.var);
    if (traj.value_at(var, p.time) != p.value) return false;
  }
  for (const auto& iv : ev.intervals) {
    const int var = traj.index_of(iv.var);
    if (traj.value_at(var, iv.t_start) != iv.value) return false;
    for (const int k : traj.per_var[var]) {
      const double t = traj.transitions[k].time;
      if (t > iv.t_start && t < iv.t_end) return false;
    }
  }
  for (const auto& f : ev.full) {
    const int var = traj.index_of(f.var);
    if (traj.initial[var] != f.initial) return false;
    const auto& idx = traj.per_var[var];
    if (idx.size() != f.transitions.size()) return false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto& tr = traj.transitions[idx[k]];
      if (tr.time != f.transitions[k].first ||
          tr.to != f.transitions[k].second)
        return false;
    }
  }
  return true;
}

}  // namespace ctsnet

#endif
