#ifndef CTSNET_JOINT_HPP
#define CTSNET_JOINT_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsnet/intensity.hpp"
#include "ctsnet/model.hpp"
#include "ctsnet/variable.hpp"

namespace ctsnet {

// Flattened joint state space of a variable subset, with the remaining
// variables frozen at their values in a base state. Used as the exact
// small-system oracle; the amalgamated matrix is a true generator when the
// subset covers every variable that can move.
class JointSpace {
 public:
  JointSpace(const ModelSkeleton& skel, NetworkState base,
             std::span<const VariableId> vars, int cap = 4096)
      : skel_(&skel), base_(std::move(base)) {
    vars_.assign(vars.begin(), vars.end());
    long long total = 1;
    for (const auto& v : vars_) {
      int k = 0;
      switch (v.kind) {
        case VarKind::Link:
          k = 2;
          break;
        case VarKind::Attribute:
          k = skel.attributes.at(v.a).range.size();
          break;
        default:
          throw std::invalid_argument("joint space holds model variables only");
      }
      card_.push_back(k);
      total *= k;
      if (total > cap)
        throw StateSpaceTooLarge("joint state space exceeds cap of " +
                                 std::to_string(cap));
    }
    size_ = static_cast<int>(total);
  }

  int size() const { return size_; }
  const std::vector<VariableId>& variables() const { return vars_; }

  // mixed-radix encoding, first variable least significant
  int index_of(const NetworkState& s) const {
    int idx = 0, mult = 1;
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      idx += digit(s.value_of(vars_[k]), k) * mult;
      mult *= card_[k];
    }
    return idx;
  }

  NetworkState state_of(int index) const {
    NetworkState s = base_;
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const int d = index % card_[k];
      index /= card_[k];
      s.set_value(vars_[k], value(d, k));
    }
    return s;
  }

 private:
  int digit(int value, std::size_t k) const {
    const auto& v = vars_[k];
    if (v.kind == VarKind::Link) return value;
    return value - skel_->attributes[v.a].range.lo;
  }
  int value(int digit, std::size_t k) const {
    const auto& v = vars_[k];
    if (v.kind == VarKind::Link) return digit;
    return digit + skel_->attributes[v.a].range.lo;
  }

  const ModelSkeleton* skel_;
  NetworkState base_;
  std::vector<VariableId> vars_;
  std::vector<int> card_;
  int size_ = 0;
};

// Amalgamated generator over the joint space: the entry for a one-variable
// flip equals the model's intensity for that flip; multi-variable moves
// have rate zero; each diagonal is minus its row sum.
inline IntensityMatrix build_joint_generator(const CoevolutionModel& model,
                                             const JointSpace& space) {
  IntensityMatrix q(space.size());
  for (int s = 0; s < space.size(); ++s) {
    const NetworkState from = space.state_of(s);
    double leave = 0;
    for (std::size_t k = 0; k < space.variables().size(); ++k) {
      const auto& v = space.variables()[k];
      NetworkState to = from;
      if (v.kind == VarKind::Link) {
        to.toggle_link(v.a, v.b);
        const double rate = model.global_intensity(from, to);
        q.at(s, space.index_of(to)) = rate;
        leave += rate;
      } else {
        const auto& range = model.skeleton().attributes[v.a].range;
        const int z = from.attr(v.a, v.b);
        for (const int delta : {-1, +1}) {
          if (!range.contains(z + delta)) continue;
          to = from;
          to.set_attr(v.a, v.b, z + delta);
          const double rate = model.global_intensity(from, to);
          q.at(s, space.index_of(to)) = rate;
          leave += rate;
        }
      }
    }
    q.at(s, s) = -leave;
  }
  return q;
}

inline IntensityMatrix build_joint_generator(const CoevolutionModel& model,
                                             const NetworkState& base,
                                             std::span<const VariableId> vars,
                                             int cap = 4096) {
  return build_joint_generator(model,
                               JointSpace(model.skeleton(), base, vars, cap));
}

}  // namespace ctsnet

#endif
