#ifndef CTSNET_MODEL_HPP
#define CTSNET_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsnet/effects.hpp"
#include "ctsnet/intensity.hpp"
#include "ctsnet/network_state.hpp"
#include "ctsnet/variable.hpp"

namespace ctsnet {

struct AttributeDecl {
  std::string name;
  AttributeRange range;
  std::vector<EffectSpec> effects;  // drive this attribute's utility
};

// Structure of a model: actors, attribute declarations with ranges, and the
// effect lists of the network and attribute utilities. Parameter values
// live in ModelParams.
struct ModelSkeleton {
  int n_actors = 0;
  std::vector<AttributeDecl> attributes;
  std::vector<EffectSpec> network_effects;
  bool shared_rates = true;

  int n_attributes() const { return static_cast<int>(attributes.size()); }

  void validate() const {
    if (n_actors < 2) throw std::invalid_argument("model needs >= 2 actors");
    for (const auto& e : network_effects) {
      if (e.kind == EffectKind::Tendency)
        throw std::invalid_argument("tendency is not a network effect");
      if (e.needs_attribute() &&
          (e.attribute < 0 || e.attribute >= n_attributes()))
        throw std::invalid_argument("network effect references bad attribute");
    }
    for (int h = 0; h < n_attributes(); ++h) {
      const auto& decl = attributes[h];
      if (decl.range.hi <= decl.range.lo)
        throw std::invalid_argument("attribute range must have hi > lo");
      for (const auto& e : decl.effects) {
        if (e.kind == EffectKind::Activity || e.kind == EffectKind::Popularity)
          throw std::invalid_argument(
              "activity/popularity are network-only effects");
        if (e.kind == EffectKind::Tendency && e.attribute != h)
          throw std::invalid_argument(
              "tendency effect must reference its own attribute");
        if (e.needs_attribute() &&
            (e.attribute < 0 || e.attribute >= n_attributes()))
          throw std::invalid_argument(
              "attribute effect references bad attribute");
      }
    }
  }

  VariableLayout layout(bool with_obs = false) const {
    return VariableLayout(n_actors, n_attributes(), with_obs);
  }

  NetworkState make_state() const {
    std::vector<AttributeRange> r;
    r.reserve(attributes.size());
    for (const auto& a : attributes) r.push_back(a.range);
    return NetworkState(n_actors, std::move(r));
  }

  int n_weights() const {
    int k = static_cast<int>(network_effects.size());
    for (const auto& a : attributes) k += static_cast<int>(a.effects.size());
    return k;
  }
};

// alpha = (network rate, attribute rate, network weights, attribute weights)
struct ModelParams {
  std::vector<double> net_rate;    // size 1 (shared) or n_actors
  std::vector<double> attr_rate;   // size 1 (shared) or n_actors
  std::vector<double> net_weights;
  std::vector<std::vector<double>> attr_weights;  // per attribute

  double net_rate_of(int i) const {
    return net_rate.size() == 1 ? net_rate[0] : net_rate.at(i);
  }
  double attr_rate_of(int i) const {
    if (attr_rate.empty()) return 0.0;
    return attr_rate.size() == 1 ? attr_rate[0] : attr_rate.at(i);
  }
};

namespace detail {

// softmax with max subtraction; writes probabilities in place
inline void softmax_inplace(std::vector<double>& u) {
  double mx = u[0];
  for (const double x : u) mx = std::max(mx, x);
  double z = 0;
  for (auto& x : u) {
    x = std::exp(x - mx);
    z += x;
  }
  for (auto& x : u) x /= z;
}

}  // namespace detail

// Alternatives of one actor's network decision: toggle targets in ascending
// order, their post-toggle utilities and choice probabilities, and (when
// requested) the per-alternative effect vectors.
struct NetAlternatives {
  std::vector<int> targets;
  std::vector<double> utilities;
  std::vector<double> probs;
  std::vector<double> effects;  // n_alt x L row-major; empty unless requested

  int position_of(int j, int actor) const {
    return j < actor ? j : j - 1;
  }
};

struct AttrAlternatives {
  std::vector<int> deltas;  // feasible subset of {-1, +1}
  std::vector<double> utilities;
  std::vector<double> probs;
  std::vector<double> effects;  // n_alt x L row-major; empty unless requested
};

class CoevolutionModel {
 public:
  CoevolutionModel(ModelSkeleton skeleton, ModelParams params)
      : skel_(std::move(skeleton)), params_(std::move(params)) {
    skel_.validate();
    check_params(skel_, params_);
  }

  static void check_params(const ModelSkeleton& s, const ModelParams& p) {
    const auto rate_size_ok = [&](const std::vector<double>& r) {
      return r.size() == 1 || static_cast<int>(r.size()) == s.n_actors;
    };
    if (!rate_size_ok(p.net_rate))
      throw std::invalid_argument("network rate must be shared or per-actor");
    for (const double r : p.net_rate)
      if (!(r >= 0)) throw std::invalid_argument("negative network rate");
    if (s.n_attributes() > 0) {
      if (!rate_size_ok(p.attr_rate))
        throw std::invalid_argument(
            "attribute rate must be shared or per-actor");
      for (const double r : p.attr_rate)
        if (!(r >= 0)) throw std::invalid_argument("negative attribute rate");
    }
    if (p.net_weights.size() != s.network_effects.size())
      throw std::invalid_argument("network weight count mismatch");
    if (static_cast<int>(p.attr_weights.size()) != s.n_attributes())
      throw std::invalid_argument("attribute weight blocks mismatch");
    for (int h = 0; h < s.n_attributes(); ++h)
      if (p.attr_weights[h].size() != s.attributes[h].effects.size())
        throw std::invalid_argument("attribute weight count mismatch");
  }

  const ModelSkeleton& skeleton() const { return skel_; }
  const ModelParams& params() const { return params_; }
  void set_params(ModelParams p) {
    check_params(skel_, p);
    params_ = std::move(p);
  }

  int n_actors() const { return skel_.n_actors; }
  int n_attributes() const { return skel_.n_attributes(); }

  double net_rate(int i) const { return params_.net_rate_of(i); }
  double attr_rate(int i) const {
    return n_attributes() > 0 ? params_.attr_rate_of(i) : 0.0;
  }

  // total intensity of leaving any state: sum_i (lambda_n_i + lambda_a_i)
  double total_rate() const {
    double s = 0;
    for (int i = 0; i < n_actors(); ++i) s += net_rate(i) + attr_rate(i);
    return s;
  }

  // With several attributes, an attribute decision of actor i picks the
  // attribute uniformly, so each Z_hi carries 1/H of the actor's rate.
  double attribute_pick_prob() const {
    return n_attributes() > 0 ? 1.0 / n_attributes() : 0.0;
  }

  // All post-toggle utilities of actor i's network decision, O(n) per effect.
  void network_alternatives(int i, const NetworkState& s, NetAlternatives& out,
                            bool want_effects = false) const {
    const int n = s.n;
    const int L = static_cast<int>(skel_.network_effects.size());
    out.targets.clear();
    out.utilities.clear();
    out.effects.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) out.targets.push_back(j);
    const int n_alt = static_cast<int>(out.targets.size());
    out.utilities.assign(n_alt, 0.0);
    if (want_effects) out.effects.assign(static_cast<std::size_t>(n_alt) * L, 0.0);

    // degree vectors shared across effects
    std::vector<int> outdeg(n, 0), indeg(n, 0);
    bool need_degrees = false;
    for (const auto& e : skel_.network_effects)
      need_degrees |= (e.kind == EffectKind::Activity ||
                       e.kind == EffectKind::Popularity);
    if (need_degrees) {
      for (int a = 0; a < n; ++a) {
        outdeg[a] = s.out_degree(a);
        indeg[a] = s.in_degree(a);
      }
    }

    for (int e = 0; e < L; ++e) {
      const auto& spec = skel_.network_effects[e];
      const double w = params_.net_weights[e];
      const double base = effect_value(spec, i, s);
      for (int a = 0; a < n_alt; ++a) {
        const int k = out.targets[a];
        const int delta = s.link(i, k) ? -1 : +1;
        double val = base;
        switch (spec.kind) {
          case EffectKind::Density:
            val += delta;
            break;
          case EffectKind::Reciprocity:
            val += delta * (s.link(k, i) ? 1 : 0);
            break;
          case EffectKind::Similarity:
            val += delta * s.similarity(spec.attribute, i, k);
            break;
          case EffectKind::Activity:
            val += delta * outdeg[k];
            break;
          case EffectKind::Popularity:
            val += delta * indeg[k] + (delta > 0 ? 1 : 0);
            break;
          case EffectKind::Tendency:
            throw std::invalid_argument("tendency in network effects");
        }
        out.utilities[a] += w * val;
        if (want_effects) out.effects[static_cast<std::size_t>(a) * L + e] = val;
      }
    }
    out.probs = out.utilities;
    detail::softmax_inplace(out.probs);
  }

  std::vector<double> network_choice_probs(int i, const NetworkState& s) const {
    NetAlternatives alt;
    network_alternatives(i, s, alt);
    return alt.probs;
  }

  // Feasible +-1 moves of attribute h for actor i; moves that would leave
  // the declared range are excluded from numerator and denominator.
  void attribute_alternatives(int i, int h, const NetworkState& s,
                              AttrAlternatives& out,
                              bool want_effects = false) const {
    const auto& decl = skel_.attributes[h];
    const int L = static_cast<int>(decl.effects.size());
    const int z = s.attr(h, i);
    out.deltas.clear();
    out.utilities.clear();
    out.effects.clear();
    if (z - 1 >= decl.range.lo) out.deltas.push_back(-1);
    if (z + 1 <= decl.range.hi) out.deltas.push_back(+1);
    const int n_alt = static_cast<int>(out.deltas.size());
    out.utilities.assign(n_alt, 0.0);
    if (want_effects) out.effects.assign(static_cast<std::size_t>(n_alt) * L, 0.0);

    NetworkState scratch = s;
    for (int a = 0; a < n_alt; ++a) {
      scratch.set_attr(h, i, z + out.deltas[a]);
      for (int e = 0; e < L; ++e) {
        const double val = effect_value(decl.effects[e], i, scratch);
        out.utilities[a] += params_.attr_weights[h][e] * val;
        if (want_effects) out.effects[static_cast<std::size_t>(a) * L + e] = val;
      }
    }
    out.probs = out.utilities;
    if (n_alt > 0) detail::softmax_inplace(out.probs);
  }

  std::vector<double> attribute_choice_probs(int i, int h,
                                             const NetworkState& s) const {
    AttrAlternatives alt;
    attribute_alternatives(i, h, s, alt);
    return alt.probs;
  }

  // Intensity of jumping from one state to another: nonzero only for states
  // one link toggle or one attribute unit apart; the diagonal is
  // -(total rate).
  double global_intensity(const NetworkState& from,
                          const NetworkState& to) const {
    if (from.n != to.n || from.n_attrs != to.n_attrs)
      throw std::invalid_argument("state shape mismatch");
    int link_i = -1, link_j = -1, link_diffs = 0;
    for (int i = 0; i < from.n && link_diffs < 2; ++i)
      for (int j = 0; j < from.n; ++j)
        if (i != j && from.link(i, j) != to.link(i, j)) {
          ++link_diffs;
          link_i = i;
          link_j = j;
          if (link_diffs >= 2) break;
        }
    int attr_h = -1, attr_i = -1, attr_delta = 0, attr_diffs = 0;
    for (int h = 0; h < from.n_attrs && attr_diffs < 2; ++h)
      for (int i = 0; i < from.n; ++i)
        if (from.attr(h, i) != to.attr(h, i)) {
          ++attr_diffs;
          attr_h = h;
          attr_i = i;
          attr_delta = to.attr(h, i) - from.attr(h, i);
          if (attr_diffs >= 2) break;
        }

    if (link_diffs == 0 && attr_diffs == 0) return -total_rate();
    if (link_diffs == 1 && attr_diffs == 0) {
      NetAlternatives alt;
      network_alternatives(link_i, from, alt);
      return net_rate(link_i) * alt.probs[alt.position_of(link_j, link_i)];
    }
    if (link_diffs == 0 && attr_diffs == 1 &&
        (attr_delta == 1 || attr_delta == -1)) {
      AttrAlternatives alt;
      attribute_alternatives(attr_i, attr_h, from, alt);
      for (std::size_t a = 0; a < alt.deltas.size(); ++a)
        if (alt.deltas[a] == attr_delta)
          return attr_rate(attr_i) * attribute_pick_prob() * alt.probs[a];
      return 0.0;
    }
    return 0.0;
  }

  // Conditional intensity matrix of link variable Y_ij given the rest of
  // the instantiation; row k is evaluated with y_ij forced to k.
  IntensityMatrix link_cim(int i, int j, const NetworkState& s) const {
    if (i == j) throw std::invalid_argument("no self links");
    IntensityMatrix q(2);
    NetworkState scratch = s;
    NetAlternatives alt;
    for (int k = 0; k < 2; ++k) {
      scratch.set_link(i, j, k != 0);
      network_alternatives(i, scratch, alt);
      const double rate = net_rate(i) * alt.probs[alt.position_of(j, i)];
      q.at(k, 1 - k) = rate;
      q.at(k, k) = -rate;
    }
    return q;
  }

  // Conditional intensity matrix of attribute variable Z_hi over its value
  // range; tridiagonal since only unit moves have nonzero intensity.
  IntensityMatrix attribute_cim(int h, int i, const NetworkState& s) const {
    const auto& range = skel_.attributes[h].range;
    IntensityMatrix q(range.size());
    NetworkState scratch = s;
    AttrAlternatives alt;
    for (int v = range.lo; v <= range.hi; ++v) {
      scratch.set_attr(h, i, v);
      attribute_alternatives(i, h, scratch, alt);
      const int row = v - range.lo;
      double leave = 0;
      for (std::size_t a = 0; a < alt.deltas.size(); ++a) {
        const double rate =
            attr_rate(i) * attribute_pick_prob() * alt.probs[a];
        q.at(row, row + alt.deltas[a]) = rate;
        leave += rate;
      }
      q.at(row, row) = -leave;
    }
    return q;
  }

  // Current intensity of leaving the present value of one variable.
  double variable_rate(const VariableId& v, const NetworkState& s) const {
    switch (v.kind) {
      case VarKind::Link: {
        NetAlternatives alt;
        network_alternatives(v.a, s, alt);
        return net_rate(v.a) * alt.probs[alt.position_of(v.b, v.a)];
      }
      case VarKind::Attribute:
        // feasible moves always renormalize to 1
        return attr_rate(v.b) * attribute_pick_prob();
      default:
        throw std::invalid_argument("model has no obs variables");
    }
  }

  // Variables whose current value enters v's conditional intensity matrix
  // under the current instantiation. Post-toggle evaluation of the choice
  // alternatives exposes every alternative's attributes, so a similarity
  // effect in the network utility makes Y_ij read every attribute; gating
  // by existing ties is exact only on the attribute-utility side.
  std::vector<VariableId> dependency_set(const VariableId& v,
                                         const NetworkState& s) const {
    std::set<VariableId> deps;
    const int n = n_actors();
    if (v.kind == VarKind::Link) {
      const int i = v.a;
      if (!skel_.network_effects.empty())
        for (int k = 0; k < n; ++k)
          if (k != i) deps.insert(VariableId::link(i, k));
      for (const auto& e : skel_.network_effects) {
        switch (e.kind) {
          case EffectKind::Reciprocity:
            for (int k = 0; k < n; ++k)
              if (k != i) deps.insert(VariableId::link(k, i));
            break;
          case EffectKind::Similarity:
            for (int k = 0; k < n; ++k)
              deps.insert(VariableId::attribute(e.attribute, k));
            break;
          case EffectKind::Activity:
            for (int k = 0; k < n; ++k)
              if (k != i)
                for (int l = 0; l < n; ++l)
                  if (l != k) deps.insert(VariableId::link(k, l));
            break;
          case EffectKind::Popularity:
            for (int l = 0; l < n; ++l)
              if (l != i)
                for (int m = 0; m < n; ++m)
                  if (m != l) deps.insert(VariableId::link(m, l));
            break;
          default:
            break;
        }
      }
    } else if (v.kind == VarKind::Attribute) {
      const int h = v.a;
      const int i = v.b;
      for (const auto& e : skel_.attributes[h].effects) {
        if (e.kind != EffectKind::Similarity) continue;
        for (int k = 0; k < n; ++k)
          if (k != i) deps.insert(VariableId::link(i, k));
        for (int k = 0; k < n; ++k)
          if (k != i && s.link(i, k))
            deps.insert(VariableId::attribute(e.attribute, k));
        if (e.attribute != h && s.out_degree(i) > 0)
          deps.insert(VariableId::attribute(e.attribute, i));
      }
    } else {
      deps.insert(VariableId::link(v.a, v.b));
      deps.insert(VariableId::link(v.b, v.a));
    }
    return {deps.begin(), deps.end()};
  }

  // Does actor `actor`'s network choice distribution read variable v?
  // Used to invalidate cached distributions; a superset of the exact reads
  // is allowed, a miss is not.
  bool net_choice_reads(int actor, const VariableId& v) const {
    if (v.kind == VarKind::Link) {
      if (v.a == actor) return true;
      for (const auto& e : skel_.network_effects) {
        if (e.kind == EffectKind::Reciprocity && v.b == actor) return true;
        if (e.kind == EffectKind::Activity) return true;
        if (e.kind == EffectKind::Popularity && v.b != actor) return true;
      }
      return false;
    }
    if (v.kind == VarKind::Attribute) {
      for (const auto& e : skel_.network_effects)
        if (e.kind == EffectKind::Similarity && e.attribute == v.a)
          return true;
      return false;
    }
    return false;
  }

  bool attr_choice_reads(int actor, int h, const VariableId& v,
                         const NetworkState& s) const {
    const auto& effects = skel_.attributes[h].effects;
    if (v.kind == VarKind::Link) {
      if (v.a != actor) return false;
      for (const auto& e : effects)
        if (e.kind == EffectKind::Similarity) return true;
      return false;
    }
    if (v.kind == VarKind::Attribute) {
      if (v.b == actor && v.a == h) return true;  // own value picks the row
      for (const auto& e : effects) {
        if (e.kind == EffectKind::Tendency && v.a == h && v.b == actor)
          return true;
        if (e.kind == EffectKind::Similarity && e.attribute == v.a) {
          if (v.b == actor) return true;
          if (s.link(actor, v.b)) return true;
        }
      }
      return false;
    }
    return false;
  }

 private:
  ModelSkeleton skel_;
  ModelParams params_;
};

// Per-actor choice distributions with dirty-flag invalidation driven by the
// model's dependency analysis.
class ChoiceCache {
 public:
  explicit ChoiceCache(const CoevolutionModel& model)
      : model_(&model),
        net_(model.n_actors()),
        net_dirty_(model.n_actors(), 1),
        attr_(static_cast<std::size_t>(model.n_actors()) *
              std::max(1, model.n_attributes())),
        attr_dirty_(attr_.size(), 1) {}

  void invalidate_all() {
    std::fill(net_dirty_.begin(), net_dirty_.end(), 1);
    std::fill(attr_dirty_.begin(), attr_dirty_.end(), 1);
  }

  // Call after applying a flip to the state.
  void notify_flip(const VariableId& v, const NetworkState& s) {
    const int n = model_->n_actors();
    const int H = model_->n_attributes();
    for (int i = 0; i < n; ++i)
      if (!net_dirty_[i] && model_->net_choice_reads(i, v)) net_dirty_[i] = 1;
    for (int i = 0; i < n; ++i)
      for (int h = 0; h < H; ++h) {
        auto& d = attr_dirty_[static_cast<std::size_t>(i) * H + h];
        if (!d && model_->attr_choice_reads(i, h, v, s)) d = 1;
      }
  }

  const NetAlternatives& net(int i, const NetworkState& s) {
    if (net_dirty_[i]) {
      model_->network_alternatives(i, s, net_[i]);
      net_dirty_[i] = 0;
    }
    return net_[i];
  }

  const AttrAlternatives& attr(int i, int h, const NetworkState& s) {
    const int H = model_->n_attributes();
    auto& slot = attr_[static_cast<std::size_t>(i) * H + h];
    auto& dirty = attr_dirty_[static_cast<std::size_t>(i) * H + h];
    if (dirty) {
      model_->attribute_alternatives(i, h, s, slot);
      dirty = 0;
    }
    return slot;
  }

  double link_rate(int i, int j, const NetworkState& s) {
    const auto& alt = net(i, s);
    return model_->net_rate(i) * alt.probs[alt.position_of(j, i)];
  }

 private:
  const CoevolutionModel* model_;
  std::vector<NetAlternatives> net_;
  std::vector<char> net_dirty_;
  std::vector<AttrAlternatives> attr_;
  std::vector<char> attr_dirty_;
};

}  // namespace ctsnet

#endif
