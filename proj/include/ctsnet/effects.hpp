#ifndef CTSNET_EFFECTS_HPP
#define CTSNET_EFFECTS_HPP

#include <stdexcept>
#include <string>

#include "ctsnet/network_state.hpp"

namespace ctsnet {

enum class EffectKind {
  Density,      // sum_j y_ij
  Reciprocity,  // sum_j y_ij y_ji
  Similarity,   // sum_j y_ij (1 - |z_i - z_j| / span)
  Tendency,     // z_i
  Activity,     // sum_j y_ij sum_k y_jk
  Popularity,   // sum_j y_ij sum_k y_kj
};

struct EffectSpec {
  EffectKind kind = EffectKind::Density;
  int attribute = -1;  // Similarity: which attribute; Tendency: own attribute

  bool needs_attribute() const {
    return kind == EffectKind::Similarity || kind == EffectKind::Tendency;
  }
  bool network_only() const {
    return kind == EffectKind::Density || kind == EffectKind::Reciprocity ||
           kind == EffectKind::Activity || kind == EffectKind::Popularity;
  }
};

inline const char* to_string(EffectKind k) {
  switch (k) {
    case EffectKind::Density: return "density";
    case EffectKind::Reciprocity: return "reciprocity";
    case EffectKind::Similarity: return "similarity";
    case EffectKind::Tendency: return "tendency";
    case EffectKind::Activity: return "activity";
    case EffectKind::Popularity: return "popularity";
  }
  return "?";
}

inline EffectKind parse_effect_kind(const std::string& s) {
  if (s == "density") return EffectKind::Density;
  if (s == "reciprocity") return EffectKind::Reciprocity;
  if (s == "similarity") return EffectKind::Similarity;
  if (s == "tendency") return EffectKind::Tendency;
  if (s == "activity") return EffectKind::Activity;
  if (s == "popularity") return EffectKind::Popularity;
  throw std::invalid_argument("unknown effect kind: " + s);
}

// Value of one effect from actor i's point of view, evaluated on the given
// state. Utilities are weighted sums of these.
inline double effect_value(const EffectSpec& spec, int i,
                           const NetworkState& s) {
  switch (spec.kind) {
    case EffectKind::Density:
      return s.out_degree(i);
    case EffectKind::Reciprocity: {
      int r = 0;
      for (int j = 0; j < s.n; ++j)
        if (j != i && s.link(i, j) && s.link(j, i)) ++r;
      return r;
    }
    case EffectKind::Similarity: {
      double v = 0;
      for (int j = 0; j < s.n; ++j)
        if (j != i && s.link(i, j)) v += s.similarity(spec.attribute, i, j);
      return v;
    }
    case EffectKind::Tendency:
      return s.attr(spec.attribute, i);
    case EffectKind::Activity: {
      int v = 0;
      for (int j = 0; j < s.n; ++j)
        if (j != i && s.link(i, j)) v += s.out_degree(j);
      return v;
    }
    case EffectKind::Popularity: {
      int v = 0;
      for (int j = 0; j < s.n; ++j)
        if (j != i && s.link(i, j)) v += s.in_degree(j);
      return v;
    }
  }
  throw std::invalid_argument("bad effect kind");
}

}  // namespace ctsnet

#endif
