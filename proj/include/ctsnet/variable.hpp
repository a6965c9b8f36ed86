#ifndef CTSNET_VARIABLE_HPP
#define CTSNET_VARIABLE_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctsnet {

enum class VarKind : std::uint8_t { Link = 0, Attribute = 1, Obs = 2 };

// Identity of one process variable: a directed link Y_ij, an actor
// attribute Z_hi, or a directed event-toggle O_ij.
struct VariableId {
  VarKind kind = VarKind::Link;
  std::int32_t a = 0;  // Link/Obs: source actor i; Attribute: attribute h
  std::int32_t b = 0;  // Link/Obs: target actor j; Attribute: actor i

  static VariableId link(int i, int j) {
    if (i == j) throw std::invalid_argument("link variable requires i != j");
    if (i < 0 || j < 0) throw std::invalid_argument("negative actor index");
    return VariableId{VarKind::Link, i, j};
  }
  static VariableId attribute(int h, int i) {
    if (h < 0 || i < 0) throw std::invalid_argument("negative index");
    return VariableId{VarKind::Attribute, h, i};
  }
  static VariableId obs(int i, int j) {
    if (i == j) throw std::invalid_argument("obs variable requires i != j");
    if (i < 0 || j < 0) throw std::invalid_argument("negative actor index");
    return VariableId{VarKind::Obs, i, j};
  }

  auto operator<=>(const VariableId&) const = default;
};

inline std::string to_string(const VariableId& v) {
  switch (v.kind) {
    case VarKind::Link:
      return "Y:" + std::to_string(v.a) + ":" + std::to_string(v.b);
    case VarKind::Attribute:
      return "Z:" + std::to_string(v.a) + ":" + std::to_string(v.b);
    case VarKind::Obs:
      return "O:" + std::to_string(v.a) + ":" + std::to_string(v.b);
  }
  return "?";
}

inline VariableId parse_variable(const std::string& s) {
  const auto c1 = s.find(':');
  const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("cannot parse variable id: " + s);
  const std::string tag = s.substr(0, c1);
  const int a = std::stoi(s.substr(c1 + 1, c2 - c1 - 1));
  const int b = std::stoi(s.substr(c2 + 1));
  if (tag == "Y") return VariableId::link(a, b);
  if (tag == "Z") return VariableId::attribute(a, b);
  if (tag == "O") return VariableId::obs(a, b);
  throw std::invalid_argument("unknown variable kind in: " + s);
}

// Dense indexing of the variables of an N-actor, H-attribute system, in
// ascending VariableId order: links Y_ij (by i then j), then attributes
// Z_hi (by h then i), then optionally obs O_ij.
class VariableLayout {
 public:
  VariableLayout() = default;
  VariableLayout(int n_actors, int n_attrs, bool with_obs = false)
      : n_(n_actors), h_(n_attrs), with_obs_(with_obs) {
    if (n_ < 1) throw std::invalid_argument("layout needs >= 1 actor");
    if (h_ < 0) throw std::invalid_argument("negative attribute count");
  }

  int n_actors() const { return n_; }
  int n_attributes() const { return h_; }
  bool with_obs() const { return with_obs_; }
  int n_links() const { return n_ * (n_ - 1); }
  int n_variables() const {
    return n_links() + h_ * n_ + (with_obs_ ? n_links() : 0);
  }

  int pair_index(int i, int j) const {
    check_actor(i);
    check_actor(j);
    if (i == j) throw std::invalid_argument("no variable for i == j");
    return i * (n_ - 1) + (j < i ? j : j - 1);
  }

  int index_of(const VariableId& v) const {
    switch (v.kind) {
      case VarKind::Link:
        return pair_index(v.a, v.b);
      case VarKind::Attribute:
        if (v.a < 0 || v.a >= h_) throw std::invalid_argument("bad attribute");
        check_actor(v.b);
        return n_links() + v.a * n_ + v.b;
      case VarKind::Obs:
        if (!with_obs_) throw std::invalid_argument("layout has no obs vars");
        return n_links() + h_ * n_ + pair_index(v.a, v.b);
    }
    throw std::invalid_argument("bad variable kind");
  }

  VariableId id_of(int index) const {
    if (index < 0 || index >= n_variables())
      throw std::out_of_range("variable index out of range");
    if (index < n_links()) {
      const int i = index / (n_ - 1);
      const int r = index % (n_ - 1);
      return VariableId::link(i, r < i ? r : r + 1);
    }
    index -= n_links();
    if (index < h_ * n_) return VariableId::attribute(index / n_, index % n_);
    index -= h_ * n_;
    const int i = index / (n_ - 1);
    const int r = index % (n_ - 1);
    return VariableId::obs(i, r < i ? r : r + 1);
  }

  std::vector<VariableId> all_variables() const {
    std::vector<VariableId> out;
    out.reserve(n_variables());
    for (int k = 0; k < n_variables(); ++k) out.push_back(id_of(k));
    return out;
  }

 private:
  void check_actor(int i) const {
    if (i < 0 || i >= n_) throw std::invalid_argument("actor out of range");
  }
  int n_ = 1;
  int h_ = 0;
  bool with_obs_ = false;
};

}  // namespace ctsnet

#endif
