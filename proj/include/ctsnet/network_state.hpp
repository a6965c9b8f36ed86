#ifndef CTSNET_NETWORK_STATE_HPP
#define CTSNET_NETWORK_STATE_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctsnet/variable.hpp"

namespace ctsnet {

struct AttributeRange {
  int lo = 0;
  int hi = 0;
  int span() const { return hi - lo; }
  int size() const { return hi - lo + 1; }
  bool contains(int v) const { return v >= lo && v <= hi; }
  bool operator==(const AttributeRange&) const = default;
};

// Instantaneous state of the system: directed binary adjacency y plus
// integer attribute vectors z with declared value ranges. The diagonal of
// y is unused and kept at 0.
struct NetworkState {
  int n = 0;
  int n_attrs = 0;
  std::vector<std::uint8_t> y;          // n*n row-major
  std::vector<int> z;                   // n_attrs*n, z[h*n + i]
  std::vector<AttributeRange> ranges;   // per attribute

  NetworkState() = default;
  NetworkState(int n_actors, std::vector<AttributeRange> attr_ranges)
      : n(n_actors),
        n_attrs(static_cast<int>(attr_ranges.size())),
        y(static_cast<std::size_t>(n_actors) * n_actors, 0),
        z(static_cast<std::size_t>(attr_ranges.size()) * n_actors, 0),
        ranges(std::move(attr_ranges)) {
    if (n < 1) throw std::invalid_argument("state needs >= 1 actor");
    for (const auto& r : ranges) {
      if (r.hi <= r.lo)
        throw std::invalid_argument("attribute range must have hi > lo");
    }
    for (int h = 0; h < n_attrs; ++h)
      for (int i = 0; i < n; ++i) z[h * n + i] = ranges[h].lo;
  }

  bool link(int i, int j) const { return y[i * n + j] != 0; }
  void set_link(int i, int j, bool v) {
    if (i == j) throw std::invalid_argument("no self links");
    y[i * n + j] = v ? 1 : 0;
  }
  void toggle_link(int i, int j) { set_link(i, j, !link(i, j)); }

  int attr(int h, int i) const { return z[h * n + i]; }
  void set_attr(int h, int i, int v) {
    if (!ranges[h].contains(v))
      throw std::out_of_range("attribute value outside declared range");
    z[h * n + i] = v;
  }

  int out_degree(int i) const {
    int d = 0;
    for (int j = 0; j < n; ++j) d += y[i * n + j];
    return d;
  }
  int in_degree(int j) const {
    int d = 0;
    for (int i = 0; i < n; ++i) d += y[i * n + j];
    return d;
  }

  // 1 - |z_hi - z_hj| / span(h)
  double similarity(int h, int i, int j) const {
    const int d = attr(h, i) - attr(h, j);
    return 1.0 - static_cast<double>(d < 0 ? -d : d) / ranges[h].span();
  }

  int value_of(const VariableId& v) const {
    switch (v.kind) {
      case VarKind::Link:
        return link(v.a, v.b) ? 1 : 0;
      case VarKind::Attribute:
        return attr(v.a, v.b);
      default:
        throw std::invalid_argument("state holds no obs variables");
    }
  }
  void set_value(const VariableId& v, int value) {
    switch (v.kind) {
      case VarKind::Link:
        if (value != 0 && value != 1)
          throw std::out_of_range("link value must be 0 or 1");
        set_link(v.a, v.b, value != 0);
        return;
      case VarKind::Attribute:
        set_attr(v.a, v.b, value);
        return;
      default:
        throw std::invalid_argument("state holds no obs variables");
    }
  }

  bool operator==(const NetworkState&) const = default;
};

}  // namespace ctsnet

#endif
