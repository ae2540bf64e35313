#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace polyglue {

/// A point on a domain component, addressed by opaque labels.
struct SurfacePoint {
  std::string component;
  std::string point;

  auto operator<=>(const SurfacePoint&) const = default;
};

using NodePair = std::pair<SurfacePoint, SurfacePoint>;

/// Combinatorial model of a noded Riemann surface: domain components with
/// genus, marked points (ordered or unordered) and unordered nodal pairs.
/// An optional per-component energy decoration carries the symplectic area
/// used by the stable-map stability test.
class NodedSurface {
public:
  NodedSurface() = default;
  NodedSurface(bool ordered_marked,
               std::vector<std::pair<std::string, int>> components,
               std::vector<SurfacePoint> marked,
               std::vector<NodePair> nodes,
               std::map<std::string, double> energy = {});

  bool ordered_marked() const { return ordered_; }
  const std::vector<std::pair<std::string, int>>& components() const { return components_; }
  const std::vector<SurfacePoint>& marked() const { return marked_; }
  const std::vector<NodePair>& nodes() const { return nodes_; }
  const std::map<std::string, double>& energy() const { return energy_; }

  int genus_of(const std::string& component_id) const;
  /// Number of special points (marked + nodal endpoints) on a component.
  int special_point_count(const std::string& component_id) const;

  static NodedSurface from_json(const std::string& text);
  std::string to_json() const;

private:
  void validate() const;

  bool ordered_ = true;
  std::vector<std::pair<std::string, int>> components_;  // (id, genus)
  std::vector<SurfacePoint> marked_;
  std::vector<NodePair> nodes_;
  std::map<std::string, double> energy_;
};

/// g_a = 1 + #D + sum_C (g(C) - 1). Requires a connected surface.
int arithmetic_genus(const NodedSurface& s);

/// Connectivity of the multigraph with components as vertices and nodal
/// pairs as edges.
bool is_connected(const NodedSurface& s);

/// Without energy: 2 g(C) + #Sigma_C >= 3 on every component. With energy:
/// components failing that bound must carry positive energy instead.
bool is_stable(const NodedSurface& s);

/// Weeds out unstable sphere components (one node; two nodes; one node plus
/// one marked point) until the surface is stable. Preserves the arithmetic
/// genus, connectivity and the order of marked points. Ignores energy.
NodedSurface stabilize(const NodedSurface& s);

/// Removes the l-th marked point (0-based) and stabilizes.
NodedSurface forget_marked_point(const NodedSurface& s, std::size_t l);

/// Relabeling-invariant encoding: lexicographically minimal string over all
/// component relabelings compatible with genus, marked structure and node
/// incidence. Exhaustive within invariant classes; at most 8 components.
std::string canonical_form(const NodedSurface& s);

}  // namespace polyglue
