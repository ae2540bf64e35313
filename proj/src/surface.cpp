#include "polyglue/surface.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polyglue {

namespace {

NodePair make_pair_sorted(SurfacePoint a, SurfacePoint b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

}  // namespace

NodedSurface::NodedSurface(bool ordered_marked,
                           std::vector<std::pair<std::string, int>> components,
                           std::vector<SurfacePoint> marked,
                           std::vector<NodePair> nodes,
                           std::map<std::string, double> energy)
    : ordered_(ordered_marked),
      components_(std::move(components)),
      marked_(std::move(marked)),
      nodes_(std::move(nodes)),
      energy_(std::move(energy)) {
  for (auto& n : nodes_) n = make_pair_sorted(n.first, n.second);
  validate();
}

void NodedSurface::validate() const {
  std::set<std::string> ids;
  for (const auto& [id, g] : components_) {
    if (!ids.insert(id).second) throw std::invalid_argument("duplicate component id: " + id);
    if (g < 0) throw std::invalid_argument("negative genus on component " + id);
  }
  std::set<SurfacePoint> special;
  auto add_special = [&](const SurfacePoint& p, const char* what) {
    if (!ids.count(p.component))
      throw std::invalid_argument(std::string(what) + " references unknown component " + p.component);
    if (!special.insert(p).second)
      throw std::invalid_argument("special point reused: " + p.component + "/" + p.point);
  };
  for (const auto& m : marked_) add_special(m, "marked point");
  for (const auto& [x, y] : nodes_) {
    if (x == y) throw std::invalid_argument("nodal pair with identical endpoints");
    add_special(x, "nodal point");
    add_special(y, "nodal point");
  }
  for (const auto& [id, e] : energy_) {
    if (!ids.count(id)) throw std::invalid_argument("energy on unknown component " + id);
    if (e < 0.0) throw std::invalid_argument("negative energy on component " + id);
  }
}

int NodedSurface::genus_of(const std::string& component_id) const {
  for (const auto& [id, g] : components_)
    if (id == component_id) return g;
  throw std::invalid_argument("unknown component " + component_id);
}

int NodedSurface::special_point_count(const std::string& component_id) const {
  int n = 0;
  for (const auto& m : marked_)
    if (m.component == component_id) ++n;
  for (const auto& [x, y] : nodes_) {
    if (x.component == component_id) ++n;
    if (y.component == component_id) ++n;
  }
  return n;
}

int arithmetic_genus(const NodedSurface& s) {
  if (!is_connected(s)) throw std::domain_error("not connected");
  int g = 1 + static_cast<int>(s.nodes().size());
  for (const auto& [id, gc] : s.components()) g += gc - 1;
  return g;
}

bool is_connected(const NodedSurface& s) {
  const auto& comps = s.components();
  if (comps.empty()) return false;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < comps.size(); ++i) index[comps[i].first] = i;
  std::vector<std::size_t> parent(comps.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [x, y] : s.nodes()) parent[find(index[x.component])] = find(index[y.component]);
  const std::size_t root = find(0);
  for (std::size_t i = 1; i < comps.size(); ++i)
    if (find(i) != root) return false;
  return true;
}

bool is_stable(const NodedSurface& s) {
  for (const auto& [id, g] : s.components()) {
    if (2 * g + s.special_point_count(id) >= 3) continue;
    auto it = s.energy().find(id);
    if (s.energy().empty() || it == s.energy().end() || !(it->second > 0.0)) return false;
  }
  return true;
}

namespace {

struct WeedState {
  bool ordered;
  std::vector<std::pair<std::string, int>> components;
  std::vector<SurfacePoint> marked;
  std::vector<NodePair> nodes;
};

// Applies one weeding step to the first unstable component in ascending id
// order. Returns false when every component is stable.
bool weed_once(WeedState& st) {
  std::vector<std::string> order;
  for (const auto& [id, g] : st.components) order.push_back(id);
  std::sort(order.begin(), order.end());

  for (const auto& id : order) {
    int genus = 0;
    for (const auto& [cid, g] : st.components)
      if (cid == id) genus = g;

    std::vector<std::size_t> marked_here;
    for (std::size_t i = 0; i < st.marked.size(); ++i)
      if (st.marked[i].component == id) marked_here.push_back(i);

    std::vector<std::size_t> pairs_here;      // node indices with an endpoint on id
    int endpoints_here = 0;
    for (std::size_t i = 0; i < st.nodes.size(); ++i) {
      const auto& [x, y] = st.nodes[i];
      const bool xh = x.component == id, yh = y.component == id;
      if (xh || yh) pairs_here.push_back(i);
      endpoints_here += int(xh) + int(yh);
    }

    const int special = endpoints_here + static_cast<int>(marked_here.size());
    if (2 * genus + special >= 3) continue;

    if (genus != 0) throw std::logic_error("no weeding rule applies");

    auto erase_component = [&] {
      std::erase_if(st.components, [&](const auto& c) { return c.first == id; });
    };
    auto partner = [&](std::size_t node_idx) {
      const auto& [x, y] = st.nodes[node_idx];
      return x.component == id ? y : x;
    };

    if (endpoints_here == 1 && marked_here.empty()) {
      // Sphere with a single nodal point: drop the sphere and its pair.
      st.nodes.erase(st.nodes.begin() + pairs_here[0]);
      erase_component();
      return true;
    }
    if (endpoints_here == 2 && marked_here.empty()) {
      if (pairs_here.size() != 2) throw std::logic_error("no weeding rule applies");
      // Sphere joining two pairs: replace both by the direct pair {y, y'}.
      const SurfacePoint y1 = partner(pairs_here[0]);
      const SurfacePoint y2 = partner(pairs_here[1]);
      st.nodes.erase(st.nodes.begin() + pairs_here[1]);
      st.nodes.erase(st.nodes.begin() + pairs_here[0]);
      st.nodes.push_back(make_pair_sorted(y1, y2));
      erase_component();
      return true;
    }
    if (endpoints_here == 1 && marked_here.size() == 1) {
      // Sphere with one node and one marked point: the marked point moves to
      // the partner endpoint, keeping its order slot.
      const SurfacePoint y = partner(pairs_here[0]);
      st.nodes.erase(st.nodes.begin() + pairs_here[0]);
      st.marked[marked_here[0]] = y;
      erase_component();
      return true;
    }
    throw std::logic_error("no weeding rule applies");
  }
  return false;
}

}  // namespace

NodedSurface stabilize(const NodedSurface& s) {
  if (!is_connected(s)) throw std::domain_error("not connected");
  const int ga = arithmetic_genus(s);
  if (2 * ga + static_cast<int>(s.marked().size()) < 3) throw std::domain_error("unstabilizable");

  WeedState st{s.ordered_marked(), s.components(), s.marked(), s.nodes()};
  while (weed_once(st)) {
  }
  return NodedSurface(st.ordered, st.components, st.marked, st.nodes);
}

NodedSurface forget_marked_point(const NodedSurface& s, std::size_t l) {
  if (!s.ordered_marked()) throw std::invalid_argument("forget_marked_point: marked points not ordered");
  if (l >= s.marked().size()) throw std::out_of_range("forget_marked_point: invalid index");
  auto marked = s.marked();
  marked.erase(marked.begin() + l);
  NodedSurface trimmed(s.ordered_marked(), s.components(), marked, s.nodes());
  return stabilize(trimmed);
}

namespace {

struct CanonicalContext {
  const NodedSurface* s;
  std::vector<std::string> ids;  // component ids, class-sorted
};

std::string encode_with_order(const NodedSurface& s, const std::vector<std::string>& order) {
  std::map<std::string, int> rank;
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

  std::ostringstream out;
  out << "g:";
  for (const auto& id : order) out << s.genus_of(id) << ",";
  out << "|m:";
  if (s.ordered_marked()) {
    for (const auto& m : s.marked()) out << rank[m.component] << ",";
  } else {
    std::vector<int> where;
    for (const auto& m : s.marked()) where.push_back(rank[m.component]);
    std::sort(where.begin(), where.end());
    for (int w : where) out << w << ",";
  }
  out << "|n:";
  std::vector<std::pair<int, int>> edges;
  for (const auto& [x, y] : s.nodes()) {
    int a = rank[x.component], b = rank[y.component];
    if (b < a) std::swap(a, b);
    edges.emplace_back(a, b);
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) out << a << "-" << b << ",";
  return out.str();
}

}  // namespace

std::string canonical_form(const NodedSurface& s) {
  const std::size_t n = s.components().size();
  if (n > 8) throw std::invalid_argument("canonical_form: more than 8 components");

  // Invariant key per component; only components with equal keys may swap.
  auto key_of = [&](const std::string& id) {
    std::ostringstream k;
    k << s.genus_of(id) << ";";
    if (s.ordered_marked()) {
      for (std::size_t i = 0; i < s.marked().size(); ++i)
        if (s.marked()[i].component == id) k << i << ",";
    } else {
      int c = 0;
      for (const auto& m : s.marked())
        if (m.component == id) ++c;
      k << c;
    }
    k << ";";
    int deg = 0, loops = 0;
    for (const auto& [x, y] : s.nodes()) {
      deg += int(x.component == id) + int(y.component == id);
      loops += int(x.component == id && y.component == id);
    }
    k << deg << ";" << loops;
    return k.str();
  };

  std::vector<std::string> ids;
  for (const auto& [id, g] : s.components()) ids.push_back(id);
  std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) {
    const auto ka = key_of(a), kb = key_of(b);
    return ka != kb ? ka < kb : a < b;
  });

  // Class boundaries over the key-sorted ids.
  std::vector<std::pair<std::size_t, std::size_t>> classes;
  for (std::size_t i = 0; i < ids.size();) {
    std::size_t j = i + 1;
    while (j < ids.size() && key_of(ids[j]) == key_of(ids[i])) ++j;
    classes.emplace_back(i, j);
    i = j;
  }

  std::string best;
  std::vector<std::string> order = ids;
  // Enumerate the product of within-class permutations.
  auto rec = [&](auto&& self, std::size_t ci) -> void {
    if (ci == classes.size()) {
      std::string enc = encode_with_order(s, order);
      if (best.empty() || enc < best) best = std::move(enc);
      return;
    }
    auto [lo, hi] = classes[ci];
    std::sort(order.begin() + lo, order.begin() + hi);
    do {
      self(self, ci + 1);
    } while (std::next_permutation(order.begin() + lo, order.begin() + hi));
  };
  rec(rec, 0);
  return best;
}

NodedSurface NodedSurface::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<std::pair<std::string, int>> comps;
  for (const auto& c : j.at("components"))
    comps.emplace_back(c.at("id").get<std::string>(), c.at("genus").get<int>());
  std::vector<SurfacePoint> marked;
  if (j.contains("marked"))
    for (const auto& m : j["marked"])
      marked.push_back({m.at("component").get<std::string>(), m.at("point").get<std::string>()});
  std::vector<NodePair> nodes;
  if (j.contains("nodes"))
    for (const auto& nd : j["nodes"]) {
      if (nd.size() != 2) throw std::invalid_argument("node entry must have two endpoints");
      SurfacePoint a{nd[0].at("component").get<std::string>(), nd[0].at("point").get<std::string>()};
      SurfacePoint b{nd[1].at("component").get<std::string>(), nd[1].at("point").get<std::string>()};
      nodes.push_back({a, b});
    }
  std::map<std::string, double> energy;
  if (j.contains("energy") && !j["energy"].is_null())
    for (auto it = j["energy"].begin(); it != j["energy"].end(); ++it)
      energy[it.key()] = it.value().get<double>();
  const bool ordered = j.value("ordered", true);
  return NodedSurface(ordered, comps, marked, nodes, energy);
}

std::string NodedSurface::to_json() const {
  nlohmann::json j;
  j["ordered"] = ordered_;
  auto comps = components_;
  std::sort(comps.begin(), comps.end());
  j["components"] = nlohmann::json::array();
  for (const auto& [id, g] : comps) j["components"].push_back({{"id", id}, {"genus", g}});
  j["marked"] = nlohmann::json::array();
  auto marked = marked_;
  if (!ordered_) std::sort(marked.begin(), marked.end());
  for (const auto& m : marked)
    j["marked"].push_back({{"component", m.component}, {"point", m.point}});
  auto nodes = nodes_;
  std::sort(nodes.begin(), nodes.end());
  j["nodes"] = nlohmann::json::array();
  for (const auto& [x, y] : nodes)
    j["nodes"].push_back({{{"component", x.component}, {"point", x.point}},
                          {{"component", y.component}, {"point", y.point}}});
  if (!energy_.empty()) {
    nlohmann::json e;
    for (const auto& [id, v] : energy_) e[id] = v;
    j["energy"] = e;
  }
  return j.dump(2);
}

}  // namespace polyglue
