#include "segraph/scene_graph.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace segraph {

SceneGraph build_graph(const SegmentSet& set, int k) {
  if (set.segments.empty()) throw std::runtime_error("build_graph: empty segment set");
  SceneGraph g;
  g.frame_id = set.frame_id;
  g.k = k;
  const int n = set.size();
  g.nodes.reserve(n);
  for (const Segment& s : set.segments) {
    g.nodes.push_back({s.id, s.bbox, s.centroid, s.majority_label});
  }

  g.neighbors.resize(n);
  std::vector<std::pair<Scalar, int>> order;
  for (int i = 0; i < n; ++i) {
    order.clear();
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      order.emplace_back((g.nodes[i].centroid - g.nodes[j].centroid).norm(), j);
    }
    std::sort(order.begin(), order.end());  // pair order breaks distance ties by index
    const int take = k == kAllNeighbors ? n - 1 : std::min(k, n - 1);
    g.neighbors[i].reserve(take);
    for (int t = 0; t < take; ++t) g.neighbors[i].push_back(order[t].second);
    if (g.neighbors[i].empty()) g.has_isolated = true;
  }
  return g;
}

void dump_graph(const SceneGraph& graph, std::ostream& out) {
  out << "# scene graph, k=" << (graph.k == kAllNeighbors ? std::string("all") : std::to_string(graph.k)) << "\n";
  for (int i = 0; i < graph.size(); ++i) {
    out << i << " :";
    for (int j : graph.neighbors[i]) out << " " << j;
    out << "\n# distances:";
    for (int j : graph.neighbors[i]) {
      out << " " << (graph.nodes[i].centroid - graph.nodes[j].centroid).norm();
    }
    out << "\n";
  }
}

}  // namespace segraph
