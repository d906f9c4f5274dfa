#pragma once

#include "segraph/segmentation.hpp"

#include <iosfwd>
#include <vector>

namespace segraph {

inline constexpr int kAllNeighbors = -1;

struct NodeRef {
  int segment_id = 0;
  BBox bbox;
  Vec3 centroid = Vec3::Zero();
  int label = kUnlabeled;
};

/// One node per retained segment; neighbors[i] is the ordered in-neighborhood
/// of node i, nearest centroid first, ties broken by lower node index.
struct SceneGraph {
  int frame_id = 0;
  std::vector<NodeRef> nodes;
  std::vector<std::vector<int>> neighbors;
  int k = kAllNeighbors;
  bool has_isolated = false;  // some node has an empty neighborhood

  int size() const { return static_cast<int>(nodes.size()); }
  int degree(int i) const { return static_cast<int>(neighbors[i].size()); }
};

/// Brute-force k-nearest-neighbor graph over segment centroids
/// (k = kAllNeighbors links every other node). Requires a non-empty set.
SceneGraph build_graph(const SegmentSet& set, int k);

/// Text dump: one `i : j1 j2 ... jk` line per node plus `# distances` comments.
void dump_graph(const SceneGraph& graph, std::ostream& out);

}  // namespace segraph
