#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsad {

/// Undirected edge between nodes `first < second` (0-based).
struct Edge {
  int first;
  int second;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Point2 {
  double x;
  double y;
};

/// Undirected agent network. Node indices are 0-based in memory and 1-based
/// in the edge-list file format.
///
/// A Graph built with from_adjacency() is stored as given so that validate()
/// can report defects; the other factories always produce valid graphs.
class Graph {
 public:
  Graph() = default;

  /// Sorts and de-duplicates each neighbour list but does no other checks.
  static Graph from_adjacency(std::vector<std::vector<int>> adjacency);
  /// Symmetric graph on `num_nodes` vertices. Throws on out-of-range or
  /// self-loop edges.
  static Graph from_edges(int num_nodes, const std::vector<Edge>& edges);

  int num_nodes() const { return static_cast<int>(adjacency_.size()); }
  const std::vector<int>& neighbors(int node) const { return adjacency_.at(node); }
  int degree(int node) const { return static_cast<int>(adjacency_.at(node).size()); }
  /// Edges (l, j) with l < j taken from each node's list, lexicographic.
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Point2>& coordinates() const { return coordinates_; }
  void set_coordinates(std::vector<Point2> coords) { coordinates_ = std::move(coords); }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.adjacency_ == b.adjacency_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::vector<int>> adjacency_;
  std::vector<Edge> edges_;
  std::vector<Point2> coordinates_;
};

struct GraphReport {
  bool ok = true;
  std::string violation;  // first violated property, empty when ok
};

GraphReport validate(const Graph& graph);

class InfeasibleTopology : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kTopologyAttempts = 10000;

/// Uniform placement in [0, side]^2 with an edge iff distance <= radius.
/// Whole placements are resampled until the graph is connected and every
/// degree lies in [degree_min, degree_max].
Graph random_geometric_graph(int num_nodes, double side, double radius, int degree_min,
                             int degree_max, std::uint64_t seed);

Graph complete_graph(int num_nodes);
Graph path_graph(int num_nodes);

// Edge-list text format: first line L, then one "l j" pair per line (1-based).
void write_edge_list(std::ostream& out, const Graph& graph);
Graph read_edge_list(std::istream& in);
void save_edge_list(const std::filesystem::path& path, const Graph& graph);
Graph load_edge_list(const std::filesystem::path& path);

}  // namespace dsad
