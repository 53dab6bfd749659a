#include "dsad/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

namespace dsad {

Graph Graph::from_adjacency(std::vector<std::vector<int>> adjacency) {
  Graph g;
  for (auto& list : adjacency) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  g.adjacency_ = std::move(adjacency);
  for (int l = 0; l < g.num_nodes(); ++l) {
    for (int j : g.adjacency_[l]) {
      if (j > l) g.edges_.push_back({l, j});
    }
  }
  return g;
}

Graph Graph::from_edges(int num_nodes, const std::vector<Edge>& edges) {
  if (num_nodes < 1) throw std::invalid_argument("graph needs at least one node");
  std::vector<std::vector<int>> adjacency(num_nodes);
  for (const Edge& e : edges) {
    if (e.first < 0 || e.second < 0 || e.first >= num_nodes || e.second >= num_nodes) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (e.first == e.second) throw std::invalid_argument("self-loop in edge list");
    adjacency[e.first].push_back(e.second);
    adjacency[e.second].push_back(e.first);
  }
  return from_adjacency(std::move(adjacency));
}

GraphReport validate(const Graph& graph) {
  const int n = graph.num_nodes();
  if (n < 1) return {false, "empty graph"};
  std::size_t degree_sum = 0;
  for (int l = 0; l < n; ++l) {
    for (int j : graph.neighbors(l)) {
      if (j < 0 || j >= n) {
        return {false, "neighbor index out of range at node " + std::to_string(l + 1)};
      }
      if (j == l) return {false, "self-loop at node " + std::to_string(l + 1)};
      const auto& back = graph.neighbors(j);
      if (!std::binary_search(back.begin(), back.end(), l)) {
        return {false, "asymmetry: " + std::to_string(j + 1) + " in N(" +
                           std::to_string(l + 1) + ") but not the reverse"};
      }
    }
    degree_sum += graph.neighbors(l).size();
  }
  if (degree_sum != 2 * graph.num_edges()) return {false, "edge list inconsistent with adjacency"};
  for (std::size_t e = 0; e < graph.num_edges(); ++e) {
    const Edge& edge = graph.edges()[e];
    if (edge.first >= edge.second) return {false, "edge list entry not ordered"};
    if (e > 0 && !(graph.edges()[e - 1] < edge)) return {false, "edge list not sorted"};
  }

  std::vector<char> seen(n, 0);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    const int l = frontier.front();
    frontier.pop();
    for (int j : graph.neighbors(l)) {
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        frontier.push(j);
      }
    }
  }
  if (reached != n) return {false, "disconnected"};
  return {};
}

Graph random_geometric_graph(int num_nodes, double side, double radius, int degree_min,
                             int degree_max, std::uint64_t seed) {
  if (num_nodes < 2) throw std::invalid_argument("geometric graph needs L >= 2");
  if (!(radius > 0.0) || !(side > 0.0)) throw std::invalid_argument("side and radius must be positive");
  if (degree_min < 1 || degree_min > degree_max || degree_max >= num_nodes) {
    throw std::invalid_argument("degree bounds must satisfy 1 <= min <= max < L");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(0.0, side);
  int disconnected = 0;
  int too_sparse = 0;
  int too_dense = 0;
  for (int attempt = 0; attempt < kTopologyAttempts; ++attempt) {
    std::vector<Point2> points(num_nodes);
    for (auto& p : points) {
      p.x = coord(rng);
      p.y = coord(rng);
    }
    std::vector<Edge> edges;
    for (int l = 0; l < num_nodes; ++l) {
      for (int j = l + 1; j < num_nodes; ++j) {
        if (std::hypot(points[l].x - points[j].x, points[l].y - points[j].y) <= radius) {
          edges.push_back({l, j});
        }
      }
    }
    Graph g = Graph::from_edges(num_nodes, edges);
    bool degree_ok = true;
    for (int l = 0; l < num_nodes; ++l) {
      if (g.degree(l) < degree_min) {
        ++too_sparse;
        degree_ok = false;
        break;
      }
      if (g.degree(l) > degree_max) {
        ++too_dense;
        degree_ok = false;
        break;
      }
    }
    if (!degree_ok) continue;
    if (!validate(g).ok) {
      ++disconnected;
      continue;
    }
    g.set_coordinates(std::move(points));
    return g;
  }

  std::ostringstream msg;
  msg << "no feasible geometric topology after " << kTopologyAttempts << " placements: ";
  if (too_sparse >= too_dense && too_sparse >= disconnected) {
    msg << "degree >= " << degree_min << " violated most often";
  } else if (too_dense >= disconnected) {
    msg << "degree <= " << degree_max << " violated most often";
  } else {
    msg << "connectivity violated most often";
  }
  throw InfeasibleTopology(msg.str());
}

Graph complete_graph(int num_nodes) {
  if (num_nodes < 2) throw std::invalid_argument("complete graph needs L >= 2");
  std::vector<Edge> edges;
  for (int l = 0; l < num_nodes; ++l) {
    for (int j = l + 1; j < num_nodes; ++j) edges.push_back({l, j});
  }
  return Graph::from_edges(num_nodes, edges);
}

Graph path_graph(int num_nodes) {
  if (num_nodes < 2) throw std::invalid_argument("path graph needs L >= 2");
  std::vector<Edge> edges;
  for (int l = 0; l + 1 < num_nodes; ++l) edges.push_back({l, l + 1});
  return Graph::from_edges(num_nodes, edges);
}

void write_edge_list(std::ostream& out, const Graph& graph) {
  out << graph.num_nodes() << '\n';
  for (const Edge& e : graph.edges()) out << e.first + 1 << ' ' << e.second + 1 << '\n';
}

Graph read_edge_list(std::istream& in) {
  int num_nodes = 0;
  if (!(in >> num_nodes) || num_nodes < 1) throw std::runtime_error("edge list: bad node count");
  std::vector<Edge> edges;
  int a = 0;
  int b = 0;
  while (in >> a >> b) {
    if (a < 1 || b < 1 || a > num_nodes || b > num_nodes) {
      throw std::runtime_error("edge list: node index out of range");
    }
    edges.push_back({std::min(a, b) - 1, std::max(a, b) - 1});
  }
  if (!in.eof()) throw std::runtime_error("edge list: malformed line");
  return Graph::from_edges(num_nodes, edges);
}

void save_edge_list(const std::filesystem::path& path, const Graph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_edge_list(out, graph);
}

Graph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_edge_list(in);
}

}  // namespace dsad
