#pragma once

#include "afem/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace afem {

enum class EdgeLabel { interior, dirichlet, neumann };
enum class VertexLabel { interior, dirichlet, neumann };

/// An edge F with its fixed orientation: n_F is the outward normal of K⁻ on F,
/// t_F = rot90(n_F), and e_F - s_F = h_F t_F.
struct Edge {
  int s = -1;
  int e = -1;
  int minus = -1;  // K⁻
  int plus = -1;   // K⁺, -1 on the boundary
  EdgeLabel label = EdgeLabel::interior;
  Vec2 normal = Vec2::Zero();
  Vec2 tangent = Vec2::Zero();
  Vec2 midpoint = Vec2::Zero();
  double length = 0.0;

  bool interior() const { return label == EdgeLabel::interior; }
};

/// T_F and E_{b,F} for an edge F; the patch domain ω_F is the union of `elements`.
struct EdgePatch {
  int edge = -1;
  std::vector<int> elements;
  std::vector<int> boundary_edges;
};

inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

/// Returns the label of the boundary edge (a, b), or nothing if it has none.
using BoundaryLabeler =
    std::function<std::optional<EdgeLabel>(int a, int b, const Vec2& pa, const Vec2& pb)>;

struct MeshBuildOptions {
  /// Preferred (s, e) order of interior edges keyed by edge_key; edges not
  /// listed get K⁻ = the lower triangle id.
  std::unordered_map<std::uint64_t, std::array<int, 2>> orientation;
};

class Mesh;
Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                std::vector<int> regions, const BoundaryLabeler& labeler,
                const MeshBuildOptions& options = {});

/// Conforming triangulation with oriented edge topology. Triangles are
/// counterclockwise; local vertex 0 is the newest vertex, so local edge 0 is
/// the refinement edge. Local edge k is opposite local vertex k.
class Mesh {
public:
  Mesh() = default;

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_triangles() const { return static_cast<int>(triangles_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const Vec2& vertex(int v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[static_cast<std::size_t>(t)]; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  int region(int t) const { return regions_[static_cast<std::size_t>(t)]; }
  const std::vector<int>& regions() const { return regions_; }
  const std::array<int, 3>& triangle_edges(int t) const { return tri_edges_[static_cast<std::size_t>(t)]; }
  const Edge& edge(int f) const { return edges_[static_cast<std::size_t>(f)]; }
  const std::vector<Edge>& edges() const { return edges_; }
  double area(int t) const { return areas_[static_cast<std::size_t>(t)]; }
  double diameter(int t) const { return diameters_[static_cast<std::size_t>(t)]; }
  VertexLabel vertex_label(int v) const { return vertex_labels_[static_cast<std::size_t>(v)]; }

  std::array<Vec2, 3> coords(int t) const {
    const auto& tr = triangle(t);
    return {vertex(tr[0]), vertex(tr[1]), vertex(tr[2])};
  }
  Vec2 centroid(int t) const {
    const auto x = coords(t);
    return (x[0] + x[1] + x[2]) / 3.0;
  }

  /// Local index k of edge f in triangle t (f is opposite local vertex k).
  int local_edge(int t, int f) const {
    const auto& te = triangle_edges(t);
    for (int k = 0; k < 3; ++k)
      if (te[static_cast<std::size_t>(k)] == f) return k;
    throw Error("edge " + std::to_string(f) + " is not an edge of triangle " + std::to_string(t));
  }

  /// Local vertex index of global vertex v in triangle t.
  int local_vertex(int t, int v) const {
    const auto& tr = triangle(t);
    for (int k = 0; k < 3; ++k)
      if (tr[static_cast<std::size_t>(k)] == v) return k;
    throw Error("vertex " + std::to_string(v) + " is not a vertex of triangle " + std::to_string(t));
  }

  /// +1 if t is K⁻ of f, -1 if t is K⁺.
  double side_sign(int t, int f) const { return edge(f).minus == t ? 1.0 : -1.0; }

  std::optional<int> find_edge(int a, int b) const {
    const auto it = edge_index_.find(edge_key(a, b));
    if (it == edge_index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<int> edges_with_label(EdgeLabel label) const {
    std::vector<int> out;
    for (int f = 0; f < num_edges(); ++f)
      if (edge(f).label == label) out.push_back(f);
    return out;
  }

  double total_area() const {
    double s = 0.0;
    for (double a : areas_) s += a;
    return s;
  }

private:
  friend Mesh build_mesh(std::vector<Vec2>, std::vector<std::array<int, 3>>, std::vector<int>,
                         const BoundaryLabeler&, const MeshBuildOptions&);

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<int> regions_;
  std::vector<std::array<int, 3>> tri_edges_;
  std::vector<Edge> edges_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
  std::vector<VertexLabel> vertex_labels_;
  std::unordered_map<std::uint64_t, int> edge_index_;
};

inline Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                       std::vector<int> regions, const BoundaryLabeler& labeler,
                       const MeshBuildOptions& options) {
  const int nv = static_cast<int>(vertices.size());
  const int nt = static_cast<int>(triangles.size());
  require(nt > 0, "mesh has no triangles");
  if (regions.empty()) regions.assign(static_cast<std::size_t>(nt), 0);
  require(static_cast<int>(regions.size()) == nt, "region list does not match triangle count");

  Mesh m;
  m.areas_.resize(static_cast<std::size_t>(nt));
  m.diameters_.resize(static_cast<std::size_t>(nt));
  for (int t = 0; t < nt; ++t) {
    auto& tr = triangles[static_cast<std::size_t>(t)];
    for (int v : tr)
      require(v >= 0 && v < nv, "triangle " + std::to_string(t) + " references invalid vertex");
    require(tr[0] != tr[1] && tr[1] != tr[2] && tr[0] != tr[2],
            "triangle " + std::to_string(t) + " has repeated vertices");
    const Vec2& a = vertices[static_cast<std::size_t>(tr[0])];
    const Vec2& b = vertices[static_cast<std::size_t>(tr[1])];
    const Vec2& c = vertices[static_cast<std::size_t>(tr[2])];
    double det = cross(b - a, c - a);
    const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), (c - b).squaredNorm()});
    if (std::abs(det) <= 1e-14 * scale)
      throw Error("triangle " + std::to_string(t) + " has zero area");
    if (det < 0) {
      std::swap(tr[1], tr[2]);  // keeps the newest vertex in slot 0
      det = -det;
    }
    m.areas_[static_cast<std::size_t>(t)] = 0.5 * det;
    m.diameters_[static_cast<std::size_t>(t)] = std::sqrt(scale);
  }

  // Directed half-edges: for local edge k of t, the CCW traversal is v[k+1] -> v[k+2].
  struct Incidence {
    int t;
    int k;
  };
  std::unordered_map<std::uint64_t, std::vector<Incidence>> incident;
  incident.reserve(static_cast<std::size_t>(3 * nt));
  std::vector<std::uint64_t> order;  // first-seen order for deterministic edge ids
  order.reserve(static_cast<std::size_t>(2 * nt + nv));
  for (int t = 0; t < nt; ++t) {
    const auto& tr = triangles[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      const int a = tr[static_cast<std::size_t>((k + 1) % 3)];
      const int b = tr[static_cast<std::size_t>((k + 2) % 3)];
      auto& list = incident[edge_key(a, b)];
      if (list.empty()) order.push_back(edge_key(a, b));
      list.push_back({t, k});
      if (list.size() > 2)
        throw Error("non-manifold edge (" + std::to_string(a) + ", " + std::to_string(b) +
                    ") shared by more than two triangles");
    }
  }

  m.tri_edges_.assign(static_cast<std::size_t>(nt), {-1, -1, -1});
  m.edges_.reserve(order.size());
  m.edge_index_.reserve(order.size());
  auto directed = [&](const Incidence& inc) {
    const auto& tr = triangles[static_cast<std::size_t>(inc.t)];
    return std::array<int, 2>{tr[static_cast<std::size_t>((inc.k + 1) % 3)],
                              tr[static_cast<std::size_t>((inc.k + 2) % 3)]};
  };
  for (const auto key : order) {
    const auto& list = incident[key];
    Edge e;
    Incidence minus = list[0];
    if (list.size() == 2) {
      const auto d0 = directed(list[0]);
      const auto d1 = directed(list[1]);
      if (d0[0] == d1[0])
        throw Error("inconsistently oriented triangles " + std::to_string(list[0].t) + " and " +
                    std::to_string(list[1].t));
      const auto hint = options.orientation.find(key);
      if (hint != options.orientation.end()) {
        minus = (d0 == hint->second) ? list[0] : list[1];
      } else {
        minus = list[0].t < list[1].t ? list[0] : list[1];
      }
      const Incidence plus = (minus.t == list[0].t) ? list[1] : list[0];
      e.plus = plus.t;
      e.label = EdgeLabel::interior;
    } else {
      const auto d = directed(list[0]);
      const auto lab = labeler ? labeler(d[0], d[1], vertices[static_cast<std::size_t>(d[0])],
                                         vertices[static_cast<std::size_t>(d[1])])
                               : std::nullopt;
      if (!lab || *lab == EdgeLabel::interior)
        throw Error("boundary edge (" + std::to_string(d[0]) + ", " + std::to_string(d[1]) +
                    ") has no Dirichlet/Neumann label");
      e.label = *lab;
    }
    e.minus = minus.t;
    const auto d = directed(minus);
    e.s = d[0];
    e.e = d[1];
    const Vec2 ps = vertices[static_cast<std::size_t>(e.s)];
    const Vec2 pe = vertices[static_cast<std::size_t>(e.e)];
    e.length = (pe - ps).norm();
    e.tangent = (pe - ps) / e.length;
    e.normal = Vec2(e.tangent.y(), -e.tangent.x());  // t = rot90(n)
    e.midpoint = 0.5 * (ps + pe);
    const int id = static_cast<int>(m.edges_.size());
    m.edges_.push_back(e);
    m.edge_index_.emplace(key, id);
    for (const auto& inc : list)
      m.tri_edges_[static_cast<std::size_t>(inc.t)][static_cast<std::size_t>(inc.k)] = id;
  }

  m.vertex_labels_.assign(static_cast<std::size_t>(nv), VertexLabel::interior);
  bool has_dirichlet = false;
  for (const auto& e : m.edges_) {
    if (e.label == EdgeLabel::neumann) {
      for (int v : {e.s, e.e})
        if (m.vertex_labels_[static_cast<std::size_t>(v)] == VertexLabel::interior)
          m.vertex_labels_[static_cast<std::size_t>(v)] = VertexLabel::neumann;
    }
  }
  for (const auto& e : m.edges_) {
    if (e.label == EdgeLabel::dirichlet) {
      has_dirichlet = true;
      m.vertex_labels_[static_cast<std::size_t>(e.s)] = VertexLabel::dirichlet;
      m.vertex_labels_[static_cast<std::size_t>(e.e)] = VertexLabel::dirichlet;
    }
  }
  require(has_dirichlet, "the Dirichlet boundary must be nonempty");

  m.vertices_ = std::move(vertices);
  m.triangles_ = std::move(triangles);
  m.regions_ = std::move(regions);
  return m;
}

inline BoundaryLabeler all_dirichlet() {
  return [](int, int, const Vec2&, const Vec2&) { return std::optional<EdgeLabel>(EdgeLabel::dirichlet); };
}

inline EdgePatch edge_patch(const Mesh& mesh, int f) {
  EdgePatch p;
  p.edge = f;
  const Edge& e = mesh.edge(f);
  p.elements.push_back(e.minus);
  if (e.plus >= 0) p.elements.push_back(e.plus);
  for (int t : p.elements)
    for (int g : mesh.triangle_edges(t))
      if (g != f) p.boundary_edges.push_back(g);
  return p;
}

/// Rotates each triangle so that local vertex 0 is opposite its longest edge
/// (ties go to the lowest local index), fixing the initial refinement edges.
inline void orient_longest_edge_first(const std::vector<Vec2>& vertices,
                                      std::vector<std::array<int, 3>>& triangles) {
  for (auto& tr : triangles) {
    int best = 0;
    double best_len = -1.0;
    for (int k = 0; k < 3; ++k) {
      const double len = (vertices[static_cast<std::size_t>(tr[static_cast<std::size_t>((k + 1) % 3)])] -
                          vertices[static_cast<std::size_t>(tr[static_cast<std::size_t>((k + 2) % 3)])])
                             .norm();
      if (len > best_len * (1.0 + 1e-12)) {
        best = k;
        best_len = len;
      }
    }
    std::rotate(tr.begin(), tr.begin() + best, tr.end());
  }
}

/// Structured n x n grid of [x0,x1] x [y0,y1], each cell split along its
/// lower-left to upper-right diagonal; initial refinement edges are the diagonals.
inline Mesh rectangle_mesh(double x0, double y0, double x1, double y1, int n,
                           const std::function<int(const Vec2&)>& region_of,
                           const BoundaryLabeler& labeler) {
  require(n >= 1, "rectangle_mesh: n must be positive");
  std::vector<Vec2> verts;
  verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      verts.emplace_back(x0 + (x1 - x0) * i / n, y0 + (y1 - y0) * j / n);
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  std::vector<int> regions;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  for (const auto& tr : tris) {
    const Vec2 c = (verts[static_cast<std::size_t>(tr[0])] + verts[static_cast<std::size_t>(tr[1])] +
                    verts[static_cast<std::size_t>(tr[2])]) / 3.0;
    regions.push_back(region_of ? region_of(c) : 0);
  }
  orient_longest_edge_first(verts, tris);
  return build_mesh(std::move(verts), std::move(tris), std::move(regions), labeler);
}

/// Quadrant index of a point: 0 = (0,1)^2, then counterclockwise.
inline int quadrant_of(const Vec2& p) {
  const bool right = p.x() > 0.0;
  const bool top = p.y() > 0.0;
  return right ? (top ? 0 : 3) : (top ? 1 : 2);
}

/// Uniform n x n grid of (-1,1)^2 with the axes as mesh lines. Region ids are
/// quadrant indices; all boundary edges are Dirichlet.
inline Mesh initial_kellogg_mesh(int n) {
  require(n >= 2, "initial_kellogg_mesh: n must be at least 2");
  require(n % 2 == 0, "initial_kellogg_mesh: n must be even so the axes are mesh lines");
  return rectangle_mesh(-1.0, -1.0, 1.0, 1.0, n, quadrant_of, all_dirichlet());
}

/// Smallest interior angle over all triangles (radians).
inline double min_angle(const Mesh& mesh) {
  double best = M_PI;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto x = mesh.coords(t);
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = x[static_cast<std::size_t>((k + 1) % 3)] - x[static_cast<std::size_t>(k)];
      const Vec2 b = x[static_cast<std::size_t>((k + 2) % 3)] - x[static_cast<std::size_t>(k)];
      best = std::min(best, std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0)));
    }
  }
  return best;
}

} // namespace afem
