#pragma once

#include "afem/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace afem {

// Plain-text mesh format:
//   V T E
//   x y                    (V lines)
//   v0 v1 v2 region        (T lines)
//   va vb D|N              (E boundary-edge lines)

inline void write_mesh(const Mesh& mesh, std::ostream& os) {
  const auto bnd = [&] {
    std::vector<int> b;
    for (int f = 0; f < mesh.num_edges(); ++f)
      if (!mesh.edge(f).interior()) b.push_back(f);
    return b;
  }();
  os << mesh.num_vertices() << ' ' << mesh.num_triangles() << ' ' << bnd.size() << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices()) os << v.x() << ' ' << v.y() << '\n';
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tr = mesh.triangle(t);
    os << tr[0] << ' ' << tr[1] << ' ' << tr[2] << ' ' << mesh.region(t) << '\n';
  }
  for (int f : bnd) {
    const Edge& e = mesh.edge(f);
    os << e.s << ' ' << e.e << ' ' << (e.label == EdgeLabel::dirichlet ? 'D' : 'N') << '\n';
  }
}

inline Mesh read_mesh(std::istream& is) {
  std::string line;
  auto next = [&](const char* what) {
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return std::istringstream(line);
    }
    throw Error(std::string("mesh file truncated while reading ") + what);
  };
  long nv = 0, nt = 0, ne = 0;
  {
    auto ss = next("header");
    if (!(ss >> nv >> nt >> ne) || nv < 3 || nt < 1 || ne < 0) throw Error("malformed mesh header");
  }
  std::vector<Vec2> verts(static_cast<std::size_t>(nv));
  for (auto& v : verts) {
    auto ss = next("vertices");
    double x, y;
    if (!(ss >> x >> y)) throw Error("malformed vertex line: " + line);
    v = {x, y};
  }
  std::vector<std::array<int, 3>> tris(static_cast<std::size_t>(nt));
  std::vector<int> regions(static_cast<std::size_t>(nt));
  for (long t = 0; t < nt; ++t) {
    auto ss = next("triangles");
    auto& tr = tris[static_cast<std::size_t>(t)];
    if (!(ss >> tr[0] >> tr[1] >> tr[2] >> regions[static_cast<std::size_t>(t)]))
      throw Error("malformed triangle line: " + line);
  }
  std::unordered_map<std::uint64_t, EdgeLabel> labels;
  for (long i = 0; i < ne; ++i) {
    auto ss = next("boundary edges");
    int a, b;
    std::string lab;
    if (!(ss >> a >> b >> lab) || (lab != "D" && lab != "N")) throw Error("malformed boundary edge line: " + line);
    labels[edge_key(a, b)] = lab == "D" ? EdgeLabel::dirichlet : EdgeLabel::neumann;
  }
  BoundaryLabeler labeler = [&labels](int a, int b, const Vec2&, const Vec2&) -> std::optional<EdgeLabel> {
    const auto it = labels.find(edge_key(a, b));
    if (it == labels.end()) return std::nullopt;
    return it->second;
  };
  return build_mesh(std::move(verts), std::move(tris), std::move(regions), labeler);
}

inline void write_mesh_file(const Mesh& mesh, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mesh(mesh, os);
  if (!os) throw Error("failed writing " + path);
}

inline Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  return read_mesh(is);
}

} // namespace afem
