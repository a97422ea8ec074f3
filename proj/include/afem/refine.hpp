#pragma once

#include "afem/mesh.hpp"

#include <vector>

namespace afem {

/// Newest-vertex bisection of the marked triangles followed by conforming
/// closure. A triangle (v0, v1, v2) is split at the midpoint m of (v1, v2)
/// into (m, v0, v1) and (m, v2, v0), so m becomes the newest vertex of both
/// children. Regions and boundary labels are inherited; surviving edges keep
/// their orientation and split edges pass it on to their halves.
inline Mesh refine(const Mesh& mesh, const std::vector<int>& marked) {
  std::vector<Vec2> verts = mesh.vertices();
  std::vector<std::array<int, 3>> tris = mesh.triangles();
  std::vector<int> regions = mesh.regions();
  std::vector<char> alive(tris.size(), 1);

  std::unordered_map<std::uint64_t, EdgeLabel> boundary;
  MeshBuildOptions opts;
  for (const auto& e : mesh.edges()) {
    if (e.interior())
      opts.orientation.emplace(edge_key(e.s, e.e), std::array<int, 2>{e.s, e.e});
    else
      boundary.emplace(edge_key(e.s, e.e), e.label);
  }

  std::unordered_map<std::uint64_t, std::vector<int>> edge_tris;
  auto add_tri = [&](int t) {
    const auto& tr = tris[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k)
      edge_tris[edge_key(tr[static_cast<std::size_t>((k + 1) % 3)], tr[static_cast<std::size_t>((k + 2) % 3)])]
          .push_back(t);
  };
  auto remove_tri = [&](int t) {
    const auto& tr = tris[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k) {
      auto& v = edge_tris[edge_key(tr[static_cast<std::size_t>((k + 1) % 3)], tr[static_cast<std::size_t>((k + 2) % 3)])];
      v.erase(std::remove(v.begin(), v.end(), t), v.end());
    }
    alive[static_cast<std::size_t>(t)] = 0;
  };
  for (int t = 0; t < static_cast<int>(tris.size()); ++t) add_tri(t);

  std::unordered_map<std::uint64_t, int> midpoints;
  std::vector<int> work;

  auto hanging = [&](int t) {
    const auto& tr = tris[static_cast<std::size_t>(t)];
    for (int k = 0; k < 3; ++k)
      if (midpoints.count(edge_key(tr[static_cast<std::size_t>((k + 1) % 3)], tr[static_cast<std::size_t>((k + 2) % 3)])))
        return true;
    return false;
  };

  auto bisect = [&](int t) {
    const auto tr = tris[static_cast<std::size_t>(t)];
    const int v0 = tr[0], v1 = tr[1], v2 = tr[2];
    const auto key = edge_key(v1, v2);
    int m;
    const auto it = midpoints.find(key);
    if (it != midpoints.end()) {
      m = it->second;
    } else {
      m = static_cast<int>(verts.size());
      verts.push_back(0.5 * (verts[static_cast<std::size_t>(v1)] + verts[static_cast<std::size_t>(v2)]));
      midpoints.emplace(key, m);
      const auto b = boundary.find(key);
      if (b != boundary.end()) {
        boundary.emplace(edge_key(v1, m), b->second);
        boundary.emplace(edge_key(m, v2), b->second);
      }
      const auto o = opts.orientation.find(key);
      if (o != opts.orientation.end()) {
        const auto [s, e] = o->second;
        opts.orientation.emplace(edge_key(s, m), std::array<int, 2>{s, m});
        opts.orientation.emplace(edge_key(m, e), std::array<int, 2>{m, e});
      }
      for (int n : edge_tris[key])
        if (n != t) work.push_back(n);
    }
    const int region = regions[static_cast<std::size_t>(t)];
    remove_tri(t);
    for (const auto& child : {std::array<int, 3>{m, v0, v1}, std::array<int, 3>{m, v2, v0}}) {
      const int c = static_cast<int>(tris.size());
      tris.push_back(child);
      regions.push_back(region);
      alive.push_back(1);
      add_tri(c);
      work.push_back(c);
    }
  };

  const std::size_t initial = tris.size();
  for (int t : marked) {
    require(t >= 0 && static_cast<std::size_t>(t) < initial, "refine: marked element out of range");
    if (alive[static_cast<std::size_t>(t)]) bisect(t);
  }
  // Closure: every bisection adds at most one vertex, and NVB closure on a
  // mesh with n vertices cannot need more than a bounded multiple of that.
  const std::size_t budget = 64 * (initial + verts.size()) + 1024;
  std::size_t steps = 0;
  while (!work.empty()) {
    const int t = work.back();
    work.pop_back();
    if (!alive[static_cast<std::size_t>(t)] || !hanging(t)) continue;
    if (++steps > budget) throw NumericalError("refine: conforming closure did not terminate");
    bisect(t);
  }

  std::vector<std::array<int, 3>> out;
  std::vector<int> out_regions;
  out.reserve(tris.size());
  for (std::size_t t = 0; t < tris.size(); ++t) {
    if (!alive[t]) continue;
    out.push_back(tris[t]);
    out_regions.push_back(regions[t]);
  }
  BoundaryLabeler labeler = [&boundary](int a, int b, const Vec2&, const Vec2&) -> std::optional<EdgeLabel> {
    const auto it = boundary.find(edge_key(a, b));
    if (it == boundary.end()) return std::nullopt;
    return it->second;
  };
  return build_mesh(std::move(verts), std::move(out), std::move(out_regions), labeler, opts);
}

inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<int> all(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) all[static_cast<std::size_t>(t)] = t;
  return refine(mesh, all);
}

} // namespace afem
