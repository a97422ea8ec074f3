#pragma once

#include "afem/driver.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace afem {

inline std::string format_g(double v, int digits = 12) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

/// CSV with header iter,dofs,eta,true_error,effectivity,h_f; floats with 12
/// significant digits, LF line endings, empty fields where no exact solution.
inline void write_history_csv(const ConvergenceHistory& h, std::ostream& os) {
  require(!h.rows.empty(), "write_history_csv: empty history");
  os << "iter,dofs,eta,true_error,effectivity,h_f\n";
  for (const auto& r : h.rows) {
    os << r.iter << ',' << r.dofs << ',' << format_g(r.eta) << ',' << (r.true_error ? format_g(*r.true_error) : "") << ','
       << (r.effectivity ? format_g(*r.effectivity) : "") << ',' << format_g(r.h_f) << '\n';
  }
}

inline void write_history_csv(const ConvergenceHistory& h, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_history_csv(h, os);
  if (!os) throw Error("failed writing " + path);
}

inline ConvergenceHistory read_history_csv(std::istream& is) {
  ConvergenceHistory h;
  std::string line;
  if (!std::getline(is, line) || line != "iter,dofs,eta,true_error,effectivity,h_f") throw Error("unexpected CSV header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 6) throw Error("malformed CSV row: " + line);
    IterationRecord r;
    r.iter = std::stoi(f[0]);
    r.dofs = std::stoi(f[1]);
    r.eta = std::stod(f[2]);
    if (!f[3].empty()) r.true_error = std::stod(f[3]);
    if (!f[4].empty()) r.effectivity = std::stod(f[4]);
    r.h_f = std::stod(f[5]);
    h.rows.push_back(r);
  }
  return h;
}

/// SVG drawing with one polygon per triangle; with indicators, each triangle
/// is shaded by the quantile of its value (white = lowest, red = highest).
inline void write_mesh_svg(const Mesh& mesh, std::ostream& os, const std::vector<double>& indicator = {}) {
  require(indicator.empty() || static_cast<int>(indicator.size()) == mesh.num_triangles(),
          "write_mesh_svg: indicator size does not match the mesh");
  Vec2 lo = mesh.vertex(0), hi = mesh.vertex(0);
  for (const auto& v : mesh.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double w = hi.x() - lo.x(), h = hi.y() - lo.y();
  const double pad = 0.02 * std::max(w, h);
  const double stroke = 0.001 * std::max(w, h);
  const double px = 800.0;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << format_g(lo.x() - pad, 9) << ' ' << format_g(-hi.y() - pad, 9) << ' '
     << format_g(w + 2 * pad, 9) << ' ' << format_g(h + 2 * pad, 9) << "\" width=\"" << format_g(px, 9) << "\" height=\""
     << format_g(px * (h + 2 * pad) / (w + 2 * pad), 9) << "\">\n";
  std::vector<double> q;
  if (!indicator.empty()) {
    std::vector<int> order(indicator.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return indicator[static_cast<std::size_t>(a)] < indicator[static_cast<std::size_t>(b)];
    });
    q.assign(indicator.size(), 0.0);
    const double n = std::max<double>(1.0, static_cast<double>(indicator.size() - 1));
    for (std::size_t r = 0; r < order.size(); ++r) q[static_cast<std::size_t>(order[r])] = r / n;
  }
  os << "<g stroke=\"#000000\" stroke-width=\"" << format_g(stroke, 9) << "\" stroke-linejoin=\"round\">\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const auto x = mesh.coords(t);
    std::string fill = "none";
    if (!q.empty()) {
      const int c = static_cast<int>(std::lround(255.0 * (1.0 - q[static_cast<std::size_t>(t)])));
      char buf[16];
      std::snprintf(buf, sizeof buf, "#ff%02x%02x", c, c);
      fill = buf;
    }
    os << "<polygon points=\"";
    for (int l = 0; l < 3; ++l) {
      const Vec2& p = x[static_cast<std::size_t>(l)];
      os << (l ? " " : "") << format_g(p.x(), 9) << ',' << format_g(-p.y(), 9);
    }
    os << "\" fill=\"" << fill << "\"/>\n";
  }
  os << "</g>\n</svg>\n";
}

inline void write_mesh_svg(const Mesh& mesh, const std::string& path, const std::vector<double>& indicator = {}) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path + " for writing");
  write_mesh_svg(mesh, os, indicator);
  if (!os) throw Error("failed writing " + path);
}

}  // namespace afem
