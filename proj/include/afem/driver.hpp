#pragma once

#include "afem/estimators.hpp"
#include "afem/refine.hpp"

#include <Eigen/Eigenvalues>

#include <functional>
#include <numeric>

namespace afem {

/// Recovery-based estimator choice. Conforming: rt, bdm. Mixed: nd.
/// Nonconforming: rt-ne, bdm-nd (flux and gradient recoveries combined).
enum class Recovery { rt, bdm, nd, rt_ne, bdm_nd };

inline const char* to_string(Recovery r) {
  switch (r) {
    case Recovery::rt: return "rt";
    case Recovery::bdm: return "bdm";
    case Recovery::nd: return "nd";
    case Recovery::rt_ne: return "rt-ne";
    case Recovery::bdm_nd: return "bdm-nd";
  }
  return "?";
}

inline bool valid_pair(Method m, Recovery r) {
  switch (m) {
    case Method::conforming: return r == Recovery::rt || r == Recovery::bdm;
    case Method::mixed: return r == Recovery::nd;
    case Method::nonconforming: return r == Recovery::rt_ne || r == Recovery::bdm_nd;
  }
  return false;
}

struct AfemConfig {
  Method method = Method::conforming;
  Recovery recovery = Recovery::rt;
  double theta = 0.5;
  int max_dofs = 100000;
  int max_iterations = 1000;
  double c1 = 0.5;  // c2 = 1 - c1
  int initial_n = 8;
  bool uniform = false;
  bool verify_with_oracle = false;
  double eta_tol = 1e-12;  // η at or below this counts as an exact solution
};

struct IterationRecord {
  int iter = 0;
  int dofs = 0;
  int triangles = 0;
  double eta = 0.0;
  std::optional<double> true_error;
  std::optional<double> effectivity;
  double h_f = 0.0;
  double min_indicator = 0.0;
  double max_indicator = 0.0;
  double min_diameter = 0.0;
  double max_diameter = 0.0;
  Vec2 smallest_barycenter = Vec2::Zero();  // barycenter of the smallest-area element
};

struct ConvergenceHistory {
  std::vector<IterationRecord> rows;
};

struct AfemResult {
  ConvergenceHistory history;
  Mesh mesh;               // last solved mesh
  IndicatorSet indicators; // its element indicators
};

/// Dörfler marking: the shortest prefix of elements sorted by decreasing η_K
/// (ties by id) whose squares sum to at least θ² Σ η_K².
inline std::vector<int> dorfler_mark(const std::vector<double>& eta, double theta) {
  require(theta > 0.0 && theta < 1.0, "dorfler_mark: theta must lie in (0,1)");
  double total = 0.0;
  for (double v : eta) {
    require(v >= 0.0 && std::isfinite(v), "dorfler_mark: indicators must be finite and nonnegative");
    total += v * v;
  }
  std::vector<int> marked;
  if (total == 0.0) return marked;
  std::vector<int> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eta[static_cast<std::size_t>(a)] > eta[static_cast<std::size_t>(b)];
  });
  const double goal = theta * theta * total;
  double acc = 0.0;
  for (int t : order) {
    if (acc >= goal) break;
    marked.push_back(t);
    acc += eta[static_cast<std::size_t>(t)] * eta[static_cast<std::size_t>(t)];
  }
  return marked;
}

/// Least-squares slope of log(y) against log(x) over the last `window` points.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t window = 10) {
  require(x.size() == y.size() && x.size() >= 2, "loglog_slope: need at least two points");
  const std::size_t n = std::min(window, x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = x.size() - n; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Scalar weight for the oscillation term: α_K, or the smallest eigenvalue of A_K.
inline CoefficientField scalar_view(const Mesh& mesh, const CoefficientField& A) {
  if (A.all_scalar()) return A;
  std::vector<Mat2> v;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(A.A(t));
    v.push_back(es.eigenvalues()[0] * Mat2::Identity());
  }
  return CoefficientField(std::move(v));
}

/// Solution, recoveries and indicators on one mesh.
struct EstimateResult {
  DiscreteSolution solution;
  EdgeTraces traces;
  std::vector<RecoveredField> recovered;
  IndicatorSet indicators;
};

inline EstimateResult solve_and_estimate(const Mesh& mesh, const CoefficientField& A, const ProblemData& data, Method method,
                                         Recovery rec, double c1 = 0.5, bool verify = false) {
  if (!valid_pair(method, rec))
    throw Error(std::string("recovery ") + to_string(rec) + " is not available for the " + to_string(method) + " method");
  EstimateResult r{solve(method, mesh, A, data), {}, {}, {}};
  r.traces = edge_traces(mesh, A, r.solution);
  const RecoverOptions opt{verify, 1e-9};
  switch (rec) {
    case Recovery::rt:
    case Recovery::bdm:
    case Recovery::nd: {
      const Family f = rec == Recovery::rt ? Family::RT : rec == Recovery::bdm ? Family::BDM : Family::ND;
      r.recovered.push_back(recover(mesh, A, r.traces, data, f, opt));
      r.indicators = indicators(mesh, A, r.recovered[0]);
      break;
    }
    case Recovery::rt_ne:
    case Recovery::bdm_nd: {
      const bool rt = rec == Recovery::rt_ne;
      r.recovered.push_back(recover(mesh, A, r.traces, data, rt ? Family::RT : Family::BDM, opt));
      r.recovered.push_back(recover(mesh, A, r.traces, data, rt ? Family::NE : Family::ND, opt));
      r.indicators = indicators_nonconforming(mesh, A, r.recovered[0], r.recovered[1], c1, 1.0 - c1);
      break;
    }
  }
  return r;
}

/// Solve → estimate → mark → refine until the next mesh would exceed the dof
/// budget or the iteration limit is reached. `on_iteration` (optional) sees
/// each solved mesh with its indicators.
inline AfemResult run_afem(const AfemConfig& cfg, const BenchmarkProblem& pb,
                           const std::function<void(const Mesh&, const IterationRecord&, const EstimateResult&)>& on_iteration = {}) {
  require(valid_pair(cfg.method, cfg.recovery),
          std::string("recovery ") + to_string(cfg.recovery) + " is not available for the " + to_string(cfg.method) + " method");
  require(cfg.theta > 0.0 && cfg.theta < 1.0, "theta must lie in (0,1)");
  require(cfg.c1 > 0.0 && cfg.c1 < 1.0, "c1 must lie in (0,1)");
  Mesh mesh = pb.initial_mesh(cfg.initial_n);
  require(dof_count(cfg.method, mesh) <= cfg.max_dofs, "max dofs is below the initial dof count");
  AfemResult out;
  for (int iter = 1;; ++iter) {
    const CoefficientField A = pb.coefficient_on(mesh);
    EstimateResult est;
    try {
      est = solve_and_estimate(mesh, A, pb.data, cfg.method, cfg.recovery, cfg.c1, cfg.verify_with_oracle);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(iter) + ": " + e.what());
    }
    IterationRecord rec;
    rec.iter = iter;
    rec.dofs = dof_count(cfg.method, mesh);
    rec.triangles = mesh.num_triangles();
    rec.eta = est.indicators.global;
    if (pb.data.exact) {
      rec.true_error = true_energy_error(mesh, A, est.solution, pb.data);
      if (*rec.true_error > 0.0) rec.effectivity = rec.eta / *rec.true_error;
    }
    rec.h_f = oscillation(mesh, scalar_view(mesh, A), pb.data.f).global;
    const auto& el = est.indicators.element;
    rec.min_indicator = *std::min_element(el.begin(), el.end());
    rec.max_indicator = *std::max_element(el.begin(), el.end());
    int smallest = 0;
    rec.min_diameter = rec.max_diameter = mesh.diameter(0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      rec.min_diameter = std::min(rec.min_diameter, mesh.diameter(t));
      rec.max_diameter = std::max(rec.max_diameter, mesh.diameter(t));
      if (mesh.area(t) < mesh.area(smallest)) smallest = t;
    }
    rec.smallest_barycenter = mesh.centroid(smallest);
    out.history.rows.push_back(rec);
    if (on_iteration) on_iteration(mesh, rec, est);

    out.indicators = est.indicators;
    if (rec.eta <= cfg.eta_tol || iter >= cfg.max_iterations) {
      out.mesh = std::move(mesh);
      break;
    }
    std::vector<int> marked;
    if (cfg.uniform) {
      marked.resize(static_cast<std::size_t>(mesh.num_triangles()));
      std::iota(marked.begin(), marked.end(), 0);
    } else {
      marked = dorfler_mark(el, cfg.theta);
    }
    Mesh next = refine(mesh, marked);
    if (dof_count(cfg.method, next) > cfg.max_dofs) {
      out.mesh = std::move(mesh);
      break;
    }
    mesh = std::move(next);
  }
  return out;
}

inline double history_slope(const ConvergenceHistory& h, std::size_t window = 10) {
  std::vector<double> x, y;
  for (const auto& r : h.rows) {
    if (!r.true_error || *r.true_error <= 0.0) continue;
    x.push_back(r.dofs);
    y.push_back(*r.true_error);
  }
  return loglog_slope(x, y, window);
}

}  // namespace afem
