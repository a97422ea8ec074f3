#include "afem/afem.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace afem;

namespace {

ProblemData affine_data(const Vec2& g, double c) {
  ProblemData d;
  d.f = [](const Vec2&) { return 0.0; };
  d.g_D = [g, c](const Vec2& x) { return g.dot(x) + c; };
  d.g_N = [](const Vec2&, const Vec2&) { return 0.0; };
  d.exact = ExactSolution{[g, c](const Vec2& x) { return g.dot(x) + c; }, [g](const Vec2&) { return g; }};
  return d;
}

ProblemData zero_data() {
  ProblemData d;
  d.f = d.g_D = [](const Vec2&) { return 0.0; };
  d.g_N = [](const Vec2&, const Vec2&) { return 0.0; };
  return d;
}

Mesh irregular_square(int n, int marks) {
  Mesh m = rectangle_mesh(0, 0, 1, 1, n, nullptr, all_dirichlet());
  std::mt19937 rng(3);
  for (int it = 0; it < marks; ++it) {
    std::vector<int> marked;
    for (int t = 0; t < m.num_triangles(); ++t)
      if (rng() % 6 == 0) marked.push_back(t);
    m = refine(m, marked);
  }
  return m;
}

double mixed_divergence(const Mesh& m, const MixedSolution& s, int t) {
  double d = 0;
  for (int f : m.triangle_edges(t)) d += m.side_sign(t, f) * s.sigma[f] * m.edge(f).length;
  return d / m.area(t);
}

}  // namespace

TEST(Conforming, ReproducesAffineSolution) {
  const Mesh m = irregular_square(4, 3);
  const auto A = constant_coefficient(m, Mat2::Identity());
  const auto sol = std::get<ConformingSolution>(solve_conforming(m, A, affine_data(Vec2(1, 0), 0)));
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_NEAR(sol.u[v], m.vertex(v).x(), 1e-12);
}

TEST(AllMethods, ZeroDataGivesZero) {
  const Mesh m = irregular_square(3, 2);
  const auto A = constant_coefficient(m, 2.0 * Mat2::Identity());
  for (Method method : {Method::conforming, Method::mixed, Method::nonconforming}) {
    const auto sol = solve(method, m, A, zero_data());
    std::visit(
        [](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, MixedSolution>) { EXPECT_EQ(s.sigma.norm(), 0.0); }
          EXPECT_EQ(s.u.norm(), 0.0);
        },
        sol);
  }
}

TEST(Mixed, ConstantFluxIsExact) {
  const Mesh m = irregular_square(4, 2);
  const auto A = constant_coefficient(m, Mat2::Identity());
  const auto sol = std::get<MixedSolution>(solve_mixed(m, A, affine_data(Vec2(1, 0), 0)));
  for (int f = 0; f < m.num_edges(); ++f) EXPECT_NEAR(sol.sigma[f], -m.edge(f).normal.x(), 1e-12);
}

TEST(Mixed, LocalConservationUnitLoad) {
  const Mesh m = irregular_square(4, 3);
  const auto A = constant_coefficient(m, Mat2::Identity());
  ProblemData d = zero_data();
  d.f = [](const Vec2&) { return 1.0; };
  const auto sol = std::get<MixedSolution>(solve_mixed(m, A, d));
  for (int t = 0; t < m.num_triangles(); ++t) EXPECT_NEAR(mixed_divergence(m, sol, t), 1.0, 1e-10);
}

TEST(Mixed, NeumannFluxIsImposed) {
  const auto pb = with_neumann(manufactured_smooth(), [](const Vec2& x) { return x.x() > 1 - 1e-12; });
  const Mesh m = pb.initial_mesh(6);
  const auto A = pb.coefficient_on(m);
  const auto sol = std::get<MixedSolution>(solve_mixed(m, A, pb.data));
  int n = 0;
  for (int f : m.edges_with_label(EdgeLabel::neumann)) {
    const Edge& e = m.edge(f);
    EXPECT_NEAR(sol.sigma[f], pb.data.g_N(e.midpoint, e.normal), 1e-12);
    ++n;
  }
  EXPECT_EQ(n, 6);
}

TEST(Nonconforming, ReproducesAffineSolution) {
  const Mesh m = irregular_square(4, 3);
  Mat2 T;
  T << 3, 1, 1, 2;
  const auto A = constant_coefficient(m, T);
  const auto d = affine_data(Vec2(0.3, -1.2), 0.5);
  const auto sol = std::get<NonconformingSolution>(solve_nonconforming(m, A, d));
  for (int f = 0; f < m.num_edges(); ++f) EXPECT_NEAR(sol.u[f], d.g_D(m.edge(f).midpoint), 1e-12);
}

TEST(Conforming, GalerkinOrthogonality) {
  // Harmonic u = e^x sin y (f = 0): a(u - u_c, φ) = 0 for every interior hat φ,
  // with a(u, φ) integrated by a high-order rule.
  ProblemData d = zero_data();
  d.g_D = [](const Vec2& x) { return std::exp(x.x()) * std::sin(x.y()); };
  const Mesh m = irregular_square(4, 2);
  Mat2 T;
  T << 1.5, 0, 0, 1.5;
  const auto A = constant_coefficient(m, T);
  const auto sol = solve_conforming(m, A, d);
  const auto rule = quad::triangle_collapsed(8);
  std::vector<double> r(static_cast<std::size_t>(m.num_vertices()), 0.0);
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto fr = frame_of(m, t);
    const auto x = m.coords(t);
    Vec2 mean_grad = Vec2::Zero();
    for (const auto& p : rule) {
      const Vec2 y = quad::map_point(x, p.bary);
      mean_grad += p.w * std::exp(y.x()) * Vec2(std::sin(y.y()), std::cos(y.y()));
    }
    const Vec2 diff = A.A(t) * (mean_grad - element_gradient(m, sol, t));
    for (std::size_t l = 0; l < 3; ++l) r[static_cast<std::size_t>(m.triangle(t)[l])] += m.area(t) * diff.dot(fr.grad[l]);
  }
  int checked = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    if (m.vertex_label(v) != VertexLabel::interior) continue;
    EXPECT_NEAR(r[static_cast<std::size_t>(v)], 0.0, 1e-11);
    ++checked;
  }
  EXPECT_GT(checked, 5);
}

TEST(Convergence, KelloggEnergyErrorDecreasesUniformly) {
  const auto pb = kellogg_problem();
  for (Method method : {Method::conforming, Method::nonconforming}) {
    Mesh m = pb.initial_mesh(8);
    double prev = 1e300;
    for (int k = 0; k < 3; ++k) {
      const auto A = pb.coefficient_on(m);
      const double e = true_energy_error(m, A, solve(method, m, A, pb.data), pb.data);
      EXPECT_TRUE(std::isfinite(e));
      EXPECT_GT(e, 0);
      EXPECT_LT(e, prev);
      prev = e;
      m = refine_uniform(m);
    }
  }
}

TEST(Convergence, SmoothProblemRates) {
  const auto pb = manufactured_smooth();
  for (Method method : {Method::conforming, Method::mixed, Method::nonconforming}) {
    std::vector<double> dofs, err;
    Mesh m = pb.initial_mesh(4);
    for (int k = 0; k < 4; ++k) {
      const auto A = pb.coefficient_on(m);
      err.push_back(true_energy_error(m, A, solve(method, m, A, pb.data), pb.data));
      dofs.push_back(dof_count(method, m));
      m = refine_uniform(refine_uniform(m));
    }
    EXPECT_NEAR(loglog_slope(dofs, err, 3), -0.5, 0.06) << to_string(method);
  }
}

TEST(EdgeTraces, TwoTriangleSquareOracle) {
  const Mesh m = rectangle_mesh(0, 0, 1, 1, 1, nullptr, all_dirichlet());
  const auto A = constant_coefficient(m, Mat2::Identity());
  Eigen::VectorXd u(4);
  for (int v = 0; v < 4; ++v) {
    const Vec2& x = m.vertex(v);
    u[v] = (x - Vec2(0, 0)).norm() < 1e-12 ? 0.0 : 1.0;
  }
  const EdgeTraces tr = edge_traces(m, A, ConformingSolution{u});
  const int f = *m.find_edge(0, 3);
  const Edge& e = m.edge(f);
  ASSERT_TRUE(e.interior());
  // ∇u = (1,0) below the diagonal and (0,1) above; the traces are ±1/√2 whichever side is K⁻.
  EXPECT_NEAR(std::abs(e.normal.x()), 1 / std::sqrt(2.0), 1e-15);
  const double below = -Vec2(1, 0).dot(e.normal), above = -Vec2(0, 1).dot(e.normal);
  const bool minus_below = m.centroid(e.minus).y() < m.centroid(e.minus).x();
  EXPECT_NEAR(tr.edges[static_cast<std::size_t>(f)].flux_minus, minus_below ? below : above, 1e-15);
  EXPECT_NEAR(tr.edges[static_cast<std::size_t>(f)].flux_plus, minus_below ? above : below, 1e-15);
  EXPECT_NEAR(std::abs(tr.edges[static_cast<std::size_t>(f)].flux_minus), 1 / std::sqrt(2.0), 1e-15);
}

TEST(EdgeTraces, ContinuousForAffineSolutions) {
  const Mesh m = irregular_square(3, 2);
  Mat2 T;
  T << 2, 0.3, 0.3, 1;
  const auto A = constant_coefficient(m, T);
  const auto d = affine_data(Vec2(1, 2), 0);
  for (Method method : {Method::conforming, Method::mixed, Method::nonconforming}) {
    const EdgeTraces tr = edge_traces(m, A, solve(method, m, A, d));
    for (int f = 0; f < m.num_edges(); ++f) {
      if (!m.edge(f).interior()) continue;
      const auto& et = tr.edges[static_cast<std::size_t>(f)];
      if (method != Method::mixed) { EXPECT_NEAR(et.flux_minus, et.flux_plus, 1e-11); }
      if (method != Method::conforming) {
        EXPECT_NEAR(et.grad_minus_s, et.grad_plus_s, 1e-11);
        EXPECT_NEAR(et.grad_minus_e, et.grad_plus_e, 1e-11);
      }
    }
  }
}

TEST(EdgeTraces, ZeroMixedFluxGivesZeroTraces) {
  const Mesh m = irregular_square(2, 1);
  const auto A = constant_coefficient(m, Mat2::Identity());
  const MixedSolution s{Eigen::VectorXd::Zero(m.num_edges()), Eigen::VectorXd::Zero(m.num_triangles())};
  const EdgeTraces tr = edge_traces(m, A, s);
  for (int f = 0; f < m.num_edges(); ++f) {
    const auto& et = tr.edges[static_cast<std::size_t>(f)];
    EXPECT_EQ(et.grad_minus_s, 0.0);
    EXPECT_EQ(et.grad_minus_e, 0.0);
  }
}

TEST(DofCount, PerMethod) {
  const Mesh m = initial_kellogg_mesh(4);
  EXPECT_EQ(dof_count(Method::conforming, m), m.num_vertices());
  EXPECT_EQ(dof_count(Method::nonconforming, m), m.num_edges());
  EXPECT_GT(dof_count(Method::mixed, m), 0);
}
