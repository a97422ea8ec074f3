#include "afem/afem.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace afem;

namespace {

const std::vector<std::pair<Method, Family>> kPairs = {
    {Method::conforming, Family::RT},    {Method::conforming, Family::BDM},   {Method::mixed, Family::ND},
    {Method::nonconforming, Family::RT}, {Method::nonconforming, Family::BDM}, {Method::nonconforming, Family::NE},
    {Method::nonconforming, Family::ND}};

Mesh square() { return rectangle_mesh(0, 0, 1, 1, 1, nullptr, all_dirichlet()); }

// Nodal values (0,1,1,1) at (0,0),(1,0),(1,1),(0,1).
ConformingSolution kink(const Mesh& m) {
  Eigen::VectorXd u(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) u[v] = m.vertex(v).norm() < 1e-12 ? 0.0 : 1.0;
  return ConformingSolution{u};
}

ProblemData zero_data() {
  ProblemData d;
  d.f = d.g_D = [](const Vec2&) { return 0.0; };
  d.g_N = [](const Vec2&, const Vec2&) { return 0.0; };
  return d;
}

int diagonal(const Mesh& m) { return *m.find_edge(0, 3); }

Mesh random_kellogg_mesh(unsigned seed, int rounds) {
  Mesh m = initial_kellogg_mesh(4);
  std::mt19937 rng(seed);
  for (int it = 0; it < rounds; ++it) {
    std::vector<int> marked;
    for (int t = 0; t < m.num_triangles(); ++t)
      if (rng() % 3 == 0 || (m.centroid(t).norm() < 0.3 && rng() % 2 == 0)) marked.push_back(t);
    m = refine(m, marked);
  }
  return m;
}

}  // namespace

TEST(Jumps, TwoTriangleSquare) {
  const Mesh m = square();
  const auto A = constant_coefficient(m, Mat2::Identity());
  const EdgeTraces tr = edge_traces(m, A, kink(m));
  const auto J = compute_jumps(m, tr, zero_data(), FieldKind::flux);
  const auto& j = J[static_cast<std::size_t>(diagonal(m))];
  ASSERT_TRUE(j.present);
  EXPECT_NEAR(std::abs(j.s), std::sqrt(2.0), 1e-14);
  // Dirichlet edges carry no flux jump.
  for (int f = 0; f < m.num_edges(); ++f)
    if (!m.edge(f).interior()) { EXPECT_FALSE(J[static_cast<std::size_t>(f)].present); }
}

TEST(Jumps, NeumannEdgeMatchingDataHasNoJump) {
  const auto pb = with_neumann(manufactured_affine(), [](const Vec2& x) { return x.y() < 1e-12; });
  const Mesh m = pb.initial_mesh(4);
  const auto A = pb.coefficient_on(m);
  const EdgeTraces tr = edge_traces(m, A, solve_conforming(m, A, pb.data));
  const auto J = compute_jumps(m, tr, pb.data, FieldKind::flux);
  for (int f = 0; f < m.num_edges(); ++f) {
    if (J[static_cast<std::size_t>(f)].present) { EXPECT_NEAR(J[static_cast<std::size_t>(f)].s, 0.0, 1e-11); }
  }
  EXPECT_FALSE(m.edges_with_label(EdgeLabel::neumann).empty());
}

TEST(Weights, MirrorPatch) {
  const Mesh m = square();
  const int f = diagonal(m);
  const Edge& e = m.edge(f);
  EXPECT_NEAR(edge_weights(m, constant_coefficient(m, Mat2::Identity()), f, Family::RT).a, 0.5, 1e-15);
  std::vector<Mat2> A(2);
  A[static_cast<std::size_t>(e.minus)] = Mat2::Identity();
  A[static_cast<std::size_t>(e.plus)] = 4.0 * Mat2::Identity();
  EXPECT_NEAR(edge_weights(m, CoefficientField(A), f, Family::RT).a, 0.8, 1e-15);
}

TEST(Weights, AlwaysStrictlyBetweenZeroAndOne) {
  const auto pb = kellogg_problem();
  const Mesh m = random_kellogg_mesh(1, 3);
  const auto A = pb.coefficient_on(m);
  for (Family fam : {Family::RT, Family::NE}) {
    const auto W = patch_weights(m, A, fam);
    for (int f = 0; f < m.num_edges(); ++f) {
      if (!m.edge(f).interior()) continue;
      EXPECT_GT(W.edges[static_cast<std::size_t>(f)].a, 0.0);
      EXPECT_LT(W.edges[static_cast<std::size_t>(f)].a, 1.0);
    }
  }
}

TEST(Oracle, ZeroJumpGivesZeroCorrection) {
  const Mesh m = random_kellogg_mesh(2, 1);
  const auto A = kellogg_problem().coefficient_on(m);
  for (Family fam : {Family::RT, Family::BDM, Family::NE, Family::ND}) {
    const PatchField p = local_oracle(m, A, 7, fam, EdgeJump{true, 0.0, 0.0});
    for (const auto& V : p.values)
      for (const auto& v : V) EXPECT_EQ(v.norm(), 0.0);
  }
}

TEST(Oracle, RtCoefficientEqualsWeightTimesJump) {
  const auto pb = kellogg_problem();
  const Mesh m = random_kellogg_mesh(3, 2);
  const auto A = pb.coefficient_on(m);
  for (int f = 0; f < m.num_edges(); ++f) {
    const Edge& e = m.edge(f);
    if (!e.interior()) continue;
    const double j = 0.7;
    const PatchField p = local_oracle(m, A, f, Family::RT, EdgeJump{true, j, j});
    const double a = edge_weights(m, A, f, Family::RT).a;
    for (std::size_t q = 0; q < p.elements.size(); ++q) {
      if (p.elements[q] != e.plus) continue;
      // On K⁺ the minimizer is a·j ψ_F, whose normal trace on F is a·j.
      const auto fr = frame_of(m, e.plus);
      const Vec2 mid = eval_affine(p.values[q], fr.barycentric(e.midpoint));
      EXPECT_NEAR(mid.dot(e.normal), a * j, 1e-12);
    }
  }
}

TEST(Oracle, DirichletFluxEdgeHasNoCorrection) {
  const Mesh m = square();
  const auto A = constant_coefficient(m, Mat2::Identity());
  const EdgeTraces tr = edge_traces(m, A, kink(m));
  const auto r = recover(m, A, tr, zero_data(), Family::RT);
  for (int f = 0; f < m.num_edges(); ++f) {
    if (m.edge(f).interior()) continue;
    EXPECT_EQ(r.corrections[static_cast<std::size_t>(f)].minus[0], 0.0);
    const PatchField p = local_oracle(m, A, f, Family::RT, r.jumps[static_cast<std::size_t>(f)]);
    for (const auto& V : p.values)
      for (const auto& v : V) EXPECT_EQ(v.norm(), 0.0);
  }
}

TEST(Recover, TwoTriangleExample) {
  const Mesh m = square();
  const auto A = constant_coefficient(m, Mat2::Identity());
  const auto r = recover(m, A, edge_traces(m, A, kink(m)), zero_data(), Family::RT, {true, 1e-12});
  EXPECT_NEAR(r.coefficient(diagonal(m)), 0.0, 1e-15);
  const auto& c = r.corrections[static_cast<std::size_t>(diagonal(m))];
  EXPECT_NEAR(std::abs(c.minus[0]), std::sqrt(2.0) / 2, 1e-15);
  EXPECT_NEAR(std::abs(c.plus[0]), std::sqrt(2.0) / 2, 1e-15);
}

TEST(Recover, AffineSolutionIsAlreadyConforming) {
  const auto pb = manufactured_affine();
  const Mesh m = pb.initial_mesh(4);
  const auto A = pb.coefficient_on(m);
  for (const auto& [method, fam] : kPairs) {
    const EdgeTraces tr = edge_traces(m, A, solve(method, m, A, pb.data));
    const auto r = recover(m, A, tr, pb.data, fam);
    const auto& numerical = r.kind == FieldKind::flux ? tr.flux : tr.gradient;
    const double scale = field_scale(r.total);
    for (int t = 0; t < m.num_triangles(); ++t)
      for (std::size_t l = 0; l < 3; ++l)
        EXPECT_NEAR((r.total[static_cast<std::size_t>(t)][l] - numerical[static_cast<std::size_t>(t)][l]).norm(), 0.0, 1e-11 * scale);
  }
}

TEST(Recover, NeumannCoefficientIsTheData) {
  const auto pb = with_neumann(manufactured_smooth(), [](const Vec2& x) { return x.x() > 1 - 1e-12; });
  const Mesh m = pb.initial_mesh(6);
  const auto A = pb.coefficient_on(m);
  for (Method method : {Method::conforming, Method::nonconforming}) {
    const EdgeTraces tr = edge_traces(m, A, solve(method, m, A, pb.data));
    for (Family fam : {Family::RT, Family::BDM}) {
      const auto r = recover(m, A, tr, pb.data, fam);
      for (int f : m.edges_with_label(EdgeLabel::neumann)) {
        const Edge& e = m.edge(f);
        for (int x = 0; x < dofs_per_edge(fam); ++x) EXPECT_DOUBLE_EQ(r.coefficient(f, x), pb.data.g_N(e.midpoint, e.normal));
      }
    }
  }
}

TEST(Recover, ExplicitFormulasMatchOracleOnAllPairs) {
  const auto kel = kellogg_problem();
  const auto smooth = with_neumann(manufactured_smooth(), [](const Vec2& x) { return x.y() < 1e-12 || x.x() > 1 - 1e-12; });
  for (const BenchmarkProblem* pb : {&kel, &smooth}) {
    Mesh m = pb->initial_mesh(4);
    std::mt19937 rng(5);
    for (int it = 0; it < 3; ++it) {
      std::vector<int> marked;
      for (int t = 0; t < m.num_triangles(); ++t)
        if (rng() % 3 == 0) marked.push_back(t);
      m = refine(m, marked);
    }
    const auto A = pb->coefficient_on(m);
    for (const auto& [method, fam] : kPairs) {
      const EdgeTraces tr = edge_traces(m, A, solve(method, m, A, pb->data));
      const auto r = recover(m, A, tr, pb->data, fam);
      double worst = 0;
      for (int f = 0; f < m.num_edges(); ++f) worst = std::max(worst, oracle_mismatch(m, A, r, f));
      EXPECT_LT(worst, 1e-10) << pb->name << " " << to_string(method) << "/" << to_string(fam);
      EXPECT_LT(max_interior_jump(m, r), 1e-11 * field_scale(r.total)) << pb->name << " " << to_string(fam);
    }
  }
}

TEST(Recover, RejectsUnsupportedPairs) {
  const auto pb = manufactured_smooth();
  const Mesh m = pb.initial_mesh(2);
  const auto A = pb.coefficient_on(m);
  const EdgeTraces conf = edge_traces(m, A, solve_conforming(m, A, pb.data));
  EXPECT_THROW(recover(m, A, conf, pb.data, Family::ND), Error);
  EXPECT_THROW(recover(m, A, conf, pb.data, Family::NE), Error);
  const EdgeTraces mixed = edge_traces(m, A, solve_mixed(m, A, pb.data));
  EXPECT_THROW(recover(m, A, mixed, pb.data, Family::RT), Error);
  EXPECT_THROW(recover(m, A, mixed, pb.data, Family::NE), Error);
  EXPECT_TRUE(supported(Method::nonconforming, Family::ND));
}
