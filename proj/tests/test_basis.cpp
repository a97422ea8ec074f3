#include "afem/afem.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace afem;

namespace {

LocalTriangleFrame reference() { return LocalTriangleFrame({Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)}); }

LocalTriangleFrame random_frame(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (;;) {
    std::array<Vec2, 3> x{Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng)), Vec2(u(rng), u(rng))};
    const double c = cross(x[1] - x[0], x[2] - x[0]);
    if (std::abs(c) < 0.2) continue;
    if (c < 0) std::swap(x[1], x[2]);
    return LocalTriangleFrame(x);
  }
}

Vec2 on_edge(const LocalTriangleFrame& fr, int k, double s) {
  const Vec2& a = fr.x[static_cast<std::size_t>(LocalTriangleFrame::i_of(k))];
  const Vec2& b = fr.x[static_cast<std::size_t>(LocalTriangleFrame::j_of(k))];
  return (1 - s) * a + s * b;
}

// ∫_K g by a 7-point rule (exact to degree 5).
double quad7(const LocalTriangleFrame& fr, const std::function<double(const std::array<double, 3>&)>& g) {
  double s = 0;
  for (const auto& p : quad::triangle7()) s += p.w * g(p.bary);
  return s * fr.area;
}

}  // namespace

TEST(Frame, GeometryIdentities) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto fr = random_frame(rng);
    Vec2 sum = Vec2::Zero();
    for (int k = 0; k < 3; ++k) {
      const auto K = static_cast<std::size_t>(k);
      sum += fr.grad[K];
      EXPECT_NEAR(fr.H[K] * fr.h[K], 2 * fr.area, 1e-12);
      EXPECT_NEAR((rot90(fr.n[K]) - fr.t[K]).norm(), 0, 1e-14);
      // Outward: the opposite vertex is on the inner side.
      EXPECT_LT((fr.x[K] - on_edge(fr, k, 0.5)).dot(fr.n[K]), 0);
      const auto lam = fr.barycentric(fr.x[K]);
      for (int l = 0; l < 3; ++l) EXPECT_NEAR(lam[static_cast<std::size_t>(l)], l == k ? 1.0 : 0.0, 1e-12);
    }
    EXPECT_NEAR(sum.norm(), 0, 1e-12);
  }
}

TEST(Frame, RejectsClockwiseTriangle) {
  EXPECT_THROW(LocalTriangleFrame({Vec2(0, 0), Vec2(0, 1), Vec2(1, 0)}), Error);
}

TEST(LocalBasis, RtHypotenuseOnReferenceTriangle) {
  const auto fr = reference();
  const Vec2 v = eval_local_basis(fr, {BasisFamily::RT, 0}, Vec2(0.5, 0.5));
  EXPECT_NEAR((v - std::sqrt(2.0) * Vec2(0.5, 0.5)).norm(), 0, 1e-14);
  for (double s : {0.0, 0.3, 1.0}) EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::RT, 0}, on_edge(fr, 0, s)).dot(fr.n[0]), 1, 1e-14);
}

TEST(LocalBasis, DegreeOfFreedomDuality) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fr = random_frame(rng);
    for (int k = 0; k < 3; ++k) {
      for (int l = 0; l < 3; ++l) {
        const auto L = static_cast<std::size_t>(l);
        for (double s : {0.0, 0.25, 1.0}) {
          const Vec2 p = on_edge(fr, l, s);
          const double delta = k == l ? 1.0 : 0.0;
          // RT: normal trace 1 on its own edge, 0 elsewhere; NE: tangential.
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::RT, k}, p).dot(fr.n[L]), delta, 1e-12);
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::NE, k}, p).dot(fr.t[L]), delta, 1e-12);
          // BDM / ND: traces λ_i, λ_j (ND_j with a minus sign) on their edge.
          const auto lam = fr.barycentric(p);
          const double li = lam[static_cast<std::size_t>(LocalTriangleFrame::i_of(k))];
          const double lj = lam[static_cast<std::size_t>(LocalTriangleFrame::j_of(k))];
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::BDM, k, Endpoint::i}, p).dot(fr.n[L]), delta * li, 1e-12);
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::BDM, k, Endpoint::j}, p).dot(fr.n[L]), delta * lj, 1e-12);
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::ND, k, Endpoint::i}, p).dot(fr.t[L]), delta * li, 1e-12);
          EXPECT_NEAR(eval_local_basis(fr, {BasisFamily::ND, k, Endpoint::j}, p).dot(fr.t[L]), -delta * lj, 1e-12);
        }
      }
    }
  }
}

TEST(LocalBasis, BdmAndNdSplitRtAndNe) {
  std::mt19937_64 rng(3);
  const auto fr = random_frame(rng);
  const Vec2 p = (fr.x[0] + 2 * fr.x[1] + 3 * fr.x[2]) / 6;
  for (int k = 0; k < 3; ++k) {
    const Vec2 rt = eval_local_basis(fr, {BasisFamily::RT, k}, p);
    const Vec2 bdm = eval_local_basis(fr, {BasisFamily::BDM, k, Endpoint::i}, p) + eval_local_basis(fr, {BasisFamily::BDM, k, Endpoint::j}, p);
    EXPECT_NEAR((rt - bdm).norm(), 0, 1e-13);
    const Vec2 ne = eval_local_basis(fr, {BasisFamily::NE, k}, p);
    const Vec2 nd = eval_local_basis(fr, {BasisFamily::ND, k, Endpoint::i}, p) - eval_local_basis(fr, {BasisFamily::ND, k, Endpoint::j}, p);
    EXPECT_NEAR((ne - nd).norm(), 0, 1e-13);
  }
}

TEST(LocalBasis, RtDivergenceAndNeCurl) {
  std::mt19937_64 rng(4);
  const auto fr = random_frame(rng);
  for (int k = 0; k < 3; ++k) {
    const auto K = static_cast<std::size_t>(k);
    const auto V = local_basis_values(fr, {BasisFamily::RT, k});
    // div of an affine field from vertex values: Σ_l V_l·∇λ_l.
    double div = 0;
    for (std::size_t l = 0; l < 3; ++l) div += V[l].dot(fr.grad[l]);
    EXPECT_NEAR(div, fr.h[K] / fr.area, 1e-12);
    const auto W = local_basis_values(fr, {BasisFamily::NE, k});
    double curl = 0;
    for (std::size_t l = 0; l < 3; ++l) curl += cross(fr.grad[l], W[l]);
    EXPECT_NEAR(curl, fr.h[K] / fr.area, 1e-12);
  }
}

TEST(LocalBasis, ScalarBases) {
  const auto fr = reference();
  EXPECT_NEAR(eval_local_scalar(fr, {BasisFamily::P1, 1}, Vec2(1, 0)), 1, 1e-15);
  EXPECT_NEAR(eval_local_scalar(fr, {BasisFamily::P1, 1}, Vec2(0, 1)), 0, 1e-15);
  // CR basis is 1 at its edge midpoint and 0 at the other two.
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      EXPECT_NEAR(eval_local_scalar(fr, {BasisFamily::CR, k}, on_edge(fr, l, 0.5)), k == l ? 1 : 0, 1e-14);
}

TEST(LocalBasis, RejectsPointsOutsideAndBadIds) {
  const auto fr = reference();
  EXPECT_THROW(eval_local_basis(fr, {BasisFamily::RT, 0}, Vec2(1, 1)), Error);
  EXPECT_THROW(eval_local_basis(fr, {BasisFamily::RT, 3}, Vec2(0.1, 0.1)), Error);
  EXPECT_THROW(eval_local_basis(fr, {BasisFamily::BDM, 0}, Vec2(0.1, 0.1)), Error);
}

TEST(BarycentricIntegral, ReferenceValues) {
  const auto fr = reference();
  EXPECT_NEAR(barycentric_integral(fr, 0, 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(barycentric_integral(fr, 1, 0, 0), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(barycentric_integral(fr, 1, 1, 0), 1.0 / 24.0, 1e-15);
  EXPECT_THROW(barycentric_integral(fr, 3, 2, 0), Error);
}

TEST(BarycentricIntegral, MatchesQuadrature) {
  std::mt19937_64 rng(5);
  const auto fr = random_frame(rng);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b)
      for (int c = 0; a + b + c <= 4; ++c) {
        const double q = quad7(fr, [&](const std::array<double, 3>& l) {
          return std::pow(l[0], a) * std::pow(l[1], b) * std::pow(l[2], c);
        });
        EXPECT_NEAR(barycentric_integral(fr, a, b, c), q, 1e-13 * fr.area);
      }
}

TEST(WeightedMass, RtHypotenuseOnReference) {
  const auto fr = reference();
  EXPECT_NEAR(weighted_mass_entry(fr, Mat2::Identity(), {BasisFamily::RT, 0}, {BasisFamily::RT, 0}), 1.0 / 3.0, 1e-15);
}

TEST(WeightedMass, MatchesQuadratureAndScalesLinearly) {
  std::mt19937_64 rng(6);
  const auto fr = random_frame(rng);
  Mat2 M;
  M << 3.0, 0.7, 0.7, 0.5;
  const std::vector<LocalBasisId> ids{{BasisFamily::RT, 0},
                                      {BasisFamily::RT, 2},
                                      {BasisFamily::BDM, 1, Endpoint::i},
                                      {BasisFamily::NE, 1},
                                      {BasisFamily::ND, 2, Endpoint::j}};
  for (const auto& a : ids)
    for (const auto& b : ids) {
      const auto Va = local_basis_values(fr, a), Vb = local_basis_values(fr, b);
      const double q = quad7(fr, [&](const std::array<double, 3>& l) { return (M * eval_affine(Va, l)).dot(eval_affine(Vb, l)); });
      const double e = weighted_mass_entry(fr, M, a, b);
      EXPECT_NEAR(e, q, 1e-12 * (1 + std::abs(q)));
      EXPECT_NEAR(weighted_mass_entry(fr, 4.0 * M, a, b), 4.0 * e, 1e-12 * (1 + std::abs(e)));
      EXPECT_NEAR(weighted_mass_entry(fr, M, b, a), e, 1e-13 * (1 + std::abs(e)));
    }
  // Inverse weighting: the explicit inverse agrees with a numerical one.
  Mat2 Minv;
  Minv << 0.5, -0.7, -0.7, 3.0;
  Minv /= M.determinant();
  const double a = weighted_mass_entry(fr, Minv, ids[0], ids[1]);
  const double b = weighted_mass_entry(fr, M.inverse(), ids[0], ids[1]);
  EXPECT_NEAR(a, b, 1e-14 * (1 + std::abs(a)));
}

TEST(WeightedMass, RejectsNonSpdMatrix) {
  const auto fr = reference();
  Mat2 M;
  M << 1, 2, 2, 1;
  EXPECT_THROW(weighted_mass_entry(fr, M, {BasisFamily::RT, 0}, {BasisFamily::RT, 0}), Error);
}

TEST(Quadrature, RulesIntegratePolynomials) {
  double s = 0;
  for (const auto& p : quad::gauss_legendre(4)) s += p.w * std::pow(p.x, 7);
  EXPECT_NEAR(s, 1.0 / 8.0, 1e-15);
  double w = 0;
  for (const auto& p : quad::triangle_collapsed(5)) w += p.w;
  EXPECT_NEAR(w, 1.0, 1e-14);
}

TEST(Coefficient, ScalarAndTensorViews) {
  const Mesh m = initial_kellogg_mesh(2);
  const auto A = make_coefficient(m, [](const Vec2& x) -> Mat2 { return (x.x() > 0 ? 5.0 : 1.0) * Mat2::Identity(); });
  EXPECT_TRUE(A.all_scalar());
  for (int t = 0; t < m.num_triangles(); ++t) EXPECT_EQ(A.alpha(t), m.centroid(t).x() > 0 ? 5.0 : 1.0);
  Mat2 T;
  T << 2, 0.5, 0.5, 1;
  const auto B = constant_coefficient(m, T);
  EXPECT_FALSE(B.all_scalar());
  EXPECT_THROW(B.alpha(0), Error);
  EXPECT_NEAR((B.A(0) * B.A_inv(0) - Mat2::Identity()).norm(), 0, 1e-15);
}
