#include <doctest.h>

#include <cmath>
#include <random>

#include "paradat/infsup.hpp"

using namespace paradat::infsup;
using paradat::DenseMatrix;

TEST_CASE("red refinement tiles the triangle") {
  TriMesh mesh = TriMesh::single({{{0.2, -0.1}, {1.4, 0.3}, {0.5, 1.1}}});
  const double area = mesh.total_area();
  int expected = 1;
  for (int g = 0; g < 3; ++g) {
    mesh = mesh.red_refined();
    expected *= 4;
    CHECK(static_cast<int>(mesh.tris.size()) == expected);
    CHECK(mesh.total_area() == doctest::Approx(area).epsilon(1e-13));
  }
}

TEST_CASE("triangle quadrature integrates barycentric monomials exactly") {
  // ∫_T λ0^a λ1^b λ2^c = 2|T| a! b! c! / (a+b+c+2)!
  const auto factorial = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  for (int degree = 1; degree <= 6; ++degree) {
    const TriQuad quad = tri_quadrature(degree);
    for (int a = 0; a + 0 <= degree; ++a)
      for (int b = 0; a + b <= degree; ++b) {
        const int c = degree - a - b;
        double got = 0.0;
        for (size_t p = 0; p < quad.bary.size(); ++p)
          got += quad.weights[p] * std::pow(quad.bary[p][0], a) * std::pow(quad.bary[p][1], b) *
                 std::pow(quad.bary[p][2], c);
        const double expect =
            2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2);
        CHECK(got == doctest::Approx(expect).epsilon(1e-13));
      }
  }
}

TEST_CASE("bubble dimensions") {
  CHECK(poly_dim(1, 1) == 2);
  CHECK(poly_dim(1, 4) == 5);
  CHECK(poly_dim(2, 1) == 3);
  CHECK(poly_dim(2, 2) == 6);
  for (int q = 1; q <= 4; ++q)
    for (int gen = 1; gen <= 3; ++gen)
      CHECK(bubble_dim(1, q, gen, RefineRule::Bisection) == q * (1 << gen) - 1);
  CHECK(bubble_dim(2, 1, 1, RefineRule::Red) == 0);
  CHECK(bubble_dim(2, 1, 2, RefineRule::Red) == 3);
  CHECK(bubble_dim(2, 2, 1, RefineRule::Red) == 3);
  CHECK(bubble_dim(2, 2, 2, RefineRule::Red) == 21);
}

TEST_CASE("alpha for d = 1") {
  SUBCASE("lowest order needs two bisections") {
    CHECK(alpha(1, 1, 1, RefineRule::Bisection) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(alpha(1, 1, 2, RefineRule::Bisection) > 0.1);
  }
  SUBCASE("minimal positive generation equals the dimension-count prediction") {
    for (int q = 2; q <= 4; ++q) {
      int predicted = 1;
      while (bubble_dim(1, q, predicted, RefineRule::Bisection) < poly_dim(1, q)) ++predicted;
      int computed = 1;
      while (alpha(1, q, computed, RefineRule::Bisection) <= 1e-8) ++computed;
      CHECK(computed == predicted);
    }
  }
  SUBCASE("monotone nondecreasing in the generation") {
    for (int q = 1; q <= 4; ++q) {
      double prev = -1.0;
      for (const AlphaRow& row : alpha_table(1, q, RefineRule::Bisection, 3)) {
        CHECK(row.alpha >= prev - 1e-12);
        prev = row.alpha;
      }
    }
  }
}

TEST_CASE("alpha for d = 2") {
  CHECK(alpha(2, 1, 1, RefineRule::Red) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(alpha(2, 1, 2, RefineRule::Red) > 0.1);
  CHECK(alpha(2, 2, 1, RefineRule::Red) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(alpha(2, 2, 2, RefineRule::Red) > 0.1);
  SUBCASE("monotone in the generation") {
    for (int q : {1, 2}) {
      double prev = -1.0;
      for (const AlphaRow& row : alpha_table(2, q, RefineRule::Red, 3)) {
        CHECK(row.alpha >= prev - 1e-12);
        prev = row.alpha;
      }
    }
  }
  SUBCASE("affine invariance") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
      TriCorners corners{{{U(rng), U(rng)}, {U(rng) + 2.0, U(rng)}, {U(rng), U(rng) + 2.0}}};
      for (int q : {1, 2}) {
        const double ref = alpha(2, q, 2, RefineRule::Red);
        const double mapped = alpha_on_triangle(q, 2, corners);
        CHECK(std::abs(mapped - ref) <= 1e-10);
      }
    }
  }
}

TEST_CASE("alpha validation") {
  CHECK_THROWS_AS(alpha(3, 1, 1, RefineRule::Red), std::invalid_argument);
  CHECK_THROWS_AS(alpha(1, 5, 1, RefineRule::Bisection), std::invalid_argument);
  CHECK_THROWS_AS(alpha(1, 1, 1, RefineRule::Red), std::invalid_argument);
  CHECK_THROWS_AS(alpha(2, 3, 1, RefineRule::Red), std::invalid_argument);
  CHECK_THROWS_AS(alpha(2, 1, 0, RefineRule::Red), std::invalid_argument);
}

TEST_CASE("sampled quotients bound the eigenvalue formula") {
  // every sampled quotient is an upper bound for alpha; in the low poly
  // dimensions the sampled infimum also comes close from above
  struct Case {
    int d, q, gen;
    RefineRule rule;
    bool tight;
  };
  const Case cases[] = {
      {1, 1, 2, RefineRule::Bisection, true},  {1, 2, 2, RefineRule::Bisection, true},
      {1, 3, 2, RefineRule::Bisection, false}, {1, 4, 2, RefineRule::Bisection, false},
      {2, 1, 2, RefineRule::Red, true},        {2, 2, 2, RefineRule::Red, false},
  };
  for (const Case& c : cases) {
    const double a = alpha(c.d, c.q, c.gen, c.rule);
    const double sampled = alpha_sampled(c.d, c.q, c.gen, c.rule, 10000, 42);
    CHECK(sampled >= a - 1e-8);
    if (c.tight) CHECK(sampled <= a + 1e-3);
    else CHECK(sampled <= a + 0.05 * (1.0 + a));
  }
}

TEST_CASE("alpha csv") {
  const std::string csv = alpha_csv(alpha_table(1, 1, RefineRule::Bisection, 2));
  CHECK(csv.rfind("d,q,rule,ell,alpha\n", 0) == 0);
  CHECK(csv.find("1,1,bisection,1,0") != std::string::npos);
  CHECK(csv.find("bisection,2,0.75") != std::string::npos);
}

TEST_CASE("biorthogonal construction on the red-refined reference triangle") {
  AppendixResult res = appendix_biorthogonalize();

  SUBCASE("generalized mass matrix has the exact block structure") {
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double expect = (i == j) ? 1.0 : 0.0;
        if (i < 3 && j >= 3) expect = (j - 3 == i) ? 9.0 / 32.0 - 31.0 / 32.0 : -31.0 / 32.0;
        if (i >= 3 && j < 3) expect = 0.0;
        CHECK(std::abs(res.generalized_mass(i, j) - expect) <= 1e-12);
      }
  }
  SUBCASE("final Gram is the identity") {
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        CHECK(std::abs(res.biorthogonal_gram(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-12);
  }
  SUBCASE("dual functions vanish at the vertices") {
    for (int j = 0; j < 6; ++j)
      for (int corner : res.corner_nodes) CHECK(res.dual(j, corner) == 0.0);
  }
  SUBCASE("the fine mass is normalized to unit area") {
    double total = 0.0;
    for (double v : res.fine_mass.a) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
  SUBCASE("P1 nodal functions lie in the primal span") {
    const int nf = res.primal.cols;
    // least-squares in the fine-space mass inner product
    DenseMatrix G(6, 6);
    DenseMatrix rhs(6, 3);
    auto inner = [&](const double* a, const double* b) {
      double s = 0.0;
      for (int r = 0; r < nf; ++r) {
        double mr = 0.0;
        for (int c = 0; c < nf; ++c) mr += res.fine_mass(r, c) * b[c];
        s += a[r] * mr;
      }
      return s;
    };
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j)
        G(i, j) = inner(&res.primal.a[static_cast<size_t>(i) * nf],
                        &res.primal.a[static_cast<size_t>(j) * nf]);
      for (int k = 0; k < 3; ++k)
        rhs(i, k) = inner(&res.primal.a[static_cast<size_t>(i) * nf],
                          &res.p1_nodal.a[static_cast<size_t>(k) * nf]);
    }
    for (int k = 0; k < 3; ++k) {
      std::vector<double> b(6);
      for (int i = 0; i < 6; ++i) b[i] = rhs(i, k);
      std::vector<double> coef = paradat::lu_solve(G, b);
      // residual in the mass norm
      std::vector<double> diff(nf);
      for (int c = 0; c < nf; ++c) {
        double s = res.p1_nodal(k, c);
        for (int i = 0; i < 6; ++i) s -= coef[i] * res.primal(i, c);
        diff[c] = s;
      }
      CHECK(std::sqrt(std::max(inner(diff.data(), diff.data()), 0.0)) <= 1e-12);
    }
  }
  SUBCASE("primal span has full dimension") {
    // the Gram of the primal set must be nonsingular
    const int nf = res.primal.cols;
    DenseMatrix G(6, 6);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        double s = 0.0;
        for (int r = 0; r < nf; ++r) {
          double mr = 0.0;
          for (int c = 0; c < nf; ++c) mr += res.fine_mass(r, c) * res.primal(j, c);
          s += res.primal(i, r) * mr;
        }
        G(i, j) = s;
      }
    paradat::EigResult eig = paradat::sym_eig(G);
    CHECK(eig.values.front() > 1e-6);
  }
}
