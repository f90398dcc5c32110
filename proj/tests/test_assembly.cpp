#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "paradat/assembly.hpp"
#include "paradat/factor_matrix.hpp"
#include "paradat/second_order.hpp"

using namespace paradat;

namespace {

TensorSpaces make_spaces(int n, std::vector<int> levels, bool reduced = false) {
  return TensorSpaces::create(TensorGrid::unit(n), levels, reduced);
}

// Space-time quadrature oracle for ∫∫ (d^a_t d^b_x of col basis)(row basis
// with derivatives) built from global point evaluation only.
std::vector<double> spacetime_oracle(const BasisTable& row_t, const BasisTable& row_x,
                                     const BasisTable& col_t, const BasisTable& col_x,
                                     int rt_d, int rx_d, int ct_d, int cx_d) {
  DenseMatrix Mt = oracle::quadrature_form(row_t, col_t, rt_d, ct_d, 0.0, 1.0);
  DenseMatrix Mx = oracle::quadrature_form(row_x, col_x, rx_d, cx_d, 0.0, 1.0);
  const int R = row_t.dim * row_x.dim, C = col_t.dim * col_x.dim;
  std::vector<double> out(static_cast<size_t>(R) * C, 0.0);
  for (int it = 0; it < row_t.dim; ++it)
    for (int jt = 0; jt < col_t.dim; ++jt)
      for (int ix = 0; ix < row_x.dim; ++ix)
        for (int jx = 0; jx < col_x.dim; ++jx)
          out[static_cast<size_t>(it * row_x.dim + ix) * C + (jt * col_x.dim + jx)] =
              Mt(it, jt) * Mx(ix, jx);
  return out;
}

}  // namespace

TEST_CASE("P1 mass and stiffness stencils") {
  BasisTable xx = build_space({Continuity::C0, 1, Boundary::ZeroTrace, Interval1D(0, 1, 4), 0});
  const double h = 0.25;
  FactorMatrix M = mass(xx, xx);
  FactorMatrix A = stiffness(xx, xx);
  for (int i = 0; i < 3; ++i) {
    CHECK(M.entry(i, i) == doctest::Approx(4 * h / 6).epsilon(1e-14));
    CHECK(A.entry(i, i) == doctest::Approx(2 / h).epsilon(1e-14));
    if (i > 0) {
      CHECK(M.entry(i, i - 1) == doctest::Approx(h / 6).epsilon(1e-14));
      CHECK(A.entry(i, i - 1) == doctest::Approx(-1 / h).epsilon(1e-14));
    }
  }
  SUBCASE("masked mass over the full window equals mass") {
    FactorMatrix Mw = masked_mass(xx, xx, ObservationWindow(0.0, 1.0));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(Mw.entry(i, j) == doctest::Approx(M.entry(i, j)));
  }
  SUBCASE("symmetry of mass and stiffness") {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(M.entry(i, j) - M.entry(j, i)) <= 1e-13);
        CHECK(std::abs(A.entry(i, j) - A.entry(j, i)) <= 1e-13);
      }
  }
}

TEST_CASE("cross-mesh mass via prolongation matches independent quadrature") {
  BasisTable coarse = build_space({Continuity::C0, 1, Boundary::ZeroTrace, Interval1D(0, 1, 3), 0});
  BasisTable fine = build_space({Continuity::C0, 1, Boundary::ZeroTrace, Interval1D(0, 1, 3), 2});
  FactorMatrix M = mass(fine, coarse);
  DenseMatrix O = oracle::quadrature_form(fine, coarse, 0, 0, 0.0, 1.0);
  for (int i = 0; i < fine.dim; ++i)
    for (int j = 0; j < coarse.dim; ++j) CHECK(std::abs(M.entry(i, j) - O(i, j)) <= 1e-13);

  FactorMatrix A = stiffness(fine, coarse);
  DenseMatrix OA = oracle::quadrature_form(fine, coarse, 1, 1, 0.0, 1.0);
  for (int i = 0; i < fine.dim; ++i)
    for (int j = 0; j < coarse.dim; ++j) CHECK(std::abs(A.entry(i, j) - OA(i, j)) <= 1e-11);

  SUBCASE("transposed orientation agrees") {
    FactorMatrix Mt = mass(coarse, fine);
    for (int i = 0; i < coarse.dim; ++i)
      for (int j = 0; j < fine.dim; ++j)
        CHECK(std::abs(Mt.entry(i, j) - M.entry(j, i)) <= 1e-14);
  }
  SUBCASE("incompatible meshes rejected") {
    BasisTable other = build_space({Continuity::C0, 1, Boundary::ZeroTrace, Interval1D(0, 1, 5), 0});
    CHECK_THROWS_AS(mass(fine, other), std::invalid_argument);
  }
}

TEST_CASE("assemble_B matches the space-time quadrature oracle") {
  for (int level : {0, 1}) {
    TensorSpaces s = make_spaces(2, {level});
    KroneckerOp B = assemble_B(s, level);
    std::vector<double> dense = B.materialize();
    const BasisTable& yx = s.yx(level);
    // (Bw)(v) = ∫∫ ∂t w v + ∂x w ∂x v
    std::vector<double> o1 = spacetime_oracle(s.yt, yx, s.xt, s.xx, 0, 0, 1, 0);
    std::vector<double> o2 = spacetime_oracle(s.yt, yx, s.xt, s.xx, 0, 1, 0, 1);
    for (size_t k = 0; k < dense.size(); ++k)
      CHECK(std::abs(dense[k] - o1[k] - o2[k]) <= 1e-11);
  }
}

TEST_CASE("optional convection and reaction coefficients") {
  TensorSpaces s = make_spaces(2, {0});
  HeatCoefficients coeffs{0.3, -0.5};
  KroneckerOp B = assemble_B(s, 0, coeffs);
  std::vector<double> dense = B.materialize();
  std::vector<double> expect = spacetime_oracle(s.yt, s.yx(0), s.xt, s.xx, 0, 0, 1, 0);
  const std::vector<double> diffusion = spacetime_oracle(s.yt, s.yx(0), s.xt, s.xx, 0, 1, 0, 1);
  const std::vector<double> convection = spacetime_oracle(s.yt, s.yx(0), s.xt, s.xx, 0, 0, 0, 1);
  const std::vector<double> reaction = spacetime_oracle(s.yt, s.yx(0), s.xt, s.xx, 0, 0, 0, 0);
  for (size_t k = 0; k < dense.size(); ++k) {
    expect[k] += diffusion[k] + 0.3 * convection[k] - 0.5 * reaction[k];
    CHECK(std::abs(dense[k] - expect[k]) <= 1e-11);
  }
  FoslsOps ops = assemble_fosls(s, 0, coeffs);
  std::vector<double> cu = ops.C_u.materialize();
  std::vector<double> cu_expect = spacetime_oracle(s.ybar_t, s.yx(0), s.xt, s.xx, 0, 0, 1, 0);
  for (size_t k = 0; k < cu.size(); ++k) {
    cu_expect[k] += 0.3 * convection[k] - 0.5 * reaction[k];
    CHECK(std::abs(cu[k] - cu_expect[k]) <= 1e-11);
  }
}

TEST_CASE("time-derivative factor annihilates constants in time") {
  TensorSpaces s = make_spaces(4, {0});
  FactorMatrix Dt = deriv(s.yt, s.xt);
  std::vector<double> ones(s.xt.dim, 1.0), out(s.yt.dim);
  Dt.multiply(ones.data(), out.data());
  CHECK(oracle::max_abs(out) <= 1e-13);
}

TEST_CASE("KroneckerOp transpose consistency") {
  std::mt19937 rng(3);
  TensorSpaces s = make_spaces(3, {1});
  KroneckerOp B = assemble_B(s, 1);
  std::vector<double> x = oracle::random_vector(B.rows(), rng);
  std::vector<double> y, scratch;
  B.apply_transpose(x, y, scratch);
  std::vector<double> dense = B.materialize();
  std::vector<double> expect(B.cols(), 0.0);
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) expect[j] += dense[static_cast<size_t>(i) * B.cols() + j] * x[i];
  CHECK(oracle::max_abs_diff(y, expect) <= 1e-11 * (1.0 + oracle::max_abs(expect)));
}

TEST_CASE("every KroneckerOp equals its materialization on random vectors") {
  std::mt19937 rng(17);
  TensorSpaces s = make_spaces(4, {0, 2});
  std::vector<KroneckerOp> ops;
  ops.push_back(assemble_B(s, 2));
  ops.push_back(assemble_obs_mass(s, ObservationWindow(0.25, 0.75)));
  ops.push_back(assemble_trace0(s));
  FoslsOps f = assemble_fosls(s, 0);
  ops.push_back(std::move(f.C_u));
  ops.push_back(std::move(f.C_p));
  ops.push_back(std::move(f.J));
  ops.push_back(std::move(f.L));
  ops.push_back(std::move(f.N));
  for (const KroneckerOp& op : ops) {
    REQUIRE(op.rows() * op.cols() <= 5000 * 5000);
    const std::vector<double> dense = op.materialize();
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> x = oracle::random_vector(op.cols(), rng), y, scratch;
      op.apply(x, y, scratch);
      std::vector<double> expect(op.rows(), 0.0);
      for (int i = 0; i < op.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < op.cols(); ++j) acc += dense[static_cast<size_t>(i) * op.cols() + j] * x[j];
        expect[i] = acc;
      }
      const double scale = 1.0 + oracle::max_abs(expect);
      CHECK(oracle::max_abs_diff(y, expect) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("symmetric operators are positive semidefinite") {
  std::mt19937 rng(29);
  TensorSpaces s = make_spaces(3, {0});
  FoslsOps f = assemble_fosls(s, 0);
  const KroneckerOp* ops[] = {&f.L, &f.N};
  KroneckerOp mobs = assemble_obs_mass(s, ObservationWindow(0.3, 0.6));
  KroneckerOp mtrace = assemble_trace0(s);
  std::vector<const KroneckerOp*> all{&mobs, &mtrace, ops[0], ops[1]};
  for (const KroneckerOp* op : all) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x = oracle::random_vector(op->cols(), rng), y, scratch;
      op->apply(x, y, scratch);
      CHECK(dot(x, y) >= -1e-12 * dot(x, x));
    }
  }
}

TEST_CASE("trace operator structure") {
  TensorSpaces s = make_spaces(4, {0});
  KroneckerOp M0 = assemble_trace0(s);
  REQUIRE(M0.terms().size() == 1);
  const FactorMatrix& T = *M0.terms()[0].time;
  SUBCASE("time factor is the rank-one outer product at t = 0") {
    CHECK(T.entry(0, 0) == doctest::Approx(1.0));
    for (int i = 0; i < T.rows; ++i)
      for (int j = 0; j < T.cols; ++j)
        if (i != 0 || j != 0) CHECK(T.entry(i, j) == 0.0);
  }
  SUBCASE("quadratic form vanishes for w(0,.) = 0") {
    std::mt19937 rng(31);
    std::vector<double> u = oracle::random_vector(s.x_dim(), rng);
    for (int j = 0; j < s.xx.dim; ++j) u[j] = 0.0;  // first time node carries t=0
    std::vector<double> y, scratch;
    M0.apply(u, y, scratch);
    CHECK(std::abs(dot(u, y)) <= 1e-13);
  }
  SUBCASE("quadratic form equals the L2 norm of the initial slice") {
    // u = interpolant of sin(pi x), constant in time
    std::vector<double> u(s.x_dim());
    for (int it = 0; it < s.xt.dim; ++it)
      for (int j = 0; j < s.xx.dim; ++j)
        u[static_cast<size_t>(it) * s.xx.dim + j] = std::sin(M_PI * s.xx.mesh.node(j + 1));
    std::vector<double> y, scratch;
    M0.apply(u, y, scratch);
    // independent quadrature of the interpolant's squared norm
    const auto interp = [&](double x) {
      double v = 0.0;
      for (int j = 0; j < s.xx.dim; ++j)
        v += std::sin(M_PI * s.xx.mesh.node(j + 1)) * s.xx.value(j, x);
      return v * v;
    };
    const double expect = oracle::adaptive_simpson(interp, 0.0, 1.0);
    CHECK(dot(u, y) == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("FOSLS operators") {
  TensorSpaces s = make_spaces(2, {0});
  FoslsOps ops = assemble_fosls(s, 0);

  SUBCASE("all five match the quadrature oracle") {
    auto check = [&](const KroneckerOp& op, const std::vector<double>& expect) {
      const std::vector<double> dense = op.materialize();
      REQUIRE(dense.size() == expect.size());
      for (size_t k = 0; k < dense.size(); ++k) CHECK(std::abs(dense[k] - expect[k]) <= 1e-11);
    };
    check(ops.C_u, spacetime_oracle(s.ybar_t, s.yx(0), s.xt, s.xx, 0, 0, 1, 0));
    check(ops.C_p, spacetime_oracle(s.ybar_t, s.yx(0), s.zt, s.zx, 0, 1, 0, 0));
    check(ops.J, spacetime_oracle(s.xt, s.xx, s.zt, s.zx, 0, 1, 0, 0));
    check(ops.L, spacetime_oracle(s.xt, s.xx, s.xt, s.xx, 0, 1, 0, 1));
    check(ops.N, spacetime_oracle(s.zt, s.zx, s.zt, s.zx, 0, 0, 0, 0));
  }

  SUBCASE("N is block-diagonal per time cell") {
    const std::vector<double> dense = ops.N.materialize();
    const int nx = s.zx.dim;
    for (int i = 0; i < ops.N.rows(); ++i)
      for (int j = 0; j < ops.N.cols(); ++j)
        if (i / nx != j / nx) CHECK(dense[static_cast<size_t>(i) * ops.N.cols() + j] == 0.0);
  }

  SUBCASE("C(w, grad w) pairs like B w against the test space") {
    // C_u w plus the quadrature moments of ∫∫ ∂x w_h ∂x v equals B w.
    std::mt19937 rng(41);
    TensorSpaces s2 = make_spaces(3, {1});
    KroneckerOp B = assemble_B(s2, 1);
    FoslsOps f2 = assemble_fosls(s2, 1);
    std::vector<double> w = oracle::random_vector(s2.x_dim(), rng);
    std::vector<double> lhs, scratch;
    f2.C_u.apply(w, lhs, scratch);
    // gradient moments via the oracle factor matrices
    DenseMatrix Mt = oracle::quadrature_form(s2.ybar_t, s2.xt, 0, 0, 0.0, 1.0);
    DenseMatrix Gx = oracle::quadrature_form(s2.yx(1), s2.xx, 1, 1, 0.0, 1.0);
    const int nyx = s2.yx(1).dim;
    for (int it = 0; it < s2.ybar_t.dim; ++it)
      for (int ix = 0; ix < nyx; ++ix) {
        double acc = 0.0;
        for (int jt = 0; jt < s2.xt.dim; ++jt)
          for (int jx = 0; jx < s2.xx.dim; ++jx)
            acc += Mt(it, jt) * Gx(ix, jx) * w[static_cast<size_t>(jt) * s2.xx.dim + jx];
        lhs[static_cast<size_t>(it) * nyx + ix] += acc;
      }
    std::vector<double> rhs;
    B.apply(w, rhs, scratch);
    CHECK(oracle::max_abs_diff(lhs, rhs) <= 1e-10 * (1.0 + oracle::max_abs(rhs)));
  }
}

TEST_CASE("load vectors") {
  SUBCASE("zero state gives zero data") {
    TensorSpaces s = make_spaces(4, {0});
    ProblemData data;
    data.solution = manufactured("zero");
    LoadVectors lv = load_vectors(data, s, 0);
    CHECK(oracle::max_abs(lv.g) == 0.0);
    CHECK(oracle::max_abs(lv.f) == 0.0);
    CHECK(lv.f_norm2 == 0.0);
  }
  SUBCASE("norm of the observed data matches the analytic product integral") {
    // ∫(t³+1)² dt x ∫_ω sin²(πx) dx = 23/14 · (1/4 + 1/(2π))
    const double exact = 23.0 / 14.0 * (0.25 + 0.5 / M_PI);
    const double simpson =
        oracle::adaptive_simpson([](double t) { return (t * t * t + 1) * (t * t * t + 1); }, 0, 1) *
        oracle::adaptive_simpson(
            [](double x) { return std::sin(M_PI * x) * std::sin(M_PI * x); }, 0.25, 0.75);
    CHECK(simpson == doctest::Approx(exact).epsilon(1e-12));
    for (int n : {8, 13}) {
      TensorSpaces s = make_spaces(n, {0});
      ProblemData data;
      LoadVectors lv = load_vectors(data, s, 0);
      CHECK(std::abs(lv.f_norm2 - exact) <= 1e-10 * exact);
    }
  }
  SUBCASE("perturbation adds exactly lambda times the window moments") {
    TensorSpaces s = make_spaces(5, {0});
    ProblemData base;
    ProblemData shifted = base;
    shifted.lambda = 0.01;
    LoadVectors l0 = load_vectors(base, s, 0);
    LoadVectors l1 = load_vectors(shifted, s, 0);
    std::vector<double> window_moments = assemble_functional(
        s.xt, s.xx, [](double, double) { return 1.0; }, base.window);
    for (size_t i = 0; i < l0.f.size(); ++i)
      CHECK(l1.f[i] - l0.f[i] == doctest::Approx(0.01 * window_moments[i]).epsilon(1e-12));
  }
  SUBCASE("forcing vector matches direct quadrature") {
    TensorSpaces s = make_spaces(3, {1});
    ProblemData data;
    LoadVectors lv = load_vectors(data, s, 1);
    const auto& sol = data.solution;
    const BasisTable& yx = s.yx(1);
    // composite Gauss per cell of each factor mesh; the broken time basis
    // makes interval-wide adaptive rules unreliable
    const auto& rule = gauss_rule(10);
    for (int it = 0; it < s.yt.dim; ++it)
      for (int ix = 0; ix < yx.dim; ++ix) {
        double expect = 0.0;
        for (int ct = 0; ct < s.yt.mesh.n; ++ct)
          for (size_t pt = 0; pt < rule.points.size(); ++pt) {
            const double t = s.yt.mesh.node(ct) + rule.points[pt] * s.yt.mesh.h();
            const double vt = s.yt.value(it, t);
            if (vt == 0.0) continue;
            double inner = 0.0;
            for (int cx = 0; cx < yx.mesh.n; ++cx)
              for (size_t px = 0; px < rule.points.size(); ++px) {
                const double x = yx.mesh.node(cx) + rule.points[px] * yx.mesh.h();
                inner += rule.weights[px] * yx.mesh.h() *
                         (sol.du_dt(t, x) - sol.d2u_dx2(t, x)) * yx.value(ix, x);
              }
            expect += rule.weights[pt] * s.yt.mesh.h() * vt * inner;
          }
        CHECK(lv.g[static_cast<size_t>(it) * yx.dim + ix] ==
              doctest::Approx(expect).epsilon(1e-8));
      }
  }
}
