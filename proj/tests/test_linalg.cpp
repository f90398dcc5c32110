#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "paradat/basis.hpp"
#include "paradat/factor_matrix.hpp"
#include "paradat/linalg.hpp"
#include "paradat/pcg.hpp"

using namespace paradat;

namespace {

DenseMatrix random_spd(int n, std::mt19937& rng, double shift = 1.0) {
  std::normal_distribution<double> N01;
  DenseMatrix B(n, n);
  for (auto& v : B.a) v = N01(rng);
  DenseMatrix A = B.transpose().matmul(B);
  for (int i = 0; i < n; ++i) A(i, i) += shift;
  return A;
}

}  // namespace

TEST_CASE("lu_solve") {
  std::mt19937 rng(1);
  for (int n : {1, 5, 20}) {
    DenseMatrix A = random_spd(n, rng);
    std::vector<double> x = oracle::random_vector(n, rng);
    std::vector<double> b = A.multiply(x);
    std::vector<double> got = lu_solve(A, b);
    CHECK(oracle::max_abs_diff(got, x) <= 1e-9 * (1 + oracle::max_abs(x)));
  }
  SUBCASE("general matrices exercise the pivot replay") {
    std::normal_distribution<double> N01;
    for (int n : {3, 10, 60, 175}) {
      DenseMatrix A(n, n);
      for (auto& v : A.a) v = N01(rng);
      std::vector<double> x = oracle::random_vector(n, rng);
      std::vector<double> b = A.multiply(x);
      std::vector<double> got = lu_solve(A, b);
      CHECK(oracle::max_abs_diff(got, x) <= 1e-8 * (1 + oracle::max_abs(x)));
    }
    // a fixed matrix whose pivot order reshuffles every row
    DenseMatrix P(3, 3);
    P(0, 1) = 1.0;
    P(1, 2) = 3.0;
    P(2, 0) = 6.0;
    P(0, 2) = 2.0;
    P(1, 0) = 0.5;
    P(2, 1) = 7.0;
    std::vector<double> x{1.0, -2.0, 4.0};
    CHECK(oracle::max_abs_diff(lu_solve(P, P.multiply(x)), x) <= 1e-12);
  }
  DenseMatrix S(2, 2);  // singular
  CHECK_THROWS_AS(lu_solve(S, {1.0, 1.0}), std::runtime_error);
}

TEST_CASE("symmetric eigensolver") {
  SUBCASE("diagonal") {
    DenseMatrix A(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    EigResult r = sym_eig(A);
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(2.0));
  }
  SUBCASE("random symmetric: residual and orthogonality") {
    std::mt19937 rng(2);
    for (int n : {3, 10, 40}) {
      DenseMatrix A = random_spd(n, rng, 0.1);
      EigResult r = sym_eig(A);
      for (int j = 0; j < n; ++j) {
        std::vector<double> v(n), Av(n, 0.0);
        for (int i = 0; i < n; ++i) v[i] = r.vectors(i, j);
        Av = A.multiply(v);
        for (int i = 0; i < n; ++i) Av[i] -= r.values[j] * v[i];
        CHECK(norm2(Av) <= 1e-10 * (1.0 + std::abs(r.values[j])));
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double s = 0.0;
          for (int k = 0; k < n; ++k) s += r.vectors(k, i) * r.vectors(k, j);
          CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    }
  }
}

TEST_CASE("generalized eigensolver") {
  SUBCASE("geig(diag(1,2), Id)") {
    DenseMatrix A(2, 2), M = DenseMatrix::identity(2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    EigResult r = dense_geig(A, M);
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(2.0));
  }
  SUBCASE("random SPD pencil: residual and M-orthonormality") {
    std::mt19937 rng(3);
    for (int n : {4, 15}) {
      DenseMatrix A = random_spd(n, rng, 0.5);
      DenseMatrix M = random_spd(n, rng, 2.0);
      EigResult r = dense_geig(A, M);
      for (int j = 0; j < n; ++j) {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = r.vectors(i, j);
        std::vector<double> Av = A.multiply(v), Mv = M.multiply(v);
        for (int i = 0; i < n; ++i) Av[i] -= r.values[j] * Mv[i];
        CHECK(norm2(Av) <= 1e-10 * (1.0 + std::abs(r.values[j])) * 10);
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          std::vector<double> vi(n), vj(n);
          for (int k = 0; k < n; ++k) {
            vi[k] = r.vectors(k, i);
            vj[k] = r.vectors(k, j);
          }
          const double s = dot(vi, M.multiply(vj));
          CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-10);
        }
    }
  }
  SUBCASE("P1 Dirichlet eigenvalue approaches pi^2 from above") {
    BasisTable xx = build_space({Continuity::C0, 1, Boundary::ZeroTrace, Interval1D(0, 1, 8), 0});
    DenseMatrix A(xx.dim, xx.dim), M(xx.dim, xx.dim);
    A.a = stiffness(xx, xx).dense();
    M.a = mass(xx, xx).dense();
    EigResult r = dense_geig(A, M);
    const double pi2 = M_PI * M_PI;
    CHECK(r.values[0] >= pi2);
    CHECK(r.values[0] <= 1.02 * pi2);
  }
  SUBCASE("non-SPD M rejected") {
    DenseMatrix A = DenseMatrix::identity(2);
    DenseMatrix M(2, 2);
    M(0, 0) = 1.0;
    M(1, 1) = -1.0;
    CHECK_THROWS_AS(dense_geig(A, M), std::runtime_error);
  }
}

TEST_CASE("banded Cholesky") {
  SUBCASE("identity") {
    BandedCholesky chol = BandedCholesky::from_dense(DenseMatrix::identity(5), 0);
    std::vector<double> b{1, 2, 3, 4, 5};
    CHECK(oracle::max_abs_diff(chol.solve(b), b) == 0.0);
  }
  SUBCASE("SPD banded vs LU, residual below 1e-12") {
    std::mt19937 rng(4);
    for (int n : {3, 12, 60}) {
      DenseMatrix A(n, n);
      for (int i = 0; i < n; ++i) {
        A(i, i) = 4.0 + 0.1 * (i % 3);
        if (i > 0) A(i, i - 1) = A(i - 1, i) = -1.0;
        if (i > 1) A(i, i - 2) = A(i - 2, i) = 0.3;
      }
      BandedCholesky chol = BandedCholesky::from_dense(A, 2);
      std::vector<double> b = oracle::random_vector(n, rng);
      std::vector<double> x = chol.solve(b);
      std::vector<double> r = A.multiply(x);
      for (int i = 0; i < n; ++i) r[i] -= b[i];
      CHECK(norm2(r) <= 1e-12 * norm2(b));
    }
  }
  SUBCASE("non-SPD detected") {
    DenseMatrix A = DenseMatrix::identity(3);
    A(2, 2) = -1.0;
    CHECK_THROWS_AS(BandedCholesky::from_dense(A, 0), std::runtime_error);
  }
}

TEST_CASE("tridiagonal eigenvalues") {
  const int n = 9;
  std::vector<double> d(n, 2.0), e(n - 1, -1.0);
  std::vector<double> vals = tridiag_eigenvalues(d, e);
  for (int k = 1; k <= n; ++k) {
    const double expect = 2.0 - 2.0 * std::cos(k * M_PI / (n + 1));
    CHECK(vals[k - 1] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("fft and DST-I") {
  std::mt19937 rng(5);
  SUBCASE("fft round trip") {
    std::vector<std::complex<double>> a(64);
    for (auto& v : a) v = {oracle::random_vector(1, rng)[0], oracle::random_vector(1, rng)[0]};
    auto b = a;
    fft(b, false);
    fft(b, true);
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b[i] - a[i]) <= 1e-12);
  }
  SUBCASE("dst1 matches the direct sine sum and is an involution") {
    const int m = 31;
    std::vector<double> x = oracle::random_vector(m, rng), y(m), z(m);
    dst1(x.data(), y.data(), m);
    for (int k = 1; k <= m; ++k) {
      double s = 0.0;
      for (int j = 1; j <= m; ++j) s += x[j - 1] * std::sin(M_PI * j * k / (m + 1));
      CHECK(std::abs(y[k - 1] - s) <= 1e-12 * (1.0 + std::abs(s)));
    }
    dst1(y.data(), z.data(), m);
    for (int i = 0; i < m; ++i)
      CHECK(z[i] == doctest::Approx(0.5 * (m + 1) * x[i]).epsilon(1e-12));
  }
  SUBCASE("dst1 size validation") {
    std::vector<double> x(5), y(5);
    CHECK_THROWS_AS(dst1(x.data(), y.data(), 5), std::invalid_argument);
  }
}

TEST_CASE("pcg basics") {
  auto ident = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
  SUBCASE("identity converges in one iteration") {
    std::vector<double> b{1.0, -2.0, 0.5};
    PcgConfig cfg;
    cfg.tol = 1e-12;
    cfg.record_lanczos = true;
    PcgResult r = pcg(ident, ident, b, cfg);
    CHECK(r.converged);
    CHECK(r.iters == 1);
    CHECK(oracle::max_abs_diff(r.x, b) <= 1e-14);
    CHECK(r.spectral.cond_est == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("diag(1,4,9) resolves the condition number in three iterations") {
    auto A = [](const std::vector<double>& x, std::vector<double>& y) {
      y = {x[0], 4.0 * x[1], 9.0 * x[2]};
    };
    std::vector<double> b{1.0, 1.0, 1.0};
    PcgConfig cfg;
    cfg.tol = 1e-13;
    cfg.record_lanczos = true;
    PcgResult r = pcg(A, ident, b, cfg);
    CHECK(r.converged);
    CHECK(r.iters <= 3);
    CHECK(r.spectral.cond_est == doctest::Approx(9.0).epsilon(1e-6));
  }
  SUBCASE("1D Laplacian with Jacobi preconditioner matches the banded solve") {
    const int n = 50;
    DenseMatrix L(n, n);
    for (int i = 0; i < n; ++i) {
      L(i, i) = 2.0;
      if (i > 0) L(i, i - 1) = L(i - 1, i) = -1.0;
    }
    auto A = [&](const std::vector<double>& x, std::vector<double>& y) { y = L.multiply(x); };
    auto K = [](const std::vector<double>& x, std::vector<double>& y) {
      y.resize(x.size());
      for (size_t i = 0; i < x.size(); ++i) y[i] = 0.5 * x[i];
    };
    std::mt19937 rng(6);
    std::vector<double> b = oracle::random_vector(n, rng);
    PcgConfig cfg;
    cfg.tol = 1e-13;
    cfg.max_iters = 500;
    PcgResult r = pcg(A, K, b, cfg);
    std::vector<double> x_ref = BandedCholesky::from_dense(L, 1).solve(b);
    CHECK(r.converged);
    CHECK(oracle::max_abs_diff(r.x, x_ref) <= 1e-10 * (1.0 + oracle::max_abs(x_ref)));
  }
  SUBCASE("invalid configuration") {
    PcgConfig cfg;
    cfg.max_iters = 0;
    CHECK_THROWS_AS(pcg(ident, ident, {1.0}, cfg), std::invalid_argument);
    PcgConfig cfg2;
    cfg2.stop_rule = StopRule::EstimatorCoupled;
    CHECK_THROWS_AS(pcg(ident, ident, {1.0}, cfg2), std::invalid_argument);
  }
  SUBCASE("max_iters exceeded is reported with a partial result") {
    const int n = 60;
    DenseMatrix L(n, n);
    for (int i = 0; i < n; ++i) {
      L(i, i) = 2.0;
      if (i > 0) L(i, i - 1) = L(i - 1, i) = -1.0;
    }
    auto A = [&](const std::vector<double>& x, std::vector<double>& y) { y = L.multiply(x); };
    std::vector<double> b(n, 1.0);
    PcgConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_iters = 3;
    PcgResult r = pcg(A, ident, b, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.reason == "max_iters exceeded");
    CHECK(r.iters == 3);
    CHECK(r.x.size() == b.size());
  }
  SUBCASE("indefinite operator reports breakdown") {
    auto A = [](const std::vector<double>& x, std::vector<double>& y) {
      y = {-x[0], x[1]};
    };
    PcgConfig cfg;
    PcgResult r = pcg(A, ident, {1.0, 0.0}, cfg);
    CHECK_FALSE(r.converged);
    CHECK(r.reason.find("curvature") != std::string::npos);
  }
}

TEST_CASE("pcg A-norm error decreases monotonically") {
  std::mt19937 rng(7);
  const int n = 30;
  DenseMatrix A = random_spd(n, rng, 5.0);  // moderate conditioning
  std::vector<double> b = oracle::random_vector(n, rng);
  std::vector<double> x_star = lu_solve(A, b);
  auto Aop = [&](const std::vector<double>& x, std::vector<double>& y) { y = A.multiply(x); };
  auto ident = [](const std::vector<double>& x, std::vector<double>& y) { y = x; };
  std::vector<double> errors;
  auto probe = [&](const std::vector<double>& x, double) {
    std::vector<double> e(n);
    for (int i = 0; i < n; ++i) e[i] = x[i] - x_star[i];
    errors.push_back(std::sqrt(dot(e, A.multiply(e))));
    return false;
  };
  PcgConfig cfg;
  cfg.stop_rule = StopRule::EstimatorCoupled;
  cfg.max_iters = n;
  pcg(Aop, ident, b, cfg, probe);
  CHECK(errors.back() <= 1e-8 * errors.front());
  for (size_t i = 1; i < errors.size(); ++i) CHECK(errors[i] <= errors[i - 1] * (1.0 + 1e-8));
}

TEST_CASE("Lanczos estimates are interior and sharp when converged") {
  std::mt19937 rng(8);
  for (int n : {20, 120}) {
    DenseMatrix A = random_spd(n, rng, 0.05);
    DenseMatrix Kd = DenseMatrix::identity(n);
    for (int i = 0; i < n; ++i) Kd(i, i) = 1.0 / A(i, i);  // Jacobi
    auto Aop = [&](const std::vector<double>& x, std::vector<double>& y) { y = A.multiply(x); };
    auto Kop = [&](const std::vector<double>& x, std::vector<double>& y) {
      y.resize(x.size());
      for (int i = 0; i < n; ++i) y[i] = Kd(i, i) * x[i];
    };
    // true spectrum of K A: gen-eig A v = lambda K^-1 v
    DenseMatrix Kinv(n, n);
    for (int i = 0; i < n; ++i) Kinv(i, i) = A(i, i);
    EigResult truth = dense_geig(A, Kinv);
    const double true_cond = truth.values.back() / truth.values.front();

    std::vector<double> b = oracle::random_vector(n, rng);
    PcgConfig cfg;
    cfg.tol = 1e-12;
    cfg.max_iters = 10 * n;
    cfg.record_lanczos = true;
    PcgResult r = pcg(Aop, Kop, b, cfg);
    CHECK(r.converged);
    CHECK(r.spectral.cond_est <= true_cond * (1.0 + 1e-8));
    CHECK(r.spectral.cond_est >= 0.95 * true_cond);
  }
}
