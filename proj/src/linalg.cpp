#include "paradat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace paradat {

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(rows, 0.0);
  for (int i = 0; i < rows; ++i) {
    double s = 0.0;
    const double* row = a.data() + static_cast<size_t>(i) * cols;
    for (int j = 0; j < cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix t(cols, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
  return t;
}

DenseMatrix DenseMatrix::matmul(const DenseMatrix& other) const {
  if (cols != other.rows) throw std::invalid_argument("DenseMatrix::matmul: shape mismatch");
  DenseMatrix out(rows, other.cols);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < other.cols; ++j) out(i, j) += v * other(k, j);
    }
  return out;
}

double norm2(const std::vector<double>& x) { return std::sqrt(dot(x, x)); }

std::vector<double> lu_solve(DenseMatrix A, std::vector<double> b) {
  const int n = A.rows;
  if (A.cols != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("lu_solve: square system required");
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    piv[k] = p;
    if (p != k)
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
    if (A(k, k) == 0.0) throw std::runtime_error("lu_solve: singular matrix");
    for (int i = k + 1; i < n; ++i) {
      A(i, k) /= A(k, k);
      const double lik = A(i, k);
      if (lik == 0.0) continue;
      for (int j = k + 1; j < n; ++j) A(i, j) -= lik * A(k, j);
    }
  }
  // the stored factors live in the final row order, so the whole pivot
  // sequence must be applied to b before substitution
  for (int k = 0; k < n; ++k) std::swap(b[k], b[piv[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) b[i] -= A(i, k) * b[k];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) b[i] -= A(i, j) * b[j];
    b[i] /= A(i, i);
  }
  return b;
}

namespace {

// Householder reduction to tridiagonal form with accumulated transforms.
void tred2(DenseMatrix& z, std::vector<double>& d, std::vector<double>& e) {
  const int n = z.rows;
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (int i = n - 1; i > 0; --i) {
    const int l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (int k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (int j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (int j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (int k = 0; k <= j; ++k) z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    const int l = i - 1;
    if (d[i] != 0.0) {
      for (int j = 0; j <= l; ++j) {
        double g = 0.0;
        for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
        for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
  }
}

double pythag(double a, double b) {
  const double aa = std::abs(a), ab = std::abs(b);
  if (aa > ab) {
    const double r = ab / aa;
    return aa * std::sqrt(1.0 + r * r);
  }
  if (ab == 0.0) return 0.0;
  const double r = aa / ab;
  return ab * std::sqrt(1.0 + r * r);
}

// Implicit-shift QL on a tridiagonal matrix; z may be null (values only).
void tql2(std::vector<double>& d, std::vector<double>& e, DenseMatrix* z) {
  const int n = static_cast<int>(d.size());
  for (int i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 100) throw std::runtime_error("tql2: too many iterations");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (z) {
            for (int k = 0; k < z->rows; ++k) {
              f = (*z)(k, i + 1);
              (*z)(k, i + 1) = s * (*z)(k, i) + c * f;
              (*z)(k, i) = c * (*z)(k, i) - s * f;
            }
          }
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  // sort ascending
  for (int i = 0; i < n - 1; ++i) {
    int k = i;
    for (int j = i + 1; j < n; ++j)
      if (d[j] < d[k]) k = j;
    if (k != i) {
      std::swap(d[i], d[k]);
      if (z)
        for (int r = 0; r < z->rows; ++r) std::swap((*z)(r, i), (*z)(r, k));
    }
  }
}

}  // namespace

EigResult sym_eig(const DenseMatrix& A) {
  if (A.rows != A.cols) throw std::invalid_argument("sym_eig: square matrix required");
  EigResult res;
  if (A.rows == 0) return res;
  res.vectors = A;
  std::vector<double> e;
  tred2(res.vectors, res.values, e);
  tql2(res.values, e, &res.vectors);
  return res;
}

std::vector<double> tridiag_eigenvalues(std::vector<double> diag, std::vector<double> offdiag) {
  const size_t n = diag.size();
  if (n == 0) return {};
  std::vector<double> e(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) e[i + 1] = offdiag[i];
  tql2(diag, e, nullptr);
  return diag;
}

EigResult dense_geig(const DenseMatrix& A, const DenseMatrix& M) {
  const int n = A.rows;
  if (A.cols != n || M.rows != n || M.cols != n)
    throw std::invalid_argument("dense_geig: shape mismatch");
  // M = L Lᵀ
  DenseMatrix L(n, n);
  for (int j = 0; j < n; ++j) {
    double s = M(j, j);
    for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    if (s <= 0.0) throw std::runtime_error("dense_geig: M not positive definite");
    L(j, j) = std::sqrt(s);
    for (int i = j + 1; i < n; ++i) {
      double t = M(i, j);
      for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / L(j, j);
    }
  }
  // C = L⁻¹ A L⁻ᵀ: first W = L⁻¹ A (forward solves per column), then
  // C = W L⁻ᵀ via forward solves on rows of Wᵀ.
  DenseMatrix W(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      double s = A(i, j);
      for (int k = 0; k < i; ++k) s -= L(i, k) * W(k, j);
      W(i, j) = s / L(i, i);
    }
  }
  DenseMatrix C(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = W(i, j);
      for (int k = 0; k < j; ++k) s -= L(j, k) * C(i, k);
      C(i, j) = s / L(j, j);
    }
  }
  // symmetrize against roundoff
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (C(i, j) + C(j, i));
      C(i, j) = C(j, i) = v;
    }
  EigResult res = sym_eig(C);
  // back-transform: V = L⁻ᵀ Q
  for (int j = 0; j < n; ++j) {
    for (int i = n - 1; i >= 0; --i) {
      double s = res.vectors(i, j);
      for (int k = i + 1; k < n; ++k) s -= L(k, i) * res.vectors(k, j);
      res.vectors(i, j) = s / L(i, i);
    }
  }
  return res;
}

BandedCholesky::BandedCholesky(int n, int bw, std::vector<double> band)
    : n_(n), bw_(bw), f_(std::move(band)) {
  if (static_cast<int>(f_.size()) != n * (bw + 1))
    throw std::invalid_argument("BandedCholesky: band storage size mismatch");
  auto at = [&](int i, int j) -> double& { return f_[static_cast<size_t>(i) * (bw_ + 1) + (j - i + bw_)]; };
  for (int i = 0; i < n_; ++i) {
    const int j0 = std::max(0, i - bw_);
    for (int j = j0; j <= i; ++j) {
      double s = at(i, j);
      const int k0 = std::max(j0, j - bw_);
      for (int k = k0; k < j; ++k) s -= at(i, k) * at(j, k);
      if (j == i) {
        if (s <= 0.0) throw std::runtime_error("BandedCholesky: matrix not positive definite");
        at(i, i) = std::sqrt(s);
      } else {
        at(i, j) = s / at(j, j);
      }
    }
  }
}

BandedCholesky BandedCholesky::from_dense(const DenseMatrix& A, int bw) {
  const int n = A.rows;
  std::vector<double> band(static_cast<size_t>(n) * (bw + 1), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - bw); j <= i; ++j)
      band[static_cast<size_t>(i) * (bw + 1) + (j - i + bw)] = A(i, j);
  return BandedCholesky(n, bw, std::move(band));
}

void BandedCholesky::solve(const double* b, double* x) const {
  auto at = [&](int i, int j) { return f_[static_cast<size_t>(i) * (bw_ + 1) + (j - i + bw_)]; };
  for (int i = 0; i < n_; ++i) {
    double s = b[i];
    for (int j = std::max(0, i - bw_); j < i; ++j) s -= at(i, j) * x[j];
    x[i] = s / at(i, i);
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double s = x[i];
    const int jmax = std::min(n_ - 1, i + bw_);
    for (int j = i + 1; j <= jmax; ++j) s -= at(j, i) * x[j];
    x[i] = s / at(i, i);
  }
}

std::vector<double> BandedCholesky::solve(const std::vector<double>& b) const {
  std::vector<double> x(n_);
  solve(b.data(), x.data());
  return x;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (!is_power_of_two(static_cast<int>(n))) throw std::invalid_argument("fft: power-of-two size");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

void dst1(const double* x, double* y, int m) {
  const int n = m + 1;
  if (!is_power_of_two(n)) throw std::invalid_argument("dst1: m + 1 must be a power of two");
  // odd extension of length 2n, then one complex FFT
  thread_local std::vector<std::complex<double>> z;
  z.assign(2 * static_cast<size_t>(n), {0.0, 0.0});
  for (int j = 1; j <= m; ++j) {
    z[j] = {x[j - 1], 0.0};
    z[2 * n - j] = {-x[j - 1], 0.0};
  }
  fft(z, false);
  for (int k = 1; k <= m; ++k) y[k - 1] = -0.5 * z[k].imag();
}

}  // namespace paradat
