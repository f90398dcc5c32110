#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace paradat {

struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;  // row-major

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static DenseMatrix identity(int n);
  std::vector<double> multiply(const std::vector<double>& x) const;
  DenseMatrix transpose() const;
  DenseMatrix matmul(const DenseMatrix& other) const;
};

inline double dot(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

inline void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double norm2(const std::vector<double>& x);

/// Solve A x = b by LU with partial pivoting (A is copied).
std::vector<double> lu_solve(DenseMatrix A, std::vector<double> b);

struct EigResult {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // columns are eigenvectors
};

/// Eigen-decomposition of a symmetric matrix (Householder + implicit QL).
EigResult sym_eig(const DenseMatrix& A);

/// Eigenvalues of a symmetric tridiagonal matrix, ascending.
std::vector<double> tridiag_eigenvalues(std::vector<double> diag, std::vector<double> offdiag);

/// Generalized symmetric eigenproblem A V = M V Λ with M SPD; VᵀMV = Id.
EigResult dense_geig(const DenseMatrix& A, const DenseMatrix& M);

/// Cholesky factorization of a banded SPD matrix with half-bandwidth bw.
class BandedCholesky {
 public:
  /// band(i, d) holds A(i, i - bw + d) for d = 0..bw (lower band, padded).
  BandedCholesky(int n, int bw, std::vector<double> band);
  static BandedCholesky from_dense(const DenseMatrix& A, int bw);

  void solve(const double* b, double* x) const;
  std::vector<double> solve(const std::vector<double>& b) const;
  int size() const { return n_; }

 private:
  int n_;
  int bw_;
  std::vector<double> f_;  // factored band, same layout
};

/// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

/// DST-I: y_k = Σ_{j=1}^{m} x_j sin(π j k / (m+1)), k = 1..m, with m = x.size().
/// m + 1 must be a power of two. The transform is its own inverse up to the
/// factor 2/(m+1).
void dst1(const double* x, double* y, int m);

bool is_power_of_two(int n);

}  // namespace paradat
