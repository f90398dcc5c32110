#include "paradat/riesz.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace paradat {
namespace {

int bandwidth(const FactorMatrix& m) {
  int bw = 0;
  for (int i = 0; i < m.rows; ++i)
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      bw = std::max(bw, std::abs(i - m.col_idx[k]));
  return bw;
}

std::vector<double> diagonal_of(const FactorMatrix& m, const char* what) {
  std::vector<double> d(m.rows, 0.0);
  double scale = 0.0;
  for (double v : m.vals) scale = std::max(scale, std::abs(v));
  for (int i = 0; i < m.rows; ++i)
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      if (m.col_idx[k] == i)
        d[i] = m.vals[k];
      else if (std::abs(m.vals[k]) > 1e-12 * scale)
        throw std::invalid_argument(std::string(what) + ": time mass must be diagonal "
                                    "(use an L2-orthonormal time basis)");
    }
  for (double v : d)
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + ": singular time mass");
  return d;
}

BandedCholesky factor_spd(const FactorMatrix& m) {
  const int bw = bandwidth(m);
  std::vector<double> band(static_cast<size_t>(m.rows) * (bw + 1), 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const int j = m.col_idx[k];
      if (j <= i) band[static_cast<size_t>(i) * (bw + 1) + (j - i + bw)] = m.vals[k];
    }
  return BandedCholesky(m.rows, bw, std::move(band));
}

// Tridiagonal band (sub, diag) of a symmetric CSR matrix, packed as
// [diag_0, sub_1, diag_1, sub_2, ...] -> we store two arrays via single
// vector: band[2*i] = diag_i, band[2*i+1] = subdiag between i and i+1.
std::vector<double> tridiag_band(const FactorMatrix& m, const char* what) {
  if (bandwidth(m) > 1) throw std::invalid_argument(std::string(what) + ": tridiagonal expected");
  std::vector<double> band(2 * static_cast<size_t>(m.rows), 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) {
      const int j = m.col_idx[k];
      if (j == i) band[2 * static_cast<size_t>(i)] = m.vals[k];
      if (j == i + 1) band[2 * static_cast<size_t>(i) + 1] = m.vals[k];
    }
  return band;
}

// Solve (a*M + b*K) x = rhs for symmetric tridiagonal bands by LDLᵀ (stable
// for SPD combinations).
void tridiag_solve(const std::vector<double>& mband, const std::vector<double>& kband, double a,
                   double b, int n, double* rhs, double* dscratch, double* lscratch) {
  dscratch[0] = a * mband[0] + b * kband[0];
  for (int i = 1; i < n; ++i) {
    const double sub = a * mband[2 * (i - 1) + 1] + b * kband[2 * (i - 1) + 1];
    lscratch[i] = sub / dscratch[i - 1];
    dscratch[i] = a * mband[2 * i] + b * kband[2 * i] - lscratch[i] * sub;
  }
  for (int i = 1; i < n; ++i) rhs[i] -= lscratch[i] * rhs[i - 1];
  rhs[n - 1] /= dscratch[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    const double sub = a * mband[2 * i + 1] + b * kband[2 * i + 1];
    rhs[i] = rhs[i] / dscratch[i] - sub / dscratch[i] * rhs[i + 1];
  }
}

}  // namespace

RieszInverse RieszInverse::make_kron_inverse(Kind kind, const FactorMatrix& time_mass,
                                             const FactorMatrix& space_gram) {
  RieszInverse r;
  r.kind_ = kind;
  r.nt_ = time_mass.rows;
  r.nx_ = space_gram.rows;
  auto d = diagonal_of(time_mass, "RieszInverse");
  r.time_mass_inv_diag_.resize(d.size());
  for (size_t i = 0; i < d.size(); ++i) r.time_mass_inv_diag_[i] = 1.0 / d[i];
  r.space_solver_ = std::make_shared<BandedCholesky>(factor_spd(space_gram));
  return r;
}

RieszInverse RieszInverse::make_KY(const FactorMatrix& time_mass,
                                   const FactorMatrix& space_stiffness) {
  return make_kron_inverse(Kind::KY, time_mass, space_stiffness);
}

RieszInverse RieszInverse::make_KZ(const FactorMatrix& time_mass,
                                   const FactorMatrix& space_mass) {
  return make_kron_inverse(Kind::KZ, time_mass, space_mass);
}

RieszInverse RieszInverse::make_KX(const FactorMatrix& time_mass,
                                   const FactorMatrix& time_stiffness,
                                   const FactorMatrix& space_stiffness,
                                   const FactorMatrix& space_mass, const SpaceDesc& space_desc) {
  RieszInverse r;
  r.kind_ = Kind::KX;
  r.nt_ = time_mass.rows;
  r.nx_ = space_stiffness.rows;
  r.mt_band_ = tridiag_band(time_mass, "make_KX");
  r.kt_band_ = tridiag_band(time_stiffness, "make_KX");

  const Interval1D mesh = space_desc.mesh.bisected(space_desc.refine_level);
  const bool sine_basis = space_desc.continuity == Continuity::C0 && space_desc.degree == 1 &&
                          space_desc.boundary == Boundary::ZeroTrace && is_power_of_two(mesh.n);
  if (sine_basis) {
    // Uniform P1 zero-trace: A_x and M_x share the sine eigenbasis
    // v_k(j) = sin(k pi j / n), with Rayleigh quotients known in closed form.
    r.use_dst_ = true;
    const int n = mesh.n;
    const double h = mesh.h();
    r.eigenvalues_.resize(r.nx_);
    r.dst_scale_.resize(r.nx_);
    for (int k = 1; k <= r.nx_; ++k) {
      const double c = std::cos(k * M_PI / n);
      const double a_hat = 2.0 / h * (1.0 - c);
      const double m_hat = h / 3.0 * (2.0 + c);
      r.eigenvalues_[k - 1] = a_hat / m_hat;
      r.dst_scale_[k - 1] = 1.0 / std::sqrt(m_hat * n / 2.0);
    }
  } else {
    DenseMatrix A(r.nx_, r.nx_), M(r.nx_, r.nx_);
    const auto da = space_stiffness.dense();
    const auto dm = space_mass.dense();
    A.a = da;
    M.a = dm;
    EigResult eig = dense_geig(A, M);
    r.eigenvalues_ = eig.values;
    r.V_ = std::move(eig.vectors);
  }
  for (double lam : r.eigenvalues_)
    if (!(lam > 0.0)) throw std::runtime_error("make_KX: spatial pencil not positive definite");
  return r;
}

void RieszInverse::apply(const double* x, double* y) const {
  if (kind_ == Kind::KX) {
    apply_kx(x, y);
    return;
  }
  for (int it = 0; it < nt_; ++it) {
    space_solver_->solve(x + static_cast<size_t>(it) * nx_, y + static_cast<size_t>(it) * nx_);
    const double s = time_mass_inv_diag_[it];
    double* row = y + static_cast<size_t>(it) * nx_;
    for (int j = 0; j < nx_; ++j) row[j] *= s;
  }
}

void RieszInverse::apply_kx(const double* x, double* y) const {
  thread_local std::vector<double> W, Wt, dscratch, lscratch;
  W.resize(static_cast<size_t>(nt_) * nx_);
  Wt.resize(static_cast<size_t>(nt_) * nx_);
  dscratch.resize(nt_);
  lscratch.resize(nt_);

  // W = (I ⊗ Vᵀ) x : spatial transform per time row
  if (use_dst_) {
    for (int it = 0; it < nt_; ++it) {
      double* wrow = W.data() + static_cast<size_t>(it) * nx_;
      dst1(x + static_cast<size_t>(it) * nx_, wrow, nx_);
      for (int k = 0; k < nx_; ++k) wrow[k] *= dst_scale_[k];
    }
  } else {
    std::memset(W.data(), 0, W.size() * sizeof(double));
    for (int it = 0; it < nt_; ++it) {
      const double* xrow = x + static_cast<size_t>(it) * nx_;
      double* wrow = W.data() + static_cast<size_t>(it) * nx_;
      for (int j = 0; j < nx_; ++j) {
        const double v = xrow[j];
        if (v == 0.0) continue;
        const double* vrow = V_.a.data() + static_cast<size_t>(j) * nx_;
        for (int k = 0; k < nx_; ++k) wrow[k] += v * vrow[k];
      }
    }
  }

  // transpose so each eigenmode's time solve is contiguous
  for (int it = 0; it < nt_; ++it)
    for (int k = 0; k < nx_; ++k)
      Wt[static_cast<size_t>(k) * nt_ + it] = W[static_cast<size_t>(it) * nx_ + k];

  for (int k = 0; k < nx_; ++k) {
    const double lam = eigenvalues_[k];
    tridiag_solve(mt_band_, kt_band_, lam, 1.0 / lam, nt_,
                  Wt.data() + static_cast<size_t>(k) * nt_, dscratch.data(), lscratch.data());
  }

  for (int it = 0; it < nt_; ++it)
    for (int k = 0; k < nx_; ++k)
      W[static_cast<size_t>(it) * nx_ + k] = Wt[static_cast<size_t>(k) * nt_ + it];

  // y = (I ⊗ V) W
  if (use_dst_) {
    for (int it = 0; it < nt_; ++it) {
      double* wrow = W.data() + static_cast<size_t>(it) * nx_;
      for (int k = 0; k < nx_; ++k) wrow[k] *= dst_scale_[k];
      dst1(wrow, y + static_cast<size_t>(it) * nx_, nx_);
    }
  } else {
    for (int it = 0; it < nt_; ++it) {
      const double* wrow = W.data() + static_cast<size_t>(it) * nx_;
      double* yrow = y + static_cast<size_t>(it) * nx_;
      for (int j = 0; j < nx_; ++j) {
        const double* vrow = V_.a.data() + static_cast<size_t>(j) * nx_;
        double acc = 0.0;
        for (int k = 0; k < nx_; ++k) acc += vrow[k] * wrow[k];
        yrow[j] = acc;
      }
    }
  }
}

void RieszInverse::apply(const std::vector<double>& x, std::vector<double>& y) const {
  if (static_cast<int>(x.size()) != dim()) throw std::invalid_argument("RieszInverse: size");
  y.resize(x.size());
  apply(x.data(), y.data());
}

double RieszInverse::inner(const std::vector<double>& x) const {
  std::vector<double> y;
  apply(x, y);
  return dot(x, y);
}

}  // namespace paradat
