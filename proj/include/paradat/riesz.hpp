#pragma once

#include <memory>
#include <vector>

#include "paradat/basis.hpp"
#include "paradat/factor_matrix.hpp"
#include "paradat/linalg.hpp"

namespace paradat {

/// Exact inverse Riesz maps applied matrix-free on time-major vectors.
///
/// KY: (M_t)⁻¹ ⊗ (A_x)⁻¹      — Y-norm Gram inverse (time mass diagonal)
/// KZ: (M_t)⁻¹ ⊗ (M_x)⁻¹      — Z-norm (L2) Gram inverse
/// KX: inverse of G_X = M_t ⊗ A_x + K_t ⊗ (M_x A_x⁻¹ M_x), the discrete
///     X-norm Gram with the H⁻¹ surrogate, applied by spatial fast
///     diagonalization: per generalized eigenmode A_x v = λ M_x v the time
///     solve (λ M_t + λ⁻¹ K_t) is tridiagonal.
class RieszInverse {
 public:
  enum class Kind { KY, KX, KZ };

  /// Kronecker inverse of  time_mass ⊗ space_gram  with diagonal time mass.
  static RieszInverse make_kron_inverse(Kind kind, const FactorMatrix& time_mass,
                                        const FactorMatrix& space_gram);

  static RieszInverse make_KY(const FactorMatrix& time_mass, const FactorMatrix& space_stiffness);
  static RieszInverse make_KZ(const FactorMatrix& time_mass, const FactorMatrix& space_mass);

  /// The space_desc identifies uniform lowest-order zero-trace meshes, for
  /// which the eigenbasis is the discrete sine basis and the spatial
  /// transforms run through the FFT instead of a dense eigenvector matrix.
  static RieszInverse make_KX(const FactorMatrix& time_mass, const FactorMatrix& time_stiffness,
                              const FactorMatrix& space_stiffness, const FactorMatrix& space_mass,
                              const SpaceDesc& space_desc);

  void apply(const double* x, double* y) const;
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  double inner(const std::vector<double>& x) const;  // <K x, x>

  int dim() const { return nt_ * nx_; }
  Kind kind() const { return kind_; }
  bool uses_fft() const { return use_dst_; }

 private:
  Kind kind_ = Kind::KY;
  int nt_ = 0;
  int nx_ = 0;

  // KY / KZ
  std::vector<double> time_mass_inv_diag_;
  std::shared_ptr<BandedCholesky> space_solver_;

  // KX
  std::vector<double> eigenvalues_;        // of (A_x, M_x)
  DenseMatrix V_;                          // M-orthonormal eigenvectors (dense path)
  bool use_dst_ = false;
  std::vector<double> dst_scale_;          // 1/sqrt(w_kᵀ M w_k) per sine mode
  std::vector<double> mt_band_, kt_band_;  // tridiagonal bands of M_t, K_t
  void apply_kx(const double* x, double* y) const;
};

}  // namespace paradat
