#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "paradat/basis.hpp"
#include "paradat/kron.hpp"
#include "paradat/problem.hpp"
#include "paradat/riesz.hpp"

namespace paradat {

/// Uniform tensor-product grid of the time-space cylinder [0,T] x [0,1],
/// with test spaces refined `ell` times in space.
struct TensorGrid {
  Interval1D time{0.0, 1.0, 8};
  Interval1D space{0.0, 1.0, 8};

  static TensorGrid unit(int n) {
    if (n < 1) throw std::invalid_argument("TensorGrid: n must be >= 1");
    return {Interval1D(0.0, 1.0, n), Interval1D(0.0, 1.0, n)};
  }
};

/// The 1D factor bases of the Section 6.1 spaces:
///   X  = S^{0,1}(I) ⊗ S^{0,1}_0(Ω),  Y_ℓ = S^{-1,1}(I) ⊗ S^{0,1}_0(Ω_ℓ),
///   Z  = S^{-1,0}(I) ⊗ S^{0,1}(Ω),
/// with L2-orthonormal (Legendre) DG bases in time for Y and Z.
struct TensorSpaces {
  TensorGrid grid;
  BasisTable xt, xx;
  BasisTable yt;                       // DG-P1, orthonormal
  BasisTable ybar_t;                   // DG-P1 or DG-P0 (reduced flag)
  BasisTable zt, zx;                   // DG-P0 orthonormal; CG-P1 free
  std::map<int, BasisTable> yx_level;  // zero-trace CG-P1 on bisected meshes

  static TensorSpaces create(const TensorGrid& grid, const std::vector<int>& levels,
                             bool ybar_reduced_time_degree = false);
  const BasisTable& yx(int level) const;
  int x_dim() const { return xt.dim * xx.dim; }
  int z_dim() const { return zt.dim * zx.dim; }
  int y_dim(int level) const { return yt.dim * yx(level).dim; }
};

/// B^δ = D_t ⊗ M_x^(ℓ←0) + M_t ⊗ A_x^(ℓ←0) (+ optional b, c terms),
/// the parabolic operator between X^δ and Y^δ_ℓ.
KroneckerOp assemble_B(const TensorSpaces& spaces, int level, const HeatCoefficients& coeffs = {});

/// M^δ_{γ0} = (e₀ e₀ᵀ) ⊗ M_x with e₀ the time-basis trace at t = 0.
KroneckerOp assemble_trace0(const TensorSpaces& spaces);

/// M^δ_{Γω} = M_t ⊗ ∫_ω φ φ'.
KroneckerOp assemble_obs_mass(const TensorSpaces& spaces, const ObservationWindow& window);

struct FoslsOps {
  KroneckerOp C_u;  // X -> Ybar_ℓ
  KroneckerOp C_p;  // Z -> Ybar_ℓ
  KroneckerOp J;    // Z -> X   (⟨Φ^Z, ∂x Φ^X⟩)
  KroneckerOp L;    // X -> X   (∫ w' w' in space, mass in time)
  KroneckerOp N;    // Z -> Z   (mass)
};
FoslsOps assemble_fosls(const TensorSpaces& spaces, int level, const HeatCoefficients& coeffs = {});

struct LoadVectors {
  std::vector<double> g;  // g(Φ^{Y_ℓ}), consistent forcing of the manufactured state
  std::vector<double> f;  // f(Φ^X|_{I×ω}) with f = u|_{I×ω} + λ·1
  double f_norm2 = 0.0;   // ‖f‖²_{L2(I×ω)}
};
LoadVectors load_vectors(const ProblemData& data, const TensorSpaces& spaces, int level,
                         bool on_ybar = false);

/// ∫∫ fn(t,x) (φ_t ⊗ φ_x) dt dx over I × (window or Ω).
std::vector<double> assemble_functional(const BasisTable& bt, const BasisTable& bx,
                                        const std::function<double(double, double)>& fn,
                                        std::optional<ObservationWindow> window = {});

/// ∫_I∫_W fn(t,x)² with W the window (or Ω when absent).
double functional_norm2(const Interval1D& tmesh, const Interval1D& xmesh,
                        const std::function<double(double, double)>& fn,
                        std::optional<ObservationWindow> window = {});

/// Quadrature order used for (non-polynomial) data integrals; chosen so the
/// error stays far below discretization error on every grid in use.
int data_quad_points(double h);

}  // namespace paradat
