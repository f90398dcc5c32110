#pragma once

#include <string>
#include <vector>

#include "paradat/interval.hpp"

namespace paradat {

enum class Continuity { C0, DG };
enum class Boundary { ZeroTrace, Free };

/// Descriptor of a 1D piecewise-polynomial space.
struct SpaceDesc {
  Continuity continuity = Continuity::C0;
  int degree = 1;
  Boundary boundary = Boundary::Free;
  Interval1D mesh;
  int refine_level = 0;  // mesh is uniformly bisected this many times first
};

/// A 1D basis: local shape functions on the reference cell [0,1] plus the
/// local-to-global map. Local dof l of cell c maps to a global index, or -1
/// for dofs removed by the zero-trace condition.
class BasisTable {
 public:
  SpaceDesc desc;      // as requested (mesh before refinement)
  Interval1D mesh;     // actual mesh after refine_level bisections
  int dim = 0;
  bool orthonormal = false;  // DG basis is L2(I)-orthonormal (Legendre)

  int local_dim() const { return static_cast<int>(shape_coeffs_.size()); }
  int global_index(int cell, int local) const { return l2g_[cell * local_dim() + local]; }

  /// Shape function values / s-derivatives on the reference cell, s in [0,1].
  double shape_value(int local, double s) const;
  double shape_deriv(int local, double s) const;

  /// Global basis function j evaluated at a physical point x.
  double value(int j, double x) const;
  double deriv(int j, double x) const;

  /// Values of all basis functions at a point (dense vector of length dim).
  std::vector<double> point_values(double x) const;

  static BasisTable build(const SpaceDesc& desc);
  static BasisTable build_legendre(const SpaceDesc& desc);

 private:
  std::vector<int> l2g_;
  // monomial coefficients of each local shape, constant term first
  std::vector<std::vector<double>> shape_coeffs_;

  void build_lagrange_shapes();
  void build_l2g();
};

/// build_space of the discretization module.
BasisTable build_space(const SpaceDesc& desc);

/// L2-orthonormal (scaled shifted Legendre) basis for a DG space; its mass
/// matrix is the identity.
BasisTable legendre_orthonormalize(const SpaceDesc& desc);

/// Monomial coefficients of the L2([0,1])-orthonormal shifted Legendre
/// polynomial of degree k, constant term first.
std::vector<double> shifted_legendre(int k);

/// Prolongation taking coefficients on `coarse` to coefficients on `fine`,
/// where both are C0 Lagrange spaces of equal degree and boundary and the
/// fine mesh is a bisection refinement of the coarse one. Returned as a
/// dense column-major-free triplet list: rows fine.dim x cols coarse.dim.
struct SparseTriplets {
  int rows = 0;
  int cols = 0;
  std::vector<int> row;
  std::vector<int> col;
  std::vector<double> val;
};
SparseTriplets prolongation(const BasisTable& coarse, const BasisTable& fine);

}  // namespace paradat
