#pragma once

#include <optional>
#include <vector>

#include "paradat/basis.hpp"
#include "paradat/interval.hpp"

namespace paradat {

/// Sparse CSR matrix of a 1D bilinear form between two bases.
class FactorMatrix {
 public:
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr;
  std::vector<int> col_idx;
  std::vector<double> vals;

  FactorMatrix() = default;
  static FactorMatrix from_triplets(const SparseTriplets& t);
  static FactorMatrix identity(int n);
  /// Rank-one matrix e eᵀ from a vector (used for the t=0 trace factor).
  static FactorMatrix outer(const std::vector<double>& e);

  void multiply(const double* x, double* y) const;            // y = A x
  void multiply_transpose(const double* x, double* y) const;  // y = Aᵀ x

  FactorMatrix transpose() const;
  FactorMatrix matmul(const FactorMatrix& other) const;  // this * other
  std::vector<double> dense() const;                     // row-major rows x cols

  double entry(int i, int j) const;
  int nnz() const { return static_cast<int>(vals.size()); }
};

/// ∫ (d^row_deriv r_i)(d^col_deriv c_j) over the window (whole domain when
/// absent). Row and column spaces must live on nested meshes; cross-mesh
/// combinations are assembled on the finer mesh and composed with the
/// bisection prolongation.
FactorMatrix assemble_form(const BasisTable& row, const BasisTable& col, int row_deriv,
                           int col_deriv, std::optional<ObservationWindow> window = {});

FactorMatrix mass(const BasisTable& row, const BasisTable& col);
FactorMatrix stiffness(const BasisTable& row, const BasisTable& col);
/// ∫ r_i c_j'
FactorMatrix deriv(const BasisTable& row, const BasisTable& col);
FactorMatrix masked_mass(const BasisTable& row, const BasisTable& col,
                         const ObservationWindow& window);

/// Values of all basis functions at a point, as a dense vector.
std::vector<double> trace_vector(const BasisTable& basis, double x);

}  // namespace paradat
