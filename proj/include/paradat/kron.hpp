#pragma once

#include <memory>
#include <vector>

#include "paradat/factor_matrix.hpp"

namespace paradat {

/// Sum of Kronecker products  Σ_k c_k (T_k ⊗ S_k)  acting on vectors stored
/// time-major: index = i_t * cols_space + i_x. Never materialized in the
/// solver path; materialize() exists for small oracle comparisons.
class KroneckerOp {
 public:
  struct Term {
    double coeff;
    std::shared_ptr<const FactorMatrix> time;
    std::shared_ptr<const FactorMatrix> space;
  };

  KroneckerOp() = default;

  void add_term(double coeff, std::shared_ptr<const FactorMatrix> time,
                std::shared_ptr<const FactorMatrix> space);
  void add_term(double coeff, FactorMatrix time, FactorMatrix space);

  int rows() const { return rows_time_ * rows_space_; }
  int cols() const { return cols_time_ * cols_space_; }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  /// y = A x. `scratch` is resized as needed; reuse it across calls.
  void apply(const double* x, double* y, std::vector<double>& scratch) const;
  void apply(const std::vector<double>& x, std::vector<double>& y,
             std::vector<double>& scratch) const;

  /// y = Aᵀ x.
  void apply_transpose(const double* x, double* y, std::vector<double>& scratch) const;
  void apply_transpose(const std::vector<double>& x, std::vector<double>& y,
                       std::vector<double>& scratch) const;

  /// Dense row-major materialization (oracle checks on small problems only).
  std::vector<double> materialize() const;

 private:
  std::vector<Term> terms_;
  int rows_time_ = 0, rows_space_ = 0, cols_time_ = 0, cols_space_ = 0;
};

}  // namespace paradat
