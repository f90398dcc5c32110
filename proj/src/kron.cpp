#include "paradat/kron.hpp"

#include <cstring>
#include <stdexcept>

namespace paradat {

void KroneckerOp::add_term(double coeff, std::shared_ptr<const FactorMatrix> time,
                           std::shared_ptr<const FactorMatrix> space) {
  if (terms_.empty()) {
    rows_time_ = time->rows;
    rows_space_ = space->rows;
    cols_time_ = time->cols;
    cols_space_ = space->cols;
  } else if (time->rows != rows_time_ || space->rows != rows_space_ ||
             time->cols != cols_time_ || space->cols != cols_space_) {
    throw std::invalid_argument("KroneckerOp: term shape mismatch");
  }
  terms_.push_back({coeff, std::move(time), std::move(space)});
}

void KroneckerOp::add_term(double coeff, FactorMatrix time, FactorMatrix space) {
  add_term(coeff, std::make_shared<const FactorMatrix>(std::move(time)),
           std::make_shared<const FactorMatrix>(std::move(space)));
}

void KroneckerOp::apply(const double* x, double* y, std::vector<double>& scratch) const {
  std::memset(y, 0, sizeof(double) * rows());
  scratch.resize(static_cast<size_t>(cols_time_) * rows_space_);
  for (const Term& term : terms_) {
    const FactorMatrix& T = *term.time;
    const FactorMatrix& S = *term.space;
    // W[jt, :] = S * x[jt, :]
    for (int jt = 0; jt < cols_time_; ++jt)
      S.multiply(x + static_cast<size_t>(jt) * cols_space_,
                 scratch.data() + static_cast<size_t>(jt) * rows_space_);
    // y[it, :] += c * Σ_jt T[it, jt] W[jt, :]
    for (int it = 0; it < rows_time_; ++it) {
      double* yrow = y + static_cast<size_t>(it) * rows_space_;
      for (int k = T.row_ptr[it]; k < T.row_ptr[it + 1]; ++k) {
        const double a = term.coeff * T.vals[k];
        const double* wrow = scratch.data() + static_cast<size_t>(T.col_idx[k]) * rows_space_;
        for (int j = 0; j < rows_space_; ++j) yrow[j] += a * wrow[j];
      }
    }
  }
}

void KroneckerOp::apply_transpose(const double* x, double* y,
                                  std::vector<double>& scratch) const {
  std::memset(y, 0, sizeof(double) * cols());
  scratch.resize(static_cast<size_t>(rows_time_) * cols_space_);
  for (const Term& term : terms_) {
    const FactorMatrix& T = *term.time;
    const FactorMatrix& S = *term.space;
    for (int it = 0; it < rows_time_; ++it)
      S.multiply_transpose(x + static_cast<size_t>(it) * rows_space_,
                           scratch.data() + static_cast<size_t>(it) * cols_space_);
    for (int it = 0; it < rows_time_; ++it) {
      const double* wrow = scratch.data() + static_cast<size_t>(it) * cols_space_;
      for (int k = T.row_ptr[it]; k < T.row_ptr[it + 1]; ++k) {
        const double a = term.coeff * T.vals[k];
        double* yrow = y + static_cast<size_t>(T.col_idx[k]) * cols_space_;
        for (int j = 0; j < cols_space_; ++j) yrow[j] += a * wrow[j];
      }
    }
  }
}

void KroneckerOp::apply(const std::vector<double>& x, std::vector<double>& y,
                        std::vector<double>& scratch) const {
  if (static_cast<int>(x.size()) != cols()) throw std::invalid_argument("KroneckerOp::apply: size");
  y.resize(rows());
  apply(x.data(), y.data(), scratch);
}

void KroneckerOp::apply_transpose(const std::vector<double>& x, std::vector<double>& y,
                                  std::vector<double>& scratch) const {
  if (static_cast<int>(x.size()) != rows())
    throw std::invalid_argument("KroneckerOp::apply_transpose: size");
  y.resize(cols());
  apply_transpose(x.data(), y.data(), scratch);
}

std::vector<double> KroneckerOp::materialize() const {
  const size_t R = rows(), C = cols();
  std::vector<double> dense(R * C, 0.0);
  for (const Term& term : terms_) {
    const FactorMatrix& T = *term.time;
    const FactorMatrix& S = *term.space;
    for (int it = 0; it < T.rows; ++it)
      for (int kt = T.row_ptr[it]; kt < T.row_ptr[it + 1]; ++kt)
        for (int is = 0; is < S.rows; ++is)
          for (int ks = S.row_ptr[is]; ks < S.row_ptr[is + 1]; ++ks) {
            const size_t r = static_cast<size_t>(it) * S.rows + is;
            const size_t c = static_cast<size_t>(T.col_idx[kt]) * S.cols + S.col_idx[ks];
            dense[r * C + c] += term.coeff * T.vals[kt] * S.vals[ks];
          }
  }
  return dense;
}

}  // namespace paradat
