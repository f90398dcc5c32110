#include "paradat/factor_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "paradat/quadrature.hpp"

namespace paradat {

FactorMatrix FactorMatrix::from_triplets(const SparseTriplets& t) {
  std::vector<std::map<int, double>> rows(t.rows);
  for (size_t k = 0; k < t.val.size(); ++k) rows[t.row[k]][t.col[k]] += t.val[k];

  FactorMatrix m;
  m.rows = t.rows;
  m.cols = t.cols;
  m.row_ptr.assign(t.rows + 1, 0);
  for (int i = 0; i < t.rows; ++i) m.row_ptr[i + 1] = m.row_ptr[i] + static_cast<int>(rows[i].size());
  m.col_idx.reserve(m.row_ptr.back());
  m.vals.reserve(m.row_ptr.back());
  for (int i = 0; i < t.rows; ++i) {
    for (const auto& [j, v] : rows[i]) {
      m.col_idx.push_back(j);
      m.vals.push_back(v);
    }
  }
  return m;
}

FactorMatrix FactorMatrix::identity(int n) {
  SparseTriplets t;
  t.rows = t.cols = n;
  for (int i = 0; i < n; ++i) {
    t.row.push_back(i);
    t.col.push_back(i);
    t.val.push_back(1.0);
  }
  return from_triplets(t);
}

FactorMatrix FactorMatrix::outer(const std::vector<double>& e) {
  SparseTriplets t;
  t.rows = t.cols = static_cast<int>(e.size());
  for (int i = 0; i < t.rows; ++i) {
    if (e[i] == 0.0) continue;
    for (int j = 0; j < t.cols; ++j) {
      if (e[j] == 0.0) continue;
      t.row.push_back(i);
      t.col.push_back(j);
      t.val.push_back(e[i] * e[j]);
    }
  }
  return from_triplets(t);
}

void FactorMatrix::multiply(const double* x, double* y) const {
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += vals[k] * x[col_idx[k]];
    y[i] = acc;
  }
}

void FactorMatrix::multiply_transpose(const double* x, double* y) const {
  std::fill(y, y + cols, 0.0);
  for (int i = 0; i < rows; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) y[col_idx[k]] += vals[k] * xi;
  }
}

FactorMatrix FactorMatrix::transpose() const {
  SparseTriplets t;
  t.rows = cols;
  t.cols = rows;
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      t.row.push_back(col_idx[k]);
      t.col.push_back(i);
      t.val.push_back(vals[k]);
    }
  return from_triplets(t);
}

FactorMatrix FactorMatrix::matmul(const FactorMatrix& other) const {
  if (cols != other.rows) throw std::invalid_argument("FactorMatrix::matmul: shape mismatch");
  SparseTriplets t;
  t.rows = rows;
  t.cols = other.cols;
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      const int j = col_idx[k];
      const double v = vals[k];
      for (int k2 = other.row_ptr[j]; k2 < other.row_ptr[j + 1]; ++k2) {
        t.row.push_back(i);
        t.col.push_back(other.col_idx[k2]);
        t.val.push_back(v * other.vals[k2]);
      }
    }
  return from_triplets(t);
}

std::vector<double> FactorMatrix::dense() const {
  std::vector<double> d(static_cast<size_t>(rows) * cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d[static_cast<size_t>(i) * cols + col_idx[k]] += vals[k];
  return d;
}

double FactorMatrix::entry(int i, int j) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col_idx[k] == j) return vals[k];
  return 0.0;
}

namespace {

// Direct assembly on a shared mesh.
FactorMatrix assemble_same_mesh(const BasisTable& row, const BasisTable& col, int row_deriv,
                                int col_deriv, const std::optional<ObservationWindow>& window) {
  const Interval1D& mesh = row.mesh;
  const double h = mesh.h();
  const int exactness = row.desc.degree + col.desc.degree + 3;
  const QuadRule& rule = rule_for_exactness(exactness);

  std::vector<Segment> segments;
  if (window)
    segments = restrict_to(mesh, window->omega_lo, window->omega_hi);
  else
    segments = split_at(mesh, {});

  SparseTriplets t;
  t.rows = row.dim;
  t.cols = col.dim;
  for (const Segment& seg : segments) {
    const double len = seg.hi - seg.lo;
    if (len <= 0.0) continue;
    const double cell_lo = mesh.node(seg.cell);
    for (size_t qp = 0; qp < rule.points.size(); ++qp) {
      const double x = seg.lo + rule.points[qp] * len;
      const double w = rule.weights[qp] * len;
      const double s = (x - cell_lo) / h;
      for (int lr = 0; lr < row.local_dim(); ++lr) {
        const int gi = row.global_index(seg.cell, lr);
        if (gi < 0) continue;
        const double rv = (row_deriv == 0) ? row.shape_value(lr, s) : row.shape_deriv(lr, s) / h;
        for (int lc = 0; lc < col.local_dim(); ++lc) {
          const int gj = col.global_index(seg.cell, lc);
          if (gj < 0) continue;
          const double cv = (col_deriv == 0) ? col.shape_value(lc, s) : col.shape_deriv(lc, s) / h;
          t.row.push_back(gi);
          t.col.push_back(gj);
          t.val.push_back(w * rv * cv);
        }
      }
    }
  }
  return FactorMatrix::from_triplets(t);
}

bool same_mesh(const BasisTable& a, const BasisTable& b) { return a.mesh == b.mesh; }

bool refines(const BasisTable& fine, const BasisTable& coarse) {
  return fine.mesh.a == coarse.mesh.a && fine.mesh.b == coarse.mesh.b &&
         fine.mesh.n > coarse.mesh.n && fine.mesh.n % coarse.mesh.n == 0 &&
         ((fine.mesh.n / coarse.mesh.n) & (fine.mesh.n / coarse.mesh.n - 1)) == 0;
}

// The coarse space re-expressed on the fine mesh (same family).
BasisTable refined_copy(const BasisTable& coarse, const Interval1D& fine_mesh) {
  SpaceDesc d = coarse.desc;
  d.mesh = fine_mesh;
  d.refine_level = 0;
  return coarse.orthonormal ? BasisTable::build_legendre(d) : BasisTable::build(d);
}

}  // namespace

FactorMatrix assemble_form(const BasisTable& row, const BasisTable& col, int row_deriv,
                           int col_deriv, std::optional<ObservationWindow> window) {
  if (same_mesh(row, col)) return assemble_same_mesh(row, col, row_deriv, col_deriv, window);
  if (refines(row, col)) {
    // assemble against the refined image of the column space, then prolongate
    const BasisTable col_fine = refined_copy(col, row.mesh);
    FactorMatrix fine = assemble_same_mesh(row, col_fine, row_deriv, col_deriv, window);
    FactorMatrix P = FactorMatrix::from_triplets(prolongation(col, col_fine));
    return fine.matmul(P);
  }
  if (refines(col, row)) {
    const BasisTable row_fine = refined_copy(row, col.mesh);
    FactorMatrix fine = assemble_same_mesh(row_fine, col, row_deriv, col_deriv, window);
    FactorMatrix P = FactorMatrix::from_triplets(prolongation(row, row_fine));
    return P.transpose().matmul(fine);
  }
  throw std::invalid_argument("assemble_form: incompatible meshes");
}

FactorMatrix mass(const BasisTable& row, const BasisTable& col) {
  return assemble_form(row, col, 0, 0);
}

FactorMatrix stiffness(const BasisTable& row, const BasisTable& col) {
  return assemble_form(row, col, 1, 1);
}

FactorMatrix deriv(const BasisTable& row, const BasisTable& col) {
  return assemble_form(row, col, 0, 1);
}

FactorMatrix masked_mass(const BasisTable& row, const BasisTable& col,
                         const ObservationWindow& window) {
  return assemble_form(row, col, 0, 0, window);
}

std::vector<double> trace_vector(const BasisTable& basis, double x) {
  return basis.point_values(x);
}

}  // namespace paradat
