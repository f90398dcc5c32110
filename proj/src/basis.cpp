#include "paradat/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace paradat {
namespace {

// Monomial coefficients of the Lagrange polynomial through equispaced nodes
// i/q (i = 0..q) that is 1 at node `k`. Solved by synthetic polynomial
// multiplication; fine for the small degrees used here.
std::vector<double> lagrange_coeffs(int q, int k) {
  std::vector<double> poly{1.0};
  double denom = 1.0;
  const auto node = [q](int i) { return static_cast<double>(i) / q; };
  for (int i = 0; i <= q; ++i) {
    if (i == k) continue;
    // multiply by (s - node(i))
    std::vector<double> next(poly.size() + 1, 0.0);
    for (size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] -= node(i) * poly[j];
    }
    poly = std::move(next);
    denom *= node(k) - node(i);
  }
  for (double& c : poly) c /= denom;
  return poly;
}

// Shifted Legendre P_k(2s-1) on [0,1], L2([0,1])-normalized.
std::vector<double> shifted_legendre_coeffs(int k) {
  // recurrence on monomial coefficient arrays in the variable u = 2s - 1
  std::vector<std::vector<double>> P(k + 1);
  P[0] = {1.0};
  if (k >= 1) P[1] = {0.0, 1.0};
  for (int j = 1; j < k; ++j) {
    std::vector<double> next(j + 2, 0.0);
    for (size_t i = 0; i < P[j].size(); ++i)
      next[i + 1] += (2.0 * j + 1.0) / (j + 1.0) * P[j][i];
    for (size_t i = 0; i < P[j - 1].size(); ++i)
      next[i] -= static_cast<double>(j) / (j + 1.0) * P[j - 1][i];
    P[j + 1] = std::move(next);
  }
  // substitute u = 2s - 1 via binomial expansion
  std::vector<double> out(k + 1, 0.0);
  for (int i = 0; i <= k; ++i) {
    if (P[k].size() <= static_cast<size_t>(i) || P[k][i] == 0.0) continue;
    // (2s-1)^i
    double binom = 1.0;
    for (int j = 0; j <= i; ++j) {
      const double sign = ((i - j) % 2 == 0) ? 1.0 : -1.0;
      out[j] += P[k][i] * binom * std::pow(2.0, j) * sign;
      binom = binom * (i - j) / (j + 1.0);
    }
  }
  const double scale = std::sqrt(2.0 * k + 1.0);
  for (double& c : out) c *= scale;
  return out;
}

double eval_poly(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 0;) v = v * s + c[i];
  return v;
}

double eval_poly_deriv(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (size_t i = c.size(); i-- > 1;) v = v * s + i * c[i];
  return v;
}

void validate(const SpaceDesc& desc) {
  if (desc.degree < 0) throw std::invalid_argument("SpaceDesc: degree >= 0 required");
  if (desc.refine_level < 0) throw std::invalid_argument("SpaceDesc: refine_level >= 0 required");
  if (desc.continuity == Continuity::C0 && desc.degree == 0)
    throw std::invalid_argument("SpaceDesc: C0 requires degree >= 1");
  if (desc.boundary == Boundary::ZeroTrace &&
      (desc.continuity != Continuity::C0 || desc.degree < 1))
    throw std::invalid_argument("SpaceDesc: zero-trace requires C0 with degree >= 1");
}

}  // namespace

void BasisTable::build_lagrange_shapes() {
  const int q = desc.degree;
  shape_coeffs_.clear();
  if (desc.continuity == Continuity::DG && q == 0) {
    shape_coeffs_.push_back({1.0});
    return;
  }
  for (int k = 0; k <= q; ++k) shape_coeffs_.push_back(lagrange_coeffs(q, k));
}

void BasisTable::build_l2g() {
  const int q = desc.degree;
  const int nl = local_dim();
  l2g_.assign(static_cast<size_t>(mesh.n) * nl, -1);
  if (desc.continuity == Continuity::DG) {
    for (int c = 0; c < mesh.n; ++c)
      for (int l = 0; l < nl; ++l) l2g_[c * nl + l] = c * nl + l;
    dim = mesh.n * nl;
    return;
  }
  // C0 Lagrange: node i of cell c is global node c*q + i
  const int nnodes = mesh.n * q + 1;
  const bool zero = desc.boundary == Boundary::ZeroTrace;
  for (int c = 0; c < mesh.n; ++c) {
    for (int l = 0; l <= q; ++l) {
      const int node = c * q + l;
      if (zero && (node == 0 || node == nnodes - 1)) continue;
      l2g_[c * nl + l] = zero ? node - 1 : node;
    }
  }
  dim = zero ? nnodes - 2 : nnodes;
}

double BasisTable::shape_value(int local, double s) const {
  return eval_poly(shape_coeffs_[local], s);
}

double BasisTable::shape_deriv(int local, double s) const {
  return eval_poly_deriv(shape_coeffs_[local], s);
}

double BasisTable::value(int j, double x) const {
  const int c = mesh.cell_of(x);
  const double s = (x - mesh.node(c)) / mesh.h();
  double v = 0.0;
  for (int l = 0; l < local_dim(); ++l)
    if (global_index(c, l) == j) v += shape_value(l, s);
  return v;
}

double BasisTable::deriv(int j, double x) const {
  const int c = mesh.cell_of(x);
  const double s = (x - mesh.node(c)) / mesh.h();
  double v = 0.0;
  for (int l = 0; l < local_dim(); ++l)
    if (global_index(c, l) == j) v += shape_deriv(l, s) / mesh.h();
  return v;
}

std::vector<double> BasisTable::point_values(double x) const {
  std::vector<double> out(dim, 0.0);
  const int c = mesh.cell_of(x);
  const double s = (x - mesh.node(c)) / mesh.h();
  for (int l = 0; l < local_dim(); ++l) {
    const int g = global_index(c, l);
    if (g >= 0) out[g] += shape_value(l, s);
  }
  return out;
}

BasisTable BasisTable::build(const SpaceDesc& desc) {
  validate(desc);
  BasisTable table;
  table.desc = desc;
  table.mesh = desc.mesh.bisected(desc.refine_level);
  table.build_lagrange_shapes();
  table.build_l2g();
  return table;
}

BasisTable BasisTable::build_legendre(const SpaceDesc& desc) {
  validate(desc);
  if (desc.continuity != Continuity::DG)
    throw std::invalid_argument("legendre_orthonormalize: DG space required");
  BasisTable table;
  table.desc = desc;
  table.mesh = desc.mesh.bisected(desc.refine_level);
  const double h = table.mesh.h();
  for (int k = 0; k <= desc.degree; ++k) {
    auto c = shifted_legendre_coeffs(k);
    for (double& v : c) v /= std::sqrt(h);  // L2(cell)-normalization
    table.shape_coeffs_.push_back(std::move(c));
  }
  table.build_l2g();
  table.orthonormal = true;
  return table;
}

BasisTable build_space(const SpaceDesc& desc) { return BasisTable::build(desc); }

std::vector<double> shifted_legendre(int k) { return shifted_legendre_coeffs(k); }

BasisTable legendre_orthonormalize(const SpaceDesc& desc) {
  return BasisTable::build_legendre(desc);
}

SparseTriplets prolongation(const BasisTable& coarse, const BasisTable& fine) {
  if (coarse.desc.continuity != Continuity::C0 || fine.desc.continuity != Continuity::C0 ||
      coarse.desc.degree != fine.desc.degree ||
      coarse.desc.boundary != fine.desc.boundary)
    throw std::invalid_argument("prolongation: spaces must share continuity, degree, boundary");
  const int ratio = fine.mesh.n / coarse.mesh.n;
  if (ratio * coarse.mesh.n != fine.mesh.n || (ratio & (ratio - 1)) != 0 ||
      coarse.mesh.a != fine.mesh.a || coarse.mesh.b != fine.mesh.b)
    throw std::invalid_argument("prolongation: fine mesh must bisection-refine the coarse one");

  const int q = fine.desc.degree;
  SparseTriplets P;
  P.rows = fine.dim;
  P.cols = coarse.dim;
  // A coarse C0 function restricted to any fine cell is a polynomial of
  // degree q, so interpolation at the fine Lagrange nodes is exact.
  const int nnodes_fine = fine.mesh.n * q + 1;
  const bool zero = fine.desc.boundary == Boundary::ZeroTrace;
  for (int node = 0; node < nnodes_fine; ++node) {
    const int fi = zero ? node - 1 : node;
    if (zero && (node == 0 || node == nnodes_fine - 1)) continue;
    const double xn = fine.mesh.node(node / q) + (node % q) * fine.mesh.h() / q;
    const int cc = coarse.mesh.cell_of(xn);
    const double s = (xn - coarse.mesh.node(cc)) / coarse.mesh.h();
    for (int l = 0; l < coarse.local_dim(); ++l) {
      const int cj = coarse.global_index(cc, l);
      if (cj < 0) continue;
      const double v = coarse.shape_value(l, s);
      if (std::abs(v) > 1e-14) {
        P.row.push_back(fi);
        P.col.push_back(cj);
        P.val.push_back(v);
      }
    }
  }
  return P;
}

}  // namespace paradat
