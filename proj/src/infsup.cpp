#include "paradat/infsup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "paradat/basis.hpp"
#include "paradat/factor_matrix.hpp"
#include "paradat/quadrature.hpp"

namespace paradat::infsup {

std::string to_string(RefineRule r) { return r == RefineRule::Bisection ? "bisection" : "red"; }

TriMesh TriMesh::single(const TriCorners& corners) {
  TriMesh m;
  m.vertices = {corners[0], corners[1], corners[2]};
  m.tris = {{0, 1, 2}};
  return m;
}

TriMesh TriMesh::red_refined() const {
  TriMesh out;
  out.vertices = vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Point2 p{0.5 * (vertices[a][0] + vertices[b][0]),
                   0.5 * (vertices[a][1] + vertices[b][1])};
    out.vertices.push_back(p);
    const int id = static_cast<int>(out.vertices.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& t : tris) {
    const int m01 = mid(t[0], t[1]);
    const int m12 = mid(t[1], t[2]);
    const int m20 = mid(t[2], t[0]);
    out.tris.push_back({t[0], m01, m20});
    out.tris.push_back({m01, t[1], m12});
    out.tris.push_back({m20, m12, t[2]});
    out.tris.push_back({m01, m12, m20});
  }
  return out;
}

double TriMesh::area(int tri) const {
  const Point2& a = vertices[tris[tri][0]];
  const Point2& b = vertices[tris[tri][1]];
  const Point2& c = vertices[tris[tri][2]];
  return 0.5 * std::abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double TriMesh::total_area() const {
  double s = 0.0;
  for (size_t i = 0; i < tris.size(); ++i) s += area(static_cast<int>(i));
  return s;
}

TriPqSpace TriPqSpace::build(const TriMesh& mesh, int q) {
  if (q != 1 && q != 2) throw std::invalid_argument("TriPqSpace: q must be 1 or 2");
  TriPqSpace s;
  s.q = q;
  s.mesh = &mesh;
  s.nodes = mesh.vertices;
  std::map<std::pair<int, int>, int> edge_node;
  for (const auto& t : mesh.tris) {
    std::vector<int> dofs{t[0], t[1], t[2]};
    if (q == 2) {
      const std::array<std::pair<int, int>, 3> edges{{{t[0], t[1]}, {t[1], t[2]}, {t[2], t[0]}}};
      for (const auto& [a, b] : edges) {
        const auto key = std::minmax(a, b);
        auto it = edge_node.find(key);
        if (it == edge_node.end()) {
          s.nodes.push_back({0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                             0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1])});
          it = edge_node.emplace(key, static_cast<int>(s.nodes.size()) - 1).first;
        }
        dofs.push_back(it->second);
      }
    }
    s.tri_dofs.push_back(std::move(dofs));
  }
  return s;
}

TriQuad tri_quadrature(int degree) {
  // Duffy transform (u, v) -> (u(1-v), v); the Jacobian raises the v-degree
  // by one.
  const QuadRule& qu = gauss_rule(degree / 2 + 1);
  const QuadRule& qv = gauss_rule((degree + 1) / 2 + 1);
  TriQuad quad;
  for (size_t i = 0; i < qu.points.size(); ++i) {
    for (size_t j = 0; j < qv.points.size(); ++j) {
      const double u = qu.points[i], v = qv.points[j];
      const double x = u * (1.0 - v), y = v;
      quad.bary.push_back({1.0 - x - y, x, y});
      quad.weights.push_back(2.0 * qu.weights[i] * qv.weights[j] * (1.0 - v));
    }
  }
  return quad;
}

namespace {

double pq_shape(int q, int local, const std::array<double, 3>& l) {
  if (q == 1) return l[local];
  switch (local) {
    case 0: return l[0] * (2.0 * l[0] - 1.0);
    case 1: return l[1] * (2.0 * l[1] - 1.0);
    case 2: return l[2] * (2.0 * l[2] - 1.0);
    case 3: return 4.0 * l[0] * l[1];
    case 4: return 4.0 * l[1] * l[2];
    case 5: return 4.0 * l[2] * l[0];
  }
  throw std::logic_error("pq_shape: bad local index");
}

Point2 bary_to_point(const TriMesh& mesh, const std::array<int, 3>& tri,
                     const std::array<double, 3>& l) {
  Point2 p{0.0, 0.0};
  for (int a = 0; a < 3; ++a) {
    p[0] += l[a] * mesh.vertices[tri[a]][0];
    p[1] += l[a] * mesh.vertices[tri[a]][1];
  }
  return p;
}

// Barycentric coordinates of p w.r.t. the corner triangle.
std::array<double, 3> barycentric(const TriCorners& c, const Point2& p) {
  const double det = (c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) -
                     (c[2][0] - c[0][0]) * (c[1][1] - c[0][1]);
  const double l1 = ((p[0] - c[0][0]) * (c[2][1] - c[0][1]) -
                     (c[2][0] - c[0][0]) * (p[1] - c[0][1])) / det;
  const double l2 = ((c[1][0] - c[0][0]) * (p[1] - c[0][1]) -
                     (p[0] - c[0][0]) * (c[1][1] - c[0][1])) / det;
  return {1.0 - l1 - l2, l1, l2};
}

// FE mass matrix of a TriPqSpace, optionally normalized by the total area.
DenseMatrix fe_mass(const TriPqSpace& space, double measure_scale) {
  const TriMesh& mesh = *space.mesh;
  const TriQuad quad = tri_quadrature(2 * space.q);
  DenseMatrix M(space.dim(), space.dim());
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const double a = mesh.area(static_cast<int>(t)) * measure_scale;
    const auto& dofs = space.tri_dofs[t];
    for (size_t p = 0; p < quad.bary.size(); ++p) {
      const double w = a * quad.weights[p];
      for (size_t i = 0; i < dofs.size(); ++i) {
        const double vi = pq_shape(space.q, static_cast<int>(i), quad.bary[p]);
        for (size_t j = 0; j < dofs.size(); ++j)
          M(dofs[i], dofs[j]) += w * vi * pq_shape(space.q, static_cast<int>(j), quad.bary[p]);
      }
    }
  }
  return M;
}

// Monomials x^a y^b with a + b <= q, evaluated at a point.
std::vector<double> monomials(int q, const Point2& p) {
  std::vector<double> out;
  for (int total = 0; total <= q; ++total)
    for (int a = total; a >= 0; --a) out.push_back(std::pow(p[0], a) * std::pow(p[1], total - a));
  return out;
}

// Coefficients (columns) of an L2(T_root)-orthonormal basis of P_q in the
// monomial basis, via Cholesky of the exact Gram matrix.
DenseMatrix orthonormal_poly_basis(int q, const TriCorners& corners) {
  const TriMesh root = TriMesh::single(corners);
  const int np = poly_dim(2, q);
  const TriQuad quad = tri_quadrature(2 * q);
  DenseMatrix G(np, np);
  const double a = root.area(0);
  for (size_t p = 0; p < quad.bary.size(); ++p) {
    const Point2 x = bary_to_point(root, root.tris[0], quad.bary[p]);
    const std::vector<double> m = monomials(q, x);
    for (int i = 0; i < np; ++i)
      for (int j = 0; j < np; ++j) G(i, j) += a * quad.weights[p] * m[i] * m[j];
  }
  // G = L Lᵀ; columns of L⁻ᵀ give the orthonormal combinations
  DenseMatrix L(np, np);
  for (int j = 0; j < np; ++j) {
    double s = G(j, j);
    for (int k = 0; k < j; ++k) s -= L(j, k) * L(j, k);
    L(j, j) = std::sqrt(s);
    for (int i = j + 1; i < np; ++i) {
      double t = G(i, j);
      for (int k = 0; k < j; ++k) t -= L(i, k) * L(j, k);
      L(i, j) = t / L(j, j);
    }
  }
  DenseMatrix C(np, np);  // C = L⁻ᵀ
  for (int j = 0; j < np; ++j) {
    for (int i = np - 1; i >= 0; --i) {
      double s = (i == j) ? 1.0 : 0.0;
      for (int k = i + 1; k < np; ++k) s -= L(k, i) * C(k, j);
      C(i, j) = s / L(i, i);
    }
  }
  return C;
}

struct BubbleProblem {
  std::vector<int> interior;  // fine dofs interior to the root triangle
  DenseMatrix M_bb;
  DenseMatrix M_pb;  // poly x bubble
};

BubbleProblem build_bubble_problem(int q, int gen, const TriCorners& corners) {
  TriMesh mesh = TriMesh::single(corners);
  for (int g = 0; g < gen; ++g) mesh = mesh.red_refined();
  const TriPqSpace space = TriPqSpace::build(mesh, q);

  BubbleProblem prob;
  std::vector<int> index_of(space.dim(), -1);
  for (int i = 0; i < space.dim(); ++i) {
    const auto l = barycentric(corners, space.nodes[i]);
    if (std::min({l[0], l[1], l[2]}) > 1e-12) {
      index_of[i] = static_cast<int>(prob.interior.size());
      prob.interior.push_back(i);
    }
  }
  const int nb = static_cast<int>(prob.interior.size());
  const int np = poly_dim(2, q);
  prob.M_bb = DenseMatrix(nb, nb);
  prob.M_pb = DenseMatrix(np, nb);
  if (nb == 0) return prob;

  const DenseMatrix poly = orthonormal_poly_basis(q, corners);
  const TriQuad quad = tri_quadrature(2 * q);
  for (size_t t = 0; t < mesh.tris.size(); ++t) {
    const double a = mesh.area(static_cast<int>(t));
    const auto& dofs = space.tri_dofs[t];
    for (size_t p = 0; p < quad.bary.size(); ++p) {
      const double w = a * quad.weights[p];
      const Point2 x = bary_to_point(mesh, mesh.tris[t], quad.bary[p]);
      const std::vector<double> mono = monomials(q, x);
      std::vector<double> pv(np, 0.0);
      for (int i = 0; i < np; ++i)
        for (int k = 0; k < np; ++k) pv[i] += poly(k, i) * mono[k];
      for (size_t i = 0; i < dofs.size(); ++i) {
        const int bi = index_of[dofs[i]];
        if (bi < 0) continue;
        const double vi = pq_shape(q, static_cast<int>(i), quad.bary[p]);
        for (size_t j = 0; j < dofs.size(); ++j) {
          const int bj = index_of[dofs[j]];
          if (bj >= 0)
            prob.M_bb(bi, bj) += w * vi * pq_shape(q, static_cast<int>(j), quad.bary[p]);
        }
        for (int pi = 0; pi < np; ++pi) prob.M_pb(pi, bi) += w * pv[pi] * vi;
      }
    }
  }
  return prob;
}

double alpha_from_grams(const DenseMatrix& M_pb, const DenseMatrix& M_bb) {
  const int np = M_pb.rows;
  const int nb = M_pb.cols;
  if (nb == 0) return 0.0;
  // S = M_pb M_bb⁻¹ M_pbᵀ (M_pp is the identity by construction)
  const BandedCholesky chol = BandedCholesky::from_dense(M_bb, nb - 1);
  DenseMatrix S(np, np);
  std::vector<double> col(nb), sol(nb);
  for (int i = 0; i < np; ++i) {
    for (int b = 0; b < nb; ++b) col[b] = M_pb(i, b);
    chol.solve(col.data(), sol.data());
    for (int j = 0; j < np; ++j) {
      double s = 0.0;
      for (int b = 0; b < nb; ++b) s += M_pb(j, b) * sol[b];
      S(i, j) = s;
    }
  }
  for (int i = 0; i < np; ++i)
    for (int j = i + 1; j < np; ++j) {
      const double v = 0.5 * (S(i, j) + S(j, i));
      S(i, j) = S(j, i) = v;
    }
  const EigResult eig = sym_eig(S);
  // rank deficiency means exactly zero; do not report the square root of noise
  const double floor = 1e-12 * std::max(eig.values.back(), 1.0);
  return eig.values.front() <= floor ? 0.0 : std::sqrt(eig.values.front());
}

double alpha_1d(int q, int gen) {
  const int n = 1 << gen;
  const BasisTable bubble =
      build_space({Continuity::C0, q, Boundary::ZeroTrace, Interval1D(0.0, 1.0, n), 0});
  const int nb = bubble.dim;
  const int np = q + 1;
  DenseMatrix M_pb(np, nb);
  {
    const QuadRule& rule = gauss_rule(q + 2);
    std::vector<std::vector<double>> leg;
    for (int k = 0; k <= q; ++k) leg.push_back(shifted_legendre(k));
    const double h = bubble.mesh.h();
    for (int c = 0; c < n; ++c) {
      for (size_t p = 0; p < rule.points.size(); ++p) {
        const double s = rule.points[p];
        const double x = bubble.mesh.node(c) + s * h;
        const double w = rule.weights[p] * h;
        for (int l = 0; l < bubble.local_dim(); ++l) {
          const int g = bubble.global_index(c, l);
          if (g < 0) continue;
          const double bv = bubble.shape_value(l, s);
          for (int k = 0; k <= q; ++k) {
            double pv = 0.0;
            for (size_t d = leg[k].size(); d-- > 0;) pv = pv * x + leg[k][d];
            M_pb(k, g) += w * pv * bv;
          }
        }
      }
    }
  }
  const FactorMatrix mb = mass(bubble, bubble);
  DenseMatrix M_bb(nb, nb);
  M_bb.a = mb.dense();
  return alpha_from_grams(M_pb, M_bb);
}

}  // namespace

int poly_dim(int d, int q) { return d == 1 ? q + 1 : (q + 1) * (q + 2) / 2; }

int bubble_dim(int d, int q, int gen, RefineRule rule) {
  if (d == 1) {
    if (rule != RefineRule::Bisection)
      throw std::invalid_argument("bubble_dim: d=1 supports bisection only");
    return q * (1 << gen) - 1;
  }
  if (d == 2) {
    if (rule != RefineRule::Red) throw std::invalid_argument("bubble_dim: d=2 supports red only");
    const TriCorners ref{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    return static_cast<int>(build_bubble_problem(q, gen, ref).interior.size());
  }
  throw std::invalid_argument("bubble_dim: d must be 1 or 2");
}

double alpha(int d, int q, int gen, RefineRule rule) {
  if (gen < 1) throw std::invalid_argument("alpha: generation must be >= 1");
  if (d == 1) {
    if (rule != RefineRule::Bisection || q < 1 || q > 4)
      throw std::invalid_argument("alpha: d=1 supports bisection with q in 1..4");
    return alpha_1d(q, gen);
  }
  if (d == 2) {
    if (rule != RefineRule::Red || q < 1 || q > 2)
      throw std::invalid_argument("alpha: d=2 supports red refinement with q in 1..2");
    const TriCorners ref{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
    return alpha_on_triangle(q, gen, ref);
  }
  throw std::invalid_argument("alpha: d must be 1 or 2");
}

double alpha_on_triangle(int q, int gen, const TriCorners& corners) {
  const BubbleProblem prob = build_bubble_problem(q, gen, corners);
  return alpha_from_grams(prob.M_pb, prob.M_bb);
}

namespace {

double sampled_min_quotient(const DenseMatrix& M_pb, const DenseMatrix& M_bb, int trials,
                            unsigned seed) {
  const int np = M_pb.rows, nb = M_pb.cols;
  if (nb == 0) return 0.0;
  const BandedCholesky chol = BandedCholesky::from_dense(M_bb, nb - 1);
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> c(np), m(nb), z(nb);
  double best = 1.0;
  for (int t = 0; t < trials; ++t) {
    double norm2_c = 0.0;
    for (int i = 0; i < np; ++i) {
      c[i] = gauss(rng);
      norm2_c += c[i] * c[i];
    }
    // sup over the bubble space: ‖Π_b p‖ / ‖p‖ with M_pp = Id
    for (int b = 0; b < nb; ++b) {
      double s = 0.0;
      for (int i = 0; i < np; ++i) s += M_pb(i, b) * c[i];
      m[b] = s;
    }
    chol.solve(m.data(), z.data());
    double proj2 = 0.0;
    for (int b = 0; b < nb; ++b) proj2 += m[b] * z[b];
    best = std::min(best, std::sqrt(std::max(proj2, 0.0) / norm2_c));
  }
  return best;
}

}  // namespace

double alpha_sampled(int d, int q, int gen, RefineRule rule, int trials, unsigned seed) {
  if (d == 1) {
    if (rule != RefineRule::Bisection)
      throw std::invalid_argument("alpha_sampled: d=1 supports bisection only");
    // rebuild the same grams the eigen formula uses
    const int n = 1 << gen;
    const BasisTable bubble =
        build_space({Continuity::C0, q, Boundary::ZeroTrace, Interval1D(0.0, 1.0, n), 0});
    const int nb = bubble.dim;
    DenseMatrix M_pb(q + 1, nb);
    const QuadRule& rule1d = gauss_rule(q + 2);
    std::vector<std::vector<double>> leg;
    for (int k = 0; k <= q; ++k) leg.push_back(shifted_legendre(k));
    const double h = bubble.mesh.h();
    for (int c = 0; c < n; ++c)
      for (size_t p = 0; p < rule1d.points.size(); ++p) {
        const double s = rule1d.points[p];
        const double x = bubble.mesh.node(c) + s * h;
        const double w = rule1d.weights[p] * h;
        for (int l = 0; l < bubble.local_dim(); ++l) {
          const int g = bubble.global_index(c, l);
          if (g < 0) continue;
          const double bv = bubble.shape_value(l, s);
          for (int k = 0; k <= q; ++k) {
            double pv = 0.0;
            for (size_t dd = leg[k].size(); dd-- > 0;) pv = pv * x + leg[k][dd];
            M_pb(k, g) += w * pv * bv;
          }
        }
      }
    DenseMatrix M_bb(nb, nb);
    M_bb.a = mass(bubble, bubble).dense();
    return sampled_min_quotient(M_pb, M_bb, trials, seed);
  }
  const TriCorners ref{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  const BubbleProblem prob = build_bubble_problem(q, gen, ref);
  return sampled_min_quotient(prob.M_pb, prob.M_bb, trials, seed);
}

std::vector<AlphaRow> alpha_table(int d, int q, RefineRule rule, int max_gen) {
  std::vector<AlphaRow> rows;
  for (int g = 1; g <= max_gen; ++g) rows.push_back({d, q, rule, g, alpha(d, q, g, rule)});
  return rows;
}

std::string alpha_csv(const std::vector<AlphaRow>& rows) {
  std::ostringstream os;
  os << "d,q,rule,ell,alpha\n";
  os.precision(12);
  for (const AlphaRow& r : rows)
    os << r.d << ',' << r.q << ',' << to_string(r.rule) << ',' << r.gen << ',' << r.alpha << '\n';
  return os.str();
}

namespace {

constexpr double kQuarterTol = 1e-9;

bool bary_is(const std::array<double, 3>& l, double a, double b, double c) {
  return std::abs(l[0] - a) < kQuarterTol && std::abs(l[1] - b) < kQuarterTol &&
         std::abs(l[2] - c) < kQuarterTol;
}

}  // namespace

AppendixResult appendix_construct() {
  const TriCorners corners{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}};
  const TriMesh fine = TriMesh::single(corners).red_refined();
  const TriPqSpace space = TriPqSpace::build(fine, 2);
  const int nf = space.dim();  // 15

  AppendixResult res;
  res.fine_mass = fe_mass(space, 1.0 / TriMesh::single(corners).area(0));  // |T̂| = 1

  // classify the fine nodes by barycentric position
  std::array<int, 3> corner_node{-1, -1, -1};
  std::array<int, 3> mid_opp{-1, -1, -1};      // midpoint of the edge opposite vertex k
  std::array<int, 3> interior_near{-1, -1, -1};  // interior node nearest vertex k
  // quarter nodes on the edge opposite k, adjacent to each endpoint
  std::map<std::pair<int, int>, int> quarter;  // (opposite vertex, nearest endpoint) -> node
  for (int i = 0; i < nf; ++i) {
    const auto l = barycentric(corners, space.nodes[i]);
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> e{0.0, 0.0, 0.0};
      e[k] = 1.0;
      if (bary_is(l, e[0], e[1], e[2])) corner_node[k] = i;
      std::array<double, 3> m{0.5, 0.5, 0.5};
      m[k] = 0.0;
      if (bary_is(l, m[0], m[1], m[2])) mid_opp[k] = i;
      std::array<double, 3> c{0.25, 0.25, 0.25};
      c[k] = 0.5;
      if (bary_is(l, c[0], c[1], c[2])) interior_near[k] = i;
      for (int j = 0; j < 3; ++j) {
        if (j == k) continue;
        std::array<double, 3> qb{0.0, 0.0, 0.0};
        qb[j] = 0.75;
        qb[3 - j - k] = 0.25;
        if (bary_is(l, qb[0], qb[1], qb[2])) quarter[{k, j}] = i;
      }
    }
  }
  res.corner_nodes = {corner_node[0], corner_node[1], corner_node[2]};

  // primal side: P1 nodal interpolants and quadratic edge bubbles 4 λi λj
  DenseMatrix primal(6, nf);
  res.p1_nodal = DenseMatrix(3, nf);
  for (int i = 0; i < nf; ++i) {
    const auto l = barycentric(corners, space.nodes[i]);
    for (int k = 0; k < 3; ++k) {
      primal(k, i) = l[k];
      res.p1_nodal(k, i) = l[k];
      const int a = (k + 1) % 3, b = (k + 2) % 3;
      primal(3 + k, i) = 4.0 * l[a] * l[b];  // bubble on the edge opposite k
    }
  }

  // dual side: fine P2 nodal functions (vertex functions omitted)
  DenseMatrix dual(6, nf);
  for (int k = 0; k < 3; ++k) {
    dual(k, interior_near[k]) = 1.0;  // ṽ_k
    dual(3 + k, mid_opp[k]) = 1.0;    // ẽ on the edge opposite k
  }

  // step (1): make the primal edge bubbles orthogonal to the ṽ's
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    for (int i = 0; i < nf; ++i)
      primal(3 + k, i) += -0.7 * (primal(a, i) + primal(b, i)) + 7.0 / 30.0 * primal(k, i);
  }
  // step (2): recombine each ẽ with the same-edge quarter nodes. The
  // coefficient ratio 68:21 cancels the cross pairings; the overall scale
  // makes the same-edge pairing one in the unit-area measure.
  constexpr double kMidCoeff = 51.0;
  constexpr double kQuarterCoeff = 63.0 / 4.0;
  for (int k = 0; k < 3; ++k) {
    const int a = (k + 1) % 3, b = (k + 2) % 3;
    std::vector<double> row(nf, 0.0);
    row[mid_opp[k]] = kMidCoeff;
    row[quarter.at({k, a})] -= kQuarterCoeff;
    row[quarter.at({k, b})] -= kQuarterCoeff;
    for (int i = 0; i < nf; ++i) dual(3 + k, i) = row[i];
  }
  // step (3): recombine the ṽ's; 6(4 Id − 1) inverts ⟨v_i, ṽ_j⟩ = (Id + 1)/24
  {
    DenseMatrix vt(3, nf);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < nf; ++i) vt(k, i) = dual(k, i);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < nf; ++i)
        dual(k, i) = 6.0 * (3.0 * vt(k, i) - vt((k + 1) % 3, i) - vt((k + 2) % 3, i));
  }

  // generalized mass matrix ⟨primal_i, dual_j⟩ in the |T̂|-normalized measure
  DenseMatrix G(6, 6);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> mi(nf, 0.0);
    for (int r = 0; r < nf; ++r) {
      double s = 0.0;
      for (int c = 0; c < nf; ++c) s += res.fine_mass(r, c) * primal(i, c);
      mi[r] = s;
    }
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int r = 0; r < nf; ++r) s += mi[r] * dual(j, r);
      G(i, j) = s;
    }
  }
  res.generalized_mass = G;
  res.primal = std::move(primal);
  res.dual = std::move(dual);
  return res;
}

AppendixResult appendix_biorthogonalize() {
  AppendixResult res = appendix_construct();
  const int nf = res.primal.cols;
  // Φ ← [[Id, -S],[0, Id]] Φ with S the computed off-diagonal block
  DenseMatrix primal = res.primal;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < nf; ++c) {
      double s = primal(i, c);
      for (int j = 0; j < 3; ++j) s -= res.generalized_mass(i, 3 + j) * res.primal(3 + j, c);
      primal(i, c) = s;
    }
  res.primal = std::move(primal);

  DenseMatrix G(6, 6);
  for (int i = 0; i < 6; ++i) {
    std::vector<double> mi(nf, 0.0);
    for (int r = 0; r < nf; ++r) {
      double s = 0.0;
      for (int c = 0; c < nf; ++c) s += res.fine_mass(r, c) * res.primal(i, c);
      mi[r] = s;
    }
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int r = 0; r < nf; ++r) s += mi[r] * res.dual(j, r);
      G(i, j) = s;
    }
  }
  res.biorthogonal_gram = std::move(G);
  return res;
}

}  // namespace paradat::infsup
