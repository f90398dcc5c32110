#pragma once

#include <array>
#include <string>
#include <vector>

#include "paradat/linalg.hpp"

namespace paradat::infsup {

enum class RefineRule { Bisection, Red };
std::string to_string(RefineRule r);

using Point2 = std::array<double, 2>;
using TriCorners = std::array<Point2, 3>;

/// Conforming triangulation produced by recursive red refinement of one
/// reference triangle.
struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> tris;

  static TriMesh single(const TriCorners& corners);
  TriMesh red_refined() const;
  double area(int tri) const;
  double total_area() const;
};

/// Continuous P_q (q = 1, 2) Lagrange space on a TriMesh: node coordinates
/// and the per-triangle local-to-global map (P2 local order: v0 v1 v2, then
/// midpoints of edges 01, 12, 20).
struct TriPqSpace {
  int q = 1;
  const TriMesh* mesh = nullptr;
  std::vector<Point2> nodes;
  std::vector<std::vector<int>> tri_dofs;

  static TriPqSpace build(const TriMesh& mesh, int q);
  int dim() const { return static_cast<int>(nodes.size()); }
};

/// Quadrature on the reference triangle: barycentric points and weights with
/// Σw = 1, exact for polynomials up to `degree` (Duffy-collapsed Gauss).
struct TriQuad {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
};
TriQuad tri_quadrature(int degree);

/// Interior-bubble dimension  dim H¹₀(T') ∩ Π P_q(T)  at generation `gen`.
int bubble_dim(int d, int q, int gen, RefineRule rule);
int poly_dim(int d, int q);

/// The reference-element inf-sup constant α(q, ℓ):
/// α² = λ_min of M_pp⁻¹ M_pb M_bb⁻¹ M_pbᵀ with exact Gram matrices. Zero
/// when the bubble space is rank-deficient against P_q.
/// Supported: d = 1 with bisection (q = 1..4), d = 2 with red (q = 1..2).
double alpha(int d, int q, int gen, RefineRule rule);

/// d = 2 variant on arbitrary corners (α is affine-invariant).
double alpha_on_triangle(int q, int gen, const TriCorners& corners);

/// Direct-definition evaluation: the infimum over random polynomials p of
/// sup_b ⟨p,b⟩/(‖p‖‖b‖), each sup computed by the bubble-space projection
/// (a linear solve; no eigensolver involved). A sampled upper bound on α.
double alpha_sampled(int d, int q, int gen, RefineRule rule, int trials, unsigned seed);

struct AlphaRow {
  int d;
  int q;
  RefineRule rule;
  int gen;
  double alpha;
};
std::vector<AlphaRow> alpha_table(int d, int q, RefineRule rule, int max_gen);
std::string alpha_csv(const std::vector<AlphaRow>& rows);

/// The Appendix construction on the red-refined reference triangle with
/// |T̂| = 1: six primal functions (P1 nodals + edge bubbles) and six dual
/// functions (combinations of fine P2 nodals), carried through the three
/// rescaling steps and the final block elimination.
struct AppendixResult {
  DenseMatrix generalized_mass;   // 6x6 after steps (1)-(3)
  DenseMatrix biorthogonal_gram;  // 6x6 after the final transformation
  DenseMatrix primal;             // rows: the 6 final primal functions (fine P2 coeffs)
  DenseMatrix dual;               // rows: the 6 dual functions
  DenseMatrix fine_mass;          // 15x15 fine-space mass, |T̂|-normalized
  std::vector<int> corner_nodes;  // fine-space indices of the 3 vertices of T̂
  DenseMatrix p1_nodal;           // rows: interpolants of the 3 barycentric coords
};

/// Steps (1)-(3); generalized_mass is the paper's 2x2-block matrix.
AppendixResult appendix_construct();

/// Adds the final transformation Φ ← [[Id, -S],[0, Id]] Φ; the returned
/// biorthogonal_gram equals the identity up to roundoff.
AppendixResult appendix_biorthogonalize();

}  // namespace paradat::infsup
