#include "paradat/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "paradat/factor_matrix.hpp"
#include "paradat/quadrature.hpp"

namespace paradat {

TensorSpaces TensorSpaces::create(const TensorGrid& grid, const std::vector<int>& levels,
                                  bool ybar_reduced_time_degree) {
  TensorSpaces s;
  s.grid = grid;
  s.xt = build_space({Continuity::C0, 1, Boundary::Free, grid.time, 0});
  s.xx = build_space({Continuity::C0, 1, Boundary::ZeroTrace, grid.space, 0});
  s.yt = legendre_orthonormalize({Continuity::DG, 1, Boundary::Free, grid.time, 0});
  s.ybar_t = ybar_reduced_time_degree
                 ? legendre_orthonormalize({Continuity::DG, 0, Boundary::Free, grid.time, 0})
                 : s.yt;
  s.zt = legendre_orthonormalize({Continuity::DG, 0, Boundary::Free, grid.time, 0});
  s.zx = build_space({Continuity::C0, 1, Boundary::Free, grid.space, 0});
  for (int l : levels)
    s.yx_level.emplace(l, build_space({Continuity::C0, 1, Boundary::ZeroTrace, grid.space, l}));
  return s;
}

const BasisTable& TensorSpaces::yx(int level) const {
  auto it = yx_level.find(level);
  if (it == yx_level.end())
    throw std::invalid_argument("TensorSpaces: test level " + std::to_string(level) +
                                " was not assembled");
  return it->second;
}

KroneckerOp assemble_B(const TensorSpaces& spaces, int level, const HeatCoefficients& coeffs) {
  const BasisTable& yx = spaces.yx(level);
  KroneckerOp B;
  auto Dt = std::make_shared<const FactorMatrix>(deriv(spaces.yt, spaces.xt));
  auto Mt = std::make_shared<const FactorMatrix>(mass(spaces.yt, spaces.xt));
  auto Mx = std::make_shared<const FactorMatrix>(mass(yx, spaces.xx));
  auto Ax = std::make_shared<const FactorMatrix>(stiffness(yx, spaces.xx));
  B.add_term(1.0, Dt, Mx);
  B.add_term(1.0, Mt, Ax);
  if (coeffs.b != 0.0)
    B.add_term(coeffs.b, Mt, std::make_shared<const FactorMatrix>(deriv(yx, spaces.xx)));
  if (coeffs.c != 0.0) B.add_term(coeffs.c, Mt, Mx);
  return B;
}

KroneckerOp assemble_trace0(const TensorSpaces& spaces) {
  const double t0 = spaces.grid.time.a;
  KroneckerOp op;
  op.add_term(1.0, FactorMatrix::outer(trace_vector(spaces.xt, t0)), mass(spaces.xx, spaces.xx));
  return op;
}

KroneckerOp assemble_obs_mass(const TensorSpaces& spaces, const ObservationWindow& window) {
  KroneckerOp op;
  op.add_term(1.0, mass(spaces.xt, spaces.xt), masked_mass(spaces.xx, spaces.xx, window));
  return op;
}

FoslsOps assemble_fosls(const TensorSpaces& spaces, int level, const HeatCoefficients& coeffs) {
  const BasisTable& yx = spaces.yx(level);
  FoslsOps ops;

  auto Dt = std::make_shared<const FactorMatrix>(deriv(spaces.ybar_t, spaces.xt));
  auto Mt_yx = std::make_shared<const FactorMatrix>(mass(spaces.ybar_t, spaces.xt));
  auto Mx_cross = std::make_shared<const FactorMatrix>(mass(yx, spaces.xx));
  ops.C_u.add_term(1.0, Dt, Mx_cross);
  if (coeffs.b != 0.0)
    ops.C_u.add_term(coeffs.b, Mt_yx, std::make_shared<const FactorMatrix>(deriv(yx, spaces.xx)));
  if (coeffs.c != 0.0) ops.C_u.add_term(coeffs.c, Mt_yx, Mx_cross);

  // (C_p q)(v) = ∫∫ q ∂x v
  ops.C_p.add_term(1.0, mass(spaces.ybar_t, spaces.zt),
                   assemble_form(yx, spaces.zx, /*row_deriv=*/1, /*col_deriv=*/0));

  ops.J.add_term(1.0, mass(spaces.xt, spaces.zt),
                 assemble_form(spaces.xx, spaces.zx, /*row_deriv=*/1, /*col_deriv=*/0));
  ops.L.add_term(1.0, mass(spaces.xt, spaces.xt), stiffness(spaces.xx, spaces.xx));
  ops.N.add_term(1.0, mass(spaces.zt, spaces.zt), mass(spaces.zx, spaces.zx));
  return ops;
}

int data_quad_points(double h) {
  if (h >= 1.0 / 64.0) return 7;
  if (h >= 1.0 / 512.0) return 5;
  return 3;
}

std::vector<double> assemble_functional(const BasisTable& bt, const BasisTable& bx,
                                        const std::function<double(double, double)>& fn,
                                        std::optional<ObservationWindow> window) {
  const QuadRule& qt = gauss_rule(data_quad_points(bt.mesh.h()));
  const QuadRule& qx = gauss_rule(data_quad_points(bx.mesh.h()));
  std::vector<Segment> xsegs = window ? restrict_to(bx.mesh, window->omega_lo, window->omega_hi)
                                      : split_at(bx.mesh, {});
  std::vector<double> out(static_cast<size_t>(bt.dim) * bx.dim, 0.0);
  const double ht = bt.mesh.h(), hx = bx.mesh.h();

  for (int ct = 0; ct < bt.mesh.n; ++ct) {
    const double t0 = bt.mesh.node(ct);
    for (size_t pt = 0; pt < qt.points.size(); ++pt) {
      const double t = t0 + qt.points[pt] * ht;
      const double wt = qt.weights[pt] * ht;
      for (const Segment& seg : xsegs) {
        const double len = seg.hi - seg.lo;
        const double x0 = bx.mesh.node(seg.cell);
        for (size_t px = 0; px < qx.points.size(); ++px) {
          const double x = seg.lo + qx.points[px] * len;
          const double wx = qx.weights[px] * len;
          const double v = fn(t, x) * wt * wx;
          if (v == 0.0) continue;
          const double sx = (x - x0) / hx;
          const double st = qt.points[pt];
          for (int lt = 0; lt < bt.local_dim(); ++lt) {
            const int gt = bt.global_index(ct, lt);
            if (gt < 0) continue;
            const double vt = bt.shape_value(lt, st);
            for (int lx = 0; lx < bx.local_dim(); ++lx) {
              const int gx = bx.global_index(seg.cell, lx);
              if (gx < 0) continue;
              out[static_cast<size_t>(gt) * bx.dim + gx] += v * vt * bx.shape_value(lx, sx);
            }
          }
        }
      }
    }
  }
  return out;
}

double functional_norm2(const Interval1D& tmesh, const Interval1D& xmesh,
                        const std::function<double(double, double)>& fn,
                        std::optional<ObservationWindow> window) {
  const QuadRule& qt = gauss_rule(data_quad_points(tmesh.h()));
  const QuadRule& qx = gauss_rule(data_quad_points(xmesh.h()));
  std::vector<Segment> xsegs =
      window ? restrict_to(xmesh, window->omega_lo, window->omega_hi) : split_at(xmesh, {});
  double acc = 0.0;
  const double ht = tmesh.h();
  for (int ct = 0; ct < tmesh.n; ++ct) {
    const double t0 = tmesh.node(ct);
    for (size_t pt = 0; pt < qt.points.size(); ++pt) {
      const double t = t0 + qt.points[pt] * ht;
      const double wt = qt.weights[pt] * ht;
      for (const Segment& seg : xsegs) {
        const double len = seg.hi - seg.lo;
        for (size_t px = 0; px < qx.points.size(); ++px) {
          const double x = seg.lo + qx.points[px] * len;
          const double v = fn(t, x);
          acc += wt * qx.weights[px] * len * v * v;
        }
      }
    }
  }
  return acc;
}

LoadVectors load_vectors(const ProblemData& data, const TensorSpaces& spaces, int level,
                         bool on_ybar) {
  if (data.window.omega_hi > spaces.grid.space.b || data.window.omega_lo < spaces.grid.space.a)
    throw std::invalid_argument("load_vectors: window outside the spatial domain");
  const ManufacturedSolution& sol = data.solution;
  const auto forcing = [&sol](double t, double x) { return sol.du_dt(t, x) - sol.d2u_dx2(t, x); };
  const double lambda = data.lambda;
  const auto observed = [&sol, lambda](double t, double x) { return sol.u(t, x) + lambda; };

  LoadVectors out;
  const BasisTable& bt = on_ybar ? spaces.ybar_t : spaces.yt;
  out.g = assemble_functional(bt, spaces.yx(level), forcing);
  out.f = assemble_functional(spaces.xt, spaces.xx, observed, data.window);
  out.f_norm2 = functional_norm2(spaces.grid.time, spaces.grid.space, observed, data.window);
  return out;
}

}  // namespace paradat
