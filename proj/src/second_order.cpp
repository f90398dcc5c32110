#include "paradat/second_order.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paradat/factor_matrix.hpp"
#include "paradat/quadrature.hpp"

namespace paradat {

const TestBundle& SecondOrderSystem::bundle(int level) const {
  auto it = bundles.find(level);
  if (it == bundles.end())
    throw std::invalid_argument("SecondOrderSystem: no bundle for level " +
                                std::to_string(level));
  return it->second;
}

SecondOrderSystem build_second_order(const TensorGrid& grid, const ProblemData& data,
                                     const SecondOrderOptions& opts) {
  std::vector<int> levels = opts.estimator_levels;
  levels.push_back(opts.ell);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (data.raw && (levels.size() != 1 || levels.front() != opts.ell))
    throw std::invalid_argument(
        "build_second_order: raw data is tied to the solve level; estimator levels must match");

  SecondOrderSystem sys;
  sys.spaces = TensorSpaces::create(grid, levels);
  sys.data = data;
  sys.ell = opts.ell;
  sys.eps = data.eps;
  sys.M_obs = assemble_obs_mass(sys.spaces, data.window);
  sys.M_trace = assemble_trace0(sys.spaces);

  const FactorMatrix mt = mass(sys.spaces.xt, sys.spaces.xt);
  const FactorMatrix kt = stiffness(sys.spaces.xt, sys.spaces.xt);
  const FactorMatrix ax = stiffness(sys.spaces.xx, sys.spaces.xx);
  const FactorMatrix mx = mass(sys.spaces.xx, sys.spaces.xx);
  sys.KX = RieszInverse::make_KX(mt, kt, ax, mx, sys.spaces.xx.desc);

  for (int level : levels) {
    TestBundle b;
    b.B = assemble_B(sys.spaces, level, opts.coeffs);
    const BasisTable& yx = sys.spaces.yx(level);
    b.KY = RieszInverse::make_KY(mass(sys.spaces.yt, sys.spaces.yt), stiffness(yx, yx));
    if (data.raw) {
      if (static_cast<int>(data.raw->g.size()) != b.B.rows() ||
          static_cast<int>(data.raw->f.size()) != sys.spaces.x_dim())
        throw std::invalid_argument("build_second_order: raw data dimensions mismatch");
      b.g = data.raw->g;
      sys.f = data.raw->f;
      sys.f_norm2 = data.raw->f_norm2;
    } else {
      LoadVectors loads = load_vectors(data, sys.spaces, level);
      b.g = std::move(loads.g);
      if (level == levels.front()) {
        sys.f = std::move(loads.f);
        sys.f_norm2 = loads.f_norm2;
      }
    }
    sys.bundles.emplace(level, std::move(b));
  }
  return sys;
}

namespace {

struct Work {
  std::vector<double> y1, y2, y3, scratch;
};

void schur_apply_impl(const SecondOrderSystem& sys, const TestBundle& b,
                      const std::vector<double>& u, std::vector<double>& y, Work& w) {
  b.B.apply(u, w.y1, w.scratch);
  b.KY.apply(w.y1, w.y2);
  b.B.apply_transpose(w.y2, y, w.scratch);
  sys.M_obs.apply(u, w.y3, w.scratch);
  axpy(1.0, w.y3, y);
  if (sys.eps != 0.0) {
    sys.M_trace.apply(u, w.y3, w.scratch);
    axpy(sys.eps * sys.eps, w.y3, y);
  }
}

double estimate_impl(const SecondOrderSystem& sys, const TestBundle& b,
                     const std::vector<double>& u, double eps_tilde, Work& w) {
  b.B.apply(u, w.y1, w.scratch);
  for (size_t i = 0; i < w.y1.size(); ++i) w.y1[i] = b.g[i] - w.y1[i];
  b.KY.apply(w.y1, w.y2);
  double val = dot(w.y1, w.y2);
  sys.M_obs.apply(u, w.y3, w.scratch);
  val += dot(u, w.y3) - 2.0 * dot(u, sys.f) + sys.f_norm2;
  if (eps_tilde != 0.0) {
    sys.M_trace.apply(u, w.y3, w.scratch);
    val += eps_tilde * eps_tilde * dot(u, w.y3);
  }
  return val;
}

}  // namespace

void schur_apply(const SecondOrderSystem& sys, const std::vector<double>& u,
                 std::vector<double>& y) {
  Work w;
  y.resize(u.size());
  schur_apply_impl(sys, sys.bundle(sys.ell), u, y, w);
}

double estimate(const SecondOrderSystem& sys, const std::vector<double>& u, double eps_tilde,
                int level) {
  Work w;
  const double val = estimate_impl(sys, sys.bundle(level), u, eps_tilde, w);
  return std::max(val, 0.0);
}

SolveReport solve(const SecondOrderSystem& sys, const SolveConfig& cfg) {
  if (sys.eps == 0.0 && cfg.pcg.stop_rule == StopRule::EstimatorCoupled)
    throw std::invalid_argument(
        "solve: eps = 0 admits no estimator-coupled stop; use a fixed tolerance");

  const TestBundle& b = sys.bundle(sys.ell);
  Work w;

  // h = f_ω + Bᵀ K_Y g
  std::vector<double> rhs(sys.dim());
  b.KY.apply(b.g, w.y2);
  b.B.apply_transpose(w.y2, rhs, w.scratch);
  axpy(1.0, sys.f, rhs);

  Work aw;
  LinearOperator A = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.resize(x.size());
    schur_apply_impl(sys, b, x, y, aw);
  };
  LinearOperator K = [&](const std::vector<double>& x, std::vector<double>& y) {
    sys.KX.apply(x, y);
  };

  SolveReport report;
  Work pw;
  const double eps2 = sys.eps * sys.eps;
  const int stride = std::max(cfg.probe_stride, 1);
  int probe_calls = 0;
  auto probe = [&](const std::vector<double>& x, double rKr) {
    if (++probe_calls % stride != 0) return false;
    const double est0 = std::max(estimate_impl(sys, b, x, 0.0, pw), 0.0);
    report.stop_transcript.push_back({probe_calls, rKr, est0});
    return rKr <= cfg.stop_mu * eps2 * est0;
  };

  PcgResult r = pcg(A, K, rhs, cfg.pcg, probe);
  report.u = std::move(r.x);
  report.iterations = r.iters;
  report.converged = r.converged;
  report.reason = std::move(r.reason);
  report.residual_history = std::move(r.residual_history);
  report.spectral = r.spectral;

  // μ = K_Y (g − B u) on the solve level
  b.B.apply(report.u, w.y1, w.scratch);
  for (size_t i = 0; i < w.y1.size(); ++i) w.y1[i] = b.g[i] - w.y1[i];
  report.mu.resize(w.y1.size());
  b.KY.apply(w.y1.data(), report.mu.data());

  report.report_level = cfg.report_level >= 0 ? cfg.report_level : sys.max_level();
  report.estimator0 = estimate(sys, report.u, 0.0, report.report_level);
  report.estimator_eps = estimate(sys, report.u, sys.eps, report.report_level);
  return report;
}

std::vector<double> time_slice_errors(const TensorSpaces& spaces, const std::vector<double>& u,
                                      const ManufacturedSolution& exact,
                                      const std::vector<double>& times) {
  const BasisTable& xt = spaces.xt;
  const BasisTable& xx = spaces.xx;
  const Interval1D& tmesh = spaces.grid.time;
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < tmesh.a - 1e-14 || t > tmesh.b + 1e-14)
      throw std::invalid_argument("time_slice_errors: t outside [0, T]");
    const std::vector<double> vt = xt.point_values(t);
    std::vector<double> slice(xx.dim, 0.0);
    for (int it = 0; it < xt.dim; ++it) {
      if (vt[it] == 0.0) continue;
      for (int j = 0; j < xx.dim; ++j) slice[j] += vt[it] * u[static_cast<size_t>(it) * xx.dim + j];
    }
    // ∫_Ω (u_h(t,·) − u(t,·))² by cell quadrature
    const QuadRule& q = gauss_rule(data_quad_points(xx.mesh.h()));
    const double hx = xx.mesh.h();
    double acc = 0.0;
    for (int c = 0; c < xx.mesh.n; ++c) {
      for (size_t p = 0; p < q.points.size(); ++p) {
        const double s = q.points[p];
        const double x = xx.mesh.node(c) + s * hx;
        double uh = 0.0;
        for (int l = 0; l < xx.local_dim(); ++l) {
          const int g = xx.global_index(c, l);
          if (g >= 0) uh += slice[g] * xx.shape_value(l, s);
        }
        const double diff = uh - exact.u(t, x);
        acc += q.weights[p] * hx * diff * diff;
      }
    }
    out.push_back(std::sqrt(acc));
  }
  return out;
}

std::vector<double> time_slice_errors(const SecondOrderSystem& sys, const std::vector<double>& u,
                                      const ManufacturedSolution& exact,
                                      const std::vector<double>& times) {
  return time_slice_errors(sys.spaces, u, exact, times);
}

double energy_norm(const SecondOrderSystem& sys, const std::vector<double>& v) {
  std::vector<double> y;
  schur_apply(sys, v, y);
  return std::sqrt(std::max(dot(v, y), 0.0));
}

std::vector<double> interpolate_x(const TensorSpaces& spaces,
                                  const std::function<double(double, double)>& fn) {
  const BasisTable& xt = spaces.xt;
  const BasisTable& xx = spaces.xx;
  std::vector<double> u(static_cast<size_t>(xt.dim) * xx.dim, 0.0);
  for (int it = 0; it < xt.dim; ++it) {
    const double t = xt.mesh.node(it);  // CG-P1 dof i sits at node i
    for (int j = 0; j < xx.dim; ++j) {
      const double x = xx.mesh.node(j + 1);  // zero-trace: dof j at interior node j+1
      u[static_cast<size_t>(it) * xx.dim + j] = fn(t, x);
    }
  }
  return u;
}

}  // namespace paradat
