#include "paradat/fosls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paradat/factor_matrix.hpp"

namespace paradat {

const FoslsTestBundle& FoslsSystem::bundle(int level) const {
  auto it = bundles.find(level);
  if (it == bundles.end())
    throw std::invalid_argument("FoslsSystem: no bundle for level " + std::to_string(level));
  return it->second;
}

FoslsSystem build_fosls(const TensorGrid& grid, const ProblemData& data,
                        const FoslsOptions& opts) {
  std::vector<int> levels = opts.estimator_levels;
  levels.push_back(opts.ell);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (data.raw && (levels.size() != 1 || levels.front() != opts.ell))
    throw std::invalid_argument(
        "build_fosls: raw data is tied to the solve level; estimator levels must match");

  FoslsSystem sys;
  sys.spaces = TensorSpaces::create(grid, levels, opts.ybar_reduced_time_degree);
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
  sys.KZ = RieszInverse::make_KZ(mass(sys.spaces.zt, sys.spaces.zt),
                                 mass(sys.spaces.zx, sys.spaces.zx));

  for (int level : levels) {
    FoslsOps ops = assemble_fosls(sys.spaces, level, opts.coeffs);
    if (level == levels.front()) {
      sys.J = std::move(ops.J);
      sys.L = std::move(ops.L);
      sys.N = std::move(ops.N);
    }
    FoslsTestBundle b;
    b.C_u = std::move(ops.C_u);
    b.C_p = std::move(ops.C_p);
    const BasisTable& yx = sys.spaces.yx(level);
    b.KY = RieszInverse::make_KY(mass(sys.spaces.ybar_t, sys.spaces.ybar_t), stiffness(yx, yx));
    if (data.raw) {
      if (static_cast<int>(data.raw->g.size()) != b.C_u.rows() ||
          static_cast<int>(data.raw->f.size()) != sys.spaces.x_dim())
        throw std::invalid_argument("build_fosls: raw data dimensions mismatch");
      b.g = data.raw->g;
      sys.f = data.raw->f;
      sys.f_norm2 = data.raw->f_norm2;
    } else {
      LoadVectors loads = load_vectors(data, sys.spaces, level, /*on_ybar=*/true);
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
  std::vector<double> ry, ky, tu, tp, scratch;
};

// r_Y = ḡ − C_u u − C_p p (subtract_from_g) or C_u u + C_p p otherwise
void residual_y(const FoslsTestBundle& b, const double* u, const double* p, bool subtract_from_g,
                std::vector<double>& ry, Work& w) {
  const int ny = b.C_u.rows();
  ry.resize(ny);
  b.C_u.apply(u, ry.data(), w.scratch);
  w.tu.resize(ny);
  b.C_p.apply(p, w.tu.data(), w.scratch);
  if (subtract_from_g) {
    for (int i = 0; i < ny; ++i) ry[i] = b.g[i] - ry[i] - w.tu[i];
  } else {
    for (int i = 0; i < ny; ++i) ry[i] += w.tu[i];
  }
}

void schur_apply_impl(const FoslsSystem& sys, const FoslsTestBundle& b,
                      const std::vector<double>& up, std::vector<double>& y, Work& w) {
  const int nu = sys.u_dim(), np = sys.p_dim();
  const double* u = up.data();
  const double* p = up.data() + nu;
  y.assign(up.size(), 0.0);
  double* yu = y.data();
  double* yp = y.data() + nu;

  // common dual-space part: K_Y (C_u u + C_p p)
  residual_y(b, u, p, /*subtract_from_g=*/false, w.ry, w);
  w.ky.resize(w.ry.size());
  b.KY.apply(w.ry.data(), w.ky.data());

  std::vector<double>& t = w.tu;
  t.resize(nu);
  b.C_u.apply_transpose(w.ky.data(), yu, w.scratch);
  sys.L.apply(u, t.data(), w.scratch);
  for (int i = 0; i < nu; ++i) yu[i] += t[i];
  sys.M_obs.apply(u, t.data(), w.scratch);
  for (int i = 0; i < nu; ++i) yu[i] += t[i];
  if (sys.eps != 0.0) {
    sys.M_trace.apply(u, t.data(), w.scratch);
    const double e2 = sys.eps * sys.eps;
    for (int i = 0; i < nu; ++i) yu[i] += e2 * t[i];
  }
  w.tp.resize(nu);
  sys.J.apply(p, w.tp.data(), w.scratch);  // J p lives on the u block
  for (int i = 0; i < nu; ++i) yu[i] -= w.tp[i];

  b.C_p.apply_transpose(w.ky.data(), yp, w.scratch);
  w.tp.resize(np);
  sys.N.apply(p, w.tp.data(), w.scratch);
  for (int i = 0; i < np; ++i) yp[i] += w.tp[i];
  sys.J.apply_transpose(u, w.tp.data(), w.scratch);
  for (int i = 0; i < np; ++i) yp[i] -= w.tp[i];
}

double estimate_impl(const FoslsSystem& sys, const FoslsTestBundle& b,
                     const std::vector<double>& up, double eps_tilde, Work& w) {
  const int nu = sys.u_dim(), np = sys.p_dim();
  const double* u = up.data();
  const double* p = up.data() + nu;

  residual_y(b, u, p, /*subtract_from_g=*/true, w.ry, w);
  w.ky.resize(w.ry.size());
  b.KY.apply(w.ry.data(), w.ky.data());
  double val = 0.0;
  for (size_t i = 0; i < w.ry.size(); ++i) val += w.ry[i] * w.ky[i];

  // ‖p − ∂x u‖²_Z = ⟨Np,p⟩ − 2 uᵀ J p + ⟨Lu,u⟩
  w.tp.resize(np);
  sys.N.apply(p, w.tp.data(), w.scratch);
  for (int i = 0; i < np; ++i) val += p[i] * w.tp[i];
  w.tu.resize(nu);
  sys.J.apply(p, w.tu.data(), w.scratch);
  for (int i = 0; i < nu; ++i) val -= 2.0 * u[i] * w.tu[i];
  sys.L.apply(u, w.tu.data(), w.scratch);
  for (int i = 0; i < nu; ++i) val += u[i] * w.tu[i];

  sys.M_obs.apply(u, w.tu.data(), w.scratch);
  for (int i = 0; i < nu; ++i) val += u[i] * w.tu[i];
  for (int i = 0; i < nu; ++i) val -= 2.0 * u[i] * sys.f[i];
  val += sys.f_norm2;
  if (eps_tilde != 0.0) {
    sys.M_trace.apply(u, w.tu.data(), w.scratch);
    const double e2 = eps_tilde * eps_tilde;
    for (int i = 0; i < nu; ++i) val += e2 * u[i] * w.tu[i];
  }
  return val;
}

}  // namespace

void fosls_schur_apply(const FoslsSystem& sys, const std::vector<double>& up,
                       std::vector<double>& y) {
  Work w;
  schur_apply_impl(sys, sys.bundle(sys.ell), up, y, w);
}

double fosls_estimate(const FoslsSystem& sys, const std::vector<double>& up, double eps_tilde,
                      int level) {
  Work w;
  return std::max(estimate_impl(sys, sys.bundle(level), up, eps_tilde, w), 0.0);
}

FoslsReport fosls_solve(const FoslsSystem& sys, const SolveConfig& cfg) {
  if (sys.eps == 0.0 && cfg.pcg.stop_rule == StopRule::EstimatorCoupled)
    throw std::invalid_argument(
        "fosls_solve: eps = 0 admits no estimator-coupled stop; use a fixed tolerance");

  const FoslsTestBundle& b = sys.bundle(sys.ell);
  const int nu = sys.u_dim();
  Work w;

  // rhs = (f_ω + C_uᵀ K_Y ḡ, C_pᵀ K_Y ḡ)
  std::vector<double> rhs(sys.dim(), 0.0);
  w.ky.resize(b.g.size());
  b.KY.apply(b.g.data(), w.ky.data());
  b.C_u.apply_transpose(w.ky.data(), rhs.data(), w.scratch);
  for (int i = 0; i < nu; ++i) rhs[i] += sys.f[i];
  b.C_p.apply_transpose(w.ky.data(), rhs.data() + nu, w.scratch);

  Work aw;
  LinearOperator A = [&](const std::vector<double>& x, std::vector<double>& y) {
    schur_apply_impl(sys, b, x, y, aw);
  };
  LinearOperator K = [&](const std::vector<double>& x, std::vector<double>& y) {
    y.resize(x.size());
    sys.KX.apply(x.data(), y.data());
    sys.KZ.apply(x.data() + nu, y.data() + nu);
  };

  FoslsReport report;
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
  report.u.assign(r.x.begin(), r.x.begin() + nu);
  report.p.assign(r.x.begin() + nu, r.x.end());
  report.iterations = r.iters;
  report.converged = r.converged;
  report.reason = std::move(r.reason);
  report.residual_history = std::move(r.residual_history);
  report.spectral = r.spectral;

  residual_y(b, report.u.data(), report.p.data(), /*subtract_from_g=*/true, w.ry, w);
  report.lambda.resize(w.ry.size());
  b.KY.apply(w.ry.data(), report.lambda.data());

  report.report_level = cfg.report_level >= 0 ? cfg.report_level : sys.max_level();
  report.estimator0 = fosls_estimate(sys, r.x, 0.0, report.report_level);
  report.estimator_eps = fosls_estimate(sys, r.x, sys.eps, report.report_level);
  return report;
}

double fosls_energy_norm(const FoslsSystem& sys, const std::vector<double>& up) {
  std::vector<double> y;
  fosls_schur_apply(sys, up, y);
  return std::sqrt(std::max(dot(up, y), 0.0));
}

}  // namespace paradat
