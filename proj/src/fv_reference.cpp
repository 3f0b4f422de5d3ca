#include "m1dg/fv_reference.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "m1dg/error.hpp"
#include "m1dg/mesh.hpp"
#include "m1dg/parallel.hpp"

namespace m1dg {

FVGrid::FVGrid(const Box& b, int nx_, int ny_) : domain(b), nx(nx_), ny(ny_) {
  if (nx < 1 || ny < 1) throw ConfigError(fmt::format("FV resolution must be positive, got {}x{}", nx, ny));
  if (!(b.width() > 0.0 && b.height() > 0.0)) throw ConfigError("domain extents must be positive");
  dx = b.width() / nx;
  dy = b.height() / ny;
  u.assign(static_cast<std::size_t>(nx) * ny, MomentVector{});
}

Vec2 FVGrid::center(int i, int j) const {
  return {domain.xmin + (i + 0.5) * dx, domain.ymin + (j + 0.5) * dy};
}

FVSources fv_sample_sources(const FVGrid& g, const ScalarField& sigma_a, const ScalarField& sigma_s,
                            const ScalarField& q0, const ScalarField& q1x, const ScalarField& q1y) {
  const std::size_t n = g.u.size();
  FVSources s{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
              std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      const Vec2 x = g.center(i, j);
      if (sigma_a) s.sigma_a[k] = sigma_a(x.x, x.y);
      if (sigma_s) s.sigma_s[k] = sigma_s(x.x, x.y);
      if (q0) s.q0[k] = q0(x.x, x.y);
      if (q1x) s.q1x[k] = q1x(x.x, x.y);
      if (q1y) s.q1y[k] = q1y(x.x, x.y);
    }
  return s;
}

double fv_time_step(const FVGrid& g, const FVSources& s, double cfl) {
  double sigma = 0.0;
  for (std::size_t k = 0; k < s.sigma_a.size(); ++k) sigma = std::max(sigma, s.sigma_a[k] + s.sigma_s[k]);
  return cfl / (1.0 / g.dx + 1.0 / g.dy + sigma);
}

FVGrid fv_step(const FVGrid& g, double dt, const FVSources& s, const FVGhosts& ghosts, double t, double alpha,
               int workers) {
  FVGrid out = g;
  const double lx = dt / g.dx, ly = dt / g.dy;
  const Vec2 nr{1.0, 0.0}, nt{0.0, 1.0};
  auto neighbor = [&](int i, int j, int di, int dj) -> MomentVector {
    const int ii = i + di, jj = j + dj;
    if (ii >= 0 && ii < g.nx && jj >= 0 && jj < g.ny) return g.at(ii, jj);
    int tag;
    Vec2 n;
    const Vec2 c = g.center(i, j);
    Vec2 x = c;
    if (ii < 0) { tag = boundary::kLeft; n = {-1.0, 0.0}; x.x = g.domain.xmin; }
    else if (ii >= g.nx) { tag = boundary::kRight; n = {1.0, 0.0}; x.x = g.domain.xmax; }
    else if (jj < 0) { tag = boundary::kBottom; n = {0.0, -1.0}; x.y = g.domain.ymin; }
    else { tag = boundary::kTop; n = {0.0, 1.0}; x.y = g.domain.ymax; }
    return ghost_state(g.at(i, j), ghosts.at(tag), n, x, t);
  };
  parallel_for(static_cast<std::size_t>(g.ny), workers, [&](std::size_t jr) {
    const int j = static_cast<int>(jr);
    for (int i = 0; i < g.nx; ++i) {
      const MomentVector u = realizability_fix(g.at(i, j));
      const MomentVector ul = realizability_fix(neighbor(i, j, -1, 0));
      const MomentVector ur = realizability_fix(neighbor(i, j, 1, 0));
      const MomentVector ub = realizability_fix(neighbor(i, j, 0, -1));
      const MomentVector ut = realizability_fix(neighbor(i, j, 0, 1));
      const State3 hr = lax_friedrichs_flux(u, ur, nr, alpha);
      const State3 hl = lax_friedrichs_flux(ul, u, nr, alpha);
      const State3 ht = lax_friedrichs_flux(u, ut, nt, alpha);
      const State3 hb = lax_friedrichs_flux(ub, u, nt, alpha);
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      const MomentVector& u0 = g.u[k];
      const double sa = s.sigma_a[k], st = sa + s.sigma_s[k];
      MomentVector& v = out.u[k];
      v.psi0 = u0.psi0 - lx * (hr[0] - hl[0]) - ly * (ht[0] - hb[0]) + dt * (s.q0[k] - sa * u0.psi0);
      v.psi1x = u0.psi1x - lx * (hr[1] - hl[1]) - ly * (ht[1] - hb[1]) + dt * (s.q1x[k] - st * u0.psi1x);
      v.psi1y = u0.psi1y - lx * (hr[2] - hl[2]) - ly * (ht[2] - hb[2]) + dt * (s.q1y[k] - st * u0.psi1y);
      if (!std::isfinite(v.psi0) || !std::isfinite(v.psi1x) || !std::isfinite(v.psi1y)) {
        throw BlowUpError(fmt::format("FV step produced non-finite state at cell ({}, {})", i, j));
      }
    }
  });
  return out;
}

FVRunResult fv_run(FVGrid g, double T, const FVSources& s, const FVGhosts& ghosts, double cfl, int workers,
                   const std::function<void(const FVGrid&, double)>& observer) {
  if (!(T >= 0.0)) throw ConfigError("final time must be non-negative");
  FVRunResult r;
  const double dt_max = fv_time_step(g, s, cfl);
  double t = 0.0;
  while (t < T) {
    double dt = std::min(dt_max, T - t);
    if (dt < T - t && T - (t + dt) < 1e-12 * T) dt = 0.5 * (T - t);
    g = fv_step(g, dt, s, ghosts, t, 1.0, workers);
    t = (dt == T - t) ? T : t + dt;
    ++r.steps;
    for (const auto& u : g.u) r.non_realizable += is_realizable(u) ? 0 : 1;
    if (observer) observer(g, t);
  }
  r.time = t;
  r.grid = std::move(g);
  return r;
}

std::vector<Vec2> fv_gradients(const FVGrid& g, const std::vector<double>& f) {
  if (g.nx < 3 || g.ny < 3) throw ConfigError("gradients need at least 3x3 cells");
  std::vector<Vec2> out(f.size());
  auto v = [&](int i, int j) { return f[static_cast<std::size_t>(j) * g.nx + i]; };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Vec2 d;
      if (i == 0) d.x = (-3.0 * v(0, j) + 4.0 * v(1, j) - v(2, j)) / (2.0 * g.dx);
      else if (i == g.nx - 1) d.x = (3.0 * v(i, j) - 4.0 * v(i - 1, j) + v(i - 2, j)) / (2.0 * g.dx);
      else d.x = (v(i + 1, j) - v(i - 1, j)) / (2.0 * g.dx);
      if (j == 0) d.y = (-3.0 * v(i, 0) + 4.0 * v(i, 1) - v(i, 2)) / (2.0 * g.dy);
      else if (j == g.ny - 1) d.y = (3.0 * v(i, j) - 4.0 * v(i, j - 1) + v(i, j - 2)) / (2.0 * g.dy);
      else d.y = (v(i, j + 1) - v(i, j - 1)) / (2.0 * g.dy);
      out[static_cast<std::size_t>(j) * g.nx + i] = d;
    }
  return out;
}

std::vector<Vec2> fv_gradients(const FVGrid& g) {
  std::vector<double> f(g.u.size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = g.u[k].psi0;
  return fv_gradients(g, f);
}

} // namespace m1dg
