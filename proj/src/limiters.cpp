#include "m1dg/limiters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <regex>

#include <fmt/format.h>

#include "m1dg/error.hpp"
#include "m1dg/parallel.hpp"

namespace m1dg {

void LimiterConfig::validate() const {
  if (slope_mode != SlopeMode::Off && !(M >= 0.0 && std::isfinite(M))) {
    throw ConfigError(fmt::format("TVB constant M must be finite and non-negative, got {}", M));
  }
  if (!(eps_fix > 0.0 && eps_fix < 1e-6)) {
    throw ConfigError(fmt::format("eps_fix must lie in (0, 1e-6), got {}", eps_fix));
  }
}

std::string valid_limiter_labels() {
  return "SL<M>, CL<M>, SRL<M>, CRL<M> with <M> a non-negative number or 'inf' (e.g. CRL22, SLinf)";
}

LimiterConfig parse_limiter_label(const std::string& label) {
  static const std::regex re(R"(^(SL|CL|SRL|CRL)(inf|[0-9]+(\.[0-9]*)?([eE][+-]?[0-9]+)?)$)");
  std::smatch m;
  if (!std::regex_match(label, m, re)) {
    throw ConfigError(fmt::format("unknown limiter label '{}'; valid labels: {}", label, valid_limiter_labels()));
  }
  const std::string family = m[1];
  LimiterConfig cfg;
  cfg.realizability = family == "SRL" || family == "CRL";
  const bool characteristic = family == "CL" || family == "CRL";
  if (m[2] == "inf") {
    cfg.slope_mode = SlopeMode::Off;
    cfg.M = std::numeric_limits<double>::infinity();
  } else {
    cfg.slope_mode = characteristic ? SlopeMode::Characteristic : SlopeMode::Primitive;
    cfg.M = std::stod(m[2]);
  }
  return cfg;
}

std::string limiter_label(const LimiterConfig& cfg) {
  const bool ch = cfg.slope_mode == SlopeMode::Characteristic;
  std::string family = ch ? (cfg.realizability ? "CRL" : "CL") : (cfg.realizability ? "SRL" : "SL");
  if (cfg.slope_mode == SlopeMode::Off) return family + "inf";
  return family + fmt::format("{}", cfg.M);
}

double tvb_minmod(std::span<const double> a, double M, double dx) {
  if (a.empty()) return 0.0;
  if (std::abs(a[0]) < M * dx * dx) return a[0];
  const bool pos = a[0] > 0.0;
  double best = std::abs(a[0]);
  for (double v : a) {
    if (pos ? !(v > 0.0) : !(v < 0.0)) return 0.0;
    best = std::min(best, std::abs(v));
  }
  return pos ? best : -best;
}

namespace {

using Vec3 = Eigen::Vector3d;

Vec3 as_vec(const MomentVector& u) { return {u.psi0, u.psi1x, u.psi1y}; }

struct SlopeTables {
  std::vector<Vec2> avg_grad;      // mean reference gradient of each basis function
  std::vector<double> lin_xi;      // projection of xi - xi_c
  std::vector<double> lin_eta;
};

SlopeTables slope_tables(const DGSpace& sp) {
  const int nb = sp.num_basis();
  const Vec2 rc = sp.mesh().kind() == CellKind::Triangle ? Vec2{1.0 / 3.0, 1.0 / 3.0} : Vec2{};
  SlopeTables t;
  t.avg_grad.assign(nb, Vec2{});
  t.lin_xi.assign(nb, 0.0);
  t.lin_eta.assign(nb, 0.0);
  const Tabulation& vol = sp.volume();
  for (std::size_t q = 0; q < vol.size(); ++q) {
    const double w = vol.weights[q];
    const Vec2 p = vol.points[q] - rc;
    for (int i = 0; i < nb; ++i) {
      t.avg_grad[i] += w * vol.grad[q * nb + i];
      t.lin_xi[i] += w * p.x * vol.phi[q * nb + i];
      t.lin_eta[i] += w * p.y * vol.phi[q * nb + i];
    }
  }
  t.lin_xi[0] = t.lin_eta[0] = 0.0;
  return t;
}

/// Limits slope s against the differences d (one per neighbor side).
/// Returns true when anything changed; s is overwritten only then.
bool limit_direction(Vec3& s, std::span<const Vec3> d, const MomentVector& mean, Vec2 n, double len,
                     const LimiterConfig& cfg, bool& fell_back) {
  std::array<double, 3> args{};
  const std::size_t na = 1 + d.size();
  if (cfg.slope_mode == SlopeMode::Characteristic) {
    try {
      const EigenDecomposition ed = eigendecomposition(realizability_fix(mean, cfg.eps_fix), n);
      const Vec3 cs = ed.left_matrix * s;
      std::array<Vec3, 2> cd;
      for (std::size_t k = 0; k < d.size(); ++k) cd[k] = ed.left_matrix * d[k];
      Vec3 lim = cs;
      bool changed = false;
      for (int comp = 0; comp < 3; ++comp) {
        args[0] = cs[comp];
        for (std::size_t k = 0; k < d.size(); ++k) args[1 + k] = cd[k][comp];
        lim[comp] = tvb_minmod(std::span<const double>(args.data(), na), cfg.M, len);
        changed = changed || lim[comp] != cs[comp];
      }
      if (changed) s = ed.right_matrix * lim;
      return changed;
    } catch (const ConditioningError&) {
      fell_back = true;
    }
  }
  bool changed = false;
  Vec3 lim = s;
  for (int comp = 0; comp < 3; ++comp) {
    args[0] = s[comp];
    for (std::size_t k = 0; k < d.size(); ++k) args[1 + k] = d[k][comp];
    lim[comp] = tvb_minmod(std::span<const double>(args.data(), na), cfg.M, len);
    changed = changed || lim[comp] != s[comp];
  }
  if (changed) s = lim;
  return changed;
}

void rebuild_linear(double* blk, int nb, const std::array<Vec2, 3>& gref, const SlopeTables& t) {
  for (int comp = 0; comp < 3; ++comp) {
    double* c = blk + comp * nb;
    for (int i = 1; i < nb; ++i) c[i] = gref[comp].x * t.lin_xi[i] + gref[comp].y * t.lin_eta[i];
  }
}

} // namespace

SlopeReport slope_limit(DGField& field, const LimiterConfig& cfg, const DGOperator& op, double t,
                        int workers) {
  const DGSpace& sp = field.space();
  const Mesh& mesh = sp.mesh();
  const std::size_t nc = sp.num_cells();
  SlopeReport report;
  report.limited.assign(nc, 0);
  if (cfg.slope_mode == SlopeMode::Off || sp.num_basis() == 1) return report;
  cfg.validate();

  const int nb = sp.num_basis();
  const SlopeTables tables = slope_tables(sp);
  std::vector<MomentVector> means(nc);
  for (std::size_t c = 0; c < nc; ++c) means[c] = field.mean(c);
  std::vector<unsigned char> fallback(nc, 0);

  auto neighbor_mean = [&](std::size_t c, int j) {
    const Face& f = mesh.faces(c)[j];
    return f.is_boundary() ? op.boundary_ghost_mean(c, j, means[c], t) : means[f.neighbor];
  };

  parallel_for(nc, workers, [&](std::size_t c) {
    double* blk = field.cell(c);
    const MomentVector& mean = means[c];
    std::array<Vec2, 3> gref{};
    for (int comp = 0; comp < 3; ++comp)
      for (int i = 1; i < nb; ++i) gref[comp] += blk[comp * nb + i] * tables.avg_grad[i];
    bool fell_back = false;
    bool changed = false;

    if (mesh.kind() == CellKind::Rectangle) {
      const auto a = mesh.jacobian(c);
      // faces: 0 bottom, 1 right, 2 top, 3 left
      for (int axis = 0; axis < 2; ++axis) {
        Vec3 s;
        for (int comp = 0; comp < 3; ++comp) s[comp] = axis == 0 ? gref[comp].x : gref[comp].y;
        const Vec3 fwd = as_vec(neighbor_mean(c, axis == 0 ? 1 : 2)) - as_vec(mean);
        const Vec3 bwd = as_vec(mean) - as_vec(neighbor_mean(c, axis == 0 ? 3 : 0));
        const std::array<Vec3, 2> d{fwd, bwd};
        const Vec2 n = axis == 0 ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
        const double len = axis == 0 ? a[0] : a[3];
        if (limit_direction(s, d, mean, n, len, cfg, fell_back)) {
          changed = true;
          for (int comp = 0; comp < 3; ++comp) (axis == 0 ? gref[comp].x : gref[comp].y) = s[comp];
        }
      }
    } else {
      const auto a = mesh.jacobian(c);
      const Vec2 xc = mesh.cell(c).centroid;
      std::array<Vec2, 3> g{};
      for (int comp = 0; comp < 3; ++comp) g[comp] = mesh.physical_gradient(c, gref[comp]);
      std::array<Vec2, 3> dirs{};
      std::array<Vec3, 3> slopes{};
      const auto faces = mesh.faces(c);
      for (int j = 0; j < 3; ++j) {
        const Face& f = faces[j];
        Vec2 d;
        if (f.is_boundary()) {
          const Vec2 p = mesh.vertices()[mesh.cell(c).vertex_ids[j]];
          d = 2.0 * dot(p - xc, f.normal) * f.normal;
        } else {
          d = mesh.cell(f.neighbor).centroid - xc;
        }
        dirs[j] = d;
        Vec3 s;
        for (int comp = 0; comp < 3; ++comp) s[comp] = dot(g[comp], d);
        const std::array<Vec3, 1> diff{as_vec(neighbor_mean(c, j)) - as_vec(mean)};
        const double len = norm(d);
        if (limit_direction(s, diff, mean, d / len, len, cfg, fell_back)) changed = true;
        slopes[j] = s;
      }
      if (changed) {
        double sxx = 0, sxy = 0, syy = 0;
        for (const auto& d : dirs) {
          sxx += d.x * d.x;
          sxy += d.x * d.y;
          syy += d.y * d.y;
        }
        const double det = sxx * syy - sxy * sxy;
        for (int comp = 0; comp < 3; ++comp) {
          double bx = 0, by = 0;
          for (int j = 0; j < 3; ++j) {
            bx += dirs[j].x * slopes[j][comp];
            by += dirs[j].y * slopes[j][comp];
          }
          const Vec2 gl{(syy * bx - sxy * by) / det, (sxx * by - sxy * bx) / det};
          gref[comp] = {a[0] * gl.x + a[2] * gl.y, a[1] * gl.x + a[3] * gl.y};
        }
      }
    }
    if (changed) {
      rebuild_linear(blk, nb, gref, tables);
      report.limited[c] = 1;
    }
    fallback[c] = fell_back ? 1 : 0;
  });
  for (std::size_t c = 0; c < nc; ++c) {
    report.limited_count += report.limited[c];
    report.fallback_count += fallback[c];
  }
  return report;
}

double realizability_theta(const MomentVector& mean, const MomentVector& point) {
  if (!is_strictly_realizable(mean)) {
    throw LimiterError(fmt::format("cell mean ({}, {}, {}) is not strictly realizable", mean.psi0, mean.psi1x,
                                   mean.psi1y));
  }
  if (is_realizable(point)) return 0.0;
  const double d0 = mean.psi0 - point.psi0;
  const double dx = mean.psi1x - point.psi1x;
  const double dy = mean.psi1y - point.psi1y;
  const double a = -d0 * d0 + dx * dx + dy * dy;
  const double b = 2.0 * (point.psi0 * point.psi0 - mean.psi0 * point.psi0 - point.psi1x * point.psi1x +
                          mean.psi1x * point.psi1x - point.psi1y * point.psi1y + mean.psi1y * point.psi1y);
  const double c = -point.psi0 * point.psi0 + point.psi1x * point.psi1x + point.psi1y * point.psi1y;

  double theta = -1.0;
  auto consider = [&](double r) {
    if (r >= 0.0 && r <= 1.0 && std::isfinite(r)) theta = std::max(theta, r);
  };
  if (a == 0.0) {
    if (b != 0.0) consider(-c / b);
  } else {
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    consider(q / a);
    if (q != 0.0) consider(c / q);
  }

  // polish on g(theta) = B0 - |B1|: concave, negative at 0, non-negative at 1
  auto realizable_at = [&](double th) { return is_realizable(th * mean + (1.0 - th) * point); };
  double lo = 0.0, hi = 1.0;
  if (theta < 0.0) theta = 0.5;
  for (int it = 0; it < 100; ++it) {
    const MomentVector bl = theta * mean + (1.0 - theta) * point;
    const double len = norm(bl.psi1());
    const double val = bl.psi0 - len;
    if (val >= 0.0) hi = std::min(hi, theta); else lo = std::max(lo, theta);
    double slope = d0;
    if (len > 0.0) slope -= (bl.psi1x * dx + bl.psi1y * dy) / len;
    double next = slope > 0.0 ? theta - val / slope : 0.5 * (lo + hi);
    if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - theta) <= 4.0 * std::numeric_limits<double>::epsilon() * theta) break;
    theta = next;
  }
  theta = std::clamp(theta, 0.0, 1.0);
  int steps = 0;
  while (theta < 1.0 && !realizable_at(theta) && steps++ < 256) theta = std::nextafter(theta, 2.0);
  while (theta > 0.0 && realizable_at(std::nextafter(theta, -1.0)) && steps++ < 512) {
    theta = std::nextafter(theta, -1.0);
  }
  if (!realizable_at(theta)) {
    // far from converged: bisect on the predicate
    lo = 0.0;
    hi = 1.0;
    while (std::nextafter(lo, 2.0) < hi) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (realizable_at(mid) ? hi : lo) = mid;
    }
    theta = hi;
  }
  return std::min(theta, 1.0);
}

ThetaReport apply_realizability_limiter(DGField& field, int workers) {
  const DGSpace& sp = field.space();
  const std::size_t nc = sp.num_cells();
  const int nb = sp.num_basis();
  const Tabulation& nodes = sp.nodes();
  ThetaReport report;
  report.theta.assign(nc, 0.0);

  std::vector<std::size_t> bad;
  for (std::size_t c = 0; c < nc; ++c) {
    if (!is_strictly_realizable(field.mean(c))) bad.push_back(c);
  }
  if (!bad.empty()) {
    std::string list;
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) list += fmt::format(" {}", bad[i]);
    throw LimiterError(fmt::format("{} cell mean(s) not strictly realizable:{}{}", bad.size(), list,
                                   bad.size() > 10 ? " ..." : ""));
  }
  if (nb == 1) return report;

  parallel_for(nc, workers, [&](std::size_t c) {
    double* blk = field.cell(c);
    const MomentVector mean = field.mean(c);
    double theta = 0.0;
    for (std::size_t s = 0; s < nodes.size(); ++s) {
      theta = std::max(theta, realizability_theta(mean, field.eval(c, nodes.row(s))));
    }
    if (theta == 0.0) return;
    std::array<double, 3 * 6> orig{};
    std::copy(blk, blk + 3 * nb, orig.begin());
    // modal evaluation rounds differently from the node-wise blend
    double step = 4.0 * std::numeric_limits<double>::epsilon();
    for (;;) {
      for (int comp = 0; comp < 3; ++comp)
        for (int i = 1; i < nb; ++i) blk[comp * nb + i] = (1.0 - theta) * orig[comp * nb + i];
      bool ok = true;
      for (std::size_t s = 0; s < nodes.size() && ok; ++s) ok = is_realizable(field.eval(c, nodes.row(s)));
      if (ok || theta >= 1.0) break;
      theta = std::min(1.0, theta + step);
      step *= 2.0;
    }
    report.theta[c] = theta;
  });
  for (double th : report.theta) {
    report.theta_max = std::max(report.theta_max, th);
    if (th > 0.0) ++report.activations;
  }
  return report;
}

PipelineReport apply_limiters(DGField& field, const LimiterConfig& cfg, const DGOperator& op, double t,
                              int workers) {
  PipelineReport r;
  r.slope = slope_limit(field, cfg, op, t, workers);
  if (cfg.realizability) {
    r.theta = apply_realizability_limiter(field, workers);
  } else {
    r.theta.theta.assign(field.space().num_cells(), 0.0);
  }
  return r;
}

} // namespace m1dg
