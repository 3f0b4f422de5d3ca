#include "m1dg/basis.hpp"

#include <cmath>

#include <fmt/format.h>

#include "m1dg/error.hpp"

namespace m1dg {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

} // namespace

double ReferenceBasis::monomial_mean(CellKind kind, int a, int b) {
  if (kind == CellKind::Triangle) {
    // integral a! b! / (a+b+2)! over area 1/2
    return 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
  }
  auto m1 = [](int n) { return n % 2 ? 0.0 : std::pow(0.5, n) / (n + 1); };
  return m1(a) * m1(b);
}

ReferenceBasis::ReferenceBasis(CellKind kind, int k) : kind_(kind), k_(k) {
  if (k < 0 || k > 2) throw ConfigError(fmt::format("degree k = {} unsupported (0..2)", k));
  for (int d = 0; d <= k; ++d)
    for (int j = 0; j <= d; ++j) exps_.emplace_back(d - j, j);
  const int n = static_cast<int>(exps_.size());

  auto inner = [&](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s += p[i] * q[j] *
             monomial_mean(kind_, exps_[i].first + exps_[j].first, exps_[i].second + exps_[j].second);
    return s;
  };

  // modified Gram-Schmidt, applied twice for stability
  for (int i = 0; i < n; ++i) {
    std::vector<double> v(n, 0.0);
    v[i] = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : coeffs_) {
        const double c = inner(v, u);
        for (int m = 0; m < n; ++m) v[m] -= c * u[m];
      }
    }
    const double len = std::sqrt(inner(v, v));
    for (double& c : v) c /= len;
    coeffs_.push_back(std::move(v));
  }
  coeffs_[0].assign(n, 0.0);
  coeffs_[0][0] = 1.0;
}

double ReferenceBasis::value(int i, Vec2 p) const {
  double s = 0.0;
  const auto& c = coeffs_[i];
  for (std::size_t m = 0; m < exps_.size(); ++m) {
    if (c[m] != 0.0) s += c[m] * ipow(p.x, exps_[m].first) * ipow(p.y, exps_[m].second);
  }
  return s;
}

Vec2 ReferenceBasis::gradient(int i, Vec2 p) const {
  Vec2 g;
  const auto& c = coeffs_[i];
  for (std::size_t m = 0; m < exps_.size(); ++m) {
    if (c[m] == 0.0) continue;
    const auto [a, b] = exps_[m];
    if (a > 0) g.x += c[m] * a * ipow(p.x, a - 1) * ipow(p.y, b);
    if (b > 0) g.y += c[m] * b * ipow(p.x, a) * ipow(p.y, b - 1);
  }
  return g;
}

void ReferenceBasis::values(Vec2 p, double* out) const {
  for (int i = 0; i < size(); ++i) out[i] = value(i, p);
}

std::vector<double> ReferenceBasis::gram() const {
  const int n = size();
  const int nm = static_cast<int>(exps_.size());
  std::vector<double> g(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int p = 0; p < nm; ++p)
        for (int q = 0; q < nm; ++q)
          s += coeffs_[i][p] * coeffs_[j][q] *
               monomial_mean(kind_, exps_[p].first + exps_[q].first, exps_[p].second + exps_[q].second);
      g[i * n + j] = s;
    }
  return g;
}

} // namespace m1dg
