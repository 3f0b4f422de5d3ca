#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "m1dg/closure.hpp"
#include "m1dg/dg_operator.hpp"
#include "m1dg/dg_space.hpp"

namespace m1dg {

enum class SlopeMode { Off, Primitive, Characteristic };

struct LimiterConfig {
  SlopeMode slope_mode = SlopeMode::Characteristic;
  double M = 0.0;
  bool realizability = true;
  double eps_fix = 1e-12;

  void validate() const;
};

/// Parses SL/CL/SRL/CRL followed by a number or "inf".
LimiterConfig parse_limiter_label(const std::string& label);
std::string limiter_label(const LimiterConfig& cfg);
std::string valid_limiter_labels();

/// TVB modified minmod: a[0] if |a[0]| < M dx^2, otherwise minmod(a).
double tvb_minmod(std::span<const double> a, double M, double dx);
inline double tvb_minmod(std::initializer_list<double> a, double M, double dx) {
  return tvb_minmod(std::span<const double>(a.begin(), a.size()), M, dx);
}

struct SlopeReport {
  std::vector<unsigned char> limited;  // per cell
  std::size_t limited_count = 0;
  std::size_t fallback_count = 0;      // characteristic cells that fell back to primitive
};

/// Needs the operator for ghost means on boundary faces.
SlopeReport slope_limit(DGField& field, const LimiterConfig& cfg, const DGOperator& op, double t,
                        int workers = 1);

/// Smallest theta in [0,1] with theta*mean + (1-theta)*point realizable.
double realizability_theta(const MomentVector& mean, const MomentVector& point);

struct ThetaReport {
  std::vector<double> theta;
  double theta_max = 0.0;
  std::size_t activations = 0;
};

ThetaReport apply_realizability_limiter(DGField& field, int workers = 1);

/// Slope limiter then realizability limiter, as configured.
struct PipelineReport {
  SlopeReport slope;
  ThetaReport theta;
};
PipelineReport apply_limiters(DGField& field, const LimiterConfig& cfg, const DGOperator& op, double t,
                              int workers = 1);

} // namespace m1dg
