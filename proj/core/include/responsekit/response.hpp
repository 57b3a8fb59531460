#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "responsekit/paths.hpp"
#include "responsekit/srnn.hpp"

namespace responsekit {

// Impulsive input perturbation of integrated strength epsilon spread over a
// window of width delta centred at the perturbation time.
struct ImpulseSpec {
  enum class Shape { box, triangle };

  double epsilon = 0.05;
  double width = 0.0;  // delta; 0 selects 4 * dt
  Shape shape = Shape::box;

  void validate() const;
};

// Bump weights on the simulation grid: row j is the input at step j; the
// rows sum to epsilon / dt times `direction`.
Eigen::MatrixXd impulse_schedule(const ImpulseSpec& spec, std::span<const double> direction,
                                 double s, double dt, std::size_t steps, double sign = 1.0);

struct ImpulseEstimate {
  double t = 0.0;
  double s = 0.0;
  double value = 0.0;      // first-order response R^(1)(t, s)
  double std_error = 0.0;
  double second = 0.0;     // (F+ + F- - 2 F0) / (2 eps^2), estimates R^(2)(t, s, s)
  double second_std_error = 0.0;
  double quadratic_ratio = 0.0;  // eps |second| / |value|
  bool large_epsilon = false;    // quadratic_ratio > 0.1
};

// Central-difference impulse response (F_t[+eps bump at s] - F_t[-eps bump
// at s]) / (2 eps) with common random numbers across the +, - and 0 arms.
// Requires 0 < s < t.
ImpulseEstimate impulse_response_mc(const SrnnParams& p, std::span<const double> direction,
                                    double t, double s, const ImpulseSpec& spec, double dt,
                                    std::size_t samples, std::uint64_t seed);

// Same estimator at several observation times t = s + lag from one set of runs.
std::vector<ImpulseEstimate> impulse_response_curve(const SrnnParams& p,
                                                    std::span<const double> direction, double s,
                                                    std::span<const double> lags,
                                                    const ImpulseSpec& spec, double dt,
                                                    std::size_t samples, std::uint64_t seed);

// Second-order kernel R^(2)(t, s1, s2) by the mixed difference of four
// perturbed arms (+-eps at s1, +-eps at s2), common random numbers:
// sum_{a,b=+-1} a b F_ab / (8 eps^2).
Estimate second_order_response_mc(const SrnnParams& p, std::span<const double> direction,
                                  double t, double s1, double s2, const ImpulseSpec& spec,
                                  double dt, std::size_t samples, std::uint64_t seed);

struct CorrelationEstimate {
  double lag = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

// Stationary correlation <f(h_lag) grad L(h_0)> . C direction for the linear
// SRNN started in its Gaussian invariant law, where L = -log rho_inf so
// grad L(h) = Sigma_inf^{-1} h. Throws not_stationary when the initial law
// is not the invariant one, and when sigma sigma^T is not positive definite.
std::vector<CorrelationEstimate> fdt_correlation_ou(const SrnnParams& p,
                                                    std::span<const double> direction,
                                                    std::span<const double> lags, double dt,
                                                    std::size_t samples, std::uint64_t seed);

struct FdtRow {
  double lag = 0.0;
  double impulse = 0.0;
  double correlation = 0.0;
  double std_error_impulse = 0.0;
  double std_error_correlation = 0.0;
};

// Impulse response at t = s + lag next to the stationary correlation at the
// same lag. Both estimators use substreams derived from `seed`.
std::vector<FdtRow> fdt_report(const SrnnParams& p, std::span<const double> direction, double s,
                               std::span<const double> lags, const ImpulseSpec& spec, double dt,
                               std::size_t samples, std::uint64_t seed);

// Iterated integral of the input with polynomial time weights:
// t^{p0} int_0^t s1^{p1} u^{k1}(s1) int_0^{s1} ... sn^{pn} u^{kn}(sn) dsn..ds1.
struct MemorylessFeature {
  std::vector<int> powers;    // p0..pn
  std::vector<int> channels;  // k1..kn, 0-based
  double value = 0.0;
};

// All features for 1 <= n <= max_order, powers in [0, max_power], channels
// in [0, m). Ordered by n, then powers lexicographically, then channels.
// Integrals are cumulative trapezoid on u's own sample grid over [t0, t].
std::vector<MemorylessFeature> memoryless_features(const Path& u, int max_order, int max_power,
                                                   double t);

}  // namespace responsekit
