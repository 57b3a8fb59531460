#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace responsekit {

// A sampled multi-channel path, linear between samples. Immutable once built.
// Values are stored row-major: sample i occupies [i*dim, (i+1)*dim).
class Path {
 public:
  // Validates and builds a path (make_path). Throws Error with
  // non_monotone_times, length_mismatch or non_finite_value.
  static Path make(std::vector<double> times, const std::vector<std::vector<double>>& values);
  static Path make(std::vector<double> times, std::vector<double> flat_values, std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return times_.size(); }
  std::size_t segments() const noexcept { return times_.size() - 1; }

  std::span<const double> times() const noexcept { return times_; }
  std::span<const double> flat_values() const noexcept { return values_; }
  std::span<const double> value(std::size_t i) const noexcept {
    return {values_.data() + i * dim_, dim_};
  }
  double t0() const noexcept { return times_.front(); }
  double t_end() const noexcept { return times_.back(); }

  // Linear interpolation at t; t must lie in [t0, t_end].
  std::vector<double> at(double t) const;
  void at(double t, std::span<double> out) const;

  // Increment of segment l (0-based): value(l+1) - value(l).
  std::vector<double> increment(std::size_t l) const;
  std::vector<double> total_increment() const;

 private:
  Path(std::vector<double> times, std::vector<double> values, std::size_t dim)
      : times_(std::move(times)), values_(std::move(values)), dim_(dim) {}

  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

// Time-dependent polynomial lift psi(t) = (psi_0(t), ..., psi_{p-1}(t)).
struct PolyBasis {
  enum class Kind { monomial, legendre };

  Kind kind = Kind::monomial;
  int degree = 1;  // number of basis functions p
  double t_begin = 0.0;
  double t_end = 1.0;

  // Monomials are evaluated at (t - t_begin)/(t_end - t_begin); Legendre
  // polynomials are the standard P_j shifted to [t_begin, t_end].
  std::vector<double> evaluate(double t) const;
  void evaluate(double t, std::span<double> out) const;
  void validate() const;
};

// b is translated in time and value so that it starts where a ends.
Path concat(const Path& a, const Path& b);

// Total variation of a piecewise-linear path: sum of segment Euclidean norms.
double one_variation(const Path& p);

// Samples p at each grid point by linear interpolation.
Path resample_linear(const Path& p, std::span<const double> grid);

// Channel (k, j) of the result is u^k(t) * psi_j(t), stored at k*p + j.
// Each input segment is split into `refinement` equal pieces first.
Path augment_time(const Path& u, const PolyBasis& basis, int refinement = 4);

// Same increments traversed backwards over the same time span.
Path reverse(const Path& p);

// Scales all values by factor (used to normalise kernel exponents).
Path scale(const Path& p, double factor);

// Uniform grid with `segments` equal steps on [t0, t1].
std::vector<double> uniform_grid(double t0, double t1, std::size_t segments);

class Stream;

// Random piecewise-linear input on a uniform grid over [t0, t1]: start
// N(0, (scale/2)^2) per channel, Gaussian increments of variance
// scale^2 / segments.
Path random_walk_path(Stream& rng, std::size_t dim, std::size_t segments, double scale,
                      double t0 = 0.0, double t1 = 1.0);

}  // namespace responsekit
