#include "responsekit/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "responsekit/error.hpp"
#include "responsekit/random.hpp"

namespace responsekit {

Path Path::make(std::vector<double> times, std::vector<double> flat_values, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::dimension_mismatch, "path dimension must be at least 1");
  if (times.size() < 2)
    throw Error(ErrorCode::length_mismatch, "a path needs at least 2 samples");
  if (flat_values.size() != times.size() * dim)
    throw Error(ErrorCode::length_mismatch,
                "path has " + std::to_string(times.size()) + " timestamps but " +
                    std::to_string(flat_values.size()) + " values for dimension " +
                    std::to_string(dim));
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw Error(ErrorCode::non_finite_value, "non-finite timestamp at sample " + std::to_string(i));
    if (i > 0 && !(times[i] > times[i - 1]))
      throw Error(ErrorCode::non_monotone_times,
                  "timestamps must be strictly increasing (sample " + std::to_string(i) + ")");
  }
  for (std::size_t i = 0; i < flat_values.size(); ++i) {
    if (!std::isfinite(flat_values[i]))
      throw Error(ErrorCode::non_finite_value,
                  "non-finite value at sample " + std::to_string(i / dim));
  }
  return Path(std::move(times), std::move(flat_values), dim);
}

Path Path::make(std::vector<double> times, const std::vector<std::vector<double>>& values) {
  if (times.size() != values.size())
    throw Error(ErrorCode::length_mismatch,
                "path has " + std::to_string(times.size()) + " timestamps but " +
                    std::to_string(values.size()) + " value rows");
  if (values.empty()) throw Error(ErrorCode::length_mismatch, "a path needs at least 2 samples");
  const std::size_t dim = values.front().size();
  std::vector<double> flat;
  flat.reserve(values.size() * dim);
  for (const auto& row : values) {
    if (row.size() != dim)
      throw Error(ErrorCode::dimension_mismatch, "channel dimension varies across samples");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return make(std::move(times), std::move(flat), dim);
}

void Path::at(double t, std::span<double> out) const {
  if (t < times_.front() || t > times_.back())
    throw Error(ErrorCode::out_of_range, "time " + std::to_string(t) + " outside path span [" +
                                             std::to_string(times_.front()) + ", " +
                                             std::to_string(times_.back()) + "]");
  // First sample strictly after t; an exact hit on sample i returns it verbatim.
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  if (hi == times_.size()) {
    std::copy_n(values_.end() - static_cast<std::ptrdiff_t>(dim_), dim_, out.begin());
    return;
  }
  const std::size_t lo = hi - 1;
  const double* a = values_.data() + lo * dim_;
  if (t == times_[lo]) {
    std::copy_n(a, dim_, out.begin());
    return;
  }
  const double* b = values_.data() + hi * dim_;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  for (std::size_t k = 0; k < dim_; ++k) out[k] = a[k] + w * (b[k] - a[k]);
}

std::vector<double> Path::at(double t) const {
  std::vector<double> out(dim_);
  at(t, out);
  return out;
}

std::vector<double> Path::increment(std::size_t l) const {
  std::vector<double> d(dim_);
  for (std::size_t k = 0; k < dim_; ++k)
    d[k] = values_[(l + 1) * dim_ + k] - values_[l * dim_ + k];
  return d;
}

std::vector<double> Path::total_increment() const {
  std::vector<double> d(dim_);
  const std::size_t last = size() - 1;
  for (std::size_t k = 0; k < dim_; ++k) d[k] = values_[last * dim_ + k] - values_[k];
  return d;
}

void PolyBasis::validate() const {
  if (degree < 1)
    throw Error(ErrorCode::invalid_argument, "basis degree must be at least 1", "basis.degree");
  if (!(t_end > t_begin))
    throw Error(ErrorCode::invalid_argument, "basis domain must satisfy t_begin < t_end",
                "basis.domain");
}

void PolyBasis::evaluate(double t, std::span<double> out) const {
  const double x = (t - t_begin) / (t_end - t_begin);
  if (kind == Kind::monomial) {
    double v = 1.0;
    for (int j = 0; j < degree; ++j) {
      out[j] = v;
      v *= x;
    }
    return;
  }
  // Bonnet recursion for P_j(y), y = 2x - 1.
  const double y = 2.0 * x - 1.0;
  out[0] = 1.0;
  if (degree > 1) out[1] = y;
  for (int j = 2; j < degree; ++j)
    out[j] = ((2.0 * j - 1.0) * y * out[j - 1] - (j - 1.0) * out[j - 2]) / j;
}

std::vector<double> PolyBasis::evaluate(double t) const {
  std::vector<double> out(static_cast<std::size_t>(degree));
  evaluate(t, out);
  return out;
}

Path concat(const Path& a, const Path& b) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::dimension_mismatch, "cannot concatenate paths of dimension " +
                                                   std::to_string(a.dim()) + " and " +
                                                   std::to_string(b.dim()));
  const std::size_t d = a.dim();
  std::vector<double> times(a.times().begin(), a.times().end());
  std::vector<double> values(a.flat_values().begin(), a.flat_values().end());
  const double dt = a.t_end() - b.t0();
  auto a_last = a.value(a.size() - 1);
  auto b_first = b.value(0);
  for (std::size_t i = 1; i < b.size(); ++i) {
    times.push_back(b.times()[i] + dt);
    auto v = b.value(i);
    for (std::size_t k = 0; k < d; ++k) values.push_back(a_last[k] + (v[k] - b_first[k]));
  }
  return Path::make(std::move(times), std::move(values), d);
}

double one_variation(const Path& p) {
  double total = 0.0;
  for (std::size_t l = 0; l < p.segments(); ++l) {
    auto a = p.value(l);
    auto b = p.value(l + 1);
    double sq = 0.0;
    for (std::size_t k = 0; k < p.dim(); ++k) sq += (b[k] - a[k]) * (b[k] - a[k]);
    total += std::sqrt(sq);
  }
  return total;
}

Path resample_linear(const Path& p, std::span<const double> grid) {
  if (grid.size() < 2) throw Error(ErrorCode::length_mismatch, "resample grid needs 2 points");
  if (grid.front() < p.t0() || grid.back() > p.t_end())
    throw Error(ErrorCode::out_of_range, "resample grid outside path span");
  std::vector<double> values(grid.size() * p.dim());
  for (std::size_t i = 0; i < grid.size(); ++i)
    p.at(grid[i], std::span<double>(values.data() + i * p.dim(), p.dim()));
  return Path::make(std::vector<double>(grid.begin(), grid.end()), std::move(values), p.dim());
}

Path augment_time(const Path& u, const PolyBasis& basis, int refinement) {
  basis.validate();
  if (refinement < 1)
    throw Error(ErrorCode::invalid_argument, "refinement must be at least 1", "refinement");
  const std::size_t m = u.dim();
  const auto p = static_cast<std::size_t>(basis.degree);
  const auto r = static_cast<std::size_t>(refinement);

  std::vector<double> times;
  times.reserve(u.segments() * r + 1);
  for (std::size_t l = 0; l < u.segments(); ++l) {
    const double a = u.times()[l];
    const double b = u.times()[l + 1];
    for (std::size_t q = 0; q < r; ++q)
      times.push_back(q == 0 ? a : a + (b - a) * static_cast<double>(q) / static_cast<double>(r));
  }
  times.push_back(u.t_end());

  std::vector<double> values(times.size() * m * p);
  std::vector<double> uv(m), psi(p);
  for (std::size_t i = 0; i < times.size(); ++i) {
    u.at(times[i], uv);
    basis.evaluate(times[i], psi);
    double* row = values.data() + i * m * p;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < p; ++j) row[k * p + j] = uv[k] * psi[j];
  }
  return Path::make(std::move(times), std::move(values), m * p);
}

Path reverse(const Path& p) {
  const std::size_t n = p.size();
  std::vector<double> times(n);
  std::vector<double> values(n * p.dim());
  for (std::size_t i = 0; i < n; ++i) {
    times[i] = p.t0() + (p.t_end() - p.times()[n - 1 - i]);
    auto v = p.value(n - 1 - i);
    std::copy(v.begin(), v.end(), values.begin() + static_cast<std::ptrdiff_t>(i * p.dim()));
  }
  times.front() = p.t0();
  times.back() = p.t_end();
  return Path::make(std::move(times), std::move(values), p.dim());
}

Path scale(const Path& p, double factor) {
  std::vector<double> values(p.flat_values().begin(), p.flat_values().end());
  for (double& v : values) v *= factor;
  return Path::make(std::vector<double>(p.times().begin(), p.times().end()), std::move(values),
                    p.dim());
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t segments) {
  if (segments < 1 || !(t1 > t0))
    throw Error(ErrorCode::invalid_argument, "uniform grid needs t0 < t1 and >= 1 segment");
  std::vector<double> g(segments + 1);
  for (std::size_t i = 0; i <= segments; ++i)
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(segments);
  g.back() = t1;
  return g;
}

Path random_walk_path(Stream& rng, std::size_t dim, std::size_t segments, double scale,
                      double t0, double t1) {
  if (dim == 0) throw Error(ErrorCode::dimension_mismatch, "path dimension must be at least 1");
  auto times = uniform_grid(t0, t1, segments);
  std::vector<double> values((segments + 1) * dim);
  const double step = scale / std::sqrt(static_cast<double>(segments));
  for (std::size_t k = 0; k < dim; ++k) values[k] = 0.5 * scale * rng.normal();
  for (std::size_t i = 1; i <= segments; ++i)
    for (std::size_t k = 0; k < dim; ++k)
      values[i * dim + k] = values[(i - 1) * dim + k] + step * rng.normal();
  return Path::make(std::move(times), std::move(values), dim);
}

}  // namespace responsekit
