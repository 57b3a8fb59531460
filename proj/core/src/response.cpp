#include "responsekit/response.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "responsekit/error.hpp"
#include "responsekit/parallel.hpp"
#include "responsekit/random.hpp"

namespace responsekit {

namespace {

std::size_t grid_index(double t, double dt, const char* what) {
  const double ratio = t / dt;
  const double k = std::round(ratio);
  if (t < 0.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorCode::invalid_argument,
                std::string(what) + " must be a non-negative multiple of dt");
  return static_cast<std::size_t>(k);
}

struct MomentAccumulator {
  // Per-sample values are stored then reduced in index order, so the result
  // does not depend on how trajectories were scheduled.
  static Estimate reduce(const std::vector<double>& v, std::size_t stride, std::size_t column) {
    const std::size_t k = v.size() / stride;
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += v[i * stride + column];
    const double mean = sum / static_cast<double>(k);
    double ss = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double d = v[i * stride + column] - mean;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(k - 1);
    return {mean, std::sqrt(var / static_cast<double>(k))};
  }
};

std::size_t bump_width_steps(const ImpulseSpec& spec, double dt) {
  const double width = spec.width > 0.0 ? spec.width : 4.0 * dt;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(width / dt)));
}

}  // namespace

void ImpulseSpec::validate() const {
  if (!(epsilon > 0.0))
    throw Error(ErrorCode::invalid_argument, "impulse epsilon must be positive", "impulse.epsilon");
  if (width < 0.0)
    throw Error(ErrorCode::invalid_argument, "impulse width must be positive", "impulse.width");
}

Eigen::MatrixXd impulse_schedule(const ImpulseSpec& spec, std::span<const double> direction,
                                 double s, double dt, std::size_t steps, double sign) {
  spec.validate();
  const std::size_t w = bump_width_steps(spec, dt);
  const double start = s / dt - 0.5 * static_cast<double>(w);
  const long first = std::lround(start);
  if (first < 0 || static_cast<std::size_t>(first) + w > steps)
    throw Error(ErrorCode::out_of_range, "impulse window leaves the simulated horizon");

  std::vector<double> shape(w);
  if (spec.shape == ImpulseSpec::Shape::box) {
    std::fill(shape.begin(), shape.end(), 1.0);
  } else {
    const double half = 0.5 * static_cast<double>(w);
    for (std::size_t q = 0; q < w; ++q)
      shape[q] = 1.0 - std::abs(static_cast<double>(q) + 0.5 - half) / half;
  }
  double mass = 0.0;
  for (double v : shape) mass += v * dt;

  const auto m = static_cast<Eigen::Index>(direction.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(steps), m);
  for (std::size_t q = 0; q < w; ++q) {
    const double amp = sign * spec.epsilon * shape[q] / mass;
    for (Eigen::Index k = 0; k < m; ++k)
      out(static_cast<Eigen::Index>(first) + static_cast<Eigen::Index>(q), k) =
          amp * direction[static_cast<std::size_t>(k)];
  }
  return out;
}

std::vector<ImpulseEstimate> impulse_response_curve(const SrnnParams& p,
                                                    std::span<const double> direction, double s,
                                                    std::span<const double> lags,
                                                    const ImpulseSpec& spec, double dt,
                                                    std::size_t samples, std::uint64_t seed) {
  p.validate();
  spec.validate();
  if (direction.size() != p.m())
    throw Error(ErrorCode::dimension_mismatch, "direction must have m entries", "direction");
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 samples", "samples");
  if (lags.empty()) throw Error(ErrorCode::invalid_argument, "no lags requested", "lags");
  const double half_width = 0.5 * static_cast<double>(bump_width_steps(spec, dt)) * dt;
  if (!(s - half_width >= -1e-12))
    throw Error(ErrorCode::out_of_range, "perturbation window starts before t = 0", "s");

  std::vector<std::size_t> observe;
  for (double lag : lags) {
    if (!(lag >= half_width - 1e-12))
      throw Error(ErrorCode::out_of_range,
                  "observation time must follow the perturbation window (s >= t)", "lags");
    observe.push_back(grid_index(s + lag, dt, "s + lag"));
  }
  std::vector<std::size_t> order(observe.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return observe[a] < observe[b]; });
  std::vector<std::size_t> sorted_obs(observe.size());
  for (std::size_t i = 0; i < order.size(); ++i) sorted_obs[i] = observe[order[i]];
  const std::size_t steps = sorted_obs.back();

  const std::vector<Eigen::MatrixXd> arms{
      impulse_schedule(spec, direction, s, dt, steps, +1.0),
      impulse_schedule(spec, direction, s, dt, steps, -1.0),
      Eigen::MatrixXd(static_cast<Eigen::Index>(steps), 0),
  };
  LockstepSimulator sim(p, dt, steps);
  const std::size_t L = sorted_obs.size();
  const double eps = spec.epsilon;

  std::vector<double> first(samples * L), second(samples * L);
  parallel_for(samples, [&](std::size_t k) {
    Stream rng(seed, k);
    Eigen::MatrixXd states;
    sim.run(arms, sorted_obs, rng, states);
    for (std::size_t o = 0; o < L; ++o) {
      const double fp = p.readout(states.row(static_cast<Eigen::Index>(o)).transpose());
      const double fm = p.readout(states.row(static_cast<Eigen::Index>(L + o)).transpose());
      const double f0 = p.readout(states.row(static_cast<Eigen::Index>(2 * L + o)).transpose());
      first[k * L + o] = (fp - fm) / (2.0 * eps);
      second[k * L + o] = ((fp - f0) + (fm - f0)) / (2.0 * eps * eps);
    }
  });

  std::vector<ImpulseEstimate> out(L);
  for (std::size_t o = 0; o < L; ++o) {
    const std::size_t i = order[o];
    const Estimate e1 = MomentAccumulator::reduce(first, L, o);
    const Estimate e2 = MomentAccumulator::reduce(second, L, o);
    ImpulseEstimate est;
    est.s = s;
    est.t = s + lags[i];
    est.value = e1.value;
    est.std_error = e1.std_error;
    est.second = e2.value;
    est.second_std_error = e2.std_error;
    est.quadratic_ratio =
        est.value != 0.0 ? eps * std::abs(est.second) / std::abs(est.value) : 0.0;
    est.large_epsilon = est.quadratic_ratio > 0.1;
    out[i] = est;
  }
  return out;
}

ImpulseEstimate impulse_response_mc(const SrnnParams& p, std::span<const double> direction,
                                    double t, double s, const ImpulseSpec& spec, double dt,
                                    std::size_t samples, std::uint64_t seed) {
  if (!(s < t)) throw Error(ErrorCode::out_of_range, "impulse time s must precede t", "s");
  const double lag = t - s;
  return impulse_response_curve(p, direction, s, std::span<const double>(&lag, 1), spec, dt,
                                samples, seed)
      .front();
}

Estimate second_order_response_mc(const SrnnParams& p, std::span<const double> direction,
                                  double t, double s1, double s2, const ImpulseSpec& spec,
                                  double dt, std::size_t samples, std::uint64_t seed) {
  p.validate();
  spec.validate();
  if (direction.size() != p.m())
    throw Error(ErrorCode::dimension_mismatch, "direction must have m entries", "direction");
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 samples", "samples");
  if (!(std::max(s1, s2) < t))
    throw Error(ErrorCode::out_of_range, "impulse times must precede t", "s");
  const std::size_t steps = grid_index(t, dt, "t");
  std::vector<Eigen::MatrixXd> arms;
  const double signs[2] = {+1.0, -1.0};
  for (double a : signs)
    for (double b : signs)
      arms.push_back(impulse_schedule(spec, direction, s1, dt, steps, a) +
                     impulse_schedule(spec, direction, s2, dt, steps, b));
  LockstepSimulator sim(p, dt, steps);
  const std::size_t observe[] = {steps};
  const double eps = spec.epsilon;
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t k) {
    Stream rng(seed, k);
    Eigen::MatrixXd states;
    sim.run(arms, observe, rng, states);
    const double fpp = p.readout(states.row(0).transpose());
    const double fpm = p.readout(states.row(1).transpose());
    const double fmp = p.readout(states.row(2).transpose());
    const double fmm = p.readout(states.row(3).transpose());
    values[k] = ((fpp - fpm) - (fmp - fmm)) / (8.0 * eps * eps);
  });
  return MomentAccumulator::reduce(values, 1, 0);
}

std::vector<CorrelationEstimate> fdt_correlation_ou(const SrnnParams& p,
                                                    std::span<const double> direction,
                                                    std::span<const double> lags, double dt,
                                                    std::size_t samples, std::uint64_t seed) {
  p.validate();
  if (!p.activation.is_zero())
    throw Error(ErrorCode::invalid_argument, "FDT correlation requires a linear SRNN",
                "srnn.activation");
  if (direction.size() != p.m())
    throw Error(ErrorCode::dimension_mismatch, "direction must have m entries", "direction");
  if (samples < 2) throw Error(ErrorCode::invalid_argument, "need at least 2 samples", "samples");

  const Eigen::MatrixXd noise = p.sigma * p.sigma.transpose();
  if (Eigen::LLT<Eigen::MatrixXd>(noise).info() != Eigen::Success)
    throw Error(ErrorCode::not_stationary, "sigma sigma^T must be positive definite",
                "srnn.sigma");
  const Eigen::MatrixXd stationary = stationary_covariance(p);
  const double scale = std::max(1e-300, stationary.cwiseAbs().maxCoeff());
  if (p.init.kind != InitialDistribution::Kind::gaussian ||
      (p.init.cov - stationary).cwiseAbs().maxCoeff() > 1e-8 * scale ||
      p.init.mean.cwiseAbs().maxCoeff() > 1e-12)
    throw Error(ErrorCode::not_stationary,
                "initial law must be the stationary Gaussian N(0, Sigma_inf)", "srnn.init");

  Eigen::VectorXd dir(static_cast<Eigen::Index>(direction.size()));
  for (std::size_t k = 0; k < direction.size(); ++k) dir(static_cast<Eigen::Index>(k)) = direction[k];
  // grad L(h) . (C dir) = h^T Sigma_inf^{-1} C dir
  const Eigen::VectorXd conjugate = stationary.ldlt().solve(p.C * dir);

  std::vector<std::size_t> observe{0};
  for (double lag : lags) observe.push_back(grid_index(lag, dt, "lag"));
  std::vector<std::size_t> order(lags.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return observe[a + 1] < observe[b + 1];
  });
  std::vector<std::size_t> sorted_obs{0};
  for (std::size_t i : order) sorted_obs.push_back(observe[i + 1]);
  const std::size_t steps = std::max<std::size_t>(1, sorted_obs.back());

  LockstepSimulator sim(p, dt, steps);
  const Eigen::MatrixXd zero_input(static_cast<Eigen::Index>(steps), 0);
  const std::size_t L = lags.size();
  std::vector<double> values(samples * L);
  parallel_for(samples, [&](std::size_t k) {
    Stream rng(seed, k);
    Eigen::MatrixXd states;
    sim.run(std::span<const Eigen::MatrixXd>(&zero_input, 1), sorted_obs, rng, states);
    const double weight = states.row(0).dot(conjugate.transpose());
    for (std::size_t o = 0; o < L; ++o)
      values[k * L + o] = p.readout(states.row(static_cast<Eigen::Index>(o + 1)).transpose()) * weight;
  });

  std::vector<CorrelationEstimate> out(L);
  for (std::size_t o = 0; o < L; ++o) {
    const Estimate e = MomentAccumulator::reduce(values, L, o);
    out[order[o]] = {lags[order[o]], e.value, e.std_error};
  }
  return out;
}

std::vector<FdtRow> fdt_report(const SrnnParams& p, std::span<const double> direction, double s,
                               std::span<const double> lags, const ImpulseSpec& spec, double dt,
                               std::size_t samples, std::uint64_t seed) {
  const auto impulse = impulse_response_curve(p, direction, s, lags, spec, dt, samples,
                                              derive_seed(seed, "impulse"));
  const auto corr =
      fdt_correlation_ou(p, direction, lags, dt, samples, derive_seed(seed, "correlation"));
  std::vector<FdtRow> rows(lags.size());
  for (std::size_t i = 0; i < lags.size(); ++i)
    rows[i] = {lags[i], impulse[i].value, corr[i].value, impulse[i].std_error, corr[i].std_error};
  return rows;
}

std::vector<MemorylessFeature> memoryless_features(const Path& u, int max_order, int max_power,
                                                   double t) {
  if (max_order < 1)
    throw Error(ErrorCode::invalid_argument, "max_order must be >= 1", "max_order");
  if (max_power < 0)
    throw Error(ErrorCode::invalid_argument, "max_power must be >= 0", "max_power");
  if (t < u.t0() || t > u.t_end())
    throw Error(ErrorCode::out_of_range, "feature time outside the input path", "t");

  std::vector<double> grid;
  for (double s : u.times())
    if (s <= t) grid.push_back(s);
  if (grid.back() < t) grid.push_back(t);
  const std::size_t G = grid.size();
  const std::size_t m = u.dim();
  const std::size_t powers = static_cast<std::size_t>(max_power) + 1;
  const std::size_t base = powers * m;  // letter = p * m + k

  // integrand[letter][g] = s_g^p u^k(s_g)
  std::vector<std::vector<double>> integrand(base, std::vector<double>(G));
  std::vector<double> uv(m);
  for (std::size_t g = 0; g < G; ++g) {
    u.at(grid[g], uv);
    double sp = 1.0;
    for (std::size_t p = 0; p < powers; ++p) {
      for (std::size_t k = 0; k < m; ++k) integrand[p * m + k][g] = sp * uv[k];
      sp *= grid[g];
    }
  }

  auto cumulative = [&](const std::vector<double>& f, std::vector<double>& out) {
    out.assign(G, 0.0);
    for (std::size_t g = 1; g < G; ++g)
      out[g] = out[g - 1] + 0.5 * (grid[g] - grid[g - 1]) * (f[g] + f[g - 1]);
  };

  // tables[n-1][code]: running integral for the word with `code` (first
  // letter most significant, i.e. outermost integral).
  std::vector<std::vector<std::vector<double>>> tables(static_cast<std::size_t>(max_order));
  std::vector<double> product(G);
  std::size_t count = 1;
  for (int n = 1; n <= max_order; ++n) {
    const std::size_t suffix_count = count;
    count *= base;
    auto& level = tables[static_cast<std::size_t>(n - 1)];
    level.resize(count);
    for (std::size_t code = 0; code < count; ++code) {
      const std::size_t head = code / suffix_count;
      if (n == 1) {
        cumulative(integrand[head], level[code]);
      } else {
        const auto& inner = tables[static_cast<std::size_t>(n - 2)][code % suffix_count];
        for (std::size_t g = 0; g < G; ++g) product[g] = integrand[head][g] * inner[g];
        cumulative(product, level[code]);
      }
    }
  }

  std::vector<MemorylessFeature> out;
  for (int n = 1; n <= max_order; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    const auto& level = tables[nn - 1];
    std::vector<int> pw(nn + 1, 0);
    // powers (p0..pn) lexicographic, then channels (k1..kn) lexicographic
    while (true) {
      std::vector<int> ch(nn, 0);
      while (true) {
        std::size_t code = 0;
        for (std::size_t i = 0; i < nn; ++i)
          code = code * base + static_cast<std::size_t>(pw[i + 1]) * m +
                 static_cast<std::size_t>(ch[i]);
        MemorylessFeature f;
        f.powers = pw;
        f.channels = ch;
        f.value = std::pow(t, pw[0]) * level[code].back();
        out.push_back(std::move(f));
        int i = static_cast<int>(nn) - 1;
        while (i >= 0 && static_cast<std::size_t>(ch[static_cast<std::size_t>(i)]) == m - 1) {
          ch[static_cast<std::size_t>(i)] = 0;
          --i;
        }
        if (i < 0) break;
        ++ch[static_cast<std::size_t>(i)];
      }
      int i = static_cast<int>(nn);
      while (i >= 0 && pw[static_cast<std::size_t>(i)] == max_power) {
        pw[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
      ++pw[static_cast<std::size_t>(i)];
    }
  }
  return out;
}

}  // namespace responsekit
