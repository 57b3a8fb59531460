#include "acceptance.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>

#include "responsekit/error.hpp"
#include "responsekit/kernels.hpp"
#include "responsekit/learn.hpp"
#include "responsekit/parallel.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/random.hpp"
#include "responsekit/response.hpp"
#include "responsekit/signature.hpp"
#include "responsekit/srnn.hpp"
#include "responsekit/volterra.hpp"

namespace responsekit::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// Outcome of the numeric part of a criterion.
struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << "FAIL " << what << "; ";
    }
  }
};

// Path with `segments` increments of Euclidean norm <= 1.
Path bounded_increment_path(Stream& rng, std::size_t segments) {
  std::vector<double> times(segments + 1), values(2 * (segments + 1), 0.0);
  for (std::size_t i = 1; i <= segments; ++i) {
    times[i] = static_cast<double>(i);
    const double angle = 2.0 * M_PI * rng.uniform();
    const double radius = rng.uniform();
    values[2 * i] = values[2 * i - 2] + radius * std::cos(angle);
    values[2 * i + 1] = values[2 * i - 1] + radius * std::sin(angle);
  }
  return Path::make(std::move(times), std::move(values), 2);
}

// ---- 1 ----------------------------------------------------------------------

Check signature_closed_forms(std::uint64_t) {
  Check c;
  const auto sig = signature(Path::make({0.0, 1.0}, {0.0, 2.0}, 1), 3);
  const double expected[] = {1.0, 2.0, 2.0, 4.0 / 3.0};
  double worst = 0.0;
  for (int n = 0; n <= 3; ++n) worst = std::max(worst, std::abs(sig.level_data(n)[0] - expected[n]));
  c.detail << "levels max err " << num(worst) << " (tol 1e-12); ";
  c.require(worst <= 1e-12, "scalar levels");

  const auto flat = signature(Path::make({0.0, 0.5, 1.0}, {{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}}), 4);
  bool unit = sig.level_data(0)[0] == 1.0 && flat.level_data(0)[0] == 1.0;
  for (int n = 1; n <= 4; ++n)
    for (double v : flat.level_data(n)) unit = unit && v == 0.0;
  c.detail << "constant path unit signature " << (unit ? "exact" : "NOT exact");
  c.require(unit, "constant path");
  return c;
}

// ---- 2 ----------------------------------------------------------------------

Check chen_identity(std::uint64_t seed) {
  Check c;
  Stream rng(derive_seed(seed, "chen"), 0);
  double chen_err = 0.0, oracle_rel = 0.0;
  bool all_converged = true;
  for (int trial = 0; trial < 10; ++trial) {
    const auto segments = static_cast<std::size_t>(2 + rng.engine()() % 4);  // 2..5
    const Path x = bounded_increment_path(rng, segments);
    const auto cut = static_cast<std::size_t>(1 + rng.engine()() % (segments - 1));
    std::vector<double> ta(x.times().begin(), x.times().begin() + static_cast<std::ptrdiff_t>(cut + 1));
    std::vector<double> tb(x.times().begin() + static_cast<std::ptrdiff_t>(cut), x.times().end());
    std::vector<double> va(x.flat_values().begin(),
                           x.flat_values().begin() + static_cast<std::ptrdiff_t>(2 * (cut + 1)));
    std::vector<double> vb(x.flat_values().begin() + static_cast<std::ptrdiff_t>(2 * cut),
                           x.flat_values().end());
    const Path a = Path::make(ta, va, 2);
    const Path b = Path::make(tb, vb, 2);
    const Path joined = concat(a, b);
    const auto s_joined = signature(joined, 4);
    const auto s_prod = tensor_mul(signature(a, 4), signature(b, 4), 4);
    for (std::size_t i = 0; i < s_joined.flat().size(); ++i)
      chen_err = std::max(chen_err, std::abs(s_joined.flat()[i] - s_prod.flat()[i]));
    for (int n = 1; n <= 4; ++n) {
      for (const auto& w : words_of_length(2, n)) {
        const auto o = sig_oracle_converged(joined, w, 1e-7);
        all_converged = all_converged && o.converged;
        const double rel = std::abs(s_joined.coeff(w) - o.value) / std::max(1.0, std::abs(o.value));
        oracle_rel = std::max(oracle_rel, rel);
      }
    }
  }
  c.detail << "chen max err " << num(chen_err) << " (tol 1e-10); oracle max rel err "
           << num(oracle_rel) << " (tol 1e-6)";
  c.require(chen_err <= 1e-10, "chen identity");
  c.require(oracle_rel <= 1e-6, "oracle agreement");
  c.require(all_converged, "oracle convergence");
  return c;
}

// ---- 3 ----------------------------------------------------------------------

Check exponential_property(std::uint64_t seed) {
  Check c;
  Stream rng(derive_seed(seed, "exponential"), 0);
  double fock_err = 0.0, pl_err = 0.0;
  KernelSpec spec;
  spec.kind = KernelSpec::Kind::piecewise_exp;
  spec.segment_grid = {0.0, 1.0};
  for (int trial = 0; trial < 20; ++trial) {
    double h[2][2];
    for (auto& v : h) {
      const double angle = 2.0 * M_PI * rng.uniform();
      const double radius = rng.uniform();
      v[0] = radius * std::cos(angle);
      v[1] = radius * std::sin(angle);
    }
    const double limit = std::exp(h[0][0] * h[1][0] + h[0][1] * h[1][1]);
    const double fock = fock_inner(tensor_exp(h[0], 20), tensor_exp(h[1], 20));
    fock_err = std::max(fock_err, std::abs(fock - limit));
    const Path x = Path::make({0.0, 1.0}, {0.0, 0.0, h[0][0], h[0][1]}, 2);
    const Path y = Path::make({0.0, 1.0}, {0.0, 0.0, h[1][0], h[1][1]}, 2);
    pl_err = std::max(pl_err, std::abs(sig_kernel_pl(x, y, spec) - fock));
  }
  c.detail << "fock vs exp max err " << num(fock_err) << " (tol 1e-10); piecewise kernel vs fock "
           << num(pl_err) << " (tol 1e-8)";
  c.require(fock_err <= 1e-10, "fock exponential");
  c.require(pl_err <= 1e-8, "piecewise kernel");
  return c;
}

// ---- 4 ----------------------------------------------------------------------

Check gram_positivity(std::uint64_t seed) {
  Check c;
  Stream rng(derive_seed(seed, "gram"), 0);
  const KernelSpec spec = KernelSpec::piecewise(0.0, 1.0, 10, 3);
  std::vector<Path> prepared;
  for (int i = 0; i < 100; ++i) prepared.push_back(prepare_path(random_walk_path(rng, 2, 20, 1.0), spec));
  const Eigen::MatrixXd G = gram(prepared, spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  c.detail << "eigenvalues in [" << num(lo) << ", " << num(hi) << "], need min >= " << num(-1e-8 * hi);
  c.require(lo >= -1e-8 * hi, "min eigenvalue");
  return c;
}

// ---- 5, 6 ---------------------------------------------------------------------

constexpr double kOuLags[] = {0.25, 0.5, 1.0, 2.0};

struct OuRun {
  std::vector<FdtRow> rows;
  double seconds = 0.0;
};

const OuRun& ou_run(std::uint64_t seed) {
  static std::map<std::uint64_t, OuRun> cache;
  auto it = cache.find(seed);
  if (it != cache.end()) return it->second;
  const auto start = Clock::now();
  const SrnnParams p = with_stationary_init(SrnnParams::scalar_ou(1.0, 0.5));
  const double direction[] = {1.0};
  OuRun run;
  run.rows = fdt_report(p, direction, 0.25, kOuLags, ImpulseSpec{}, 0.005, 200000,
                        derive_seed(seed, "ou"));
  run.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return cache.emplace(seed, std::move(run)).first->second;
}

Check ou_linear_response(std::uint64_t seed) {
  Check c;
  for (const auto& row : ou_run(seed).rows) {
    const double exact = std::exp(-row.lag);
    const double tol = std::max(3.0 * row.std_error_impulse, 0.02);
    const double err = std::abs(row.impulse - exact);
    c.detail << "tau=" << row.lag << ": " << num(row.impulse, 5) << " vs " << num(exact, 5)
             << " (|err| " << num(err) << " <= " << num(tol) << "); ";
    c.require(err <= tol, "lag " + num(row.lag));
  }
  return c;
}

Check fluctuation_dissipation(std::uint64_t seed) {
  Check c;
  for (const auto& row : ou_run(seed).rows) {
    const double combined = std::hypot(row.std_error_impulse, row.std_error_correlation);
    const double tol = 3.0 * combined + 0.01;
    const double err = std::abs(row.correlation - row.impulse);
    c.detail << "tau=" << row.lag << ": corr " << num(row.correlation, 5) << " vs impulse "
             << num(row.impulse, 5) << " (|diff| " << num(err) << " <= " << num(tol) << "); ";
    c.require(err <= tol, "lag " + num(row.lag));
  }
  return c;
}

// ---- 7 ----------------------------------------------------------------------

Check volterra_first_order(std::uint64_t seed) {
  Check c;
  SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  const double dt = 0.001;
  const double T = 2.0;
  const std::size_t steps = step_count(T, dt);
  const auto fine = uniform_grid(0.0, T, steps);
  std::vector<double> gamma_values(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) gamma_values[i] = 0.1 * std::sin(2.0 * M_PI * fine[i]);
  const Path gamma = Path::make(fine, gamma_values, 1);

  // Perturbed and unperturbed arms share every random number.
  const std::vector<Eigen::MatrixXd> arms{sample_input(gamma, 1, dt, steps),
                                          Eigen::MatrixXd(static_cast<Eigen::Index>(steps), 0)};
  const std::vector<std::size_t> observe{500, 1000, 2000};
  const std::size_t K = 20000;
  const std::uint64_t mc_seed = derive_seed(seed, "volterra-mc");
  LockstepSimulator sim(p, dt, steps);
  std::vector<double> diffs(K * observe.size());
  parallel_for(K, [&](std::size_t k) {
    Stream rng(mc_seed, k);
    Eigen::MatrixXd states;
    sim.run(arms, observe, rng, states);
    for (std::size_t o = 0; o < observe.size(); ++o)
      diffs[k * observe.size() + o] =
          states(static_cast<Eigen::Index>(o), 0) -
          states(static_cast<Eigen::Index>(observe.size() + o), 0);
  });

  const auto kernels = VolterraKernels::tabulate(
      uniform_grid(0.0, T, 400), 1,
      [](int, double t, std::span<const double> s) { return std::exp(-(t - s[0])); });
  const std::size_t grid_index[] = {100, 200, 400};
  for (std::size_t o = 0; o < observe.size(); ++o) {
    double mean = 0.0;
    for (std::size_t k = 0; k < K; ++k) mean += diffs[k * observe.size() + o];
    mean /= static_cast<double>(K);
    double ss = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = diffs[k * observe.size() + o] - mean;
      ss += d * d;
    }
    const double se = std::sqrt(ss / static_cast<double>(K - 1) / static_cast<double>(K));
    const double predicted = volterra_eval(kernels, gamma, grid_index[o]);
    const double tol = 3.0 * se + 1e-3;
    const double t = static_cast<double>(observe[o]) * dt;
    c.detail << "t=" << t << ": mc " << num(mean, 5) << " vs volterra " << num(predicted, 5)
             << " (|err| " << num(std::abs(mean - predicted)) << " <= " << num(tol) << "); ";
    c.require(std::abs(mean - predicted) <= tol, "t=" + num(t));
  }

  // Cross-check the paired difference against two output_functional runs.
  const Estimate with_input = output_functional(p, arms[0], dt, 2000, mc_seed);
  const Estimate without = output_functional(p, arms[1], dt, 2000, mc_seed);
  double paired = 0.0;
  for (std::size_t k = 0; k < 2000; ++k) paired += diffs[k * observe.size() + 2];
  paired /= 2000.0;
  const double gap = std::abs((with_input.value - without.value) - paired);
  c.detail << "output_functional difference vs paired mean " << num(gap) << "; ";
  c.require(gap <= 1e-12, "output_functional consistency");

  ImpulseSpec spec;
  const double direction[] = {1.0};
  const Estimate r2 = second_order_response_mc(p, direction, 1.0, 0.4, 0.6, spec, 0.005, 20000,
                                               derive_seed(seed, "volterra-r2"));
  c.detail << "R2 " << num(r2.value) << " (|R2| <= 3 stderr = " << num(3.0 * r2.std_error) << ")";
  c.require(std::abs(r2.value) <= 3.0 * r2.std_error, "second order zero");
  return c;
}

// ---- 8 ----------------------------------------------------------------------

Check composition(std::uint64_t) {
  Check c;
  const auto grid = uniform_grid(0.0, 1.0, 63);
  const auto f = VolterraKernels::tabulate(grid, 2, [](int n, double t, std::span<const double> s) {
    if (n == 1) return std::exp(-(t - s[0]));
    return 0.5 * std::exp(-(2.0 * t - s[0] - s[1]));
  });
  const auto g = VolterraKernels::tabulate(grid, 2, [](int n, double t, std::span<const double> s) {
    if (n == 1) return std::cos(t - s[0]) * std::exp(-0.5 * (t - s[0]));
    return 0.3 * std::exp(-(t - s[0]) - (t - s[1])) * (1.0 + 0.5 * std::sin(s[0] + s[1]));
  });
  const auto composed = compose_kernels(f, g);
  c.detail << "output orders " << composed.orders() << " (need 4); ";
  c.require(composed.orders() == 4, "kernel count");

  std::vector<double> gamma(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gamma[i] = 0.05 + 0.05 * std::sin(3.0 * grid[i]);
  const Path gamma_path = Path::make(grid, gamma, 1);
  const Path inner = volterra_series_path(g, gamma_path);
  double worst = 0.0;
  for (std::size_t t : {16u, 32u, 48u, 63u}) {
    const double nested = volterra_eval(f, inner, t);
    const double direct = volterra_eval(composed, gamma_path, t);
    worst = std::max(worst, std::abs(direct - nested) / std::abs(nested));
  }
  c.detail << "composed vs nested max rel err " << num(worst) << " (tol 1e-3)";
  c.require(worst <= 1e-3, "composition");
  return c;
}

// ---- 9 ----------------------------------------------------------------------

SrnnParams teacher(std::uint64_t seed) {
  Stream rng(derive_seed(seed, "teacher"), 0);
  const int n = 8, m = 2;
  SrnnParams p;
  p.gamma = Eigen::MatrixXd::Identity(n, n);
  p.W.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) p.W(i, j) = 1.5 * rng.normal() / std::sqrt(double(n));
  p.b.resize(n);
  for (int i = 0; i < n; ++i) p.b(i) = 0.1 * rng.normal();
  p.C.resize(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) p.C(i, j) = 2.0 * rng.normal();
  p.sigma = 0.1 * Eigen::MatrixXd::Identity(n, n);
  p.activation = Activation("tanh");
  p.readout.kind = Readout::Kind::linear;
  p.readout.weights.resize(n);
  for (int i = 0; i < n; ++i) p.readout.weights(i) = rng.normal() / std::sqrt(double(n));
  p.init.kind = InitialDistribution::Kind::point;
  p.init.mean = Eigen::VectorXd::Zero(n);
  return p;
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(ss / static_cast<double>(a.size()));
}

Check representer_learning(std::uint64_t seed) {
  Check c;
  const SrnnParams p = teacher(seed);
  Stream train_rng(derive_seed(seed, "train-inputs"), 0);
  Stream test_rng(derive_seed(seed, "test-inputs"), 0);
  std::vector<Path> train, test;
  for (int i = 0; i < 200; ++i) train.push_back(random_walk_path(train_rng, 2, 10, 1.0));
  for (int i = 0; i < 50; ++i) test.push_back(random_walk_path(test_rng, 2, 10, 1.0));

  // One master seed for all targets: common random numbers across inputs.
  const std::uint64_t target_seed = derive_seed(seed, "targets");
  auto targets_of = [&](const std::vector<Path>& xs) {
    std::vector<double> y;
    for (const auto& x : xs) y.push_back(output_functional(p, x, 1.0, 0.01, 10000, target_seed).value);
    return y;
  };
  const auto y_train = targets_of(train);
  const auto y_test = targets_of(test);

  const KernelSpec spec = KernelSpec::piecewise(0.0, 1.0, 10, 3);
  constexpr double kLambda = 1e-3;
  std::vector<double> curve;
  for (std::size_t N : {25u, 50u, 100u, 200u}) {
    const auto model = fit(std::span<const Path>(train.data(), N),
                           std::span<const double>(y_train.data(), N), spec, kLambda);
    curve.push_back(rmse(predict(model, test), y_test));
    c.detail << "N=" << N << " rmse " << num(curve.back()) << "; ";
  }
  c.require(curve.back() < curve.front(), "rmse(200) < rmse(25)");

  double mean = 0.0;
  for (double y : y_train) mean += y;
  mean /= static_cast<double>(y_train.size());
  double scale = 0.0;
  for (double y : y_train) scale += (y - mean) * (y - mean);
  scale = std::sqrt(scale / static_cast<double>(y_train.size()));
  const auto interp = fit(train, y_train, spec, 1e-10);
  double worst = 0.0;
  for (double r : training_residuals(interp, y_train)) worst = std::max(worst, std::abs(r));
  c.detail << "lambda=1e-10 max residual / target std " << num(worst / scale) << " (tol 1e-6)";
  c.require(worst <= 1e-6 * scale, "interpolation residual");
  return c;
}

// ---- 10 ---------------------------------------------------------------------

Check memoryless(std::uint64_t) {
  Check c;
  double worst = 0.0;
  const auto grid = uniform_grid(0.0, 1.0, 20000);
  for (int q = 0; q <= 2; ++q) {
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = std::pow(grid[i], q);
    const Path u = Path::make(grid, values, 1);
    for (const auto& f : memoryless_features(u, 3, 2, 1.0)) {
      // prod over levels of 1 / (sum of exponents + depth), innermost first
      double denom = 1.0, acc = 0.0;
      for (std::size_t j = f.powers.size() - 1; j >= 1; --j) {
        acc += f.powers[j] + q + 1.0;
        denom *= acc;
      }
      worst = std::max(worst, std::abs(f.value - 1.0 / denom));
    }
  }
  c.detail << "max abs err " << num(worst) << " (tol 1e-8)";
  c.require(worst <= 1e-8, "closed forms");
  return c;
}

// ---- 11 ---------------------------------------------------------------------

SrnnParams small_tanh_srnn(std::uint64_t seed, int n, int m) {
  Stream rng(derive_seed(seed, "eq11"), 0);
  SrnnParams p;
  p.gamma = Eigen::MatrixXd::Identity(n, n);
  p.W.resize(n, n);
  p.C.resize(n, m);
  p.b.resize(n);
  p.sigma.resize(n, n);
  for (int i = 0; i < n; ++i) {
    p.b(i) = 0.2 * rng.normal();
    for (int j = 0; j < n; ++j) p.W(i, j) = rng.normal() / std::sqrt(double(n));
    for (int j = 0; j < m; ++j) p.C(i, j) = rng.normal();
    for (int j = 0; j < n; ++j) p.sigma(i, j) = 0.1 * rng.normal();
  }
  p.activation = Activation("tanh");
  p.init.mean = Eigen::VectorXd::Constant(n, 0.3);
  return p;
}

bool same_bits(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

Check determinism(std::uint64_t seed) {
  Check c;
  const int n = 4, m = 2;
  const SrnnParams p = small_tanh_srnn(seed, n, m);
  Stream input_rng(derive_seed(seed, "eq11-input"), 0);
  const Path u = random_walk_path(input_rng, m, 50, 1.0);

  const auto first = euler_maruyama(p, u, 1.0, 0.01, seed, 3);
  const auto second = euler_maruyama(p, u, 1.0, 0.01, seed, 3);
  const bool traj = same_bits(first.states, second.states);
  const Estimate e1 = output_functional(p, u, 1.0, 0.01, 500, seed);
  const Estimate e2 = output_functional(p, u, 1.0, 0.01, 500, seed);
  const bool mc = std::memcmp(&e1, &e2, sizeof e1) == 0;
  c.detail << "rerun trajectory " << (traj ? "identical" : "DIFFERS") << ", output functional "
           << (mc ? "identical" : "DIFFERS") << "; ";
  c.require(traj && mc, "bit-identical reruns");

  // gamma = dt = 1: h_{k+1} = a(W h_k + b) + C u_k + sigma xi_k.
  const std::size_t steps = 40;
  std::vector<double> times(steps + 1), values((steps + 1) * m);
  Stream drive_rng(derive_seed(seed, "eq11-drive"), 0);
  for (std::size_t i = 0; i <= steps; ++i) {
    times[i] = static_cast<double>(i);
    for (int k = 0; k < m; ++k) values[i * m + static_cast<std::size_t>(k)] = drive_rng.normal();
  }
  const Path drive = Path::make(times, values, static_cast<std::size_t>(m));
  const auto em = euler_maruyama(p, drive, static_cast<double>(steps), 1.0, seed, 7);

  Stream rng(seed, 7);
  Eigen::MatrixXd manual(static_cast<Eigen::Index>(steps + 1), n);
  Eigen::VectorXd h = p.init.mean, pre(n), act(n), uk(m), xi(n), noise(n);
  manual.row(0) = h.transpose();
  for (std::size_t k = 0; k < steps; ++k) {
    for (int q = 0; q < n; ++q) xi(q) = rng.normal();
    for (int j = 0; j < m; ++j) uk(j) = values[k * m + static_cast<std::size_t>(j)];
    pre.noalias() = p.W * h;
    pre += p.b;
    for (int i = 0; i < n; ++i) act(i) = std::tanh(pre(i));
    act.noalias() += p.C * uk;
    noise.noalias() = p.sigma * xi;
    h = act + noise;
    manual.row(static_cast<Eigen::Index>(k + 1)) = h.transpose();
  }
  const bool eq11 = same_bits(em.states, manual);
  c.detail << "discrete-RNN reduction " << (eq11 ? "bit-identical" : "DIFFERS") << " over "
           << steps << " steps";
  if (!eq11) c.detail << " (max diff " << num((em.states - manual).cwiseAbs().maxCoeff()) << ")";
  c.require(eq11, "discrete reduction");
  return c;
}

struct Entry {
  const char* name;
  double limit;
  std::function<Check(std::uint64_t)> run;
};

const Entry& entry(int id) {
  static const Entry entries[kCriterionCount] = {
      {"signature-closed-forms", 1.0, signature_closed_forms},
      {"chen-identity", 30.0, chen_identity},
      {"exponential-property", 5.0, exponential_property},
      {"gram-positivity", 30.0, gram_positivity},
      {"ou-linear-response", 120.0, ou_linear_response},
      {"fluctuation-dissipation", 120.0, fluctuation_dissipation},
      {"volterra-first-order", 120.0, volterra_first_order},
      {"composition", 60.0, composition},
      {"representer-learning", 600.0, representer_learning},
      {"memoryless-features", 5.0, memoryless},
      {"determinism", 10.0, determinism},
  };
  if (id < 1 || id > kCriterionCount)
    throw Error(ErrorCode::invalid_argument, "no acceptance criterion " + std::to_string(id));
  return entries[id - 1];
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed) {
  const Entry& e = entry(id);
  CriterionResult r;
  r.id = id;
  r.name = e.name;
  r.limit_seconds = e.limit;
  const auto start = Clock::now();
  try {
    Check check = e.run(seed);
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    // 5 and 6 are timed on the shared Monte-Carlo run.
    if (id == 5 || id == 6) r.seconds = std::max(r.seconds, ou_run(seed).seconds);
    r.passed = check.ok && r.seconds <= r.limit_seconds;
    r.detail = check.detail.str();
    while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
    if (r.seconds > r.limit_seconds) r.detail += "; FAIL runtime over limit";
  } catch (const std::exception& ex) {
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    r.passed = false;
    r.detail = std::string("exception: ") + ex.what();
  }
  return r;
}

std::vector<CriterionResult> run_all(std::uint64_t seed, const std::vector<int>& only) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id)
    if (only.empty() || std::find(only.begin(), only.end(), id) != only.end())
      out.push_back(run_criterion(id, seed));
  return out;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << " " << r.name << " (" << num(r.seconds)
    << " s / " << num(r.limit_seconds) << " s): " << r.detail;
  return s.str();
}

std::string format_summary(const std::vector<CriterionResult>& results) {
  std::string out;
  int passed = 0;
  for (const auto& r : results) {
    out += format_line(r) + "\n";
    passed += r.passed ? 1 : 0;
  }
  out += std::to_string(passed) + "/" + std::to_string(results.size()) + " criteria passed\n";
  return out;
}

}  // namespace responsekit::acceptance
