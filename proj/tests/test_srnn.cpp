#include <gtest/gtest.h>

#include <cmath>

#include "responsekit/error.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/random.hpp"
#include "responsekit/srnn.hpp"

using namespace responsekit;

namespace {

Path zero_input(std::size_t m, double T) {
  return Path::make({0.0, T}, std::vector<double>(2 * m, 0.0), m);
}

SrnnParams small_tanh(std::size_t n, std::size_t m, std::uint64_t seed) {
  Stream rng(seed, 0);
  SrnnParams p;
  p.gamma = Eigen::MatrixXd::Identity(n, n);
  p.gamma(0, 1) = 0.3;
  p.W = Eigen::MatrixXd(n, n);
  p.C = Eigen::MatrixXd(n, m);
  p.b = Eigen::VectorXd(n);
  p.sigma = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p.W(i, j) = rng.normal() / std::sqrt(double(n));
    for (std::size_t j = 0; j < m; ++j) p.C(i, j) = rng.normal();
    p.b(i) = 0.1 * rng.normal();
    p.sigma(i, i) = 0.2;
  }
  p.activation = Activation("tanh");
  p.readout = Readout{Readout::Kind::coordinate, 0, {}};
  p.init.kind = InitialDistribution::Kind::gaussian;
  p.init.mean = Eigen::VectorXd::Zero(n);
  p.init.cov = 0.1 * Eigen::MatrixXd::Identity(n, n);
  return p;
}

}  // namespace

TEST(Srnn, ValidatesStability) {
  SrnnParams p = SrnnParams::scalar_ou(-1.0, 0.5);
  EXPECT_THROW(p.validate(), Error);
  p = SrnnParams::scalar_ou(1.0, 0.5);
  EXPECT_NO_THROW(p.validate());
}

TEST(Srnn, DeterministicLinearDecay) {
  SrnnParams p = SrnnParams::scalar_ou(2.0, 0.0);
  p.C(0, 0) = 0.0;
  p.init.mean(0) = 1.5;
  const double dt = 1e-3;
  const Trajectory tr = euler_maruyama(p, zero_input(1, 1.0), 1.0, dt, 5);
  ASSERT_EQ(tr.states.rows(), 1001);
  for (Eigen::Index j = 0; j < tr.states.rows(); j += 100) {
    const double t = tr.times[static_cast<std::size_t>(j)];
    EXPECT_NEAR(tr.states(j, 0), 1.5 * std::exp(-2.0 * t), 5.0 * dt);
  }
}

TEST(Srnn, ZeroSystemStaysZero) {
  SrnnParams p = SrnnParams::scalar_ou(1.0, 0.0);
  const Trajectory tr = euler_maruyama(p, zero_input(1, 1.0), 1.0, 0.01, 9);
  EXPECT_EQ(tr.states.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Srnn, DiscretizeCoefficients) {
  SrnnParams p = SrnnParams::scalar_ou(1.0, 0.7);
  const DiscreteRnn unit = discretize(p, 1.0);
  EXPECT_EQ(unit.alpha(0, 0), 0.0);
  EXPECT_EQ(unit.beta, 1.0);
  EXPECT_EQ(unit.theta(0, 0), 0.7);
  const DiscreteRnn tenth = discretize(p, 0.1);
  EXPECT_DOUBLE_EQ(tenth.alpha(0, 0), 0.9);
  EXPECT_DOUBLE_EQ(tenth.beta, 0.1);
  EXPECT_DOUBLE_EQ(tenth.theta(0, 0), std::sqrt(0.1) * 0.7);
}

TEST(Srnn, UnitStepReducesToRnnUpdate) {
  SrnnParams p = small_tanh(3, 2, 40);
  p.gamma = Eigen::MatrixXd::Identity(3, 3);
  p.init.kind = InitialDistribution::Kind::point;
  p.init.mean = Eigen::VectorXd::Constant(3, 0.2);
  const Path u = Path::make({0.0, 10.0}, {{1.0, -1.0}, {0.0, 2.0}});
  const Trajectory tr = euler_maruyama(p, u, 10.0, 1.0, 77, 3);

  Stream rng(77, 3);
  Eigen::VectorXd h = p.init.mean;
  for (int j = 0; j < 10; ++j) {
    Eigen::VectorXd xi(3);
    for (int q = 0; q < 3; ++q) xi(q) = rng.normal();
    const auto ut = u.at(j);
    const Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(ut.data(), 2);
    Eigen::VectorXd pre = p.W * h + p.b;
    Eigen::VectorXd drive(3);
    for (int i = 0; i < 3; ++i) drive(i) = std::tanh(pre(i));
    drive += p.C * uv;
    h = drive + p.sigma * xi;
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(tr.states(j + 1, i), h(i), 1e-14) << "step " << j + 1;
  }
}

TEST(Srnn, GeneralStepMatchesEulerFormula) {
  const SrnnParams p = small_tanh(4, 2, 41);
  const double dt = 0.05;
  const Path u = Path::make({0.0, 0.5, 1.0}, {{0.0, 1.0}, {1.0, 0.0}, {0.5, 0.5}});
  const Trajectory tr = euler_maruyama(p, u, 1.0, dt, 78);

  Stream rng(78, 0);
  Eigen::VectorXd z(4);
  for (int i = 0; i < 4; ++i) z(i) = rng.normal();
  Eigen::VectorXd h = Eigen::LLT<Eigen::MatrixXd>(p.init.cov).matrixL() * z;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(tr.states(0, i), h(i), 1e-15);
  for (int j = 0; j < 20; ++j) {
    Eigen::VectorXd xi(4);
    for (int q = 0; q < 4; ++q) xi(q) = rng.normal();
    const auto ut = u.at(j * dt);
    const Eigen::VectorXd uv = Eigen::Map<const Eigen::VectorXd>(ut.data(), 2);
    const Eigen::VectorXd pre = p.W * h + p.b;
    const Eigen::VectorXd act = pre.array().tanh().matrix();
    h = h + dt * (-p.gamma * h + act + p.C * uv) + std::sqrt(dt) * p.sigma * xi;
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(tr.states(j + 1, i), h(i), 1e-12);
  }
}

TEST(Srnn, SeedDeterminism) {
  const SrnnParams p = small_tanh(3, 1, 42);
  const Path u = Path::make({0.0, 1.0}, {{0.0}, {1.0}});
  const Trajectory a = euler_maruyama(p, u, 1.0, 0.01, 123, 4);
  const Trajectory b = euler_maruyama(p, u, 1.0, 0.01, 123, 4);
  const Trajectory c = euler_maruyama(p, u, 1.0, 0.01, 124, 4);
  EXPECT_TRUE(a.states == b.states);
  EXPECT_FALSE(a.states == c.states);
  const Estimate e1 = output_functional(p, u, 1.0, 0.01, 200, 9);
  const Estimate e2 = output_functional(p, u, 1.0, 0.01, 200, 9);
  EXPECT_EQ(e1.value, e2.value);
  EXPECT_EQ(e1.std_error, e2.std_error);
}

TEST(Srnn, DivergenceNamesStep) {
  SrnnParams p = SrnnParams::scalar_ou(1.0, 1e12);
  try {
    euler_maruyama(p, zero_input(1, 1.0), 1.0, 0.1, 1);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.code(), ErrorCode::divergence);
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(Srnn, OutputFunctionalMatchesOuMean) {
  SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  p.init.mean(0) = 2.0;
  const Estimate e = output_functional(p, zero_input(1, 1.0), 1.0, 0.001, 4000, 17);
  const double analytic = ou_mean_analytic(p.gamma, p.C, zero_input(1, 1.0), p.init.mean, 1.0)(0);
  EXPECT_NEAR(analytic, 2.0 * std::exp(-1.0), 1e-14);
  EXPECT_LE(std::abs(e.value - analytic), 3.0 * e.std_error + 2e-3);
}

TEST(Srnn, StderrScalesWithSamples) {
  const SrnnParams p = SrnnParams::scalar_ou(1.0, 1.0);
  const Estimate a = output_functional(p, zero_input(1, 1.0), 1.0, 0.05, 4000, 18);
  const Estimate b = output_functional(p, zero_input(1, 1.0), 1.0, 0.05, 8000, 18);
  EXPECT_NEAR(b.std_error / a.std_error, 1.0 / std::sqrt(2.0), 0.2 / std::sqrt(2.0));
}

TEST(Srnn, DeterministicSystemHasZeroStderr) {
  SrnnParams p = small_tanh(3, 1, 43);
  p.sigma.setZero();
  p.init.kind = InitialDistribution::Kind::point;
  p.init.mean = Eigen::VectorXd::Constant(3, 0.5);
  const Path u = Path::make({0.0, 1.0}, {{0.0}, {1.0}});
  const Estimate a = output_functional(p, u, 1.0, 0.01, 10, 1);
  const Estimate b = output_functional(p, u, 1.0, 0.01, 50, 2);
  EXPECT_EQ(a.std_error, 0.0);
  EXPECT_EQ(a.value, b.value);
}

TEST(Srnn, OuMeanConstantInput) {
  const double gamma = 1.7, c = 0.8, cc = 1.3, h0 = -0.4;
  Eigen::MatrixXd G = Eigen::MatrixXd::Constant(1, 1, gamma);
  Eigen::MatrixXd C = Eigen::MatrixXd::Constant(1, 1, cc);
  const Path u = Path::make({0.0, 0.3, 2.0}, {{c}, {c}, {c}});
  for (double t : {0.0, 0.5, 1.2, 2.0}) {
    const double expected = (c * cc / gamma) * (1.0 - std::exp(-gamma * t)) + std::exp(-gamma * t) * h0;
    EXPECT_NEAR(ou_mean_analytic(G, C, u, Eigen::VectorXd::Constant(1, h0), t)(0), expected, 1e-12);
  }
  EXPECT_EQ(ou_mean_analytic(G, C, zero_input(1, 1.0), Eigen::VectorXd::Zero(1), 1.0)(0), 0.0);
}

TEST(Srnn, WeakOrderOne) {
  SrnnParams p = SrnnParams::scalar_ou(1.0, 0.1);
  p.init.mean(0) = 1.0;
  const double analytic = std::exp(-1.0);
  std::vector<double> log_dt, log_err;
  for (double dt : {0.1, 0.05, 0.025}) {
    const Estimate e = output_functional(p, zero_input(1, 1.0), 1.0, dt, 20000, 19);
    const double bias = std::abs(e.value - analytic);
    EXPECT_LT(e.std_error, 0.5 * bias);
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(bias));
  }
  const double mx = (log_dt[0] + log_dt[1] + log_dt[2]) / 3.0;
  const double my = (log_err[0] + log_err[1] + log_err[2]) / 3.0;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < 3; ++i) {
    sxy += (log_dt[i] - mx) * (log_err[i] - my);
    sxx += (log_dt[i] - mx) * (log_dt[i] - mx);
  }
  EXPECT_NEAR(sxy / sxx, 1.0, 0.5);
}

TEST(Srnn, StationaryVarianceIsPreserved) {
  SrnnParams p;
  p.gamma = Eigen::MatrixXd{{1.0, 0.4}, {-0.2, 1.5}};
  p.W = Eigen::MatrixXd::Zero(2, 2);
  p.b = Eigen::VectorXd::Zero(2);
  p.C = Eigen::MatrixXd::Identity(2, 2);
  p.sigma = Eigen::MatrixXd{{0.6, 0.0}, {0.2, 0.4}};
  p.readout = Readout{Readout::Kind::coordinate, 0, {}};
  p = with_stationary_init(p);
  const Eigen::MatrixXd S = stationary_covariance(p);
  const Eigen::MatrixXd lyap = p.gamma * S + S * p.gamma.transpose() - p.sigma * p.sigma.transpose();
  EXPECT_LT(lyap.cwiseAbs().maxCoeff(), 1e-13);

  const std::size_t K = 20000;
  const double dt = 0.01;
  LockstepSimulator sim(p, dt, 50);
  const Eigen::MatrixXd input = Eigen::MatrixXd::Zero(50, 2);
  const std::size_t observe[] = {50};
  Eigen::MatrixXd samples(static_cast<Eigen::Index>(K), 2);
  for (std::size_t k = 0; k < K; ++k) {
    Stream rng(20, k);
    Eigen::MatrixXd states;
    sim.run(std::span<const Eigen::MatrixXd>(&input, 1), observe, rng, states);
    samples.row(static_cast<Eigen::Index>(k)) = states.row(0);
  }
  for (int i = 0; i < 2; ++i) {
    const Eigen::ArrayXd sq = samples.col(i).array().square();
    const double var = sq.mean();
    const double se = std::sqrt((sq - var).square().sum() / (K - 1.0) / K);
    EXPECT_LE(std::abs(var - S(i, i)), 3.0 * se) << "coordinate " << i;
  }
}

TEST(Srnn, ReadoutKinds) {
  Eigen::VectorXd h(2);
  h << 0.5, -1.0;
  EXPECT_EQ((Readout{Readout::Kind::coordinate, 1, {}})(h), -1.0);
  EXPECT_DOUBLE_EQ((Readout{Readout::Kind::linear, 0, Eigen::Vector2d(2.0, 1.0)})(h), 0.0);
  EXPECT_DOUBLE_EQ((Readout{Readout::Kind::tanh, 0, {}})(h), std::tanh(0.5));
}
