#include <gtest/gtest.h>

#include <cmath>

#include "responsekit/error.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/response.hpp"
#include "responsekit/srnn.hpp"

using namespace responsekit;

namespace {

const std::vector<double> kUnit{1.0};

SrnnParams stationary_ou() { return with_stationary_init(SrnnParams::scalar_ou(1.0, 0.5)); }

SrnnParams tanh_network() {
  SrnnParams p;
  p.gamma = Eigen::MatrixXd{{1.0, 0.2}, {0.0, 1.3}};
  p.W = Eigen::MatrixXd{{0.8, -0.5}, {0.6, 0.4}};
  p.b = Eigen::VectorXd{{0.1, -0.2}};
  p.C = Eigen::MatrixXd{{1.0}, {0.5}};
  p.sigma = 0.3 * Eigen::MatrixXd::Identity(2, 2);
  p.activation = Activation("tanh");
  p.readout = Readout{Readout::Kind::tanh, 0, {}};
  p.init.kind = InitialDistribution::Kind::point;
  p.init.mean = Eigen::VectorXd::Zero(2);
  return p;
}

const MemorylessFeature& find(const std::vector<MemorylessFeature>& fs, std::vector<int> powers,
                              std::vector<int> channels) {
  for (const auto& f : fs)
    if (f.powers == powers && f.channels == channels) return f;
  throw std::runtime_error("feature not found");
}

Path sampled(double t_end, std::size_t segments, double (*fn)(double)) {
  std::vector<double> times, values;
  for (std::size_t i = 0; i <= segments; ++i) {
    const double t = t_end * static_cast<double>(i) / static_cast<double>(segments);
    times.push_back(t);
    values.push_back(fn(t));
  }
  return Path::make(std::move(times), std::move(values), 1);
}

}  // namespace

TEST(Impulse, OuMatchesExponential) {
  const SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  const ImpulseEstimate e = impulse_response_mc(p, kUnit, 1.5, 0.5, ImpulseSpec{}, 0.005, 2000, 3);
  EXPECT_LE(std::abs(e.value - std::exp(-1.0)), 3.0 * e.std_error + 2e-3);
  EXPECT_DOUBLE_EQ(e.t, 1.5);
  EXPECT_DOUBLE_EQ(e.s, 0.5);
}

TEST(Impulse, ShortLagApproachesOne) {
  const SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  const ImpulseEstimate e = impulse_response_mc(p, kUnit, 0.52, 0.5, ImpulseSpec{}, 0.001, 500, 4);
  EXPECT_NEAR(e.value, 1.0, 0.03);
}

TEST(Impulse, LinearSystemHasNoSecondOrder) {
  const SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  const ImpulseEstimate e = impulse_response_mc(p, kUnit, 1.0, 0.5, ImpulseSpec{}, 0.005, 2000, 5);
  EXPECT_LE(std::abs(e.second), 3.0 * e.second_std_error + 1e-12);
  EXPECT_FALSE(e.large_epsilon);
  const Estimate r2 = second_order_response_mc(p, kUnit, 1.0, 0.3, 0.6, ImpulseSpec{}, 0.005, 2000, 6);
  EXPECT_LE(std::abs(r2.value), 3.0 * r2.std_error + 1e-12);
}

TEST(Impulse, NegatedDirectionNegatesEstimate) {
  const SrnnParams p = tanh_network();
  const std::vector<double> minus{-1.0};
  const ImpulseEstimate a = impulse_response_mc(p, kUnit, 1.0, 0.4, ImpulseSpec{}, 0.01, 500, 7);
  const ImpulseEstimate b = impulse_response_mc(p, minus, 1.0, 0.4, ImpulseSpec{}, 0.01, 500, 7);
  EXPECT_EQ(a.value, -b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.second, b.second);
}

TEST(Impulse, NonlinearSecondOrderIsVisible) {
  const SrnnParams p = tanh_network();
  ImpulseSpec spec;
  spec.epsilon = 0.5;
  const ImpulseEstimate e = impulse_response_mc(p, kUnit, 1.0, 0.4, spec, 0.01, 4000, 8);
  EXPECT_GT(std::abs(e.second), 3.0 * e.second_std_error);
}

TEST(Impulse, CurveMatchesSinglePoints) {
  const SrnnParams p = tanh_network();
  const std::vector<double> lags{0.3, 0.6};
  const auto curve = impulse_response_curve(p, kUnit, 0.2, lags, ImpulseSpec{}, 0.01, 300, 9);
  ASSERT_EQ(curve.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    const ImpulseEstimate single = impulse_response_mc(p, kUnit, 0.2 + lags[i], 0.2, ImpulseSpec{}, 0.01, 300, 9);
    EXPECT_NEAR(curve[i].value, single.value, 1e-12);
  }
}

TEST(Impulse, RejectsBadArguments) {
  const SrnnParams p = SrnnParams::scalar_ou(1.0, 0.5);
  EXPECT_THROW(impulse_response_mc(p, kUnit, 0.5, 0.5, ImpulseSpec{}, 0.01, 10, 1), Error);
  ImpulseSpec bad;
  bad.epsilon = 0.0;
  EXPECT_THROW(impulse_response_mc(p, kUnit, 1.0, 0.5, bad, 0.01, 10, 1), Error);
  const std::vector<double> wrong{1.0, 0.0};
  EXPECT_THROW(impulse_response_mc(p, wrong, 1.0, 0.5, ImpulseSpec{}, 0.01, 10, 1), Error);
}

TEST(Impulse, ScheduleIntegratesToEpsilon) {
  for (auto shape : {ImpulseSpec::Shape::box, ImpulseSpec::Shape::triangle}) {
    ImpulseSpec spec;
    spec.shape = shape;
    spec.width = 0.04;
    const Eigen::MatrixXd sched = impulse_schedule(spec, kUnit, 0.5, 0.01, 100);
    EXPECT_NEAR(sched.sum() * 0.01, spec.epsilon, 1e-12);
    const Eigen::MatrixXd neg = impulse_schedule(spec, kUnit, 0.5, 0.01, 100, -1.0);
    EXPECT_TRUE(neg == -sched);
  }
}

TEST(Fdt, ZeroLagIsOne) {
  const std::vector<double> lags{0.0, 1.0};
  const auto c = fdt_correlation_ou(stationary_ou(), kUnit, lags, 0.01, 20000, 10);
  EXPECT_LE(std::abs(c[0].value - 1.0), 3.0 * c[0].std_error);
  EXPECT_LE(std::abs(c[1].value - std::exp(-1.0)), 3.0 * c[1].std_error + 5e-3);
}

TEST(Fdt, ImpulseAgreesWithCorrelation) {
  const std::vector<double> lags{0.25, 0.5, 1.0};
  const auto rows = fdt_report(stationary_ou(), kUnit, 0.25, lags, ImpulseSpec{}, 0.01, 20000, 11);
  for (const auto& r : rows) {
    const double combined = std::hypot(r.std_error_impulse, r.std_error_correlation);
    EXPECT_LE(std::abs(r.impulse - r.correlation), 3.0 * combined + 0.01) << "lag " << r.lag;
  }
}

TEST(Fdt, RequiresStationaryLinearSystem) {
  const std::vector<double> lags{0.5};
  try {
    fdt_correlation_ou(SrnnParams::scalar_ou(1.0, 0.5), kUnit, lags, 0.01, 100, 1);
    FAIL() << "expected not_stationary";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::not_stationary);
  }
  EXPECT_THROW(fdt_correlation_ou(tanh_network(), kUnit, lags, 0.01, 100, 1), Error);
}

TEST(Memoryless, ZeroInputGivesZeroFeatures) {
  const auto fs = memoryless_features(Path::make({0.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}), 2, 1, 1.0);
  ASSERT_FALSE(fs.empty());
  for (const auto& f : fs) EXPECT_EQ(f.value, 0.0);
}

TEST(Memoryless, MonomialIntegral) {
  const auto fs = memoryless_features(Path::make({0.0, 0.5, 2.0}, {{1.0}, {1.0}, {1.0}}), 1, 1, 2.0);
  EXPECT_NEAR(find(fs, {0, 1}, {0}).value, 2.0, 1e-14);
  EXPECT_NEAR(find(fs, {1, 0}, {0}).value, 4.0, 1e-14);
}

TEST(Memoryless, NestedIntegral) {
  const Path u = sampled(1.5, 3000, [](double s) { return s; });
  const auto fs = memoryless_features(u, 2, 0, 1.5);
  EXPECT_NEAR(find(fs, {0, 0, 0}, {0, 0}).value, std::pow(1.5, 4) / 8.0, 1e-6);
}

TEST(Memoryless, FirstOrderEqualsTrapezoid) {
  const Path u = Path::make({0.0, 0.3, 0.7, 1.0}, {{1.0, 0.0}, {-1.0, 2.0}, {0.5, 0.5}, {2.0, -1.0}});
  const auto fs = memoryless_features(u, 1, 0, 1.0);
  for (int k = 0; k < 2; ++k) {
    double trap = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
      trap += 0.5 * (u.times()[i + 1] - u.times()[i]) * (u.value(i)[k] + u.value(i + 1)[k]);
    EXPECT_NEAR(find(fs, {0, 0}, {k}).value, trap, 1e-12);
  }
}

TEST(Memoryless, OrderingAndCount) {
  const Path u = Path::make({0.0, 1.0}, {{1.0, 2.0}, {0.0, 1.0}});
  const auto fs = memoryless_features(u, 2, 1, 1.0);
  // n=1: 4 power pairs x 2 channels; n=2: 8 power triples x 4 channel pairs.
  ASSERT_EQ(fs.size(), 8u + 32u);
  EXPECT_EQ(fs[0].powers, (std::vector<int>{0, 0}));
  EXPECT_EQ(fs[0].channels, (std::vector<int>{0}));
  EXPECT_EQ(fs[1].channels, (std::vector<int>{1}));
  EXPECT_EQ(fs[2].powers, (std::vector<int>{0, 1}));
  EXPECT_EQ(fs[8].powers, (std::vector<int>{0, 0, 0}));
  EXPECT_EQ(fs[9].channels, (std::vector<int>{0, 1}));
}
