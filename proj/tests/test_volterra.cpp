#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "responsekit/error.hpp"
#include "responsekit/paths.hpp"
#include "responsekit/volterra.hpp"

using namespace responsekit;

namespace {

double decay(int, double t, std::span<const double> s) { return std::exp(-(t - s[0])); }

// Symmetric smooth kernels of orders 1..3.
double smooth(int order, double t, std::span<const double> s) {
  double sum = 0.0, prod = 1.0;
  for (double x : s) {
    sum += t - x;
    prod *= std::cos(x);
  }
  return std::exp(-sum) * (1.0 + 0.3 * prod) / order;
}

Path constant_path(double c, double t_end) { return Path::make({0.0, t_end}, {{c}, {c}}); }

Path wave(double t_end) {
  std::vector<double> times, values;
  for (int i = 0; i <= 200; ++i) {
    const double t = t_end * i / 200.0;
    times.push_back(t);
    values.push_back(0.3 * std::sin(4.0 * t) + 0.1);
  }
  return Path::make(std::move(times), std::move(values), 1);
}

}  // namespace

TEST(Volterra, ZeroInputGivesZero) {
  const auto k = VolterraKernels::tabulate(uniform_grid(0.0, 1.0, 20), 3, smooth);
  for (std::size_t t = 0; t <= 20; ++t) EXPECT_EQ(volterra_eval(k, constant_path(0.0, 1.0), t), 0.0);
}

TEST(Volterra, ExponentialConvolution) {
  const auto k = VolterraKernels::tabulate(uniform_grid(0.0, 2.0, 400), 1, decay);
  const double c = 0.7;
  for (std::size_t t : {0u, 100u, 250u, 400u}) {
    const double time = k.grid()[t];
    EXPECT_NEAR(volterra_eval(k, constant_path(c, 2.0), t), c * (1.0 - std::exp(-time)), 1e-5);
  }
}

TEST(Volterra, FirstOrderIsLinear) {
  const auto k = VolterraKernels::tabulate(uniform_grid(0.0, 1.0, 50), 1, smooth);
  const Path g = wave(1.0);
  const Path g2 = scale(g, 2.0);
  for (std::size_t t = 0; t <= 50; t += 7)
    EXPECT_NEAR(volterra_eval(k, g2, t), 2.0 * volterra_eval(k, g, t), 1e-12);
}

TEST(Volterra, MatchesFullCubeSum) {
  const std::size_t segments = 12;
  const auto k = VolterraKernels::tabulate(uniform_grid(0.0, 1.2, segments), 3, smooth);
  const Path g = wave(1.2);
  const double h = k.step();
  for (std::size_t t : {0u, 1u, 5u, 12u}) {
    const auto w = trapezoid_weights(t, h);
    std::vector<double> gv(t + 1);
    for (std::size_t i = 0; i <= t; ++i) gv[i] = g.at(k.grid()[i])[0];
    const double T = k.grid()[t];
    double expected = 0.0;
    for (std::size_t a = 0; a <= t; ++a) {
      const double sa = k.grid()[a];
      expected += w[a] * gv[a] * smooth(1, T, std::vector<double>{sa});
      for (std::size_t b = 0; b <= t; ++b) {
        const double sb = k.grid()[b];
        expected += w[a] * w[b] * gv[a] * gv[b] * smooth(2, T, std::vector<double>{sa, sb});
        for (std::size_t c = 0; c <= t; ++c) {
          const double sc = k.grid()[c];
          expected += w[a] * w[b] * w[c] * gv[a] * gv[b] * gv[c] *
                      smooth(3, T, std::vector<double>{sa, sb, sc});
        }
      }
    }
    EXPECT_NEAR(volterra_eval(k, g, t), expected, 1e-13 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Volterra, StorageRoundTrip) {
  VolterraKernels k(uniform_grid(0.0, 1.0, 6), 3);
  double v = 1.0;
  std::vector<std::size_t> s(3, 0);
  for (std::size_t t = 0; t <= 6; ++t)
    for (std::size_t a = 0; a <= t; ++a)
      for (std::size_t b = a; b <= t; ++b)
        for (std::size_t c = b; c <= t; ++c) {
          s = {a, b, c};
          k.set(3, t, s, v);
          v += 1.0;
        }
  v = 1.0;
  for (std::size_t t = 0; t <= 6; ++t)
    for (std::size_t a = 0; a <= t; ++a)
      for (std::size_t b = a; b <= t; ++b)
        for (std::size_t c = b; c <= t; ++c) {
          const std::size_t perm[] = {c, a, b};
          EXPECT_EQ(k.at(3, t, perm), v);
          v += 1.0;
        }
  EXPECT_EQ(k.raw(3).size(), static_cast<std::size_t>(v - 1.0));
  const std::size_t unsorted[] = {2, 1, 0};
  EXPECT_THROW(k.set(3, 4, unsorted, 1.0), Error);
  const std::size_t acausal[] = {0, 1, 5};
  EXPECT_EQ(k.at(3, 4, acausal), 0.0);
}

TEST(Volterra, CompositionsEnumerateExactly) {
  for (int r = 1; r <= 7; ++r)
    for (int k = 1; k <= r; ++k) {
      const auto cs = compositions(r, k);
      std::set<std::vector<int>> seen(cs.begin(), cs.end());
      EXPECT_EQ(seen.size(), cs.size());
      EXPECT_TRUE(std::is_sorted(cs.begin(), cs.end()));
      double expected = 1.0;
      for (int i = 1; i < k; ++i) expected = expected * (r - i) / i;
      EXPECT_EQ(cs.size(), static_cast<std::size_t>(std::lround(expected))) << r << "," << k;
      for (const auto& c : cs) {
        ASSERT_EQ(c.size(), static_cast<std::size_t>(k));
        int sum = 0;
        for (int x : c) {
          EXPECT_GE(x, 1);
          sum += x;
        }
        EXPECT_EQ(sum, r);
      }
    }
  EXPECT_TRUE(compositions(2, 3).empty());
}

TEST(Volterra, ComposedOrderCount) {
  const auto grid = uniform_grid(0.0, 1.0, 8);
  for (int N = 1; N <= 2; ++N)
    for (int M = 1; M <= 2; ++M) {
      const auto f = VolterraKernels::tabulate(grid, N, smooth);
      const auto g = VolterraKernels::tabulate(grid, M, smooth);
      EXPECT_EQ(compose_kernels(f, g).orders(), N + M);
    }
}

TEST(Volterra, SelfCompositionOfExponential) {
  // The inner integrand e^{-(t-s)} e^{-(s-tau)} is constant in s, so interior
  // points are exact; the endpoints tau = 0 and tau = t carry a half-step term.
  const auto k = VolterraKernels::tabulate(uniform_grid(0.0, 2.0, 80), 1, decay);
  const auto c = compose_kernels(k, k);
  const double h = k.step();
  for (std::size_t t : {10u, 40u, 80u})
    for (std::size_t s = 0; s <= t; ++s) {
      const double lag = k.grid()[t] - k.grid()[s];
      const std::size_t idx[] = {s};
      const double tol = (s == 0 || s == t) ? 0.5 * h + 1e-12 : 1e-12;
      EXPECT_NEAR(c.at(1, t, idx), lag * std::exp(-lag), tol) << "t=" << t << " s=" << s;
    }
}

TEST(Volterra, ComposedEqualsNestedEvaluation) {
  const auto grid = uniform_grid(0.0, 1.0, 16);
  const auto f = VolterraKernels::tabulate(grid, 2, smooth);
  const auto g = VolterraKernels::tabulate(grid, 2, [](int order, double t, std::span<const double> s) {
    return smooth(order, t, s) * (order == 1 ? 1.5 : -0.5);
  });
  const auto composed = compose_kernels(f, g);
  const Path gamma = scale(wave(1.0), 0.5);
  const Path inner = volterra_series_path(g, gamma);
  for (std::size_t t = 0; t <= 16; t += 4) {
    const double nested = volterra_eval(f, inner, t);
    EXPECT_NEAR(volterra_eval(composed, gamma, t), nested, 1e-12 * std::max(1.0, std::abs(nested)));
  }
}

TEST(Volterra, GridChecks) {
  const auto a = VolterraKernels::tabulate(uniform_grid(0.0, 1.0, 8), 1, decay);
  const auto b = VolterraKernels::tabulate(uniform_grid(0.0, 1.0, 9), 1, decay);
  EXPECT_THROW(compose_kernels(a, b), Error);
  EXPECT_THROW(VolterraKernels({0.0, 0.1, 0.3}, 1), Error);
  EXPECT_THROW(volterra_eval(a, constant_path(1.0, 1.0), 9), Error);
  EXPECT_THROW(volterra_eval(a, constant_path(1.0, 0.5), 8), Error);
}
