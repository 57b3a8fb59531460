#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "responsekit/paths.hpp"

namespace responsekit {

// Elementwise activation a(.) looked up by name: "tanh", "zero" (linear
// SRNN), "identity", "relu", "sigmoid".
class Activation {
 public:
  Activation() : Activation("zero") {}
  explicit Activation(std::string name);

  const std::string& name() const noexcept { return name_; }
  bool is_zero() const noexcept { return fn_ == nullptr; }
  double operator()(double x) const { return fn_ ? fn_(x) : 0.0; }

 private:
  std::string name_;
  double (*fn_)(double) = nullptr;
};

// Scalar observable f(h).
struct Readout {
  enum class Kind { tanh, coordinate, linear };

  Kind kind = Kind::coordinate;
  int index = 0;            // coordinate, and tanh when weights is empty
  Eigen::VectorXd weights;  // linear, and tanh(w.h) when non-empty

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& h) const;
};

struct InitialDistribution {
  enum class Kind { point, gaussian };

  Kind kind = Kind::point;
  Eigen::VectorXd mean;  // h0 for point
  Eigen::MatrixXd cov;   // gaussian only
};

// dh = (-Gamma h + a(W h + b) + C u) dt + sigma dW,  y = f(h).
struct SrnnParams {
  Eigen::MatrixXd gamma;
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Eigen::MatrixXd C;
  Eigen::MatrixXd sigma;  // n x r
  Activation activation;
  Readout readout;
  InitialDistribution init;

  std::size_t n() const noexcept { return static_cast<std::size_t>(gamma.rows()); }
  std::size_t m() const noexcept { return static_cast<std::size_t>(C.cols()); }
  std::size_t r() const noexcept { return static_cast<std::size_t>(sigma.cols()); }

  // Shapes, finiteness, positive stability of Gamma. Throws Error.
  void validate() const;

  // Linear scalar OU: n = m = r = 1, a = zero, C = 1, readout = h.
  static SrnnParams scalar_ou(double gamma, double sigma);
};

// Solves Gamma S + S Gamma^T = sigma sigma^T.
Eigen::MatrixXd stationary_covariance(const SrnnParams& p);

// Replaces the initial law with N(0, stationary covariance).
SrnnParams with_stationary_init(SrnnParams p);

struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // (steps + 1) x n
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// One-step affine map equivalent to an Euler-Maruyama step:
//   h' = alpha h + beta (a(W h + b) + C u) + theta xi,
// with alpha = I - Gamma dt, beta = dt, theta = sqrt(dt) sigma.
struct DiscreteRnn {
  Eigen::MatrixXd alpha;
  double beta = 0.0;
  Eigen::MatrixXd theta;
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Eigen::MatrixXd C;
  Activation activation;
  // Scalar alpha = 1 - gamma dt when Gamma = gamma I.
  std::optional<double> alpha_scalar;

  struct Workspace {
    Eigen::VectorXd pre;
    Eigen::VectorXd drive;
    Eigen::VectorXd noise;
  };

  // out must not alias h. An empty u means zero input.
  void step(const Eigen::VectorXd& h, const Eigen::VectorXd& u, const Eigen::VectorXd& xi,
            Eigen::VectorXd& out, Workspace& work) const;
};

DiscreteRnn discretize(const SrnnParams& p, double dt);

// Number of steps T/dt; throws when T/dt is not integral within round-off.
std::size_t step_count(double T, double dt);

// Samples u at t_j = j dt, j = 0..steps-1 (row j). A zero-column matrix
// stands for u == 0 regardless of m.
Eigen::MatrixXd sample_input(const Path& u, std::size_t m, double dt, std::size_t steps);

Trajectory euler_maruyama(const SrnnParams& p, const Path& u, double T, double dt,
                          std::uint64_t seed, std::uint64_t stream = 0);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Mean and standard error of f(h_T) over K trajectories; trajectory k draws
// from Stream(seed, k).
Estimate output_functional(const SrnnParams& p, const Path& u, double T, double dt,
                           std::size_t samples, std::uint64_t seed);

// Same, with a pre-sampled input schedule (rows = steps).
Estimate output_functional(const SrnnParams& p, const Eigen::MatrixXd& input, double dt,
                           std::size_t samples, std::uint64_t seed);

// e^{-Gamma t} h0 + int_0^t e^{-Gamma (t-s)} C u_s ds for the linear SRNN.
Eigen::VectorXd ou_mean_analytic(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& C,
                                 const Path& u, const Eigen::VectorXd& h0_mean, double t);

class Stream;

// Runs several input arms in lockstep from one initial draw and one noise
// stream (common random numbers). Each arm is a pre-sampled input schedule
// (steps x m, or zero columns for u == 0).
class LockstepSimulator {
 public:
  LockstepSimulator(const SrnnParams& p, double dt, std::size_t steps);

  std::size_t steps() const noexcept { return steps_; }
  const DiscreteRnn& map() const noexcept { return map_; }

  // Draws h0 from the initial law (consumes n normals when Gaussian).
  Eigen::VectorXd draw_initial(Stream& rng) const;

  // states row (arm * observe.size() + o) receives h at step observe[o];
  // observe must be sorted ascending.
  // Throws DivergenceError when |h|_inf exceeds the guard.
  void run(std::span<const Eigen::MatrixXd> inputs, std::span<const std::size_t> observe,
           Stream& rng, Eigen::MatrixXd& states) const;

 private:
  InitialDistribution init_;
  DiscreteRnn map_;
  double dt_;
  std::size_t steps_;
  Eigen::MatrixXd init_factor_;  // Gaussian init: cov = F F^T
};

// Divergence guard on |h|_inf.
inline constexpr double kDivergenceBound = 1e8;

}  // namespace responsekit
