#include "responsekit/srnn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "responsekit/error.hpp"
#include "responsekit/parallel.hpp"
#include "responsekit/random.hpp"

namespace responsekit {

namespace {

double act_tanh(double x) { return std::tanh(x); }
double act_identity(double x) { return x; }
double act_relu(double x) { return x > 0.0 ? x : 0.0; }
double act_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

const std::map<std::string, double (*)(double), std::less<>>& activation_registry() {
  static const std::map<std::string, double (*)(double), std::less<>> registry{
      {"zero", nullptr},
      {"tanh", &act_tanh},
      {"identity", &act_identity},
      {"relu", &act_relu},
      {"sigmoid", &act_sigmoid},
  };
  return registry;
}

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

void require_shape(const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols,
                   const char* field) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(ErrorCode::dimension_mismatch,
                std::string(field) + " must be " + std::to_string(rows) + "x" +
                    std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()),
                std::string("srnn.") + field);
  if (!all_finite(m))
    throw Error(ErrorCode::non_finite_value, std::string(field) + " has non-finite entries",
                std::string("srnn.") + field);
}

}  // namespace

Activation::Activation(std::string name) : name_(std::move(name)) {
  const auto& reg = activation_registry();
  auto it = reg.find(name_);
  if (it == reg.end())
    throw Error(ErrorCode::config_error, "unknown activation '" + name_ + "'", "srnn.activation");
  fn_ = it->second;
}

double Readout::operator()(const Eigen::Ref<const Eigen::VectorXd>& h) const {
  switch (kind) {
    case Kind::coordinate:
      return h(index);
    case Kind::linear:
      return weights.dot(h);
    case Kind::tanh:
      return weights.size() > 0 ? std::tanh(weights.dot(h)) : std::tanh(h(index));
  }
  return 0.0;
}

void SrnnParams::validate() const {
  const Eigen::Index nn = gamma.rows();
  if (nn < 1) throw Error(ErrorCode::dimension_mismatch, "hidden dimension must be >= 1", "srnn.gamma");
  require_shape(gamma, nn, nn, "gamma");
  require_shape(W, nn, nn, "W");
  require_shape(b, nn, 1, "b");
  if (C.rows() != nn)
    throw Error(ErrorCode::dimension_mismatch, "C must have n rows", "srnn.C");
  require_shape(C, nn, C.cols(), "C");
  if (sigma.rows() != nn || sigma.cols() < 1)
    throw Error(ErrorCode::dimension_mismatch, "sigma must be n x r with r >= 1", "srnn.sigma");
  require_shape(sigma, nn, sigma.cols(), "sigma");

  switch (readout.kind) {
    case Readout::Kind::coordinate:
      if (readout.index < 0 || readout.index >= nn)
        throw Error(ErrorCode::out_of_range, "readout index out of range", "srnn.readout.index");
      break;
    case Readout::Kind::linear:
      if (readout.weights.size() != nn)
        throw Error(ErrorCode::dimension_mismatch, "readout weights must have n entries",
                    "srnn.readout.weights");
      break;
    case Readout::Kind::tanh:
      if (readout.weights.size() != 0 && readout.weights.size() != nn)
        throw Error(ErrorCode::dimension_mismatch, "readout weights must have n entries",
                    "srnn.readout.weights");
      if (readout.weights.size() == 0 && (readout.index < 0 || readout.index >= nn))
        throw Error(ErrorCode::out_of_range, "readout index out of range", "srnn.readout.index");
      break;
  }

  if (init.mean.size() != nn)
    throw Error(ErrorCode::dimension_mismatch, "initial mean must have n entries",
                "srnn.init.mean");
  if (init.kind == InitialDistribution::Kind::gaussian) {
    require_shape(init.cov, nn, nn, "init.cov");
    if ((init.cov - init.cov.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, init.cov.cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::invalid_argument, "initial covariance must be symmetric",
                  "srnn.init.cov");
  }

  const Eigen::VectorXcd eig = gamma.eigenvalues();
  for (Eigen::Index i = 0; i < eig.size(); ++i)
    if (!(eig(i).real() > 0.0))
      throw Error(ErrorCode::invalid_argument,
                  "Gamma must be positive stable (eigenvalue with real part " +
                      std::to_string(eig(i).real()) + ")",
                  "srnn.gamma");
}

SrnnParams SrnnParams::scalar_ou(double gamma, double sigma) {
  SrnnParams p;
  p.gamma = Eigen::MatrixXd::Constant(1, 1, gamma);
  p.W = Eigen::MatrixXd::Zero(1, 1);
  p.b = Eigen::VectorXd::Zero(1);
  p.C = Eigen::MatrixXd::Identity(1, 1);
  p.sigma = Eigen::MatrixXd::Constant(1, 1, sigma);
  p.activation = Activation("zero");
  p.readout = Readout{Readout::Kind::coordinate, 0, {}};
  p.init.kind = InitialDistribution::Kind::point;
  p.init.mean = Eigen::VectorXd::Zero(1);
  return p;
}

Eigen::MatrixXd stationary_covariance(const SrnnParams& p) {
  const Eigen::Index n = p.gamma.rows();
  const Eigen::MatrixXd noise = p.sigma * p.sigma.transpose();
  // vec(Gamma S) + vec(S Gamma^T) = (I (x) Gamma + Gamma (x) I) vec(S)
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        A(j * n + i, j * n + k) += p.gamma(i, k);  // (I (x) Gamma)
        A(j * n + i, k * n + i) += p.gamma(j, k);  // (Gamma (x) I)
      }
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(noise.data(), n * n);
  const Eigen::VectorXd x = A.fullPivLu().solve(rhs);
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  return 0.5 * (S + S.transpose());
}

SrnnParams with_stationary_init(SrnnParams p) {
  p.init.kind = InitialDistribution::Kind::gaussian;
  p.init.mean = Eigen::VectorXd::Zero(p.gamma.rows());
  p.init.cov = stationary_covariance(p);
  return p;
}

DiscreteRnn discretize(const SrnnParams& p, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive", "dt");
  DiscreteRnn d;
  const Eigen::Index n = p.gamma.rows();
  d.alpha = Eigen::MatrixXd::Identity(n, n) - p.gamma * dt;
  d.beta = dt;
  d.theta = std::sqrt(dt) * p.sigma;
  d.W = p.W;
  d.b = p.b;
  d.C = p.C;
  d.activation = p.activation;
  const double g = p.gamma(0, 0);
  if ((p.gamma - g * Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() == 0.0)
    d.alpha_scalar = 1.0 - g * dt;
  return d;
}

void DiscreteRnn::step(const Eigen::VectorXd& h, const Eigen::VectorXd& u,
                       const Eigen::VectorXd& xi, Eigen::VectorXd& out,
                       Workspace& work) const {
  const Eigen::Index n = h.size();
  if (activation.is_zero()) {
    work.drive.setZero(n);
  } else {
    work.pre.noalias() = W * h;
    work.pre += b;
    work.drive.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) work.drive(i) = activation(work.pre(i));
  }
  if (u.size() > 0) work.drive.noalias() += C * u;
  if (alpha_scalar)
    out = *alpha_scalar * h;
  else
    out.noalias() = alpha * h;
  out += beta * work.drive;
  work.noise.noalias() = theta * xi;
  out += work.noise;
}

std::size_t step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0))
    throw Error(ErrorCode::invalid_argument, "T and dt must be positive", "dt");
  const double ratio = T / dt;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorCode::invalid_argument, "T/dt must be an integer", "dt");
  return static_cast<std::size_t>(k);
}

Eigen::MatrixXd sample_input(const Path& u, std::size_t m, double dt, std::size_t steps) {
  if (u.dim() != m)
    throw Error(ErrorCode::dimension_mismatch,
                "input path has dimension " + std::to_string(u.dim()) + ", SRNN expects " +
                    std::to_string(m));
  const double last = static_cast<double>(steps - 1) * dt;
  if (u.t0() > 0.0 || u.t_end() < last)
    throw Error(ErrorCode::out_of_range, "input path must cover the simulation horizon");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(m));
  std::vector<double> row(m);
  for (std::size_t j = 0; j < steps; ++j) {
    u.at(static_cast<double>(j) * dt, row);
    for (std::size_t k = 0; k < m; ++k) out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = row[k];
  }
  return out;
}

LockstepSimulator::LockstepSimulator(const SrnnParams& p, double dt, std::size_t steps)
    : init_(p.init), map_(discretize(p, dt)), dt_(dt), steps_(steps) {
  p.validate();
  if (init_.kind == InitialDistribution::Kind::gaussian) {
    Eigen::LLT<Eigen::MatrixXd> llt(init_.cov);
    if (llt.info() == Eigen::Success) {
      init_factor_ = llt.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(init_.cov);
      init_factor_ = es.eigenvectors() *
                     es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }
}

Eigen::VectorXd LockstepSimulator::draw_initial(Stream& rng) const {
  if (init_.kind == InitialDistribution::Kind::point) return init_.mean;
  Eigen::VectorXd z(init_.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return init_.mean + init_factor_ * z;
}

void LockstepSimulator::run(std::span<const Eigen::MatrixXd> inputs,
                            std::span<const std::size_t> observe, Stream& rng,
                            Eigen::MatrixXd& states) const {
  const std::size_t arms = inputs.size();
  const Eigen::Index n = map_.alpha.rows();
  const Eigen::Index r = map_.theta.cols();
  states.resize(static_cast<Eigen::Index>(arms * observe.size()), n);

  std::vector<Eigen::VectorXd> cur(arms), next(arms), u(arms);
  std::vector<DiscreteRnn::Workspace> work(arms);
  const Eigen::VectorXd h0 = draw_initial(rng);
  for (std::size_t a = 0; a < arms; ++a) {
    cur[a] = h0;
    next[a].resize(n);
    if (inputs[a].cols() > 0) u[a].resize(inputs[a].cols());
  }
  Eigen::VectorXd xi(r);

  std::size_t o = 0;
  auto record = [&](std::size_t step) {
    while (o < observe.size() && observe[o] == step) {
      for (std::size_t a = 0; a < arms; ++a)
        states.row(static_cast<Eigen::Index>(a * observe.size() + o)) = cur[a].transpose();
      ++o;
    }
  };
  record(0);
  for (std::size_t j = 0; j < steps_ && o < observe.size(); ++j) {
    for (Eigen::Index q = 0; q < r; ++q) xi(q) = rng.normal();
    for (std::size_t a = 0; a < arms; ++a) {
      if (u[a].size() > 0) u[a] = inputs[a].row(static_cast<Eigen::Index>(j)).transpose();
      map_.step(cur[a], u[a], xi, next[a], work[a]);
      std::swap(cur[a], next[a]);
      const double mag = cur[a].cwiseAbs().maxCoeff();
      if (!(mag <= kDivergenceBound))
        throw DivergenceError(j + 1, static_cast<double>(j + 1) * dt_);
    }
    record(j + 1);
  }
  if (o != observe.size())
    throw Error(ErrorCode::out_of_range, "observation step beyond the simulated horizon");
}

Trajectory euler_maruyama(const SrnnParams& p, const Path& u, double T, double dt,
                          std::uint64_t seed, std::uint64_t stream) {
  p.validate();
  const std::size_t steps = step_count(T, dt);
  LockstepSimulator sim(p, dt, steps);
  const Eigen::MatrixXd input = sample_input(u, p.m(), dt, steps);
  std::vector<std::size_t> observe(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) observe[j] = j;

  Trajectory tr;
  tr.seed = seed;
  tr.stream = stream;
  tr.times.resize(steps + 1);
  for (std::size_t j = 0; j <= steps; ++j) tr.times[j] = static_cast<double>(j) * dt;
  Stream rng(seed, stream);
  sim.run(std::span<const Eigen::MatrixXd>(&input, 1), observe, rng, tr.states);
  return tr;
}

namespace {

// Shifted by the first sample, so identical samples give their exact value.
Estimate mean_and_stderr(const std::vector<double>& v) {
  const double k = static_cast<double>(v.size());
  const double shift = v.front();
  double sum = 0.0;
  for (double x : v) sum += x - shift;
  const double offset = sum / k;
  double ss = 0.0;
  for (double x : v) ss += (x - shift - offset) * (x - shift - offset);
  return {shift + offset, std::sqrt(ss / (k - 1.0) / k)};
}

}  // namespace

Estimate output_functional(const SrnnParams& p, const Eigen::MatrixXd& input, double dt,
                           std::size_t samples, std::uint64_t seed) {
  if (samples < 2)
    throw Error(ErrorCode::invalid_argument, "need at least 2 samples", "samples");
  const auto steps = static_cast<std::size_t>(input.rows());
  LockstepSimulator sim(p, dt, steps);
  const std::size_t observe[] = {steps};
  std::vector<double> values(samples);
  parallel_for(samples, [&](std::size_t k) {
    Stream rng(seed, k);
    Eigen::MatrixXd states;
    sim.run(std::span<const Eigen::MatrixXd>(&input, 1), observe, rng, states);
    values[k] = p.readout(states.row(0).transpose());
  });
  return mean_and_stderr(values);
}

Estimate output_functional(const SrnnParams& p, const Path& u, double T, double dt,
                           std::size_t samples, std::uint64_t seed) {
  p.validate();
  const std::size_t steps = step_count(T, dt);
  return output_functional(p, sample_input(u, p.m(), dt, steps), dt, samples, seed);
}

Eigen::VectorXd ou_mean_analytic(const Eigen::MatrixXd& gamma, const Eigen::MatrixXd& C,
                                 const Path& u, const Eigen::VectorXd& h0_mean, double t) {
  if (u.dim() != static_cast<std::size_t>(C.cols()))
    throw Error(ErrorCode::dimension_mismatch, "input dimension does not match C");
  if (t < 0.0 || u.t0() > 0.0 || u.t_end() < t)
    throw Error(ErrorCode::out_of_range, "input path must cover [0, t]");
  const Eigen::MatrixXd decay = (-gamma * t).exp();
  Eigen::VectorXd result = decay * h0_mean;
  if (t == 0.0) return result;

  // Breakpoints: 0, interior path samples, t. Simpson on each piece.
  std::vector<double> knots{0.0};
  for (double s : u.times())
    if (s > 0.0 && s < t) knots.push_back(s);
  knots.push_back(t);

  // Panel width scales with the fastest decay rate; the sum over nodes is
  // accumulated by Horner steps with e^{-Gamma h}.
  const double rate = std::max(1.0, gamma.cwiseAbs().rowwise().sum().maxCoeff());
  std::vector<double> uv(u.dim());
  Eigen::VectorXd uvec(static_cast<Eigen::Index>(u.dim()));
  for (std::size_t piece = 0; piece + 1 < knots.size(); ++piece) {
    const double a = knots[piece];
    const double b = knots[piece + 1];
    const auto panels = static_cast<int>(2 * std::ceil((b - a) * rate / 2e-3));
    const double h = (b - a) / panels;
    const Eigen::MatrixXd scaled_step = -h * gamma;
    const Eigen::MatrixXd step = scaled_step.exp();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(gamma.rows());
    for (int q = 0; q <= panels; ++q) {
      const double s = q == panels ? b : a + q * h;
      const double w = (q == 0 || q == panels) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
      u.at(s, uv);
      for (std::size_t k = 0; k < u.dim(); ++k) uvec(static_cast<Eigen::Index>(k)) = uv[k];
      acc = step * acc + w * (C * uvec);
    }
    const Eigen::MatrixXd scaled_tail = -(t - b) * gamma;
    result += (h / 3.0) * (scaled_tail.exp() * acc);
  }
  return result;
}

}  // namespace responsekit
