#include "responsekit/learn.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>

#include "responsekit/error.hpp"
#include "responsekit/io.hpp"
#include "responsekit/parallel.hpp"

namespace responsekit {

namespace {

std::vector<Path> prepare_all(std::span<const Path> raw, const KernelSpec& spec) {
  std::vector<std::optional<Path>> slots(raw.size());
  parallel_for(raw.size(), [&](std::size_t i) { slots[i] = prepare_path(raw[i], spec); });
  std::vector<Path> out;
  out.reserve(raw.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double prepared_predict(const KernelModel& model, const Path& prepared) {
  double y = model.target_mean;
  for (std::size_t n = 0; n < model.train_paths.size(); ++n)
    y += model.coeffs[n] * kernel_value(model.train_paths[n], prepared, model.spec);
  return y;
}

}  // namespace

KernelModel fit(std::span<const Path> inputs, std::span<const double> targets,
                const KernelSpec& spec, double lambda) {
  if (inputs.empty()) throw Error(ErrorCode::invalid_argument, "fit needs at least one example");
  if (inputs.size() != targets.size())
    throw Error(ErrorCode::length_mismatch, "inputs and targets differ in length");
  if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_argument, "lambda must be >= 0", "lambda");
  for (double y : targets)
    if (!std::isfinite(y)) throw Error(ErrorCode::non_finite_value, "non-finite target");

  KernelModel model;
  model.spec = spec;
  model.lambda = lambda;
  model.train_paths = prepare_all(inputs, spec);
  const Eigen::MatrixXd G = gram(model.train_paths, spec);
  const auto N = static_cast<Eigen::Index>(inputs.size());

  Eigen::VectorXd y(N);
  double mean = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) mean += targets[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(N);
  for (Eigen::Index i = 0; i < N; ++i) y(i) = targets[static_cast<std::size_t>(i)] - mean;
  model.target_mean = mean;

  const double scale = G.trace() / static_cast<double>(N);
  Eigen::MatrixXd A = G;
  A.diagonal().array() += lambda;
  double jitter = 0.0;
  while (true) {
    Eigen::MatrixXd shifted = A;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd c = llt.solve(y);
      if (c.allFinite()) {
        model.coeffs.assign(c.data(), c.data() + c.size());
        model.jitter = jitter;
        return model;
      }
    }
    if (jitter >= 1e-6 * scale) break;
    jitter = jitter == 0.0 ? 1e-12 * scale : jitter * 10.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  std::ostringstream msg;
  msg << "Gram matrix is not positive definite after jitter up to " << 1e-6 * scale
      << " (eigenvalues in [" << ev.minCoeff() << ", " << ev.maxCoeff() << "], condition ~ "
      << std::abs(ev.maxCoeff() / ev.minCoeff()) << ")";
  throw Error(ErrorCode::ill_conditioned, msg.str(), "lambda");
}

double predict(const KernelModel& model, const Path& x) {
  return prepared_predict(model, prepare_path(x, model.spec));
}

std::vector<double> predict(const KernelModel& model, std::span<const Path> xs) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = predict(model, xs[i]); });
  return out;
}

std::vector<double> training_residuals(const KernelModel& model, std::span<const double> targets) {
  if (targets.size() != model.train_paths.size())
    throw Error(ErrorCode::length_mismatch, "targets differ in length from the training set");
  std::vector<double> out(targets.size());
  parallel_for(targets.size(), [&](std::size_t i) {
    out[i] = targets[i] - prepared_predict(model, model.train_paths[i]);
  });
  return out;
}

void save_model(const KernelModel& model, const std::filesystem::path& file) {
  io::json j;
  j["format"] = "responsekit-model";
  j["version"] = kModelFormatVersion;
  j["spec"] = io::to_json(model.spec);
  j["train_paths"] = io::json::array();
  for (const auto& p : model.train_paths) j["train_paths"].push_back(io::to_json(p));
  j["coeffs"] = model.coeffs;
  j["lambda"] = model.lambda;
  j["target_mean"] = model.target_mean;
  j["jitter"] = model.jitter;
  io::write_file_atomic(file, j.dump(1) + "\n");
}

KernelModel load_model(const std::filesystem::path& file) {
  const std::string text = io::read_file(file);
  io::json j;
  try {
    j = io::json::parse(text);
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::corrupt_file, "model file is not valid JSON: " + std::string(e.what()));
  }
  try {
    if (!j.is_object() || j.value("format", "") != "responsekit-model")
      throw Error(ErrorCode::corrupt_file, "not a responsekit model file", "format");
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorCode::version_mismatch,
                  "model format version " + std::to_string(version) + " is not supported",
                  "version");
    KernelModel m;
    m.spec = io::kernel_spec_from_json(j.at("spec"), "spec");
    for (std::size_t i = 0; i < j.at("train_paths").size(); ++i)
      m.train_paths.push_back(
          io::path_from_json(j["train_paths"][i], "train_paths[" + std::to_string(i) + "]"));
    m.coeffs = j.at("coeffs").get<std::vector<double>>();
    m.lambda = j.at("lambda").get<double>();
    m.target_mean = j.at("target_mean").get<double>();
    m.jitter = j.value("jitter", 0.0);
    if (m.coeffs.size() != m.train_paths.size())
      throw Error(ErrorCode::corrupt_file, "coefficient count differs from training set size",
                  "coeffs");
    return m;
  } catch (const io::json::exception& e) {
    throw Error(ErrorCode::corrupt_file, "malformed model file: " + std::string(e.what()));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::version_mismatch || e.code() == ErrorCode::corrupt_file) throw;
    throw Error(ErrorCode::corrupt_file, std::string("malformed model file: ") + e.what(),
                e.field());
  }
}

}  // namespace responsekit
