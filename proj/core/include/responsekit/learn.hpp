#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "responsekit/kernels.hpp"
#include "responsekit/paths.hpp"

namespace responsekit {

inline constexpr int kModelFormatVersion = 1;

// Representer-form predictor: target_mean + sum_n coeffs[n] K(train_n, x).
struct KernelModel {
  KernelSpec spec;
  std::vector<Path> train_paths;  // prepared (augmented/resampled)
  std::vector<double> coeffs;
  double lambda = 0.0;
  double target_mean = 0.0;
  double jitter = 0.0;  // diagonal shift actually added by the solver
};

// Square loss + ridge: solves (G + lambda I) c = y - mean(y) by Cholesky,
// escalating a diagonal jitter from 1e-12 to 1e-6 times trace(G)/N on
// failure. Throws ill_conditioned when the ladder is exhausted.
KernelModel fit(std::span<const Path> inputs, std::span<const double> targets,
                const KernelSpec& spec, double lambda);

// Prepares the raw path internally.
double predict(const KernelModel& model, const Path& x);
std::vector<double> predict(const KernelModel& model, std::span<const Path> xs);

// Residuals y_n - predict(train_n) for the stored training set, given the
// original targets.
std::vector<double> training_residuals(const KernelModel& model, std::span<const double> targets);

void save_model(const KernelModel& model, const std::filesystem::path& file);
KernelModel load_model(const std::filesystem::path& file);

}  // namespace responsekit
