#include "responsekit/kernels.hpp"

#include <cmath>
#include <string>

#include "responsekit/error.hpp"
#include "responsekit/parallel.hpp"

namespace responsekit {

void KernelSpec::validate() const {
  basis.validate();
  if (kind == Kind::fock_truncated) {
    if (level < 0 || level > kMaxSignatureLevel)
      throw Error(ErrorCode::invalid_argument, "kernel level out of range", "kernel.level");
    if (refinement < 1)
      throw Error(ErrorCode::invalid_argument, "refinement must be >= 1", "kernel.refinement");
    return;
  }
  if (segment_grid.size() < 2)
    throw Error(ErrorCode::invalid_argument, "piecewise_exp needs at least 2 grid points",
                "kernel.segment_grid");
  for (std::size_t i = 1; i < segment_grid.size(); ++i)
    if (!(segment_grid[i] > segment_grid[i - 1]))
      throw Error(ErrorCode::non_monotone_times, "segment grid must be strictly increasing",
                  "kernel.segment_grid");
}

KernelSpec KernelSpec::piecewise(double t0, double t1, std::size_t segments, int degree) {
  KernelSpec s;
  s.kind = Kind::piecewise_exp;
  s.basis = PolyBasis{PolyBasis::Kind::monomial, degree, t0, t1};
  s.segment_grid = uniform_grid(t0, t1, segments);
  return s;
}

Path prepare_path(const Path& raw, const KernelSpec& spec) {
  spec.validate();
  Path x = spec.kind == KernelSpec::Kind::piecewise_exp
               ? augment_time(resample_linear(raw, spec.segment_grid), spec.basis, 1)
               : augment_time(raw, spec.basis, spec.refinement);
  if (spec.normalize_variation) {
    const double v = one_variation(x);
    if (v > 0.0) x = scale(x, 1.0 / v);
  }
  return x;
}

double fock_inner(const TruncatedSignature& a, const TruncatedSignature& b) {
  if (a.dim() != b.dim() || a.level() != b.level())
    throw Error(ErrorCode::dimension_mismatch, "fock_inner needs signatures of equal shape");
  double total = 0.0;
  double factorial = 1.0;
  for (int n = 0; n <= a.level(); ++n) {
    if (n > 0) factorial *= n;
    auto x = a.level_data(n);
    auto y = b.level_data(n);
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    total += factorial * dot;
  }
  return total;
}

namespace {

void check_on_grid(const Path& x, const KernelSpec& spec, const char* which) {
  const auto& grid = spec.segment_grid;
  bool ok = x.size() == grid.size();
  for (std::size_t i = 0; ok && i < grid.size(); ++i) ok = x.times()[i] == grid[i];
  if (!ok)
    throw Error(ErrorCode::grid_mismatch,
                std::string("path ") + which + " is not sampled on the kernel segment grid");
}

}  // namespace

double sig_kernel_pl(const Path& x, const Path& y, const KernelSpec& spec) {
  check_on_grid(x, spec, "x");
  check_on_grid(y, spec, "y");
  if (x.dim() != y.dim())
    throw Error(ErrorCode::dimension_mismatch, "kernel arguments differ in dimension");
  const std::size_t d = x.dim();
  auto xv = x.flat_values();
  auto yv = y.flat_values();
  double exponent = 0.0;
  for (std::size_t l = 0; l + 1 < x.size(); ++l)
    for (std::size_t k = 0; k < d; ++k)
      exponent += (xv[(l + 1) * d + k] - xv[l * d + k]) * (yv[(l + 1) * d + k] - yv[l * d + k]);
  return std::exp(exponent);
}

double kernel_value(const Path& x, const Path& y, const KernelSpec& spec) {
  if (spec.kind == KernelSpec::Kind::piecewise_exp) return sig_kernel_pl(x, y, spec);
  return fock_inner(signature(x, spec.level), signature(y, spec.level));
}

namespace {

template <typename Entry>
Eigen::MatrixXd assemble(std::size_t rows, std::size_t cols, bool symmetric, Entry&& entry) {
  Eigen::MatrixXd g(rows, cols);
  parallel_for(rows, [&](std::size_t i) {
    for (std::size_t j = symmetric ? i : 0; j < cols; ++j) g(i, j) = entry(i, j);
  });
  if (symmetric)
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  return g;
}

std::vector<TruncatedSignature> signatures_of(std::span<const Path> paths, int level) {
  std::vector<TruncatedSignature> sigs(paths.size());
  parallel_for(paths.size(), [&](std::size_t i) { sigs[i] = signature(paths[i], level); });
  return sigs;
}

}  // namespace

Eigen::MatrixXd gram(std::span<const Path> prepared, const KernelSpec& spec) {
  spec.validate();
  if (prepared.empty()) throw Error(ErrorCode::invalid_argument, "gram needs at least one path");
  const std::size_t n = prepared.size();
  if (spec.kind == KernelSpec::Kind::piecewise_exp)
    return assemble(n, n, true, [&](std::size_t i, std::size_t j) {
      return sig_kernel_pl(prepared[i], prepared[j], spec);
    });
  const auto sigs = signatures_of(prepared, spec.level);
  return assemble(n, n, true,
                  [&](std::size_t i, std::size_t j) { return fock_inner(sigs[i], sigs[j]); });
}

Eigen::MatrixXd cross_gram(std::span<const Path> rows, std::span<const Path> cols,
                           const KernelSpec& spec) {
  spec.validate();
  if (spec.kind == KernelSpec::Kind::piecewise_exp)
    return assemble(rows.size(), cols.size(), false, [&](std::size_t i, std::size_t j) {
      return sig_kernel_pl(rows[i], cols[j], spec);
    });
  const auto rs = signatures_of(rows, spec.level);
  const auto cs = signatures_of(cols, spec.level);
  return assemble(rows.size(), cols.size(), false,
                  [&](std::size_t i, std::size_t j) { return fock_inner(rs[i], cs[j]); });
}

}  // namespace responsekit
