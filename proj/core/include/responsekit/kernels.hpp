#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "responsekit/paths.hpp"
#include "responsekit/signature.hpp"

namespace responsekit {

struct KernelSpec {
  enum class Kind { fock_truncated, piecewise_exp };

  Kind kind = Kind::piecewise_exp;
  int level = 4;                      // truncation level, fock_truncated only
  PolyBasis basis{PolyBasis::Kind::monomial, 3, 0.0, 1.0};
  std::vector<double> segment_grid;   // L+1 shared timestamps, piecewise_exp only
  int refinement = 4;                 // augment_time refinement, fock_truncated only
  bool normalize_variation = false;   // rescale augmented paths by 1/one_variation

  void validate() const;

  // Default learner spec: piecewise_exp, monomial degree 3, L segments on
  // [t0, t1].
  static KernelSpec piecewise(double t0, double t1, std::size_t segments, int degree = 3);
};

// Maps a raw input path to the representation the kernel consumes:
// the time-augmented path, resampled to the segment grid for piecewise_exp.
Path prepare_path(const Path& raw, const KernelSpec& spec);

// sum_n n! <a_n, b_n>.
double fock_inner(const TruncatedSignature& a, const TruncatedSignature& b);

// prod_l exp(<dx_l, dy_l>) over the shared segment grid. Inputs must be
// prepared paths; throws grid_mismatch otherwise.
double sig_kernel_pl(const Path& x, const Path& y, const KernelSpec& spec);

// Kernel of either kind on prepared paths.
double kernel_value(const Path& x, const Path& y, const KernelSpec& spec);

// Gram matrix over prepared paths.
Eigen::MatrixXd gram(std::span<const Path> prepared, const KernelSpec& spec);

// Cross kernel matrix K(rows_i, cols_j) over prepared paths.
Eigen::MatrixXd cross_gram(std::span<const Path> rows, std::span<const Path> cols,
                           const KernelSpec& spec);

}  // namespace responsekit
