#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "responsekit/paths.hpp"

namespace responsekit {

// Discretised response kernels R^(1..N)(t, s1, ..., sn) on a uniform grid
// t_0 = 0 < ... < t_G. Only causal, ordered tuples s1 <= ... <= sn <= t are
// stored; kernels are symmetric in the s arguments.
//
// Storage for order n: for each time index i, a block of C(i+n, n) entries
// indexed by the colex rank of the sorted index tuple, so the block for i
// starts at C(i+n, n+1).
class VolterraKernels {
 public:
  using KernelFn = std::function<double(int order, double t, std::span<const double> s)>;

  VolterraKernels() = default;
  VolterraKernels(std::vector<double> grid, int orders);

  // Tabulates fn at every stored tuple. fn must be symmetric in s.
  static VolterraKernels tabulate(std::vector<double> grid, int orders, const KernelFn& fn);

  int orders() const noexcept { return static_cast<int>(kernels_.size()); }
  std::span<const double> grid() const noexcept { return grid_; }
  std::size_t grid_size() const noexcept { return grid_.size(); }
  double step() const noexcept { return grid_.size() > 1 ? grid_[1] - grid_[0] : 0.0; }

  // Any order of s indices is accepted; entries with some s > t are zero.
  double at(int order, std::size_t t_index, std::span<const std::size_t> s_indices) const;
  void set(int order, std::size_t t_index, std::span<const std::size_t> sorted_s, double value);

  std::span<const double> raw(int order) const { return kernels_.at(order - 1); }
  std::span<double> raw(int order) { return kernels_.at(order - 1); }

  // Offset of the sorted tuple (s indices, all <= t_index) for order n.
  static std::size_t offset(std::size_t t_index, std::span<const std::size_t> sorted_s);
  static std::size_t block_size(std::size_t t_index, int order);

 private:
  std::vector<double> grid_;
  std::vector<std::vector<double>> kernels_;
};

// Trapezoid weights of the grid points 0..t_index on [0, t_index].
std::vector<double> trapezoid_weights(std::size_t t_index, double h);

// Truncated Volterra series at grid time t_index:
//   sum_n int_{[0,t]^n} R^(n)(t, s) gamma(s1)...gamma(sn) ds,
// product-trapezoid on the cube, evaluated over the ordered simplex with the
// multinomial multiplicity of each tuple. gamma is scalar and must cover the
// grid up to t.
double volterra_eval(const VolterraKernels& k, const Path& gamma, std::size_t t_index);
double volterra_eval(const VolterraKernels& k, std::span<const double> gamma_on_grid,
                     std::size_t t_index);

// volterra_eval at every grid time, returned as a scalar path on the grid.
Path volterra_series_path(const VolterraKernels& k, const Path& gamma);

// Kernels of (F o G)_t[gamma] = F_t[G_.[gamma]], truncated at order N + M.
// Order r collects, for every k and every composition i1 + ... + ik = r,
//   int_{[0,t]^k} R_f^(k)(t, s) prod_j R_g^(i_j)(s_j, block_j) ds
// symmetrised over the r arguments. The inner s-integrals use trapezoid
// weights on each block's natural domain [max block_j, t], so discrete
// composed evaluation reproduces discrete nested evaluation.
VolterraKernels compose_kernels(const VolterraKernels& f, const VolterraKernels& g);

// Compositions of r into k positive parts, in lexicographic order.
std::vector<std::vector<int>> compositions(int r, int k);

}  // namespace responsekit
