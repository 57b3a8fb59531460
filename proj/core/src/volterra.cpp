#include "responsekit/volterra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "responsekit/error.hpp"
#include "responsekit/parallel.hpp"

namespace responsekit {

namespace {

constexpr std::size_t kMaxKernelEntries = std::size_t{1} << 27;

std::size_t binom(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Colex rank of a sorted multiset; independent of the upper bound.
std::size_t colex_rank(std::span<const std::size_t> sorted) {
  std::size_t r = 0;
  for (std::size_t k = 0; k < sorted.size(); ++k) r += binom(sorted[k] + k, k + 1);
  return r;
}

// Advances a sorted tuple with entries <= bound to its colex successor.
bool next_colex(std::vector<std::size_t>& s, std::size_t bound) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    const bool can = k + 1 < s.size() ? s[k] < s[k + 1] : s[k] < bound;
    if (can) {
      ++s[k];
      std::fill(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k), 0);
      return true;
    }
  }
  return false;
}

double multiplicity(std::span<const std::size_t> sorted) {
  double m = 1.0;
  std::size_t run = 1;
  for (std::size_t k = 1; k <= sorted.size(); ++k) {
    m *= static_cast<double>(k);
    if (k < sorted.size() && sorted[k] == sorted[k - 1]) {
      ++run;
      m /= static_cast<double>(run);
    } else {
      run = 1;
    }
  }
  return m;
}

void check_grid(const std::vector<double>& grid) {
  if (grid.size() < 2)
    throw Error(ErrorCode::grid_mismatch, "kernel grid needs at least 2 points", "grid");
  const double h = grid[1] - grid[0];
  if (!(h > 0.0)) throw Error(ErrorCode::non_monotone_times, "kernel grid must increase", "grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(grid[i])))
      throw Error(ErrorCode::grid_mismatch, "kernel grid must be uniform", "grid");
}

}  // namespace

VolterraKernels::VolterraKernels(std::vector<double> grid, int orders) : grid_(std::move(grid)) {
  check_grid(grid_);
  if (orders < 1) throw Error(ErrorCode::invalid_argument, "need at least one kernel order", "orders");
  std::size_t total = 0;
  for (int n = 1; n <= orders; ++n) {
    const std::size_t size = binom(grid_.size() + static_cast<std::size_t>(n) - 1,
                                   static_cast<std::size_t>(n) + 1) +
                             block_size(grid_.size() - 1, n);
    total += size;
    if (total > kMaxKernelEntries)
      throw Error(ErrorCode::resource_limit,
                  "kernel storage for order " + std::to_string(n) + " exceeds the entry cap",
                  "orders");
    kernels_.emplace_back(size, 0.0);
  }
}

std::size_t VolterraKernels::block_size(std::size_t t_index, int order) {
  return binom(t_index + static_cast<std::size_t>(order), static_cast<std::size_t>(order));
}

std::size_t VolterraKernels::offset(std::size_t t_index, std::span<const std::size_t> sorted_s) {
  const std::size_t n = sorted_s.size();
  return binom(t_index + n, n + 1) + colex_rank(sorted_s);
}

VolterraKernels VolterraKernels::tabulate(std::vector<double> grid, int orders,
                                          const KernelFn& fn) {
  VolterraKernels k(std::move(grid), orders);
  const std::size_t G = k.grid_size();
  for (int n = 1; n <= orders; ++n) {
    auto data = k.raw(n);
    parallel_for(G, [&](std::size_t t) {
      std::vector<std::size_t> s(static_cast<std::size_t>(n), 0);
      std::vector<double> times(s.size());
      std::size_t pos = offset(t, s);
      do {
        for (std::size_t j = 0; j < s.size(); ++j) times[j] = k.grid_[s[j]];
        const double v = fn(n, k.grid_[t], times);
        if (!std::isfinite(v))
          throw Error(ErrorCode::non_finite_value, "kernel function returned a non-finite value");
        data[pos++] = v;
      } while (next_colex(s, t));
    });
  }
  return k;
}

double VolterraKernels::at(int order, std::size_t t_index,
                           std::span<const std::size_t> s_indices) const {
  if (order < 1 || order > orders())
    throw Error(ErrorCode::out_of_range, "kernel order out of range", "order");
  if (s_indices.size() != static_cast<std::size_t>(order))
    throw Error(ErrorCode::dimension_mismatch, "kernel argument count differs from order");
  if (t_index >= grid_.size()) throw Error(ErrorCode::out_of_range, "time index off the grid");
  std::vector<std::size_t> s(s_indices.begin(), s_indices.end());
  std::sort(s.begin(), s.end());
  if (s.back() > t_index) return 0.0;
  return kernels_[static_cast<std::size_t>(order - 1)][offset(t_index, s)];
}

void VolterraKernels::set(int order, std::size_t t_index, std::span<const std::size_t> sorted_s,
                          double value) {
  if (order < 1 || order > orders())
    throw Error(ErrorCode::out_of_range, "kernel order out of range", "order");
  if (sorted_s.size() != static_cast<std::size_t>(order))
    throw Error(ErrorCode::dimension_mismatch, "kernel argument count differs from order");
  if (t_index >= grid_.size()) throw Error(ErrorCode::out_of_range, "time index off the grid");
  if (!std::is_sorted(sorted_s.begin(), sorted_s.end()) || sorted_s.back() > t_index)
    throw Error(ErrorCode::out_of_range, "kernel arguments must be sorted and causal");
  kernels_[static_cast<std::size_t>(order - 1)][offset(t_index, sorted_s)] = value;
}

std::vector<double> trapezoid_weights(std::size_t t_index, double h) {
  std::vector<double> w(t_index + 1, h);
  if (t_index == 0) {
    w[0] = 0.0;
    return w;
  }
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

double volterra_eval(const VolterraKernels& k, std::span<const double> gamma,
                     std::size_t t_index) {
  if (t_index >= k.grid_size())
    throw Error(ErrorCode::grid_mismatch, "evaluation time is not on the kernel grid", "t");
  if (gamma.size() < t_index + 1)
    throw Error(ErrorCode::grid_mismatch, "input does not cover the grid up to t", "gamma");
  const auto w = trapezoid_weights(t_index, k.step());
  std::vector<double> wg(t_index + 1);
  for (std::size_t i = 0; i <= t_index; ++i) wg[i] = w[i] * gamma[i];

  double total = 0.0;
  for (int n = 1; n <= k.orders(); ++n) {
    const auto data = k.raw(n);
    std::vector<std::size_t> s(static_cast<std::size_t>(n), 0);
    std::size_t pos = VolterraKernels::offset(t_index, s);
    double sum = 0.0;
    do {
      double prod = data[pos++];
      for (std::size_t j : s) prod *= wg[j];
      if (prod != 0.0) sum += multiplicity(s) * prod;
    } while (next_colex(s, t_index));
    total += sum;
  }
  return total;
}

namespace {

std::vector<double> sample_on_grid(const VolterraKernels& k, const Path& gamma,
                                   std::size_t t_index) {
  if (gamma.dim() != 1)
    throw Error(ErrorCode::dimension_mismatch, "Volterra input must be scalar", "gamma");
  const auto grid = k.grid();
  if (gamma.t0() > grid[0] + 1e-12 || gamma.t_end() < grid[t_index] - 1e-12)
    throw Error(ErrorCode::grid_mismatch, "input path does not cover the kernel grid", "gamma");
  std::vector<double> v(t_index + 1);
  for (std::size_t i = 0; i <= t_index; ++i)
    v[i] = gamma.at(std::clamp(grid[i], gamma.t0(), gamma.t_end()))[0];
  return v;
}

}  // namespace

double volterra_eval(const VolterraKernels& k, const Path& gamma, std::size_t t_index) {
  if (t_index >= k.grid_size())
    throw Error(ErrorCode::grid_mismatch, "evaluation time is not on the kernel grid", "t");
  return volterra_eval(k, sample_on_grid(k, gamma, t_index), t_index);
}

Path volterra_series_path(const VolterraKernels& k, const Path& gamma) {
  const std::size_t G = k.grid_size();
  const auto g = sample_on_grid(k, gamma, G - 1);
  std::vector<double> out(G);
  parallel_for(G, [&](std::size_t t) { out[t] = volterra_eval(k, g, t); });
  return Path::make(std::vector<double>(k.grid().begin(), k.grid().end()), std::move(out), 1);
}

std::vector<std::vector<int>> compositions(int r, int k) {
  std::vector<std::vector<int>> out;
  if (k < 1 || r < k) return out;
  std::vector<int> parts(static_cast<std::size_t>(k), 1);
  parts.back() = r - k + 1;
  while (true) {
    out.push_back(parts);
    // Rightmost non-final part whose tail can spare one unit grows by one;
    // the tail restarts at (1, ..., 1, rest).
    int tail = parts.back();
    int j = k - 2;
    while (j >= 0 && tail == k - 1 - j) {
      tail += parts[static_cast<std::size_t>(j)];
      --j;
    }
    if (j < 0) break;
    ++parts[static_cast<std::size_t>(j)];
    --tail;
    for (int i = j + 1; i < k - 1; ++i) {
      parts[static_cast<std::size_t>(i)] = 1;
      --tail;
    }
    parts.back() = tail;
  }
  return out;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// All sorted i-tuples with entries <= bound, in colex order.
std::vector<std::vector<std::size_t>> sorted_tuples(std::size_t bound, int i) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> s(static_cast<std::size_t>(i), 0);
  do out.push_back(s);
  while (next_colex(s, bound));
  return out;
}

// G[s, b] = R_g(s, b) prod_{tau in b} [tau <= s] w_s(tau) / w_T(tau).
Eigen::MatrixXd inner_factor(const VolterraKernels& g, int order, std::size_t T,
                             const std::vector<std::vector<std::size_t>>& blocks) {
  const double h = g.step();
  const std::size_t n = T + 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(blocks.size()));
  const auto wT = trapezoid_weights(T, h);
  const auto data = g.raw(order);
  for (std::size_t s = 1; s < n; ++s) {
    const auto ws = trapezoid_weights(s, h);
    const std::size_t base = VolterraKernels::offset(s, std::vector<std::size_t>(blocks[0].size(), 0));
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& tuple = blocks[b];
      if (tuple.back() > s) break;  // colex order: later tuples have larger maxima
      double ratio = 1.0;
      for (std::size_t tau : tuple) ratio *= ws[tau] / wT[tau];
      A(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(b)) = data[base + b] * ratio;
    }
  }
  return A;
}

}  // namespace

VolterraKernels compose_kernels(const VolterraKernels& f, const VolterraKernels& g) {
  if (f.grid_size() != g.grid_size() ||
      !std::equal(f.grid().begin(), f.grid().end(), g.grid().begin()))
    throw Error(ErrorCode::grid_mismatch, "composed kernel sets must share a grid");
  const int N = f.orders();
  const int M = g.orders();
  const int R = N + M;
  const std::size_t G = f.grid_size();
  VolterraKernels out(std::vector<double>(f.grid().begin(), f.grid().end()), R);

  // Output blocks at distinct t are disjoint; parallel over output times.
  parallel_for(G, [&](std::size_t T) {
    if (T == 0) return;
    const std::size_t n = T + 1;
    const auto wT = trapezoid_weights(T, f.step());

    std::vector<std::vector<std::vector<std::size_t>>> blocks(static_cast<std::size_t>(M) + 1);
    std::vector<Eigen::MatrixXd> inner(static_cast<std::size_t>(M) + 1);
    for (int i = 1; i <= M; ++i) {
      blocks[static_cast<std::size_t>(i)] = sorted_tuples(T, i);
      inner[static_cast<std::size_t>(i)] = inner_factor(g, i, T, blocks[static_cast<std::size_t>(i)]);
    }

    // Outer kernels as full tensors over [0, T]^k with the outer weights folded in.
    std::vector<std::vector<double>> outer(static_cast<std::size_t>(N) + 1);
    for (int k = 1; k <= N; ++k) {
      std::size_t size = 1;
      for (int j = 0; j < k; ++j) {
        size *= n;
        if (size > kMaxKernelEntries)
          throw Error(ErrorCode::resource_limit, "outer kernel tensor exceeds the entry cap");
      }
      auto& X = outer[static_cast<std::size_t>(k)];
      X.resize(size);
      std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
      for (std::size_t flat = 0; flat < size; ++flat) {
        std::size_t rem = flat;
        double w = 1.0;
        for (std::size_t j = idx.size(); j-- > 0;) {
          idx[j] = rem % n;
          rem /= n;
          w *= wT[idx[j]];
        }
        X[flat] = w == 0.0 ? 0.0 : w * f.at(k, T, idx);
      }
    }

    for (int r = 1; r <= R; ++r) {
      struct Term {
        std::vector<int> parts;
        std::vector<std::size_t> stride;
        std::vector<double> values;
      };
      std::vector<Term> terms;
      for (int k = 1; k <= std::min(r, N); ++k) {
        for (auto& parts : compositions(r, k)) {
          if (*std::max_element(parts.begin(), parts.end()) > M) continue;
          std::vector<std::size_t> dims(static_cast<std::size_t>(k), n);
          std::vector<double> X = outer[static_cast<std::size_t>(k)];
          for (std::size_t j = static_cast<std::size_t>(k); j-- > 0;) {
            const auto& A = inner[static_cast<std::size_t>(parts[j])];
            std::size_t P = 1, Q = 1;
            for (std::size_t q = 0; q < j; ++q) P *= dims[q];
            for (std::size_t q = j + 1; q < dims.size(); ++q) Q *= dims[q];
            const auto c = static_cast<std::size_t>(A.cols());
            std::vector<double> Y(P * c * Q);
            if (Q == 1) {
              Eigen::Map<const RowMajor> x(X.data(), static_cast<Eigen::Index>(P),
                                           static_cast<Eigen::Index>(n));
              Eigen::Map<RowMajor> y(Y.data(), static_cast<Eigen::Index>(P),
                                     static_cast<Eigen::Index>(c));
              y.noalias() = x * A;
            } else {
              for (std::size_t p = 0; p < P; ++p) {
                Eigen::Map<const RowMajor> x(X.data() + p * n * Q, static_cast<Eigen::Index>(n),
                                             static_cast<Eigen::Index>(Q));
                Eigen::Map<RowMajor> y(Y.data() + p * c * Q, static_cast<Eigen::Index>(c),
                                       static_cast<Eigen::Index>(Q));
                y.noalias() = A.transpose() * x;
              }
            }
            dims[j] = c;
            X = std::move(Y);
          }
          Term term;
          term.stride.assign(dims.size(), 1);
          for (std::size_t j = dims.size() - 1; j-- > 0;)
            term.stride[j] = term.stride[j + 1] * dims[j + 1];
          term.parts = std::move(parts);
          term.values = std::move(X);
          terms.push_back(std::move(term));
        }
      }
      if (terms.empty()) continue;

      // Symmetrise: average over the distinct orderings of each output tuple.
      auto data = out.raw(r);
      std::vector<std::size_t> tau(static_cast<std::size_t>(r), 0);
      std::size_t pos = VolterraKernels::offset(T, tau);
      std::vector<std::size_t> seq, piece;
      do {
        seq = tau;
        double sum = 0.0;
        std::size_t count = 0;
        do {
          for (const auto& term : terms) {
            std::size_t flat = 0, start = 0;
            for (std::size_t j = 0; j < term.parts.size(); ++j) {
              const auto len = static_cast<std::size_t>(term.parts[j]);
              piece.assign(seq.begin() + static_cast<std::ptrdiff_t>(start),
                           seq.begin() + static_cast<std::ptrdiff_t>(start + len));
              std::sort(piece.begin(), piece.end());
              flat += colex_rank(piece) * term.stride[j];
              start += len;
            }
            sum += term.values[flat];
          }
          ++count;
        } while (std::next_permutation(seq.begin(), seq.end()));
        data[pos++] = sum / static_cast<double>(count);
      } while (next_colex(tau, T));
    }
  });
  return out;
}

}  // namespace responsekit
