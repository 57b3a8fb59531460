#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "responsekit/paths.hpp"

namespace responsekit {

// Default level cap for signature(); every tensor series is also bounded by
// the total number of stored entries.
inline constexpr int kMaxSignatureLevel = 12;
inline constexpr std::size_t kMaxSignatureEntries = std::size_t{1} << 24;

// Word e_{i1} (x) ... (x) e_{in}; letters are 1-based, as in (1,2).
struct Word {
  std::vector<int> letters;

  std::size_t length() const noexcept { return letters.size(); }
};

// Truncated tensor series (levels 0..M) over an alphabet of size d. Level n
// is a dense array of d^n entries; word (i1..in) sits at
// sum_k (i_k - 1) * d^(n-k).
class TruncatedSignature {
 public:
  TruncatedSignature() = default;

  static TruncatedSignature zero(std::size_t dim, int level);
  static TruncatedSignature unit(std::size_t dim, int level);

  std::size_t dim() const noexcept { return dim_; }
  int level() const noexcept { return level_; }

  std::span<const double> level_data(int n) const noexcept {
    return {data_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]};
  }
  std::span<double> level_data(int n) noexcept {
    return {data_.data() + offsets_[n], offsets_[n + 1] - offsets_[n]};
  }
  std::span<const double> flat() const noexcept { return data_; }

  // Dual pairing with a basis word. Throws if the word is longer than the
  // truncation level or a letter is out of range.
  double coeff(const Word& w) const;

 private:
  TruncatedSignature(std::size_t dim, int level);

  std::size_t dim_ = 0;
  int level_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

// Number of entries stored for levels 0..level; throws resource_limit when
// above the entry cap.
std::size_t signature_size(std::size_t dim, int level);

// Row-major offset of a word inside its level.
std::size_t word_offset(const Word& w, std::size_t dim);

// Signature of a piecewise-linear path: Chen product of segment exponentials.
// Throws resource_limit when level exceeds max_level.
TruncatedSignature signature(const Path& p, int level, int max_level = kMaxSignatureLevel);

// exp(v) truncated at level: level n equals v^{(x)n} / n!.
TruncatedSignature tensor_exp(std::span<const double> v, int level);

// Truncated tensor-algebra product, truncated at `level`.
TruncatedSignature tensor_mul(const TruncatedSignature& a, const TruncatedSignature& b, int level);

// Multiplicative inverse; requires a non-zero level-0 entry.
TruncatedSignature tensor_inverse(const TruncatedSignature& a);

// Left-endpoint discrete iterated sum over strictly ordered subinterval
// indices. Every path segment is split into `subdiv` equal subintervals, so
// breakpoints always sit on the partition.
double sig_oracle(const Path& p, const Word& w, int subdiv);

struct OracleResult {
  double value = 0.0;
  int subdiv = 0;     // finest subdivision used
  double change = 0;  // last successive difference of extrapolated values
  bool converged = false;
};

// Doubles subdiv starting at `initial_subdiv`, extrapolating the sequence
// Richardson-style, until successive extrapolated values differ by < tol.
OracleResult sig_oracle_converged(const Path& p, const Word& w, double tol = 1e-7,
                                  int initial_subdiv = 4, int max_subdiv = 1 << 14);

// All words of length n over {1..dim}, in row-major order.
std::vector<Word> words_of_length(std::size_t dim, int n);

}  // namespace responsekit
