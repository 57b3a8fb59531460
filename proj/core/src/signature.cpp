#include "responsekit/signature.hpp"

#include <cmath>
#include <string>

#include "responsekit/error.hpp"

namespace responsekit {

std::size_t signature_size(std::size_t dim, int level) {
  if (dim == 0) throw Error(ErrorCode::dimension_mismatch, "signature alphabet must be non-empty");
  if (level < 0) throw Error(ErrorCode::invalid_argument, "truncation level must be >= 0");
  std::size_t total = 0;
  std::size_t width = 1;
  for (int n = 0; n <= level; ++n) {
    total += width;
    if (total > kMaxSignatureEntries)
      throw Error(ErrorCode::resource_limit,
                  "signature with dim " + std::to_string(dim) + " and level " +
                      std::to_string(level) + " exceeds the entry cap");
    if (n < level) width *= dim;
  }
  return total;
}

TruncatedSignature::TruncatedSignature(std::size_t dim, int level) : dim_(dim), level_(level) {
  const std::size_t total = signature_size(dim, level);
  offsets_.resize(static_cast<std::size_t>(level) + 2);
  std::size_t width = 1;
  offsets_[0] = 0;
  for (int n = 0; n <= level; ++n) {
    offsets_[n + 1] = offsets_[n] + width;
    width *= dim;
  }
  data_.assign(total, 0.0);
}

TruncatedSignature TruncatedSignature::zero(std::size_t dim, int level) {
  return TruncatedSignature(dim, level);
}

TruncatedSignature TruncatedSignature::unit(std::size_t dim, int level) {
  TruncatedSignature s(dim, level);
  s.data_[0] = 1.0;
  return s;
}

std::size_t word_offset(const Word& w, std::size_t dim) {
  std::size_t off = 0;
  for (int letter : w.letters) {
    if (letter < 1 || static_cast<std::size_t>(letter) > dim)
      throw Error(ErrorCode::out_of_range, "word letter " + std::to_string(letter) +
                                               " outside alphabet {1.." + std::to_string(dim) +
                                               "}");
    off = off * dim + static_cast<std::size_t>(letter - 1);
  }
  return off;
}

double TruncatedSignature::coeff(const Word& w) const {
  if (static_cast<int>(w.length()) > level_)
    throw Error(ErrorCode::out_of_range, "word of length " + std::to_string(w.length()) +
                                             " exceeds truncation level " +
                                             std::to_string(level_));
  return level_data(static_cast<int>(w.length()))[word_offset(w, dim_)];
}

TruncatedSignature tensor_exp(std::span<const double> v, int level) {
  auto out = TruncatedSignature::unit(v.size(), level);
  for (int n = 1; n <= level; ++n) {
    auto prev = out.level_data(n - 1);
    auto cur = out.level_data(n);
    const double inv_n = 1.0 / n;
    // v^{(x)n}/n! = (v^{(x)(n-1)}/(n-1)!) (x) v / n
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (std::size_t k = 0; k < v.size(); ++k) cur[i * v.size() + k] = prev[i] * v[k] * inv_n;
  }
  return out;
}

TruncatedSignature tensor_mul(const TruncatedSignature& a, const TruncatedSignature& b,
                              int level) {
  if (a.dim() != b.dim())
    throw Error(ErrorCode::dimension_mismatch, "tensor product of different alphabets");
  if (level > a.level() || level > b.level())
    throw Error(ErrorCode::out_of_range, "product level exceeds operand truncation");
  auto out = TruncatedSignature::zero(a.dim(), level);
  for (int n = 0; n <= level; ++n) {
    auto dst = out.level_data(n);
    for (int k = 0; k <= n; ++k) {
      auto x = a.level_data(k);
      auto y = b.level_data(n - k);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        double* row = dst.data() + i * y.size();
        for (std::size_t j = 0; j < y.size(); ++j) row[j] += xi * y[j];
      }
    }
  }
  return out;
}

TruncatedSignature tensor_inverse(const TruncatedSignature& a) {
  const double a0 = a.level_data(0)[0];
  if (a0 == 0.0) throw Error(ErrorCode::invalid_argument, "tensor series with zero scalar part");
  // a = a0 (1 + y), a^{-1} = a0^{-1} sum_k (-y)^k, exact after `level` terms.
  auto neg_y = TruncatedSignature::zero(a.dim(), a.level());
  for (int n = 1; n <= a.level(); ++n) {
    auto src = a.level_data(n);
    auto dst = neg_y.level_data(n);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = -src[i] / a0;
  }
  auto result = TruncatedSignature::unit(a.dim(), a.level());
  auto term = TruncatedSignature::unit(a.dim(), a.level());
  for (int k = 1; k <= a.level(); ++k) {
    term = tensor_mul(term, neg_y, a.level());
    for (int n = 0; n <= a.level(); ++n) {
      auto dst = result.level_data(n);
      auto src = term.level_data(n);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
  for (int n = 0; n <= a.level(); ++n)
    for (double& x : result.level_data(n)) x /= a0;
  return result;
}

TruncatedSignature signature(const Path& p, int level, int max_level) {
  if (level > max_level)
    throw Error(ErrorCode::resource_limit, "truncation level " + std::to_string(level) +
                                               " exceeds the cap of " + std::to_string(max_level));
  auto s = TruncatedSignature::unit(p.dim(), level);
  for (std::size_t l = 0; l < p.segments(); ++l) {
    const auto inc = p.increment(l);
    s = tensor_mul(s, tensor_exp(inc, level), level);
  }
  return s;
}

double sig_oracle(const Path& p, const Word& w, int subdiv) {
  if (subdiv < 1) throw Error(ErrorCode::invalid_argument, "subdiv must be at least 1");
  const std::size_t n = w.length();
  if (n == 0) return 1.0;
  std::vector<std::size_t> letters(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int letter = w.letters[k];
    if (letter < 1 || static_cast<std::size_t>(letter) > p.dim())
      throw Error(ErrorCode::out_of_range, "word letter outside path dimension");
    letters[k] = static_cast<std::size_t>(letter - 1);
  }
  // partial[k]: sum over strictly increasing piece indices j1 < ... < jk seen
  // so far of prod dX^{i_1}_{j1} ... dX^{i_k}_{jk}.
  std::vector<double> partial(n + 1, 0.0);
  partial[0] = 1.0;
  std::vector<double> piece(p.dim());
  for (std::size_t l = 0; l < p.segments(); ++l) {
    const auto inc = p.increment(l);
    for (std::size_t k = 0; k < p.dim(); ++k) piece[k] = inc[k] / subdiv;
    for (int q = 0; q < subdiv; ++q)
      for (std::size_t k = n; k >= 1; --k) partial[k] += partial[k - 1] * piece[letters[k - 1]];
  }
  return partial[n];
}

OracleResult sig_oracle_converged(const Path& p, const Word& w, double tol, int initial_subdiv,
                                  int max_subdiv) {
  OracleResult res;
  // table[j][q]: q-fold extrapolation at subdiv initial * 2^j; error of the
  // plain sums is a polynomial in 1/subdiv.
  std::vector<std::vector<double>> table;
  int subdiv = initial_subdiv;
  double previous = 0.0;
  for (std::size_t j = 0; subdiv <= max_subdiv; ++j, subdiv *= 2) {
    std::vector<double> row(j + 1);
    row[0] = sig_oracle(p, w, subdiv);
    for (std::size_t q = 1; q <= j; ++q) {
      const double factor = std::ldexp(1.0, static_cast<int>(q)) - 1.0;
      row[q] = row[q - 1] + (row[q - 1] - table[j - 1][q - 1]) / factor;
    }
    const double current = row[j];
    table.push_back(std::move(row));
    res.value = current;
    res.subdiv = subdiv;
    if (j > 0) {
      res.change = std::abs(current - previous);
      if (res.change < tol) {
        res.converged = true;
        return res;
      }
    }
    previous = current;
  }
  return res;
}

std::vector<Word> words_of_length(std::size_t dim, int n) {
  std::vector<Word> out;
  Word w;
  w.letters.assign(static_cast<std::size_t>(n), 1);
  while (true) {
    out.push_back(w);
    int k = n - 1;
    while (k >= 0 && static_cast<std::size_t>(w.letters[k]) == dim) {
      w.letters[k] = 1;
      --k;
    }
    if (k < 0) break;
    ++w.letters[k];
  }
  return out;
}

}  // namespace responsekit
