#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace hsf {

/// Maximum base dimension supported by the dense exterior algebra.
inline constexpr int kMaxDim = 8;

constexpr long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  long num = 1, den = 1;
  for (int i = 0; i < k; ++i) {
    num *= (n - i);
    den *= (i + 1);
  }
  return num / den;
}

/// Sign of the permutation sorting `idx` in place; 0 if a repeated entry.
/// Insertion sort keeps this exact for the short tuples (k <= 8) we use.
inline int sort_sign(int* idx, int k) {
  int sign = 1;
  for (int i = 1; i < k; ++i) {
    int v = idx[i];
    int j = i - 1;
    while (j >= 0 && idx[j] > v) {
      idx[j + 1] = idx[j];
      --j;
      sign = -sign;
    }
    idx[j + 1] = v;
  }
  for (int i = 0; i + 1 < k; ++i)
    if (idx[i] == idx[i + 1]) return 0;
  return sign;
}

/// Lexicographic tables for the strictly-increasing k-subsets of {0,..,n-1}.
/// subsets(n,k) enumerates them in lexicographic order; rank() inverts.
class SubsetTable {
 public:
  /// Table for increasing k-subsets of an n-element ground set.
  static const SubsetTable& get(int n, int k);

  long count() const { return static_cast<long>(subsets_.size()); }

  /// The r-th increasing subset (entries sorted ascending, length k).
  const int* subset(long r) const { return subsets_[r].data(); }

  /// Rank of a sorted increasing subset.
  long rank(const int* idx) const {
    long r = 0;
    int prev = -1;
    for (int i = 0; i < k_; ++i) {
      for (int v = prev + 1; v < idx[i]; ++v)
        r += binomial(n_ - 1 - v, k_ - 1 - i);
      prev = idx[i];
    }
    return r;
  }

  int n() const { return n_; }
  int k() const { return k_; }

 private:
  SubsetTable(int n, int k) : n_(n), k_(k) {
    std::vector<int> cur(k);
    enumerate(cur, 0, 0);
  }

  void enumerate(std::vector<int>& cur, int pos, int start) {
    if (pos == k_) {
      std::array<int, kMaxDim> a{};
      for (int i = 0; i < k_; ++i) a[i] = cur[i];
      subsets_.push_back(a);
      return;
    }
    for (int v = start; v < n_; ++v) {
      cur[pos] = v;
      enumerate(cur, pos + 1, v + 1);
    }
  }

  int n_, k_;
  std::vector<std::array<int, kMaxDim>> subsets_;
};

inline const SubsetTable& SubsetTable::get(int n, int k) {
  static std::vector<SubsetTable> cache = [] {
    std::vector<SubsetTable> all;
    for (int nn = 0; nn <= kMaxDim; ++nn)
      for (int kk = 0; kk <= kMaxDim; ++kk)
        all.push_back(SubsetTable(nn, kk <= nn ? kk : 0));
    return all;
  }();
  return cache[static_cast<size_t>(n) * (kMaxDim + 1) + static_cast<size_t>(k <= n ? k : 0)];
}

}  // namespace hsf
