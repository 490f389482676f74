#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace apc {

namespace detail {

// One feature's chi-squared statistic as the exact rational
// n*(ad-bc)^2 / (r1*r0*c1*c0). Cell counts are integers, so ranking can be
// exact; floating point would break mathematical ties arbitrarily.
struct Chi2Cells {
  long long a = 0;  // f=1, y=1
  long long b = 0;  // f=1, y=0
  long long c = 0;  // f=0, y=1
  long long d = 0;  // f=0, y=0

  unsigned __int128 numerator() const {
    long long det = a * d - b * c;
    unsigned __int128 det2 =
        static_cast<unsigned __int128>(det < 0 ? -det : det);
    return static_cast<unsigned __int128>(a + b + c + d) * det2 * det2;
  }
  unsigned __int128 denominator() const {
    return static_cast<unsigned __int128>(a + b) * (c + d) * (a + c) *
           (b + d);
  }
  bool degenerate() const {
    return a + b == 0 || c + d == 0 || a + c == 0 || b + d == 0;
  }
};

// Exact comparison of a/b and c/d (b, d > 0) by Euclidean expansion; never
// overflows regardless of magnitude.
inline int compare_fractions(unsigned __int128 a, unsigned __int128 b,
                             unsigned __int128 c, unsigned __int128 d) {
  while (true) {
    unsigned __int128 qa = a / b, qc = c / d;
    if (qa != qc) return qa < qc ? -1 : 1;
    unsigned __int128 ra = a % b, rc = c % d;
    if (ra == 0 && rc == 0) return 0;
    if (ra == 0) return -1;
    if (rc == 0) return 1;
    // ra/b vs rc/d has the opposite order of the reciprocals b/ra vs d/rc,
    // so continue with the fractions swapped.
    unsigned __int128 old_b = b;
    a = d;
    b = rc;
    c = old_b;
    d = ra;
  }
}

inline int compare_chi2(const Chi2Cells& x, const Chi2Cells& y) {
  bool xz = x.degenerate() || x.numerator() == 0;
  bool yz = y.degenerate() || y.numerator() == 0;
  if (xz && yz) return 0;
  if (xz) return -1;
  if (yz) return 1;
  return compare_fractions(x.numerator(), x.denominator(), y.numerator(),
                           y.denominator());
}

inline Chi2Cells tally_feature(const std::vector<std::vector<std::uint8_t>>& rows,
                               const std::vector<std::uint8_t>& labels,
                               int feature) {
  Chi2Cells cells;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][static_cast<std::size_t>(feature)]) {
      (labels[i] ? cells.a : cells.b) += 1;
    } else {
      (labels[i] ? cells.c : cells.d) += 1;
    }
  }
  return cells;
}

}  // namespace detail

// chi-squared statistic of one boolean feature against boolean labels, from
// the 2x2 contingency table without continuity correction. A feature or
// label with a zero marginal carries no signal and scores 0.
inline double chi2_statistic(const std::vector<std::uint8_t>& feature,
                             const std::vector<std::uint8_t>& labels) {
  if (feature.size() != labels.size()) {
    throw std::invalid_argument("feature/label length mismatch");
  }
  detail::Chi2Cells cells;
  for (std::size_t i = 0; i < feature.size(); ++i) {
    if (feature[i]) {
      (labels[i] ? cells.a : cells.b) += 1;
    } else {
      (labels[i] ? cells.c : cells.d) += 1;
    }
  }
  if (cells.degenerate()) return 0.0;
  return static_cast<double>(cells.numerator()) /
         static_cast<double>(cells.denominator());
}

// Indices of the k features with the largest chi-squared statistic against
// the labels; ties resolve to the lower feature index. Ranking is exact.
inline std::vector<int> chi2_select(
    const std::vector<std::vector<std::uint8_t>>& rows,
    const std::vector<std::uint8_t>& labels, int k) {
  if (k <= 0) throw std::invalid_argument("k must be positive");
  if (rows.empty()) throw std::invalid_argument("empty feature matrix");
  const int n_features = static_cast<int>(rows.front().size());
  if (k > n_features) {
    throw std::invalid_argument("k exceeds the feature count");
  }
  if (rows.size() != labels.size()) {
    throw std::invalid_argument("feature/label row mismatch");
  }
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != n_features) {
      throw std::invalid_argument("ragged feature matrix");
    }
  }
  std::vector<detail::Chi2Cells> cells;
  cells.reserve(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) {
    cells.push_back(detail::tally_feature(rows, labels, f));
  }
  std::vector<int> order(static_cast<std::size_t>(n_features));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    int cmp = detail::compare_chi2(cells[static_cast<std::size_t>(x)],
                                   cells[static_cast<std::size_t>(y)]);
    if (cmp != 0) return cmp > 0;
    return x < y;
  });
  order.resize(static_cast<std::size_t>(k));
  return order;
}

}  // namespace apc
