#pragma once

#include "scalar.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace crcartan {

using QVector = std::vector<GaussQ>;
// Row-major matrix over Q(i).
using QMatrix = std::vector<QVector>;

inline QMatrix zero_matrix(std::size_t rows, std::size_t cols) { return QMatrix(rows, QVector(cols)); }

inline QMatrix identity_matrix(std::size_t n) {
  QMatrix m = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = GaussQ(1);
  return m;
}

// Brings m to reduced row echelon form and returns the pivot columns.
inline std::vector<std::size_t> row_reduce(QMatrix& m) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    GaussQ inv = m[r][c].inverse();
    for (std::size_t k = c; k < cols; ++k) m[r][k] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      GaussQ f = m[i][c];
      for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(QMatrix m) { return row_reduce(m).size(); }

// Basis of {x : m x = 0}.
inline std::vector<QVector> nullspace(QMatrix m, std::size_t cols) {
  auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  std::vector<QVector> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    QVector x(cols);
    x[f] = GaussQ(1);
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = -m[r][f];
    basis.push_back(std::move(x));
  }
  return basis;
}

// One solution of a x = b (free variables zero), or nullopt if inconsistent.
inline std::optional<QVector> solve(const QMatrix& a, const QVector& b) {
  QMatrix aug = a;
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  auto pivots = row_reduce(aug);
  if (!pivots.empty() && pivots.back() == cols) return std::nullopt;
  QVector x(cols);
  for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols];
  return x;
}

inline QVector multiply(const QMatrix& a, const QVector& x) {
  QVector y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!a[i][j].is_zero() && !x[j].is_zero()) y[i] += a[i][j] * x[j];
  return y;
}

inline QMatrix multiply(const QMatrix& a, const QMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
  QMatrix c = zero_matrix(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
    }
  return c;
}

inline GaussQ trace(const QMatrix& a) {
  GaussQ t;
  for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
  return t;
}

inline bool is_zero(const QVector& x) {
  for (const auto& c : x)
    if (!c.is_zero()) return false;
  return true;
}

}  // namespace crcartan
