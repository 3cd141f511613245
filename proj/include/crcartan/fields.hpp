#pragma once

#include "expr.hpp"
#include "sampling.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crcartan {

struct SingularFrame : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// First-order derivation sum_x coeff[x] d/dx.
class VectorField {
 public:
  VectorField() { coeff_.fill(zero()); }

  static VectorField partial(VarId x) {
    VectorField f;
    f.coeff_[x.index()] = one();
    return f;
  }

  const Expr& operator[](VarId x) const { return coeff_[x.index()]; }
  VectorField& set(VarId x, Expr e) {
    coeff_[x.index()] = std::move(e);
    return *this;
  }

  bool is_zero() const {
    for (const auto& c : coeff_)
      if (!c->is_zero()) return false;
    return true;
  }

  Expr apply(const Expr& e) const {
    std::vector<Expr> terms;
    for (std::size_t i = 0; i < kVarCount; ++i) {
      VarId x(static_cast<std::uint8_t>(i));
      if (coeff_[i]->is_zero() || !e->depends_on(x)) continue;
      terms.push_back(coeff_[i] * differentiate(e, x));
    }
    return add(terms);
  }

  // Coefficients conjugated and attached to partner variables.
  VectorField conjugate() const {
    VectorField out;
    for (std::size_t i = 0; i < kVarCount; ++i) {
      VarId x(static_cast<std::uint8_t>(i));
      out.coeff_[x.partner().index()] = crcartan::conjugate(coeff_[i]);
    }
    return out;
  }

  friend VectorField operator+(const VectorField& a, const VectorField& b) {
    VectorField out;
    for (std::size_t i = 0; i < kVarCount; ++i) out.coeff_[i] = a.coeff_[i] + b.coeff_[i];
    return out;
  }
  friend VectorField operator-(const VectorField& a, const VectorField& b) {
    VectorField out;
    for (std::size_t i = 0; i < kVarCount; ++i) out.coeff_[i] = a.coeff_[i] - b.coeff_[i];
    return out;
  }
  friend VectorField operator*(const Expr& s, const VectorField& a) {
    VectorField out;
    for (std::size_t i = 0; i < kVarCount; ++i) out.coeff_[i] = s * a.coeff_[i];
    return out;
  }

 private:
  std::array<Expr, kVarCount> coeff_;
};

inline Expr apply(const VectorField& X, const Expr& e) { return X.apply(e); }

// [X,Y]^x = X(Y^x) - Y(X^x).
inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  VectorField out;
  for (std::size_t i = 0; i < kVarCount; ++i) {
    VarId x(static_cast<std::uint8_t>(i));
    out.set(x, X.apply(Y[x]) - Y.apply(X[x]));
  }
  return out;
}

// A 1-form is stored by its coefficients on the coordinate differentials.
using OneForm = VectorField;

inline Expr pair(const OneForm& w, const VectorField& V) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < kVarCount; ++i) {
    VarId x(static_cast<std::uint8_t>(i));
    if (!w[x]->is_zero() && !V[x]->is_zero()) terms.push_back(w[x] * V[x]);
  }
  return add(terms);
}

// Frame (T, L1, K, L1bar, Kbar) over the coordinates (z1, z2, zb1, zb2, v).
using Frame = std::array<VectorField, 5>;
// Coframe (rho, kappa, zeta, kappabar, zetabar) dual to a Frame.
using Coframe = std::array<OneForm, 5>;

inline constexpr std::array<VarId, 5> kSurfaceCoords{var::z1, var::z2, var::zb1, var::zb2, var::v};

// ---------------------------------------------------------------------------
// Two-form tables
// ---------------------------------------------------------------------------

// Wedge pairs in the order rk, rz, rkb, rzb, kz, kkb, kzb, zkb, zzb, kbzb
// over frame/coframe indices 0..4.
inline constexpr std::array<std::pair<int, int>, 10> kWedgePairs{{
    {0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};

inline constexpr std::array<const char*, 10> kWedgeNames{
    "rho^kappa", "rho^zeta", "rho^kappabar", "rho^zetabar", "kappa^zeta",
    "kappa^kappabar", "kappa^zetabar", "zeta^kappabar", "zeta^zetabar", "kappabar^zetabar"};

inline constexpr int wedge_index(int a, int b) {
  for (int i = 0; i < 10; ++i)
    if (kWedgePairs[i].first == a && kWedgePairs[i].second == b) return i;
  return -1;
}

// Coefficients C_ab of d(omega) = sum_{a<b} C_ab omega^a ^ omega^b.
using TwoFormTable = std::array<Expr, 10>;

inline TwoFormTable zero_table() {
  TwoFormTable t;
  t.fill(zero());
  return t;
}

// Table of d(conj omega) from the table of d(omega): conjugation swaps
// kappa <-> kappabar and zeta <-> zetabar and fixes rho.
inline TwoFormTable conjugate_table(const TwoFormTable& t) {
  constexpr std::array<int, 5> sigma{0, 3, 4, 1, 2};
  TwoFormTable out = zero_table();
  for (int i = 0; i < 10; ++i) {
    int a = sigma[kWedgePairs[i].first], b = sigma[kWedgePairs[i].second];
    Expr c = conjugate(t[i]);
    if (a < b)
      out[wedge_index(a, b)] = c;
    else
      out[wedge_index(b, a)] = neg(c);
  }
  return out;
}

// d(omega^i)(f_a, f_b) = -omega^i([f_a, f_b]) since omega^i(f_j) is constant.
inline std::array<TwoFormTable, 5> dcoframe_coeffs(const Frame& f, const Coframe& w) {
  std::array<TwoFormTable, 5> out;
  for (int p = 0; p < 10; ++p) {
    auto [a, b] = kWedgePairs[p];
    VectorField br = lie_bracket(f[a], f[b]);
    for (int i = 0; i < 5; ++i) out[i][p] = neg(pair(w[i], br));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frame expansion by exact symbolic elimination
// ---------------------------------------------------------------------------

// Solves V = sum a_i f_i over the given coordinates. Pivots are chosen among
// constant entries first; symbolic pivots must be nonzero at the probe point.
class FrameSolver {
 public:
  FrameSolver(const std::array<VectorField, 5>& frame, std::array<VarId, 5> coords, Point probe)
      : frame_(frame), coords_(coords), probe_(std::move(probe)) {}

  std::array<Expr, 5> solve(const VectorField& V) const {
    // Augmented matrix rows = coordinates, columns = frame fields.
    std::array<std::array<Expr, 6>, 5> m;
    for (int r = 0; r < 5; ++r) {
      for (int c = 0; c < 5; ++c) m[r][c] = frame_[c][coords_[r]];
      m[r][5] = V[coords_[r]];
    }
    std::array<int, 5> pivot_row{};
    std::array<bool, 5> used{};
    Evaluator<GaussQ> probe(probe_);
    for (int c = 0; c < 5; ++c) {
      int best = -1;
      for (int r = 0; r < 5 && best < 0; ++r)
        if (!used[r] && m[r][c]->is_const() && !m[r][c]->is_zero()) best = r;
      for (int r = 0; r < 5 && best < 0; ++r) {
        if (used[r] || m[r][c]->is_zero()) continue;
        try {
          if (!probe(m[r][c]).is_zero()) best = r;
        } catch (const DivisionByZero&) {
        }
      }
      if (best < 0) throw SingularFrame("frame is singular at the probe point (column " + std::to_string(c) + ")");
      used[best] = true;
      pivot_row[c] = best;
      Expr inv_pivot = inv(m[best][c]);
      for (int r = 0; r < 5; ++r) {
        if (r == best || m[r][c]->is_zero()) continue;
        Expr factor = m[r][c] * inv_pivot;
        for (int k = 0; k < 6; ++k)
          if (!m[best][k]->is_zero()) m[r][k] = m[r][k] - factor * m[best][k];
        m[r][c] = zero();
      }
    }
    std::array<Expr, 5> a;
    for (int c = 0; c < 5; ++c) a[c] = m[pivot_row[c]][5] / m[pivot_row[c]][c];
    return a;
  }

 private:
  std::array<VectorField, 5> frame_;
  std::array<VarId, 5> coords_;
  Point probe_;
};

inline std::array<Expr, 5> expand_in_frame(const VectorField& V, const Frame& f, const Point& probe,
                                           std::array<VarId, 5> coords = kSurfaceCoords) {
  return FrameSolver(f, coords, probe).solve(V);
}

// Table of d(omega^i) relative to the coframe dual to f, via expansion of the
// brackets in the frame.
inline std::array<TwoFormTable, 5> dcoframe_coeffs(const Frame& f, const Point& probe) {
  FrameSolver solver(f, kSurfaceCoords, probe);
  std::array<TwoFormTable, 5> out;
  for (int p = 0; p < 10; ++p) {
    auto [a, b] = kWedgePairs[p];
    auto coeffs = solver.solve(lie_bracket(f[a], f[b]));
    for (int i = 0; i < 5; ++i) out[i][p] = neg(coeffs[i]);
  }
  return out;
}

}  // namespace crcartan
