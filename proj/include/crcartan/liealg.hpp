#pragma once

#include "linalg.hpp"
#include "model.hpp"
#include "report.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace crcartan {

// Lie algebra over Q(i) given by structure constants c[j][k] = [e_j, e_k].
struct LieAlgebraSC {
  std::vector<std::string> labels;
  std::vector<std::vector<QVector>> c;

  std::size_t dim() const { return labels.size(); }

  static LieAlgebraSC zero_algebra(std::vector<std::string> labels) {
    std::size_t n = labels.size();
    return {std::move(labels), std::vector<std::vector<QVector>>(n, std::vector<QVector>(n, QVector(n)))};
  }

  QVector basis(std::size_t i) const {
    QVector e(dim());
    e[i] = GaussQ(1);
    return e;
  }

  QVector bracket(const QVector& x, const QVector& y) const {
    QVector out(dim());
    for (std::size_t j = 0; j < dim(); ++j) {
      if (x[j].is_zero()) continue;
      for (std::size_t k = 0; k < dim(); ++k) {
        if (y[k].is_zero()) continue;
        GaussQ s = x[j] * y[k];
        for (std::size_t i = 0; i < dim(); ++i)
          if (!c[j][k][i].is_zero()) out[i] += s * c[j][k][i];
      }
    }
    return out;
  }

  // Matrix of ad(x): column k holds [x, e_k].
  QMatrix ad(const QVector& x) const {
    QMatrix m = zero_matrix(dim(), dim());
    for (std::size_t k = 0; k < dim(); ++k) {
      QVector col = bracket(x, basis(k));
      for (std::size_t i = 0; i < dim(); ++i) m[i][k] = col[i];
    }
    return m;
  }

  std::string str(const QVector& x) const {
    std::string out;
    for (std::size_t i = 0; i < dim(); ++i) {
      if (x[i].is_zero()) continue;
      if (!out.empty()) out += " + ";
      if (!x[i].is_one()) out += "(" + x[i].str() + ")*";
      out += labels[i];
    }
    return out.empty() ? "0" : out;
  }
};

// Column j is the image of the j-th basis vector.
struct LinearMap {
  QMatrix m;

  QVector operator()(const QVector& x) const { return multiply(m, x); }
  bool invertible() const { return !m.empty() && m.size() == m[0].size() && rank(m) == m.size(); }
};

inline LinearMap identity_map(std::size_t n) { return {identity_matrix(n)}; }

inline CheckNode antisymmetry_check(const LieAlgebraSC& A) {
  bool ok = true;
  for (std::size_t j = 0; j < A.dim() && ok; ++j)
    for (std::size_t k = 0; k < A.dim() && ok; ++k)
      for (std::size_t i = 0; i < A.dim() && ok; ++i) ok = A.c[j][k][i] == -A.c[k][j][i];
  return CheckNode::leaf("antisymmetry", ok);
}

inline CheckNode jacobi_check(const LieAlgebraSC& A, const std::string& name = "jacobi") {
  std::string failing;
  std::size_t triples = 0;
  for (std::size_t a = 0; a < A.dim(); ++a)
    for (std::size_t b = a + 1; b < A.dim(); ++b)
      for (std::size_t c = b + 1; c < A.dim(); ++c) {
        ++triples;
        QVector x = A.basis(a), y = A.basis(b), z = A.basis(c);
        QVector s = A.bracket(x, A.bracket(y, z));
        QVector t = A.bracket(y, A.bracket(z, x));
        QVector u = A.bracket(z, A.bracket(x, y));
        for (std::size_t i = 0; i < A.dim(); ++i) s[i] += t[i] + u[i];
        if (!is_zero(s) && failing.empty()) failing = "(" + A.labels[a] + ", " + A.labels[b] + ", " + A.labels[c] + ")";
      }
  CheckNode n = CheckNode::leaf(name, failing.empty(), std::to_string(triples) + " triples");
  if (!failing.empty()) n.witness = failing;
  return n;
}

// K(x, y) = trace(ad x ad y) on basis vectors.
inline QMatrix killing_form(const LieAlgebraSC& A) {
  std::vector<QMatrix> ads;
  for (std::size_t i = 0; i < A.dim(); ++i) ads.push_back(A.ad(A.basis(i)));
  QMatrix k = zero_matrix(A.dim(), A.dim());
  for (std::size_t i = 0; i < A.dim(); ++i)
    for (std::size_t j = 0; j < A.dim(); ++j) k[i][j] = trace(multiply(ads[i], ads[j]));
  return k;
}

// Basis of {x : [x, e_k] = 0 for all k}.
inline std::vector<QVector> center(const LieAlgebraSC& A) {
  const std::size_t n = A.dim();
  QMatrix eqs;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      QVector row(n);
      for (std::size_t j = 0; j < n; ++j) row[j] = A.c[j][k][i];
      eqs.push_back(std::move(row));
    }
  return nullspace(std::move(eqs), n);
}

// m([x, y]_A) = [m x, m y]_B on all basis pairs, and m invertible.
inline CheckNode isomorphism_check(const LieAlgebraSC& A, const LieAlgebraSC& B, const LinearMap& m,
                                   const std::string& name = "isomorphism") {
  CheckNode root = CheckNode::group(name);
  root.add(CheckNode::leaf("dimension", A.dim() == B.dim()));
  if (A.dim() != B.dim()) return root;
  root.add(CheckNode::leaf("invertible", m.invertible()));
  CheckNode pairs = CheckNode::group("brackets");
  for (std::size_t a = 0; a < A.dim(); ++a)
    for (std::size_t b = a + 1; b < A.dim(); ++b) {
      QVector lhs = m(A.c[a][b]);
      QVector rhs = B.bracket(m(A.basis(a)), m(A.basis(b)));
      CheckNode leaf = CheckNode::leaf("[" + A.labels[a] + "," + A.labels[b] + "]", lhs == rhs);
      if (!(lhs == rhs)) {
        leaf.detail = "image of bracket " + B.str(lhs);
        leaf.value = B.str(rhs);
      }
      pairs.add(std::move(leaf));
    }
  root.add(std::move(pairs));
  return root;
}

// Compares two algebras on the same basis cell by cell.
inline CheckNode table_match(const LieAlgebraSC& computed, const LieAlgebraSC& printed, const std::string& name) {
  CheckNode root = CheckNode::group(name);
  for (std::size_t a = 0; a < computed.dim(); ++a)
    for (std::size_t b = 0; b < computed.dim(); ++b) {
      bool ok = computed.c[a][b] == printed.c[a][b];
      CheckNode leaf = CheckNode::leaf("[" + computed.labels[a] + "," + computed.labels[b] + "]", ok,
                                       "tabulated " + printed.str(printed.c[a][b]));
      if (!ok) leaf.value = computed.str(computed.c[a][b]);
      root.add(std::move(leaf));
    }
  return root;
}

// ---------------------------------------------------------------------------
// Constant-coefficient structure equations
// ---------------------------------------------------------------------------

// d(theta^i) = sum over terms coef * theta^j ^ theta^k.
struct MaurerCartanSystem {
  struct Term {
    GaussQ coef;
    int j, k;
  };
  std::vector<std::string> forms;
  std::vector<std::vector<Term>> d;
};

inline constexpr std::array<const char*, 7> kCoframeLabels{"rho", "kappa", "zeta", "alpha", "kappabar", "zetabar", "alphabar"};

// The model's Maurer-Cartan equations in the order rho < kappa < zeta < alpha
// < kappabar < zetabar < alphabar.
inline MaurerCartanSystem model_maurer_cartan(bool with_dalpha = true) {
  enum { rho, kappa, zeta, alpha, kappab, zetab, alphab };
  const GaussQ one(1), i = GaussQ::imag_unit();
  MaurerCartanSystem s;
  s.forms.assign(kCoframeLabels.begin(), kCoframeLabels.end());
  s.d = {
      {{one, alpha, rho}, {one, alphab, rho}, {i, kappa, kappab}},
      {{one, alpha, kappa}, {one, zeta, kappab}},
      {{one, alpha, zeta}, {-one, alphab, zeta}},
      {{one, zeta, zetab}},
      {{one, alphab, kappab}, {one, zetab, kappa}},
      {{-one, alpha, zetab}, {one, alphab, zetab}},
      {{-one, zeta, zetab}},
  };
  if (!with_dalpha) s.d[alpha].clear(), s.d[alphab].clear();
  return s;
}

// T^i_{jk} for j < k.
inline std::vector<std::vector<QVector>> torsion_coefficients(const MaurerCartanSystem& s) {
  const std::size_t n = s.forms.size();
  std::vector<std::vector<QVector>> T(n, std::vector<QVector>(n, QVector(n)));
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& term : s.d[i]) {
      if (term.j == term.k) continue;
      if (term.j < term.k)
        T[term.j][term.k][i] += term.coef;
      else
        T[term.k][term.j][i] -= term.coef;
    }
  return T;
}

// Dual right-invariant fields: [d_j, d_k] = -sum_i T^i_{jk} d_i.
inline LieAlgebraSC dual_algebra(const MaurerCartanSystem& s) {
  auto T = torsion_coefficients(s);
  std::vector<std::string> labels;
  for (const auto& f : s.forms) labels.push_back("d_" + f);
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(labels);
  for (std::size_t j = 0; j < A.dim(); ++j)
    for (std::size_t k = j + 1; k < A.dim(); ++k)
      for (std::size_t i = 0; i < A.dim(); ++i) {
        A.c[j][k][i] = -T[j][k][i];
        A.c[k][j][i] = T[j][k][i];
      }
  return A;
}

inline LieAlgebraSC dual_algebra_from_mc() { return dual_algebra(model_maurer_cartan()); }

// Coefficients of d(d theta^i) on theta^a ^ theta^b ^ theta^c, a < b < c.
inline std::vector<std::map<std::array<int, 3>, GaussQ>> d_squared(const MaurerCartanSystem& s) {
  const std::size_t n = s.forms.size();
  std::vector<std::map<std::array<int, 3>, GaussQ>> out(n);
  auto put = [](std::map<std::array<int, 3>, GaussQ>& form, std::array<int, 3> idx, GaussQ coef) {
    if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) return;
    for (int pass = 0; pass < 2; ++pass)
      for (int p = 0; p < 2; ++p)
        if (idx[p] > idx[p + 1]) std::swap(idx[p], idx[p + 1]), coef = -coef;
    form[idx] += coef;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& term : s.d[i]) {
      // d(theta^j ^ theta^k) = d(theta^j) ^ theta^k - theta^j ^ d(theta^k).
      for (const auto& u : s.d[term.j]) put(out[i], {u.j, u.k, term.k}, term.coef * u.coef);
      for (const auto& u : s.d[term.k]) put(out[i], {term.j, u.j, u.k}, -(term.coef * u.coef));
    }
  return out;
}

inline CheckNode d_squared_check(const MaurerCartanSystem& s, const std::string& name = "d-squared") {
  CheckNode root = CheckNode::group(name);
  auto dd = d_squared(s);
  for (std::size_t i = 0; i < s.forms.size(); ++i) {
    std::string residue;
    for (const auto& [idx, c] : dd[i])
      if (!c.is_zero())
        residue += (residue.empty() ? "" : " + ") + std::string("(") + c.str() + ")" + s.forms[idx[0]] + "^" +
                   s.forms[idx[1]] + "^" + s.forms[idx[2]];
    CheckNode leaf = CheckNode::leaf("dd(" + s.forms[i] + ")", residue.empty());
    if (!residue.empty()) leaf.value = residue;
    root.add(std::move(leaf));
  }
  return root;
}

// ---------------------------------------------------------------------------
// Tabulated algebras
// ---------------------------------------------------------------------------

namespace detail {

struct SCCell {
  int a, b;  // 1-based
  std::vector<std::pair<int, GaussQ>> rhs;
};

inline LieAlgebraSC from_upper_cells(std::vector<std::string> labels, const std::vector<SCCell>& cells) {
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(std::move(labels));
  for (const auto& cell : cells)
    for (const auto& [k, c] : cell.rhs) {
      A.c[cell.a - 1][cell.b - 1][k - 1] += c;
      A.c[cell.b - 1][cell.a - 1][k - 1] -= c;
    }
  return A;
}

inline std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

}  // namespace detail

// The printed table of the dual fields, all 49 cells. The entry in row d_rho,
// column d_alphabar is printed as d_rhobar and read as d_rho, rho being real.
inline LieAlgebraSC printed_dual_table() {
  const GaussQ one(1), i = GaussQ::imag_unit();
  enum { r = 1, k, z, a, kb, zb, ab };
  std::vector<std::vector<std::vector<std::pair<int, GaussQ>>>> rows{
      {{}, {}, {}, {{r, one}}, {}, {}, {{r, one}}},
      {{}, {}, {}, {{k, one}}, {{r, -i}}, {{kb, one}}, {}},
      {{}, {}, {}, {{z, one}}, {{k, -one}}, {{a, -one}, {ab, one}}, {{z, -one}}},
      {{{r, -one}}, {{k, -one}}, {{z, -one}}, {}, {}, {{zb, one}}, {}},
      {{}, {{r, i}}, {{k, one}}, {}, {}, {}, {{kb, one}}},
      {{}, {{kb, -one}}, {{ab, -one}, {a, one}}, {{zb, -one}}, {}, {}, {{zb, one}}},
      {{{r, -one}}, {}, {{z, one}}, {}, {{kb, -one}}, {{zb, -one}}, {}},
  };
  std::vector<std::string> labels;
  for (const char* f : kCoframeLabels) labels.push_back(std::string("d_") + f);
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(labels);
  for (std::size_t row = 0; row < 7; ++row)
    for (std::size_t col = 0; col < 7; ++col)
      for (const auto& [idx, c] : rows[row][col]) A.c[row][col][idx - 1] += c;
  return A;
}

// The algebra spanned by X^1..X^10 as tabulated.
inline LieAlgebraSC printed_x_algebra() {
  auto table = printed_commutator_table();
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(detail::numbered("X", kModelFieldCount));
  for (int a = 0; a < kModelFieldCount; ++a)
    for (int b = 0; b < kModelFieldCount; ++b) A.c[a][b] = table[a][b];
  return A;
}

// Structure constants of X^1..X^n recomputed from the polynomial fields.
inline LieAlgebraSC computed_x_algebra(int n = kRigidFieldCount) {
  auto X = infinitesimal_fields();
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(detail::numbered("X", n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      auto c = decompose(X, lie_bracket(X[a], X[b]));
      if (!c) throw std::logic_error("bracket leaves the span of X1..X10");
      for (int k = 0; k < n; ++k) A.c[a][b][k] = (*c)[k];
      for (int k = n; k < kModelFieldCount; ++k)
        if (!(*c)[k].is_zero()) throw std::logic_error("X1..X" + std::to_string(n) + " are not closed");
    }
  return A;
}

// The tabulated brackets of W^1..W^7.
inline LieAlgebraSC printed_w_table() {
  const GaussQ one(1);
  return detail::from_upper_cells(detail::numbered("W", 7),
                                  {{1, 2, {{1, 2 * one}}},
                                   {2, 4, {{4, -one}}},
                                   {2, 5, {{5, -one}}},
                                   {3, 4, {{5, one}}},
                                   {3, 5, {{4, -one}}},
                                   {3, 6, {{7, 2 * one}}},
                                   {3, 7, {{6, -2 * one}}},
                                   {4, 5, {{1, 4 * one}}},
                                   {4, 6, {{4, -one}}},
                                   {4, 7, {{5, -one}}},
                                   {5, 6, {{5, one}}},
                                   {5, 7, {{4, -one}}},
                                   {6, 7, {{3, -2 * one}}}});
}

// W^1..W^7 in the dual basis (columns).
inline LinearMap w_basis() {
  enum { r, k, z, a, kb, zb, ab };
  const GaussQ one(1), half_i(0, Rational(1, 2));
  QMatrix m = zero_matrix(7, 7);
  auto col = [&](int w, std::vector<std::pair<int, GaussQ>> entries) {
    for (auto& [row, c] : entries) m[row][w] = c;
  };
  col(0, {{r, -half_i}});
  col(1, {{a, one}, {ab, one}});
  col(2, {{z, one}, {zb, -one}});
  col(3, {{k, one}, {kb, -one}});
  col(4, {{k, one}, {kb, one}});
  col(5, {{z, one}, {zb, one}});
  col(6, {{a, -one}, {ab, one}});
  return {m};
}

// Structure constants of the images of a basis under m, in that basis.
inline LieAlgebraSC pushed_forward(const LieAlgebraSC& B, const LinearMap& m, std::vector<std::string> labels) {
  LieAlgebraSC A = LieAlgebraSC::zero_algebra(std::move(labels));
  for (std::size_t a = 0; a < A.dim(); ++a)
    for (std::size_t b = 0; b < A.dim(); ++b) {
      QVector image = B.bracket(m(A.basis(a)), m(A.basis(b)));
      auto coords = solve(m.m, image);
      if (!coords) throw std::logic_error("basis change is not invertible");
      A.c[a][b] = *coords;
    }
  return A;
}

// sigma fixes d_rho and swaps the barred and unbarred fields; the structure
// constants must satisfy sigma[x, y] = [sigma x, sigma y] with conjugated scalars.
inline CheckNode conjugation_check(const LieAlgebraSC& D) {
  constexpr std::array<int, 7> sigma{0, 4, 5, 6, 1, 2, 3};
  bool ok = true;
  for (int a = 0; a < 7 && ok; ++a)
    for (int b = 0; b < 7 && ok; ++b)
      for (int i = 0; i < 7 && ok; ++i) ok = D.c[sigma[a]][sigma[b]][sigma[i]] == D.c[a][b][i].conj();
  return CheckNode::leaf("conjugation-compatible", ok);
}

inline CheckNode liealg_suite() {
  CheckNode root = CheckNode::group("liealg");
  LieAlgebraSC dual = dual_algebra_from_mc();
  LieAlgebraSC printed_dual = printed_dual_table();
  LieAlgebraSC h = computed_x_algebra(kRigidFieldCount);
  LieAlgebraSC x10 = printed_x_algebra();
  LinearMap tau = w_basis();

  root.add(table_match(dual, printed_dual, "dual-table"));

  CheckNode alg = CheckNode::group("axioms");
  for (const auto& [name, A] : std::vector<std::pair<std::string, const LieAlgebraSC*>>{
           {"dual", &dual}, {"X1..X10", &x10}, {"h", &h}, {"printed-dual", &printed_dual}}) {
    CheckNode n = CheckNode::group(name);
    n.add(antisymmetry_check(*A));
    n.add(jacobi_check(*A));
    alg.add(std::move(n));
  }
  root.add(std::move(alg));
  root.add(conjugation_check(dual));
  root.add(d_squared_check(model_maurer_cartan()));

  root.add(table_match(pushed_forward(dual, tau, detail::numbered("W", 7)), printed_w_table(), "w-table"));
  root.add(isomorphism_check(h, dual, tau, "tau"));

  QMatrix K = killing_form(h);
  CheckNode killing = CheckNode::group("killing");
  killing.add(CheckNode::leaf("row-X1-zero", is_zero(K[0])));
  killing.add(CheckNode::leaf("degenerate", rank(K) < h.dim(), "rank " + std::to_string(rank(K))));
  root.add(std::move(killing));
  auto z = center(h);
  root.add(CheckNode::leaf("center-trivial", z.empty(), "dimension " + std::to_string(z.size())));

  // Each injected fault must be detected.
  CheckNode faults = CheckNode::group("fault-injection");
  {
    LinearMap flipped = tau;
    for (auto& row : flipped.m) row[3] = -row[3];
    faults.add(CheckNode::leaf("sign-flipped-tau", !isomorphism_check(h, dual, flipped).ok()));
    LieAlgebraSC broken = dual;
    broken.c[2][5][6] = GaussQ(0);  // [d_zeta, d_zetabar] = -d_alpha only
    broken.c[5][2][6] = GaussQ(0);
    faults.add(CheckNode::leaf("perturbed-jacobi", jacobi_check(broken).status == Status::Fail));
    faults.add(CheckNode::leaf("missing-dalpha", !d_squared_check(model_maurer_cartan(false)).ok()));
    faults.add(CheckNode::leaf("identity-map", isomorphism_check(h, h, identity_map(h.dim())).ok()));
  }
  root.add(std::move(faults));
  return root;
}

}  // namespace crcartan
