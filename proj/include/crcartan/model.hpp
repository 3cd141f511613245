#pragma once

#include "hypersurface.hpp"
#include "linalg.hpp"
#include "parser.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <array>
#include <map>
#include <string>
#include <vector>

namespace crcartan {

// Tube over the future light cone.
inline Expr mlc_graph() { return parse_expr("(z1*zb1 + (1/2)*z1^2*zb2 + (1/2)*zb1^2*z2) / (1 - z2*zb2)"); }

// ---------------------------------------------------------------------------
// Polynomial vector fields on C^3 = (z1, z2, w)
// ---------------------------------------------------------------------------

inline constexpr std::array<VarId, 3> kAmbientCoords{var::z1, var::z2, var::w};

// Sparse polynomial in (z1, z2, w) over Q(i).
class Poly {
 public:
  using Monomial = std::array<int, 3>;

  Poly() = default;
  Poly(long c) : Poly(GaussQ(c)) {}
  Poly(const GaussQ& c) { add_term({0, 0, 0}, c); }

  static Poly coordinate(int i) {
    Poly p;
    Monomial m{0, 0, 0};
    m[i] = 1;
    p.add_term(m, GaussQ(1));
    return p;
  }

  const std::map<Monomial, GaussQ>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Poly derivative(int i) const {
    Poly out;
    for (const auto& [m, c] : terms_) {
      if (m[i] == 0) continue;
      Monomial d = m;
      --d[i];
      out.add_term(d, c * GaussQ(m[i]));
    }
    return out;
  }

  Expr to_expr() const {
    std::vector<Expr> sum;
    for (const auto& [m, c] : terms_) {
      std::vector<Expr> f{constant(c)};
      for (int i = 0; i < 3; ++i)
        if (m[i]) f.push_back(pow(Expr(kAmbientCoords[i]), m[i]));
      sum.push_back(mul(f));
    }
    return add(sum);
  }

  friend Poly operator+(Poly a, const Poly& b) {
    for (const auto& [m, c] : b.terms_) a.add_term(m, c);
    return a;
  }
  friend Poly operator-(Poly a, const Poly& b) {
    for (const auto& [m, c] : b.terms_) a.add_term(m, -c);
    return a;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term({ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]}, ca * cb);
    return out;
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

 private:
  void add_term(const Monomial& m, const GaussQ& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (fresh) return;
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  std::map<Monomial, GaussQ> terms_;
};

// Holomorphic field sum_j coeff[j] d/d(z1, z2, w)_j.
struct AmbientVectorField {
  std::array<Poly, 3> coeff;

  Poly apply(const Poly& p) const {
    Poly out;
    for (int j = 0; j < 3; ++j)
      if (!coeff[j].is_zero()) out = out + coeff[j] * p.derivative(j);
    return out;
  }

  bool is_zero() const { return coeff[0].is_zero() && coeff[1].is_zero() && coeff[2].is_zero(); }

  VectorField to_vector_field() const {
    VectorField f;
    for (int j = 0; j < 3; ++j) f.set(kAmbientCoords[j], coeff[j].to_expr());
    return f;
  }
  // The real field X + conj(X).
  VectorField real_part() const {
    VectorField f = to_vector_field();
    return f + f.conjugate();
  }

  friend AmbientVectorField operator+(const AmbientVectorField& a, const AmbientVectorField& b) {
    return {{a.coeff[0] + b.coeff[0], a.coeff[1] + b.coeff[1], a.coeff[2] + b.coeff[2]}};
  }
  friend AmbientVectorField operator*(const GaussQ& s, const AmbientVectorField& a) {
    Poly c(s);
    return {{c * a.coeff[0], c * a.coeff[1], c * a.coeff[2]}};
  }
  friend bool operator==(const AmbientVectorField& a, const AmbientVectorField& b) { return a.coeff == b.coeff; }
};

inline AmbientVectorField lie_bracket(const AmbientVectorField& X, const AmbientVectorField& Y) {
  AmbientVectorField out;
  for (int k = 0; k < 3; ++k) out.coeff[k] = X.apply(Y.coeff[k]) - Y.apply(X.coeff[k]);
  return out;
}

inline constexpr int kModelFieldCount = 10;
// The first seven fields span the rigid subalgebra.
inline constexpr int kRigidFieldCount = 7;

// Infinitesimal CR automorphisms X^1..X^10 (index 0..9).
inline std::array<AmbientVectorField, kModelFieldCount> infinitesimal_fields() {
  const Poly z1 = Poly::coordinate(0), z2 = Poly::coordinate(1), w = Poly::coordinate(2);
  const Poly i(GaussQ::imag_unit());
  return {{
      {{0, 0, i}},
      {{z1, 0, 2 * w}},
      {{i * z1, 2 * i * z2, 0}},
      {{z2 - 1, 0, Poly(-2) * z1}},
      {{i + i * z2, 0, Poly(-2) * i * z1}},
      {{z1 * z2, z2 * z2 - 1, Poly(0) - z1 * z1}},
      {{i * z1 * z2, i * z2 * z2 + i, Poly(0) - i * z1 * z1}},
      {{i * w * z1, Poly(0) - i * z1 * z1, i * w * w}},
      {{z1 * z1 - w * z2 - w, 2 * z1 * z2 + 2 * z1, 2 * w * z1}},
      {{Poly(0) - i * z1 * z1 + i * w * z2 - i * w, Poly(-2) * i * z1 * z2 + 2 * i * z1, Poly(-2) * i * w * z1}},
  }};
}

// Coefficients of a combination of X^1..X^10.
using FieldCombination = QVector;

// The tabulated brackets [X^a, X^b] for a < b (1-based in the data below).
inline std::vector<std::vector<FieldCombination>> printed_commutator_table() {
  struct Cell {
    int a, b;
    std::vector<std::pair<int, long>> rhs;
  };
  const std::vector<Cell> cells{
      {1, 2, {{1, 2}}},   {1, 8, {{2, -1}}},  {1, 9, {{5, -1}}},  {1, 10, {{4, -1}}},
      {2, 4, {{4, -1}}},  {2, 5, {{5, -1}}},  {2, 8, {{8, 2}}},   {2, 9, {{9, 1}}},
      {2, 10, {{10, 1}}}, {3, 4, {{5, 1}}},   {3, 5, {{4, -1}}},  {3, 6, {{7, 2}}},
      {3, 7, {{6, -2}}},  {3, 9, {{10, -1}}}, {3, 10, {{9, 1}}},  {4, 5, {{1, 4}}},
      {4, 6, {{4, -1}}},  {4, 7, {{5, -1}}},  {4, 8, {{10, 1}}},  {4, 9, {{6, 2}, {2, -2}}},
      {4, 10, {{7, -2}, {3, 2}}}, {5, 6, {{5, 1}}}, {5, 7, {{4, -1}}}, {5, 8, {{9, 1}}},
      {5, 9, {{7, 2}, {3, 2}}},   {5, 10, {{6, 2}, {2, 2}}}, {6, 7, {{3, -2}}}, {6, 9, {{9, -1}}},
      {6, 10, {{10, 1}}}, {7, 9, {{10, 1}}}, {7, 10, {{9, 1}}}, {9, 10, {{8, 4}}},
  };
  std::vector<std::vector<FieldCombination>> table(kModelFieldCount,
                                                   std::vector<FieldCombination>(kModelFieldCount, QVector(kModelFieldCount)));
  for (const auto& cell : cells)
    for (auto [k, c] : cell.rhs) {
      table[cell.a - 1][cell.b - 1][k - 1] += GaussQ(c);
      table[cell.b - 1][cell.a - 1][k - 1] -= GaussQ(c);
    }
  return table;
}

inline std::string combination_str(const FieldCombination& c, const std::string& prefix = "X") {
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (c[k].is_zero()) continue;
    std::string coef = c[k].str();
    bool unit = c[k].is_one();
    bool minus_one = c[k] == GaussQ(-1);
    if (!out.empty()) out += " + ";
    if (minus_one)
      out += "-";
    else if (!unit)
      out += (c[k].is_real() || c[k].re() == 0 ? coef : "(" + coef + ")") + "*";
    out += prefix + std::to_string(k + 1);
  }
  return out.empty() ? "0" : out;
}

inline AmbientVectorField combine(const std::array<AmbientVectorField, kModelFieldCount>& X, const FieldCombination& c) {
  AmbientVectorField out;
  for (int k = 0; k < kModelFieldCount; ++k)
    if (!c[k].is_zero()) out = out + c[k] * X[k];
  return out;
}

// Coordinates of Y in the span of X^1..X^10, if it lies there.
inline std::optional<FieldCombination> decompose(const std::array<AmbientVectorField, kModelFieldCount>& X,
                                                 const AmbientVectorField& Y) {
  std::map<std::pair<int, Poly::Monomial>, std::size_t> rows;
  auto row_of = [&](int comp, const Poly::Monomial& m) { return rows.try_emplace({comp, m}, rows.size()).first->second; };
  for (const auto& f : X)
    for (int j = 0; j < 3; ++j)
      for (const auto& [m, c] : f.coeff[j].terms()) row_of(j, m);
  for (int j = 0; j < 3; ++j)
    for (const auto& [m, c] : Y.coeff[j].terms()) row_of(j, m);
  QMatrix a = zero_matrix(rows.size(), kModelFieldCount);
  QVector b(rows.size());
  for (int k = 0; k < kModelFieldCount; ++k)
    for (int j = 0; j < 3; ++j)
      for (const auto& [m, c] : X[k].coeff[j].terms()) a[rows.at({j, m})][k] = c;
  for (int j = 0; j < 3; ++j)
    for (const auto& [m, c] : Y.coeff[j].terms()) b[rows.at({j, m})] = c;
  return solve(a, b);
}

// Every bracket compared against the table by polynomial equality.
inline CheckNode commutator_table_check() {
  auto X = infinitesimal_fields();
  auto table = printed_commutator_table();
  CheckNode root = CheckNode::group("commutator-table");
  for (int a = 0; a < kModelFieldCount; ++a)
    for (int b = 0; b < kModelFieldCount; ++b) {
      std::string name = "[X" + std::to_string(a + 1) + ",X" + std::to_string(b + 1) + "]";
      AmbientVectorField br = lie_bracket(X[a], X[b]);
      bool ok = br == combine(X, table[a][b]);
      CheckNode leaf = CheckNode::leaf(name, ok, "tabulated " + combination_str(table[a][b]));
      if (!ok) {
        auto actual = decompose(X, br);
        leaf.value = actual ? combination_str(*actual) : "outside the span of X1..X10";
      }
      root.add(std::move(leaf));
    }
  return root;
}

// X^1..X^7 are linearly independent and closed under brackets.
inline CheckNode closure_check() {
  auto X = infinitesimal_fields();
  CheckNode root = CheckNode::group("closure");
  std::array<AmbientVectorField, kModelFieldCount> basis = X;
  bool independent = true;
  for (int k = 0; k < kModelFieldCount; ++k) {
    auto others = basis;
    others[k] = AmbientVectorField{};
    if (decompose(others, X[k])) independent = false;
  }
  root.add(CheckNode::leaf("independent-X1..X10", independent));
  for (int a = 0; a < kRigidFieldCount; ++a)
    for (int b = a + 1; b < kRigidFieldCount; ++b) {
      auto c = decompose(X, lie_bracket(X[a], X[b]));
      bool ok = c.has_value();
      for (int k = kRigidFieldCount; ok && k < kModelFieldCount; ++k) ok = (*c)[k].is_zero();
      CheckNode leaf = CheckNode::leaf("[X" + std::to_string(a + 1) + ",X" + std::to_string(b + 1) + "]", ok);
      if (c) leaf.detail = combination_str(*c);
      root.add(std::move(leaf));
    }
  return root;
}

// Restricts sampling to |z2| < 1, away from the singular locus z2 zb2 = 1.
inline SampleSpec inside_unit_disc(SampleSpec spec) {
  auto previous = spec.exclusion;
  spec.exclusion = [previous](const Point& p) {
    if (previous && !previous(p)) return false;
    return !p.has(var::z2) || !p.at(var::z2).exact() || p.at(var::z2).gauss().norm() < 1;
  };
  return spec;
}

// Restricts e to the graph w = F + iv, wb = F - iv.
inline Expr on_graph(const Expr& e, const Expr& F) {
  Expr iv = imag_unit() * Expr(var::v);
  return substitute(e, {{var::w, F + iv}, {var::wb, F - iv}});
}

// (X + conj X)(r) with r = (w + wb)/2 - F, at on-surface points.
inline CheckNode tangency_check(const AmbientVectorField& X, const std::string& name, const SampleSpec& spec) {
  Expr F = mlc_graph();
  Expr r = (Expr(var::w) + Expr(var::wb)) / 2 - F;
  return CheckNode::from_zero_test(name, is_zero_on_samples(on_graph(X.real_part().apply(r), F), inside_unit_disc(spec)));
}

inline CheckNode tangency_suite(const SampleSpec& spec) {
  auto X = infinitesimal_fields();
  CheckNode root = CheckNode::group("tangency");
  for (int k = 0; k < kModelFieldCount; ++k) root.add(tangency_check(X[k], "X" + std::to_string(k + 1), spec));
  return root;
}

// ---------------------------------------------------------------------------
// Rigid maps
// ---------------------------------------------------------------------------

// (z, w) -> (f1(z), f2(z), a w + g(z)) with a real and nonzero.
struct RigidMap {
  Expr f1, f2, a, g;
  Expr inv1, inv2;  // the inverse of (f1, f2)
};

// U stands for e^{it}, so its conjugate is 1/U.
inline Expr on_unit_circle(const Expr& e) {
  if (!e->depends_on(var::Ub)) return e;
  return substitute(e, {{var::Ub, inv(Expr(var::U))}});
}

inline Expr conjugate_map_expr(const Expr& e) { return on_unit_circle(conjugate(e)); }

// Graph of the image of u = F under m.
inline Expr transform_graph(const Expr& F, const RigidMap& m) {
  std::map<VarId, Expr> back{{var::z1, m.inv1},
                             {var::z2, m.inv2},
                             {var::zb1, conjugate_map_expr(m.inv1)},
                             {var::zb2, conjugate_map_expr(m.inv2)}};
  Expr g_back = substitute(m.g, {{var::z1, m.inv1}, {var::z2, m.inv2}});
  Expr a_back = substitute(m.a, {{var::z1, m.inv1}, {var::z2, m.inv2}});
  return on_unit_circle(a_back * substitute(F, back) + (g_back + conjugate_map_expr(g_back)) / 2);
}

inline Hypersurface transform_surface(const Hypersurface& H, const RigidMap& m) {
  return Hypersurface(transform_graph(H.F(), m), H.convention());
}

// (z1, z2, w) -> (z1 + z2^2, z2, 2w).
inline RigidMap shear_map() {
  Expr z1 = var::z1, z2 = var::z2;
  return {z1 + pow(z2, 2), z2, Expr(2), zero(), z1 - pow(z2, 2), z2};
}

// (z1, z2, w) -> (z1, z2, 3w).
inline RigidMap dilation_map() { return {var::z1, var::z2, Expr(3), zero(), var::z1, var::z2}; }

// (z1, z2, w) -> (z1, z2 + z1/4, w + z1^2); mixes z2 with z1 so that P does not vanish.
inline RigidMap mixing_map() {
  Expr z1 = var::z1, z2 = var::z2;
  return {z1, z2 + z1 / 4, one(), pow(z1, 2), z1, z2 - z1 / 4};
}

inline CheckNode check_rigid_map(const RigidMap& m, const SampleSpec& spec) {
  using namespace var;
  CheckNode root = CheckNode::group("rigid-map");
  std::map<VarId, Expr> forward{{z1, m.f1}, {z2, m.f2}};
  root.add(CheckNode::from_zero_test("inverse-1", is_zero_on_samples(substitute(m.inv1, forward) - Expr(z1), spec)));
  root.add(CheckNode::from_zero_test("inverse-2", is_zero_on_samples(substitute(m.inv2, forward) - Expr(z2), spec)));
  std::string stray;
  for (VarId x : {w, wb, zb1, zb2})
    for (const Expr* part : {&m.f1, &m.f2, &m.g, &m.a})
      if ((*part)->depends_on(x) && stray.find(x.name()) == std::string::npos)
        stray += (stray.empty() ? "" : ", ") + std::string(x.name());
  root.add(CheckNode::leaf("holomorphic-in-z", stray.empty(), stray.empty() ? "" : "depends on " + stray));
  root.add(CheckNode::from_zero_test("a-constant", is_zero_on_samples(differentiate(m.a, z1), spec)));
  root.add(CheckNode::from_zero_test("a-real", is_zero_on_samples(conjugate_map_expr(m.a) - m.a, spec)));
  root.add(detail::nowhere_zero("a-nonzero", m.a, spec));
  return root;
}

// ---------------------------------------------------------------------------
// Flows of X^1..X^7
// ---------------------------------------------------------------------------

// Which formal time parameter a closed form uses: t itself, E = e^t, or U = e^{it}.
enum class FlowParam { Time, Exp, Phase };

struct FlowMap {
  int index;  // 1..7
  std::string variant;
  FlowParam param;
  std::array<Expr, 3> gamma;  // images of (z1, z2, w)
};

// Closed forms per generator; the first entry is the one that solves the
// initial value problem, the others are alternative readings kept for the record.
inline std::vector<FlowMap> flow_variants(int index) {
  using namespace var;
  const Expr Z1 = z1, Z2 = z2, W = w, Tt = t, Ee = E, Uu = U, i = imag_unit();
  switch (index) {
    case 1: return {{1, "printed", FlowParam::Time, {Z1, Z2, W + i * Tt}}};
    case 2: return {{2, "printed", FlowParam::Exp, {Ee * Z1, Z2, pow(Ee, 2) * W}}};
    case 3: return {{3, "printed", FlowParam::Phase, {Uu * Z1, pow(Uu, 2) * Z2, W}}};
    case 4:
      return {{4, "printed", FlowParam::Time,
               {(Z2 - 1) * Tt + Z1, Z2, W - ((Z2 - 1) * pow(Tt, 2) + 2 * Z1 * Tt)}}};
    case 5:
      return {{5, "printed", FlowParam::Time,
               {Z1 + i * (Z2 + 1) * Tt, Z2, W - 2 * i * Z1 * Tt + (Z2 + 1) * pow(Tt, 2)}}};
    case 6: {
      Expr E2 = pow(Ee, 2);
      Expr den = (1 + Z2) + E2 * (1 - Z2);
      Expr g1 = 2 * Z1 * (1 + Z2) * Ee / ((1 + Z2) * den);
      Expr g2 = ((1 + Z2) - E2 * (1 - Z2)) / den;
      Expr shift = pow(Z1, 2) / (1 - Z2) - 2 * pow(Z1, 2) / (1 - Z2) / den;
      return {{6, "corrected-w", FlowParam::Exp, {g1, g2, W - shift}},
              {6, "printed", FlowParam::Exp, {g1, g2, W + shift}},
              {6, "single-(1+z2)", FlowParam::Exp, {2 * Z1 * (1 + Z2) * Ee / den, g2, W - shift}}};
    }
    case 7: {
      Expr sh = (Ee - inv(Ee)) / 2, ch = (Ee + inv(Ee)) / 2;
      Expr th = (pow(Ee, 2) - 1) / (pow(Ee, 2) + 1);
      Expr den = Z2 * sh + i * ch;
      Expr g1 = i * Z1 / den, g3 = W + pow(Z1, 2) * sh / den;
      return {{7, "corrected-z2", FlowParam::Exp, {g1, (Z2 + i * th) / (1 - i * Z2 * th), g3}},
              {7, "printed", FlowParam::Exp, {g1, (neg(Z2) - i * th) / (i + Z2 * th), g3}}};
    }
    default: throw std::out_of_range("flows exist for X1..X7 only");
  }
}

inline FlowMap flow_map(int index) { return flow_variants(index).front(); }

// d/dt with dE/dt = E and dU/dt = iU.
inline Expr time_derivative(const Expr& e) {
  return differentiate(e, var::t) + Expr(var::E) * differentiate(e, var::E) +
         imag_unit() * Expr(var::U) * differentiate(e, var::U);
}

inline std::array<Expr, 3> substitute_all(const std::array<Expr, 3>& e, const std::map<VarId, Expr>& s) {
  return {substitute(e[0], s), substitute(e[1], s), substitute(e[2], s)};
}

// gamma'(t) - X(gamma(t)), componentwise.
inline std::array<Expr, 3> ode_residual(const FlowMap& f) {
  const AmbientVectorField X = infinitesimal_fields()[f.index - 1];
  std::map<VarId, Expr> at_gamma{{var::z1, f.gamma[0]}, {var::z2, f.gamma[1]}, {var::w, f.gamma[2]}};
  std::array<Expr, 3> r;
  for (int j = 0; j < 3; ++j) r[j] = time_derivative(f.gamma[j]) - substitute(X.coeff[j].to_expr(), at_gamma);
  return r;
}

// gamma at time zero minus the starting point.
inline std::array<Expr, 3> initial_residual(const FlowMap& f) {
  auto g0 = substitute_all(f.gamma, {{var::t, zero()}, {var::E, one()}, {var::U, one()}});
  return {g0[0] - Expr(var::z1), g0[1] - Expr(var::z2), g0[2] - Expr(var::w)};
}

// The time-s map as a rigid map; the inverse is the time-(-s) map.
inline RigidMap flow_rigid_map(const FlowMap& f) {
  std::map<VarId, Expr> reverse{{var::t, neg(Expr(var::t))}, {var::E, inv(Expr(var::E))}, {var::U, inv(Expr(var::U))}};
  Expr a = differentiate(f.gamma[2], var::w);
  return {f.gamma[0], f.gamma[1], a, f.gamma[2] - a * Expr(var::w), substitute(f.gamma[0], reverse),
          substitute(f.gamma[1], reverse)};
}

struct FlowTime {
  Scalar t{0}, E{1}, U{1};

  static FlowTime compose(const FlowTime& a, const FlowTime& b) { return {a.t + b.t, a.E * b.E, a.U * b.U}; }

  // Float parameters of the real time s.
  static FlowTime real(const BigFloat& s) {
    return {Scalar(ComplexF(s)), Scalar(ComplexF(boost::multiprecision::exp(s))),
            Scalar(ComplexF(boost::multiprecision::cos(s), boost::multiprecision::sin(s)))};
  }
};

inline Point with_time(Point p, const FlowTime& ft) {
  p.set(var::t, ft.t);
  p.set(var::E, ft.E);
  p.set_conj(var::U, ft.U);
  return p;
}

// exp(tX)(p) for a point carrying z1, z2, w.
inline Point apply_flow(const FlowMap& f, const FlowTime& ft, const Point& p) {
  Point q = with_time(p, ft);
  Point out;
  for (int j = 0; j < 3; ++j) out.set_conj(kAmbientCoords[j], evaluate(f.gamma[j], q));
  return out;
}

inline Point flow(int index, const Scalar& t, const Point& p) {
  FlowMap f = flow_map(index);
  if (t.is_zero()) return apply_flow(f, FlowTime{}, p);
  if (t.exact() && f.param == FlowParam::Time) return apply_flow(f, FlowTime{t, 1, 1}, p);
  BigFloat s = t.as_float().re();
  return apply_flow(f, FlowTime::real(s), p);
}

namespace detail {

inline Scalar unit_gaussian(PointSampler& s) {
  Rational q = s.rational();
  Rational d = 1 + q * q;
  return Scalar(GaussQ((1 - q * q) / d, 2 * q / d));
}

inline FlowTime random_flow_time(PointSampler& s) {
  Rational e = s.rational();
  if (sgn(e) == 0) e = 1;
  return {Scalar(GaussQ(s.rational())), Scalar(GaussQ(e)), unit_gaussian(s)};
}

inline Point ambient_point(PointSampler& s) {
  Point p;
  for (VarId x : kAmbientCoords) p.set_conj(x, Scalar(s.gaussian()));
  return p;
}

inline BigFloat max_distance(const Point& a, const Point& b) {
  BigFloat m = 0;
  for (VarId x : kAmbientCoords) m = std::max(m, relative_distance(a.at(x), b.at(x)));
  return m;
}

inline std::string fmt(const BigFloat& x) { return x.str(3, std::ios_base::scientific); }

inline const std::array<BigFloat, 4>& float_times() {
  static const std::array<BigFloat, 4> times{BigFloat(1) / 4, BigFloat(-1) / 4, BigFloat(1) / 2, BigFloat(-1) / 2};
  return times;
}

inline CheckNode components_zero(const std::string& name, const std::array<Expr, 3>& r, const SampleSpec& spec) {
  CheckNode node = CheckNode::group(name);
  static constexpr const char* kNames[] = {"z1", "z2", "w"};
  for (int j = 0; j < 3; ++j) node.add(CheckNode::from_zero_test(kNames[j], is_zero_on_samples(r[j], spec)));
  return node;
}

}  // namespace detail

inline constexpr double kFloatTolerance = 1e-9;

// ODE residual, group law, rigid shape and surface preservation of one flow.
inline CheckNode flow_checks(int index, const SampleSpec& base) {
  using namespace var;
  // E = e^t and U = e^{it} never vanish.
  SampleSpec spec = base;
  spec.exclusion = [previous = base.exclusion](const Point& p) {
    for (VarId x : {E, U})
      if (p.has(x) && p.at(x).is_zero()) return false;
    return !previous || previous(p);
  };
  auto variants = flow_variants(index);
  const FlowMap& f = variants.front();
  const bool transcendental = index == 6 || index == 7;
  CheckNode root = CheckNode::group("X" + std::to_string(index));

  root.add(detail::components_zero("initial-value", initial_residual(f), spec));
  // Exact in t for polynomial flows and in the formal parameter E or U otherwise.
  root.add(detail::components_zero(transcendental ? "ode-residual-formal" : "ode-residual", ode_residual(f), spec));

  if (variants.size() > 1) {
    CheckNode readings = CheckNode::group("readings");
    std::string holding;
    for (const auto& v : variants) {
      static constexpr const char* kNames[] = {"z1", "z2", "w"};
      std::string failing;
      auto note = [&](const char* what, const std::array<Expr, 3>& r) {
        for (int j = 0; j < 3; ++j)
          if (!is_zero_on_samples(r[j], spec).zero) failing += (failing.empty() ? "" : ", ") + std::string(what) + "/" + kNames[j];
      };
      note("initial-value", initial_residual(v));
      note("ode-residual", ode_residual(v));
      bool ok = failing.empty();
      if (ok) holding += (holding.empty() ? "" : ", ") + v.variant;
      CheckNode leaf = CheckNode::leaf(v.variant, ok, ok ? "solves the initial value problem" : "fails " + failing);
      if (&v != &variants.front()) leaf.status = Status::Info;
      readings.add(std::move(leaf));
    }
    readings.add(CheckNode::info("holding_variants", holding.empty() ? "none" : holding));
    root.add(std::move(readings));
  }

  // Exact group law with independent random times.
  {
    PointSampler sampler(spec);
    int tested = 0;
    long rejected = 0;
    CheckNode leaf = CheckNode::leaf("group-law", true);
    while (tested < spec.count && leaf.status == Status::Pass) {
      Point p = detail::ambient_point(sampler);
      FlowTime a = detail::random_flow_time(sampler), b = detail::random_flow_time(sampler);
      try {
        Point lhs = apply_flow(f, b, apply_flow(f, a, p));
        Point rhs = apply_flow(f, FlowTime::compose(a, b), p);
        for (VarId x : kAmbientCoords)
          if (!(lhs.at(x) == rhs.at(x))) {
            leaf = CheckNode::leaf("group-law", false, "exp(sX)exp(tX) != exp((s+t)X)");
            leaf.witness = p.str();
          }
        ++tested;
      } catch (const DivisionByZero&) {
        if (++rejected > static_cast<long>(spec.count) * spec.rejections_per_point) throw SamplingExhausted("group law sampling");
      }
    }
    if (leaf.status == Status::Pass) leaf.detail = std::to_string(tested) + " points";
    root.add(std::move(leaf));
  }

  // exp(tX) is a rigid map that preserves the graph.
  RigidMap m = flow_rigid_map(f);
  CheckNode shape = CheckNode::group("rigid-shape");
  shape.add(CheckNode::from_zero_test("f1-free-of-w", is_zero_on_samples(differentiate(m.f1, w), spec)));
  shape.add(CheckNode::from_zero_test("f2-free-of-w", is_zero_on_samples(differentiate(m.f2, w), spec)));
  shape.add(CheckNode::from_zero_test("a-free-of-w", is_zero_on_samples(differentiate(m.a, w), spec)));
  shape.add(CheckNode::from_zero_test("a-free-of-z1", is_zero_on_samples(differentiate(m.a, z1), spec)));
  shape.add(CheckNode::from_zero_test("a-free-of-z2", is_zero_on_samples(differentiate(m.a, z2), spec)));
  shape.add(CheckNode::from_zero_test("a-real", is_zero_on_samples(conjugate_map_expr(m.a) - m.a, spec)));
  shape.add(detail::nowhere_zero("a-nonzero", m.a, spec));
  root.add(std::move(shape));

  Expr F = mlc_graph();
  {
    std::map<VarId, Expr> image{{z1, f.gamma[0]}, {z2, f.gamma[1]}, {zb1, conjugate_map_expr(f.gamma[0])},
                                {zb2, conjugate_map_expr(f.gamma[1])}};
    Expr r = (f.gamma[2] + conjugate_map_expr(f.gamma[2])) / 2 - substitute(F, image);
    root.add(CheckNode::from_zero_test("on-surface", is_zero_on_samples(on_graph(r, F), inside_unit_disc(spec))));
  }
  root.add(CheckNode::from_zero_test("graph-invariance", is_zero_on_samples(transform_graph(F, m) - F, spec)));

  if (transcendental) {
    // Float evaluation at real times with E = e^t.
    PointSampler sampler(spec);
    const AmbientVectorField X = infinitesimal_fields()[index - 1];
    std::array<Expr, 3> dgamma{time_derivative(f.gamma[0]), time_derivative(f.gamma[1]), time_derivative(f.gamma[2])};
    BigFloat worst_ode = 0, worst_group = 0, worst_surface = 0;
    int points = 0;
    while (points < std::min(spec.count, 10)) {
      Point p = detail::ambient_point(sampler);
      if (p.at(z2).gauss().norm() >= 1) continue;
      Rational v = sampler.rational();
      Point ps = p;
      Evaluator<GaussQ> graph(p);
      ps.set_conj(w, Scalar(graph(F) + GaussQ(0, v)));
      ++points;
      for (const auto& s : detail::float_times()) {
        FlowTime ft = FlowTime::real(s);
        Point q = with_time(p, ft);
        Point g = apply_flow(f, ft, p);
        Evaluator<ComplexF> at_q(q), at_g(g);
        for (int j = 0; j < 3; ++j) {
          Scalar lhs(at_q(dgamma[j])), rhs(at_g(X.coeff[j].to_expr()));
          worst_ode = std::max(worst_ode, relative_distance(lhs, rhs));
        }
        for (const auto& s2 : detail::float_times()) {
          Point lhs = apply_flow(f, FlowTime::real(s2), g);
          Point rhs = apply_flow(f, FlowTime::real(s + s2), p);
          worst_group = std::max(worst_group, detail::max_distance(lhs, rhs));
        }
        Point gs = apply_flow(f, ft, ps);
        Scalar u(ComplexF(gs.at(w).as_float().re()));
        worst_surface = std::max(worst_surface, relative_distance(u, evaluate(F, gs)));
      }
    }
    auto leaf = [&](const char* name, const BigFloat& worst) {
      return CheckNode::leaf(name, worst <= kFloatTolerance, "max relative error " + detail::fmt(worst) + " at t in {+-1/4, +-1/2}");
    };
    root.add(leaf("ode-residual-float", worst_ode));
    root.add(leaf("group-law-float", worst_group));
    root.add(leaf("on-surface-float", worst_surface));
  }
  return root;
}

inline CheckNode flow_suite(const SampleSpec& spec) {
  CheckNode root = CheckNode::group("flows");
  for (int i = 1; i <= kRigidFieldCount; ++i) root.add(flow_checks(i, spec));
  return root;
}

// ---------------------------------------------------------------------------
// Model structure equations
// ---------------------------------------------------------------------------

// The model's initial structure equations as printed for the bracket-defined
// orientation, with D = 1 - z2 zb2.
inline std::array<TwoFormTable, 3> model_structure_claims() {
  using namespace var;
  Expr D = 1 - Expr(z2) * Expr(zb2);
  auto t = std::array<TwoFormTable, 3>{zero_table(), zero_table(), zero_table()};
  t[0][wedge_index(0, 2)] = Expr(zb2) / D;
  t[0][wedge_index(0, 4)] = Expr(z2) / D;
  t[0][wedge_index(1, 3)] = imag_unit();
  t[1][wedge_index(1, 2)] = Expr(zb2) / D;
  t[1][wedge_index(2, 3)] = neg(inv(D));
  return t;
}

inline CheckNode model_structure_suite(const SampleSpec& spec, Convention convention = Convention::LeviPositive) {
  using namespace var;
  static constexpr const char* kForms[] = {"d(rho0)", "d(kappa0)", "d(zeta0)", "d(kappabar0)", "d(zetabar0)"};
  CheckNode root = CheckNode::group("model-structure");
  Hypersurface H(mlc_graph(), convention);
  SampleBatch batch = H.batch(spec);
  Expr D = 1 - Expr(z2) * Expr(zb2);
  Expr Fz1 = (Expr(zb1) + Expr(z1) * Expr(zb2)) / D;

  CheckNode fns = CheckNode::group("fundamental-functions");
  fns.add(CheckNode::from_zero_test("k", batch.zero_test(H.k() + Fz1)));
  fns.add(CheckNode::from_zero_test("P", batch.zero_test(H.P())));
  fns.add(CheckNode::from_zero_test("L1(k)", batch.zero_test(H.L1k() + Expr(zb2) / D)));
  fns.add(CheckNode::from_zero_test("L1bar(k)", batch.zero_test(H.Lb1k() + inv(D))));
  root.add(std::move(fns));

  // The displayed frame: L1, the kernel field and a multiple of d/dv.
  CheckNode frame = CheckNode::group("frame");
  Expr i = imag_unit();
  frame.add(CheckNode::from_zero_test("L1", batch.zero_test(H.L1()[v] + i * Fz1)));
  frame.add(CheckNode::from_zero_test("K-z1", batch.zero_test(H.K()[z1] + Fz1)));
  frame.add(CheckNode::from_zero_test("K-v", batch.zero_test(H.K()[v] - i / 2 * pow(Fz1, 2))));
  // The displayed real field is -2/D d/dv, the bracket-defined orientation of T.
  frame.add(CheckNode::from_zero_test("T", batch.zero_test(H.T()[v] - (-H.orientation()) * (-2 / D))));
  root.add(std::move(frame));

  auto computed = dcoframe_coeffs(H.frame(), H.coframe());
  auto claims3 = sign_map(model_structure_claims(), convention);
  std::array<TwoFormTable, 5> claims{claims3[0], claims3[1], claims3[2], conjugate_table(claims3[1]),
                                     conjugate_table(claims3[2])};
  CheckNode tables = CheckNode::group("structure-equations");
  for (int k = 0; k < 5; ++k) tables.add(check_structure_table(kForms[k], computed[k], claims[k], batch));
  root.add(std::move(tables));
  return root;
}

inline CheckNode model_suite(const SampleSpec& spec, Convention convention = Convention::LeviPositive) {
  CheckNode root = CheckNode::group("model");
  auto validation = validate(mlc_graph(), spec, convention);
  CheckNode graph = validation.report.checks;
  graph.name = "graph-validates";
  root.add(std::move(graph));
  root.add(tangency_suite(spec));
  root.add(commutator_table_check());
  root.add(closure_check());
  root.add(flow_suite(spec));
  root.add(model_structure_suite(spec, convention));
  return root;
}

}  // namespace crcartan
