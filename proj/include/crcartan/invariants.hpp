#pragma once

#include "hypersurface.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crcartan {

// I0 in closed form.
inline Expr I0_expr(const Hypersurface& H) {
  const auto &L1 = H.L1(), &Lb1 = H.Lb1(), &K = H.K();
  const Expr &Lb1k = H.Lb1k(), &L1kb = H.L1kb();
  Expr LbLbk = Lb1.apply(Lb1k);
  return neg(K.apply(LbLbk)) / (3 * pow(Lb1k, 2)) + K.apply(Lb1k) * LbLbk / (3 * pow(Lb1k, 3)) +
         2 * L1.apply(L1kb) / (3 * L1kb) + 2 * L1.apply(Lb1k) / (3 * Lb1k);
}

inline Expr V0_expr(const Hypersurface& H) {
  const auto& Lb1 = H.Lb1();
  const Expr &Lb1k = H.Lb1k(), &Pb = H.Pbar();
  Expr q = Lb1.apply(Lb1k) / Lb1k;
  return neg(Lb1.apply(Lb1.apply(Lb1k))) / (3 * Lb1k) + rational(5, 9) * pow(q, 2) - q * Pb / 9 +
         Lb1.apply(Pb) / 3 - Pb * Pb / 9;
}

struct ZRoute {
  Expr I0, V0;
};

// I0 = Z5 - conj(Z8), V0 = Z6 from the computed final-base torsions.
inline ZRoute Z_route(const FinalTorsions& t) { return {t.Z5 - conjugate(t.Z8), t.Z6}; }

// Bracket expression behind the secondary invariant:
//   L1bar(I) - Bbar Kbar(I)/L1(kbar) + B I - K(V)/L1bar(k).
inline Expr Q0_bracket(const Hypersurface& H, const Expr& I0, const Expr& V0) {
  return H.Lb1().apply(I0) - H.Bbar() * H.Kb().apply(I0) / H.L1kb() + H.B() * I0 - H.K().apply(V0) / H.Lb1k();
}

// Q0 = (1/2) * bracket, the normalization used for computations.
inline Expr Q0_expr(const Hypersurface& H, const Expr& I0, const Expr& V0) { return Q0_bracket(H, I0, V0) / 2; }

// Introduction form of Q0, obtained with Kbar(I0)/L1(kbar) = -2 conj(I0). The
// coefficient of conj(I0) uses P when pbar_in_conj_term is false.
inline Expr Q0_intro(const Hypersurface& H, const Expr& I0, const Expr& V0, bool pbar_in_conj_term) {
  const auto &L1 = H.L1(), &Lb1 = H.Lb1();
  const Expr &L1kb = H.L1kb(), &Lb1k = H.Lb1k();
  const Expr& p = pbar_in_conj_term ? H.Pbar() : H.P();
  return Lb1.apply(I0) / 2 - (p - L1.apply(L1kb) / L1kb) * conjugate(I0) / 3 -
         (H.Pbar() - Lb1.apply(Lb1k) / Lb1k) * I0 / 6 - H.K().apply(V0) / (2 * Lb1k);
}

// ---------------------------------------------------------------------------
// Lifted derivations on M x G with formal group parameters c, cb
// ---------------------------------------------------------------------------

enum class LiftVariant {
  Derived,  // from the absorption solution with x_kappabar = B/cb and x_zeta = (cb/c) L1(k)/L1bar(k)
  Printed,  // as displayed: +(cb/c) Bbar d/dcb in d_kappa and -(cb/c) L1(k)/L1bar(k) d/dc in d_zeta
};

struct LiftedDerivations {
  VectorField alpha, rho, kappa, zeta, alphabar, kappabar, zetabar;
};

inline LiftedDerivations lifted_derivatives(const Hypersurface& H, const FinalTorsions& t,
                                            LiftVariant variant = LiftVariant::Derived) {
  Expr c = var::c, cb = var::cb;
  const Expr &B = H.B(), &Bb = H.Bbar();
  VectorField dc = VectorField::partial(var::c), dcb = VectorField::partial(var::cb);
  VectorField L1p = H.adapted_frame()[1], Kp = H.adapted_frame()[2];

  LiftedDerivations d;
  d.alpha = c * dc;
  d.rho = inv(c * cb) * H.T();
  Expr cb_term = variant == LiftVariant::Derived ? neg(cb / c * Bb) : cb / c * Bb;
  d.kappa = inv(c) * L1p + (t.R1 + Bb) * dc + cb_term * dcb;
  Expr ratio = H.L1k() / H.Lb1k();
  Expr c_term = variant == LiftVariant::Derived ? neg(cb * ratio) : neg(cb / c * ratio);
  d.zeta = (cb / c) * Kp + c_term * dc;
  d.alphabar = d.alpha.conjugate();
  d.kappabar = d.kappa.conjugate();
  d.zetabar = d.zeta.conjugate();
  return d;
}

enum class V0Weight { CSquared, CCbar, CbSquared };

inline const char* weight_name(V0Weight w) {
  switch (w) {
    case V0Weight::CSquared: return "1/c^2";
    case V0Weight::CCbar: return "1/(c*cb)";
    case V0Weight::CbSquared: return "1/cb^2";
  }
  return "?";
}

inline Expr V0_weight(V0Weight w) {
  Expr c = var::c, cb = var::cb;
  switch (w) {
    case V0Weight::CSquared: return inv(c * c);
    case V0Weight::CCbar: return inv(c * cb);
    case V0Weight::CbSquared: return inv(cb * cb);
  }
  return one();
}

// (S5)_kappabar - (S6)_zeta with S5 = I0/c and S6 = weight * V0.
inline Expr lifted_difference(const LiftedDerivations& d, const Expr& I0, const Expr& V0, V0Weight w) {
  Expr S5 = I0 / Expr(var::c), S6 = V0_weight(w) * V0;
  return d.kappabar.apply(S5) - d.zeta.apply(S6);
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

// Optional perturbations injected into the invariants, for negative testing.
struct FaultInjection {
  std::optional<Expr> I0, V0, torsion_relation;
};

struct InvariantExprs {
  Expr I0, V0, Q0, Q0_bracket;
  FinalTorsions torsions;
};

inline InvariantExprs invariant_exprs(const Hypersurface& H, const FaultInjection& fault = {}) {
  InvariantExprs out;
  out.torsions = final_torsions(H);
  out.I0 = I0_expr(H);
  out.V0 = V0_expr(H);
  if (fault.I0) out.I0 = out.I0 + *fault.I0;
  if (fault.V0) out.V0 = out.V0 + *fault.V0;
  out.Q0 = Q0_expr(H, out.I0, out.V0);
  out.Q0_bracket = Q0_bracket(H, out.I0, out.V0);
  return out;
}

inline CheckNode check_route_agreement(const Hypersurface& H, const InvariantExprs& inv, SampleBatch& batch) {
  CheckNode root = CheckNode::group("route-agreement");
  ZRoute z = Z_route(inv.torsions);
  FinalClosedForms f = final_closed_forms(H);
  root.add(CheckNode::from_zero_test("I0-closed-vs-Z", batch.zero_test(inv.I0 - z.I0)));
  root.add(CheckNode::from_zero_test("V0-closed-vs-Z", batch.zero_test(inv.V0 - z.V0)));
  // The Z-route through the displayed closed forms of Z5, Z6, Z8.
  root.add(CheckNode::from_zero_test("I0-closed-vs-explicit-Z",
                                     batch.zero_test(inv.I0 - (f.Z5_explicit - conjugate(f.Z8_explicit)))));
  root.add(CheckNode::from_zero_test("V0-closed-vs-explicit-Z", batch.zero_test(inv.V0 - f.Z6_explicit)));
  return root;
}

inline CheckNode check_kbar_I0(const Hypersurface& H, const Expr& I0, SampleBatch& batch) {
  return CheckNode::from_zero_test("Kbar(I0)",
                                   batch.zero_test(H.Kb().apply(I0) / H.L1kb() + 2 * conjugate(I0)));
}

inline CheckNode check_torsion_relation(const Hypersurface& H, const FinalTorsions& t, SampleBatch& batch,
                                  const std::optional<Expr>& fault = std::nullopt) {
  const auto &L1 = H.L1(), &Lb1 = H.Lb1(), &K = H.K(), &Kb = H.Kb();
  const Expr &B = H.B(), &Bb = H.Bbar(), &Lb1k = H.Lb1k(), &L1kb = H.L1kb();
  Expr lhs = Lb1.apply(t.Z5) - K.apply(t.Z6) / Lb1k;
  Expr rhs = Bb * Kb.apply(t.Z5) / L1kb + t.Z5 * t.K6 - t.Z6 * t.K5 - L1.apply(t.Z8) + B * K.apply(t.Z8) / Lb1k +
             t.Z8 * conjugate(t.K6) + t.Z9 * conjugate(t.Z6);
  if (fault) rhs = rhs + *fault;
  return CheckNode::from_zero_test("torsion-relation", batch.zero_test(lhs - rhs));
}

// Draws the surface points with nonzero rational c attached.
inline SampleBatch lifted_batch(const Hypersurface& H, const SampleSpec& spec) {
  SampleSpec s = spec;
  auto previous = s.exclusion;
  s.exclusion = [previous](const Point& p) {
    return (!previous || previous(p)) && !p.at(var::c).is_zero();
  };
  return SampleBatch(H.sample_points(s, var::c.bit()));
}

inline CheckNode check_secondary(const Hypersurface& H, const InvariantExprs& inv, SampleBatch& batch,
                                 SampleBatch& lifted, const FaultInjection& fault = {}) {
  CheckNode root = CheckNode::group("secondary");
  root.add(CheckNode::from_zero_test("Q0-real", batch.zero_test(conjugate(inv.Q0) - inv.Q0)));
  root.add(check_kbar_I0(H, inv.I0, batch));
  root.add(check_torsion_relation(H, inv.torsions, batch, fault.torsion_relation));

  // Route used for the reality statement: A_kappabar is real once Z9 = -conj(K5).
  const auto& t = inv.torsions;
  Expr a = neg(t.Z6 * t.K5) + t.Z9 * conjugate(t.Z6) - H.L1().apply(t.Z8) - H.Lb1().apply(conjugate(t.Z8)) +
           H.B() * H.K().apply(t.Z8) / H.Lb1k() + H.Bbar() * H.Kb().apply(conjugate(t.Z8)) / H.L1kb() -
           t.Z8 * H.Bbar() - conjugate(t.Z8) * H.B();
  root.add(CheckNode::from_zero_test("A_kappabar-real", batch.zero_test(conjugate(a) - a)));

  CheckNode q = detail::variant_check(
      "Q0-intro-form", batch,
      {{"P-in-conj-term", Q0_intro(H, inv.I0, inv.V0, false) - inv.Q0},
       {"printed-Pbar-in-conj-term", Q0_intro(H, inv.I0, inv.V0, true) - inv.Q0}});
  root.add(std::move(q));

  // Lifted-derivative identity, all readings recorded; the derived fields with
  // weight 1/cb^2 against the display's (unhalved) Q0 is the checked one.
  Expr cc = Expr(var::c) * Expr(var::cb);
  std::vector<std::pair<std::string, Expr>> variants;
  for (auto lv : {LiftVariant::Derived, LiftVariant::Printed}) {
    LiftedDerivations d = lifted_derivatives(H, t, lv);
    for (auto w : {V0Weight::CbSquared, V0Weight::CSquared, V0Weight::CCbar}) {
      Expr diff = lifted_difference(d, inv.I0, inv.V0, w);
      std::string tag = std::string(lv == LiftVariant::Derived ? "derived-fields" : "printed-fields") +
                        ",S6=" + weight_name(w);
      variants.emplace_back(tag + ",Q0-unhalved", diff - inv.Q0_bracket / cc);
      variants.emplace_back(tag + ",Q0-halved", diff - inv.Q0 / cc);
    }
  }
  root.add(detail::variant_check("lifted-identity", lifted, variants));

  // Sanity of the lifted fields on c-independent functions.
  LiftedDerivations d = lifted_derivatives(H, t);
  root.add(CheckNode::from_zero_test("d_alpha(c)=c", lifted.zero_test(d.alpha.apply(Expr(var::c)) - Expr(var::c))));
  root.add(CheckNode::from_zero_test("d_rho(k)=0", lifted.zero_test(d.rho.apply(H.k()))));
  return root;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class Verdict { ModelEquivalent, NotModelEquivalent, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ModelEquivalent: return "ModelEquivalent";
    case Verdict::NotModelEquivalent: return "NotModelEquivalent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

struct Classification {
  Verdict verdict = Verdict::Inconclusive;
  std::string reason;
  std::optional<std::string> invariant;  // which invariant has the witness
  std::optional<Point> witness;
  std::optional<Scalar> value;
  int points_tested = 0;
  SampleSpec spec;
};

inline Classification classify(const Hypersurface& H, const SampleSpec& spec, const FaultInjection& fault = {}) {
  Classification out;
  out.spec = spec;
  InvariantExprs inv = invariant_exprs(H, fault);
  try {
    SampleBatch batch = H.batch(spec);
    for (auto [name, e] : {std::pair<const char*, Expr>{"I0", inv.I0}, {"V0", inv.V0}}) {
      ZeroTest z = batch.zero_test(e);
      out.points_tested += z.points_tested;
      if (!z.zero && z.value) {
        out.verdict = Verdict::NotModelEquivalent;
        out.invariant = name;
        out.witness = z.witness;
        out.value = z.value;
        out.reason = std::string(name) + " is nonzero at a sampled point";
        return out;
      }
      if (!z.zero) {
        out.reason = std::string(name) + ": " + z.note;
        return out;
      }
    }
  } catch (const SamplingExhausted& e) {
    out.reason = e.what();
    return out;
  }
  out.verdict = Verdict::ModelEquivalent;
  out.reason = "I0 and V0 vanish at every sampled point";
  return out;
}

// Exact invariant values at one point; Q0 in the halved normalization.
struct InvariantValues {
  Point point;
  Scalar I0, V0, Q0;
  Scalar I0_route_delta, V0_route_delta;
};

inline InvariantValues invariant_values(const InvariantExprs& inv, const Point& p) {
  ZRoute z = Z_route(inv.torsions);
  InvariantValues out{p, evaluate(inv.I0, p), evaluate(inv.V0, p), evaluate(inv.Q0, p),
                      evaluate(inv.I0 - z.I0, p), evaluate(inv.V0 - z.V0, p)};
  return out;
}

}  // namespace crcartan
