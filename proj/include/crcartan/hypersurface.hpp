#pragma once

#include "fields.hpp"
#include "report.hpp"

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace crcartan {

// Orientation of the real direction T.
//   LeviPositive:   T = l d/dv, so that [L1, L1bar] = i T holds literally.
//   BracketDefined: T = -l d/dv, so that d(rho0) carries +i kappa0^kappabar0.
// The two differ by rho0 -> -rho0; see sign_map.
enum class Convention { LeviPositive, BracketDefined };

inline const char* convention_name(Convention c) {
  return c == Convention::LeviPositive ? "levi-positive" : "bracket-defined";
}

inline constexpr std::uint32_t kSurfaceMask =
    var::z1.bit() | var::z2.bit() | var::zb1.bit() | var::zb2.bit() | var::v.bit();

using Matrix2 = std::array<std::array<Expr, 2>, 2>;

inline Matrix2 levi_matrix(const Expr& F) {
  auto d = [&](VarId a, VarId b) { return 2 * differentiate(F, {a, b}); };
  return {{{d(var::z1, var::zb1), d(var::z2, var::zb1)}, {d(var::z1, var::zb2), d(var::z2, var::zb2)}}};
}

inline Expr determinant(const Matrix2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

// Re-expresses structure tables written for the bracket-defined orientation in
// the given convention: rho0 flips sign, so d(rho0) entries without rho and
// rho-entries of the other forms change sign.
template <std::size_t N>
std::array<TwoFormTable, N> sign_map(std::array<TwoFormTable, N> tables, Convention c) {
  if (c == Convention::BracketDefined) return tables;
  for (std::size_t i = 0; i < N; ++i)
    for (int p = 0; p < 10; ++p) {
      bool has_rho = kWedgePairs[p].first == 0;
      if ((i == 0) != has_rho) tables[i][p] = neg(tables[i][p]);
    }
  return tables;
}

struct ValidationReport {
  bool rigid = false, real = false, levi_nonzero = false, rank_one = false, two_nondegenerate = false;
  CheckNode checks = CheckNode::group("validate");
  bool ok() const { return rigid && real && levi_nonzero && rank_one && two_nondegenerate; }
};

class Hypersurface;

struct Validation {
  ValidationReport report;
  std::shared_ptr<const Hypersurface> surface;  // set iff report.ok()
};

// A validated rigid graph u = F(z, zbar) of constant Levi rank 1 that is
// 2-nondegenerate. All fundamental functions are built eagerly.
class Hypersurface {
 public:
  Hypersurface(Expr F, Convention convention) : F_(std::move(F)), convention_(convention) { build(); }

  const Expr& F() const { return F_; }
  Convention convention() const { return convention_; }
  // +1 or -1 with T = sign * l d/dv.
  int orientation() const { return convention_ == Convention::LeviPositive ? 1 : -1; }

  const Expr& ell() const { return ell_; }
  const Expr& k() const { return k_; }
  const Expr& kbar() const { return kbar_; }
  const Expr& P() const { return P_; }
  const Expr& Pbar() const { return Pbar_; }
  const Expr& B() const { return B_; }
  const Expr& Bbar() const { return Bbar_; }
  const Expr& L1k() const { return L1k_; }
  const Expr& Lb1k() const { return Lb1k_; }
  const Expr& L1kb() const { return L1kb_; }
  const Expr& Lb1kb() const { return Lb1kb_; }

  const VectorField& T() const { return frame_[0]; }
  const VectorField& L1() const { return frame_[1]; }
  const VectorField& K() const { return frame_[2]; }
  const VectorField& Lb1() const { return frame_[3]; }
  const VectorField& Kb() const { return frame_[4]; }
  const VectorField& L2() const { return L2_; }

  const Frame& frame() const { return frame_; }
  const Coframe& coframe() const { return coframe_; }
  // Frame dual to (rho0, kappa0, zetahat0, ...) with zetahat0 = L1bar(k) zeta0.
  const Frame& hat_frame() const { return hat_frame_; }
  const Coframe& hat_coframe() const { return hat_coframe_; }
  // Frame dual to (rho0, kappa0, zeta'0, ...) with zeta'0 = zetahat0 + B kappa0.
  const Frame& adapted_frame() const { return adapted_frame_; }
  const Coframe& adapted_coframe() const { return adapted_coframe_; }

  // Jets F_{a b} and F_{a b c}.
  Expr jet(std::initializer_list<VarId> xs) const { return differentiate(F_, xs); }

  // Must be nonzero at admissible points.
  std::vector<Expr> nonzero_guards() const { return {ell_, Lb1k_, L1kb_}; }
  // Must evaluate without division by zero at admissible points.
  std::vector<Expr> finite_guards() const { return {F_, k_, P_, Pbar_, B_, Bbar_, L1k_, Lb1kb_}; }

  SampleSpec admissible(SampleSpec spec) const {
    auto finite = finite_guards();
    auto previous = spec.exclusion;
    spec.exclusion = [finite, previous](const Point& p) {
      if (previous && !previous(p)) return false;
      try {
        Evaluator<GaussQ> ev(p);
        for (const auto& g : finite) ev(g);
      } catch (const DivisionByZero&) {
        return false;
      }
      return true;
    };
    return spec;
  }

  std::vector<Point> sample_points(const SampleSpec& spec, std::uint32_t extra_mask = 0) const {
    return draw_points(kSurfaceMask | extra_mask, admissible(spec), nonzero_guards());
  }

  SampleBatch batch(const SampleSpec& spec) const { return SampleBatch(sample_points(spec)); }

 private:
  void build() {
    using namespace var;
    Expr i = imag_unit();
    Expr Fz1 = differentiate(F_, z1), Fz2 = differentiate(F_, z2);
    Expr Fzb1 = differentiate(F_, zb1), Fzb2 = differentiate(F_, zb2);
    Expr F11 = differentiate(Fz1, zb1), F21 = differentiate(Fz2, zb1);

    ell_ = 2 * F11;
    k_ = neg(F21 / F11);
    kbar_ = conjugate(k_);
    P_ = differentiate(ell_, z1) / ell_;
    Pbar_ = conjugate(P_);

    VectorField L1 = VectorField::partial(z1).set(v, neg(i * Fz1));
    L2_ = VectorField::partial(z2).set(v, neg(i * Fz2));
    VectorField K = k_ * L1 + L2_;
    VectorField T = VectorField().set(v, orientation() * ell_);
    frame_ = {T, L1, K, L1.conjugate(), K.conjugate()};

    L1k_ = L1.apply(k_);
    Lb1k_ = frame_[3].apply(k_);
    L1kb_ = conjugate(Lb1k_);
    Lb1kb_ = conjugate(L1k_);
    B_ = neg(Pbar_) / 3 + frame_[3].apply(Lb1k_) / (3 * Lb1k_);
    Bbar_ = conjugate(B_);

    OneForm rho = OneForm()
                      .set(v, one())
                      .set(z1, i * Fz1)
                      .set(z2, i * Fz2)
                      .set(zb1, neg(i * Fzb1))
                      .set(zb2, neg(i * Fzb2));
    rho = inv(orientation() * ell_) * rho;
    OneForm kappa = OneForm().set(z1, one()).set(z2, neg(k_));
    OneForm zeta = OneForm().set(z2, one());
    coframe_ = {rho, kappa, zeta, kappa.conjugate(), zeta.conjugate()};

    OneForm zeta_hat = Lb1k_ * zeta;
    VectorField K_hat = inv(Lb1k_) * K;
    hat_coframe_ = {rho, kappa, zeta_hat, kappa.conjugate(), zeta_hat.conjugate()};
    hat_frame_ = {T, L1, K_hat, frame_[3], K_hat.conjugate()};

    OneForm zeta_prime = zeta_hat + B_ * kappa;
    VectorField L1_prime = L1 - B_ * K_hat;
    adapted_coframe_ = {rho, kappa, zeta_prime, kappa.conjugate(), zeta_prime.conjugate()};
    adapted_frame_ = {T, L1_prime, K_hat, L1_prime.conjugate(), K_hat.conjugate()};
  }

  Expr F_;
  Convention convention_;
  Expr ell_, k_, kbar_, P_, Pbar_, B_, Bbar_, L1k_, Lb1k_, L1kb_, Lb1kb_;
  VectorField L2_;
  Frame frame_, hat_frame_, adapted_frame_;
  Coframe coframe_, hat_coframe_, adapted_coframe_;
};

namespace detail {

// Nonzero at every sampled point where e is defined.
inline CheckNode nowhere_zero(std::string name, const Expr& e, const SampleSpec& spec) {
  PointSampler sampler(spec);
  long budget = static_cast<long>(spec.count) * spec.rejections_per_point, rejected = 0;
  int tested = 0;
  while (tested < spec.count) {
    Point p = sampler.draw(e->var_mask() | var::z1.bit());
    GaussQ value;
    try {
      if (spec.exclusion && !spec.exclusion(p)) throw DivisionByZero("excluded");
      value = Evaluator<GaussQ>(p)(e);
    } catch (const DivisionByZero&) {
      if (++rejected > budget) throw SamplingExhausted("sampling exhausted while testing " + name);
      continue;
    }
    ++tested;
    if (value.is_zero()) {
      CheckNode n = CheckNode::leaf(std::move(name), false, "vanishes at a sampled point");
      n.witness = p.str();
      n.value = "0";
      return n;
    }
  }
  return CheckNode::leaf(std::move(name), true, std::to_string(tested) + " points");
}

}  // namespace detail

// Checks the standing hypotheses; on success the surface is built.
inline Validation validate(const Expr& F, const SampleSpec& spec = {},
                           Convention convention = Convention::LeviPositive) {
  Validation out;
  auto& r = out.report;
  const std::uint32_t allowed = var::z1.bit() | var::z2.bit() | var::zb1.bit() | var::zb2.bit();

  bool vars_ok = (F->var_mask() & ~(allowed | var::v.bit())) == 0;
  if (!vars_ok) {
    std::string names;
    for (VarId x : free_vars(F))
      if (!(allowed & x.bit()) && x != var::v) names += (names.empty() ? "" : ", ") + std::string(x.name());
    r.checks.add(CheckNode::leaf("rigid", false, "graph uses non-surface variables: " + names));
  } else {
    CheckNode rigid = CheckNode::from_zero_test("rigid", is_zero_on_samples(differentiate(F, var::v), spec));
    r.rigid = rigid.status == Status::Pass;
    r.checks.add(std::move(rigid));
  }
  if (!vars_ok) {
    for (const char* name : {"real", "levi_nonzero", "rank_one", "two_nondegenerate"})
      r.checks.add(CheckNode::leaf(name, false, "not evaluated"));
    return out;
  }

  CheckNode real = CheckNode::from_zero_test("real", is_zero_on_samples(conjugate(F) - F, spec));
  r.real = real.status == Status::Pass;
  r.checks.add(std::move(real));

  Matrix2 levi = levi_matrix(F);
  CheckNode levi_nonzero = detail::nowhere_zero("levi_nonzero", levi[0][0], spec);
  r.levi_nonzero = levi_nonzero.status == Status::Pass;
  r.checks.add(std::move(levi_nonzero));

  CheckNode rank = CheckNode::from_zero_test("rank_one", is_zero_on_samples(determinant(levi), spec));
  r.rank_one = rank.status == Status::Pass;
  r.checks.add(std::move(rank));

  if (!r.levi_nonzero) {
    r.checks.add(CheckNode::leaf("two_nondegenerate", false, "not evaluated: F_{z1 zb1} vanishes"));
    return out;
  }
  // k and L1bar(k) do not depend on the orientation of T.
  auto H = std::make_shared<Hypersurface>(F, convention);
  CheckNode nondeg = detail::nowhere_zero("two_nondegenerate", H->Lb1k(), spec);
  r.two_nondegenerate = nondeg.status == Status::Pass;
  r.checks.add(std::move(nondeg));

  if (r.ok()) out.surface = std::move(H);
  return out;
}

// ---------------------------------------------------------------------------
// Identity suites
// ---------------------------------------------------------------------------

namespace detail {

inline CheckNode table_check(const std::string& name, const TwoFormTable& computed, const TwoFormTable& claimed,
                             SampleBatch& batch) {
  CheckNode node = CheckNode::group(name);
  for (int p = 0; p < 10; ++p) node.add(CheckNode::from_zero_test(kWedgeNames[p], batch.zero_test(computed[p] - claimed[p])));
  return node;
}

// Records which transcription variants hold; fails only if the preferred one
// does not.
inline CheckNode variant_check(const std::string& name, SampleBatch& batch,
                               const std::vector<std::pair<std::string, Expr>>& variants, std::size_t preferred = 0) {
  CheckNode node = CheckNode::group(name);
  std::string holding;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    ZeroTest z = batch.zero_test(variants[i].second);
    if (z.zero) holding += (holding.empty() ? "" : ", ") + variants[i].first;
    CheckNode leaf = CheckNode::from_zero_test(variants[i].first, z);
    if (i != preferred) {
      leaf.status = Status::Info;
      leaf.detail = z.zero ? "holds" : "does not hold";
    }
    node.add(std::move(leaf));
  }
  node.add(CheckNode::info("holding_variants", holding.empty() ? "none" : holding));
  return node;
}

}  // namespace detail

inline CheckNode check_structure_table(const std::string& name, const TwoFormTable& computed,
                                       const TwoFormTable& claimed, SampleBatch& batch) {
  return detail::table_check(name, computed, claimed, batch);
}

// The ten bracket relations among (T, L1, K, L1bar, Kbar); each right side is
// a coefficient vector over the frame.
struct BracketClaim {
  const char* name;
  int a, b;
  std::array<Expr, 5> rhs;
};

inline std::vector<BracketClaim> bracket_claims(const Hypersurface& H) {
  Expr z = zero(), i = imag_unit();
  // [L1, L1bar] = i * orientation * T.
  Expr levi = H.orientation() * i;
  return {
      {"[T,L1]", 0, 1, {neg(H.P()), z, z, z, z}},
      {"[T,K]", 0, 2, {H.L1k(), z, z, z, z}},
      {"[T,L1bar]", 0, 3, {neg(H.Pbar()), z, z, z, z}},
      {"[T,Kbar]", 0, 4, {H.Lb1kb(), z, z, z, z}},
      {"[L1,L1bar]", 1, 3, {levi, z, z, z, z}},
      {"[L1,K]", 1, 2, {z, H.L1k(), z, z, z}},
      {"[L1,Kbar]", 1, 4, {z, z, z, H.L1kb(), z}},
      {"[K,L1bar]", 2, 3, {z, neg(H.Lb1k()), z, z, z}},
      {"[K,Kbar]", 2, 4, {z, z, z, z, z}},
      {"[L1bar,Kbar]", 3, 4, {z, z, z, H.Lb1kb(), z}},
  };
}

inline CheckNode check_bracket_identities(const Hypersurface& H, SampleBatch& batch) {
  static constexpr const char* kFrameNames[] = {"T", "L1", "K", "L1bar", "Kbar"};
  CheckNode root = CheckNode::group("brackets");
  FrameSolver solver(H.frame(), kSurfaceCoords, batch.point(0));
  for (const auto& claim : bracket_claims(H)) {
    CheckNode node = CheckNode::group(claim.name);
    auto coeffs = solver.solve(lie_bracket(H.frame()[claim.a], H.frame()[claim.b]));
    for (int j = 0; j < 5; ++j)
      node.add(CheckNode::from_zero_test(kFrameNames[j], batch.zero_test(coeffs[j] - claim.rhs[j])));
    root.add(std::move(node));
  }
  return root;
}

inline CheckNode check_lemma_identities(const Hypersurface& H, SampleBatch& batch) {
  using namespace var;
  CheckNode root = CheckNode::group("lemmas");
  const auto &L1 = H.L1(), &Lb1 = H.Lb1(), &K = H.K(), &T = H.T();
  Expr F11 = H.jet({z1, zb1}), F21 = H.jet({z2, zb1});
  Expr F211 = H.jet({z2, zb1, z1}), F111 = H.jet({z1, zb1, z1});
  Expr F21b = H.jet({z2, zb1, zb1}), F11b = H.jet({z1, zb1, zb1});

  root.add(CheckNode::from_zero_test("K(kbar)", batch.zero_test(K.apply(H.kbar()))));
  root.add(CheckNode::from_zero_test("K(l)=-l*L1(k)", batch.zero_test(K.apply(H.ell()) + H.ell() * H.L1k())));
  root.add(detail::variant_check(
      "K(P)", batch,
      {{"printed", K.apply(H.P()) + H.P() * H.L1k() + L1.apply(H.L1k())},
       {"bar-swapped", K.apply(H.P()) + H.Pbar() * H.L1k() + L1.apply(H.L1k())}}));
  root.add(detail::variant_check(
      "K(Pbar)", batch,
      {{"printed", K.apply(H.Pbar()) + H.P() * H.Lb1k() + Lb1.apply(H.L1k())},
       {"bar-swapped", K.apply(H.Pbar()) + H.Pbar() * H.Lb1k() + L1.apply(H.Lb1k())}}));
  root.add(CheckNode::from_zero_test("T(k)", batch.zero_test(T.apply(H.k()))));
  root.add(CheckNode::from_zero_test("T(L1(k))", batch.zero_test(T.apply(H.L1k()))));
  root.add(detail::variant_check(
      "L1(k)-quotient", batch,
      {{"corrected-sign", H.L1k() - (F21 * F111 - F11 * F211) / pow(F11, 2)},
       {"printed", H.L1k() + (F21 * F111 - F11 * F211) / pow(F11, 2)}}));
  root.add(CheckNode::from_zero_test("L1bar(k)-quotient",
                                     batch.zero_test(H.Lb1k() - (F21 * F11b - F11 * F21b) / pow(F11, 2))));

  Matrix2 levi = levi_matrix(H.F());
  root.add(CheckNode::from_zero_test("kernel-row1", batch.zero_test(levi[0][0] * H.k() + levi[0][1])));
  root.add(CheckNode::from_zero_test("kernel-row2", batch.zero_test(levi[1][0] * H.k() + levi[1][1])));
  root.add(CheckNode::from_zero_test("conj(L1bar(k))=L1(kbar)",
                                     batch.zero_test(conjugate(H.Lb1k()) - L1.apply(H.kbar()))));
  root.add(CheckNode::from_zero_test("l-real", batch.zero_test(conjugate(H.ell()) - H.ell())));
  root.add(CheckNode::from_zero_test("T-real", batch.zero_test(conjugate(H.T()[var::v]) - H.T()[var::v])));
  return root;
}

// d(rho0), d(kappa0), d(zeta0) as printed for the bracket-defined orientation.
// The d(kappa0) entry on zeta0^kappabar0 is selected by the variant flag.
inline std::array<TwoFormTable, 3> initial_structure_claims(const Hypersurface& H, bool kappa_entry_conjugated = false) {
  auto t = std::array<TwoFormTable, 3>{zero_table(), zero_table(), zero_table()};
  t[0][wedge_index(0, 1)] = H.P();
  t[0][wedge_index(0, 2)] = neg(H.L1k());
  t[0][wedge_index(0, 3)] = H.Pbar();
  t[0][wedge_index(0, 4)] = neg(H.Lb1kb());
  t[0][wedge_index(1, 3)] = imag_unit();
  t[1][wedge_index(1, 2)] = neg(H.L1k());
  t[1][wedge_index(2, 3)] = kappa_entry_conjugated ? H.Lb1kb() : H.Lb1k();
  return t;
}

inline CheckNode check_structure_initial(const Hypersurface& H, SampleBatch& batch) {
  static constexpr const char* kForms[] = {"d(rho0)", "d(kappa0)", "d(zeta0)", "d(kappabar0)", "d(zetabar0)"};
  CheckNode root = CheckNode::group("structure-initial");
  auto computed = dcoframe_coeffs(H.frame(), H.coframe());
  auto claims3 = sign_map(initial_structure_claims(H), H.convention());
  std::array<TwoFormTable, 5> claims{claims3[0], claims3[1], claims3[2], conjugate_table(claims3[1]),
                                     conjugate_table(claims3[2])};
  for (int i = 0; i < 5; ++i) root.add(detail::table_check(kForms[i], computed[i], claims[i], batch));

  // The zeta0^kappabar0 entry of d(kappa0): L1bar(k) or L1bar(kbar).
  Expr entry = computed[1][wedge_index(2, 3)];
  root.add(detail::variant_check("d(kappa0)-zeta^kappabar-variant", batch,
                                 {{"L1bar(k)", entry - H.Lb1k()}, {"L1bar(kbar)", entry - H.Lb1kb()}}));

  // Cross-route: the same tables through elimination in the frame.
  auto expanded = dcoframe_coeffs(H.frame(), batch.point(0));
  CheckNode routes = CheckNode::group("pairing-vs-elimination");
  for (int i = 0; i < 3; ++i)
    routes.add(detail::table_check(kForms[i], computed[i], expanded[i], batch));
  root.add(std::move(routes));
  return root;
}

// Named torsions of d(rho0), d(kappa0), d(zeta'0) on the adapted coframe.
struct FinalTorsions {
  Expr R1, R2, K5, K6, Z5, Z6, Z8, Z9;
  std::array<TwoFormTable, 5> tables;
};

inline FinalTorsions final_torsions(const Hypersurface& H) {
  FinalTorsions t;
  t.tables = dcoframe_coeffs(H.adapted_frame(), H.adapted_coframe());
  t.R1 = t.tables[0][wedge_index(0, 1)];
  t.R2 = t.tables[0][wedge_index(0, 2)];
  t.K5 = t.tables[1][wedge_index(1, 2)];
  t.K6 = t.tables[1][wedge_index(1, 3)];
  t.Z5 = t.tables[2][wedge_index(1, 2)];
  t.Z6 = t.tables[2][wedge_index(1, 3)];
  t.Z8 = t.tables[2][wedge_index(2, 3)];
  t.Z9 = t.tables[2][wedge_index(2, 4)];
  return t;
}

// Closed forms of the final-base torsions.
struct FinalClosedForms {
  Expr R1, R1_explicit, R2, K5, K6, K6_explicit;
  Expr Z5, Z5_explicit, Z6, Z6_explicit, Z8, Z8_explicit, Z8_printed, Z9;
};

inline FinalClosedForms final_closed_forms(const Hypersurface& H) {
  const auto &L1 = H.L1(), &Lb1 = H.Lb1(), &K = H.K();
  const Expr &P = H.P(), &Pb = H.Pbar(), &B = H.B(), &Bb = H.Bbar();
  const Expr &L1k = H.L1k(), &Lb1k = H.Lb1k(), &L1kb = H.L1kb(), &Lb1kb = H.Lb1kb();
  Expr LbLbk = Lb1.apply(Lb1k);
  FinalClosedForms f;
  f.R1 = P + B * L1k / Lb1k;
  f.R1_explicit = P - Pb * L1k / (3 * Lb1k) + LbLbk * L1k / (3 * pow(Lb1k, 2));
  f.R2 = neg(L1k / Lb1k);
  f.K5 = neg(L1k / Lb1k);
  f.K6 = neg(B);
  f.K6_explicit = Pb / 3 - LbLbk / (3 * Lb1k);
  f.Z5 = neg(B * L1k / Lb1k) + L1.apply(Lb1k) / Lb1k - K.apply(B) / Lb1k;
  f.Z5_explicit = Pb * L1k / (3 * Lb1k) - LbLbk * L1k / (3 * pow(Lb1k, 2)) + L1.apply(Lb1k) / Lb1k +
                  K.apply(Pb) / (3 * Lb1k) - K.apply(LbLbk) / (3 * pow(Lb1k, 2)) +
                  K.apply(Lb1k) * LbLbk / (3 * pow(Lb1k, 3));
  f.Z6 = neg(pow(B, 2)) + B * LbLbk / Lb1k - Lb1.apply(B);
  f.Z6_explicit = neg(pow(Pb, 2)) / 9 - Pb * LbLbk / (9 * Lb1k) + 5 * pow(LbLbk, 2) / (9 * pow(Lb1k, 2)) -
                  Lb1.apply(LbLbk) / (3 * Lb1k) + Lb1.apply(Pb) / 3;
  f.Z8 = B - LbLbk / Lb1k - Bb * Lb1kb / L1kb;
  f.Z8_explicit = neg(Pb) / 3 - 2 * LbLbk / (3 * Lb1k) + P * Lb1kb / (3 * L1kb) -
                  L1.apply(L1kb) * Lb1kb / (3 * pow(L1kb, 2));
  f.Z8_printed = neg(Pb) / 3 - 2 * LbLbk / (3 * Lb1k) + P * Lb1kb / (3 * Lb1kb) -
                 L1.apply(Lb1kb) * Lb1kb / (3 * pow(Lb1kb, 2));
  f.Z9 = Lb1kb / L1kb;
  return f;
}

inline CheckNode check_structure_final_base(const Hypersurface& H, const FinalTorsions& t, SampleBatch& batch) {
  CheckNode root = CheckNode::group("structure-final");
  FinalClosedForms f = final_closed_forms(H);
  auto zt = [&](const char* name, const Expr& e) { return CheckNode::from_zero_test(name, batch.zero_test(e)); };

  // d(rho0): R1, R2, conjugates, and the Levi entry.
  CheckNode rho = CheckNode::group("d(rho0)");
  rho.add(zt("R1", t.R1 - f.R1));
  rho.add(zt("R1-explicit", t.R1 - f.R1_explicit));
  rho.add(zt("R2", t.R2 - f.R2));
  rho.add(zt("rho^kappabar=conj(R1)", t.tables[0][wedge_index(0, 3)] - conjugate(t.R1)));
  rho.add(zt("rho^zetabar=conj(R2)", t.tables[0][wedge_index(0, 4)] - conjugate(t.R2)));
  rho.add(zt("kappa^kappabar", t.tables[0][wedge_index(1, 3)] - H.orientation() * neg(imag_unit())));
  for (int p : {4, 6, 7, 8, 9}) rho.add(zt(kWedgeNames[p], t.tables[0][p]));
  root.add(std::move(rho));

  CheckNode kappa = CheckNode::group("d(kappa0)");
  kappa.add(zt("K5", t.K5 - f.K5));
  kappa.add(zt("K6", t.K6 - f.K6));
  kappa.add(zt("K6-explicit", t.K6 - f.K6_explicit));
  kappa.add(zt("zeta'^kappabar", t.tables[1][wedge_index(2, 3)] - one()));
  for (int p : {0, 1, 2, 3, 6, 8, 9}) kappa.add(zt(kWedgeNames[p], t.tables[1][p]));
  root.add(std::move(kappa));

  CheckNode zeta = CheckNode::group("d(zeta'0)");
  zeta.add(zt("Z5", t.Z5 - f.Z5));
  zeta.add(zt("Z5-explicit", t.Z5 - f.Z5_explicit));
  zeta.add(zt("Z6", t.Z6 - f.Z6));
  zeta.add(zt("Z6-explicit", t.Z6 - f.Z6_explicit));
  zeta.add(zt("Z8", t.Z8 - f.Z8));
  zeta.add(detail::variant_check("Z8-explicit", batch,
                                 {{"consistent-denominators", t.Z8 - f.Z8_explicit}, {"printed", t.Z8 - f.Z8_printed}}));
  zeta.add(zt("Z9", t.Z9 - f.Z9));
  zeta.add(zt("Z9=-conj(K5)", t.Z9 + conjugate(t.K5)));
  for (int p : {0, 1, 2, 3, 6, 9}) zeta.add(zt(kWedgeNames[p], t.tables[2][p]));
  root.add(std::move(zeta));

  // Auxiliary identity quoted in the proof of the d(zeta'0) formula.
  root.add(detail::variant_check("Kbar(B)", batch,
                                 {{"-B*L1bar(kbar)", H.Kb().apply(H.B()) + H.B() * H.Lb1kb()},
                                  {"-B*L1(kbar)", H.Kb().apply(H.B()) + H.B() * H.L1kb()}}));

  // Conjugate forms come from the conjugation functor.
  CheckNode conj = CheckNode::group("conjugates");
  for (int i : {1, 2}) {
    TwoFormTable c = conjugate_table(t.tables[i]);
    for (int p = 0; p < 10; ++p)
      conj.add(zt((std::string(i == 1 ? "d(kappabar0)." : "d(zetabar'0).") + kWedgeNames[p]).c_str(),
                  t.tables[i + 2][p] - c[p]));
  }
  root.add(std::move(conj));
  return root;
}

inline CheckNode check_structure_final_base(const Hypersurface& H, SampleBatch& batch) {
  return check_structure_final_base(H, final_torsions(H), batch);
}

// Duality of each frame/coframe pair, exactly.
inline CheckNode check_duality(const Hypersurface& H, SampleBatch& batch) {
  CheckNode root = CheckNode::group("duality");
  auto one_pair = [&](const char* name, const Frame& f, const Coframe& w) {
    CheckNode node = CheckNode::group(name);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        Expr delta = i == j ? one() : zero();
        node.add(CheckNode::from_zero_test("w" + std::to_string(i) + "(f" + std::to_string(j) + ")",
                                           batch.zero_test(pair(w[i], f[j]) - delta)));
      }
    root.add(std::move(node));
  };
  one_pair("base", H.frame(), H.coframe());
  one_pair("hat", H.hat_frame(), H.hat_coframe());
  one_pair("adapted", H.adapted_frame(), H.adapted_coframe());
  return root;
}

}  // namespace crcartan
