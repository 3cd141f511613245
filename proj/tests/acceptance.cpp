// Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include "fixtures.hpp"

#include <crcartan/app.hpp>
#include <crcartan/liealg.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace crcartan;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SampleSpec spec(std::uint64_t seed, int count = 20) {
  SampleSpec s;
  s.seed = seed;
  s.count = count;
  return s;
}

struct Result {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string first_failure(const CheckNode& n, const std::string& path = "") {
  std::string here = path.empty() ? n.name : path + "/" + n.name;
  if (n.children.empty()) return n.ok() ? "" : here;
  for (const auto& c : n.children)
    if (auto f = first_failure(c, here); !f.empty()) return f;
  return "";
}

void require_ok(Result& v, const CheckNode& n, const std::string& label) {
  std::string f = first_failure(n);
  v.require(n.ok(), label + (f.empty() ? "" : " (" + f + ")"));
}

std::shared_ptr<const Hypersurface> surface(const Expr& F, Convention c = Convention::LeviPositive) {
  Validation v = validate(F, spec(0, 10), c);
  if (!v.report.ok()) throw std::runtime_error("fixture failed validation");
  return v.surface;
}

const std::vector<std::pair<std::string, Expr>>& three_surfaces() {
  static const std::vector<std::pair<std::string, Expr>> s{
      {"mlc", fixtures::model()}, {"shear", fixtures::sheared_model()}, {"dilation", fixtures::dilated_model()}};
  return s;
}

Result model_vanishing() {
  Result v;
  auto start = Clock::now();
  auto H = surface(fixtures::model());
  InvariantExprs inv = invariant_exprs(*H);
  SampleBatch batch = H->batch(spec(1, 25));
  int zero = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Scalar I0 = evaluate(inv.I0, batch.point(i)), V0 = evaluate(inv.V0, batch.point(i));
    v.require(I0.exact() && V0.exact(), "exact arithmetic");
    if (I0.is_zero() && V0.is_zero()) ++zero;
  }
  double t = seconds_since(start);
  v.require(batch.size() >= 25, ">= 25 points");
  v.require(zero == static_cast<int>(batch.size()), "I0 = V0 = 0 at every point");
  v.require(t < 60, "< 60 s");
  char buf[96];
  std::snprintf(buf, sizeof buf, "I0 = V0 = 0 exactly at %d/%zu points in %.2f s", zero, batch.size(), t);
  v.note(buf);
  return v;
}

Result route_agreement() {
  Result v;
  for (const auto& [name, F] : three_surfaces()) {
    auto H = surface(F);
    InvariantExprs inv = invariant_exprs(*H);
    SampleBatch batch = H->batch(spec(2));
    require_ok(v, check_route_agreement(*H, inv, batch), name);
  }
  if (v.pass) v.note("closed forms equal the Z-route on mlc, shear, dilation (20 points each)");
  return v;
}

Result structure_equations() {
  Result v;
  for (const auto& [name, F] : three_surfaces())
    for (auto c : {Convention::LeviPositive, Convention::BracketDefined}) {
      auto H = surface(F, c);
      SampleBatch batch = H->batch(spec(3));
      std::string label = name + "/" + convention_name(c);
      require_ok(v, check_structure_initial(*H, batch), label + " initial");
      require_ok(v, check_structure_final_base(*H, batch), label + " final");
      require_ok(v, check_duality(*H, batch), label + " duality");
    }
  for (auto c : {Convention::LeviPositive, Convention::BracketDefined})
    require_ok(v, model_structure_suite(spec(3), c), std::string("model table ") + convention_name(c));
  if (v.pass) v.note("torsion tables match on 3 surfaces x 2 conventions; model table matches via the sign map");
  return v;
}

Result bracket_identities() {
  Result v;
  std::size_t identities = 0;
  for (const auto& [name, F] : three_surfaces()) {
    auto H = surface(F);
    SampleBatch batch = H->batch(spec(4));
    CheckNode b = check_bracket_identities(*H, batch);
    identities = b.children.size();
    require_ok(v, b, name + " brackets");
    CheckNode l = check_lemma_identities(*H, batch);
    require_ok(v, l, name + " lemmas");
    v.require(l.find("T(k)")->status == Status::Pass && l.find("T(L1(k))")->status == Status::Pass, name + " T(k), T(L1(k))");
  }
  v.require(identities == 10, "10 bracket identities");
  if (v.pass) v.note(std::to_string(identities) + " bracket identities, lemma identities, T(k) = T(L1(k)) = 0 on 3 surfaces");
  return v;
}

// The stated lifted identity uses the halved Q0; on the model corpus every
// term is zero, so the quartic cone is the informative fixture.
Result lifted_identity_suite() {
  Result v;
  std::vector<std::pair<std::string, Expr>> corpus = three_surfaces();
  corpus.emplace_back("quartic-cone", fixtures::quartic_cone());
  std::string holding;
  for (const auto& [name, F] : corpus) {
    auto H = surface(F);
    InvariantExprs inv = invariant_exprs(*H);
    SampleBatch batch = H->batch(spec(5));
    SampleBatch lifted = lifted_batch(*H, spec(6, 6));
    v.require(lifted.size() >= 5, name + " >= 5 nonzero c values");
    v.require(batch.zero_test(conjugate(inv.Q0) - inv.Q0).zero, name + " Q0 real");
    require_ok(v, check_kbar_I0(*H, inv.I0, batch), name);
    require_ok(v, check_torsion_relation(*H, inv.torsions, batch), name);

    LiftedDerivations d = lifted_derivatives(*H, inv.torsions);
    Expr cc = Expr(var::c) * Expr(var::cb);
    bool stated = false;
    for (auto w : {V0Weight::CSquared, V0Weight::CCbar, V0Weight::CbSquared})
      stated = stated || lifted.zero_test(lifted_difference(d, inv.I0, inv.V0, w) - inv.Q0 / cc).zero;
    v.require(stated, name + " (S5)_kappabar - (S6)_zeta = Q0/(c cb) with Q0 halved, under any S6 weight");
    if (name == "quartic-cone" &&
        lifted.zero_test(lifted_difference(d, inv.I0, inv.V0, V0Weight::CbSquared) - inv.Q0_bracket / cc).zero)
      holding = "holds on quartic-cone only with Q0 unhalved and S6 = V0/cb^2";
  }
  v.note(holding.empty() ? "no reading of the lifted identity holds" : holding);
  return v;
}

Result lie_algebra() {
  Result v;
  CheckNode table = commutator_table_check();
  require_ok(v, table, "commutator table");
  v.require(table.count(Status::Pass) == 100, "100 cells");
  require_ok(v, closure_check(), "closure");
  CheckNode tangency = tangency_suite(spec(7, 10));
  require_ok(v, tangency, "tangency");
  CheckNode alg = liealg_suite();
  require_ok(v, alg, "liealg");
  for (const char* leaf : {"dual-table", "tau", "killing/row-X1-zero", "center-trivial", "axioms"})
    v.require(alg.find(leaf) && alg.find(leaf)->ok(), leaf);
  if (v.pass) v.note("100/100 cells, closure, tangency of X1..X10 at 10 points, dual table, tau, Killing, center, Jacobi");
  return v;
}

Result flows() {
  Result v;
  CheckNode suite = flow_suite(spec(8));
  require_ok(v, suite, "flows");
  for (int i : {6, 7}) {
    const CheckNode* x = suite.find("X" + std::to_string(i));
    if (!x) continue;
    if (const auto* h = x->find("readings/holding_variants")) v.note("X" + std::to_string(i) + " closed form: " + h->detail);
    if (const auto* f = x->find("ode-residual-float")) v.note("X" + std::to_string(i) + " " + f->detail);
  }
  // The z1-component denominator of the X6 flow: the printed form, with its
  // (1+z2) factor cancelling, against the single-factor reading.
  const CheckNode* single = suite.find("X6/readings/single-(1+z2)");
  v.require(single && single->detail != "solves the initial value problem", "X6 denominator reading resolved");
  if (single) v.note("X6 gamma1 denominator: printed form holds, single-(1+z2) reading " + single->detail);
  return v;
}

Result negative_fixtures() {
  Result v;
  ValidationReport rank2 = validate(parse_expr("z1*zb1 + z2*zb2"), spec(9, 10)).report;
  v.require(!rank2.ok() && !rank2.rank_one, "z1*zb1 + z2*zb2 rejected for rank");
  ValidationReport degen = validate(parse_expr("z1*zb1"), spec(9, 10)).report;
  v.require(!degen.ok() && !degen.two_nondegenerate, "z1*zb1 rejected as 2-degenerate");

  auto H = surface(fixtures::model());
  FaultInjection fault;
  fault.V0 = parse_expr("z1*zb1 + 1");
  Classification c = classify(*H, spec(9), fault);
  v.require(c.verdict == Verdict::NotModelEquivalent, "fault injection detected");
  if (c.witness && c.value) {
    InvariantExprs inv = invariant_exprs(*H, fault);
    Scalar again = evaluate(inv.V0, *c.witness);
    v.require(c.value->exact() && !c.value->is_zero() && again == *c.value, "exact nonzero witness");
    v.note("injected V0 witness value " + c.value->str());
  } else {
    v.require(false, "witness reported");
  }
  return v;
}

Result determinism() {
  Result v;
  const char* argv[] = {"crcartan", "verify", "--suite", "all", "--seed", "42"};
  auto once = [&](std::string& out) {
    std::ostringstream o, e;
    int code = app::run_cli(6, argv, o, e);
    out = o.str();
    return code;
  };
  auto start = Clock::now();
  std::string a, b;
  int ca = once(a);
  double first = seconds_since(start);
  int cb = once(b);
  v.require(a == b, "byte-identical reports");
  v.require(ca == 0 && cb == 0, "verify --suite all passes");
  v.require(first < 300, "< 5 minutes");
  char buf[96];
  std::snprintf(buf, sizeof buf, "%zu-byte report identical across runs; one run %.2f s", a.size(), first);
  v.note(buf);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria{
      {"model vanishing", model_vanishing},
      {"route agreement", route_agreement},
      {"structure equations", structure_equations},
      {"bracket identities", bracket_identities},
      {"lifted identity suite", lifted_identity_suite},
      {"lie algebra", lie_algebra},
      {"flows", flows},
      {"negative fixtures", negative_fixtures},
      {"determinism", determinism},
  };
  int failed = 0, n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Result v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    if (!v.pass) ++failed;
    std::cout << "criterion " << n << " [" << name << "]: " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail << std::endl;
  }
  std::cout << (n - failed) << "/" << n << " criteria pass" << std::endl;
  return failed == 0 ? 0 : 1;
}
