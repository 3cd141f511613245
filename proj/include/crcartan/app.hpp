#pragma once

// Command-line front end. Kept header-only so tests can drive it in-process.

#include "invariants.hpp"
#include "liealg.hpp"
#include "model.hpp"
#include "parser.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace crcartan::app {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaName = "crcartan-report";
inline constexpr int kSchemaVersion = 1;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int usage = 2;
inline constexpr int not_equivalent = 3;
inline constexpr int inconclusive = 4;
}  // namespace exit_code

// Absolute threshold below which a 50-digit float invariant counts as zero.
inline const BigFloat& float_zero_threshold() {
  static const BigFloat t("1e-30");
  return t;
}

enum class Mode { Exact, Float };

struct JobSpec {
  std::string command;
  std::string surface = "mlc";
  std::string points_file;
  std::string suite = "all";
  int samples = 20;
  std::uint64_t seed = 0;
  Mode mode = Mode::Exact;
  std::string output = "json";
  Convention convention = Convention::LeviPositive;
  std::string inject_i0, inject_v0;
  std::string report_file;

  SampleSpec sample_spec() const {
    SampleSpec s;
    s.count = samples;
    s.seed = seed;
    return s;
  }
};

// Bad user input: surface, points file or option values.
struct InputError : std::runtime_error {
  InputError(const std::string& what, std::optional<std::size_t> pos = std::nullopt)
      : std::runtime_error(what), position(pos) {}
  std::optional<std::size_t> position;
};

// ---------------------------------------------------------------------------
// Surfaces
// ---------------------------------------------------------------------------

struct Surface {
  std::string kind;  // builtin, dsl or file
  std::string source;
  Expr F;
};

inline const std::vector<std::pair<std::string, std::function<Expr()>>>& builtin_surfaces() {
  static const std::vector<std::pair<std::string, std::function<Expr()>>> table{
      {"mlc", [] { return mlc_graph(); }},
      {"mlc-shear", [] { return transform_graph(mlc_graph(), shear_map()); }},
      {"mlc-dilation", [] { return transform_graph(mlc_graph(), dilation_map()); }},
      {"mlc-mix", [] { return transform_graph(mlc_graph(), mixing_map()); }},
      {"quartic-cone", [] { return parse_expr("((z1+zb1)^4 + (z1+zb1)^2*(z2+zb2)^2) / (2*(z2+zb2)^3)"); }},
  };
  return table;
}

inline Expr parse_dsl(const std::string& text) {
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    throw InputError(e.what(), e.position());
  }
}

// AST nodes: {"var": name}, {"const": dsl-constant}, {"dsl": text},
// {"op": add|sub|mul|div|neg|conj|pow, "args": [...], "exp": n}.
inline Expr expr_from_ast(const Json& node, const std::string& path = "surface") {
  if (node.is_string()) return parse_dsl(node.get<std::string>());
  if (!node.is_object()) throw InputError(path + ": expected an object or a string");
  if (node.contains("var")) {
    auto x = VarId::from_name(node["var"].get<std::string>());
    if (!x) throw InputError(path + ": unknown variable " + node["var"].dump());
    return Expr(*x);
  }
  if (node.contains("const")) {
    const Json& c = node["const"];
    Expr e = c.is_number_integer() ? Expr(c.get<long>()) : parse_dsl(c.get<std::string>());
    if (e->var_mask() != 0) throw InputError(path + ": constant depends on variables");
    return e;
  }
  if (node.contains("dsl")) return parse_dsl(node["dsl"].get<std::string>());
  if (!node.contains("op")) throw InputError(path + ": node needs var, const, dsl or op");
  std::string op = node["op"].get<std::string>();
  std::vector<Expr> args;
  if (node.contains("args")) {
    if (!node["args"].is_array()) throw InputError(path + ": args must be an array");
    for (std::size_t i = 0; i < node["args"].size(); ++i)
      args.push_back(expr_from_ast(node["args"][i], path + "." + op + "[" + std::to_string(i) + "]"));
  }
  auto arity = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) throw InputError(path + ": wrong number of arguments for " + op);
  };
  if (op == "add") {
    arity(1, SIZE_MAX);
    return add(args);
  }
  if (op == "mul") {
    arity(1, SIZE_MAX);
    return mul(args);
  }
  if (op == "sub") {
    arity(2, 2);
    return args[0] - args[1];
  }
  if (op == "div") {
    arity(2, 2);
    return args[0] / args[1];
  }
  if (op == "neg") {
    arity(1, 1);
    return neg(args[0]);
  }
  if (op == "conj") {
    arity(1, 1);
    return conjugate(args[0]);
  }
  if (op == "pow") {
    arity(1, 1);
    if (!node.contains("exp") || !node["exp"].is_number_integer()) throw InputError(path + ": pow needs an integer exp");
    long n = node["exp"].get<long>();
    if (n == 0) throw InputError(path + ": zero exponent");
    return pow(args[0], n);
  }
  throw InputError(path + ": unknown op " + op);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_json(const std::string& text, const std::string& path) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what(), e.byte);
  }
}

inline Surface resolve_surface(const std::string& arg) {
  for (const auto& [name, make] : builtin_surfaces())
    if (name == arg) return {"builtin", arg, make()};
  if (!arg.empty() && arg[0] == '@') {
    std::string path = arg.substr(1);
    Json doc = parse_json(read_file(path), path);
    if (!doc.is_object() || !doc.contains("surface")) throw InputError(path + ": missing \"surface\"");
    try {
      return {"file", path, expr_from_ast(doc["surface"])};
    } catch (const Json::exception& e) {
      throw InputError(path + ": " + e.what());
    }
  }
  return {"dsl", arg, parse_dsl(arg)};
}

// A points file is a JSON array of objects mapping z1, z2, v, c to constants
// in the surface syntax. Conjugates are filled in; v defaults to 0, c to 1.
inline std::vector<Point> read_points(const std::string& path, Mode mode) {
  Json doc = parse_json(read_file(path), path);
  if (!doc.is_array()) throw InputError(path + ": expected an array of points");
  std::vector<Point> points;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const Json& entry = doc[i];
    std::string where = path + "[" + std::to_string(i) + "]";
    if (!entry.is_object()) throw InputError(where + ": expected an object");
    Point p;
    p.set(var::v, Scalar(0)).set_conj(var::c, Scalar(1));
    for (const auto& [key, value] : entry.items()) {
      auto x = VarId::from_name(key);
      if (!x || !(*x == var::z1 || *x == var::z2 || *x == var::v || *x == var::c))
        throw InputError(where + ": unsupported coordinate " + key);
      Expr e = value.is_number_integer() ? Expr(value.get<long>()) : parse_dsl(value.get<std::string>());
      if (e->var_mask() != 0) throw InputError(where + "." + key + ": not a constant");
      Scalar s = evaluate(e, Point());
      if (mode == Mode::Float) s = Scalar(s.as_float());
      if (x->is_real()) {
        if (!s.is_real()) throw InputError(where + "." + key + ": must be real");
        p.set(*x, s);
      } else {
        p.set_conj(*x, s);
      }
    }
    if (!p.has(var::z1) || !p.has(var::z2)) throw InputError(where + ": z1 and z2 are required");
    if (mode == Mode::Float) {
      for (const auto& [x, s] : p.entries()) p.set(x, Scalar(s.as_float()));
    }
    points.push_back(std::move(p));
  }
  return points;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline Json to_json(const Point& p) {
  Json j = Json::object();
  for (const auto& [x, s] : p.entries()) j[std::string(x.name())] = s.str();
  return j;
}

inline Json to_json(const CheckNode& n) {
  Json j;
  j["name"] = n.name;
  j["status"] = n.ok() ? status_name(n.status == Status::Info ? Status::Info : Status::Pass) : "fail";
  if (!n.detail.empty()) j["detail"] = n.detail;
  if (n.witness) j["witness"] = *n.witness;
  if (n.value) j["value"] = *n.value;
  if (!n.children.empty()) {
    j["children"] = Json::array();
    for (const auto& c : n.children) j["children"].push_back(to_json(c));
  }
  return j;
}

inline Json summary(const CheckNode& root) {
  return Json{{"pass", root.count(Status::Pass)}, {"fail", root.count(Status::Fail)}, {"info", root.count(Status::Info)}};
}

inline const char* mode_name(Mode m) { return m == Mode::Exact ? "exact" : "float"; }

inline Json command_echo(const JobSpec& job) {
  Json c;
  c["name"] = job.command;
  c["surface"] = job.surface;
  if (job.command == "verify") c["suite"] = job.suite;
  if (!job.points_file.empty()) c["points"] = job.points_file;
  c["samples"] = job.samples;
  c["seed"] = job.seed;
  c["mode"] = mode_name(job.mode);
  c["convention"] = convention_name(job.convention);
  if (!job.inject_i0.empty()) c["inject_i0"] = job.inject_i0;
  if (!job.inject_v0.empty()) c["inject_v0"] = job.inject_v0;
  return c;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Outcome {
  int code = exit_code::ok;
  CheckNode checks = CheckNode::group("checks");
  Json sections = Json::object();
};

inline Json validation_json(const ValidationReport& r) {
  return Json{{"rigid", r.rigid},
              {"real", r.real},
              {"levi_nonzero", r.levi_nonzero},
              {"rank_one", r.rank_one},
              {"two_nondegenerate", r.two_nondegenerate},
              {"validated", r.ok()}};
}

inline Validation run_validation(const Surface& s, const JobSpec& job, Outcome& out) {
  Validation v = validate(s.F, job.sample_spec(), job.convention);
  out.checks.add(v.report.checks);
  out.sections["validation"] = validation_json(v.report);
  if (!v.report.ok()) out.code = exit_code::failure;
  return v;
}

inline FaultInjection fault_of(const JobSpec& job) {
  FaultInjection f;
  if (!job.inject_i0.empty()) f.I0 = parse_dsl(job.inject_i0);
  if (!job.inject_v0.empty()) f.V0 = parse_dsl(job.inject_v0);
  return f;
}

inline std::vector<Point> to_float(std::vector<Point> points) {
  for (auto& p : points)
    for (const auto& [x, s] : p.entries()) p.set(x, Scalar(s.as_float()));
  return points;
}

inline bool negligible(const Scalar& s) {
  return s.exact() ? s.is_zero() : s.as_float().abs() < float_zero_threshold();
}

// Why p is not an admissible point of H, if it is not.
inline std::optional<std::string> singularity(const Hypersurface& H, const Point& p) {
  static constexpr const char* kFinite[] = {"F", "k", "P", "Pbar", "B", "Bbar", "L1(k)", "L1bar(kbar)"};
  static constexpr const char* kNonzero[] = {"l", "L1bar(k)", "L1(kbar)"};
  auto finite = H.finite_guards();
  auto nonzero = H.nonzero_guards();
  for (std::size_t i = 0; i < finite.size(); ++i) {
    try {
      evaluate(finite[i], p);
    } catch (const std::domain_error&) {
      return std::string("singular point: ") + kFinite[i] + " is undefined";
    }
  }
  for (std::size_t i = 0; i < nonzero.size(); ++i) {
    try {
      if (negligible(evaluate(nonzero[i], p))) return std::string("degenerate point: ") + kNonzero[i] + " vanishes";
    } catch (const std::domain_error&) {
      return std::string("singular point: ") + kNonzero[i] + " is undefined";
    }
  }
  return std::nullopt;
}

inline void cmd_invariants(const Hypersurface& H, const JobSpec& job, Outcome& out) {
  InvariantExprs inv = invariant_exprs(H, fault_of(job));
  std::vector<Point> points;
  if (!job.points_file.empty()) {
    points = read_points(job.points_file, job.mode);
  } else {
    SampleBatch lifted = lifted_batch(H, job.sample_spec());
    for (std::size_t i = 0; i < lifted.size(); ++i) points.push_back(lifted.point(i));
    if (job.mode == Mode::Float) points = to_float(std::move(points));
  }

  static constexpr V0Weight kWeights[] = {V0Weight::CSquared, V0Weight::CCbar, V0Weight::CbSquared};
  Json section;
  section["Q0_normalization"] = "Q0 is the halved form; Q0_unhalved is the bracket form";
  section["V0_weights"] = Json::array();
  for (auto w : kWeights) section["V0_weights"].push_back(weight_name(w));
  section["points"] = Json::array();

  CheckNode group = CheckNode::group("invariants");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& p = points[i];
    std::string name = "point-" + std::to_string(i);
    Json entry;
    entry["point"] = to_json(p);
    if (auto why = singularity(H, p)) {
      entry["error"] = *why;
      CheckNode leaf = CheckNode::leaf(name, false, *why);
      leaf.witness = p.str();
      group.add(std::move(leaf));
      section["points"].push_back(std::move(entry));
      continue;
    }
    try {
      InvariantValues val = invariant_values(inv, p);
      entry["I0"] = val.I0.str();
      entry["V0"] = val.V0.str();
      Json weighted = Json::object();
      for (auto w : kWeights) weighted[weight_name(w)] = evaluate(inv.V0 * V0_weight(w), p).str();
      entry["V0_weighted"] = weighted;
      entry["Q0"] = val.Q0.str();
      entry["Q0_unhalved"] = evaluate(inv.Q0_bracket, p).str();
      entry["route_delta"] = Json{{"I0", val.I0_route_delta.str()}, {"V0", val.V0_route_delta.str()}};
      bool agree = negligible(val.I0_route_delta) && negligible(val.V0_route_delta);
      CheckNode leaf = CheckNode::leaf(name, agree, agree ? "closed forms agree with the Z-route" : "route mismatch");
      if (!agree) leaf.witness = p.str();
      group.add(std::move(leaf));
    } catch (const std::domain_error& e) {
      entry["error"] = e.what();
      CheckNode leaf = CheckNode::leaf(name, false, std::string("evaluation failed: ") + e.what());
      leaf.witness = p.str();
      group.add(std::move(leaf));
    } catch (const EvaluationError& e) {
      entry["error"] = e.what();
      group.add(CheckNode::leaf(name, false, std::string("evaluation failed: ") + e.what()));
    }
    section["points"].push_back(std::move(entry));
  }
  out.checks.add(std::move(group));
  out.sections["invariants"] = std::move(section);
  if (!out.checks.ok()) out.code = exit_code::failure;
}

// Classification over explicit points or in float mode.
inline Classification classify_at(const Hypersurface& H, const InvariantExprs& inv, const std::vector<Point>& points,
                                  const std::string& kind = "given") {
  Classification c;
  for (const auto& p : points) {
    if (singularity(H, p)) continue;
    for (auto [name, e] : {std::pair<const char*, Expr>{"I0", inv.I0}, {"V0", inv.V0}}) {
      Scalar value;
      try {
        value = evaluate(e, p);
      } catch (const std::domain_error&) {
        continue;
      }
      ++c.points_tested;
      if (!negligible(value)) {
        c.verdict = Verdict::NotModelEquivalent;
        c.invariant = name;
        c.witness = p;
        c.value = value;
        c.reason = std::string(name) + " is nonzero at a " + kind + " point";
        return c;
      }
    }
  }
  if (c.points_tested == 0) {
    c.reason = "no admissible point";
    return c;
  }
  c.verdict = Verdict::ModelEquivalent;
  c.reason = "I0 and V0 vanish at every " + kind + " point";
  return c;
}

inline void cmd_classify(const Hypersurface& H, const JobSpec& job, Outcome& out) {
  FaultInjection fault = fault_of(job);
  Classification c;
  if (!job.points_file.empty()) {
    c = classify_at(H, invariant_exprs(H, fault), read_points(job.points_file, job.mode));
  } else if (job.mode == Mode::Float) {
    std::vector<Point> points;
    SampleBatch batch = H.batch(job.sample_spec());
    for (std::size_t i = 0; i < batch.size(); ++i) points.push_back(batch.point(i));
    c = classify_at(H, invariant_exprs(H, fault), to_float(std::move(points)), "sampled");
  } else {
    c = classify(H, job.sample_spec(), fault);
  }

  Json section;
  section["verdict"] = verdict_name(c.verdict);
  section["reason"] = c.reason;
  section["points_tested"] = c.points_tested;
  if (c.invariant) section["invariant"] = *c.invariant;
  if (c.witness) section["witness"] = to_json(*c.witness);
  if (c.value) section["value"] = c.value->str();
  out.sections["classification"] = std::move(section);

  CheckNode leaf = CheckNode::info("verdict", std::string(verdict_name(c.verdict)) + ": " + c.reason);
  if (c.witness) leaf.witness = c.witness->str();
  if (c.value) leaf.value = c.value->str();
  out.checks.add(std::move(leaf));
  out.code = c.verdict == Verdict::ModelEquivalent      ? exit_code::ok
             : c.verdict == Verdict::NotModelEquivalent ? exit_code::not_equivalent
                                                        : exit_code::inconclusive;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"brackets", "structure", "lemmas", "model", "liealg", "all"};
  return names;
}

inline void cmd_verify(const Surface& s, const JobSpec& job, Outcome& out) {
  const bool all = job.suite == "all";
  const bool on_surface = all || job.suite == "brackets" || job.suite == "structure" || job.suite == "lemmas";
  SampleSpec spec = job.sample_spec();

  if (on_surface) {
    Validation v = validate(s.F, spec, job.convention);
    out.sections["validation"] = validation_json(v.report);
    if (!v.report.ok()) {
      out.checks.add(v.report.checks);
    } else {
      const Hypersurface& H = *v.surface;
      SampleBatch batch = H.batch(spec);
      if (all || job.suite == "brackets") out.checks.add(check_bracket_identities(H, batch));
      if (all || job.suite == "structure") {
        CheckNode g = CheckNode::group("structure");
        g.add(check_structure_initial(H, batch));
        g.add(check_structure_final_base(H, batch));
        g.add(check_duality(H, batch));
        out.checks.add(std::move(g));
      }
      if (all || job.suite == "lemmas") {
        CheckNode g = CheckNode::group("lemmas");
        g.add(check_lemma_identities(H, batch));
        InvariantExprs inv = invariant_exprs(H, fault_of(job));
        g.add(check_route_agreement(H, inv, batch));
        SampleBatch lifted = lifted_batch(H, spec);
        g.add(check_secondary(H, inv, batch, lifted));
        out.checks.add(std::move(g));
      }
    }
  }
  if (all || job.suite == "model") out.checks.add(model_suite(spec, job.convention));
  if (all || job.suite == "liealg") out.checks.add(liealg_suite());
  if (!out.checks.ok()) out.code = exit_code::failure;
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

namespace detail {

inline void render_checks(const Json& node, const std::string& path, int depth, std::ostream& os) {
  const std::string name = path.empty() ? node["name"].get<std::string>() : path + "/" + node["name"].get<std::string>();
  const std::string status = node["status"];
  const bool leaf = !node.contains("children");
  if (depth <= 2 || (leaf && status != "pass")) {
    os << "[" << status << "] " << name;
    if (node.contains("detail")) os << ": " << node["detail"].get<std::string>();
    os << "\n";
    if (node.contains("witness")) os << "    witness " << node["witness"].get<std::string>() << "\n";
    if (node.contains("value")) os << "    value " << node["value"].get<std::string>() << "\n";
  }
  if (!leaf)
    for (const auto& c : node["children"]) render_checks(c, name, depth + 1, os);
}

}  // namespace detail

inline void render_text(const Json& r, std::ostream& os) {
  const Json& cmd = r["command"];
  os << "crcartan " << cmd["name"].get<std::string>() << "  surface " << cmd["surface"].get<std::string>() << "  seed "
     << cmd["seed"].get<std::uint64_t>() << "  mode " << cmd["mode"].get<std::string>() << "\n";
  if (r.contains("error")) {
    os << "error: " << r["error"]["message"].get<std::string>() << "\n";
    return;
  }
  if (r.contains("classification")) {
    const Json& c = r["classification"];
    os << "verdict " << c["verdict"].get<std::string>() << ": " << c["reason"].get<std::string>() << "\n";
  }
  if (r.contains("invariants")) {
    for (const auto& p : r["invariants"]["points"]) {
      os << "point " << p["point"].dump() << "\n";
      if (p.contains("error")) {
        os << "  error " << p["error"].get<std::string>() << "\n";
        continue;
      }
      for (const char* key : {"I0", "V0", "Q0", "Q0_unhalved"}) os << "  " << key << " = " << p[key].get<std::string>() << "\n";
      for (const auto& [w, val] : p["V0_weighted"].items()) os << "  V0*" << w << " = " << val.get<std::string>() << "\n";
    }
  }
  detail::render_checks(r["checks"], "", 0, os);
  const Json& s = r["summary"];
  os << s["pass"] << " passed, " << s["fail"] << " failed, " << s["info"] << " informational\n";
  os << "status " << r["status"].get<std::string>() << " (exit " << r["exit_code"] << ")\n";
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline std::uint64_t default_seed() {
  const char* env = std::getenv("CRCARTAN_SEED");
  if (!env || !*env) return 0;
  try {
    std::size_t used = 0;
    unsigned long long s = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return s;
  } catch (const std::exception&) {
    throw InputError(std::string("CRCARTAN_SEED is not an unsigned integer: ") + env);
  }
}

inline Json run_job(const JobSpec& job, int& code) {
  Json r;
  r["schema"] = kSchemaName;
  r["schema_version"] = kSchemaVersion;
  r["command"] = command_echo(job);
  r["status"] = nullptr;
  r["exit_code"] = nullptr;

  Outcome out;
  try {
    Surface s = resolve_surface(job.surface);
    r["surface"] = Json{{"kind", s.kind}, {"source", s.source}, {"expression", to_string(s.F)}};
    fault_of(job);  // reject malformed injections before any work
    if (job.command == "verify") {
      cmd_verify(s, job, out);
    } else {
      Validation v = run_validation(s, job, out);
      if (v.surface && job.command == "invariants") cmd_invariants(*v.surface, job, out);
      if (v.surface && job.command == "classify") cmd_classify(*v.surface, job, out);
    }
  } catch (const InputError& e) {
    out.code = exit_code::usage;
    Json err{{"kind", "input"}, {"message", e.what()}};
    if (e.position) err["position"] = *e.position;
    r["error"] = std::move(err);
  } catch (const Json::exception& e) {
    out.code = exit_code::usage;
    r["error"] = Json{{"kind", "input"}, {"message", e.what()}};
  } catch (const SamplingExhausted& e) {
    out.code = job.command == "classify" ? exit_code::inconclusive : exit_code::failure;
    r["error"] = Json{{"kind", "sampling"}, {"message", e.what()}};
  }

  r["status"] = out.code == exit_code::ok ? "pass" : out.code == exit_code::usage ? "error" : "fail";
  r["exit_code"] = out.code;
  r["summary"] = summary(out.checks);
  for (auto& [key, value] : out.sections.items()) r[key] = value;
  r["checks"] = to_json(out.checks);
  code = out.code;
  return r;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Rigid CR hypersurface verifier: hypotheses, invariants, model equivalence and identity suites",
               "crcartan"};
  JobSpec job;
  std::string mode = "exact", convention = "levi-positive";
  std::optional<std::uint64_t> seed;

  cli.add_option("command", job.command, "validate, invariants, classify or verify")
      ->required()
      ->check(CLI::IsMember({"validate", "invariants", "classify", "verify"}));
  std::string builtins;
  for (const auto& [name, make] : builtin_surfaces()) builtins += (builtins.empty() ? "" : ", ") + name;
  cli.add_option("--surface", job.surface, "Builtin (" + builtins + "), a surface expression or @file.json")
      ->capture_default_str();
  cli.add_option("--points", job.points_file, "JSON file of evaluation points");
  cli.add_option("--samples", job.samples, "Sampled points per identity")->check(CLI::Range(1, 100000))->capture_default_str();
  cli.add_option("--seed", seed, "Sampling seed (default: CRCARTAN_SEED or 0)");
  cli.add_option("--mode", mode, "Arithmetic for invariant values")->check(CLI::IsMember({"exact", "float"}))->capture_default_str();
  cli.add_option("--output", job.output, "Report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  cli.add_option("--suite", job.suite, "Suite for verify")->check(CLI::IsMember(suite_names()))->capture_default_str();
  cli.add_option("--convention", convention, "Orientation of T")
      ->check(CLI::IsMember({"levi-positive", "bracket-defined"}))
      ->capture_default_str();
  cli.add_option("--report", job.report_file, "Also write the JSON report to this file");
  cli.add_option("--inject-i0", job.inject_i0, "Add this expression to I0 (fault injection)");
  cli.add_option("--inject-v0", job.inject_v0, "Add this expression to V0 (fault injection)");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = cli.exit(e, out, err);
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  job.mode = mode == "float" ? Mode::Float : Mode::Exact;
  job.convention = convention == "bracket-defined" ? Convention::BracketDefined : Convention::LeviPositive;
  try {
    job.seed = seed ? *seed : default_seed();
  } catch (const InputError& e) {
    err << "crcartan: " << e.what() << "\n";
    return exit_code::usage;
  }

  int code = exit_code::ok;
  Json report = run_job(job, code);
  if (report.contains("error")) err << "crcartan: " << report["error"]["message"].get<std::string>() << "\n";

  std::string json = report.dump(2) + "\n";
  if (!job.report_file.empty()) {
    std::ofstream file(job.report_file);
    if (!file) {
      err << "crcartan: cannot write " << job.report_file << "\n";
      return exit_code::usage;
    }
    file << json;
  }
  if (job.output == "json")
    out << json;
  else
    render_text(report, out);
  return code;
}

}  // namespace crcartan::app
