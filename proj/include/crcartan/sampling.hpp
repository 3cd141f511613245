#pragma once

#include "expr.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace crcartan {

struct EvaluationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SamplingExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Assignment of scalar values to variables.
class Point {
 public:
  Point() = default;

  Point& set(VarId x, Scalar value) {
    values_[x.index()] = std::move(value);
    return *this;
  }
  // Sets x and its partner consistently.
  Point& set_conj(VarId x, const Scalar& value) {
    values_[x.index()] = value;
    values_[x.partner().index()] = value.conj();
    return *this;
  }

  bool has(VarId x) const { return values_[x.index()].has_value(); }
  const Scalar& at(VarId x) const {
    if (!has(x)) throw EvaluationError("missing assignment for " + std::string(x.name()));
    return *values_[x.index()];
  }

  bool exact() const {
    for (const auto& v : values_)
      if (v && !v->exact()) return false;
    return true;
  }

  bool conjugate_consistent() const {
    for (std::size_t i = 0; i < kVarCount; ++i) {
      VarId x(static_cast<std::uint8_t>(i));
      if (!values_[i]) continue;
      if (x.is_real() && !values_[i]->is_real()) return false;
      const auto& p = values_[x.partner().index()];
      if (p && !(*p == values_[i]->conj())) return false;
    }
    return true;
  }

  std::vector<std::pair<VarId, Scalar>> entries() const {
    std::vector<std::pair<VarId, Scalar>> out;
    for (std::size_t i = 0; i < kVarCount; ++i)
      if (values_[i]) out.emplace_back(VarId(static_cast<std::uint8_t>(i)), *values_[i]);
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [x, val] : entries()) {
      os << (first ? "" : ", ") << x.name() << "=" << val.str();
      first = false;
    }
    os << "}";
    return os.str();
  }

 private:
  std::array<std::optional<Scalar>, kVarCount> values_;
};

namespace detail {
template <class Num>
Num from_scalar(const Scalar& s);
template <>
inline GaussQ from_scalar<GaussQ>(const Scalar& s) {
  if (!s.exact()) throw EvaluationError("float value in exact evaluation");
  return s.gauss();
}
template <>
inline ComplexF from_scalar<ComplexF>(const Scalar& s) {
  return s.as_float();
}
inline ComplexF lift(const GaussQ& q, ComplexF*) { return ComplexF(q); }
inline GaussQ lift(const GaussQ& q, GaussQ*) { return q; }
}  // namespace detail

// Evaluates expressions at one point. The node memo persists across calls so
// a family of related expressions shares work; evaluated roots are pinned.
template <class Num>
class Evaluator {
 public:
  explicit Evaluator(const Point& p) : point_(p) {
    for (const auto& [x, val] : p.entries()) values_[x.index()] = detail::from_scalar<Num>(val);
  }

  const Point& point() const { return point_; }

  Num operator()(const Expr& e) {
    pins_.push_back(e);
    return eval(e);
  }

 private:
  Num eval(const Expr& e) {
    if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
    Num out;
    switch (e->kind()) {
      case Kind::Const: out = detail::lift(e->value(), static_cast<Num*>(nullptr)); break;
      case Kind::Var: {
        const auto& v = values_[e->var().index()];
        if (!v) throw EvaluationError("missing assignment for " + std::string(e->var().name()));
        out = *v;
        break;
      }
      case Kind::Sum:
        out = Num(0);
        for (const auto& c : e->children()) out += eval(c);
        break;
      case Kind::Product:
        out = Num(1);
        for (const auto& c : e->children()) out *= eval(c);
        break;
      case Kind::Power: {
        Num b = eval(e->children().front());
        if (e->exponent() < 0 && b.is_zero())
          throw DivisionByZero("division by zero in " + to_string(e->children().front(), 160));
        out = b.pow(e->exponent());
        break;
      }
      case Kind::Neg: out = -eval(e->children().front()); break;
    }
    memo_.emplace(e.get(), out);
    return out;
  }

  Point point_;
  std::array<std::optional<Num>, kVarCount> values_;
  std::unordered_map<const Node*, Num> memo_;
  std::vector<Expr> pins_;
};

// Exact if every assigned value is exact, float otherwise.
inline Scalar evaluate(const Expr& e, const Point& p) {
  if (p.exact()) return Scalar(Evaluator<GaussQ>(p)(e));
  return Scalar(Evaluator<ComplexF>(p)(e));
}

// ---------------------------------------------------------------------------
// Random sampling
// ---------------------------------------------------------------------------

struct SampleSpec {
  int count = 20;
  int numerator_bound = 16;
  int denominator_bound = 16;
  std::uint64_t seed = 0;
  // Candidates rejected before giving up, per requested point.
  int rejections_per_point = 50;
  // Extra admissibility test; evaluation failures are always rejected.
  std::function<bool(const Point&)> exclusion;
};

class PointSampler {
 public:
  explicit PointSampler(const SampleSpec& spec) : spec_(spec), rng_(spec.seed) {}

  Rational rational() {
    long span = 2L * spec_.numerator_bound + 1;
    long num = static_cast<long>(rng_() % static_cast<std::uint64_t>(span)) - spec_.numerator_bound;
    long den = 1 + static_cast<long>(rng_() % static_cast<std::uint64_t>(spec_.denominator_bound));
    return Rational(num, den);
  }

  GaussQ gaussian() {
    Rational re = rational();
    return GaussQ(re, rational());
  }

  // Draws values for all variables in mask (and their partners).
  Point draw(std::uint32_t mask) {
    Point p;
    for (std::size_t i = 0; i < kVarCount; ++i) {
      VarId x(static_cast<std::uint8_t>(i));
      bool wanted = (mask & x.bit()) || (mask & x.partner().bit());
      if (!wanted || p.has(x)) continue;
      if (x.is_real())
        p.set(x, Scalar(GaussQ(rational())));
      else
        p.set_conj(x, Scalar(gaussian()));
    }
    return p;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  SampleSpec spec_;
  std::mt19937_64 rng_;
};

// Draws spec.count admissible points; guards must evaluate to finite nonzero
// values at every accepted point.
inline std::vector<Point> draw_points(std::uint32_t mask, const SampleSpec& spec, const std::vector<Expr>& guards = {}) {
  PointSampler sampler(spec);
  std::vector<Point> points;
  long budget = static_cast<long>(spec.count) * spec.rejections_per_point;
  long rejected = 0;
  while (static_cast<int>(points.size()) < spec.count) {
    Point p = sampler.draw(mask);
    bool ok = !spec.exclusion || spec.exclusion(p);
    if (ok) {
      try {
        Evaluator<GaussQ> ev(p);
        for (const auto& g : guards)
          if (ev(g).is_zero()) {
            ok = false;
            break;
          }
      } catch (const DivisionByZero&) {
        ok = false;
      }
    }
    if (ok) {
      points.push_back(std::move(p));
    } else if (++rejected > budget) {
      throw SamplingExhausted("sampling exhausted after " + std::to_string(rejected) + " rejected candidates");
    }
  }
  return points;
}

struct ZeroTest {
  bool zero = true;
  int points_tested = 0;
  std::optional<Point> witness;
  std::optional<Scalar> value;
  std::string note;  // set when the witness is a singular point of e
};

// True iff e is exactly zero at every sampled admissible point. Candidates
// where e hits a division by zero are rejected like excluded ones.
inline ZeroTest is_zero_on_samples(const Expr& e, const SampleSpec& spec) {
  ZeroTest result;
  PointSampler sampler(spec);
  long budget = static_cast<long>(spec.count) * spec.rejections_per_point;
  long rejected = 0;
  while (result.points_tested < spec.count) {
    Point p = sampler.draw(e->var_mask());
    GaussQ value;
    bool ok = !spec.exclusion || spec.exclusion(p);
    if (ok) {
      try {
        value = Evaluator<GaussQ>(p)(e);
      } catch (const DivisionByZero&) {
        ok = false;
      }
    }
    if (!ok) {
      if (++rejected > budget)
        throw SamplingExhausted("sampling exhausted after " + std::to_string(rejected) + " rejected candidates");
      continue;
    }
    ++result.points_tested;
    if (!value.is_zero()) {
      result.zero = false;
      result.witness = p;
      result.value = Scalar(value);
      return result;
    }
  }
  return result;
}

// A fixed batch of points with persistent evaluators, for checking many
// related identities against the same samples.
class SampleBatch {
 public:
  SampleBatch() = default;
  explicit SampleBatch(std::vector<Point> points) {
    for (auto& p : points) evaluators_.emplace_back(p);
  }

  std::size_t size() const { return evaluators_.size(); }
  const Point& point(std::size_t i) const { return evaluators_[i].point(); }

  GaussQ value(std::size_t i, const Expr& e) { return evaluators_[i](e); }

  ZeroTest zero_test(const Expr& e) {
    ZeroTest result;
    for (auto& ev : evaluators_) {
      GaussQ value;
      try {
        value = ev(e);
      } catch (const DivisionByZero& err) {
        result.zero = false;
        result.witness = ev.point();
        result.note = err.what();
        return result;
      }
      ++result.points_tested;
      if (!value.is_zero()) {
        result.zero = false;
        result.witness = ev.point();
        result.value = Scalar(value);
        return result;
      }
    }
    return result;
  }

 private:
  std::vector<Evaluator<GaussQ>> evaluators_;
};

}  // namespace crcartan
