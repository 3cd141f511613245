#pragma once

#include "scalar.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace crcartan {

// ---------------------------------------------------------------------------
// Variables
// ---------------------------------------------------------------------------

inline constexpr std::size_t kVarCount = 13;

struct VarInfo {
  std::string_view name;
  std::uint8_t partner;
  bool real;
};

// z and zb are independent symbols paired by conjugation. E stands for e^t
// and U for e^{it}; both are formal parameters used to keep flows rational.
inline constexpr std::array<VarInfo, kVarCount> kVarTable{{
    {"z1", 2, false},
    {"z2", 3, false},
    {"zb1", 0, false},
    {"zb2", 1, false},
    {"v", 4, true},
    {"w", 6, false},
    {"wb", 5, false},
    {"c", 8, false},
    {"cb", 7, false},
    {"t", 9, true},
    {"E", 10, true},
    {"U", 12, false},
    {"Ub", 11, false},
}};

class VarId {
 public:
  constexpr VarId() = default;
  constexpr explicit VarId(std::uint8_t index) : index_(index) {}

  constexpr std::uint8_t index() const { return index_; }
  constexpr std::string_view name() const { return kVarTable[index_].name; }
  constexpr VarId partner() const { return VarId(kVarTable[index_].partner); }
  constexpr bool is_real() const { return kVarTable[index_].real; }
  constexpr std::uint32_t bit() const { return 1u << index_; }

  static std::optional<VarId> from_name(std::string_view name) {
    for (std::size_t i = 0; i < kVarCount; ++i)
      if (kVarTable[i].name == name) return VarId(static_cast<std::uint8_t>(i));
    return std::nullopt;
  }

  friend constexpr auto operator<=>(VarId, VarId) = default;

 private:
  std::uint8_t index_ = 0;
};

namespace var {
inline constexpr VarId z1{0}, z2{1}, zb1{2}, zb2{3}, v{4}, w{5}, wb{6}, c{7}, cb{8}, t{9}, E{10}, U{11}, Ub{12};
}

// ---------------------------------------------------------------------------
// Expression DAG
// ---------------------------------------------------------------------------

enum class Kind : std::uint8_t { Const, Var, Sum, Product, Power, Neg };

class Node;

// Immutable, hash-consed expression handle. Structurally equal normalized
// expressions share one node, so == is pointer comparison.
class Expr {
 public:
  Expr();
  Expr(long n);
  Expr(const GaussQ& q);
  Expr(VarId x);
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node* operator->() const { return node_.get(); }
  const Node& operator*() const { return *node_; }
  const Node* get() const { return node_.get(); }
  const std::shared_ptr<const Node>& ptr() const { return node_; }

  friend bool operator==(const Expr& a, const Expr& b) { return a.node_ == b.node_; }

 private:
  std::shared_ptr<const Node> node_;
};

class Node {
 public:
  Kind kind() const { return kind_; }
  const GaussQ& value() const { return value_; }
  VarId var() const { return var_; }
  const std::vector<Expr>& children() const { return children_; }
  long exponent() const { return exponent_; }
  std::size_t hash() const { return hash_; }
  // Bitmask of variables occurring below this node.
  std::uint32_t var_mask() const { return mask_; }

  bool is_const() const { return kind_ == Kind::Const; }
  bool is_zero() const { return kind_ == Kind::Const && value_.is_zero(); }
  bool is_one() const { return kind_ == Kind::Const && value_.is_one(); }
  bool depends_on(VarId x) const { return (mask_ & x.bit()) != 0; }

  // Memo slot for the derivative in x; guard with Interner::cache_mutex.
  std::shared_ptr<const Node>& derivative_slot(VarId x) const { return dcache_[x.index()]; }

 private:
  friend class Interner;

  Kind kind_ = Kind::Const;
  GaussQ value_;
  VarId var_;
  std::vector<Expr> children_;
  long exponent_ = 0;
  std::size_t hash_ = 0;
  std::uint32_t mask_ = 0;
  mutable std::array<std::shared_ptr<const Node>, kVarCount> dcache_;
};

class Interner {
 public:
  static Interner& instance() {
    static Interner* table = new Interner();  // intentionally leaked: outlives static Exprs
    return *table;
  }

  std::shared_ptr<const Node> intern(Kind kind, GaussQ value, VarId x, std::vector<Expr> children, long exponent) {
    std::size_t h = static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ull;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    std::uint32_t mask = 0;
    switch (kind) {
      case Kind::Const: mix(value.hash()); break;
      case Kind::Var: mix(x.index() + 1u); mask = x.bit(); break;
      default:
        for (const auto& c : children) {
          mix(c->hash());
          mask |= c->var_mask();
        }
        mix(static_cast<std::size_t>(exponent));
    }

    std::lock_guard lock(mutex_);
    auto [lo, hi] = table_.equal_range(h);
    for (auto it = lo; it != hi;) {
      auto existing = it->second.lock();
      if (!existing) {
        it = table_.erase(it);
        continue;
      }
      if (existing->kind_ == kind && existing->exponent_ == exponent && existing->var_ == x &&
          existing->children_ == children && existing->value_ == value)
        return existing;
      ++it;
    }
    auto node = std::shared_ptr<Node>(new Node());
    node->kind_ = kind;
    node->value_ = std::move(value);
    node->var_ = x;
    node->children_ = std::move(children);
    node->exponent_ = exponent;
    node->hash_ = h;
    node->mask_ = mask;
    table_.emplace(h, node);
    if (table_.size() > sweep_at_) sweep();
    return node;
  }

  std::mutex& cache_mutex(const void* p) {
    return stripes_[(reinterpret_cast<std::uintptr_t>(p) >> 4) % stripes_.size()];
  }

 private:
  void sweep() {
    std::erase_if(table_, [](const auto& kv) { return kv.second.expired(); });
    sweep_at_ = std::max<std::size_t>(1u << 16, table_.size() * 2);
  }

  std::mutex mutex_;
  std::unordered_multimap<std::size_t, std::weak_ptr<const Node>> table_;
  std::size_t sweep_at_ = 1u << 16;
  std::array<std::mutex, 64> stripes_;
};

inline Expr constant(const GaussQ& q) { return Expr(Interner::instance().intern(Kind::Const, q, {}, {}, 0)); }
inline Expr variable(VarId x) { return Expr(Interner::instance().intern(Kind::Var, {}, x, {}, 0)); }
inline const Expr& zero() {
  static const Expr z = constant(GaussQ(0));
  return z;
}
inline const Expr& one() {
  static const Expr o = constant(GaussQ(1));
  return o;
}
inline Expr imag_unit() { return constant(GaussQ::imag_unit()); }

inline Expr::Expr() : Expr(zero()) {}
inline Expr::Expr(long n) : Expr(constant(GaussQ(n))) {}
inline Expr::Expr(const GaussQ& q) : Expr(constant(q)) {}
inline Expr::Expr(VarId x) : Expr(variable(x)) {}

namespace detail {
inline Expr raw(Kind kind, std::vector<Expr> children, long exponent = 0) {
  return Expr(Interner::instance().intern(kind, {}, {}, std::move(children), exponent));
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Smart constructors: constant folding, flattening, 0/1 elimination.
// Sums keep their folded constant last, products keep it first.
// ---------------------------------------------------------------------------

inline Expr add(const std::vector<Expr>& terms) {
  std::vector<Expr> out;
  GaussQ acc;
  bool has_const = false;
  auto take = [&](const Expr& t) {
    if (t->is_const()) {
      acc += t->value();
      has_const = true;
    } else {
      out.push_back(t);
    }
  };
  for (const auto& t : terms) {
    if (t->kind() == Kind::Sum)
      for (const auto& c : t->children()) take(c);
    else
      take(t);
  }
  if (has_const && !acc.is_zero()) out.push_back(constant(acc));
  if (out.empty()) return zero();
  if (out.size() == 1) return out.front();
  return detail::raw(Kind::Sum, std::move(out));
}

inline Expr mul(const std::vector<Expr>& factors) {
  std::vector<Expr> out;
  GaussQ acc(1);
  for (const auto& f : factors) {
    auto take = [&](const Expr& g) {
      if (g->is_const())
        acc *= g->value();
      else
        out.push_back(g);
    };
    if (f->kind() == Kind::Product)
      for (const auto& c : f->children()) take(c);
    else
      take(f);
  }
  if (acc.is_zero()) return zero();
  if (!acc.is_one()) out.insert(out.begin(), constant(acc));
  if (out.empty()) return one();
  if (out.size() == 1) return out.front();
  return detail::raw(Kind::Product, std::move(out));
}

inline Expr neg(const Expr& e) {
  switch (e->kind()) {
    case Kind::Const: return constant(-e->value());
    case Kind::Neg: return e->children().front();
    case Kind::Product:
      if (e->children().front()->is_const()) {
        std::vector<Expr> kids = e->children();
        kids.front() = constant(-kids.front()->value());
        return mul(kids);
      }
      break;
    default: break;
  }
  return detail::raw(Kind::Neg, {e});
}

inline Expr pow(const Expr& base, long n) {
  if (n == 0) return one();
  if (n == 1) return base;
  if (base->is_const() && !base->is_zero()) return constant(base->value().pow(n));
  if (base->is_one()) return one();
  if (base->kind() == Kind::Power) return pow(base->children().front(), base->exponent() * n);
  return detail::raw(Kind::Power, {base}, n);
}

inline Expr sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }
inline Expr inv(const Expr& a) { return pow(a, -1); }
inline Expr div(const Expr& a, const Expr& b) { return mul({a, inv(b)}); }

inline Expr operator+(const Expr& a, const Expr& b) { return add({a, b}); }
inline Expr operator-(const Expr& a, const Expr& b) { return sub(a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return mul({a, b}); }
inline Expr operator/(const Expr& a, const Expr& b) { return div(a, b); }
inline Expr operator-(const Expr& a) { return neg(a); }
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr rational(long num, long den = 1) { return constant(GaussQ(Rational(num, den))); }

// ---------------------------------------------------------------------------
// Memoized DAG traversal helpers
// ---------------------------------------------------------------------------

// Rebuilds a node from new children through the smart constructors.
inline Expr rebuild(const Expr& e, const std::vector<Expr>& kids) {
  switch (e->kind()) {
    case Kind::Sum: return add(kids);
    case Kind::Product: return mul(kids);
    case Kind::Power: return pow(kids.front(), e->exponent());
    case Kind::Neg: return neg(kids.front());
    default: return e;
  }
}

// Bottom-up rewrite with per-call memo. leaf maps Const and Var nodes.
template <class Leaf>
Expr transform(const Expr& root, Leaf&& leaf) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& e) -> Expr {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Expr out;
    if (e->kind() == Kind::Const || e->kind() == Kind::Var) {
      out = leaf(e);
    } else {
      std::vector<Expr> kids;
      kids.reserve(e->children().size());
      for (const auto& c : e->children()) kids.push_back(go(c));
      out = kids == e->children() ? e : rebuild(e, kids);
    }
    memo.emplace(e.get(), out);
    return out;
  };
  return go(root);
}

inline Expr conjugate(const Expr& e) {
  return transform(e, [](const Expr& leaf) {
    if (leaf->is_const()) return constant(leaf->value().conj());
    return variable(leaf->var().partner());
  });
}

inline Expr substitute(const Expr& e, const std::map<VarId, Expr>& replacement) {
  std::uint32_t mask = 0;
  for (const auto& [x, _] : replacement) mask |= x.bit();
  if ((e->var_mask() & mask) == 0) return e;
  return transform(e, [&](const Expr& leaf) {
    if (leaf->kind() == Kind::Var)
      if (auto it = replacement.find(leaf->var()); it != replacement.end()) return it->second;
    return leaf;
  });
}

inline std::vector<VarId> free_vars(const Expr& e) {
  std::vector<VarId> out;
  for (std::size_t i = 0; i < kVarCount; ++i)
    if (e->var_mask() & (1u << i)) out.emplace_back(static_cast<std::uint8_t>(i));
  return out;
}

// Number of distinct nodes in the DAG.
inline std::size_t dag_size(const Expr& e) {
  std::unordered_map<const Node*, bool> seen;
  std::vector<const Node*> stack{e.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (!seen.emplace(n, true).second) continue;
    for (const auto& c : n->children()) stack.push_back(c.get());
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Differentiation (Wirtinger: z and zb independent), memoized per node.
// ---------------------------------------------------------------------------

inline Expr differentiate(const Expr& e, VarId x) {
  if (!e->depends_on(x)) return zero();
  if (e->kind() == Kind::Var) return one();

  auto& m = Interner::instance().cache_mutex(e.get());
  {
    std::lock_guard lock(m);
    if (const auto& cached = e->derivative_slot(x)) return Expr(cached);
  }

  Expr d;
  const auto& kids = e->children();
  switch (e->kind()) {
    case Kind::Sum: {
      std::vector<Expr> terms;
      for (const auto& c : kids)
        if (c->depends_on(x)) terms.push_back(differentiate(c, x));
      d = add(terms);
      break;
    }
    case Kind::Product: {
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (!kids[i]->depends_on(x)) continue;
        std::vector<Expr> factors = kids;
        factors[i] = differentiate(kids[i], x);
        terms.push_back(mul(factors));
      }
      d = add(terms);
      break;
    }
    case Kind::Power: {
      long n = e->exponent();
      d = mul({Expr(n), pow(kids.front(), n - 1), differentiate(kids.front(), x)});
      break;
    }
    case Kind::Neg: d = neg(differentiate(kids.front(), x)); break;
    default: d = zero();
  }

  std::lock_guard lock(m);
  auto& slot = e->derivative_slot(x);
  if (!slot) slot = d.ptr();
  return d;
}

inline Expr differentiate(const Expr& e, std::initializer_list<VarId> xs) {
  Expr out = e;
  for (VarId x : xs) out = differentiate(out, x);
  return out;
}

// ---------------------------------------------------------------------------
// simplify_basic: folding plus merging of like factors and like terms.
// ---------------------------------------------------------------------------

std::string to_string(const Expr& e, std::size_t limit);

namespace detail {

// Deterministic total order on interned nodes (hash, then structure).
inline bool canonical_less(const Expr& a, const Expr& b) {
  if (a == b) return false;
  if (a->hash() != b->hash()) return a->hash() < b->hash();
  if (a->kind() != b->kind()) return a->kind() < b->kind();
  return to_string(a, std::string::npos) < to_string(b, std::string::npos);
}

inline void sort_canonically(std::vector<Expr>& v) { std::stable_sort(v.begin(), v.end(), canonical_less); }

// Splits a term into (coefficient, monomial).
inline std::pair<GaussQ, Expr> split_coefficient(const Expr& t) {
  if (t->is_const()) return {t->value(), one()};
  if (t->kind() == Kind::Neg) {
    auto [c, m] = split_coefficient(t->children().front());
    return {-c, m};
  }
  if (t->kind() == Kind::Product && t->children().front()->is_const()) {
    std::vector<Expr> rest(t->children().begin() + 1, t->children().end());
    return {t->children().front()->value(), mul(rest)};
  }
  return {GaussQ(1), t};
}

inline Expr merge_product(const std::vector<Expr>& kids) {
  std::vector<std::pair<Expr, long>> powers;
  std::vector<Expr> others;
  GaussQ coefficient(1);
  for (const auto& k : kids) {
    if (k->is_const()) {
      coefficient *= k->value();
      continue;
    }
    Expr base = k;
    long n = 1;
    if (k->kind() == Kind::Neg) {
      coefficient = -coefficient;
      base = k->children().front();
    }
    if (base->kind() == Kind::Power) {
      n = base->exponent();
      base = base->children().front();
    }
    auto it = std::find_if(powers.begin(), powers.end(), [&](const auto& p) { return p.first == base; });
    if (it == powers.end())
      powers.emplace_back(base, n);
    else
      it->second += n;
  }
  std::vector<Expr> factors;
  for (const auto& [b, n] : powers)
    if (n != 0) factors.push_back(pow(b, n));
  sort_canonically(factors);
  factors.insert(factors.begin(), constant(coefficient));
  return mul(factors);
}

inline Expr merge_sum(const std::vector<Expr>& kids) {
  std::vector<std::pair<Expr, GaussQ>> terms;
  for (const auto& k : kids) {
    auto [c, m] = split_coefficient(k);
    auto it = std::find_if(terms.begin(), terms.end(), [&](const auto& p) { return p.first == m; });
    if (it == terms.end())
      terms.emplace_back(m, c);
    else
      it->second += c;
  }
  std::vector<Expr> out;
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return canonical_less(a.first, b.first); });
  for (const auto& [m, c] : terms) {
    if (c.is_zero()) continue;
    if (c.is_one())
      out.push_back(m);
    else if (c == GaussQ(-1))
      out.push_back(neg(m));
    else
      out.push_back(mul({constant(c), m}));
  }
  return add(out);
}

}  // namespace detail

inline Expr simplify_basic(const Expr& root) {
  std::unordered_map<const Node*, Expr> memo;
  std::function<Expr(const Expr&)> go = [&](const Expr& e) -> Expr {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    Expr out = e;
    if (!e->children().empty()) {
      std::vector<Expr> kids;
      for (const auto& c : e->children()) kids.push_back(go(c));
      switch (e->kind()) {
        case Kind::Sum: out = detail::merge_sum(kids); break;
        case Kind::Product: out = detail::merge_product(kids); break;
        default: out = rebuild(e, kids);
      }
    }
    memo.emplace(e.get(), out);
    return out;
  };
  return go(root);
}

// ---------------------------------------------------------------------------
// Canonical printer. Emits the DSL; normalized trees reparse to themselves.
// ---------------------------------------------------------------------------

namespace detail {

class Printer {
 public:
  explicit Printer(std::size_t limit) : limit_(limit) {}

  std::string run(const Expr& e) {
    expr(e);
    if (truncated_) out_ += "...";
    return out_;
  }

 private:
  void put(std::string_view s) {
    if (truncated_) return;
    if (out_.size() + s.size() > limit_) {
      out_.append(s.substr(0, limit_ > out_.size() ? limit_ - out_.size() : 0));
      truncated_ = true;
      return;
    }
    out_.append(s);
  }

  static std::string rational_text(const Rational& q) { return to_string(q); }

  // Constant usable inside a product or after a unary minus.
  void constant_factor(const GaussQ& q) {
    if (q.is_real()) {
      put(rational_text(q.re()));
    } else if (sgn(q.re()) == 0) {
      const Rational& m = q.im();
      if (m == 1)
        put("i");
      else if (m == -1)
        put("-i");
      else {
        put(rational_text(m));
        put("*i");
      }
    } else {
      put("(");
      put(q.str());
      put(")");
    }
  }

  void expr(const Expr& e) {
    if (e->kind() != Kind::Sum) return term(e);
    const auto& kids = e->children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const Expr& k = kids[i];
      if (i == 0) {
        term(k);
      } else if (k->kind() == Kind::Neg) {
        put(" - ");
        const Expr& inner = k->children().front();
        if (inner->kind() == Kind::Sum) {
          put("(");
          expr(inner);
          put(")");
        } else {
          term(inner);
        }
      } else {
        put(" + ");
        term(k);
      }
    }
  }

  void term(const Expr& e) {
    if (e->kind() != Kind::Product) return factor(e);
    const auto& kids = e->children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) put("*");
      factor(kids[i]);
    }
  }

  void factor(const Expr& e) {
    switch (e->kind()) {
      case Kind::Const: constant_factor(e->value()); return;
      case Kind::Var: put(e->var().name()); return;
      case Kind::Power: {
        const Expr& b = e->children().front();
        if (b->kind() == Kind::Var || (b->is_const() && b->value().is_real() && sgn(b->value().re()) >= 0)) {
          factor(b);
        } else {
          put("(");
          expr(b);
          put(")");
        }
        put("^");
        put(std::to_string(e->exponent()));
        return;
      }
      case Kind::Neg: {
        const Expr& inner = e->children().front();
        put("-");
        if (inner->kind() == Kind::Sum || inner->kind() == Kind::Product) {
          put("(");
          expr(inner);
          put(")");
        } else {
          factor(inner);
        }
        return;
      }
      default:
        put("(");
        expr(e);
        put(")");
    }
  }

  std::size_t limit_;
  std::string out_;
  bool truncated_ = false;
};

}  // namespace detail

inline std::string to_string(const Expr& e, std::size_t limit = std::string::npos) {
  return detail::Printer(limit).run(e);
}

}  // namespace crcartan
