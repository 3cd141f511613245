#pragma once

#include <gmpxx.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <compare>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace crcartan {

using Rational = mpq_class;
// 50 decimal digits, roughly 166 significant bits.
using BigFloat = boost::multiprecision::cpp_bin_float_50;

struct DivisionByZero : std::domain_error {
  using std::domain_error::domain_error;
};

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline BigFloat to_bigfloat(const Rational& q) {
  return BigFloat(q.get_num().get_str()) / BigFloat(q.get_den().get_str());
}

// Exact element of Q(i).
class GaussQ {
 public:
  GaussQ() = default;
  GaussQ(long n) : re_(n) {}
  GaussQ(Rational re, Rational im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussQ imag_unit() { return GaussQ(0, 1); }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussQ conj() const { return GaussQ(re_, -im_); }
  Rational norm() const { return re_ * re_ + im_ * im_; }

  GaussQ operator-() const { return GaussQ(-re_, -im_); }
  GaussQ& operator+=(const GaussQ& o) { re_ += o.re_; im_ += o.im_; return *this; }
  GaussQ& operator-=(const GaussQ& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  GaussQ& operator*=(const GaussQ& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussQ& operator/=(const GaussQ& o) { return *this *= o.inverse(); }

  GaussQ inverse() const {
    if (is_zero()) throw DivisionByZero("division by zero");
    Rational n = norm();
    return GaussQ(re_ / n, -im_ / n);
  }

  GaussQ pow(long n) const {
    GaussQ base = n < 0 ? inverse() : *this;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    GaussQ acc(1);
    while (e) {
      if (e & 1u) acc *= base;
      e >>= 1u;
      if (e) base *= base;
    }
    return acc;
  }

  friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
  friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
  friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
  friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
  friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re_ == b.re_ && a.im_ == b.im_; }

  std::size_t hash() const {
    auto part = [](const Rational& q) {
      std::size_t h = mpz_get_ui(q.get_num_mpz_t()) * 1000003u ^ mpz_get_ui(q.get_den_mpz_t());
      return h * 2u + (sgn(q) < 0 ? 1u : 0u);
    };
    return part(re_) * 31u + part(im_);
  }

  // Human readable "a", "b*i" or "a + b*i".
  std::string str() const {
    if (sgn(im_) == 0) return to_string(re_);
    std::string ip = im_ == 1 ? "i" : im_ == -1 ? "-i" : to_string(im_) + "*i";
    if (sgn(re_) == 0) return ip;
    if (sgn(im_) < 0) {
      Rational m = -im_;
      return to_string(re_) + " - " + (m == 1 ? std::string("i") : to_string(m) + "*i");
    }
    return to_string(re_) + " + " + ip;
  }

 private:
  Rational re_{0};
  Rational im_{0};
};

// High-precision complex number for transcendental flows.
class ComplexF {
 public:
  ComplexF() = default;
  ComplexF(long n) : re_(n) {}
  ComplexF(BigFloat re, BigFloat im = 0) : re_(std::move(re)), im_(std::move(im)) {}
  explicit ComplexF(const GaussQ& q) : re_(to_bigfloat(q.re())), im_(to_bigfloat(q.im())) {}

  const BigFloat& re() const { return re_; }
  const BigFloat& im() const { return im_; }

  bool is_zero() const { return re_ == 0 && im_ == 0; }
  ComplexF conj() const { return {re_, -im_}; }
  BigFloat abs() const { return boost::multiprecision::sqrt(re_ * re_ + im_ * im_); }

  ComplexF operator-() const { return {-re_, -im_}; }
  ComplexF& operator+=(const ComplexF& o) { re_ += o.re_; im_ += o.im_; return *this; }
  ComplexF& operator-=(const ComplexF& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
  ComplexF& operator*=(const ComplexF& o) {
    BigFloat r = re_ * o.re_ - im_ * o.im_;
    im_ = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    return *this;
  }
  ComplexF& operator/=(const ComplexF& o) { return *this *= o.inverse(); }

  ComplexF inverse() const {
    if (is_zero()) throw DivisionByZero("division by zero");
    BigFloat n = re_ * re_ + im_ * im_;
    return {re_ / n, -im_ / n};
  }

  ComplexF pow(long n) const {
    ComplexF base = n < 0 ? inverse() : *this;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    ComplexF acc(1);
    while (e) {
      if (e & 1u) acc *= base;
      e >>= 1u;
      if (e) base *= base;
    }
    return acc;
  }

  friend ComplexF operator+(ComplexF a, const ComplexF& b) { return a += b; }
  friend ComplexF operator-(ComplexF a, const ComplexF& b) { return a -= b; }
  friend ComplexF operator*(ComplexF a, const ComplexF& b) { return a *= b; }
  friend ComplexF operator/(ComplexF a, const ComplexF& b) { return a /= b; }

  std::string str(int digits = 20) const {
    return re_.str(digits) + (im_ < 0 ? " - " : " + ") + boost::multiprecision::abs(im_).str(digits) + "*i";
  }

 private:
  BigFloat re_{0};
  BigFloat im_{0};
};

enum class ScalarMode { Exact, Float };

// A value in either exact or float mode. Mixed arithmetic promotes to float.
class Scalar {
 public:
  Scalar() : v_(GaussQ()) {}
  Scalar(long n) : v_(GaussQ(n)) {}
  Scalar(GaussQ q) : v_(std::move(q)) {}
  Scalar(ComplexF f) : v_(std::move(f)) {}

  ScalarMode mode() const { return v_.index() == 0 ? ScalarMode::Exact : ScalarMode::Float; }
  bool exact() const { return v_.index() == 0; }
  const GaussQ& gauss() const { return std::get<GaussQ>(v_); }
  ComplexF as_float() const { return exact() ? ComplexF(gauss()) : std::get<ComplexF>(v_); }

  bool is_zero() const { return exact() ? gauss().is_zero() : std::get<ComplexF>(v_).is_zero(); }
  Scalar conj() const { return exact() ? Scalar(gauss().conj()) : Scalar(std::get<ComplexF>(v_).conj()); }
  bool is_real() const { return exact() ? gauss().is_real() : std::get<ComplexF>(v_).im() == 0; }

  std::string str() const { return exact() ? gauss().str() : std::get<ComplexF>(v_).str(); }

  friend Scalar operator+(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, const auto& y) { return x += y; }); }
  friend Scalar operator-(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, const auto& y) { return x -= y; }); }
  friend Scalar operator*(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, const auto& y) { return x *= y; }); }
  friend Scalar operator/(const Scalar& a, const Scalar& b) { return combine(a, b, [](auto x, const auto& y) { return x /= y; }); }
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact() && b.exact()) return a.gauss() == b.gauss();
    ComplexF x = a.as_float(), y = b.as_float();
    return x.re() == y.re() && x.im() == y.im();
  }

 private:
  template <class Op>
  static Scalar combine(const Scalar& a, const Scalar& b, Op op) {
    if (a.exact() && b.exact()) return Scalar(op(a.gauss(), b.gauss()));
    return Scalar(op(a.as_float(), b.as_float()));
  }

  std::variant<GaussQ, ComplexF> v_;
};

// Relative distance |a-b| / max(1, |a|, |b|) in float arithmetic.
inline BigFloat relative_distance(const Scalar& a, const Scalar& b) {
  ComplexF x = a.as_float(), y = b.as_float();
  BigFloat scale = std::max({BigFloat(1), x.abs(), y.abs()});
  return (x - y).abs() / scale;
}

}  // namespace crcartan
