#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fqlin/errors.hpp"

namespace fqlin {

/// An element of F_q, stored as its code in 0..q-1. Code 0 is the additive
/// identity and code 1 the multiplicative identity. For q = p^e with e > 1 the
/// code is the base-p digit encoding of the polynomial representative
/// (constant term is the least significant digit).
struct Element {
  std::uint8_t code = 0;

  friend constexpr auto operator<=>(Element, Element) = default;
};

namespace detail {

inline bool is_prime(unsigned p) {
  if (p < 2) return false;
  for (unsigned f = 2; f * f <= p; ++f)
    if (p % f == 0) return false;
  return true;
}

// q = p^e with p prime, or nullopt.
inline std::optional<std::pair<unsigned, unsigned>> prime_power(unsigned q) {
  if (q < 2) return std::nullopt;
  unsigned p = 2;
  while (q % p != 0) ++p;
  unsigned e = 0;
  unsigned r = q;
  while (r % p == 0) {
    r /= p;
    ++e;
  }
  if (r != 1) return std::nullopt;
  return std::pair{p, e};
}

// Polynomials over F_p as coefficient vectors, lowest degree first.
using Poly = std::vector<unsigned>;

inline void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mod(Poly a, const Poly& m, unsigned p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  unsigned lead_inv = 1;
  while ((m.back() * lead_inv) % p != 1) ++lead_inv;
  while (a.size() > dm) {
    const unsigned c = (a.back() * lead_inv) % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) a[shift + i] = (a[shift + i] + p * p - c * m[i] % p) % p;
    trim(a);
  }
  return a;
}

inline Poly decode(unsigned code, unsigned p, unsigned e) {
  Poly a(e, 0);
  for (unsigned i = 0; i < e; ++i) {
    a[i] = code % p;
    code /= p;
  }
  return a;
}

inline unsigned encode(const Poly& a, unsigned p) {
  unsigned code = 0;
  for (std::size_t i = a.size(); i-- > 0;) code = code * p + a[i];
  return code;
}

// True if the monic polynomial m of degree e has no monic factor of degree
// 1..e/2. Brute force is fine for q <= 256.
inline bool irreducible(const Poly& m, unsigned p) {
  const unsigned e = static_cast<unsigned>(m.size() - 1);
  for (unsigned deg = 1; 2 * deg <= e; ++deg) {
    unsigned count = 1;
    for (unsigned i = 0; i < deg; ++i) count *= p;
    for (unsigned low = 0; low < count; ++low) {
      Poly f = decode(low, p, deg);
      f.push_back(1);
      if (poly_mod(m, f, p).empty()) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Dense-table arithmetic in F_q, 2 <= q <= 256. Immutable after construction.
class FiniteField {
 public:
  /// Builds F_q using the lexicographically least monic irreducible
  /// polynomial of degree e over F_p (ordered by the code of its lower
  /// coefficients, so x^3+x+1 precedes x^3+x^2+1).
  static std::shared_ptr<const FiniteField> make(unsigned q) {
    if (q > 256) throw NotAPrimePower(q);
    const auto pe = detail::prime_power(q);
    if (!pe) throw NotAPrimePower(q);
    return std::shared_ptr<const FiniteField>(new FiniteField(q, pe->first, pe->second));
  }

  unsigned order() const noexcept { return q_; }
  unsigned characteristic() const noexcept { return p_; }
  unsigned degree() const noexcept { return e_; }
  /// Monic modulus, lowest degree coefficient first (size e + 1).
  const std::vector<unsigned>& modulus() const noexcept { return modulus_; }

  bool is_prime_field() const noexcept { return e_ == 1; }
  bool characteristic_two() const noexcept { return p_ == 2; }

  static constexpr Element zero() noexcept { return Element{0}; }
  static constexpr Element one() noexcept { return Element{1}; }

  Element element(unsigned code) const {
    if (code >= q_) throw FieldMismatch("element code " + std::to_string(code) + " out of range for q=" + std::to_string(q_));
    return Element{static_cast<std::uint8_t>(code)};
  }
  bool contains(unsigned code) const noexcept { return code < q_; }

  Element add(Element a, Element b) const noexcept { return Element{add_[idx(a, b)]}; }
  Element sub(Element a, Element b) const noexcept { return add(a, neg(b)); }
  Element mul(Element a, Element b) const noexcept { return Element{mul_[idx(a, b)]}; }
  Element neg(Element a) const noexcept { return Element{neg_[a.code]}; }
  Element inv(Element a) const {
    if (a.code == 0) throw DivisionByZero();
    return Element{inv_[a.code]};
  }
  Element div(Element a, Element b) const { return mul(a, inv(b)); }
  Element pow(Element a, unsigned long long e) const noexcept {
    Element r = one();
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  // Raw q*q tables indexed by a*q + b, for vectorized row kernels.
  const std::uint8_t* add_table() const noexcept { return add_.data(); }
  const std::uint8_t* mul_table() const noexcept { return mul_.data(); }
  const std::uint8_t* neg_table() const noexcept { return neg_.data(); }
  const std::uint8_t* inv_table() const noexcept { return inv_.data(); }

 private:
  FiniteField(unsigned q, unsigned p, unsigned e) : q_(q), p_(p), e_(e) {
    if (e == 1) {
      modulus_ = {0, 1};
    } else {
      unsigned count = q;  // p^e candidates for the lower coefficients
      for (unsigned low = 0; low < count; ++low) {
        detail::Poly m = detail::decode(low, p, e);
        m.push_back(1);
        if (m[0] != 0 && detail::irreducible(m, p)) {
          modulus_ = m;
          break;
        }
      }
    }
    add_.resize(std::size_t{q} * q);
    mul_.resize(std::size_t{q} * q);
    neg_.resize(q);
    inv_.assign(q, 0);
    for (unsigned a = 0; a < q; ++a) {
      const auto pa = detail::decode(a, p, e);
      for (unsigned b = 0; b < q; ++b) {
        const auto pb = detail::decode(b, p, e);
        detail::Poly s(e);
        for (unsigned i = 0; i < e; ++i) s[i] = (pa[i] + pb[i]) % p;
        add_[std::size_t{a} * q + b] = static_cast<std::uint8_t>(detail::encode(s, p));
        detail::Poly prod(2 * e, 0);
        for (unsigned i = 0; i < e; ++i)
          for (unsigned j = 0; j < e; ++j) prod[i + j] = (prod[i + j] + pa[i] * pb[j]) % p;
        auto r = detail::poly_mod(prod, modulus_, p);
        r.resize(e, 0);
        mul_[std::size_t{a} * q + b] = static_cast<std::uint8_t>(detail::encode(r, p));
      }
    }
    for (unsigned a = 0; a < q; ++a) {
      for (unsigned b = 0; b < q; ++b) {
        if (add_[std::size_t{a} * q + b] == 0) neg_[a] = static_cast<std::uint8_t>(b);
        if (mul_[std::size_t{a} * q + b] == 1) inv_[a] = static_cast<std::uint8_t>(b);
      }
    }
  }

  std::size_t idx(Element a, Element b) const noexcept { return std::size_t{a.code} * q_ + b.code; }

  unsigned q_, p_, e_;
  std::vector<unsigned> modulus_;
  std::vector<std::uint8_t> add_, mul_, neg_, inv_;
};

using Field = std::shared_ptr<const FiniteField>;

inline Field make_field(unsigned q) { return FiniteField::make(q); }

}  // namespace fqlin
