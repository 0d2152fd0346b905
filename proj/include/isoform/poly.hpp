#pragma once

// Univariate polynomials over a FieldCtx: arithmetic, gcd, reciprocal
// polynomials and palindromial tests, irreducibility, and full factorization
// over finite fields (squarefree / distinct-degree / equal-degree).

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "isoform/field.hpp"

namespace isoform {

class Poly {
 public:
  Poly() = default;
  explicit Poly(FieldCtxPtr ctx) : ctx_(std::move(ctx)) {}
  Poly(FieldCtxPtr ctx, std::vector<Elt> coeffs) : ctx_(std::move(ctx)), c_(std::move(coeffs)) { prune(); }

  static Poly zero(const FieldCtxPtr& ctx) { return Poly(ctx); }
  static Poly one(const FieldCtxPtr& ctx) { return Poly(ctx, {ctx->one()}); }
  static Poly x(const FieldCtxPtr& ctx) { return Poly(ctx, {ctx->zero(), ctx->one()}); }
  static Poly constant(const Elt& c) { return Poly(c.ctx(), {c}); }
  // x - lambda
  static Poly linear_root(const Elt& lambda) { return Poly(lambda.ctx(), {-lambda, lambda.ctx()->one()}); }

  const FieldCtxPtr& ctx() const { return ctx_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<Elt>& coeffs() const { return c_; }
  Elt coeff(int i) const {
    if (i < 0 || i > degree()) return ctx_->zero();
    return c_[static_cast<std::size_t>(i)];
  }
  Elt lead() const {
    if (is_zero()) raise(errc::internal, "leading coefficient of zero polynomial");
    return c_.back();
  }
  bool is_monic() const { return !is_zero() && c_.back().is_one(); }
  bool is_one() const { return degree() == 0 && c_[0].is_one(); }

  Elt eval(const Elt& at) const {
    Elt acc = ctx_->zero();
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * at + c_[i];
    return acc;
  }

  Poly operator-() const {
    Poly r = *this;
    for (Elt& e : r.c_) e = -e;
    return r;
  }
  Poly operator+(const Poly& rhs) const {
    check(rhs);
    std::vector<Elt> out(std::max(c_.size(), rhs.c_.size()), ctx_->zero());
    for (std::size_t i = 0; i < c_.size(); ++i) out[i] += c_[i];
    for (std::size_t i = 0; i < rhs.c_.size(); ++i) out[i] += rhs.c_[i];
    return Poly(ctx_, std::move(out));
  }
  Poly operator-(const Poly& rhs) const { return *this + (-rhs); }
  Poly operator*(const Poly& rhs) const {
    check(rhs);
    if (is_zero() || rhs.is_zero()) return Poly(ctx_);
    std::vector<Elt> out(c_.size() + rhs.c_.size() - 1, ctx_->zero());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < rhs.c_.size(); ++j) out[i + j] += c_[i] * rhs.c_[j];
    }
    return Poly(ctx_, std::move(out));
  }
  Poly operator*(const Elt& s) const {
    Poly r = *this;
    for (Elt& e : r.c_) e *= s;
    r.prune();
    return r;
  }

  std::pair<Poly, Poly> divrem(const Poly& d) const {
    check(d);
    if (d.is_zero()) raise(errc::division_by_zero, "polynomial division by zero");
    Poly rem = *this;
    if (rem.degree() < d.degree()) return {Poly(ctx_), rem};
    std::vector<Elt> q(static_cast<std::size_t>(rem.degree() - d.degree()) + 1, ctx_->zero());
    Elt dlead_inv = d.lead().inverse();
    while (!rem.is_zero() && rem.degree() >= d.degree()) {
      int shift = rem.degree() - d.degree();
      Elt f = rem.lead() * dlead_inv;
      q[static_cast<std::size_t>(shift)] = f;
      for (int i = 0; i <= d.degree(); ++i) {
        std::size_t idx = static_cast<std::size_t>(i + shift);
        rem.c_[idx] -= f * d.c_[static_cast<std::size_t>(i)];
      }
      rem.prune();
    }
    return {Poly(ctx_, std::move(q)), rem};
  }
  Poly operator/(const Poly& d) const { return divrem(d).first; }
  Poly operator%(const Poly& d) const { return divrem(d).second; }

  bool operator==(const Poly& rhs) const {
    if (!ctx_ || !rhs.ctx_) return c_.empty() && rhs.c_.empty();
    if (!ctx_->same_as(*rhs.ctx_)) return false;
    if (c_.size() != rhs.c_.size()) return false;
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] != rhs.c_[i]) return false;
    return true;
  }
  bool operator!=(const Poly& rhs) const { return !(*this == rhs); }

  Poly monic() const {
    if (is_zero()) return *this;
    return *this * lead().inverse();
  }

  Poly derivative() const {
    if (degree() < 1) return Poly(ctx_);
    std::vector<Elt> out(c_.size() - 1, ctx_->zero());
    for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = c_[i] * ctx_->scalar(static_cast<std::int64_t>(i));
    return Poly(ctx_, std::move(out));
  }

  // Degree first, then coefficients from the highest degree down, compared by
  // integer element encoding. Total order used for all deterministic output.
  static int lex_compare(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
    for (int i = a.degree(); i >= 0; --i) {
      std::int64_t ea = a.coeff(i).encoding(), eb = b.coeff(i).encoding();
      if (ea != eb) return ea < eb ? -1 : 1;
    }
    return 0;
  }

 private:
  FieldCtxPtr ctx_;
  std::vector<Elt> c_;  // low degree first, canonical: no zero leading coeff

  void prune() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }
  void check(const Poly& rhs) const {
    if (!ctx_ || !rhs.ctx_) raise(errc::internal, "uninitialized polynomial");
    if (ctx_.get() != rhs.ctx_.get() && !ctx_->same_as(*rhs.ctx_))
      raise(errc::field_mismatch, "polynomials over different fields");
  }
};

// Space-separated element encodings, low degree first ("0" for the zero poly).
inline std::ostream& operator<<(std::ostream& os, const Poly& p) {
  if (p.is_zero()) return os << "0";
  for (int i = 0; i <= p.degree(); ++i) {
    if (i) os << ' ';
    os << p.coeff(i).encoding();
  }
  return os;
}

inline Poly gcd(Poly a, Poly b) {
  while (!b.is_zero()) {
    Poly r = a % b;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

// Returns (g, u, v) with u*a + v*b = g, g monic (or zero).
inline std::tuple<Poly, Poly, Poly> extgcd(const Poly& a, const Poly& b) {
  const FieldCtxPtr& ctx = a.ctx();
  Poly r0 = a, r1 = b;
  Poly u0 = Poly::one(ctx), u1 = Poly::zero(ctx);
  Poly v0 = Poly::zero(ctx), v1 = Poly::one(ctx);
  while (!r1.is_zero()) {
    auto [q, r] = r0.divrem(r1);
    r0 = std::move(r1);
    r1 = std::move(r);
    Poly u2 = u0 - q * u1;
    u0 = std::move(u1);
    u1 = std::move(u2);
    Poly v2 = v0 - q * v1;
    v0 = std::move(v1);
    v1 = std::move(v2);
  }
  if (r0.is_zero()) return {r0, u0, v0};
  Elt linv = r0.lead().inverse();
  return {r0 * linv, u0 * linv, v0 * linv};
}

// Inverse of a modulo m (coprime), monic-normalized internally.
inline Poly invmod(const Poly& a, const Poly& m) {
  auto [g, u, v] = extgcd(a, m);
  (void)v;
  if (!g.is_one()) raise(errc::internal, "modular inverse of a non-unit");
  return u % m;
}

inline Poly powmod(Poly base, std::int64_t e, const Poly& mod) {
  Poly acc = Poly::one(base.ctx());
  base = base % mod;
  while (e > 0) {
    if (e & 1) acc = (acc * base) % mod;
    base = (base * base) % mod;
    e >>= 1;
  }
  return acc;
}

namespace detail {

// Minimal big-exponent support for Cantor-Zassenhaus in odd characteristic:
// the exponent (q^d - 1) / 2 as a bit vector, most significant bit first.
inline std::vector<bool> half_qd_minus_one_bits(std::int64_t q, int d) {
  std::vector<std::uint32_t> limbs{1};  // little-endian base 2^32
  auto mul_small = [&](std::int64_t f) {
    std::uint64_t carry = 0;
    for (std::uint32_t& limb : limbs) {
      std::uint64_t t = static_cast<std::uint64_t>(limb) * static_cast<std::uint64_t>(f) + carry;
      limb = static_cast<std::uint32_t>(t);
      carry = t >> 32;
    }
    while (carry) {
      limbs.push_back(static_cast<std::uint32_t>(carry));
      carry >>= 32;
    }
  };
  for (int i = 0; i < d; ++i) mul_small(q);
  // subtract 1
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    if (limbs[i] != 0) {
      --limbs[i];
      break;
    }
    limbs[i] = 0xffffffffu;
  }
  // divide by 2
  std::uint32_t carry = 0;
  for (std::size_t i = limbs.size(); i-- > 0;) {
    std::uint32_t cur = limbs[i];
    limbs[i] = (cur >> 1) | (carry << 31);
    carry = cur & 1;
  }
  std::vector<bool> bits;
  bool seen = false;
  for (std::size_t i = limbs.size(); i-- > 0;) {
    for (int b = 31; b >= 0; --b) {
      bool bit = (limbs[i] >> b) & 1;
      if (bit) seen = true;
      if (seen) bits.push_back(bit);
    }
  }
  if (bits.empty()) bits.push_back(false);
  return bits;
}

inline Poly powmod_bits(Poly base, const std::vector<bool>& bits_msb, const Poly& mod) {
  Poly acc = Poly::one(base.ctx());
  base = base % mod;
  for (bool bit : bits_msb) {
    acc = (acc * acc) % mod;
    if (bit) acc = (acc * base) % mod;
  }
  return acc;
}

// q-th power Frobenius of x modulo f iterated: returns x^(q^steps) mod f.
inline Poly frobenius_power(const Poly& f, int steps) {
  const FieldCtxPtr& K = f.ctx();
  Poly r = Poly::x(K) % f;
  for (int i = 0; i < steps; ++i) r = powmod(r, K->size(), f);
  return r;
}

inline std::vector<int> prime_divisors(int n) {
  std::vector<int> out;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

inline bool is_irreducible(const Poly& p) {
  if (!p.is_monic() || p.degree() < 1) raise(errc::not_monic, "irreducibility test requires a monic polynomial of degree >= 1");
  int n = p.degree();
  if (n == 1) return true;
  const FieldCtxPtr& K = p.ctx();
  // x^(q^n) == x mod p, and gcd(x^(q^(n/t)) - x, p) == 1 for prime t | n
  Poly xq = detail::frobenius_power(p, n);
  if (xq != (Poly::x(K) % p)) return false;
  for (int t : detail::prime_divisors(n)) {
    Poly xe = detail::frobenius_power(p, n / t);
    Poly g = gcd(xe - Poly::x(K), p);
    if (!g.is_one()) return false;
  }
  return true;
}

// Reciprocal polynomial P# = (1/a0) * x^deg * P(1/x); requires P monic with
// nonzero constant term.
inline Poly reciprocal(const Poly& p) {
  if (p.is_zero() || !p.is_monic()) raise(errc::not_monic, "reciprocal requires a monic polynomial");
  if (p.coeff(0).is_zero()) raise(errc::zero_valuation, "reciprocal requires valuation 0");
  std::vector<Elt> rev(p.coeffs().rbegin(), p.coeffs().rend());
  Poly out(p.ctx(), std::move(rev));
  return out * p.coeff(0).inverse();
}

inline bool is_palindromial(const Poly& p) { return p == reciprocal(p); }

namespace detail {

// Squarefree decomposition over a perfect field of characteristic p.
// Returns pairs (monic squarefree factor, multiplicity).
inline void squarefree_decompose(const Poly& f, std::int64_t mult, std::vector<std::pair<Poly, std::int64_t>>& out) {
  const FieldCtxPtr& K = f.ctx();
  const std::int64_t p = K->characteristic();
  Poly fp = f.derivative();
  if (fp.is_zero()) {
    // f = g(x^p): take p-th roots of coefficients (Frobenius inverse)
    std::vector<Elt> g;
    for (int i = 0; i <= f.degree(); i += static_cast<int>(p)) {
      Elt c = f.coeff(i);
      // p-th root: c^(|K|/p)
      std::int64_t e = K->size() / p;
      g.push_back(c.pow(e));
    }
    squarefree_decompose(Poly(K, std::move(g)), mult * p, out);
    return;
  }
  Poly c = gcd(f, fp);
  Poly w = f / c;
  std::int64_t i = 1;
  while (!w.is_one()) {
    Poly y = gcd(w, c);
    Poly fac = w / y;
    if (fac.degree() > 0) out.emplace_back(fac.monic(), mult * i);
    w = y;
    c = c / y;
    ++i;
  }
  if (!c.is_one()) squarefree_decompose(c, mult, out);
}

// Equal-degree splitting (Cantor-Zassenhaus) of a squarefree f that is a
// product of irreducibles all of degree d. Deterministically seeded.
inline void equal_degree_split(const Poly& f, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
  const FieldCtxPtr& K = f.ctx();
  if (f.degree() == d) {
    out.push_back(f.monic());
    return;
  }
  const std::int64_t q = K->size();
  Poly g = Poly::zero(K);
  while (true) {
    // random nonconstant r of degree < deg f
    std::vector<Elt> rc;
    for (int i = 0; i < f.degree(); ++i)
      rc.push_back(K->from_encoding(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q))));
    Poly r(K, std::move(rc));
    if (r.degree() < 1) continue;
    Poly common = gcd(r, f);
    if (!common.is_one() && common != f) {
      g = common;
      break;
    }
    if (K->characteristic() == 2) {
      // trace polynomial: t = sum r^(2^i), i < log2(q^d)
      std::int64_t bits = 0;
      std::int64_t qq = q;
      while (qq > 1) {
        qq /= 2;
        ++bits;
      }
      std::int64_t total = bits * d;
      Poly t = r % f;
      Poly term = r % f;
      for (std::int64_t i = 1; i < total; ++i) {
        term = (term * term) % f;
        t = t + term;
      }
      Poly cand = gcd(t, f);
      if (!cand.is_one() && cand != f) {
        g = cand;
        break;
      }
    } else {
      auto bits = half_qd_minus_one_bits(q, d);
      Poly s = powmod_bits(r, bits, f);
      Poly cand = gcd(s - Poly::one(K), f);
      if (!cand.is_one() && cand != f) {
        g = cand;
        break;
      }
    }
  }
  equal_degree_split(g, d, rng, out);
  equal_degree_split(f / g, d, rng, out);
}

}  // namespace detail

// Full factorization into pairwise distinct monic irreducibles with
// multiplicities, sorted by degree then lexicographic coefficient order.
// Deterministic across runs (fixed-seed equal-degree splitting).
inline std::vector<std::pair<Poly, std::int64_t>> factor(const Poly& input) {
  if (input.is_zero()) raise(errc::internal, "factor of the zero polynomial");
  const FieldCtxPtr& K = input.ctx();
  std::vector<std::pair<Poly, std::int64_t>> result;
  Poly f = input.monic();
  if (f.degree() == 0) return result;

  std::mt19937_64 rng(0x150f0a57u);
  std::vector<std::pair<Poly, std::int64_t>> sqf;
  detail::squarefree_decompose(f, 1, sqf);
  for (auto& [part, mult] : sqf) {
    // distinct-degree on the squarefree part
    Poly rem = part;
    Poly frob = Poly::x(K) % rem;  // x^(q^d) mod rem, updated as rem shrinks
    int d = 0;
    while (rem.degree() > 0) {
      ++d;
      if (2 * d > rem.degree()) {
        // remainder is irreducible
        result.emplace_back(rem.monic(), mult);
        break;
      }
      frob = powmod(frob, K->size(), rem);
      Poly g = gcd(frob - Poly::x(K), rem);
      if (g.degree() > 0) {
        std::vector<Poly> degd;
        detail::equal_degree_split(g, d, rng, degd);
        for (Poly& irr : degd) result.emplace_back(std::move(irr), mult);
        rem = rem / g;
        frob = frob % rem;
      }
    }
  }
  // merge equal factors (can arise across squarefree parts) and sort
  std::sort(result.begin(), result.end(), [](const auto& a, const auto& b) {
    int c = Poly::lex_compare(a.first, b.first);
    if (c != 0) return c < 0;
    return a.second < b.second;
  });
  std::vector<std::pair<Poly, std::int64_t>> merged;
  for (auto& fm : result) {
    if (!merged.empty() && merged.back().first == fm.first)
      merged.back().second += fm.second;
    else
      merged.push_back(std::move(fm));
  }
  return merged;
}

// ---------------------------------------------------------------------------
// Validated field construction

// Lexicographically least monic irreducible of degree k over GF(p),
// coefficients compared from the highest degree down.
inline Poly default_modulus(std::int64_t p, std::int64_t k) {
  FieldCtxPtr base = FieldCtx::prime(p);
  std::int64_t total = 1;
  for (std::int64_t i = 0; i < k; ++i) total *= p;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    // idx encodes (a_{k-1}, ..., a_0) with a_{k-1} most significant
    std::vector<Elt> coeffs(static_cast<std::size_t>(k) + 1, base->zero());
    coeffs[static_cast<std::size_t>(k)] = base->one();
    std::int64_t rest = idx;
    for (std::int64_t pos = 0; pos < k; ++pos) {
      coeffs[static_cast<std::size_t>(pos)] = base->scalar(rest % p);
      rest /= p;
    }
    Poly cand(base, std::move(coeffs));
    if (is_irreducible(cand)) return cand;
  }
  raise(errc::internal, "no irreducible polynomial found");
}

// GF(p^k) with full validation. A supplied modulus must be monic of degree k
// and irreducible over GF(p); when absent and k > 1 the default modulus is
// used.
inline FieldCtxPtr make_field(std::int64_t p, std::int64_t k, const std::optional<Poly>& modulus = std::nullopt) {
  if (!detail::is_prime_int(p)) raise(errc::composite_characteristic, "characteristic must be prime");
  if (k < 1) raise(errc::internal, "extension degree must be >= 1");
  FieldCtxPtr base = FieldCtx::prime(p);
  if (k == 1) return base;
  Poly m = modulus ? *modulus : default_modulus(p, k);
  if (!m.ctx()->same_as(*base)) raise(errc::field_mismatch, "modulus not over GF(p)");
  if (m.degree() != k) raise(errc::reducible_modulus, "modulus degree does not match the extension degree");
  if (!m.is_monic()) raise(errc::not_monic, "modulus must be monic");
  if (!is_irreducible(m)) raise(errc::reducible_modulus, "modulus is reducible");
  return FieldCtx::extension(base, m.coeffs());
}

// Extension of an arbitrary (already built) field by a validated irreducible
// modulus over it. Used for the tower constructions.
inline FieldCtxPtr make_extension(const FieldCtxPtr& base, const Poly& modulus) {
  if (!modulus.ctx()->same_as(*base)) raise(errc::field_mismatch, "modulus not over the base field");
  if (modulus.degree() < 2) raise(errc::reducible_modulus, "extension degree must be >= 2");
  if (!modulus.is_monic()) raise(errc::not_monic, "modulus must be monic");
  if (!is_irreducible(modulus)) raise(errc::reducible_modulus, "modulus is reducible");
  return FieldCtx::extension(base, modulus.coeffs());
}

}  // namespace isoform
