#pragma once

// Exact arithmetic in finite fields GF(p^k), including extension towers,
// the Galois involution sigma with sigma(y) = y^-1, fixed subfields,
// relative traces, and the Artin-Schreier class map in characteristic 2.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace isoform {

enum class errc {
  composite_characteristic,
  reducible_modulus,
  not_an_involution,
  not_a_subfield,
  odd_characteristic,
  zero_valuation,
  not_monic,
  singular,
  dimension_mismatch,
  field_mismatch,
  not_palindromial,
  root_at_plus_minus_one,
  not_irreducible,
  wrong_characteristic,
  not_classified_yes,
  arf_unreachable,
  not_essentially_symplectic,
  search_space_too_large,
  not_unipotent,
  degenerate,
  division_by_zero,
  field_too_large,
  matrix_too_large,
  parse_error,
  internal,
};

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

/// Upper bound on |GF(p^k)|, overridable through ISOFORM_MAX_FIELD.
inline std::int64_t max_field_size() {
  static const std::int64_t cap = [] {
    if (const char* env = std::getenv("ISOFORM_MAX_FIELD")) {
      char* end = nullptr;
      long long v = std::strtoll(env, &end, 10);
      if (end != env && v >= 2) return static_cast<std::int64_t>(v);
    }
    return static_cast<std::int64_t>(1) << 20;
  }();
  return cap;
}

class FieldCtx;
class Elt;
using FieldCtxPtr = std::shared_ptr<const FieldCtx>;

namespace detail {
inline bool is_prime_int(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}
}  // namespace detail

// A finite field, immutable once built. Either the prime field GF(p) or an
// extension base[x]/(modulus) of degree k over an already-built base field.
// Towers of any height are supported; element coefficients always refer to
// the immediate base.
class FieldCtx : public std::enable_shared_from_this<FieldCtx> {
 public:
  static FieldCtxPtr prime(std::int64_t p);

  // Structural construction; callers are responsible for irreducibility of
  // the modulus (make_field in poly.hpp is the validating entry point).
  static FieldCtxPtr extension(const FieldCtxPtr& base, std::vector<Elt> modulus);

  std::int64_t characteristic() const noexcept { return p_; }
  bool char2() const noexcept { return p_ == 2; }
  // Degree over the immediate base (1 for the prime field itself).
  std::int64_t degree() const noexcept { return k_; }
  std::int64_t absolute_degree() const noexcept { return abs_degree_; }
  std::int64_t size() const noexcept { return size_; }
  std::int64_t base_size() const noexcept;
  bool is_prime_field() const noexcept { return base_ == nullptr; }
  const FieldCtxPtr& base() const noexcept { return base_; }
  // Monic modulus over the base, low degree first, length degree()+1.
  const std::vector<Elt>& modulus() const noexcept { return modulus_; }

  bool same_as(const FieldCtx& other) const;

  Elt zero() const;
  Elt one() const;
  Elt scalar(std::int64_t c) const;         // image of an integer
  Elt from_coeffs(std::vector<Elt> coeffs) const;
  Elt from_encoding(std::int64_t enc) const;
  Elt generator() const;                    // class of x, extensions only

  FieldCtxPtr self() const { return shared_from_this(); }

 private:
  FieldCtx() = default;

  std::int64_t p_ = 0;
  std::int64_t k_ = 1;
  std::int64_t abs_degree_ = 1;
  std::int64_t size_ = 0;
  FieldCtxPtr base_;
  std::vector<Elt> modulus_;
  // x^j mod modulus for j in [k, 2k-2], as coefficient rows over the base.
  std::vector<std::vector<Elt>> red_;

  void build_reduction_rows();
  friend class Elt;
};

// One field element. Prime-field elements hold a residue; extension elements
// hold a coefficient vector of length ctx->degree() over the immediate base.
class Elt {
 public:
  Elt() = default;

  const FieldCtxPtr& ctx() const noexcept { return ctx_; }
  bool valid() const noexcept { return ctx_ != nullptr; }

  bool is_zero() const;
  bool is_one() const;
  std::int64_t residue() const {
    require_prime();
    return rep_;
  }
  const std::vector<Elt>& coeffs() const {
    require_ext();
    return coeffs_;
  }
  const Elt& coeff(std::size_t i) const {
    require_ext();
    return coeffs_[i];
  }

  std::int64_t encoding() const;

  Elt operator-() const;
  Elt operator+(const Elt& rhs) const;
  Elt operator-(const Elt& rhs) const;
  Elt operator*(const Elt& rhs) const;
  Elt operator/(const Elt& rhs) const { return *this * rhs.inverse(); }
  Elt& operator+=(const Elt& rhs) { return *this = *this + rhs; }
  Elt& operator-=(const Elt& rhs) { return *this = *this - rhs; }
  Elt& operator*=(const Elt& rhs) { return *this = *this * rhs; }

  bool operator==(const Elt& rhs) const;
  bool operator!=(const Elt& rhs) const { return !(*this == rhs); }

  Elt inverse() const;
  Elt pow(std::int64_t e) const;  // e >= 0, or -1 for inverse convenience

  friend class FieldCtx;

 private:
  FieldCtxPtr ctx_;
  std::int64_t rep_ = 0;
  std::vector<Elt> coeffs_;

  void require_prime() const {
    if (!ctx_ || !ctx_->is_prime_field()) raise(errc::internal, "prime-field element expected");
  }
  void require_ext() const {
    if (!ctx_ || ctx_->is_prime_field()) raise(errc::internal, "extension element expected");
  }
  static void check_compat(const Elt& a, const Elt& b) {
    if (!a.ctx_ || !b.ctx_) raise(errc::internal, "uninitialized element");
    if (a.ctx_.get() == b.ctx_.get()) return;
    if (!a.ctx_->same_as(*b.ctx_)) raise(errc::field_mismatch, "elements of different fields");
  }
};

// ---------------------------------------------------------------------------
// FieldCtx

inline FieldCtxPtr FieldCtx::prime(std::int64_t p) {
  if (!detail::is_prime_int(p)) raise(errc::composite_characteristic, "characteristic must be prime");
  if (p > max_field_size()) raise(errc::field_too_large, "field size exceeds configured cap");
  auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx());
  ctx->p_ = p;
  ctx->k_ = 1;
  ctx->abs_degree_ = 1;
  ctx->size_ = p;
  return ctx;
}

inline std::int64_t FieldCtx::base_size() const noexcept { return base_ ? base_->size() : p_; }

inline FieldCtxPtr FieldCtx::extension(const FieldCtxPtr& base, std::vector<Elt> modulus) {
  if (!base) raise(errc::internal, "null base field");
  if (modulus.size() < 3) raise(errc::internal, "extension degree must be at least 2");
  std::int64_t k = static_cast<std::int64_t>(modulus.size()) - 1;
  for (const Elt& c : modulus) {
    if (!c.valid() || !c.ctx()->same_as(*base)) raise(errc::field_mismatch, "modulus coefficients not over the base field");
  }
  if (!modulus.back().is_one()) raise(errc::not_monic, "modulus must be monic");
  std::int64_t abs_deg = base->absolute_degree() * k;
  std::int64_t size = 1;
  for (std::int64_t i = 0; i < abs_deg; ++i) {
    size *= base->characteristic();
    if (size > max_field_size()) raise(errc::field_too_large, "field size exceeds configured cap");
  }
  auto ctx = std::shared_ptr<FieldCtx>(new FieldCtx());
  ctx->p_ = base->characteristic();
  ctx->k_ = k;
  ctx->abs_degree_ = abs_deg;
  ctx->size_ = size;
  ctx->base_ = base;
  ctx->modulus_ = std::move(modulus);
  ctx->build_reduction_rows();
  return ctx;
}

inline void FieldCtx::build_reduction_rows() {
  // row j-k holds x^j mod modulus, for j in [k, 2k-2]
  const std::int64_t k = k_;
  std::vector<Elt> cur(static_cast<std::size_t>(k), base_ ? base_->zero() : Elt());
  // x^k = -sum m_i x^i
  for (std::int64_t i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = -modulus_[static_cast<std::size_t>(i)];
  red_.push_back(cur);
  for (std::int64_t j = k + 1; j <= 2 * k - 2; ++j) {
    std::vector<Elt> next(static_cast<std::size_t>(k), base_->zero());
    // multiply cur by x, reduce the overflow once more
    Elt top = cur[static_cast<std::size_t>(k - 1)];
    for (std::int64_t i = k - 1; i >= 1; --i) next[static_cast<std::size_t>(i)] = cur[static_cast<std::size_t>(i - 1)];
    next[0] = base_->zero();
    if (!top.is_zero()) {
      for (std::int64_t i = 0; i < k; ++i)
        next[static_cast<std::size_t>(i)] = next[static_cast<std::size_t>(i)] + top * red_[0][static_cast<std::size_t>(i)];
    }
    red_.push_back(next);
    cur = std::move(next);
  }
}

inline bool FieldCtx::same_as(const FieldCtx& other) const {
  if (this == &other) return true;
  if (p_ != other.p_ || k_ != other.k_ || abs_degree_ != other.abs_degree_) return false;
  if (is_prime_field() != other.is_prime_field()) return false;
  if (is_prime_field()) return true;
  if (!base_->same_as(*other.base_)) return false;
  for (std::size_t i = 0; i < modulus_.size(); ++i)
    if (modulus_[i] != other.modulus_[i]) return false;
  return true;
}

inline Elt FieldCtx::zero() const { return scalar(0); }
inline Elt FieldCtx::one() const { return scalar(1); }

inline Elt FieldCtx::scalar(std::int64_t c) const {
  Elt e;
  e.ctx_ = self();
  if (is_prime_field()) {
    e.rep_ = ((c % p_) + p_) % p_;
  } else {
    e.coeffs_.assign(static_cast<std::size_t>(k_), base_->zero());
    e.coeffs_[0] = base_->scalar(c);
  }
  return e;
}

inline Elt FieldCtx::from_coeffs(std::vector<Elt> coeffs) const {
  if (is_prime_field()) raise(errc::internal, "from_coeffs on prime field");
  if (static_cast<std::int64_t>(coeffs.size()) != k_) raise(errc::internal, "coefficient count mismatch");
  for (const Elt& c : coeffs)
    if (!c.valid() || !c.ctx()->same_as(*base_)) raise(errc::field_mismatch, "coefficients not over the base field");
  Elt e;
  e.ctx_ = self();
  e.coeffs_ = std::move(coeffs);
  return e;
}

inline Elt FieldCtx::from_encoding(std::int64_t enc) const {
  if (enc < 0 || enc >= size_) raise(errc::parse_error, "element encoding out of range");
  if (is_prime_field()) return scalar(enc);
  std::vector<Elt> coeffs;
  coeffs.reserve(static_cast<std::size_t>(k_));
  std::int64_t b = base_->size();
  for (std::int64_t i = 0; i < k_; ++i) {
    coeffs.push_back(base_->from_encoding(enc % b));
    enc /= b;
  }
  return from_coeffs(std::move(coeffs));
}

inline Elt FieldCtx::generator() const {
  if (is_prime_field()) raise(errc::internal, "generator of a prime field");
  std::vector<Elt> coeffs(static_cast<std::size_t>(k_), base_->zero());
  coeffs[1] = base_->one();
  return from_coeffs(std::move(coeffs));
}

// ---------------------------------------------------------------------------
// Elt

inline bool Elt::is_zero() const {
  if (!ctx_) raise(errc::internal, "uninitialized element");
  if (ctx_->is_prime_field()) return rep_ == 0;
  for (const Elt& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

inline bool Elt::is_one() const {
  if (!ctx_) raise(errc::internal, "uninitialized element");
  if (ctx_->is_prime_field()) return rep_ == 1;
  if (!coeffs_[0].is_one()) return false;
  for (std::size_t i = 1; i < coeffs_.size(); ++i)
    if (!coeffs_[i].is_zero()) return false;
  return true;
}

inline std::int64_t Elt::encoding() const {
  if (!ctx_) raise(errc::internal, "uninitialized element");
  if (ctx_->is_prime_field()) return rep_;
  std::int64_t b = ctx_->base_size();
  std::int64_t acc = 0;
  for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * b + coeffs_[i].encoding();
  return acc;
}

inline Elt Elt::operator-() const {
  if (!ctx_) raise(errc::internal, "uninitialized element");
  Elt r = *this;
  if (ctx_->is_prime_field()) {
    r.rep_ = (ctx_->p_ - rep_) % ctx_->p_;
  } else {
    for (Elt& c : r.coeffs_) c = -c;
  }
  return r;
}

inline Elt Elt::operator+(const Elt& rhs) const {
  check_compat(*this, rhs);
  Elt r = *this;
  if (ctx_->is_prime_field()) {
    r.rep_ = (rep_ + rhs.rep_) % ctx_->p_;
  } else {
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] += rhs.coeffs_[i];
  }
  return r;
}

inline Elt Elt::operator-(const Elt& rhs) const {
  check_compat(*this, rhs);
  Elt r = *this;
  if (ctx_->is_prime_field()) {
    r.rep_ = ((rep_ - rhs.rep_) % ctx_->p_ + ctx_->p_) % ctx_->p_;
  } else {
    for (std::size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] -= rhs.coeffs_[i];
  }
  return r;
}

inline Elt Elt::operator*(const Elt& rhs) const {
  check_compat(*this, rhs);
  if (ctx_->is_prime_field()) {
    Elt r = *this;
    r.rep_ = (rep_ * rhs.rep_) % ctx_->p_;
    return r;
  }
  const std::size_t k = coeffs_.size();
  std::vector<Elt> conv(2 * k - 1, ctx_->base_->zero());
  for (std::size_t i = 0; i < k; ++i) {
    if (coeffs_[i].is_zero()) continue;
    for (std::size_t j = 0; j < k; ++j) conv[i + j] += coeffs_[i] * rhs.coeffs_[j];
  }
  // fold x^j (j >= k) through the precomputed reduction rows
  std::vector<Elt> out(conv.begin(), conv.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t j = k; j < conv.size(); ++j) {
    if (conv[j].is_zero()) continue;
    const std::vector<Elt>& row = ctx_->red_[j - k];
    for (std::size_t i = 0; i < k; ++i) out[i] += conv[j] * row[i];
  }
  Elt r;
  r.ctx_ = ctx_;
  r.coeffs_ = std::move(out);
  return r;
}

inline bool Elt::operator==(const Elt& rhs) const {
  check_compat(*this, rhs);
  if (ctx_->is_prime_field()) return rep_ == rhs.rep_;
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    if (coeffs_[i] != rhs.coeffs_[i]) return false;
  return true;
}

inline Elt Elt::pow(std::int64_t e) const {
  if (!ctx_) raise(errc::internal, "uninitialized element");
  if (e < 0) {
    if (e != -1) raise(errc::internal, "negative exponent");
    return inverse();
  }
  Elt acc = ctx_->one();
  Elt base = *this;
  std::int64_t n = e;
  while (n > 0) {
    if (n & 1) acc = acc * base;
    base = base * base;
    n >>= 1;
  }
  return acc;
}

inline Elt Elt::inverse() const {
  if (is_zero()) raise(errc::division_by_zero, "inverse of zero");
  if (ctx_->is_prime_field()) {
    // extended Euclid on (rep, p)
    std::int64_t a = rep_, m = ctx_->p_;
    std::int64_t x0 = 0, x1 = 1, r0 = m, r1 = a;
    while (r1 != 0) {
      std::int64_t q = r0 / r1;
      std::int64_t tr = r0 - q * r1;
      r0 = r1;
      r1 = tr;
      std::int64_t tx = x0 - q * x1;
      x0 = x1;
      x1 = tx;
    }
    Elt r = *this;
    r.rep_ = ((x0 % m) + m) % m;
    return r;
  }
  // Fermat: z^(|F|-2); field sizes are capped so this is cheap
  return pow(ctx_->size_ - 2);
}

// ---------------------------------------------------------------------------
// Embedding / coercion helpers along a tower chain

// True when `sub` appears on the base chain of `sup` (or equals it).
inline bool on_base_chain(const FieldCtxPtr& sub, const FieldCtxPtr& sup) {
  const FieldCtx* cur = sup.get();
  while (cur) {
    if (cur->same_as(*sub)) return true;
    cur = cur->base().get();
  }
  return false;
}

// Canonical inclusion of an element of `sub` into `sup`, where sub lies on
// sup's base chain.
inline Elt embed(const FieldCtxPtr& sup, const Elt& z) {
  if (!z.valid()) raise(errc::internal, "uninitialized element");
  if (sup->same_as(*z.ctx())) {
    if (sup.get() == z.ctx().get()) return z;
    // structurally equal but distinct context objects: rebuild
    return sup->from_encoding(z.encoding());
  }
  if (sup->is_prime_field()) raise(errc::not_a_subfield, "no embedding into the prime field");
  Elt lifted = embed(sup->base(), z);
  std::vector<Elt> coeffs(static_cast<std::size_t>(sup->degree()), sup->base()->zero());
  coeffs[0] = lifted;
  return sup->from_coeffs(std::move(coeffs));
}

// Inverse of embed: checks that z actually lies in the canonical copy of
// `sub` and maps it down. Errors with not_a_subfield otherwise.
inline Elt coerce_down(const FieldCtxPtr& sub, const Elt& z) {
  if (!z.valid()) raise(errc::internal, "uninitialized element");
  if (sub->same_as(*z.ctx())) {
    if (sub.get() == z.ctx().get()) return z;
    return sub->from_encoding(z.encoding());
  }
  if (z.ctx()->is_prime_field()) raise(errc::not_a_subfield, "element not in the requested subfield");
  for (std::size_t i = 1; i < z.coeffs().size(); ++i)
    if (!z.coeff(i).is_zero()) raise(errc::not_a_subfield, "element not in the requested subfield");
  return coerce_down(sub, z.coeff(0));
}

// Relative trace along a tower chain: Tr_{sup/sub}(z) = sum z^(|sub|^i).
inline Elt rel_trace(const FieldCtxPtr& sub, const FieldCtxPtr& sup, const Elt& z) {
  if (!on_base_chain(sub, sup)) raise(errc::not_a_subfield, "trace target is not a subfield on the tower chain");
  if (!z.valid() || !z.ctx()->same_as(*sup)) raise(errc::field_mismatch, "trace argument not in the top field");
  std::int64_t d = sup->absolute_degree() / sub->absolute_degree();
  Elt acc = z;
  Elt cur = z;
  for (std::int64_t i = 1; i < d; ++i) {
    cur = cur.pow(sub->size());
    acc += cur;
  }
  return coerce_down(sub, acc);
}

// ---------------------------------------------------------------------------
// Galois involution and fixed field

// The automorphism sigma of L over its base with sigma(y) = y^-1, realized as
// the Frobenius power z -> z^(|K'|) where K' is the fixed field.
struct GaloisInvolution {
  FieldCtxPtr field;        // L
  std::int64_t fixed_size;  // |K'|

  Elt operator()(const Elt& z) const {
    if (!z.valid() || !z.ctx()->same_as(*field)) raise(errc::field_mismatch, "involution applied outside its field");
    return z.pow(fixed_size);
  }
};

inline GaloisInvolution galois_involution(const FieldCtxPtr& L, const Elt& y) {
  if (L->is_prime_field()) raise(errc::not_an_involution, "prime field has no nontrivial automorphism");
  if (!y.valid() || !y.ctx()->same_as(*L)) raise(errc::field_mismatch, "generator not in the field");
  std::int64_t m = L->degree();
  if (m % 2 != 0) raise(errc::not_an_involution, "no Frobenius power of order 2 over the base");
  std::int64_t q = L->base_size();
  std::int64_t fixed = 1;
  for (std::int64_t i = 0; i < m / 2; ++i) fixed *= q;
  GaloisInvolution sigma{L, fixed};
  if (sigma(y) != y.inverse()) raise(errc::not_an_involution, "the order-2 Frobenius power does not send y to 1/y");
  return sigma;
}

namespace detail {

// Solve columns * c = rhs by Gaussian elimination over the coefficient field
// of the entries; returns nullopt when inconsistent. Columns and rhs are
// coordinate vectors of common length.
inline std::optional<std::vector<Elt>> solve_linear(const std::vector<std::vector<Elt>>& columns,
                                                    const std::vector<Elt>& rhs) {
  const std::size_t rows = rhs.size();
  const std::size_t cols = columns.size();
  // augmented matrix
  std::vector<std::vector<Elt>> m(rows, std::vector<Elt>(cols + 1));
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m[i][j] = columns[j][i];
  for (std::size_t i = 0; i < rows; ++i) m[i][cols] = rhs[i];

  std::vector<int> pivot_col(rows, -1);
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t pr = r;
    while (pr < rows && m[pr][c].is_zero()) ++pr;
    if (pr == rows) continue;
    std::swap(m[pr], m[r]);
    Elt inv = m[r][c].inverse();
    for (std::size_t j = c; j <= cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r) continue;
      Elt f = m[i][c];
      if (f.is_zero()) continue;
      for (std::size_t j = c; j <= cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivot_col[r] = static_cast<int>(c);
    ++r;
  }
  // consistency: no pivot in the rhs column
  for (std::size_t i = r; i < rows; ++i)
    if (!m[i][cols].is_zero()) return std::nullopt;
  if (!columns.empty()) {
    std::vector<Elt> c(cols, columns[0].empty() ? Elt() : columns[0][0].ctx()->zero());
    for (std::size_t i = 0; i < r; ++i)
      if (pivot_col[i] >= 0) c[static_cast<std::size_t>(pivot_col[i])] = m[i][cols];
    return c;
  }
  return std::vector<Elt>{};
}

}  // namespace detail

// The fixed field K' of an involution of L, returned as a context over the
// base of L together with the data needed to move elements across.
struct SubfieldEmbedding {
  FieldCtxPtr sup;         // L
  FieldCtxPtr sub;         // K' (equals base of L when [L:base] = 2)
  std::vector<Elt> basis;  // powers w^0..w^(d-1) of the generator, in L

  bool contains(const Elt& z) const;
  Elt embed_up(const Elt& z_sub) const;
  Elt project(const Elt& z_sup) const;
};

inline Elt SubfieldEmbedding::embed_up(const Elt& z_sub) const {
  if (!z_sub.valid() || !z_sub.ctx()->same_as(*sub)) raise(errc::field_mismatch, "embed_up argument not in the subfield");
  if (sub->same_as(*sup->base())) return embed(sup, z_sub);
  Elt acc = sup->zero();
  for (std::size_t i = 0; i < basis.size(); ++i) acc += embed(sup, z_sub.coeff(i)) * basis[i];
  return acc;
}

inline Elt SubfieldEmbedding::project(const Elt& z_sup) const {
  if (!z_sup.valid() || !z_sup.ctx()->same_as(*sup)) raise(errc::field_mismatch, "project argument not in the top field");
  if (sub->same_as(*sup->base())) return coerce_down(sub, z_sup);
  std::vector<std::vector<Elt>> columns;
  columns.reserve(basis.size());
  for (const Elt& b : basis) columns.push_back(b.coeffs());
  auto c = detail::solve_linear(columns, z_sup.coeffs());
  if (!c) raise(errc::not_a_subfield, "element not in the fixed field");
  return sub->from_coeffs(std::move(*c));
}

inline bool SubfieldEmbedding::contains(const Elt& z) const {
  try {
    (void)project(z);
    return true;
  } catch (const Error& e) {
    if (e.code() == errc::not_a_subfield) return false;
    throw;
  }
}

// Fixed field of sigma: |L| = |K'|^2 and K' = base(L)[w] with w = y + sigma(y).
inline SubfieldEmbedding fixed_field(const FieldCtxPtr& L, const GaloisInvolution& sigma) {
  if (!L->same_as(*sigma.field)) raise(errc::field_mismatch, "involution belongs to a different field");
  const FieldCtxPtr& K = L->base();
  std::int64_t m = L->degree();
  std::int64_t d = m / 2;
  if (m % 2 != 0 || sigma.fixed_size * sigma.fixed_size != L->size())
    raise(errc::not_an_involution, "fixed field is not of square-root size");

  SubfieldEmbedding out;
  out.sup = L;
  if (d == 1) {
    out.sub = K;
    out.basis = {L->one()};
    return out;
  }

  Elt y = L->generator();
  Elt w = y + sigma(y);  // generates K' over K: [L : K(w)] = 2 and w is fixed
  std::vector<std::vector<Elt>> power_cols;
  Elt cur = L->one();
  for (std::int64_t i = 0; i < d; ++i) {
    power_cols.push_back(cur.coeffs());
    out.basis.push_back(cur);
    cur *= w;
  }
  // minimal polynomial of w: solve sum_{i<d} c_i w^i = -w^d
  std::vector<Elt> rhs = (-cur).coeffs();
  auto c = detail::solve_linear(power_cols, rhs);
  if (!c) raise(errc::internal, "fixed-field generator has degree above expected");
  std::vector<Elt> minpoly = std::move(*c);
  minpoly.push_back(K->one());
  // degree must be exactly d: the lower powers must be independent
  {
    std::vector<std::vector<Elt>> low(power_cols.begin(), power_cols.end() - 1);
    auto dep = detail::solve_linear(low, power_cols.back());
    if (dep) raise(errc::internal, "fixed-field generator has degree below expected");
  }
  out.sub = FieldCtx::extension(K, std::move(minpoly));
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic-2 helpers

// Class of c in K / P(K), with P(x) = x^2 + x: 0 iff c is in the image.
// Computed as the absolute trace down to GF(2).
inline int artin_schreier_class(const Elt& c) {
  const FieldCtxPtr& K = c.ctx();
  if (!K) raise(errc::internal, "uninitialized element");
  if (K->characteristic() != 2) raise(errc::odd_characteristic, "Artin-Schreier class requires characteristic 2");
  Elt acc = c;
  Elt cur = c;
  for (std::int64_t i = 1; i < K->absolute_degree(); ++i) {
    cur = cur * cur;
    acc += cur;
  }
  if (acc.is_zero()) return 0;
  if (acc.is_one()) return 1;
  raise(errc::internal, "absolute trace escaped GF(2)");
}

// First element (in encoding order) with Artin-Schreier class 1.
inline Elt first_nonzero_class_element(const FieldCtxPtr& K) {
  if (K->characteristic() != 2) raise(errc::odd_characteristic, "characteristic 2 required");
  for (std::int64_t enc = 0; enc < K->size(); ++enc) {
    Elt c = K->from_encoding(enc);
    if (artin_schreier_class(c) == 1) return c;
  }
  raise(errc::internal, "no class-1 element found");
}

// Trace Tr_{K'/base}(w) of a sigma-fixed element w of L, computed inside L
// as the Frobenius orbit sum over [K':base] conjugates and coerced down.
inline Elt trace_fixed_to_base(const GaloisInvolution& sigma, const Elt& w) {
  const FieldCtxPtr& L = sigma.field;
  const FieldCtxPtr& K = L->base();
  if (sigma(w) != w) raise(errc::not_a_subfield, "element is not fixed by the involution");
  std::int64_t d = L->degree() / 2;  // [K':K]
  Elt acc = w;
  Elt cur = w;
  for (std::int64_t i = 1; i < d; ++i) {
    cur = cur.pow(K->size());
    acc += cur;
  }
  return coerce_down(K, acc);
}

}  // namespace isoform
