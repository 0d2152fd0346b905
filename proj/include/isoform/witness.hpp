#pragma once

// Explicit witness forms for every yes verdict: the block constructions for
// B + B^-1 pairs, Jordan blocks at the eigenvalues 1 and -1 (including the
// doubled odd blocks of characteristic 2 and their prescribed-Arf variants),
// and the hermitian trace forms for companion blocks of irreducible
// palindromials, assembled by direct sum and transported along similarity.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "isoform/classify.hpp"
#include "isoform/quadratic.hpp"

namespace isoform {

enum class WitnessKind { symplectic, symmetric, symmetric_nonalternate, quadratic };

inline const char* witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::symplectic: return "symplectic";
    case WitnessKind::symmetric: return "symmetric";
    case WitnessKind::symmetric_nonalternate: return "nonalternate";
    case WitnessKind::quadratic: return "quadratic";
  }
  return "?";
}

struct FormWitness {
  WitnessKind kind = WitnessKind::symplectic;
  Mat gram;                      // bilinear kinds
  std::optional<QuadForm> quad;  // quadratic kind
  std::optional<ArfClass> arf;   // quadratic kind, characteristic 2
};

namespace detail {

// The shared doubly-inductive sweeps of the antidiagonal recipes: fill the
// region above the antidiagonal from the rows/columns already set. Grids are
// 1-indexed to match the construction.
template <typename T>
void antidiagonal_sweeps(std::vector<std::vector<T>>& g, int size, int half) {
  for (int i = half; i >= 2; --i)
    for (int j = size - i + 2; j <= size; ++j)
      g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          -g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)] -
          g[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j - 1)];
  for (int j = half; j >= 2; --j)
    for (int i = size - j + 2; i <= size; ++i)
      g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          -g[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)] -
          g[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j + 1)];
}

inline Mat grid_to_mat(const FieldCtxPtr& K, const std::vector<std::vector<Elt>>& g, int size) {
  Mat m(K, size, size);
  for (int i = 1; i <= size; ++i)
    for (int j = 1; j <= size; ++j) m.at(i - 1, j - 1) = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

// Alternate A with J_2n(1)^T A J_2n(1) = A: zero above the antidiagonal,
// (-1)^i on it, zero lower-right quadrant, sweeps elsewhere.
inline Mat jordan_even_gram(const FieldCtxPtr& K, int n) {
  const int size = 2 * n;
  std::vector<std::vector<Elt>> g(static_cast<std::size_t>(size) + 2,
                                  std::vector<Elt>(static_cast<std::size_t>(size) + 2, K->zero()));
  for (int i = 1; i <= size; ++i)
    g[static_cast<std::size_t>(i)][static_cast<std::size_t>(size + 1 - i)] = (i % 2 == 0) ? K->one() : -K->one();
  antidiagonal_sweeps(g, size, n);
  // region i > n, j > n stays zero; re-impose after the sweeps touched nothing there
  return grid_to_mat(K, g, size);
}

// Characteristic-2 variant with the tunable parameter a (n >= 2): same shape
// with the row/column at n+1 carrying a beyond the diagonal.
inline Mat jordan_even_gram_car2(const FieldCtxPtr& K, int n, const Elt& a) {
  const int size = 2 * n;
  std::vector<std::vector<Elt>> g(static_cast<std::size_t>(size) + 2,
                                  std::vector<Elt>(static_cast<std::size_t>(size) + 2, K->zero()));
  for (int i = 1; i <= size; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(size + 1 - i)] = K->one();
  for (int i = n + 2; i <= size; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + 1)] = a;
  for (int j = n + 2; j <= size; ++j) g[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(j)] = a;
  antidiagonal_sweeps(g, size, n);
  return grid_to_mat(K, g, size);
}

// Symmetric A with J_{2n+1}(1)^T A J_{2n+1}(1) = A (characteristic != 2):
// half-antidiagonal entries (-1)^i / 2 beyond the central row and column.
inline Mat jordan_odd_gram(const FieldCtxPtr& K, int n) {
  const int size = 2 * n + 1;
  const Elt half = K->scalar(2).inverse();
  std::vector<std::vector<Elt>> g(static_cast<std::size_t>(size) + 2,
                                  std::vector<Elt>(static_cast<std::size_t>(size) + 2, K->zero()));
  for (int i = 1; i <= size; ++i)
    g[static_cast<std::size_t>(i)][static_cast<std::size_t>(size + 1 - i)] = (i % 2 == 0) ? K->one() : -K->one();
  for (int i = n + 2; i <= size; ++i)
    g[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + 1)] = ((i % 2 == 0) ? K->one() : -K->one()) * half;
  for (int j = n + 2; j <= size; ++j)
    g[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(j)] = ((j % 2 == 0) ? K->one() : -K->one()) * half;
  antidiagonal_sweeps(g, size, n);
  return grid_to_mat(K, g, size);
}

// Tiled recipes for the doubled odd Jordan block J_{2n+1}(1) (x) I_2 in
// characteristic 2. `last_tile_identity` selects the nonalternate symmetric
// variant; otherwise L = [[a,0],[1,1]] gives the alternate polar of the
// prescribed-Arf quadratic construction.
inline Mat pair_odd_tiled_gram(const FieldCtxPtr& K, int n, const Elt& a, bool last_tile_identity) {
  const int tiles = 2 * n + 1;
  Mat tile_zero(K, 2, 2);
  Mat tile_k = Mat::from_ints(K, {{0, 1}, {1, 0}});
  // L + L^T = K in both variants
  Mat tile_l = last_tile_identity ? Mat::from_ints(K, {{0, 0}, {1, 0}}) : Mat::from_ints(K, {{0, 0}, {1, 1}});
  if (!last_tile_identity) tile_l.at(0, 0) = a;
  std::vector<std::vector<Mat>> g(static_cast<std::size_t>(tiles) + 2,
                                  std::vector<Mat>(static_cast<std::size_t>(tiles) + 2, tile_zero));
  for (int i = 1; i <= tiles; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(tiles + 1 - i)] = tile_k;
  for (int i = n + 2; i <= tiles; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(n + 1)] = tile_l;
  for (int j = n + 2; j <= tiles; ++j) g[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(j)] = tile_l.transpose();
  if (last_tile_identity) g[static_cast<std::size_t>(tiles)][static_cast<std::size_t>(tiles)] = Mat::identity(K, 2);
  antidiagonal_sweeps(g, tiles, n);

  Mat s(K, 2 * tiles, 2 * tiles);
  for (int i = 1; i <= tiles; ++i)
    for (int j = 1; j <= tiles; ++j)
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          s.at(2 * (i - 1) + r, 2 * (j - 1) + c) = g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].at(r, c);
  return s;
}

inline void assert_invariant_gram(const Mat& m, const Mat& g, const char* what) {
  if (g.rank() != g.rows()) raise(errc::internal, std::string(what) + ": constructed gram is singular");
  if (m.transpose() * g * m != g) raise(errc::internal, std::string(what) + ": gram is not invariant");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Block-level constructions

inline Mat pair_block_matrix(const Mat& b) {
  return direct_sum({b, b.transpose().inverse()});
}

// Witness for B + (B^T)^-1: S = [[0,I],[I,0]] symmetric, K = [[0,-I],[I,0]]
// alternate, and in characteristic 2 the hyperbolic quadratic gram
// C = [[0,I],[0,0]]. Transport to B + B^-1 is the caller's business.
inline FormWitness pair_block_form(const Mat& b, WitnessKind kind) {
  if (!b.is_square()) raise(errc::dimension_mismatch, "pair block requires a square matrix");
  const FieldCtxPtr& K = b.ctx();
  if (b.rank() != b.rows()) raise(errc::singular, "pair block requires an invertible matrix");
  const int m = b.rows();
  const bool char2 = K->char2();
  if (kind == WitnessKind::quadratic && !char2) kind = WitnessKind::symmetric;
  if (kind == WitnessKind::symmetric_nonalternate) kind = WitnessKind::symmetric;

  FormWitness w;
  w.kind = kind;
  switch (kind) {
    case WitnessKind::symplectic: {
      Mat g(K, 2 * m, 2 * m);
      for (int i = 0; i < m; ++i) {
        g.at(i, m + i) = -K->one();
        g.at(m + i, i) = K->one();
      }
      w.gram = std::move(g);
      break;
    }
    case WitnessKind::symmetric: {
      Mat g(K, 2 * m, 2 * m);
      for (int i = 0; i < m; ++i) {
        g.at(i, m + i) = K->one();
        g.at(m + i, i) = K->one();
      }
      w.gram = std::move(g);
      break;
    }
    case WitnessKind::quadratic: {
      Mat g(K, 2 * m, 2 * m);
      for (int i = 0; i < m; ++i) g.at(i, m + i) = K->one();
      w.quad = QuadForm(std::move(g));
      w.arf = ArfClass{0};
      break;
    }
    case WitnessKind::symmetric_nonalternate:
      raise(errc::internal, "unreachable");
  }
  return w;
}

struct BlockWitness {
  Mat block;   // the matrix the form is adapted to
  FormWitness form;
  std::optional<Mat> conj_to_direct_sum;  // for doubled odd blocks: T with T^-1 (J+J) T = J (x) I_2
};

// Witness for J_2n(1). In characteristic 2 the quadratic kind accepts a
// target Arf class; n = 1 uses x^2 + xy + c y^2, n >= 2 the parameterized
// recipe with the determined diagonal q(e_i) = a_{i,i+1}, q(e_2n) = 0.
inline BlockWitness jordan_even_form(const FieldCtxPtr& K, int n, WitnessKind kind,
                                     std::optional<int> arf_target = std::nullopt) {
  if (n < 1) raise(errc::internal, "jordan_even_form requires n >= 1");
  const bool char2 = K->char2();
  if (arf_target && !char2) raise(errc::wrong_characteristic, "Arf targets require characteristic 2");
  if (kind == WitnessKind::quadratic && !char2) kind = WitnessKind::symmetric;

  BlockWitness bw;
  bw.block = jordan(K, 2 * n, K->one());
  bw.form.kind = kind;
  switch (kind) {
    case WitnessKind::symplectic: {
      bw.form.gram = detail::jordan_even_gram(K, n);
      detail::assert_invariant_gram(bw.block, bw.form.gram, "jordan even block");
      break;
    }
    case WitnessKind::symmetric: {
      if (!char2) raise(errc::wrong_characteristic, "a single even Jordan block carries no symmetric form outside characteristic 2");
      bw.form.gram = detail::jordan_even_gram(K, n);
      detail::assert_invariant_gram(bw.block, bw.form.gram, "jordan even block");
      break;
    }
    case WitnessKind::symmetric_nonalternate: {
      if (!char2) raise(errc::wrong_characteristic, "nonalternate forms are a characteristic-2 refinement");
      Mat g = detail::jordan_even_gram(K, n);
      g.at(2 * n - 1, 2 * n - 1) = K->one();
      detail::assert_invariant_gram(bw.block, g, "jordan even nonalternate block");
      bw.form.gram = std::move(g);
      break;
    }
    case WitnessKind::quadratic: {
      int target = arf_target.value_or(0);
      Elt c = (target == 0) ? K->zero() : first_nonzero_class_element(K);
      Mat q(K, 2 * n, 2 * n);
      if (n == 1) {
        q.at(0, 0) = K->one();
        q.at(0, 1) = K->one();
        q.at(1, 1) = c;
      } else {
        Mat a = detail::jordan_even_gram_car2(K, n, c);
        detail::assert_invariant_gram(bw.block, a, "jordan even quadratic polar");
        for (int i = 0; i < 2 * n; ++i)
          for (int j = i + 1; j < 2 * n; ++j) q.at(i, j) = a.at(i, j);
        for (int i = 0; i + 1 < 2 * n; ++i) q.at(i, i) = a.at(i, i + 1);
      }
      bw.form.quad = QuadForm(std::move(q));
      bw.form.arf = ArfClass{artin_schreier_class(c)};
      break;
    }
  }
  return bw;
}

// Witness for the odd Jordan block at eigenvalue 1. In characteristic != 2
// the block is J_{2n+1}(1) itself with the symmetric recipe. In
// characteristic 2 the constructions operate on the doubled block
// J_{2n+1}(1) (x) I_2 (similar to J + J) and the returned conjugation links
// the two; n >= 1.
inline BlockWitness jordan_odd_form(const FieldCtxPtr& K, int n, WitnessKind kind,
                                    std::optional<int> arf_target = std::nullopt) {
  const bool char2 = K->char2();
  BlockWitness bw;
  if (!char2) {
    if (arf_target) raise(errc::wrong_characteristic, "Arf targets require characteristic 2");
    if (kind == WitnessKind::quadratic) kind = WitnessKind::symmetric;
    if (kind != WitnessKind::symmetric)
      raise(errc::wrong_characteristic, "a single odd Jordan block carries only symmetric forms");
    bw.block = jordan(K, 2 * n + 1, K->one());
    bw.form.kind = kind;
    bw.form.gram = detail::jordan_odd_gram(K, n);
    detail::assert_invariant_gram(bw.block, bw.form.gram, "jordan odd block");
    return bw;
  }
  if (n < 1) raise(errc::internal, "size-1 pairs are assembled directly");
  Mat j = jordan(K, 2 * n + 1, K->one());
  bw.block = kron(j, Mat::identity(K, 2));
  bw.form.kind = kind;
  switch (kind) {
    case WitnessKind::symmetric:
    case WitnessKind::symmetric_nonalternate: {
      Mat s = detail::pair_odd_tiled_gram(K, n, K->zero(), /*last_tile_identity=*/true);
      detail::assert_invariant_gram(bw.block, s, "doubled odd block");
      bw.form.gram = std::move(s);
      break;
    }
    case WitnessKind::symplectic: {
      Mat s = detail::pair_odd_tiled_gram(K, n, K->zero(), /*last_tile_identity=*/false);
      detail::assert_invariant_gram(bw.block, s, "doubled odd block");
      if (!s.is_alternate()) raise(errc::internal, "doubled odd symplectic gram not alternate");
      bw.form.gram = std::move(s);
      break;
    }
    case WitnessKind::quadratic: {
      int target = arf_target.value_or(0);
      Elt a = (target == 0) ? K->zero() : first_nonzero_class_element(K);
      Mat s = detail::pair_odd_tiled_gram(K, n, a, /*last_tile_identity=*/false);
      detail::assert_invariant_gram(bw.block, s, "doubled odd quadratic polar");
      const int size = 4 * n + 2;
      Mat q(K, size, size);
      for (int i = 0; i < size; ++i)
        for (int j2 = i + 1; j2 < size; ++j2) q.at(i, j2) = s.at(i, j2);
      // q(e_k) = b(e_k, e_{k+2}) for k in [1, 4n]; the last two stay 0
      for (int k = 0; k + 2 < size; ++k) q.at(k, k) = s.at(k, k + 2);
      bw.form.quad = QuadForm(std::move(q));
      bw.form.arf = ArfClass{artin_schreier_class(a)};
      break;
    }
  }
  bw.conj_to_direct_sum = conjugate_similar(direct_sum({j, j}), bw.block);
  if (!bw.conj_to_direct_sum) raise(errc::internal, "doubled block similarity failed");
  return bw;
}

// ---------------------------------------------------------------------------
// Companion blocks of irreducible palindromials through hermitian trace forms

namespace detail {

// Hermitian H over L with J_a(1)^T H J_a(1) = H:
// characteristic != 2 uses the symmetric/alternate recipes over the prime
// structure (times epsilon), characteristic 2 the alpha/beta inductive grid.
inline Mat hermitian_block(const FieldCtxPtr& L, const GaloisInvolution& sigma, int a) {
  const bool char2 = L->char2();
  if (!char2) {
    Elt y = L->generator();
    Elt eps = y - sigma(y);
    if (eps.is_zero()) eps = y * (y - sigma(y));
    if (eps.is_zero()) raise(errc::internal, "no antisymmetric element available");
    if (a % 2 == 1) return jordan_odd_gram(L, (a - 1) / 2);
    return jordan_even_gram(L, a / 2) * eps;
  }
  if (a % 2 == 0) return jordan_even_gram(L, a / 2);
  // odd a = 2b + 1: alpha outside the fixed field, beta = alpha + sigma(alpha)
  const int b = (a - 1) / 2;
  Elt alpha = L->generator();  // sigma(y) = 1/y != y, so y is not fixed
  Elt beta = alpha + sigma(alpha);
  if (beta.is_zero()) raise(errc::internal, "trace of the generator vanished");
  const int size = a;
  std::vector<std::vector<Elt>> g(static_cast<std::size_t>(size) + 2,
                                  std::vector<Elt>(static_cast<std::size_t>(size) + 2, L->zero()));
  for (int i = 1; i <= size; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(size + 1 - i)] = beta;
  for (int i = b + 2; i <= size; ++i) g[static_cast<std::size_t>(i)][static_cast<std::size_t>(b + 1)] = alpha;
  for (int j = b + 2; j <= size; ++j) g[static_cast<std::size_t>(b + 1)][static_cast<std::size_t>(j)] = sigma(alpha);
  antidiagonal_sweeps(g, size, b);
  Mat h = grid_to_mat(L, g, size);
  // hermitian check: sigma(H)^T = H
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (sigma(h.at(i, j)) != h.at(j, i)) raise(errc::internal, "hermitian recipe failed");
  return h;
}

}  // namespace detail

// Witness for C(P^a), P an irreducible palindromial of degree > 1 with no
// root at 1 or -1. Realizes the trace forms of the quotient-field
// construction on the block J_a(1) (x) C(P) and transports the gram to the
// companion matrix.
inline FormWitness companion_block_form(const Poly& p, int a, WitnessKind kind,
                                        Mat* block_out = nullptr) {
  const FieldCtxPtr& K = p.ctx();
  const bool char2 = K->char2();
  if (kind == WitnessKind::quadratic && !char2) kind = WitnessKind::symmetric;
  if (kind == WitnessKind::symmetric_nonalternate) kind = WitnessKind::symmetric;
  if (p.degree() < 2) raise(errc::not_irreducible, "companion construction requires degree > 1");
  if (!is_irreducible(p)) raise(errc::not_irreducible, "companion construction requires an irreducible polynomial");
  if (!is_palindromial(p)) raise(errc::not_palindromial, "companion construction requires a palindromial");
  if (p.eval(K->one()).is_zero() || p.eval(-K->one()).is_zero())
    raise(errc::root_at_plus_minus_one, "companion construction excludes roots at 1 and -1");
  if (a < 1) raise(errc::internal, "exponent must be positive");

  FieldCtxPtr L = make_extension(K, p);
  Elt y = L->generator();
  GaloisInvolution sigma = galois_involution(L, y);
  Mat h = detail::hermitian_block(L, sigma, a);
  if (h.rank() != a) raise(errc::internal, "hermitian block is singular");
  {
    Mat j = jordan(L, a, L->one());
    if (j.transpose() * h * j != h) raise(errc::internal, "hermitian block is not J-invariant");
  }

  const int degp = p.degree();
  const int dim = a * degp;
  Mat m0 = kron(jordan(K, a, K->one()), companion(p));

  // K-basis f_{(i,s)} = y^s E_i; b(y^s E_i, y^t E_j) = H_ij y^(t-s)
  std::vector<Elt> ypow(static_cast<std::size_t>(2 * degp), L->one());
  {
    Elt yinv = y.inverse();
    Elt cur = L->one();
    for (int t = 0; t < degp; ++t) {
      ypow[static_cast<std::size_t>(degp + t)] = cur;  // y^t
      cur *= y;
    }
    cur = yinv;
    for (int t = 1; t < degp; ++t) {
      ypow[static_cast<std::size_t>(degp - t)] = cur;  // y^-t
      cur *= yinv;
    }
  }
  auto hermitian_entry = [&](int i, int s, int j, int t) {
    return h.at(i, j) * ypow[static_cast<std::size_t>(degp + t - s)];
  };

  Elt eps = L->zero();
  if (!char2 && kind == WitnessKind::symplectic) {
    eps = y - sigma(y);
    if (eps.is_zero()) eps = y * (y - sigma(y));
  }

  Mat g0(K, dim, dim);
  for (int i = 0; i < a; ++i)
    for (int s = 0; s < degp; ++s)
      for (int j = 0; j < a; ++j)
        for (int t = 0; t < degp; ++t) {
          Elt value;
          if (kind == WitnessKind::symplectic && !char2) {
            Elt w = eps * (hermitian_entry(i, s, j, t) - hermitian_entry(j, t, i, s));
            value = trace_fixed_to_base(sigma, w);
          } else {
            // Tr_{L/K} b = polar of the trace quadratic form; symmetric
            value = rel_trace(K, L, hermitian_entry(i, s, j, t));
          }
          g0.at(i * degp + s, j * degp + t) = value;
        }

  FormWitness w;
  w.kind = kind;
  if (kind == WitnessKind::quadratic) {
    Mat q0(K, dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) q0.at(i, j) = g0.at(i, j);
    for (int i = 0; i < a; ++i) {
      Elt qe = trace_fixed_to_base(sigma, h.at(i, i));
      for (int s = 0; s < degp; ++s) q0.at(i * degp + s, i * degp + s) = qe;
    }
    QuadForm q(std::move(q0));
    if (!is_adapted(q, m0)) raise(errc::internal, "companion quadratic form is not adapted");
    // transport to C(P^a)
    Mat target = companion(detail::poly_pow(p, a));
    auto t = conjugate_similar(target, m0);
    if (!t) raise(errc::internal, "companion block similarity failed");
    Mat tinv = t->inverse();
    w.quad = QuadForm::fold(tinv.transpose() * q.gram() * tinv);
    w.arf = arf(*w.quad);
    if (!is_adapted(*w.quad, target)) raise(errc::internal, "transported quadratic form is not adapted");
    if (block_out) *block_out = target;
  } else {
    detail::assert_invariant_gram(m0, g0, "companion block");
    if (kind == WitnessKind::symplectic && !g0.is_alternate()) raise(errc::internal, "companion symplectic gram not alternate");
    if (kind == WitnessKind::symmetric && !g0.is_symmetric()) raise(errc::internal, "companion symmetric gram not symmetric");
    Mat target = companion(detail::poly_pow(p, a));
    auto t = conjugate_similar(target, m0);
    if (!t) raise(errc::internal, "companion block similarity failed");
    Mat tinv = t->inverse();
    w.gram = tinv.transpose() * g0 * tinv;
    detail::assert_invariant_gram(target, w.gram, "transported companion block");
    if (block_out) *block_out = target;
  }
  return w;
}

// ---------------------------------------------------------------------------
// Full assembly

namespace detail {

struct Piece {
  Mat block;
  Mat gram;          // bilinear kinds: gram; quadratic: upper-triangular gram
  int arf_bit = 0;   // quadratic contribution
  bool tunable = false;
};

}  // namespace detail

// Builds a verified witness for A when classify says yes. Pieces are ordered
// reciprocal pairs first, then eigenvalue-1 and -1 blocks by descending
// size, then palindromial companion blocks in lexicographic order; the
// direct sum is transported along the deterministic similarity
// G = (T^-1)^T S T^-1 for N = T^-1 A T.
inline FormWitness assemble_witness(const Mat& a, WitnessKind kind, std::optional<int> arf_target = std::nullopt) {
  const FieldCtxPtr& K = a.ctx();
  const bool char2 = K->char2();
  if (kind == WitnessKind::quadratic && !char2) kind = WitnessKind::symmetric;
  if (arf_target && (kind != WitnessKind::quadratic))
    raise(errc::wrong_characteristic, "Arf targets apply to quadratic witnesses in characteristic 2 only");

  StructureReport rep = structure_report(a);
  FormKind fk = FormKind::symplectic;
  switch (kind) {
    case WitnessKind::symplectic: fk = FormKind::symplectic; break;
    case WitnessKind::symmetric: fk = FormKind::bilin_orthogonal; break;
    case WitnessKind::symmetric_nonalternate: fk = FormKind::nonalternate_orthogonal; break;
    case WitnessKind::quadratic: fk = FormKind::orthogonal; break;
  }
  Verdict verdict = classify(rep, fk);
  if (!verdict.yes) raise(errc::not_classified_yes, "no adapted form of this kind exists: " + verdict.certificate());

  if (kind == WitnessKind::quadratic && arf_target) {
    ArfVerdict av = arf_dichotomy(rep);
    if (av.which == ArfVerdict::Case::forced_hyperbolic && *arf_target != 0)
      raise(errc::arf_unreachable, "every adapted form is hyperbolic");
    if (av.which == ArfVerdict::Case::forced_nonhyperbolic && *arf_target != 1)
      raise(errc::arf_unreachable, "every adapted form is non-hyperbolic");
  }

  // nonalternate bookkeeping: odd dimension is automatically nonalternate;
  // in even dimension one eigenvalue-1 block is made nonalternate explicitly
  const bool want_nonalternate = (kind == WitnessKind::symmetric_nonalternate) && (a.rows() % 2 == 0);

  // collect the eigenvalue +-1 single blocks and the companion singles
  struct EigBlocks {
    std::map<int, int, std::greater<int>> sizes;  // size -> count, descending
  };
  EigBlocks at_plus, at_minus;
  std::vector<std::pair<Poly, int>> companions;
  Poly xm1 = Poly::linear_root(K->one());
  Poly xp1 = Poly::linear_root(-K->one());
  for (int idx : verdict.single_indices) {
    const auto& [q, e] = rep.elementary[static_cast<std::size_t>(idx)];
    if (q == xm1)
      at_plus.sizes[static_cast<int>(e)]++;
    else if (!char2 && q == xp1)
      at_minus.sizes[static_cast<int>(e)]++;
    else
      companions.emplace_back(q, static_cast<int>(e));
  }
  std::sort(companions.begin(), companions.end(), [](const auto& x, const auto& y) {
    int c = Poly::lex_compare(x.first, y.first);
    if (c != 0) return c < 0;
    return x.second < y.second;
  });

  std::vector<detail::Piece> pieces;
  auto push_bilinear = [&](Mat block, Mat gram) {
    detail::Piece p;
    p.block = std::move(block);
    p.gram = std::move(gram);
    pieces.push_back(std::move(p));
  };
  auto push_block_witness = [&](BlockWitness bw) {
    detail::Piece p;
    p.block = std::move(bw.block);
    if (bw.form.quad) {
      p.gram = bw.form.quad->gram();
      p.arf_bit = bw.form.arf ? bw.form.arf->bit : 0;
    } else {
      p.gram = std::move(bw.form.gram);
    }
    pieces.push_back(std::move(p));
  };

  // 1. reciprocal pairs
  for (const auto& [i, j] : verdict.pair_indices) {
    (void)j;
    const auto& [q, e] = rep.elementary[static_cast<std::size_t>(i)];
    Mat b = companion(detail::poly_pow(q, e));
    FormWitness fw = pair_block_form(b, kind);
    detail::Piece p;
    p.block = pair_block_matrix(b);
    p.gram = fw.quad ? fw.quad->gram() : fw.gram;
    pieces.push_back(std::move(p));
  }

  // 2. eigenvalue 1 then -1, descending size
  bool nonalternate_done = false;
  auto handle_eigenvalue = [&](const EigBlocks& eb, bool minus) {
    for (const auto& [size, count] : eb.sizes) {
      const Elt lambda = minus ? -K->one() : K->one();
      const bool even = (size % 2 == 0);
      int remaining = count;
      while (remaining > 0) {
        if (even) {
          // single even block
          WitnessKind block_kind = kind;
          if (want_nonalternate && !nonalternate_done) {
            block_kind = WitnessKind::symmetric_nonalternate;
          } else if (kind == WitnessKind::symmetric_nonalternate) {
            block_kind = WitnessKind::symmetric;
          }
          if (!char2 && kind != WitnessKind::symplectic) {
            // characteristic != 2: even blocks pair up for symmetric forms
            Mat b = jordan(K, size, lambda);
            push_bilinear(pair_block_matrix(b), pair_block_form(b, kind).gram);
            remaining -= 2;
            continue;
          }
          BlockWitness bw = jordan_even_form(K, size / 2, block_kind,
                                             block_kind == WitnessKind::quadratic ? std::optional<int>(0) : std::nullopt);
          if (block_kind == WitnessKind::quadratic) {
            detail::Piece p;
            p.block = bw.block;
            p.gram = bw.form.quad->gram();
            p.arf_bit = bw.form.arf->bit;
            p.tunable = true;
            pieces.push_back(std::move(p));
          } else {
            if (block_kind == WitnessKind::symmetric_nonalternate) nonalternate_done = true;
            if (minus) bw.block = -jordan(K, size, K->one());  // same gram works for -J
            push_block_witness(std::move(bw));
          }
          remaining -= 1;
          continue;
        }
        // odd sizes
        if (!char2) {
          if (kind == WitnessKind::symplectic) {
            // pairs of odd blocks
            Mat b = jordan(K, size, lambda);
            push_bilinear(pair_block_matrix(b), pair_block_form(b, kind).gram);
            remaining -= 2;
          } else {
            BlockWitness bw = jordan_odd_form(K, (size - 1) / 2, WitnessKind::symmetric);
            if (minus) bw.block = -jordan(K, size, K->one());
            push_block_witness(std::move(bw));
            remaining -= 1;
          }
          continue;
        }
        // characteristic 2, eigenvalue 1 only
        if (size == 1) {
          if (kind == WitnessKind::symmetric || kind == WitnessKind::symmetric_nonalternate) {
            Mat b(K, 1, 1);
            b.at(0, 0) = K->one();
            Mat g = b;  // gram (1) on a fixed line
            push_bilinear(std::move(b), std::move(g));
            if (kind == WitnessKind::symmetric_nonalternate) nonalternate_done = true;
            remaining -= 1;
          } else if (kind == WitnessKind::symplectic) {
            Mat block = Mat::identity(K, 2);
            push_bilinear(std::move(block), Mat::from_ints(K, {{0, 1}, {1, 0}}));
            remaining -= 2;
          } else {  // quadratic: [1, c] with c tunable
            detail::Piece p;
            p.block = Mat::identity(K, 2);
            Mat q(K, 2, 2);
            q.at(0, 0) = K->one();
            q.at(0, 1) = K->one();
            p.gram = std::move(q);
            p.arf_bit = 0;
            p.tunable = true;
            pieces.push_back(std::move(p));
            remaining -= 2;
          }
          continue;
        }
        // odd size >= 3: doubled-block constructions consume pairs
        BlockWitness bw = jordan_odd_form(K, (size - 1) / 2, kind,
                                          kind == WitnessKind::quadratic ? std::optional<int>(0) : std::nullopt);
        if (kind == WitnessKind::quadratic) {
          detail::Piece p;
          p.block = bw.block;
          p.gram = bw.form.quad->gram();
          p.arf_bit = bw.form.arf->bit;
          p.tunable = true;
          pieces.push_back(std::move(p));
        } else {
          if (kind == WitnessKind::symmetric_nonalternate) nonalternate_done = true;
          push_block_witness(std::move(bw));
        }
        remaining -= 2;
      }
    }
  };
  handle_eigenvalue(at_plus, /*minus=*/false);
  if (!char2) handle_eigenvalue(at_minus, /*minus=*/true);

  // 3. palindromial companion blocks
  for (const auto& [q, e] : companions) {
    Mat block;
    FormWitness fw = companion_block_form(q, e, kind, &block);
    detail::Piece p;
    p.block = std::move(block);
    if (fw.quad) {
      p.gram = fw.quad->gram();
      p.arf_bit = fw.arf->bit;
    } else {
      p.gram = fw.gram;
    }
    pieces.push_back(std::move(p));
  }

  // Arf tuning: flip one tunable eigenvalue-1 block if the sum misses the target
  if (kind == WitnessKind::quadratic && arf_target) {
    int total = 0;
    for (const auto& p : pieces) total ^= p.arf_bit;
    if (total != *arf_target) {
      bool flipped = false;
      for (auto& p : pieces) {
        if (!p.tunable) continue;
        // rebuild the tunable piece with the opposite class
        const int dim = p.block.rows();
        if (p.block == Mat::identity(K, 2)) {
          Elt c = first_nonzero_class_element(K);
          p.gram.at(1, 1) = p.gram.at(1, 1) + c;
          p.arf_bit ^= 1;
        } else if (dim % 2 == 0 && p.block == jordan(K, dim, K->one())) {
          BlockWitness bw = jordan_even_form(K, dim / 2, WitnessKind::quadratic, std::optional<int>(p.arf_bit ^ 1));
          p.gram = bw.form.quad->gram();
          p.arf_bit = bw.form.arf->bit;
        } else {
          BlockWitness bw = jordan_odd_form(K, (dim / 2 - 1) / 2, WitnessKind::quadratic, std::optional<int>(p.arf_bit ^ 1));
          p.gram = bw.form.quad->gram();
          p.arf_bit = bw.form.arf->bit;
        }
        flipped = true;
        break;
      }
      if (!flipped) raise(errc::arf_unreachable, "no tunable block available for the requested class");
    }
  }

  // assemble, transport, verify
  std::vector<Mat> blocks, grams;
  int intended_arf = 0;
  for (const auto& p : pieces) {
    blocks.push_back(p.block);
    grams.push_back(p.gram);
    intended_arf ^= p.arf_bit;
  }
  Mat n_total = direct_sum(blocks);
  Mat s_total = direct_sum(grams);
  auto t = conjugate_similar(a, n_total);
  if (!t) raise(errc::internal, "assembled block matrix is not similar to the input");
  Mat tinv = t->inverse();

  FormWitness w;
  w.kind = kind;
  if (kind == WitnessKind::quadratic) {
    w.quad = QuadForm::fold(tinv.transpose() * s_total * tinv);
    if (!is_adapted(*w.quad, a)) raise(errc::internal, "assembled quadratic witness failed verification");
    w.arf = arf(*w.quad);
    if (w.arf->bit != intended_arf) raise(errc::internal, "assembled Arf class does not match the block sum");
    if (arf_target && w.arf->bit != *arf_target) raise(errc::internal, "assembled Arf class missed the target");
  } else {
    w.gram = tinv.transpose() * s_total * tinv;
    detail::assert_invariant_gram(a, w.gram, "assembled witness");
    if (kind == WitnessKind::symplectic && !w.gram.is_alternate())
      raise(errc::internal, "assembled symplectic witness not alternate");
    if (kind != WitnessKind::symplectic && !w.gram.is_symmetric())
      raise(errc::internal, "assembled symmetric witness not symmetric");
    if (want_nonalternate) {
      bool has_diag = false;
      for (int i = 0; i < w.gram.rows(); ++i)
        if (!w.gram.at(i, i).is_zero()) has_diag = true;
      if (!has_diag) raise(errc::internal, "assembled nonalternate witness has an alternate gram");
    }
  }
  return w;
}

}  // namespace isoform
