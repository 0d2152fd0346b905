#pragma once

// Exact dense matrices over a FieldCtx: rank, inverse, block constructors,
// Smith normal form of xI - A over K[x], elementary factors, the primary
// cyclic canonical form with an explicit transition matrix, Jordan block
// multiplicities at the eigenvalues 1 and -1, and similarity transport.

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "isoform/poly.hpp"

namespace isoform {

inline constexpr int kMaxDim = 64;

class Mat {
 public:
  Mat() = default;
  Mat(FieldCtxPtr ctx, int rows, int cols)
      : ctx_(std::move(ctx)), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, ctx_->zero()) {
    if (rows < 0 || cols < 0 || rows > kMaxDim || cols > kMaxDim)
      raise(errc::matrix_too_large, "matrix dimension outside the configured range");
  }

  static Mat identity(const FieldCtxPtr& ctx, int n) {
    Mat m(ctx, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = ctx->one();
    return m;
  }
  static Mat from_ints(const FieldCtxPtr& ctx, const std::vector<std::vector<std::int64_t>>& rows) {
    Mat m(ctx, static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) m.at(i, j) = ctx->scalar(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return m;
  }

  const FieldCtxPtr& ctx() const { return ctx_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Elt& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Elt& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

  bool operator==(const Mat& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) return false;
    for (std::size_t i = 0; i < a_.size(); ++i)
      if (a_[i] != rhs.a_[i]) return false;
    return true;
  }
  bool operator!=(const Mat& rhs) const { return !(*this == rhs); }

  Mat operator+(const Mat& rhs) const {
    check_same_shape(rhs);
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += rhs.a_[i];
    return r;
  }
  Mat operator-(const Mat& rhs) const {
    check_same_shape(rhs);
    Mat r = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= rhs.a_[i];
    return r;
  }
  Mat operator-() const {
    Mat r = *this;
    for (Elt& e : r.a_) e = -e;
    return r;
  }
  Mat operator*(const Mat& rhs) const {
    if (cols_ != rhs.rows_) raise(errc::dimension_mismatch, "matrix product shape mismatch");
    Mat r(ctx_, rows_, rhs.cols_);
    for (int i = 0; i < rows_; ++i)
      for (int k = 0; k < cols_; ++k) {
        const Elt& f = at(i, k);
        if (f.is_zero()) continue;
        for (int j = 0; j < rhs.cols_; ++j) r.at(i, j) += f * rhs.at(k, j);
      }
    return r;
  }
  Mat operator*(const Elt& s) const {
    Mat r = *this;
    for (Elt& e : r.a_) e *= s;
    return r;
  }

  Mat transpose() const {
    Mat r(ctx_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  bool is_symmetric() const {
    for (int i = 0; i < rows_; ++i)
      for (int j = i + 1; j < cols_; ++j)
        if (at(i, j) != at(j, i)) return false;
    return is_square();
  }
  // Skew-symmetric with zero diagonal (X^T A X = 0 for all X).
  bool is_alternate() const {
    if (!is_square()) return false;
    for (int i = 0; i < rows_; ++i) {
      if (!at(i, i).is_zero()) return false;
      for (int j = i + 1; j < cols_; ++j)
        if (at(i, j) != -at(j, i)) return false;
    }
    return true;
  }

  int rank() const {
    Mat w = *this;
    int r = 0;
    for (int c = 0; c < cols_ && r < rows_; ++c) {
      int pr = -1;
      for (int i = r; i < rows_; ++i)
        if (!w.at(i, c).is_zero()) {
          pr = i;
          break;
        }
      if (pr < 0) continue;
      w.swap_rows(pr, r);
      Elt inv = w.at(r, c).inverse();
      for (int j = c; j < cols_; ++j) w.at(r, j) *= inv;
      for (int i = 0; i < rows_; ++i) {
        if (i == r) continue;
        Elt f = w.at(i, c);
        if (f.is_zero()) continue;
        for (int j = c; j < cols_; ++j) w.at(i, j) -= f * w.at(r, j);
      }
      ++r;
    }
    return r;
  }

  Mat inverse() const {
    if (!is_square()) raise(errc::dimension_mismatch, "inverse of a non-square matrix");
    int n = rows_;
    Mat w = *this;
    Mat inv = identity(ctx_, n);
    for (int c = 0; c < n; ++c) {
      int pr = -1;
      for (int i = c; i < n; ++i)
        if (!w.at(i, c).is_zero()) {
          pr = i;
          break;
        }
      if (pr < 0) raise(errc::singular, "matrix is singular");
      w.swap_rows(pr, c);
      inv.swap_rows(pr, c);
      Elt f = w.at(c, c).inverse();
      for (int j = 0; j < n; ++j) {
        w.at(c, j) *= f;
        inv.at(c, j) *= f;
      }
      for (int i = 0; i < n; ++i) {
        if (i == c) continue;
        Elt g = w.at(i, c);
        if (g.is_zero()) continue;
        for (int j = 0; j < n; ++j) {
          w.at(i, j) -= g * w.at(c, j);
          inv.at(i, j) -= g * inv.at(c, j);
        }
      }
    }
    return inv;
  }

  Mat pow(std::int64_t e) const {
    if (!is_square()) raise(errc::dimension_mismatch, "power of a non-square matrix");
    Mat acc = identity(ctx_, rows_);
    Mat base = *this;
    while (e > 0) {
      if (e & 1) acc = acc * base;
      base = base * base;
      e >>= 1;
    }
    return acc;
  }

  std::vector<Elt> mul_vec(const std::vector<Elt>& v) const {
    if (static_cast<int>(v.size()) != cols_) raise(errc::dimension_mismatch, "matrix-vector shape mismatch");
    std::vector<Elt> r(static_cast<std::size_t>(rows_), ctx_->zero());
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (!at(i, j).is_zero()) r[static_cast<std::size_t>(i)] += at(i, j) * v[static_cast<std::size_t>(j)];
    return r;
  }

 private:
  FieldCtxPtr ctx_;
  int rows_ = 0, cols_ = 0;
  std::vector<Elt> a_;

  void swap_rows(int i, int j) {
    if (i == j) return;
    for (int c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
  }
  void check_same_shape(const Mat& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) raise(errc::dimension_mismatch, "matrix shape mismatch");
  }
};

// ---------------------------------------------------------------------------
// Block constructors

// Companion matrix of a monic P = x^n - sum a_k x^k: ones on the subdiagonal,
// last column (a_0, ..., a_{n-1}).
inline Mat companion(const Poly& p) {
  if (!p.is_monic() || p.degree() < 1) raise(errc::not_monic, "companion matrix requires a monic polynomial of degree >= 1");
  int n = p.degree();
  Mat m(p.ctx(), n, n);
  for (int i = 1; i < n; ++i) m.at(i, i - 1) = p.ctx()->one();
  for (int i = 0; i < n; ++i) m.at(i, n - 1) = -p.coeff(i);
  return m;
}

inline Mat jordan(const FieldCtxPtr& ctx, int k, const Elt& lambda) {
  Mat m(ctx, k, k);
  for (int i = 0; i < k; ++i) {
    m.at(i, i) = lambda;
    if (i + 1 < k) m.at(i, i + 1) = ctx->one();
  }
  return m;
}

inline Mat direct_sum(const std::vector<Mat>& blocks) {
  if (blocks.empty()) raise(errc::internal, "direct sum of no blocks");
  int n = 0;
  for (const Mat& b : blocks) n += b.rows();
  Mat m(blocks[0].ctx(), n, n);
  int off = 0;
  for (const Mat& b : blocks) {
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) m.at(off + i, off + j) = b.at(i, j);
    off += b.rows();
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat m(a.ctx(), a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a.at(i, j).is_zero()) continue;
      for (int s = 0; s < b.rows(); ++s)
        for (int t = 0; t < b.cols(); ++t) m.at(i * b.rows() + s, j * b.cols() + t) = a.at(i, j) * b.at(s, t);
    }
  return m;
}

// P(A) by Horner's rule.
inline Mat apply_poly(const Poly& p, const Mat& a) {
  if (!a.is_square()) raise(errc::dimension_mismatch, "polynomial of a non-square matrix");
  Mat acc(a.ctx(), a.rows(), a.rows());
  for (int i = p.degree(); i >= 0; --i) {
    acc = acc * a;
    Elt c = p.coeff(i);
    if (!c.is_zero())
      for (int d = 0; d < a.rows(); ++d) acc.at(d, d) += c;
  }
  return acc;
}

// Column basis of the kernel, via reduced row echelon form; deterministic.
inline std::vector<std::vector<Elt>> kernel_basis(const Mat& m) {
  int rows = m.rows(), cols = m.cols();
  Mat w = m;
  std::vector<int> pivot_of_col(static_cast<std::size_t>(cols), -1);
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int pr = -1;
    for (int i = r; i < rows; ++i)
      if (!w.at(i, c).is_zero()) {
        pr = i;
        break;
      }
    if (pr < 0) continue;
    for (int j = 0; j < cols; ++j) std::swap(w.at(pr, j), w.at(r, j));
    Elt inv = w.at(r, c).inverse();
    for (int j = 0; j < cols; ++j) w.at(r, j) *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r) continue;
      Elt f = w.at(i, c);
      if (f.is_zero()) continue;
      for (int j = 0; j < cols; ++j) w.at(i, j) -= f * w.at(r, j);
    }
    pivot_of_col[static_cast<std::size_t>(c)] = r;
    ++r;
  }
  std::vector<std::vector<Elt>> basis;
  for (int c = 0; c < cols; ++c) {
    if (pivot_of_col[static_cast<std::size_t>(c)] >= 0) continue;
    std::vector<Elt> v(static_cast<std::size_t>(cols), m.ctx()->zero());
    v[static_cast<std::size_t>(c)] = m.ctx()->one();
    for (int c2 = 0; c2 < cols; ++c2) {
      int pr = pivot_of_col[static_cast<std::size_t>(c2)];
      if (pr >= 0) v[static_cast<std::size_t>(c2)] = -w.at(pr, c);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

// ---------------------------------------------------------------------------
// Smith normal form of xI - A over K[x]

// Nonconstant diagonal entries of the Smith form of xI - A, monic, each
// dividing the next. Deterministic: pivots chosen by minimal degree, then
// first position in row-major order.
inline std::vector<Poly> invariant_factors(const Mat& a) {
  if (!a.is_square()) raise(errc::dimension_mismatch, "invariant factors of a non-square matrix");
  const FieldCtxPtr& K = a.ctx();
  const int n = a.rows();
  std::vector<std::vector<Poly>> m(static_cast<std::size_t>(n), std::vector<Poly>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Poly e = Poly::constant(-a.at(i, j));
      if (i == j) e = e + Poly::x(K);
      m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = e;
    }

  auto swap_rows = [&](int i, int j) {
    if (i != j) std::swap(m[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(j)]);
  };
  auto swap_cols = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < n; ++r)
      std::swap(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)], m[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)]);
  };

  for (int t = 0; t < n; ++t) {
    while (true) {
      // pivot: minimal-degree nonzero entry in the trailing submatrix
      int pi = -1, pj = -1, best = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j) {
          const Poly& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          if (e.is_zero()) continue;
          if (best < 0 || e.degree() < best) {
            best = e.degree();
            pi = i;
            pj = j;
          }
        }
      if (pi < 0) { t = n; break; }  // trailing block is zero
      swap_rows(pi, t);
      swap_cols(pj, t);
      const Poly piv = m[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)];
      // reduce row and column entries modulo the pivot
      bool disturbed = false;
      for (int i = t + 1; i < n; ++i) {
        Poly& e = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
        if (e.is_zero()) continue;
        Poly q = e / piv;
        if (!q.is_zero())
          for (int j = t; j < n; ++j)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - q * m[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
        if (!m[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)].is_zero()) disturbed = true;
      }
      for (int j = t + 1; j < n; ++j) {
        Poly& e = m[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)];
        if (e.is_zero()) continue;
        Poly q = e / piv;
        if (!q.is_zero())
          for (int i = t; i < n; ++i)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - q * m[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
        if (!m[static_cast<std::size_t>(t)][static_cast<std::size_t>(j)].is_zero()) disturbed = true;
      }
      if (disturbed) continue;  // smaller-degree remainders become new pivots
      // both cleared: enforce divisibility of the trailing block
      bool fixed = false;
      for (int i = t + 1; i < n && !fixed; ++i)
        for (int j = t + 1; j < n && !fixed; ++j) {
          if ((m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] % piv).is_zero()) continue;
          for (int jj = t; jj < n; ++jj)
            m[static_cast<std::size_t>(t)][static_cast<std::size_t>(jj)] =
                m[static_cast<std::size_t>(t)][static_cast<std::size_t>(jj)] + m[static_cast<std::size_t>(i)][static_cast<std::size_t>(jj)];
          fixed = true;
        }
      if (!fixed) break;
    }
    if (t >= n) break;
  }

  std::vector<Poly> out;
  for (int t = 0; t < n; ++t) {
    Poly d = m[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)].monic();
    if (d.degree() >= 1) out.push_back(d);
  }
  return out;
}

inline Poly minimal_polynomial(const Mat& a) {
  auto inv = invariant_factors(a);
  if (inv.empty()) return Poly::one(a.ctx());
  return inv.back();
}

inline Poly characteristic_polynomial_from_invariants(const std::vector<Poly>& inv, const FieldCtxPtr& K) {
  Poly acc = Poly::one(K);
  for (const Poly& f : inv) acc = acc * f;
  return acc;
}

// ---------------------------------------------------------------------------
// Primary cyclic decomposition with explicit bases

struct CyclicBlock {
  Poly irreducible;                          // Q
  std::int64_t exponent = 0;                 // e: the block is C(Q^e)
  std::vector<std::vector<Elt>> basis_cols;  // v, Av, ..., A^(e*degQ - 1) v
};

namespace detail {

inline Poly poly_pow(const Poly& p, std::int64_t e) {
  Poly acc = Poly::one(p.ctx());
  for (std::int64_t i = 0; i < e; ++i) acc = acc * p;
  return acc;
}

// Height of w: least j with Q(M)^j w = 0 (bounded by maxh).
inline int q_height(const Mat& qm, const std::vector<Elt>& w, int maxh) {
  std::vector<Elt> cur = w;
  for (int j = 0; j <= maxh; ++j) {
    bool zero = true;
    for (const Elt& e : cur)
      if (!e.is_zero()) {
        zero = false;
        break;
      }
    if (zero) return j;
    cur = qm.mul_vec(cur);
  }
  raise(errc::internal, "candidate escaped its primary component");
}

// Recursive extraction of a cyclic decomposition of the span of `cands`
// (an M-stable subspace annihilated by Q^maxh). Returns generators with
// their heights, expressed in the coordinates of this level.
inline std::vector<std::pair<std::vector<Elt>, int>> extract_cyclics(const Mat& M, const Poly& Q, int maxh,
                                                                     const std::vector<std::vector<Elt>>& cands) {
  const FieldCtxPtr& K = M.ctx();
  const int d = M.rows();
  Mat qm = apply_poly(Q, M);

  int best_h = 0;
  std::size_t best_i = 0;
  std::vector<int> heights(cands.size(), 0);
  for (std::size_t i = 0; i < cands.size(); ++i) {
    heights[i] = q_height(qm, cands[i], maxh);
    if (heights[i] > best_h) {
      best_h = heights[i];
      best_i = i;
    }
  }
  if (best_h == 0) return {};

  const std::vector<Elt>& v = cands[best_i];
  const int blockdim = best_h * Q.degree();

  // cyclic basis columns v, Mv, ...
  std::vector<std::vector<Elt>> cyc;
  cyc.reserve(static_cast<std::size_t>(blockdim));
  std::vector<Elt> cur = v;
  for (int i = 0; i < blockdim; ++i) {
    cyc.push_back(cur);
    cur = M.mul_vec(cur);
  }

  // complete to a full basis with the first independent standard vectors
  Mat F(K, d, d);
  for (int j = 0; j < blockdim; ++j)
    for (int i = 0; i < d; ++i) F.at(i, j) = cyc[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  std::vector<int> comp_idx;
  {
    int have = blockdim;
    for (int e = 0; e < d && have < d; ++e) {
      Mat trial = F;
      trial.at(e, have) = K->one();
      // cheap incremental independence test
      Mat sub(K, d, have + 1);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j <= have; ++j) sub.at(i, j) = trial.at(i, j);
      if (sub.rank() == have + 1) {
        F.at(e, have) = K->one();
        comp_idx.push_back(e);
        ++have;
      }
    }
    if (have != d) raise(errc::internal, "basis completion failed");
  }
  Mat Finv = F.inverse();
  const int dimq = d - blockdim;

  auto quo_coords = [&](const std::vector<Elt>& x) {
    std::vector<Elt> full = Finv.mul_vec(x);
    return std::vector<Elt>(full.begin() + blockdim, full.end());
  };
  auto section = [&](const std::vector<Elt>& xq) {
    // representative with zero cyclic coordinates
    std::vector<Elt> r(static_cast<std::size_t>(d), K->zero());
    for (int j = 0; j < dimq; ++j) {
      const Elt& c = xq[static_cast<std::size_t>(j)];
      if (c.is_zero()) continue;
      r[static_cast<std::size_t>(comp_idx[static_cast<std::size_t>(j)])] += c;
    }
    return r;
  };

  std::vector<std::pair<std::vector<Elt>, int>> out;
  out.emplace_back(v, best_h);

  if (dimq > 0) {
    Mat Mq(K, dimq, dimq);
    for (int j = 0; j < dimq; ++j) {
      std::vector<Elt> col(static_cast<std::size_t>(d), K->zero());
      col[static_cast<std::size_t>(comp_idx[static_cast<std::size_t>(j)])] = K->one();
      std::vector<Elt> img = quo_coords(M.mul_vec(col));
      for (int i = 0; i < dimq; ++i) Mq.at(i, j) = img[static_cast<std::size_t>(i)];
    }
    std::vector<std::vector<Elt>> cands_q;
    cands_q.reserve(cands.size());
    for (const auto& c : cands) cands_q.push_back(quo_coords(c));

    auto sub = extract_cyclics(Mq, Q, best_h, cands_q);

    for (auto& [gq, c] : sub) {
      std::vector<Elt> g0 = section(gq);
      // adjust the representative so its true height equals c:
      // Q(M)^c g0 lies in K[M]v, say equal to f(M) v; then Q^c | f and
      // g := g0 - (f/Q^c)(M) v has the same class with height exactly c.
      std::vector<Elt> z = g0;
      for (int i = 0; i < c; ++i) z = qm.mul_vec(z);
      auto fcoeffs = detail::solve_linear(cyc, z);
      if (!fcoeffs) raise(errc::internal, "cyclic adjustment solve failed");
      Poly f(K, std::move(*fcoeffs));
      auto [gpoly, rem] = f.divrem(poly_pow(Q, c));
      if (!rem.is_zero()) raise(errc::internal, "cyclic adjustment division not exact");
      // g0 -= gpoly(M) v, evaluated by Horner on the vector
      std::vector<Elt> w(static_cast<std::size_t>(d), K->zero());
      for (int i = gpoly.degree(); i >= 0; --i) {
        w = M.mul_vec(w);
        Elt cf = gpoly.coeff(i);
        if (!cf.is_zero())
          for (int r = 0; r < d; ++r) w[static_cast<std::size_t>(r)] += cf * v[static_cast<std::size_t>(r)];
      }
      for (int r = 0; r < d; ++r) g0[static_cast<std::size_t>(r)] -= w[static_cast<std::size_t>(r)];
      out.emplace_back(std::move(g0), c);
    }
  }
  return out;
}

}  // namespace detail

// Full primary cyclic decomposition of A: one block per elementary factor
// Q^e, with an explicit cyclic basis. Deterministic.
inline std::vector<CyclicBlock> primary_cyclic_decomposition(const Mat& a, const std::vector<Poly>& invfacs) {
  const FieldCtxPtr& K = a.ctx();
  const int n = a.rows();
  std::vector<CyclicBlock> blocks;
  if (invfacs.empty()) return blocks;
  Poly mu = invfacs.back();
  auto mu_factors = factor(mu);

  for (const auto& [Q, mQ] : mu_factors) {
    // projector onto the Q-primary component: g * (g^{-1} mod Q^mQ) mod mu
    Poly qpow = detail::poly_pow(Q, mQ);
    Poly g = mu / qpow;
    Poly proj_poly = g.is_one() ? Poly::one(K) : (g * invmod(g % qpow, qpow)) % mu;
    Mat proj = apply_poly(proj_poly, a);

    std::vector<std::vector<Elt>> cands;
    for (int i = 0; i < n; ++i) {
      std::vector<Elt> e(static_cast<std::size_t>(n), K->zero());
      e[static_cast<std::size_t>(i)] = K->one();
      cands.push_back(proj.mul_vec(e));
    }
    auto gens = detail::extract_cyclics(a, Q, static_cast<int>(mQ), cands);
    for (auto& [v, h] : gens) {
      CyclicBlock b;
      b.irreducible = Q;
      b.exponent = h;
      std::vector<Elt> cur = v;
      for (int i = 0; i < h * Q.degree(); ++i) {
        b.basis_cols.push_back(cur);
        cur = a.mul_vec(cur);
      }
      blocks.push_back(std::move(b));
    }
  }
  return blocks;
}

namespace detail {

inline bool block_key_less(const CyclicBlock& x, const CyclicBlock& y) {
  int c = Poly::lex_compare(x.irreducible, y.irreducible);
  if (c != 0) return c < 0;
  return x.exponent < y.exponent;
}

}  // namespace detail

// Canonical primary rational form with transition matrix: T^-1 A T equals the
// direct sum of companion blocks C(Q^e) sorted by (deg Q, lex Q, e).
struct CanonicalForm {
  Mat canonical;
  Mat transition;
  std::vector<CyclicBlock> blocks;  // in canonical order
};

inline CanonicalForm canonical_form(const Mat& a) {
  if (!a.is_square()) raise(errc::dimension_mismatch, "canonical form of a non-square matrix");
  const FieldCtxPtr& K = a.ctx();
  const int n = a.rows();
  auto invfacs = invariant_factors(a);
  auto blocks = primary_cyclic_decomposition(a, invfacs);
  std::stable_sort(blocks.begin(), blocks.end(), detail::block_key_less);

  std::vector<Mat> comp;
  Mat t(K, n, n);
  int col = 0;
  for (const CyclicBlock& b : blocks) {
    comp.push_back(companion(detail::poly_pow(b.irreducible, b.exponent)));
    for (const auto& bc : b.basis_cols) {
      for (int i = 0; i < n; ++i) t.at(i, col) = bc[static_cast<std::size_t>(i)];
      ++col;
    }
  }
  if (col != n) raise(errc::internal, "cyclic decomposition dimension mismatch");
  CanonicalForm out{direct_sum(comp), std::move(t), std::move(blocks)};
  // exact invariant of the construction
  if (out.transition.inverse() * a * out.transition != out.canonical)
    raise(errc::internal, "transition matrix does not conjugate to the canonical form");
  return out;
}

// T with T^-1 A T = B exactly, or nullopt when A and B are not similar.
inline std::optional<Mat> conjugate_similar(const Mat& a, const Mat& b) {
  if (!a.is_square() || !b.is_square() || a.rows() != b.rows())
    raise(errc::dimension_mismatch, "similarity transport requires square matrices of equal size");
  CanonicalForm ca = canonical_form(a);
  CanonicalForm cb = canonical_form(b);
  if (ca.canonical != cb.canonical) return std::nullopt;
  Mat t = ca.transition * cb.transition.inverse();
  if (t.inverse() * a * t != b) raise(errc::internal, "similarity transport verification failed");
  return t;
}

// ---------------------------------------------------------------------------
// Structure report

// Everything the classification decisions need to know about A: elementary
// factors with reciprocal pairing, Jordan multiplicities at the eigenvalues
// 1 and -1 (merged in characteristic 2), and the canonical form with its
// transition matrix.
struct StructureReport {
  std::vector<std::pair<Poly, std::int64_t>> elementary;  // sorted (Q, e), with repetition
  std::vector<std::pair<int, int>> pairs;                 // reciprocal pairs of indices into elementary
  std::vector<int> singles;                               // palindromial indices
  bool similar_to_inverse = false;
  std::map<int, int> jordan_plus;   // size -> count at eigenvalue 1
  std::map<int, int> jordan_minus;  // size -> count at eigenvalue -1 (= jordan_plus in char 2)
  Mat canonical;
  Mat transition;

  bool has_eigenvalue_one() const { return !jordan_plus.empty(); }
};

namespace detail {

inline std::map<int, int> jordan_multiplicities(const Mat& a, const Elt& lambda) {
  const int n = a.rows();
  Mat shifted = a;
  for (int i = 0; i < n; ++i) shifted.at(i, i) -= lambda;
  // r_k = rank((A - lambda I)^k); m_k = r_{k-1} - 2 r_k + r_{k+1}
  std::vector<int> r{n};
  Mat power = Mat::identity(a.ctx(), n);
  while (true) {
    power = power * shifted;
    r.push_back(power.rank());
    if (r.back() == r[r.size() - 2]) break;  // stabilized
  }
  std::map<int, int> mult;
  for (std::size_t k = 1; k < r.size(); ++k) {
    int rk1 = (k + 1 < r.size()) ? r[k + 1] : r.back();
    int m = r[k - 1] - 2 * r[k] + rk1;
    if (m > 0) mult[static_cast<int>(k)] = m;
  }
  return mult;
}

}  // namespace detail

inline StructureReport structure_report(const Mat& a) {
  if (!a.is_square()) raise(errc::dimension_mismatch, "structure report of a non-square matrix");
  const FieldCtxPtr& K = a.ctx();
  if (a.rank() != a.rows()) raise(errc::singular, "structure report requires an invertible matrix");

  StructureReport rep;
  auto invfacs = invariant_factors(a);
  for (const Poly& f : invfacs)
    for (auto& [q, e] : factor(f)) rep.elementary.emplace_back(q, e);
  std::sort(rep.elementary.begin(), rep.elementary.end(), [](const auto& x, const auto& y) {
    int c = Poly::lex_compare(x.first, y.first);
    if (c != 0) return c < 0;
    return x.second < y.second;
  });

  // reciprocal pairing: match (Q, e) with (Q#, e) when Q is not palindromial
  const int m = static_cast<int>(rep.elementary.size());
  std::vector<int> state(static_cast<std::size_t>(m), 0);  // 0 free, 1 consumed
  rep.similar_to_inverse = true;
  for (int i = 0; i < m; ++i) {
    if (state[static_cast<std::size_t>(i)]) continue;
    const auto& [q, e] = rep.elementary[static_cast<std::size_t>(i)];
    if (is_palindromial(q)) {
      rep.singles.push_back(i);
      state[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    Poly qrec = reciprocal(q);
    int match = -1;
    for (int j = i + 1; j < m; ++j) {
      if (state[static_cast<std::size_t>(j)]) continue;
      if (rep.elementary[static_cast<std::size_t>(j)].second == e && rep.elementary[static_cast<std::size_t>(j)].first == qrec) {
        match = j;
        break;
      }
    }
    if (match < 0) {
      rep.similar_to_inverse = false;
      state[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    rep.pairs.emplace_back(i, match);
    state[static_cast<std::size_t>(i)] = 1;
    state[static_cast<std::size_t>(match)] = 1;
  }

  rep.jordan_plus = detail::jordan_multiplicities(a, K->one());
  rep.jordan_minus = K->char2() ? rep.jordan_plus : detail::jordan_multiplicities(a, -K->one());

  CanonicalForm cf = canonical_form(a);
  // cross-check: the decomposition blocks must list exactly the elementary factors
  {
    std::vector<std::pair<Poly, std::int64_t>> from_blocks;
    for (const CyclicBlock& b : cf.blocks) from_blocks.emplace_back(b.irreducible, b.exponent);
    std::sort(from_blocks.begin(), from_blocks.end(), [](const auto& x, const auto& y) {
      int c = Poly::lex_compare(x.first, y.first);
      if (c != 0) return c < 0;
      return x.second < y.second;
    });
    if (from_blocks.size() != rep.elementary.size()) raise(errc::internal, "elementary factor mismatch");
    for (std::size_t i = 0; i < from_blocks.size(); ++i)
      if (from_blocks[i].first != rep.elementary[i].first || from_blocks[i].second != rep.elementary[i].second)
        raise(errc::internal, "elementary factor mismatch");
  }
  rep.canonical = std::move(cf.canonical);
  rep.transition = std::move(cf.transition);
  return rep;
}

}  // namespace isoform
