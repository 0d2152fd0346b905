#pragma once

// Quadratic forms in characteristic 2: upper-triangular Gram representation,
// polar form, regularity, symplectic basis extraction, Arf invariant, and
// the adaptedness test q(MX) = q(X).

#include <cstdint>
#include <utility>
#include <vector>

#include "isoform/matrix.hpp"

namespace isoform {

// Class in K / P(K) with P(x) = x^2 + x; additive under orthogonal sums.
struct ArfClass {
  int bit = 0;
  friend ArfClass operator+(ArfClass a, ArfClass b) { return ArfClass{(a.bit + b.bit) & 1}; }
  friend bool operator==(ArfClass a, ArfClass b) { return a.bit == b.bit; }
  friend bool operator!=(ArfClass a, ArfClass b) { return a.bit != b.bit; }
};

// q(X) = X^T Q X with Q upper triangular; the alternate ambiguity class is
// never stored, so evaluation semantics are unique.
class QuadForm {
 public:
  QuadForm() = default;
  QuadForm(Mat gram) : gram_(std::move(gram)) {
    if (!gram_.is_square()) raise(errc::dimension_mismatch, "quadratic form gram must be square");
    if (gram_.ctx()->characteristic() != 2) raise(errc::wrong_characteristic, "quadratic forms live in characteristic 2 here");
    for (int i = 0; i < gram_.rows(); ++i)
      for (int j = 0; j < i; ++j)
        if (!gram_.at(i, j).is_zero()) raise(errc::internal, "quadratic form gram must be upper triangular");
  }

  // Fold an arbitrary square matrix to the canonical upper-triangular
  // representative of the same form: q is unchanged pointwise.
  static QuadForm fold(const Mat& m) {
    Mat g(m.ctx(), m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i) {
      g.at(i, i) = m.at(i, i);
      for (int j = i + 1; j < m.cols(); ++j) g.at(i, j) = m.at(i, j) + m.at(j, i);
    }
    return QuadForm(std::move(g));
  }

  const Mat& gram() const { return gram_; }
  const FieldCtxPtr& ctx() const { return gram_.ctx(); }
  int dim() const { return gram_.rows(); }

  Elt eval(const std::vector<Elt>& x) const {
    if (static_cast<int>(x.size()) != dim()) raise(errc::dimension_mismatch, "evaluation vector size mismatch");
    Elt acc = ctx()->zero();
    for (int i = 0; i < dim(); ++i) {
      if (x[static_cast<std::size_t>(i)].is_zero()) continue;
      for (int j = i; j < dim(); ++j)
        acc += x[static_cast<std::size_t>(i)] * gram_.at(i, j) * x[static_cast<std::size_t>(j)];
    }
    return acc;
  }

 private:
  Mat gram_;
};

// Polar form Q + Q^T; alternate by construction in characteristic 2.
inline Mat polar(const QuadForm& q) { return q.gram() + q.gram().transpose(); }

// Regular iff the polar form is nonsingular (forces even dimension).
inline bool is_regular(const QuadForm& q) {
  Mat b = polar(q);
  return b.rank() == b.rows();
}

inline QuadForm orthogonal_sum(const QuadForm& q1, const QuadForm& q2) {
  if (!q1.ctx()->same_as(*q2.ctx())) raise(errc::field_mismatch, "orthogonal sum over different fields");
  return QuadForm(direct_sum({q1.gram(), q2.gram()}));
}

// True iff M^T Q M + Q is alternate and q is regular; equivalently
// q(MX) = q(X) for all X with nondegenerate polar form.
inline bool is_adapted(const QuadForm& q, const Mat& m) {
  if (!m.is_square() || m.rows() != q.dim()) raise(errc::dimension_mismatch, "adaptedness dimension mismatch");
  Mat d = m.transpose() * q.gram() * m + q.gram();
  return d.is_alternate() && is_regular(q);
}

// Symplectic basis (e_1, f_1, ..., e_n, f_n) of a nonsingular alternate form,
// by the deterministic pivot sweep: the first pair (i, j) with b(e_i, e_j)
// nonzero, i minimal then j minimal.
inline std::vector<std::pair<std::vector<Elt>, std::vector<Elt>>> symplectic_basis(const Mat& b) {
  if (!b.is_alternate()) raise(errc::degenerate, "symplectic basis of a non-alternate matrix");
  if (b.rank() != b.rows()) raise(errc::degenerate, "symplectic basis of a degenerate form");
  const FieldCtxPtr& K = b.ctx();
  const int n = b.rows();
  auto pair_with = [&](const std::vector<Elt>& x, const std::vector<Elt>& y) {
    Elt acc = K->zero();
    for (int i = 0; i < n; ++i) {
      if (x[static_cast<std::size_t>(i)].is_zero()) continue;
      for (int j = 0; j < n; ++j) acc += x[static_cast<std::size_t>(i)] * b.at(i, j) * y[static_cast<std::size_t>(j)];
    }
    return acc;
  };

  std::vector<std::vector<Elt>> pool;
  for (int i = 0; i < n; ++i) {
    std::vector<Elt> e(static_cast<std::size_t>(n), K->zero());
    e[static_cast<std::size_t>(i)] = K->one();
    pool.push_back(std::move(e));
  }
  std::vector<std::pair<std::vector<Elt>, std::vector<Elt>>> out;
  while (!pool.empty()) {
    // first hyperbolic pair in the remaining pool
    std::size_t pi = pool.size(), pj = pool.size();
    for (std::size_t i = 0; i < pool.size() && pi == pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j)
        if (!pair_with(pool[i], pool[j]).is_zero()) {
          pi = i;
          pj = j;
          break;
        }
    if (pi == pool.size()) raise(errc::degenerate, "alternate form degenerate on the remaining pool");
    std::vector<Elt> e = pool[pi];
    std::vector<Elt> f = pool[pj];
    Elt scale = pair_with(e, f).inverse();
    for (Elt& c : f) c *= scale;  // b(e, f) = 1
    std::vector<std::vector<Elt>> next;
    for (std::size_t k = 0; k < pool.size(); ++k) {
      if (k == pi || k == pj) continue;
      // g' = g + b(f, g) e - b(e, g) f is orthogonal to both e and f
      std::vector<Elt> g = pool[k];
      Elt bf = pair_with(f, g);
      Elt be = pair_with(e, g);
      for (int r = 0; r < n; ++r) {
        g[static_cast<std::size_t>(r)] += bf * e[static_cast<std::size_t>(r)];
        g[static_cast<std::size_t>(r)] -= be * f[static_cast<std::size_t>(r)];
      }
      next.push_back(std::move(g));
    }
    out.emplace_back(std::move(e), std::move(f));
    pool = std::move(next);
  }
  return out;
}

// Arf invariant: sum of q(e_i) q(f_i) over a symplectic basis of the polar
// form, classified through the Artin-Schreier map. Basis independent.
inline ArfClass arf(const QuadForm& q) {
  if (!is_regular(q)) raise(errc::degenerate, "Arf invariant of a non-regular form");
  Mat b = polar(q);
  auto basis = symplectic_basis(b);
  Elt acc = q.ctx()->zero();
  for (const auto& [e, f] : basis) acc += q.eval(e) * q.eval(f);
  return ArfClass{artin_schreier_class(acc)};
}

}  // namespace isoform
