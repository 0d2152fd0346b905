#pragma once

// Independent checking: exact witness verification, exhaustive existence
// oracles on small instances, and the structural property suites (kernel
// orthogonality and Jordan parity).

#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "isoform/witness.hpp"

namespace isoform {

// Exact evaluation of the defining identity for the witness kind, plus the
// shape and regularity conditions.
inline bool check(const Mat& m, const FormWitness& w) {
  if (!m.is_square()) raise(errc::dimension_mismatch, "check requires a square matrix");
  const int n = m.rows();
  switch (w.kind) {
    case WitnessKind::symplectic: {
      const Mat& g = w.gram;
      if (g.rows() != n || g.cols() != n) raise(errc::dimension_mismatch, "gram size mismatch");
      return g.is_alternate() && g.rank() == n && (m.transpose() * g * m == g);
    }
    case WitnessKind::symmetric: {
      const Mat& g = w.gram;
      if (g.rows() != n || g.cols() != n) raise(errc::dimension_mismatch, "gram size mismatch");
      return g.is_symmetric() && g.rank() == n && (m.transpose() * g * m == g);
    }
    case WitnessKind::symmetric_nonalternate: {
      const Mat& g = w.gram;
      if (g.rows() != n || g.cols() != n) raise(errc::dimension_mismatch, "gram size mismatch");
      if (!m.ctx()->char2()) raise(errc::wrong_characteristic, "nonalternate witnesses are a characteristic-2 notion");
      bool diag = false;
      for (int i = 0; i < n; ++i)
        if (!g.at(i, i).is_zero()) diag = true;
      return diag && g.is_symmetric() && g.rank() == n && (m.transpose() * g * m == g);
    }
    case WitnessKind::quadratic: {
      if (!w.quad) raise(errc::internal, "quadratic witness without a form");
      if (w.quad->dim() != n) raise(errc::dimension_mismatch, "form size mismatch");
      return is_regular(*w.quad) && is_adapted(*w.quad, m);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Brute-force existence oracle

struct OracleResult {
  bool exists = false;
  std::optional<FormWitness> witness;
  std::uint64_t examined = 0;  // flat candidate indices inspected up to the hit
};

namespace detail {

// entries (i, j) with i < j (alternate) or i <= j (symmetric), row-major
inline std::vector<std::pair<int, int>> upper_positions(int n, bool strict) {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = strict ? i + 1 : i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

inline Mat decode_bilinear(const FieldCtxPtr& K, int n, const std::vector<std::pair<int, int>>& pos, bool alternate,
                           std::uint64_t index) {
  const std::uint64_t q = static_cast<std::uint64_t>(K->size());
  Mat g(K, n, n);
  for (const auto& [i, j] : pos) {
    Elt e = K->from_encoding(static_cast<std::int64_t>(index % q));
    index /= q;
    g.at(i, j) = e;
    if (i != j) g.at(j, i) = alternate ? -e : e;
  }
  return g;
}

inline std::uint64_t checked_pow(std::uint64_t q, int f) {
  std::uint64_t total = 1;
  for (int i = 0; i < f; ++i) {
    if (total > (static_cast<std::uint64_t>(1) << 24) / q + 1) raise(errc::search_space_too_large, "oracle search space exceeds 2^24");
    total *= q;
  }
  if (total > (static_cast<std::uint64_t>(1) << 24)) raise(errc::search_space_too_large, "oracle search space exceeds 2^24");
  return total;
}

// Scan [begin, end) of a flat candidate space; returns the first accepted
// index, or nullopt. `test` must be a pure function of the index.
template <typename Test>
std::optional<std::uint64_t> scan_range(std::uint64_t begin, std::uint64_t end, const Test& test) {
  for (std::uint64_t i = begin; i < end; ++i)
    if (test(i)) return i;
  return std::nullopt;
}

// Deterministic parallel first-hit: partition into contiguous chunks, take
// the least accepted index.
template <typename Test>
std::optional<std::uint64_t> first_hit(std::uint64_t total, const Test& test) {
  const std::uint64_t parallel_threshold = 1u << 15;
  unsigned hw = std::thread::hardware_concurrency();
  if (total < parallel_threshold || hw < 2) return scan_range<Test>(0, total, test);
  unsigned workers = hw;
  std::vector<std::optional<std::uint64_t>> hits(workers);
  std::vector<std::thread> threads;
  std::uint64_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::uint64_t b = w * chunk;
    std::uint64_t e = std::min(total, b + chunk);
    if (b >= e) break;
    threads.emplace_back([&, w, b, e] { hits[w] = scan_range<Test>(b, e, test); });
  }
  for (auto& t : threads) t.join();
  std::optional<std::uint64_t> best;
  for (const auto& h : hits)
    if (h && (!best || *h < *best)) best = h;
  return best;
}

}  // namespace detail

// Exhaustive enumeration of candidate grams in row-major entry order with
// element encodings ascending; the first passing candidate is returned.
// The quadratic search is factored: alternate polar candidates (checked for
// invariance and nonsingularity) times all diagonals.
inline OracleResult brute_force_oracle(const Mat& m, WitnessKind kind, std::optional<int> arf_filter = std::nullopt) {
  if (!m.is_square()) raise(errc::dimension_mismatch, "oracle requires a square matrix");
  const FieldCtxPtr& K = m.ctx();
  const int n = m.rows();
  const std::uint64_t q = static_cast<std::uint64_t>(K->size());
  if (kind == WitnessKind::quadratic && !K->char2()) kind = WitnessKind::symmetric;

  OracleResult res;
  if (kind == WitnessKind::quadratic) {
    auto pos = detail::upper_positions(n, /*strict=*/true);
    int f = static_cast<int>(pos.size()) + n;
    std::uint64_t total = detail::checked_pow(q, f);
    std::uint64_t diag_space = 1;
    for (int i = 0; i < n; ++i) diag_space *= q;
    std::uint64_t polar_space = total / diag_space;

    std::optional<std::uint64_t> hit;
    for (std::uint64_t s = 0; s < polar_space && !hit; ++s) {
      Mat polar_cand = detail::decode_bilinear(K, n, pos, /*alternate=*/true, s);
      if (polar_cand.rank() != n) continue;
      if (m.transpose() * polar_cand * m != polar_cand) continue;
      auto test = [&](std::uint64_t d) {
        Mat gram(K, n, n);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) gram.at(i, j) = polar_cand.at(i, j);
        std::uint64_t rest = d;
        for (int i = 0; i < n; ++i) {
          gram.at(i, i) = K->from_encoding(static_cast<std::int64_t>(rest % q));
          rest /= q;
        }
        QuadForm qf(std::move(gram));
        if (!is_adapted(qf, m)) return false;
        if (arf_filter && arf(qf).bit != *arf_filter) return false;
        return true;
      };
      auto dhit = detail::first_hit(diag_space, test);
      if (dhit) hit = s * diag_space + *dhit;
    }
    if (hit) {
      std::uint64_t s = *hit / diag_space, d = *hit % diag_space;
      Mat polar_cand = detail::decode_bilinear(K, n, pos, true, s);
      Mat gram(K, n, n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) gram.at(i, j) = polar_cand.at(i, j);
      for (int i = 0; i < n; ++i) {
        gram.at(i, i) = K->from_encoding(static_cast<std::int64_t>(d % q));
        d /= q;
      }
      res.exists = true;
      FormWitness w;
      w.kind = WitnessKind::quadratic;
      w.quad = QuadForm(std::move(gram));
      w.arf = arf(*w.quad);
      res.witness = std::move(w);
      res.examined = *hit + 1;
    } else {
      res.examined = total;
    }
    return res;
  }

  const bool alternate = (kind == WitnessKind::symplectic);
  auto pos = detail::upper_positions(n, /*strict=*/alternate);
  std::uint64_t total = detail::checked_pow(q, static_cast<int>(pos.size()));
  auto test = [&](std::uint64_t idx) {
    Mat g = detail::decode_bilinear(K, n, pos, alternate, idx);
    if (kind == WitnessKind::symmetric_nonalternate) {
      bool diag = false;
      for (int i = 0; i < n; ++i)
        if (!g.at(i, i).is_zero()) diag = true;
      if (!diag) return false;
    }
    if (g.rank() != n) return false;
    return m.transpose() * g * m == g;
  };
  auto hit = detail::first_hit(total, test);
  if (hit) {
    res.exists = true;
    FormWitness w;
    w.kind = kind;
    w.gram = detail::decode_bilinear(K, n, pos, alternate, *hit);
    res.witness = std::move(w);
    res.examined = *hit + 1;
  } else {
    res.examined = total;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Structural property suites

// Ker P(M) = (im P#(M))^perp for the witness's bilinear form (the polar form
// for quadratic witnesses): exact subspace equality.
inline bool kernel_orthogonality_suite(const Mat& m, const FormWitness& w, const Poly& p) {
  if (!check(m, w)) return false;
  Mat g = (w.kind == WitnessKind::quadratic) ? polar(*w.quad) : w.gram;
  Poly prec = reciprocal(p);  // validates monic, valuation 0
  Mat pm = apply_poly(p, m);
  Mat precm = apply_poly(prec, m);
  const int n = m.rows();
  // (im Y)^perp = Ker(Y^T G)
  Mat ytg = precm.transpose() * g;
  if (n - pm.rank() != n - ytg.rank()) return false;
  for (const auto& k : kernel_basis(pm)) {
    std::vector<Elt> img = ytg.mul_vec(k);
    for (const Elt& e : img)
      if (!e.is_zero()) return false;
  }
  return true;
}

// Jordan parity constraints for an isometry with unipotent matrix: the
// case-appropriate sizes have even multiplicity.
inline bool parity_suite(const Mat& m, const FormWitness& w) {
  if (!check(m, w)) return false;
  const int n = m.rows();
  Mat u = m - Mat::identity(m.ctx(), n);
  if (u.pow(n).rank() != 0) raise(errc::not_unipotent, "parity suite requires a unipotent matrix");
  auto mult = detail::jordan_multiplicities(m, m.ctx()->one());
  const bool char2 = m.ctx()->char2();
  for (const auto& [size, count] : mult) {
    bool constrained = false;
    switch (w.kind) {
      case WitnessKind::symplectic:
      case WitnessKind::quadratic:
        constrained = (size % 2 == 1);
        break;
      case WitnessKind::symmetric:
      case WitnessKind::symmetric_nonalternate:
        constrained = char2 ? (size % 2 == 1 && size >= 3) : (size % 2 == 0);
        break;
    }
    if (constrained && count % 2 != 0) return false;
  }
  return true;
}

}  // namespace isoform
