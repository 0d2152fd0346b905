#pragma once

// Decision procedures: does an invertible matrix preserve some symplectic
// form, regular symmetric bilinear form, regular quadratic form, or regular
// nonalternate symmetric bilinear form? Decided purely from the structure
// report, with certificates either way.

#include <cstdint>
#include <optional>
#include <string>

#include "isoform/matrix.hpp"

namespace isoform {

enum class FormKind {
  symplectic,
  bilin_orthogonal,          // regular symmetric bilinear form
  orthogonal,                // regular quadratic form
  nonalternate_orthogonal,   // regular nonalternate symmetric bilinear form (char 2)
};

inline const char* form_kind_name(FormKind k) {
  switch (k) {
    case FormKind::symplectic: return "symplectic";
    case FormKind::bilin_orthogonal: return "symmetric";
    case FormKind::orthogonal: return "quadratic";
    case FormKind::nonalternate_orthogonal: return "nonalternate";
  }
  return "?";
}

struct Verdict {
  enum class Violation { none, not_similar_to_inverse, parity_violation, missing_eigenvalue_1, odd_dimension };

  FormKind kind = FormKind::symplectic;
  bool yes = false;
  // yes: the (v)-style decomposition of the elementary factors
  std::vector<std::pair<int, int>> pair_indices;
  std::vector<int> single_indices;
  // no: the violated condition; for parity violations the smallest violated
  // (eigenvalue, block size) pair, eigenvalue 1 before -1, size ascending
  Violation violation = Violation::none;
  std::int64_t eigenvalue_enc = 0;
  int block_size = 0;

  std::string certificate() const {
    switch (violation) {
      case Violation::none: {
        std::string s = "pair-decomposition pairs=[";
        for (std::size_t i = 0; i < pair_indices.size(); ++i) {
          if (i) s += ",";
          s += "(" + std::to_string(pair_indices[i].first) + "," + std::to_string(pair_indices[i].second) + ")";
        }
        s += "] singles=[";
        for (std::size_t i = 0; i < single_indices.size(); ++i) {
          if (i) s += ",";
          s += std::to_string(single_indices[i]);
        }
        return s + "]";
      }
      case Violation::not_similar_to_inverse: return "not-similar-to-inverse";
      case Violation::parity_violation:
        return "parity-violation eigenvalue=" + std::to_string(eigenvalue_enc) + " size=" + std::to_string(block_size);
      case Violation::missing_eigenvalue_1: return "missing-eigenvalue-1";
      case Violation::odd_dimension: return "odd-dimension";
    }
    return "?";
  }
};

namespace detail {

// First odd (or even) size with odd multiplicity, or 0 when none.
inline int first_parity_violation(const std::map<int, int>& mult, bool odd_sizes, int min_size) {
  for (const auto& [size, count] : mult) {
    if (size < min_size) continue;
    if ((size % 2 == 1) != odd_sizes) continue;
    if (count % 2 != 0) return size;
  }
  return 0;
}

}  // namespace detail

// Decision strictly from the structure report. `dim` and char come from the
// report's canonical matrix.
inline Verdict classify(const StructureReport& rep, FormKind kind) {
  const FieldCtxPtr& K = rep.canonical.ctx();
  const bool char2 = K->char2();
  const int n = rep.canonical.rows();

  Verdict v;
  v.kind = kind;

  // characteristic-dependent delegation
  FormKind effective = kind;
  if (kind == FormKind::orthogonal && char2) effective = FormKind::symplectic;  // the two notions coincide
  if (kind == FormKind::bilin_orthogonal && !char2) effective = FormKind::orthogonal;    // char != 2 collapse
  if (kind == FormKind::nonalternate_orthogonal) {
    if (!char2) raise(errc::wrong_characteristic, "nonalternate classification requires characteristic 2");
    if (n % 2 == 1) effective = FormKind::bilin_orthogonal;  // odd dimension: any regular symmetric form is nonalternate
  }

  if (effective == FormKind::symplectic && n % 2 == 1) {
    v.violation = Verdict::Violation::odd_dimension;
    return v;
  }
  if (kind == FormKind::nonalternate_orthogonal && effective != FormKind::bilin_orthogonal) {
    // even-dimensional: symplectic verdict plus eigenvalue 1
    Verdict base = classify(rep, FormKind::symplectic);
    if (!base.yes) {
      base.kind = kind;
      return base;
    }
    if (!rep.has_eigenvalue_one()) {
      v.violation = Verdict::Violation::missing_eigenvalue_1;
      return v;
    }
    base.kind = kind;
    return base;
  }

  if (!rep.similar_to_inverse) {
    v.violation = Verdict::Violation::not_similar_to_inverse;
    return v;
  }

  // parity conditions on Jordan blocks at the eigenvalues 1 and -1
  struct Check {
    const std::map<int, int>* mult;
    std::int64_t eig_enc;
  };
  std::vector<Check> checks;
  checks.push_back({&rep.jordan_plus, 1});
  if (!char2) checks.push_back({&rep.jordan_minus, (-K->one()).encoding()});

  for (const Check& c : checks) {
    int bad = 0;
    switch (effective) {
      case FormKind::symplectic:
        bad = detail::first_parity_violation(*c.mult, /*odd_sizes=*/true, /*min_size=*/1);
        break;
      case FormKind::bilin_orthogonal:  // char 2, eigenvalue 1 only, sizes 2k+1 with k >= 1
        if (c.eig_enc != 1) continue;
        bad = detail::first_parity_violation(*c.mult, /*odd_sizes=*/true, /*min_size=*/3);
        break;
      case FormKind::orthogonal:  // char != 2: even sizes
        bad = detail::first_parity_violation(*c.mult, /*odd_sizes=*/false, /*min_size=*/2);
        break;
      case FormKind::nonalternate_orthogonal:
        raise(errc::internal, "unreachable");
    }
    if (bad != 0) {
      v.violation = Verdict::Violation::parity_violation;
      v.eigenvalue_enc = c.eig_enc;
      v.block_size = bad;
      return v;
    }
  }

  v.yes = true;
  v.pair_indices = rep.pairs;
  v.single_indices = rep.singles;
  return v;
}

inline Verdict classify(const Mat& a, FormKind kind) { return classify(structure_report(a), kind); }

// ---------------------------------------------------------------------------
// Arf dichotomy (characteristic 2, essentially symplectic matrices)

struct ArfVerdict {
  enum class Case { both_classes, forced_hyperbolic, forced_nonhyperbolic };
  Case which = Case::both_classes;
  // number of elementary factors P^(2a+1) with P an irreducible palindromial
  // of degree > 1
  int odd_power_blocks = 0;
};

inline ArfVerdict arf_dichotomy(const StructureReport& rep) {
  const FieldCtxPtr& K = rep.canonical.ctx();
  if (!K->char2()) raise(errc::wrong_characteristic, "the Arf dichotomy requires characteristic 2");
  if (!classify(rep, FormKind::symplectic).yes)
    raise(errc::not_essentially_symplectic, "the matrix preserves no symplectic form");

  ArfVerdict out;
  for (const auto& [q, e] : rep.elementary)
    if (q.degree() > 1 && is_palindromial(q) && e % 2 == 1) ++out.odd_power_blocks;

  if (rep.has_eigenvalue_one())
    out.which = ArfVerdict::Case::both_classes;
  else
    out.which = (out.odd_power_blocks % 2 == 0) ? ArfVerdict::Case::forced_hyperbolic
                                                : ArfVerdict::Case::forced_nonhyperbolic;
  return out;
}

inline ArfVerdict arf_dichotomy(const Mat& a) { return arf_dichotomy(structure_report(a)); }

}  // namespace isoform
