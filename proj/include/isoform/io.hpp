#pragma once

// Text formats: matrices, quadratic forms, witnesses, polynomials.
// Blank lines and '#' comments are ignored everywhere; diagnostics carry
// line numbers.

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "isoform/witness.hpp"

namespace isoform {
namespace io {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  int no = 0;
  while (std::getline(in, raw)) {
    ++no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    Line l;
    l.number = no;
    std::string tok;
    while (ls >> tok) l.tokens.push_back(tok);
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
  raise(errc::parse_error, "line " + std::to_string(line) + ": " + msg);
}

inline std::int64_t parse_int(const Line& l, std::size_t idx) {
  if (idx >= l.tokens.size()) fail(l.number, "missing value");
  const std::string& t = l.tokens[idx];
  std::size_t pos = 0;
  std::int64_t v = 0;
  try {
    v = std::stoll(t, &pos);
  } catch (...) {
    fail(l.number, "expected an integer, got '" + t + "'");
  }
  if (pos != t.size()) fail(l.number, "expected an integer, got '" + t + "'");
  return v;
}

// `field <p> <k>` with an optional explicit modulus (k+1 coefficients over
// GF(p), low degree first) when k > 1.
inline FieldCtxPtr parse_field_line(const Line& l) {
  if (l.tokens.empty() || l.tokens[0] != "field") fail(l.number, "expected a 'field' line");
  if (l.tokens.size() < 3) fail(l.number, "field line needs p and k");
  std::int64_t p = parse_int(l, 1);
  std::int64_t k = parse_int(l, 2);
  if (p < 2) fail(l.number, "characteristic must be at least 2");
  if (k < 1) fail(l.number, "extension degree must be at least 1");
  std::optional<Poly> modulus;
  if (l.tokens.size() > 3) {
    if (k == 1) fail(l.number, "prime fields take no modulus");
    if (l.tokens.size() != static_cast<std::size_t>(3 + k + 1)) fail(l.number, "modulus needs k+1 coefficients");
    FieldCtxPtr base;
    try {
      base = FieldCtx::prime(p);
    } catch (const Error& e) {
      fail(l.number, e.what());
    }
    std::vector<Elt> coeffs;
    for (std::int64_t i = 0; i <= k; ++i) {
      std::int64_t c = parse_int(l, static_cast<std::size_t>(3 + i));
      if (c < 0 || c >= p) fail(l.number, "modulus coefficient out of range");
      coeffs.push_back(base->scalar(c));
    }
    modulus = Poly(base, std::move(coeffs));
    if (modulus->degree() != k) fail(l.number, "modulus must have degree k");
  }
  try {
    return make_field(p, k, modulus);
  } catch (const Error& e) {
    fail(l.number, e.what());
  }
}

inline Elt parse_element(const FieldCtxPtr& K, const Line& l, std::size_t idx) {
  std::int64_t enc = parse_int(l, idx);
  if (enc < 0 || enc >= K->size()) fail(l.number, "element encoding out of range");
  return K->from_encoding(enc);
}

inline Mat parse_matrix_body(const std::vector<Line>& lines, std::size_t& cursor, const FieldCtxPtr& K) {
  if (cursor >= lines.size()) raise(errc::parse_error, "line 0: missing 'size' line");
  const Line& sz = lines[cursor];
  if (sz.tokens[0] != "size" || sz.tokens.size() != 3) fail(sz.number, "expected 'size <rows> <cols>'");
  std::int64_t rows = parse_int(sz, 1);
  std::int64_t cols = parse_int(sz, 2);
  if (rows < 1 || cols < 1 || rows > kMaxDim || cols > kMaxDim) fail(sz.number, "matrix dimensions out of range");
  ++cursor;
  Mat m(K, static_cast<int>(rows), static_cast<int>(cols));
  for (int i = 0; i < rows; ++i) {
    if (cursor >= lines.size()) fail(sz.number, "matrix body ended early");
    const Line& row = lines[cursor];
    if (row.tokens.size() != static_cast<std::size_t>(cols)) fail(row.number, "expected " + std::to_string(cols) + " entries");
    for (int j = 0; j < cols; ++j) m.at(i, j) = parse_element(K, row, static_cast<std::size_t>(j));
    ++cursor;
  }
  return m;
}

inline Mat load_matrix(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) raise(errc::parse_error, "line 0: empty input");
  std::size_t cursor = 0;
  FieldCtxPtr K = parse_field_line(lines[cursor++]);
  Mat m = parse_matrix_body(lines, cursor, K);
  if (cursor != lines.size()) fail(lines[cursor].number, "trailing content");
  return m;
}

inline QuadForm load_quadform(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) raise(errc::parse_error, "line 0: empty input");
  std::size_t cursor = 0;
  FieldCtxPtr K = parse_field_line(lines[cursor++]);
  if (cursor >= lines.size() || lines[cursor].tokens[0] != "quadform")
    fail(cursor < lines.size() ? lines[cursor].number : 0, "expected a 'quadform' line");
  ++cursor;
  Mat m = parse_matrix_body(lines, cursor, K);
  if (cursor != lines.size()) fail(lines[cursor].number, "trailing content");
  if (!m.is_square()) raise(errc::parse_error, "line 0: quadratic form gram must be square");
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < i; ++j)
      if (!m.at(i, j).is_zero())
        raise(errc::parse_error, "line 0: quadratic form gram must be upper triangular");
  if (!K->char2()) raise(errc::parse_error, "line 0: quadratic form files require characteristic 2");
  return QuadForm(std::move(m));
}

inline Poly load_poly(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) raise(errc::parse_error, "line 0: empty input");
  std::size_t cursor = 0;
  FieldCtxPtr K = parse_field_line(lines[cursor++]);
  if (cursor >= lines.size()) raise(errc::parse_error, "line 0: missing coefficient line");
  const Line& cl = lines[cursor++];
  std::vector<Elt> coeffs;
  for (std::size_t i = 0; i < cl.tokens.size(); ++i) coeffs.push_back(parse_element(K, cl, i));
  if (cursor != lines.size()) fail(lines[cursor].number, "trailing content");
  return Poly(K, std::move(coeffs));
}

inline FormWitness load_witness(std::istream& in) {
  auto lines = tokenize(in);
  if (lines.empty()) raise(errc::parse_error, "line 0: empty input");
  std::size_t cursor = 0;
  const Line& head = lines[cursor];
  if (head.tokens[0] != "witness" || head.tokens.size() < 2) fail(head.number, "expected 'witness <kind> [arf <0|1>]'");
  FormWitness w;
  const std::string& kind = head.tokens[1];
  if (kind == "symplectic")
    w.kind = WitnessKind::symplectic;
  else if (kind == "symmetric")
    w.kind = WitnessKind::symmetric;
  else if (kind == "nonalternate")
    w.kind = WitnessKind::symmetric_nonalternate;
  else if (kind == "quadratic")
    w.kind = WitnessKind::quadratic;
  else
    fail(head.number, "unknown witness kind '" + kind + "'");
  if (head.tokens.size() > 2) {
    if (head.tokens[2] != "arf" || head.tokens.size() != 4) fail(head.number, "expected 'arf <0|1>'");
    std::int64_t bit = parse_int(head, 3);
    if (bit != 0 && bit != 1) fail(head.number, "arf class must be 0 or 1");
    w.arf = ArfClass{static_cast<int>(bit)};
  }
  ++cursor;
  FieldCtxPtr K = parse_field_line(lines[cursor++]);
  Mat m = parse_matrix_body(lines, cursor, K);
  if (cursor != lines.size()) fail(lines[cursor].number, "trailing content");
  if (w.kind == WitnessKind::quadratic) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < i; ++j)
        if (!m.at(i, j).is_zero())
          raise(errc::parse_error, "line 0: quadratic witness gram must be upper triangular");
    w.quad = QuadForm(std::move(m));
  } else {
    w.gram = std::move(m);
  }
  return w;
}

// -------------------------------------------------------------------------
// Writers (bit-exact, deterministic)

inline void write_field_line(std::ostream& os, const FieldCtxPtr& K) {
  os << "field " << K->characteristic() << ' ' << K->absolute_degree();
  if (K->absolute_degree() > 1) {
    if (!K->base()->is_prime_field()) raise(errc::internal, "file formats carry single extensions of the prime field only");
    for (const Elt& c : K->modulus()) os << ' ' << c.encoding();
  }
  os << '\n';
}

inline void write_matrix_body(std::ostream& os, const Mat& m) {
  os << "size " << m.rows() << ' ' << m.cols() << '\n';
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << m.at(i, j).encoding();
    }
    os << '\n';
  }
}

inline void write_matrix(std::ostream& os, const Mat& m) {
  write_field_line(os, m.ctx());
  write_matrix_body(os, m);
}

inline void write_quadform(std::ostream& os, const QuadForm& q) {
  write_field_line(os, q.ctx());
  os << "quadform\n";
  write_matrix_body(os, q.gram());
}

inline void write_witness(std::ostream& os, const FormWitness& w) {
  os << "witness " << witness_kind_name(w.kind);
  if (w.kind == WitnessKind::quadratic && w.arf) os << " arf " << w.arf->bit;
  os << '\n';
  const Mat& g = (w.kind == WitnessKind::quadratic) ? w.quad->gram() : w.gram;
  write_field_line(os, g.ctx());
  write_matrix_body(os, g);
}

}  // namespace io
}  // namespace isoform
