// isoform: decide whether an invertible matrix over a finite field preserves
// a symplectic, symmetric bilinear, nonalternate symmetric, or quadratic
// form; construct and verify explicit witnesses; classify Arf invariants.
//
// Exit codes: 0 yes/ok, 1 no, 2 parse or input error, 3 Arf target
// unreachable, 4 oracle search space too large.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isoform/isoform.hpp"

namespace {

using namespace isoform;

WitnessKind parse_kind(const std::string& s) {
  if (s == "symplectic") return WitnessKind::symplectic;
  if (s == "symmetric") return WitnessKind::symmetric;
  if (s == "nonalternate") return WitnessKind::symmetric_nonalternate;
  if (s == "quadratic") return WitnessKind::quadratic;
  raise(errc::parse_error, "unknown form kind '" + s + "'");
}

FormKind to_form_kind(WitnessKind k) {
  switch (k) {
    case WitnessKind::symplectic: return FormKind::symplectic;
    case WitnessKind::symmetric: return FormKind::bilin_orthogonal;
    case WitnessKind::symmetric_nonalternate: return FormKind::nonalternate_orthogonal;
    case WitnessKind::quadratic: return FormKind::orthogonal;
  }
  return FormKind::symplectic;
}

Mat load_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::parse_error, "line 0: cannot open '" + path + "'");
  return io::load_matrix(in);
}

void print_factor_line(std::ostream& os, const Poly& q, std::int64_t e) {
  os << '(' << q << ")^" << e;
}

void print_report(std::ostream& os, const StructureReport& rep) {
  os << "factors:";
  for (const auto& [q, e] : rep.elementary) {
    os << ' ';
    print_factor_line(os, q, e);
  }
  os << '\n';
  os << "jordan@1:";
  for (const auto& [size, count] : rep.jordan_plus) os << ' ' << size << ':' << count;
  os << '\n';
  os << "jordan@-1:";
  for (const auto& [size, count] : rep.jordan_minus) os << ' ' << size << ':' << count;
  os << '\n';
}

int cmd_classify(const std::string& path, const std::string& kind) {
  Mat a = load_matrix_file(path);
  StructureReport rep = structure_report(a);
  Verdict v = classify(rep, to_form_kind(parse_kind(kind)));
  std::cout << (v.yes ? "yes" : "no") << '\n';
  std::cout << "certificate: " << v.certificate() << '\n';
  print_report(std::cout, rep);
  return v.yes ? 0 : 1;
}

int cmd_witness(const std::string& path, const std::string& kind, std::optional<int> arf_target,
                const std::string& out_path) {
  Mat a = load_matrix_file(path);
  WitnessKind wk = parse_kind(kind);
  FormWitness w;
  try {
    w = assemble_witness(a, wk, arf_target);
  } catch (const Error& e) {
    if (e.code() == errc::not_classified_yes) {
      std::cout << "no\n";
      std::cerr << e.what() << '\n';
      return 1;
    }
    if (e.code() == errc::arf_unreachable) {
      std::cout << "arf-unreachable\n";
      std::cerr << e.what() << '\n';
      return 3;
    }
    throw;
  }
  if (out_path.empty()) {
    io::write_witness(std::cout, w);
  } else {
    std::ofstream out(out_path);
    if (!out) raise(errc::parse_error, "line 0: cannot open '" + out_path + "'");
    io::write_witness(out, w);
    std::cout << "ok\n";
  }
  return 0;
}

int cmd_verify(const std::string& matrix_path, const std::string& witness_path) {
  Mat a = load_matrix_file(matrix_path);
  std::ifstream win(witness_path);
  if (!win) raise(errc::parse_error, "line 0: cannot open '" + witness_path + "'");
  FormWitness w = io::load_witness(win);
  bool ok = check(a, w);
  if (ok && w.kind == WitnessKind::quadratic && w.arf) ok = (arf(*w.quad) == *w.arf);
  std::cout << (ok ? "ok" : "fail") << '\n';
  return ok ? 0 : 1;
}

int cmd_arf(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::parse_error, "line 0: cannot open '" + path + "'");
  QuadForm q = io::load_quadform(in);
  std::cout << arf(q).bit << '\n';
  return 0;
}

int cmd_oracle(const std::string& path, const std::string& kind, std::optional<int> arf_filter) {
  Mat a = load_matrix_file(path);
  OracleResult r = brute_force_oracle(a, parse_kind(kind), arf_filter);
  std::cout << (r.exists ? "exists" : "not-exists") << '\n';
  std::cout << "examined: " << r.examined << '\n';
  if (r.exists) io::write_witness(std::cout, *r.witness);
  return r.exists ? 0 : 1;
}

int cmd_factor(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::parse_error, "line 0: cannot open '" + path + "'");
  Poly p = io::load_poly(in);
  if (p.is_zero()) raise(errc::parse_error, "line 0: cannot factor the zero polynomial");
  auto factors = factor(p);
  for (const auto& [q, e] : factors) {
    print_factor_line(std::cout, q, e);
    bool pal = !q.coeff(0).is_zero() && is_palindromial(q);
    std::cout << (pal ? " palindromial" : " non-palindromial") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact form-preservation decisions over finite fields"};
  app.require_subcommand(1);

  std::string matrix_path, witness_path, out_path, kind;
  int arf_flag = -1;

  auto* c_classify = app.add_subcommand("classify", "decide whether any adapted form of the given kind exists");
  c_classify->add_option("matrix", matrix_path)->required();
  c_classify->add_option("--kind", kind, "symplectic|symmetric|quadratic|nonalternate")->required();

  auto* c_witness = app.add_subcommand("witness", "construct and emit a verified witness form");
  c_witness->add_option("matrix", matrix_path)->required();
  c_witness->add_option("--kind", kind)->required();
  c_witness->add_option("--arf", arf_flag, "target Arf class for quadratic witnesses");
  c_witness->add_option("--out,-o", out_path, "output path (default: stdout)");

  auto* c_verify = app.add_subcommand("verify", "check a witness file against a matrix");
  c_verify->add_option("matrix", matrix_path)->required();
  c_verify->add_option("witness", witness_path)->required();

  auto* c_arf = app.add_subcommand("arf", "Arf invariant of a regular quadratic form");
  c_arf->add_option("quadform", matrix_path)->required();

  auto* c_oracle = app.add_subcommand("oracle", "exhaustive existence search (small instances)");
  c_oracle->add_option("matrix", matrix_path)->required();
  c_oracle->add_option("--kind", kind)->required();
  c_oracle->add_option("--arf", arf_flag, "restrict to the given Arf class");

  auto* c_factor = app.add_subcommand("factor", "factor a polynomial and flag palindromial factors");
  c_factor->add_option("poly", matrix_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "line 0: " << e.what() << '\n';
    return 2;
  }

  std::optional<int> arf_opt;
  if (arf_flag == 0 || arf_flag == 1) arf_opt = arf_flag;

  try {
    if (app.got_subcommand(c_classify)) return cmd_classify(matrix_path, kind);
    if (app.got_subcommand(c_witness)) return cmd_witness(matrix_path, kind, arf_opt, out_path);
    if (app.got_subcommand(c_verify)) return cmd_verify(matrix_path, witness_path);
    if (app.got_subcommand(c_arf)) return cmd_arf(matrix_path);
    if (app.got_subcommand(c_oracle)) return cmd_oracle(matrix_path, kind, arf_opt);
    if (app.got_subcommand(c_factor)) return cmd_factor(matrix_path);
  } catch (const isoform::Error& e) {
    switch (e.code()) {
      case isoform::errc::search_space_too_large:
        std::cerr << e.what() << '\n';
        return 4;
      case isoform::errc::arf_unreachable:
        std::cerr << e.what() << '\n';
        return 3;
      default:
        std::cerr << e.what() << '\n';
        return 2;
    }
  }
  return 2;
}
