#include <doctest.h>

#include <random>

#include "isoform/isoform.hpp"

using namespace isoform;

namespace {

FormWitness bilinear_witness(WitnessKind kind, Mat gram) {
  FormWitness w;
  w.kind = kind;
  w.gram = std::move(gram);
  return w;
}

std::vector<Mat> enumerate_gl(const FieldCtxPtr& K, int n) {
  std::vector<Mat> out;
  std::int64_t total = 1;
  for (int i = 0; i < n * n; ++i) total *= K->size();
  for (std::int64_t idx = 0; idx < total; ++idx) {
    Mat m(K, n, n);
    std::int64_t rest = idx;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        m.at(i, j) = K->from_encoding(rest % K->size());
        rest /= K->size();
      }
    if (m.rank() == n) out.push_back(std::move(m));
  }
  return out;
}

}  // namespace

TEST_CASE("check: fixed examples") {
  auto F2 = make_field(2, 1);
  Mat j2 = jordan(F2, 2, F2->one());
  CHECK(check(j2, bilinear_witness(WitnessKind::symplectic, Mat::from_ints(F2, {{0, 1}, {1, 0}}))));
  CHECK(check(j2, bilinear_witness(WitnessKind::symmetric_nonalternate, Mat::from_ints(F2, {{0, 1}, {1, 1}}))));
  CHECK(check(Mat::identity(F2, 2), bilinear_witness(WitnessKind::symmetric, Mat::from_ints(F2, {{1, 0}, {0, 1}}))));

  // shape violations are rejected
  CHECK(!check(j2, bilinear_witness(WitnessKind::symplectic, Mat::from_ints(F2, {{0, 1}, {1, 1}}))));
  CHECK(!check(j2, bilinear_witness(WitnessKind::symmetric, Mat::from_ints(F2, {{0, 1}, {0, 0}}))));
}

TEST_CASE("brute-force oracle: fixed examples") {
  auto F2 = make_field(2, 1);
  Mat j2 = jordan(F2, 2, F2->one());
  OracleResult r = brute_force_oracle(j2, WitnessKind::symplectic);
  REQUIRE(r.exists);
  CHECK(r.witness->gram == Mat::from_ints(F2, {{0, 1}, {1, 0}}));
  CHECK(r.examined == 2);

  auto F5 = make_field(5, 1);
  Poly xm2(F5, {F5->scalar(-2), F5->one()});
  OracleResult r2 = brute_force_oracle(companion(xm2 * xm2), WitnessKind::symplectic);
  CHECK(!r2.exists);
  CHECK(r2.examined == 5);

  Poly p(F2, {F2->one(), F2->one(), F2->one()});
  OracleResult r3 = brute_force_oracle(companion(p), WitnessKind::quadratic, 0);
  CHECK(!r3.exists);
  OracleResult r4 = brute_force_oracle(companion(p), WitnessKind::quadratic, 1);
  REQUIRE(r4.exists);
  CHECK(arf(*r4.witness->quad).bit == 1);
  CHECK(check(companion(p), *r4.witness));
}

TEST_CASE("oracle search space cap") {
  auto F7 = make_field(7, 1);
  try {
    brute_force_oracle(Mat::identity(F7, 7), WitnessKind::symmetric);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::search_space_too_large);
  }
}

TEST_CASE("oracle agrees with the classifier on all of GL_2(GF(2)) and GL_2(GF(3))") {
  auto F2 = make_field(2, 1);
  auto gl2 = enumerate_gl(F2, 2);
  CHECK(gl2.size() == 6);
  for (const Mat& m : gl2) {
    auto rep = structure_report(m);
    CHECK(brute_force_oracle(m, WitnessKind::symplectic).exists == classify(rep, FormKind::symplectic).yes);
    CHECK(brute_force_oracle(m, WitnessKind::symmetric).exists == classify(rep, FormKind::bilin_orthogonal).yes);
    CHECK(brute_force_oracle(m, WitnessKind::quadratic).exists == classify(rep, FormKind::orthogonal).yes);
    CHECK(brute_force_oracle(m, WitnessKind::symmetric_nonalternate).exists ==
          classify(rep, FormKind::nonalternate_orthogonal).yes);
  }

  auto F3 = make_field(3, 1);
  for (const Mat& m : enumerate_gl(F3, 2)) {
    auto rep = structure_report(m);
    CHECK(brute_force_oracle(m, WitnessKind::symplectic).exists == classify(rep, FormKind::symplectic).yes);
    CHECK(brute_force_oracle(m, WitnessKind::symmetric).exists == classify(rep, FormKind::bilin_orthogonal).yes);
  }
}

TEST_CASE("the oracle never finds a witness when the matrix is not similar to its inverse") {
  auto F5 = make_field(5, 1);
  Mat a = Mat::from_ints(F5, {{2, 0}, {0, 2}});
  CHECK(!brute_force_oracle(a, WitnessKind::symplectic).exists);
  CHECK(!brute_force_oracle(a, WitnessKind::symmetric).exists);
  auto F4 = make_field(2, 2);
  Mat b(F4, 1, 1);
  b.at(0, 0) = F4->generator();
  CHECK(!brute_force_oracle(b, WitnessKind::symmetric).exists);
}

TEST_CASE("kernel orthogonality suite") {
  auto F3 = make_field(3, 1);
  Mat j3 = jordan(F3, 3, F3->one());
  FormWitness w = assemble_witness(j3, WitnessKind::symmetric);
  REQUIRE(check(j3, w));

  Poly xm1(F3, {-F3->one(), F3->one()});
  CHECK(kernel_orthogonality_suite(j3, w, xm1));
  // P coprime to the characteristic polynomial: trivial kernel vs full image
  Poly xm2(F3, {F3->scalar(-2), F3->one()});
  CHECK(kernel_orthogonality_suite(j3, w, xm2));
  // P = characteristic polynomial: everything vs zero
  Poly charpoly = xm1 * xm1 * xm1;
  CHECK(kernel_orthogonality_suite(j3, w, charpoly));

  // and on a quadratic witness through the polar form
  auto F2 = make_field(2, 1);
  Poly p(F2, {F2->one(), F2->one(), F2->one()});
  Mat a = direct_sum({jordan(F2, 2, F2->one()), companion(p)});
  FormWitness q = assemble_witness(a, WitnessKind::quadratic);
  Poly xp1(F2, {F2->one(), F2->one()});
  CHECK(kernel_orthogonality_suite(a, q, xp1));
  CHECK(kernel_orthogonality_suite(a, q, p));
}

TEST_CASE("parity suite") {
  auto F2 = make_field(2, 1);
  Mat j2j2 = direct_sum({jordan(F2, 2, F2->one()), jordan(F2, 2, F2->one())});
  FormWitness w = assemble_witness(j2j2, WitnessKind::symplectic);
  CHECK(parity_suite(j2j2, w));

  Mat j3j3 = direct_sum({jordan(F2, 3, F2->one()), jordan(F2, 3, F2->one())});
  FormWitness na = assemble_witness(j3j3, WitnessKind::symmetric_nonalternate);
  CHECK(parity_suite(j3j3, na));

  auto F3 = make_field(3, 1);
  Mat j3 = jordan(F3, 3, F3->one());
  FormWitness s = assemble_witness(j3, WitnessKind::symmetric);
  CHECK(parity_suite(j3, s));  // a single size-3 block is permitted away from char 2

  // non-unipotent input errors
  auto F7 = make_field(7, 1);
  Mat d = Mat::from_ints(F7, {{2, 0}, {0, 4}});
  FormWitness k = assemble_witness(d, WitnessKind::symplectic);
  try {
    parity_suite(d, k);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::not_unipotent);
  }
}

TEST_CASE("oracle/classifier agreement on sampled matrices over GF(4) and GF(5)") {
  std::mt19937_64 rng(113);
  auto sample = [&](const FieldCtxPtr& K, int n) {
    Mat m(K, n, n);
    do {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = K->from_encoding(static_cast<std::int64_t>(rng() % K->size()));
    } while (m.rank() != n);
    return m;
  };
  auto F4 = make_field(2, 2);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 12; ++trial) {
      Mat m = sample(F4, n);
      auto rep = structure_report(m);
      CHECK(brute_force_oracle(m, WitnessKind::symplectic).exists == classify(rep, FormKind::symplectic).yes);
      CHECK(brute_force_oracle(m, WitnessKind::quadratic).exists == classify(rep, FormKind::orthogonal).yes);
      CHECK(brute_force_oracle(m, WitnessKind::symmetric_nonalternate).exists ==
            classify(rep, FormKind::nonalternate_orthogonal).yes);
    }
  }
  auto F5 = make_field(5, 1);
  for (int n : {2, 3}) {
    for (int trial = 0; trial < 12; ++trial) {
      Mat m = sample(F5, n);
      auto rep = structure_report(m);
      CHECK(brute_force_oracle(m, WitnessKind::symplectic).exists == classify(rep, FormKind::symplectic).yes);
      CHECK(brute_force_oracle(m, WitnessKind::symmetric).exists == classify(rep, FormKind::bilin_orthogonal).yes);
    }
  }
}

TEST_CASE("deterministic parallel scan matches the serial order") {
  // large enough space to engage the parallel path: symmetric 5x5 over GF(2)
  // has 2^15 candidates
  auto F2 = make_field(2, 1);
  Mat a = direct_sum({jordan(F2, 2, F2->one()), jordan(F2, 2, F2->one()), jordan(F2, 1, F2->one())});
  OracleResult r1 = brute_force_oracle(a, WitnessKind::symmetric);
  OracleResult r2 = brute_force_oracle(a, WitnessKind::symmetric);
  REQUIRE(r1.exists);
  REQUIRE(r2.exists);
  CHECK(r1.witness->gram == r2.witness->gram);
  CHECK(r1.examined == r2.examined);
  CHECK(check(a, *r1.witness));
}
