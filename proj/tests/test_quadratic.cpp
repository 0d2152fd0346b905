#include <doctest.h>

#include <random>

#include "isoform/isoform.hpp"

using namespace isoform;

namespace {

QuadForm qf(const FieldCtxPtr& K, const std::vector<std::vector<std::int64_t>>& rows) {
  return QuadForm(Mat::from_ints(K, rows));
}

std::vector<Elt> vec(const FieldCtxPtr& K, const std::vector<std::int64_t>& v) {
  std::vector<Elt> out;
  for (auto x : v) out.push_back(K->scalar(x));
  return out;
}

}  // namespace

TEST_CASE("polar form") {
  auto F2 = make_field(2, 1);
  CHECK(polar(qf(F2, {{1, 1}, {0, 1}})) == Mat::from_ints(F2, {{0, 1}, {1, 0}}));
  CHECK(polar(qf(F2, {{0, 1}, {0, 0}})) == Mat::from_ints(F2, {{0, 1}, {1, 0}}));
  CHECK(polar(qf(F2, {{1, 0}, {0, 1}})) == Mat(F2, 2, 2));
}

TEST_CASE("regularity") {
  auto F2 = make_field(2, 1);
  CHECK(is_regular(qf(F2, {{1, 1}, {0, 1}})));
  CHECK(!is_regular(qf(F2, {{1, 0}, {0, 1}})));
  CHECK(!is_regular(qf(F2, {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}})));  // odd dimension
}

TEST_CASE("Arf invariants of the basic planes") {
  auto F2 = make_field(2, 1);
  CHECK(arf(qf(F2, {{0, 1}, {0, 0}})).bit == 0);  // hyperbolic xy
  CHECK(arf(qf(F2, {{1, 1}, {0, 1}})).bit == 1);  // x^2+xy+y^2

  auto F4 = make_field(2, 2);
  Mat g(F4, 2, 2);
  g.at(0, 0) = F4->one();
  g.at(0, 1) = F4->one();
  g.at(1, 1) = F4->generator();
  CHECK(arf(QuadForm(std::move(g))).bit == 1);  // t is outside P(GF(4)) = {0,1}

  try {
    arf(qf(F2, {{1, 0}, {0, 1}}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate);
  }
}

TEST_CASE("orthogonal sums and Arf additivity") {
  auto F2 = make_field(2, 1);
  QuadForm nonhyp = qf(F2, {{1, 1}, {0, 1}});
  CHECK(arf(orthogonal_sum(nonhyp, nonhyp)).bit == 0);
  QuadForm mixed = orthogonal_sum(qf(F2, {{1, 1}, {0, 0}}), nonhyp);
  CHECK(arf(mixed).bit == 1);  // 0 + 1

  std::mt19937_64 rng(71);
  QuadForm hyper = qf(F2, {{0, 1}, {0, 0}});
  for (int trial = 0; trial < 10; ++trial) {
    Mat g(F2, 2, 2);
    g.at(0, 1) = F2->one();
    g.at(0, 0) = F2->scalar(static_cast<std::int64_t>(rng() & 1));
    g.at(1, 1) = F2->scalar(static_cast<std::int64_t>(rng() & 1));
    QuadForm q(std::move(g));
    CHECK(arf(orthogonal_sum(q, hyper)).bit == arf(q).bit);
  }

  try {
    orthogonal_sum(nonhyp, qf(make_field(2, 2), {{1, 1}, {0, 1}}));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::field_mismatch);
  }
}

TEST_CASE("adaptedness examples") {
  auto F2 = make_field(2, 1);
  QuadForm norm = qf(F2, {{1, 1}, {0, 1}});
  Poly p(F2, {F2->one(), F2->one(), F2->one()});
  CHECK(is_adapted(norm, companion(p)));

  QuadForm hyp = qf(F2, {{0, 1}, {0, 0}});
  CHECK(!is_adapted(hyp, jordan(F2, 2, F2->one())));

  QuadForm x2xy = qf(F2, {{1, 1}, {0, 0}});
  CHECK(is_adapted(x2xy, jordan(F2, 2, F2->one())));
}

TEST_CASE("Arf is invariant under congruence") {
  std::mt19937_64 rng(73);
  for (const auto& K : {make_field(2, 1), make_field(2, 2)}) {
    for (int dim : {2, 4}) {
      for (int trial = 0; trial < 12; ++trial) {
        // random regular form
        Mat g(K, dim, dim);
        for (int i = 0; i < dim; ++i)
          for (int j = i; j < dim; ++j) g.at(i, j) = K->from_encoding(static_cast<std::int64_t>(rng() % K->size()));
        QuadForm q(g);
        if (!is_regular(q)) continue;
        Mat c(K, dim, dim);
        do {
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) c.at(i, j) = K->from_encoding(static_cast<std::int64_t>(rng() % K->size()));
        } while (c.rank() != dim);
        QuadForm moved = QuadForm::fold(c.transpose() * q.gram() * c);
        CHECK(arf(moved) == arf(q));
      }
    }
  }
}

TEST_CASE("adding an alternate matrix to the gram leaves the form pointwise unchanged") {
  for (const auto& K : {make_field(2, 1), make_field(2, 2)}) {
    const int dim = 3;
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 6; ++trial) {
      Mat g(K, dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) g.at(i, j) = K->from_encoding(static_cast<std::int64_t>(rng() % K->size()));
      QuadForm q(g);
      Mat alt(K, dim, dim);
      for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j) {
          Elt v = K->from_encoding(static_cast<std::int64_t>(rng() % K->size()));
          alt.at(i, j) = v;
          alt.at(j, i) = v;  // char 2: symmetric zero-diagonal = alternate
        }
      QuadForm shifted = QuadForm::fold(q.gram() + alt);
      // exhaustive evaluation
      std::int64_t total = 1;
      for (int i = 0; i < dim; ++i) total *= K->size();
      for (std::int64_t idx = 0; idx < total; ++idx) {
        std::vector<Elt> x;
        std::int64_t rest = idx;
        for (int i = 0; i < dim; ++i) {
          x.push_back(K->from_encoding(rest % K->size()));
          rest /= K->size();
        }
        CHECK(q.eval(x) == shifted.eval(x));
      }
    }
  }
}

TEST_CASE("q vanishes on totally singular stable subspaces where M - I is invertible") {
  // pair-block instance with no eigenvalue 1, conjugated randomly
  auto F2 = make_field(2, 1);
  Poly p(F2, {F2->one(), F2->one(), F2->one()});
  Mat b = companion(p);
  Mat m0 = pair_block_matrix(b);
  FormWitness w0 = pair_block_form(b, WitnessKind::quadratic);
  std::mt19937_64 rng(83);
  for (int trial = 0; trial < 5; ++trial) {
    Mat t(F2, 4, 4);
    do {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t.at(i, j) = F2->scalar(static_cast<std::int64_t>(rng() & 1));
    } while (t.rank() != 4);
    Mat tinv = t.inverse();
    Mat m = tinv * m0 * t;
    QuadForm q = QuadForm::fold(t.transpose() * w0.quad->gram() * t);
    REQUIRE(is_adapted(q, m));
    // W = t^-1(span(e1, e2)) is m-stable, totally singular, and m - I is invertible on it
    std::vector<std::vector<Elt>> wbasis;
    for (int c = 0; c < 2; ++c) {
      std::vector<Elt> e(4, F2->zero());
      e[static_cast<std::size_t>(c)] = F2->one();
      wbasis.push_back(tinv.mul_vec(e));
    }
    for (int c0 = 0; c0 < 2; ++c0)
      for (int c1 = 0; c1 < 2; ++c1) {
        std::vector<Elt> v(4, F2->zero());
        for (int i = 0; i < 4; ++i)
          v[static_cast<std::size_t>(i)] =
              F2->scalar(c0) * wbasis[0][static_cast<std::size_t>(i)] + F2->scalar(c1) * wbasis[1][static_cast<std::size_t>(i)];
        CHECK(q.eval(v).is_zero());
      }
  }
}

TEST_CASE("equal dimension and equal Arf means congruent (dim 2, GF(2) and GF(4))") {
  for (const auto& K : {make_field(2, 1), make_field(2, 2)}) {
    // collect all regular dim-2 forms
    std::vector<QuadForm> forms;
    for (std::int64_t a = 0; a < K->size(); ++a)
      for (std::int64_t b = 0; b < K->size(); ++b)
        for (std::int64_t c = 0; c < K->size(); ++c) {
          Mat g(K, 2, 2);
          g.at(0, 0) = K->from_encoding(a);
          g.at(0, 1) = K->from_encoding(b);
          g.at(1, 1) = K->from_encoding(c);
          QuadForm q(std::move(g));
          if (is_regular(q)) forms.push_back(std::move(q));
        }
    // all invertible 2x2 change-of-basis matrices
    std::vector<Mat> gl;
    for (std::int64_t idx = 0; idx < K->size() * K->size() * K->size() * K->size(); ++idx) {
      Mat c(K, 2, 2);
      std::int64_t rest = idx;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          c.at(i, j) = K->from_encoding(rest % K->size());
          rest /= K->size();
        }
      if (c.rank() == 2) gl.push_back(std::move(c));
    }
    auto congruent = [&](const QuadForm& q1, const QuadForm& q2) {
      for (const Mat& c : gl) {
        QuadForm moved = QuadForm::fold(c.transpose() * q1.gram() * c);
        if (moved.gram() == q2.gram()) return true;
      }
      return false;
    };
    for (std::size_t i = 0; i < forms.size(); ++i)
      for (std::size_t j = i; j < forms.size(); ++j)
        CHECK(congruent(forms[i], forms[j]) == (arf(forms[i]) == arf(forms[j])));
  }
}

TEST_CASE("symplectic basis properties") {
  auto F4 = make_field(2, 2);
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 10; ++trial) {
    Mat s(F4, 4, 4);
    do {
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
          Elt v = F4->from_encoding(static_cast<std::int64_t>(rng() % 4));
          s.at(i, j) = v;
          s.at(j, i) = v;
        }
    } while (s.rank() != 4);
    auto basis = symplectic_basis(s);
    REQUIRE(basis.size() == 2);
    auto pairing = [&](const std::vector<Elt>& x, const std::vector<Elt>& y) {
      Elt acc = F4->zero();
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) acc += x[static_cast<std::size_t>(i)] * s.at(i, j) * y[static_cast<std::size_t>(j)];
      return acc;
    };
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(pairing(basis[i].first, basis[i].second).is_one());
      for (std::size_t j = 0; j < 2; ++j) {
        if (i == j) continue;
        CHECK(pairing(basis[i].first, basis[j].first).is_zero());
        CHECK(pairing(basis[i].first, basis[j].second).is_zero());
        CHECK(pairing(basis[i].second, basis[j].second).is_zero());
      }
    }
  }
}

TEST_CASE("evaluation matches the gram definition") {
  auto F2 = make_field(2, 1);
  QuadForm q = qf(F2, {{1, 1}, {0, 1}});
  CHECK(q.eval(vec(F2, {1, 0})).is_one());
  CHECK(q.eval(vec(F2, {0, 1})).is_one());
  CHECK(q.eval(vec(F2, {1, 1})).is_one());
  CHECK(q.eval(vec(F2, {0, 0})).is_zero());
}
