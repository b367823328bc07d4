#include "flatfold/exact.hpp"

#include <doctest.h>

#include <functional>
#include <random>

using namespace flatfold;

namespace {

IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, long lo, long hi) {
  std::uniform_int_distribution<long> d(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// gcd of all k x k minors, by brute force over row and column subsets.
Integer determinantal_divisor(const IntMatrix& a, std::size_t k) {
  Integer g = 0;
  std::vector<std::size_t> rows, cols;
  std::function<void(std::size_t, std::size_t)> pick_cols;
  std::function<void(std::size_t)> pick_rows = [&](std::size_t start) {
    if (rows.size() == k) {
      pick_cols(0, 0);
      return;
    }
    for (std::size_t i = start; i < a.rows(); ++i) {
      rows.push_back(i);
      pick_rows(i + 1);
      rows.pop_back();
    }
  };
  pick_cols = [&](std::size_t start, std::size_t) {
    if (cols.size() == k) {
      IntMatrix m(k, k);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = a(rows[i], cols[j]);
      Integer d = determinant(m);
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      return;
    }
    for (std::size_t j = start; j < a.cols(); ++j) {
      cols.push_back(j);
      pick_cols(j + 1, 0);
      cols.pop_back();
    }
  };
  pick_rows(0);
  return g;
}

Rational q(long a, long b) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

bool is_diagonal_chain(const IntMatrix& d) {
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (i != j && d(i, j) != 0) return false;
  const std::size_t k = std::min(d.rows(), d.cols());
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (d(i, i) < 0) return false;
    if (d(i, i) == 0 && d(i + 1, i + 1) != 0) return false;
    if (d(i, i) != 0 && d(i + 1, i + 1) % d(i, i) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("smith normal form of random 4x4 matrices") {
  std::mt19937 rng(20261016);
  for (int trial = 0; trial < 1000; ++trial) {
    IntMatrix a = random_matrix(rng, 4, 4, -9, 9);
    if (trial % 7 == 0)
      for (std::size_t j = 0; j < 4; ++j) a(3, j) = a(0, j) * 2 - a(1, j);  // force rank deficiency
    SnfResult s = smith_normal_form(a);
    REQUIRE(s.U * a * s.V == s.D);
    REQUIRE(is_unimodular(s.U));
    REQUIRE(is_unimodular(s.V));
    REQUIRE(is_diagonal_chain(s.D));
    // d_1 ... d_k equals the k-th determinantal divisor.
    Integer prod = 1;
    for (std::size_t k = 1; k <= 4; ++k) {
      prod *= s.D(k - 1, k - 1);
      CHECK(prod == determinantal_divisor(a, k));
    }
  }
}

TEST_CASE("smith normal form of rectangular matrices") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 2 + trial % 4, c = 2 + (trial / 4) % 4;
    IntMatrix a = random_matrix(rng, r, c, -5, 5);
    SnfResult s = smith_normal_form(a);
    REQUIRE(s.U * a * s.V == s.D);
    REQUIRE(is_diagonal_chain(s.D));
    auto divs = elementary_divisors(a);
    Integer prod = 1;
    for (std::size_t k = 1; k <= divs.size(); ++k) {
      prod *= divs[k - 1];
      CHECK(prod == determinantal_divisor(a, k));
    }
    if (divs.size() < std::min(r, c)) CHECK(determinantal_divisor(a, divs.size() + 1) == 0);
  }
}

TEST_CASE("hermite normal form") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    IntMatrix a = random_matrix(rng, 3 + trial % 3, 4, -6, 6);
    HnfResult h = hermite_normal_form(a);
    REQUIRE(h.U * a == h.H);
    REQUIRE(is_unimodular(h.U));
    std::size_t lead = 0;
    for (std::size_t i = 0; i < h.H.rows(); ++i) {
      std::size_t p = 0;
      while (p < h.H.cols() && h.H(i, p) == 0) ++p;
      if (p == h.H.cols()) {
        lead = h.H.cols() + 1;
        continue;
      }
      REQUIRE(lead <= h.H.cols());  // zero rows come last
      CHECK((i == 0 || p >= lead));
      CHECK(h.H(i, p) > 0);
      for (std::size_t k = 0; k < i; ++k) {
        CHECK(h.H(k, p) >= 0);
        CHECK(h.H(k, p) < h.H(i, p));
      }
      lead = p + 1;
    }
  }
}

TEST_CASE("integer left kernel and integer solves") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    IntMatrix a = random_matrix(rng, 5, 3, -4, 4);
    for (const auto& y : integer_left_kernel(a))
      for (std::size_t j = 0; j < 3; ++j) {
        Integer s = 0;
        for (std::size_t i = 0; i < 5; ++i) s += y[i] * a(i, j);
        CHECK(s == 0);
      }
    IntMatrix m = random_matrix(rng, 3, 4, -4, 4);
    std::vector<Integer> y{Integer(trial % 5 - 2), 1, Integer(-(trial % 3))};
    RatVector c(4);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t i = 0; i < 3; ++i) c[j] += Rational(y[i] * m(i, j));
    auto sol = solve_integer_left(to_rational(m), c);
    REQUIRE(sol);
    for (std::size_t j = 0; j < 4; ++j) {
      Rational s = 0;
      for (std::size_t i = 0; i < 3; ++i) s += Rational((*sol)[i] * m(i, j));
      CHECK(s == c[j]);
    }
  }
  // (1/2, 0) is not an integer combination of the rows of the identity.
  CHECK_FALSE(solve_integer_left(to_rational(IntMatrix::identity(2)), RatVector{Rational(1, 2), 0}));
}

TEST_CASE("rational linear algebra") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    RatMatrix m = to_rational(random_matrix(rng, 3, 5, -3, 3));
    auto ker = nullspace(m);
    CHECK(rank(m) + ker.size() == 5);
    for (const auto& v : ker) CHECK(is_zero(act(m, v)));
    std::vector<RatVector> rows{m.row(0), m.row(1)};
    for (const auto& w : orthogonal_complement(rows, 5))
      for (const auto& r : rows) CHECK(dot(w, r) == 0);
  }
  IntMatrix u = int_matrix(3, 3, {2, 1, 0, 1, 1, 0, 0, 3, 1});
  CHECK(is_unimodular(u));
  CHECK(u * inverse_unimodular(u) == IntMatrix::identity(3));
  CHECK(determinant(int_matrix(2, 2, {4, 1, 2, 3})) == 10);
}

TEST_CASE("lattice canonical forms") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<long> d(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RatVector> gens;
    for (int k = 0; k < 4; ++k) gens.push_back({q(d(rng), 2), q(d(rng), 3), Rational(d(rng))});
    Lattice L = Lattice::from_vectors(3, gens);
    for (const auto& g : gens) CHECK(L.contains(g));
    // Same lattice from a unimodular change of generators.
    std::vector<RatVector> mixed{gens[0] + gens[1], gens[1], gens[2] - scale(gens[0], 3), gens[3]};
    CHECK(Lattice::from_vectors(3, mixed) == L);
    RatVector x{q(d(rng), 7), q(d(rng), 5), Rational(1, 4)};
    RatVector r = L.reduce(x);
    CHECK(L.contains(x - r));
    CHECK(L.reduce(r) == r);
    CHECK(L.reduce(x + gens[2]) == r);
    for (const auto& g : gens) {
      auto c = L.coordinates(g);
      REQUIRE(c);
      RatVector back = zero_vector(3);
      auto b = L.basis();
      for (std::size_t i = 0; i < b.size(); ++i) back = back + scale(b[i], Rational((*c)[i]));
      CHECK(back == g);
    }
  }
  Lattice Z3 = Lattice::standard(3);
  Lattice sub = Lattice::from_vectors(3, {{2, 0, 0}, {1, 3, 0}, {0, 0, 5}});
  CHECK(Z3.index_of(sub) == 30);
  CHECK(Z3.stabilized_by(int_matrix(3, 3, {0, 1, 0, 1, 0, 0, 0, 0, -1})));
  CHECK_FALSE(sub.stabilized_by(int_matrix(3, 3, {0, 1, 0, 1, 0, 0, 0, 0, 1})));
  Lattice line = lattice_intersection({{1, 1, 0}}, Z3);
  CHECK(line.rank() == 1);
  CHECK(line.contains({1, 1, 0}));
  CHECK_FALSE(line.contains({Rational(1, 2), Rational(1, 2), 0}));
}

TEST_CASE("torus fixed points against a grid search") {
  std::mt19937 rng(17);
  std::uniform_int_distribution<long> e(-2, 2), den(1, 4), num(0, 11);
  const Lattice L = Lattice::standard(2);
  int with = 0, without = 0;
  for (int trial = 0; trial < 400; ++trial) {
    IntMatrix C(2, 2);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) C(i, j) = e(rng);
    const long q = den(rng);
    RatVector c{Rational(num(rng), q), Rational(num(rng), q)};
    for (auto& x : c) x.canonicalize();
    // Fixed points, when they exist, include one on the grid of step 1/(q * d) with d the largest
    // elementary divisor of C - I.
    IntMatrix D = C - IntMatrix::identity(2);
    auto divs = elementary_divisors(D);
    long step = q;
    if (!divs.empty()) step *= divs.back().get_si();
    bool brute = false;
    for (long a = 0; a < step && !brute; ++a)
      for (long b = 0; b < step && !brute; ++b) {
        RatVector x{Rational(a, step), Rational(b, step)};
        for (auto& y : x) y.canonicalize();
        brute = is_integral(c + act(C, x) - x);
      }
    CHECK(torus_fixed_point_exists(C, c, L) == brute);
    (brute ? with : without)++;
  }
  CHECK(with > 20);
  CHECK(without > 20);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("-3/6") == Rational(-1, 2));
  CHECK(to_string(q(4, 2)) == "2");
  CHECK(floor_of(Rational(-1, 2)) == -1);
  CHECK(lcm_of_denominators({Rational(1, 4), Rational(1, 6)}) == 12);
}
