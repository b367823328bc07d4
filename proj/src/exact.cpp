#include "flatfold/exact.hpp"

#include <algorithm>
#include <cctype>
#include <ostream>
#include <sstream>

namespace flatfold {

Rational parse_rational(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  std::size_t digits = 0, slash = std::string::npos;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (std::isdigit(static_cast<unsigned char>(s[j]))) {
      ++digits;
    } else if (s[j] == '/' && slash == std::string::npos && j > i && j + 1 < s.size()) {
      slash = j;
    } else {
      throw std::invalid_argument("bad rational: '" + s + "'");
    }
  }
  if (digits == 0) throw std::invalid_argument("bad rational: '" + s + "'");
  std::string text = s[0] == '+' ? s.substr(1) : s;
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("bad rational: '" + s + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer lcm_of_denominators(const RatVector& v) {
  Integer l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

bool is_integral(const Rational& q) { return q.get_den() == 1; }
bool is_integral(const RatVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return is_integral(q); });
}

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

IntMatrix int_matrix(std::size_t rows, std::size_t cols, const std::vector<long>& entries) {
  std::vector<Integer> d;
  d.reserve(entries.size());
  for (long e : entries) d.emplace_back(e);
  return IntMatrix(rows, cols, std::move(d));
}

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rational(m(i, j));
  return r;
}

IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integral(m(i, j))) throw std::domain_error("matrix entry is not an integer");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

RatVector act(const IntMatrix& m, const RatVector& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("apply: shape mismatch");
  RatVector r(m.rows());
  Rational t;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j) == 0 || v[j] == 0) continue;
      t = v[j] * m(i, j);
      r[i] += t;
    }
  return r;
}

RatVector act(const RatMatrix& m, const RatVector& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("apply: shape mismatch");
  RatVector r(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r[i] += m(i, j) * v[j];
  return r;
}

RatVector operator+(const RatVector& a, const RatVector& b) {
  RatVector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}
RatVector operator-(const RatVector& a, const RatVector& b) {
  RatVector r(a);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}
RatVector operator-(const RatVector& a) {
  RatVector r(a.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = -a[i];
  return r;
}
RatVector scale(const RatVector& v, const Rational& k) {
  RatVector r(v);
  for (auto& x : r) x *= k;
  return r;
}
RatVector unit_vector(std::size_t n, std::size_t i) {
  RatVector r(n);
  r[i] = 1;
  return r;
}
RatVector zero_vector(std::size_t n) { return RatVector(n); }
Rational dot(const RatVector& a, const RatVector& b) {
  Rational s;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
bool is_zero(const RatVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

RatMatrix rref(const RatMatrix& m, std::size_t* rank_out) {
  RatMatrix a = m;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(p, r);
    Rational inv = 1 / a(r, c);
    for (std::size_t j = 0; j < a.cols(); ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  if (rank_out) *rank_out = r;
  return a;
}

std::size_t rank(const RatMatrix& m) {
  std::size_t r = 0;
  rref(m, &r);
  return r;
}

Rational determinant(const RatMatrix& m) {
  if (!m.is_square()) throw std::invalid_argument("determinant: not square");
  RatMatrix a = m;
  Rational det = 1;
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      a.swap_rows(p, c);
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      Rational f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

Integer determinant(const IntMatrix& m) { return determinant(to_rational(m)).get_num(); }

bool is_unimodular(const IntMatrix& m) {
  if (!m.is_square()) return false;
  Integer d = determinant(m);
  return d == 1 || d == -1;
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (!m.is_square()) return std::nullopt;
  const std::size_t n = m.rows();
  RatMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  std::size_t r = 0;
  RatMatrix red = rref(aug, &r);
  for (std::size_t i = 0; i < n; ++i)
    if (red(i, i) != 1) return std::nullopt;
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = red(i, n + j);
  return inv;
}

IntMatrix inverse_unimodular(const IntMatrix& m) {
  if (!is_unimodular(m)) throw std::domain_error("matrix is not unimodular");
  return to_integer(*inverse(to_rational(m)));
}

std::vector<RatVector> nullspace(const RatMatrix& m) {
  std::size_t r = 0;
  RatMatrix a = rref(m, &r);
  std::vector<std::size_t> pivots;
  std::vector<bool> is_pivot(m.cols(), false);
  for (std::size_t i = 0, c = 0; i < r; ++i) {
    while (a(i, c) == 0) ++c;
    pivots.push_back(c);
    is_pivot[c] = true;
  }
  std::vector<RatVector> out;
  for (std::size_t f = 0; f < m.cols(); ++f) {
    if (is_pivot[f]) continue;
    RatVector v(m.cols());
    v[f] = 1;
    for (std::size_t i = 0; i < r; ++i) v[pivots[i]] = -a(i, f);
    out.push_back(std::move(v));
  }
  return out;
}

static RatMatrix rows_matrix(const std::vector<RatVector>& vs, std::size_t n) {
  RatMatrix a(vs.size(), n);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = vs[i][j];
  return a;
}

std::vector<RatVector> span_basis(const std::vector<RatVector>& vs, std::size_t n) {
  if (vs.empty()) return {};
  std::size_t r = 0;
  RatMatrix a = rref(rows_matrix(vs, n), &r);
  std::vector<RatVector> out;
  for (std::size_t i = 0; i < r; ++i) out.push_back(a.row(i));
  return out;
}

std::vector<RatVector> orthogonal_complement(const std::vector<RatVector>& vs, std::size_t n) {
  if (vs.empty()) {
    std::vector<RatVector> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(unit_vector(n, i));
    return out;
  }
  return nullspace(rows_matrix(vs, n));
}

bool in_span(const std::vector<RatVector>& basis, const RatVector& v) {
  return coordinates_in(basis, v).has_value();
}

std::optional<RatVector> coordinates_in(const std::vector<RatVector>& basis, const RatVector& v) {
  const std::size_t n = v.size(), k = basis.size();
  RatMatrix aug(n, k + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug(i, j) = basis[j][i];
    aug(i, k) = v[i];
  }
  std::size_t r = 0;
  RatMatrix red = rref(aug, &r);
  RatVector c(k);
  for (std::size_t i = 0; i < r; ++i) {
    std::size_t p = 0;
    while (p <= k && red(i, p) == 0) ++p;
    if (p == k) return std::nullopt;
    c[p] = red(i, k);
  }
  return c;
}

namespace {

// Locate the entry of minimal nonzero absolute value in the block [t.., t..].
bool min_pivot(const IntMatrix& d, std::size_t t, std::size_t& pi, std::size_t& pj) {
  bool found = false;
  Integer best;
  for (std::size_t i = t; i < d.rows(); ++i)
    for (std::size_t j = t; j < d.cols(); ++j) {
      const Integer& x = d(i, j);
      if (x == 0) continue;
      if (!found || mpz_cmpabs(x.get_mpz_t(), best.get_mpz_t()) < 0) {
        best = x;
        pi = i;
        pj = j;
        found = true;
        if (best == 1 || best == -1) return true;
      }
    }
  return found;
}

SnfResult snf_impl(const IntMatrix& a, bool want_u, bool want_v) {
  const std::size_t m = a.rows(), n = a.cols();
  SnfResult r{want_u ? IntMatrix::identity(m) : IntMatrix(), a,
              want_v ? IntMatrix::identity(n) : IntMatrix()};
  IntMatrix& D = r.D;
  Integer q;
  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    for (;;) {
      std::size_t pi = 0, pj = 0;
      if (!min_pivot(D, t, pi, pj)) goto done;
      if (pi != t) {
        D.swap_rows(pi, t);
        if (want_u) r.U.swap_rows(pi, t);
      }
      if (pj != t) {
        D.swap_cols(pj, t);
        if (want_v) r.V.swap_cols(pj, t);
      }
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (D(i, t) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), D(i, t).get_mpz_t(), D(t, t).get_mpz_t());
        q = -q;
        D.add_row(i, t, q);
        if (want_u) r.U.add_row(i, t, q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (D(t, j) == 0) continue;
        mpz_tdiv_q(q.get_mpz_t(), D(t, j).get_mpz_t(), D(t, t).get_mpz_t());
        q = -q;
        D.add_col(j, t, q);
        if (want_v) r.V.add_col(j, t, q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Enforce divisibility of the remaining block by the pivot.
      bool divides = true;
      for (std::size_t i = t + 1; i < m && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (!mpz_divisible_p(D(i, j).get_mpz_t(), D(t, t).get_mpz_t())) {
            D.add_row(t, i, 1);
            if (want_u) r.U.add_row(t, i, 1);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (D(t, t) < 0) {
      D.negate_row(t);
      if (want_u) r.U.negate_row(t);
    }
  }
done:
  return r;
}

}  // namespace

SnfResult smith_normal_form(const IntMatrix& a) { return snf_impl(a, true, true); }
SnfResult smith_normal_form(const IntMatrix& a, bool want_u, bool want_v) { return snf_impl(a, want_u, want_v); }

HnfResult hermite_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  HnfResult r{a, IntMatrix::identity(m)};
  IntMatrix& H = r.H;
  Integer q;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = row; i < m; ++i)
        if (H(i, c) != 0 && (best == m || mpz_cmpabs(H(i, c).get_mpz_t(), H(best, c).get_mpz_t()) < 0)) best = i;
      if (best == m) break;
      if (best != row) {
        H.swap_rows(best, row);
        r.U.swap_rows(best, row);
      }
      bool clean = true;
      for (std::size_t i = row + 1; i < m; ++i) {
        if (H(i, c) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(row, c).get_mpz_t());
        q = -q;
        H.add_row(i, row, q);
        r.U.add_row(i, row, q);
        if (H(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (H(row, c) == 0) continue;
    if (H(row, c) < 0) {
      H.negate_row(row);
      r.U.negate_row(row);
    }
    for (std::size_t i = 0; i < row; ++i) {
      mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(row, c).get_mpz_t());
      if (q == 0) continue;
      q = -q;
      H.add_row(i, row, q);
      r.U.add_row(i, row, q);
    }
    ++row;
  }
  return r;
}

// Row-echelon basis of the row lattice, without tracking the transform.
static IntMatrix hnf_rows(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  IntMatrix H = a;
  Integer q;
  std::size_t row = 0;
  for (std::size_t c = 0; c < n && row < m; ++c) {
    for (;;) {
      std::size_t best = m;
      for (std::size_t i = row; i < m; ++i)
        if (H(i, c) != 0 && (best == m || mpz_cmpabs(H(i, c).get_mpz_t(), H(best, c).get_mpz_t()) < 0)) best = i;
      if (best == m) break;
      if (best != row) H.swap_rows(best, row);
      bool clean = true;
      for (std::size_t i = row + 1; i < m; ++i) {
        if (H(i, c) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(row, c).get_mpz_t());
        q = -q;
        H.add_row(i, row, q);
        if (H(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (H(row, c) == 0) continue;
    if (H(row, c) < 0) H.negate_row(row);
    for (std::size_t i = 0; i < row; ++i) {
      mpz_fdiv_q(q.get_mpz_t(), H(i, c).get_mpz_t(), H(row, c).get_mpz_t());
      if (q == 0) continue;
      q = -q;
      H.add_row(i, row, q);
    }
    ++row;
  }
  IntMatrix out(row, n);
  for (std::size_t i = 0; i < row; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = H(i, j);
  return out;
}

std::vector<Integer> elementary_divisors(const IntMatrix& a) {
  IntMatrix h = a.rows() > a.cols() ? hnf_rows(a) : a;
  SnfResult s = snf_impl(h, false, false);
  std::vector<Integer> out;
  for (std::size_t i = 0; i < std::min(s.D.rows(), s.D.cols()); ++i)
    if (s.D(i, i) != 0) out.push_back(s.D(i, i));
  return out;
}

std::vector<std::vector<Integer>> integer_left_kernel(const IntMatrix& a) {
  HnfResult h = hermite_normal_form(a);
  std::vector<std::vector<Integer>> out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    bool zero = true;
    for (std::size_t j = 0; j < a.cols() && zero; ++j) zero = h.H(i, j) == 0;
    if (zero) out.push_back(h.U.row(i));
  }
  return out;
}

std::optional<std::vector<Integer>> solve_integer_left(const RatMatrix& M, const RatVector& c) {
  const std::size_t m = M.rows(), n = M.cols();
  if (c.size() != n) throw std::invalid_argument("solve_integer_left: shape mismatch");
  if (n == 0) return std::vector<Integer>(m);
  Integer den = lcm_of_denominators(c);
  for (const auto& x : M.data()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  IntMatrix A(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) A(i, j) = Rational(M(i, j) * den).get_num();
  RatVector target = scale(c, Rational(den));
  HnfResult h = hermite_normal_form(A);
  // Solve z*H = target by forward substitution on the pivot columns.
  std::vector<Integer> z(m);
  RatVector rest = target;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t p = 0;
    while (p < n && h.H(i, p) == 0) ++p;
    if (p == n) break;
    for (std::size_t j = 0; j < p; ++j)
      if (rest[j] != 0) return std::nullopt;
    Rational q = rest[p] / h.H(i, p);
    if (!is_integral(q)) return std::nullopt;
    z[i] = q.get_num();
    for (std::size_t j = p; j < n; ++j) rest[j] -= z[i] * h.H(i, j);
  }
  if (!is_zero(rest)) return std::nullopt;
  std::vector<Integer> y(m);
  for (std::size_t i = 0; i < m; ++i)
    if (z[i] != 0)
      for (std::size_t j = 0; j < m; ++j) y[j] += z[i] * h.U(i, j);
  return y;
}

Lattice Lattice::standard(std::size_t dim) {
  Lattice l(dim);
  l.hnf_ = IntMatrix::identity(dim);
  return l;
}

Lattice Lattice::from_vectors(std::size_t dim, const std::vector<RatVector>& vs) {
  Lattice l(dim);
  if (vs.empty()) return l;
  Integer den = 1;
  for (const auto& v : vs) {
    if (v.size() != dim) throw std::invalid_argument("lattice: vector dimension mismatch");
    Integer d = lcm_of_denominators(v);
    mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
  }
  IntMatrix m(vs.size(), dim);
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      Rational x = vs[i][j] * den;
      m(i, j) = x.get_num();
    }
  IntMatrix h = hnf_rows(m);
  Integer g = den;
  for (const auto& x : h.data()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g > 1) {
    IntMatrix s(h.rows(), h.cols());
    for (std::size_t i = 0; i < h.rows(); ++i)
      for (std::size_t j = 0; j < h.cols(); ++j) mpz_divexact(s(i, j).get_mpz_t(), h(i, j).get_mpz_t(), g.get_mpz_t());
    h = std::move(s);
    mpz_divexact(den.get_mpz_t(), den.get_mpz_t(), g.get_mpz_t());
  }
  l.hnf_ = std::move(h);
  l.denom_ = den;
  return l;
}

std::vector<RatVector> Lattice::basis() const {
  std::vector<RatVector> out;
  for (std::size_t i = 0; i < hnf_.rows(); ++i) {
    RatVector v(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      v[j] = Rational(hnf_(i, j), denom_);
      v[j].canonicalize();
    }
    out.push_back(std::move(v));
  }
  return out;
}

RatMatrix Lattice::basis_matrix() const {
  RatMatrix m(hnf_.rows(), dim_);
  auto b = basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < dim_; ++j) m(i, j) = b[i][j];
  return m;
}

namespace {
std::size_t pivot_col(const IntMatrix& h, std::size_t i) {
  std::size_t c = 0;
  while (h(i, c) == 0) ++c;
  return c;
}
}  // namespace

std::optional<std::vector<Integer>> Lattice::coordinates(const RatVector& v) const {
  RatVector w = scale(v, Rational(denom_));
  if (!is_integral(w)) return std::nullopt;
  std::vector<Integer> coords(hnf_.rows());
  for (std::size_t i = 0; i < hnf_.rows(); ++i) {
    std::size_t c = pivot_col(hnf_, i);
    const Integer& num = w[c].get_num();
    if (!mpz_divisible_p(num.get_mpz_t(), hnf_(i, c).get_mpz_t())) return std::nullopt;
    Integer q = num / hnf_(i, c);
    coords[i] = q;
    if (q == 0) continue;
    for (std::size_t j = c; j < dim_; ++j) w[j] -= q * hnf_(i, j);
  }
  if (!is_zero(w)) return std::nullopt;
  return coords;
}

bool Lattice::contains(const RatVector& v) const { return coordinates(v).has_value(); }

RatVector Lattice::reduce(const RatVector& v) const {
  RatVector w = scale(v, Rational(denom_));
  for (std::size_t i = 0; i < hnf_.rows(); ++i) {
    std::size_t c = pivot_col(hnf_, i);
    Integer q = floor_of(w[c] / hnf_(i, c));
    if (q == 0) continue;
    for (std::size_t j = c; j < dim_; ++j) w[j] -= q * hnf_(i, j);
  }
  for (auto& x : w) x /= denom_;
  return w;
}

Lattice Lattice::add(const std::vector<RatVector>& vs) const {
  std::vector<RatVector> all = basis();
  all.insert(all.end(), vs.begin(), vs.end());
  return from_vectors(dim_, all);
}

Lattice Lattice::image(const IntMatrix& m) const {
  std::vector<RatVector> out;
  for (const auto& b : basis()) out.push_back(act(m, b));
  return from_vectors(m.rows(), out);
}

bool Lattice::stabilized_by(const IntMatrix& m) const {
  for (const auto& b : basis())
    if (!contains(act(m, b))) return false;
  return true;
}

Integer Lattice::index_of(const Lattice& sub) const {
  if (!full_rank() || !sub.full_rank()) throw std::domain_error("index_of: lattices must have full rank");
  Rational big = 1, small = 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    big *= Rational(hnf_(i, i), denom_);
    small *= Rational(sub.hnf_(i, i), sub.denom_);
  }
  Rational idx = small / big;
  if (!is_integral(idx)) throw std::domain_error("index_of: not a sublattice");
  return idx.get_num();
}

bool torus_fixed_point_exists(const IntMatrix& C, const RatVector& c, const Lattice& L) {
  const std::size_t n = L.dim();
  if (!L.full_rank()) throw std::domain_error("torus_fixed_point_exists: lattice must have full rank");
  if (!L.stabilized_by(C)) throw std::domain_error("torus_fixed_point_exists: matrix does not stabilize the lattice");
  RatMatrix P = L.basis_matrix().transpose();
  RatMatrix Pinv = *inverse(P);
  IntMatrix Cl = to_integer(Pinv * to_rational(C) * P);
  RatVector cl = act(Pinv, c);
  for (std::size_t i = 0; i < n; ++i) Cl(i, i) -= 1;
  SnfResult s = smith_normal_form(Cl);
  RatVector uc = act(s.U, cl);
  for (std::size_t i = 0; i < n; ++i)
    if (s.D(i, i) == 0 && !is_integral(uc[i])) return false;
  return true;
}

Lattice lattice_intersection(const std::vector<RatVector>& V, const Lattice& L) {
  const std::size_t n = L.dim();
  auto perp = orthogonal_complement(span_basis(V, n), n);
  if (perp.empty()) return L;
  auto B = L.basis();
  if (B.empty()) return L;
  // y*B lies in V iff y*(B*Q) = 0 where the columns of Q span V-perp.
  RatMatrix BQ(B.size(), perp.size());
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = 0; j < perp.size(); ++j) BQ(i, j) = dot(B[i], perp[j]);
  Integer den = 1;
  for (const auto& x : BQ.data()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  IntMatrix M(BQ.rows(), BQ.cols());
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = 0; j < M.cols(); ++j) M(i, j) = Rational(BQ(i, j) * den).get_num();
  std::vector<RatVector> vs;
  for (const auto& y : integer_left_kernel(M)) {
    RatVector v(n);
    for (std::size_t i = 0; i < y.size(); ++i)
      if (y[i] != 0) v = v + scale(B[i], Rational(y[i]));
    vs.push_back(std::move(v));
  }
  return Lattice::from_vectors(n, vs);
}

std::ostream& operator<<(std::ostream& os, const RatVector& v) {
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i].get_str();
  return os << ')';
}

std::ostream& operator<<(std::ostream& os, const IntMatrix& m) {
  os << '[';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << (i ? ";" : "");
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j).get_str();
  }
  return os << ']';
}

std::size_t IntMatrixHash::operator()(const IntMatrix& m) const {
  std::size_t h = m.rows() * 131 + m.cols();
  for (const auto& x : m.data()) h = h * 1000003u ^ static_cast<std::size_t>(mpz_get_si(x.get_mpz_t()));
  return h;
}

}  // namespace flatfold
