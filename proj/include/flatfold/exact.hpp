#pragma once
// Exact integer and rational linear algebra over GMP.

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatfold {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVector = std::vector<Rational>;

Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);
Integer lcm_of_denominators(const RatVector& v);
bool is_integral(const Rational& q);
bool is_integral(const RatVector& v);
Integer floor_of(const Rational& q);

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("matrix: entry count mismatch");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  const std::vector<T>& data() const { return data_; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_square() const { return rows_ == cols_; }
  bool is_zero() const {
    for (const auto& x : data_)
      if (x != 0) return false;
    return true;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    T tmp;
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          tmp = aik * b(k, j);
          c(i, j) += tmp;
        }
      }
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }
  friend bool operator<(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
    if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
      int c = cmp(a.data_[i], b.data_[i]);
      if (c != 0) return c < 0;
    }
    return false;
  }

  void swap_rows(std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }
  // row a += k * row b
  void add_row(std::size_t a, std::size_t b, const T& k) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) += k * (*this)(b, j);
  }
  void add_col(std::size_t a, std::size_t b, const T& k) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) += k * (*this)(i, b);
  }
  void negate_row(std::size_t a) {
    for (std::size_t j = 0; j < cols_; ++j) (*this)(a, j) = -(*this)(a, j);
  }
  void negate_col(std::size_t a) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, a) = -(*this)(i, a);
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;

IntMatrix int_matrix(std::size_t rows, std::size_t cols, const std::vector<long>& entries);
RatMatrix to_rational(const IntMatrix& m);
// Throws if any entry is not an integer.
IntMatrix to_integer(const RatMatrix& m);
RatVector act(const IntMatrix& m, const RatVector& v);
RatVector act(const RatMatrix& m, const RatVector& v);
RatVector operator+(const RatVector& a, const RatVector& b);
RatVector operator-(const RatVector& a, const RatVector& b);
RatVector operator-(const RatVector& a);
RatVector scale(const RatVector& v, const Rational& k);
RatVector unit_vector(std::size_t n, std::size_t i);
RatVector zero_vector(std::size_t n);
Rational dot(const RatVector& a, const RatVector& b);
bool is_zero(const RatVector& v);

Integer determinant(const IntMatrix& m);
Rational determinant(const RatMatrix& m);
bool is_unimodular(const IntMatrix& m);
// Inverse of a unimodular matrix; throws otherwise.
IntMatrix inverse_unimodular(const IntMatrix& m);
std::optional<RatMatrix> inverse(const RatMatrix& m);

// Rational row space / null space helpers (reduced row echelon).
RatMatrix rref(const RatMatrix& m, std::size_t* rank = nullptr);
std::size_t rank(const RatMatrix& m);
// Basis (as rows) of {x : m x = 0}.
std::vector<RatVector> nullspace(const RatMatrix& m);
// Reduced basis of the span of the given vectors in dimension n.
std::vector<RatVector> span_basis(const std::vector<RatVector>& vs, std::size_t n);
// Basis of the orthogonal complement w.r.t. the standard inner product.
std::vector<RatVector> orthogonal_complement(const std::vector<RatVector>& vs, std::size_t n);
bool in_span(const std::vector<RatVector>& basis, const RatVector& v);
// Coefficients c with v = sum c_i basis_i, if v lies in the span.
std::optional<RatVector> coordinates_in(const std::vector<RatVector>& basis, const RatVector& v);

struct SnfResult {
  IntMatrix U, D, V;
};

SnfResult smith_normal_form(const IntMatrix& a);
// Variant that skips accumulating transforms that are not wanted (the skipped ones are left empty).
SnfResult smith_normal_form(const IntMatrix& a, bool want_u, bool want_v);
// Nonzero diagonal of D, in order.
std::vector<Integer> elementary_divisors(const IntMatrix& a);

struct HnfResult {
  IntMatrix H, U;
};

// Row Hermite normal form: U*A = H, positive pivots, entries above each pivot reduced into [0, pivot).
HnfResult hermite_normal_form(const IntMatrix& a);

// Integer basis (rows) of {y : y*A = 0}.
std::vector<std::vector<Integer>> integer_left_kernel(const IntMatrix& a);

// Integer solution y of y*M = c, if one exists.
std::optional<std::vector<Integer>> solve_integer_left(const RatMatrix& M, const RatVector& c);

// A lattice in Q^n, possibly of lower rank, stored canonically as (row HNF of integer rows) / denominator.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(std::size_t dim) : dim_(dim), hnf_(0, dim), denom_(1) {}
  static Lattice standard(std::size_t dim);
  static Lattice from_vectors(std::size_t dim, const std::vector<RatVector>& vs);

  std::size_t dim() const { return dim_; }
  std::size_t rank() const { return hnf_.rows(); }
  bool full_rank() const { return rank() == dim_; }
  std::vector<RatVector> basis() const;
  // Basis as rows of a rational matrix.
  RatMatrix basis_matrix() const;
  const IntMatrix& hnf() const { return hnf_; }
  const Integer& denominator() const { return denom_; }

  bool contains(const RatVector& v) const;
  // Canonical representative of v modulo the lattice.
  RatVector reduce(const RatVector& v) const;
  // Integer coordinates of a lattice vector relative to basis(); nullopt if not in the lattice.
  std::optional<std::vector<Integer>> coordinates(const RatVector& v) const;
  Lattice add(const std::vector<RatVector>& vs) const;
  Lattice add(const RatVector& v) const { return add(std::vector<RatVector>{v}); }
  // Image under an integer matrix (column-vector convention).
  Lattice image(const IntMatrix& m) const;
  bool stabilized_by(const IntMatrix& m) const;
  // [this : sub] for a full-rank sublattice of a full-rank lattice.
  Integer index_of(const Lattice& sub) const;

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return a.dim_ == b.dim_ && a.denom_ == b.denom_ && a.hnf_ == b.hnf_;
  }

 private:
  std::size_t dim_ = 0;
  IntMatrix hnf_;
  Integer denom_ = 1;
};

// Does x -> c + C x fix a point of the torus R^n / L?  L must be full rank and C must stabilize L.
bool torus_fixed_point_exists(const IntMatrix& C, const RatVector& c, const Lattice& L);

Lattice lattice_intersection(const std::vector<RatVector>& V, const Lattice& L);

std::ostream& operator<<(std::ostream& os, const RatVector& v);
std::ostream& operator<<(std::ostream& os, const IntMatrix& m);

struct IntMatrixHash {
  std::size_t operator()(const IntMatrix& m) const;
};

}  // namespace flatfold
