#pragma once
// Crystallographic groups as finite data: translation lattice, point group and coset representatives.

#include "flatfold/exact.hpp"
#include "flatfold/finite_group.hpp"

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatfold {

// x -> t + A x
struct AffineMap {
  RatVector t;
  IntMatrix A;

  AffineMap() = default;
  AffineMap(RatVector translation, IntMatrix linear);
  static AffineMap identity(std::size_t n);
  static AffineMap translation(const RatVector& v);
  static AffineMap linear(const IntMatrix& m);

  std::size_t dim() const { return t.size(); }
  AffineMap inverse() const;
  AffineMap pow(long k) const;
  RatVector operator()(const RatVector& x) const;
  bool is_translation() const;

  friend AffineMap operator*(const AffineMap& f, const AffineMap& g);
  friend bool operator==(const AffineMap& f, const AffineMap& g) { return f.t == g.t && f.A == g.A; }
  friend bool operator<(const AffineMap& f, const AffineMap& g);
};

std::string format_element(const AffineMap& g);
// Parses "t_1 ... t_n | a_11 ... a_nn".
AffineMap parse_element(const std::string& text, std::size_t dim);

struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotDiscrete : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnrecognizedGroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::size_t kDefaultClosureCap = 1024;

class SpaceGroup {
 public:
  std::size_t dim() const { return dim_; }
  const std::vector<AffineMap>& generators() const { return gens_; }
  const Lattice& lattice() const { return lattice_; }
  const std::vector<IntMatrix>& point_group() const { return point_group_; }
  const std::vector<RatVector>& coset_reps() const { return reps_; }
  std::size_t holonomy_order() const { return point_group_.size(); }

  std::optional<std::size_t> find(const IntMatrix& A) const;
  AffineMap coset_element(std::size_t i) const { return AffineMap(reps_[i], point_group_[i]); }
  std::vector<AffineMap> coset_elements() const;
  // Generators of the closed group: lattice basis followed by non-identity coset elements.
  std::vector<AffineMap> normal_generators() const;
  // Canonical form of an element modulo the lattice (matrix unchanged, translation reduced).
  AffineMap reduce(const AffineMap& g) const;
  FiniteGroup point_group_table() const;

  friend SpaceGroup close_group(std::size_t dim, const std::vector<AffineMap>& gens, std::size_t cap);
  friend bool operator==(const SpaceGroup& a, const SpaceGroup& b) {
    return a.dim_ == b.dim_ && a.lattice_ == b.lattice_ && a.point_group_ == b.point_group_ && a.reps_ == b.reps_;
  }

 private:
  std::size_t dim_ = 0;
  std::vector<AffineMap> gens_;
  Lattice lattice_;
  std::vector<IntMatrix> point_group_;
  std::vector<RatVector> reps_;
  std::map<IntMatrix, std::size_t> index_;
};

// Saturates the generated group.  The lattice may have lower rank when the generators span a
// proper subgroup of a space group (for instance a normal subgroup).
SpaceGroup close_group(std::size_t dim, const std::vector<AffineMap>& gens, std::size_t cap = kDefaultClosureCap);

bool contains(const SpaceGroup& G, const AffineMap& g);
bool is_torsion_free(const SpaceGroup& G);

struct Homology {
  std::size_t betti = 0;
  std::vector<Integer> torsion;  // elementary divisors > 1
  bool operator==(const Homology&) const = default;
};
Homology first_homology(const SpaceGroup& G);
// Rational span (in E^n) of the lattice vectors that map to torsion in H1.
std::vector<RatVector> homology_torsion_span(const SpaceGroup& G);
std::size_t betti_via_fixed_space(const SpaceGroup& G);

// Homomorphisms G -> Z/2, as parity vectors on the abelianization generators (lattice basis, then
// the non-identity coset representatives).  The trivial character is omitted.
using Character = std::vector<int>;
std::vector<Character> z2_characters(const SpaceGroup& G);
int character_value(const SpaceGroup& G, const Character& chi, const AffineMap& g);
// Index-2 subgroup {g : parity(g) = 0}; parity must be a homomorphism to Z/2 that is nontrivial on G
// (when it is trivial the whole group is returned).
SpaceGroup parity_kernel(const SpaceGroup& G, const std::function<int(const AffineMap&)>& parity);
// Common fixed space of the point group.
std::vector<RatVector> point_group_fixed_space(const SpaceGroup& G);

bool is_orientable(const SpaceGroup& G);
std::string holonomy_class(const SpaceGroup& G);
SpaceGroup orientation_double_cover(const SpaceGroup& G);

struct InvariantRecord {
  std::size_t dim = 0;
  bool orientable = true;
  std::vector<Integer> h1_torsion;
  std::size_t betti = 0;
  std::string holonomy_label;
  std::size_t holonomy_order = 0;
  bool operator==(const InvariantRecord&) const = default;
};
InvariantRecord invariant_record(const SpaceGroup& G);
std::string format_record(const InvariantRecord& r);
std::string format_homology(std::size_t betti, const std::vector<Integer>& torsion);

bool normalizes(const SpaceGroup& M, const AffineMap& phi);
// Least m >= 1 with phi^m in M, or nullopt if none up to cap.
std::optional<long> affinity_order(const SpaceGroup& M, const AffineMap& phi, long cap = 64);
bool manifold_fixed_point_free(const SpaceGroup& M, const AffineMap& phi);

// Group file: "dim n" then lines "gen <t_1> ... <t_n> | <n^2 integers>"; '#' starts a comment.
struct GroupFile {
  std::size_t dim = 0;
  std::vector<AffineMap> gens;
};
GroupFile parse_group_file(const std::string& text);
GroupFile read_group_file(const std::string& path);
std::string write_group_file(const GroupFile& g);

}  // namespace flatfold
