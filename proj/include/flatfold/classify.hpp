#pragma once
// Bounded searches for GL(n,Z) conjugacy, normalizers of fiber groups and affine equivalence of fiberings.

#include "flatfold/fibration.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace flatfold {

struct SearchBounds {
  long entry_bound = 2;   // matrix entries of candidates and conjugators
  long denom_bound = 12;  // translation denominators
  long order_cap = 12;    // largest element order tested
  long conj_bound = 3;    // entries of intermediate matrices in the conjugacy walk
  unsigned jobs = 1;
};

struct EquivalenceWitness {
  AffineMap conjugator;       // includes the central translation that was solved for
  bool reversed = false;      // circle: target inverted; interval: target pair swapped
  RatVector twist;            // interval: u with Au = Bu = -u (zero otherwise)
  RatVector central_offset;   // circle: translation along Span Z(M) absorbed by the kernel of Omega
};

struct EquivalenceVerdict {
  enum class Kind { Equivalent, InequivalentByInvariant, UnknownWithinBounds };
  Kind kind = Kind::UnknownWithinBounds;
  std::optional<EquivalenceWitness> witness;
  std::string invariant;  // name of the separating invariant
};
std::string to_string(EquivalenceVerdict::Kind k);

// Finite-order matrices with bounded entries (A^k = I for some k <= order_cap).
std::vector<IntMatrix> finite_order_elements(std::size_t n, const SearchBounds& bounds);

struct Partition {
  std::vector<IntMatrix> elements;
  std::vector<std::size_t> class_of;  // class index per element, classes numbered by first occurrence
  std::size_t count = 0;
  std::vector<std::vector<std::size_t>> classes() const;
};
// Conjugacy under GL(n,Z), explored by elementary generators through matrices with entries <= conj_bound.
Partition conjugacy_classes(const std::vector<IntMatrix>& elements, const SearchBounds& bounds);
Partition inverse_pair_classes(const Partition& p);

// Affinities b+B with |B| <= entry_bound normalizing M, one per class modulo M and translations along Span Z(M).
std::vector<AffineMap> normalizer_sample(const SpaceGroup& M, const SearchBounds& bounds);

// Translations b (modulo the target lattice and the fixed space of its point group) with (b+C) S (b+C)^-1 = T.
std::vector<RatVector> conjugating_translations(const SpaceGroup& S, const SpaceGroup& T, const IntMatrix& C);
// Some affinity phi with phi S phi^-1 = T, searched with matrix entries <= entry_bound.
std::optional<AffineMap> find_affine_conjugator(const SpaceGroup& S, const SpaceGroup& T, const SearchBounds& bounds);

using GroupNamer = std::function<std::string(const SpaceGroup&)>;
std::string default_namer(const SpaceGroup& G);

struct Order2Class {
  AffineMap representative;
  std::vector<AffineMap> members;
  std::string quotient_type;  // type of <M, phi>
};
std::vector<Order2Class> order2_fixed_point_free_classes(const SpaceGroup& M, const SearchBounds& bounds,
                                                         const GroupNamer& namer = default_namer);

// Invariants of the fibering that are preserved by affine equivalence.  Each entry is a named,
// printable value; equal signatures are necessary for equivalence.
struct FiberingSignature {
  std::vector<std::pair<std::string, std::string>> entries;
};
FiberingSignature circle_signature(const SpaceGroup& M, const AffineMap& beta);
FiberingSignature interval_signature(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma);

// Bounded conjugator searches without the invariant comparison.
std::optional<EquivalenceWitness> search_circle_equivalence(const SpaceGroup& M, const AffineMap& beta1,
                                                            const AffineMap& beta2, const SearchBounds& bounds,
                                                            const std::vector<AffineMap>& sample);
std::optional<EquivalenceWitness> search_interval_equivalence(const SpaceGroup& M,
                                                              const std::pair<AffineMap, AffineMap>& pair1,
                                                              const std::pair<AffineMap, AffineMap>& pair2,
                                                              const SearchBounds& bounds,
                                                              const std::vector<AffineMap>& sample);
// First entry where the signatures differ.
std::optional<std::string> separating_entry(const FiberingSignature& a, const FiberingSignature& b);

// Affine equivalence of fiberings over the circle and over the interval.  Passing a sample avoids recomputing it.
EquivalenceVerdict circle_fiberings_equivalent(const SpaceGroup& M, const AffineMap& beta1, const AffineMap& beta2,
                                               const SearchBounds& bounds,
                                               const std::vector<AffineMap>* sample = nullptr);
EquivalenceVerdict interval_pairs_equivalent(const SpaceGroup& M, const std::pair<AffineMap, AffineMap>& pair1,
                                             const std::pair<AffineMap, AffineMap>& pair2, const SearchBounds& bounds,
                                             const std::vector<AffineMap>* sample = nullptr);

// Checks a witness by group membership.
bool check_circle_witness(const SpaceGroup& M, const AffineMap& beta1, const AffineMap& beta2,
                          const EquivalenceWitness& w);
bool check_interval_witness(const SpaceGroup& M, const std::pair<AffineMap, AffineMap>& pair1,
                            const std::pair<AffineMap, AffineMap>& pair2, const EquivalenceWitness& w);

}  // namespace flatfold
