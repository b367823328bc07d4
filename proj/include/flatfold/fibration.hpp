#pragma once
// Complete normal subgroups, generalized and original Calabi data, and the circle / interval builders.

#include "flatfold/spacegroup.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace flatfold {

struct PreconditionViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TorsionDetected : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InfiniteStructureGroup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NormalSubgroupData {
  std::vector<AffineMap> sub_generators;
  SpaceGroup sub;  // closure; its lattice spans V
  std::vector<RatVector> V;
  std::vector<RatVector> V_perp;
};

// Gram matrix of an inner product preserved by the point group (sum of A^T A).
RatMatrix invariant_form(const SpaceGroup& G);
// Complement of V with respect to the invariant form.
std::vector<RatVector> invariant_complement(const SpaceGroup& G, const std::vector<RatVector>& V);

std::vector<RatVector> span_of(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens);
bool is_normal(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens);
// {a+A in G : a in V and V-perp inside Fix(A)}
NormalSubgroupData completion(const SpaceGroup& G, const std::vector<RatVector>& V);
NormalSubgroupData completion(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens);
bool is_complete(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens);
NormalSubgroupData make_normal_subgroup(const std::vector<AffineMap>& sub_gens, std::size_t dim);
// {b+B in G : b in V-perp and V inside Fix(B)}
NormalSubgroupData action_kernel(const SpaceGroup& G, const std::vector<RatVector>& V);
// N and K intersect trivially and commute elementwise.
bool forms_direct_product(const NormalSubgroupData& N, const NormalSubgroupData& K);

// Coordinates adapted to a splitting E = V + W, with V measured in a basis of a lattice inside V.
class SubspaceFrame {
 public:
  SubspaceFrame(std::vector<RatVector> V, std::vector<RatVector> W, const std::vector<RatVector>& lattice_vectors);
  std::size_t dim() const { return lattice_.size(); }
  // Component of x in V, in lattice coordinates.
  RatVector coords(const RatVector& x) const;
  // Component of x in W, in the given W basis.
  RatVector complement_coords(const RatVector& x) const;
  // Induced map on V (the map must preserve V and W).
  AffineMap restrict(const AffineMap& g) const;
  const std::vector<RatVector>& lattice_basis() const { return lattice_; }

 private:
  std::size_t n_ = 0, d_ = 0;
  RatMatrix to_split_;  // E -> (V coords, W coords)
  RatMatrix to_lattice_;  // V coords -> lattice coords
  std::vector<RatVector> lattice_;  // lattice basis vectors in E
};

// The space group induced on V by elements preserving V and W, with lattice spanned by the projected lattice vectors.
SpaceGroup induced_group(const std::vector<AffineMap>& elems, const SubspaceFrame& frame, std::size_t cap = kDefaultClosureCap);
SubspaceFrame subgroup_frame(const NormalSubgroupData& N);
// N acting on V, in coordinates of a basis of its lattice.
SpaceGroup fiber_group(const NormalSubgroupData& N);

struct QuotientGroup {
  FiniteGroup table;
  std::vector<AffineMap> reps;  // one element of G per quotient element
  std::optional<std::string> label;
};
// G / S for a normal subgroup S whose lattice has full rank.
QuotientGroup quotient_group(const SpaceGroup& G, const std::vector<AffineMap>& normal_gens);

struct StructureGroup {
  QuotientGroup group;
  std::vector<AffineMap> action_on_V;      // induced affinities of V/N
  std::vector<AffineMap> action_on_Vperp;  // induced affinities of V-perp/K
};
StructureGroup structure_group(const SpaceGroup& G, const NormalSubgroupData& N, const NormalSubgroupData& K);

enum class OrbifoldType { InfiniteCyclic, InfiniteDihedral, Other };
std::string to_string(OrbifoldType t);
OrbifoldType quotient_1orbifold_type(const SpaceGroup& G, const NormalSubgroupData& N);

enum class BaseKind { Circle, Interval };

struct FibrationDescriptor {
  std::string fiber_name;
  BaseKind base = BaseKind::Circle;
  long m = 1;
  AffineMap beta;
  std::optional<AffineMap> gamma;
  std::string expected_manifold;
  std::optional<std::pair<std::string, std::string>> expected_singular_fibers;
};

struct BuiltTotal {
  SpaceGroup G;
  NormalSubgroupData N;
};

// Extends a fiber element to E^n, fixing e_n (sign = +1) or reversing it (sign = -1), with offset along e_n.
AffineMap hat(const AffineMap& g, int sign, const Rational& offset);
BuiltTotal build_circle_total(const SpaceGroup& M, const AffineMap& beta, long m);
BuiltTotal build_interval_total(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma, long m);
std::pair<SpaceGroup, SpaceGroup> singular_fibers(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma);

// Monodromy data read off a group with a complete normal subgroup of codimension one.
struct ExtractedFibration {
  NormalSubgroupData N;
  SpaceGroup fiber;  // N in the coordinates of its lattice
  OrbifoldType kind = OrbifoldType::Other;
  AffineMap beta;                  // generator (circle) or first reflection (interval), acting on the fiber
  std::optional<AffineMap> gamma;  // adjacent reflection (interval)
};
ExtractedFibration extract_fibration(const SpaceGroup& G, const std::vector<RatVector>& V);

struct CalabiData {
  NormalSubgroupData I;
  Lattice Z;
  std::size_t betti = 0;
  QuotientGroup structure_group;
  SpaceGroup I_group;  // I acting on Span(I)
  SpaceGroup J_group;  // G / Z acting on Span(I)
  std::size_t J_fixed_dim = 0;
  bool J_torsion_free = false;
  std::size_t Z_rank = 0;
};
CalabiData calabi_data(const SpaceGroup& G);
// Span of (A - I)x over the point group: the invariant complement of the fixed space.
std::vector<RatVector> moving_space(const SpaceGroup& G);

}  // namespace flatfold
