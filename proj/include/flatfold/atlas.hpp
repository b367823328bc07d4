#pragma once
// Golden data: flat 2-, 3- and 4-manifold invariants, fiber groups and fibration tables.

#include "flatfold/classify.hpp"
#include "flatfold/fibration.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatfold {

struct UnknownName : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyCandidateSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ChecksumMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AtlasEntry {
  std::string name;
  std::size_t dim = 0;
  bool orientable = true;
  std::string h1;  // as printed, e.g. Z+Z2^2
  std::size_t betti = 0;
  std::vector<Integer> torsion;
  std::string holonomy_label;
  std::string i_fiber;
  std::string j_label;
  std::string structure_label;
  std::optional<std::string> odc;
  std::string bbnwz;
  std::optional<std::string> it_number;
};

struct TableRow {
  int table_id = 0;
  int row_no = 0;
  std::string manifold;
  std::string fiber;
  BaseKind base = BaseKind::Circle;
  long m = 1;
  AffineMap beta;
  std::optional<AffineMap> gamma;
  std::optional<std::pair<std::string, std::string>> singular_fibers;

  FibrationDescriptor descriptor() const;
};

// Parses "Z^2+Z2^2" style homology strings.
std::pair<std::size_t, std::vector<Integer>> parse_homology(const std::string& s);
std::uint64_t fnv1a64(const std::string& bytes);

// FLATFOLD_ATLAS_DIR if set, otherwise the directory configured at build time.
std::string default_atlas_dir();

struct IdentifyQuery {
  InvariantRecord record;
  std::optional<std::vector<std::string>> i_candidates;  // names, "E0", "S1" or "self"
  std::optional<bool> j_torsion_free;
  std::optional<std::vector<std::string>> j_candidates;  // when J is torsion-free
  std::optional<std::string> structure_label;  // Calabi structure group
  std::optional<std::vector<std::string>> odc_candidates;
  std::optional<std::string> j_label;          // opaque, equality only
};

class Atlas {
 public:
  explicit Atlas(std::string dir = default_atlas_dir(), bool verify_checksums = true);

  const std::string& dir() const { return dir_; }
  const std::vector<AtlasEntry>& entries() const { return entries_; }
  const AtlasEntry& entry(const std::string& name) const;
  bool has_entry(const std::string& name) const { return index_.count(name) > 0; }

  static std::vector<int> table_ids();
  std::vector<TableRow> load_table(int table_id) const;
  std::vector<TableRow> load_all_tables() const;
  GroupFile load_group_file(const std::string& name) const;
  SpaceGroup load_group(const std::string& name) const;
  std::vector<std::string> group_names() const;

  // Names of entries consistent with the query; throws EmptyCandidateSet when none are.
  std::vector<std::string> identify(const IdentifyQuery& q) const;
  // Candidates from orientability, H1 and holonomy alone (may be empty).
  std::vector<std::string> candidates(const InvariantRecord& r) const;
  // Unique name of a low-dimensional manifold group, or the candidate list joined by '|'.
  std::string name_group(const SpaceGroup& G) const;
  // Full query with Calabi data and orientation double cover.
  IdentifyQuery full_query(const SpaceGroup& G) const;

 private:
  std::string read_file(const std::string& rel) const;

  std::string dir_;
  std::vector<AtlasEntry> entries_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, std::uint64_t> checksums_;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<const SpaceGroup>> group_cache_;
};

struct FibrationMatch {
  std::string fiber;
  OrbifoldType kind = OrbifoldType::Other;
  long m = 0;
  AffineMap beta;  // in atlas coordinates of the fiber
  std::optional<AffineMap> gamma;
  std::vector<std::pair<const TableRow*, EquivalenceVerdict>> verdicts;
  std::vector<std::string> manifolds;  // from rows with an Equivalent verdict
};

// Reads off the fibering of G along V, moves it to the atlas fiber coordinates and compares it
// with the table rows of that fiber and base.
FibrationMatch identify_fibration(const Atlas& atlas, const std::vector<TableRow>& rows, const SpaceGroup& G,
                                  const std::vector<RatVector>& V, const SearchBounds& bounds);

}  // namespace flatfold
