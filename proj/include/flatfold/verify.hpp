#pragma once
// Row-by-row verification of the fibration tables and their text renderings.

#include "flatfold/atlas.hpp"

#include <string>
#include <vector>

namespace flatfold {

enum class CheckStatus { Pass, Fail, Unknown };
std::string to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct RowReport {
  int table_id = 0;
  int row_no = 0;
  std::string manifold;
  BaseKind base = BaseKind::Circle;
  std::vector<CheckResult> checks;
  bool passed() const;
};

struct PairReport {
  int table_id = 0;
  int row_a = 0, row_b = 0;
  EquivalenceVerdict verdict;
  long entry_bound = 0;  // bound of the last search, 0 if an invariant separated the pair
};

struct VerifyOptions {
  SearchBounds bounds;
  long escalation_bound = 3;  // retry Unknown pairs with this entry bound; <= bounds.entry_bound disables
  bool pairwise = true;
};

struct VerificationReport {
  std::vector<RowReport> rows;
  std::vector<PairReport> pairs;
  std::size_t passed = 0, failed = 0, unknown = 0;  // over all row checks and pairs
  std::size_t circle_rows = 0, interval_rows = 0;

  std::vector<std::string> unknown_list() const;
  int exit_code(bool strict) const;
  std::string to_text() const;
  std::string to_tsv() const;
};

RowReport verify_row(const Atlas& atlas, const TableRow& row);
// Verdicts for every pair of distinct rows of one table.
std::vector<PairReport> verify_pairs(const Atlas& atlas, const std::vector<TableRow>& rows, const VerifyOptions& opts);
VerificationReport verify_tables(const Atlas& atlas, const std::vector<int>& table_ids, const VerifyOptions& opts);

// Regenerates a table from the atlas rows with computed structure group and singular fiber columns.
std::string emit_table(const Atlas& atlas, int table_id, const std::string& format);

}  // namespace flatfold
