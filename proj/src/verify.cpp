#include "flatfold/verify.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace flatfold {

namespace {

CheckResult check(std::string name, bool ok, std::string detail = {}) {
  return CheckResult{std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
}

std::string base_name(BaseKind b) { return b == BaseKind::Circle ? "circle" : "interval"; }

BuiltTotal build_row(const SpaceGroup& M, const TableRow& row) {
  return row.base == BaseKind::Circle ? build_circle_total(M, row.beta, row.m)
                                      : build_interval_total(M, row.beta, *row.gamma, row.m);
}

FiberingSignature row_signature(const SpaceGroup& M, const TableRow& row) {
  return row.base == BaseKind::Circle ? circle_signature(M, row.beta) : interval_signature(M, row.beta, *row.gamma);
}

std::optional<EquivalenceWitness> row_search(const SpaceGroup& M, const TableRow& a, const TableRow& b,
                                             const SearchBounds& bounds, const std::vector<AffineMap>& sample) {
  if (a.base == BaseKind::Circle) return search_circle_equivalence(M, a.beta, b.beta, bounds, sample);
  return search_interval_equivalence(M, {a.beta, *a.gamma}, {b.beta, *b.gamma}, bounds, sample);
}

std::string structure_name(BaseKind base, std::size_t order) {
  return base == BaseKind::Circle ? "C" + std::to_string(order) : "D" + std::to_string(order / 2);
}

std::string escape_tsv(std::string s) {
  for (auto& c : s)
    if (c == '\t' || c == '\n') c = ' ';
  return s;
}

}  // namespace

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Unknown: return "unknown";
  }
  return "?";
}

bool RowReport::passed() const {
  for (const auto& c : checks)
    if (c.status == CheckStatus::Fail) return false;
  return true;
}

RowReport verify_row(const Atlas& atlas, const TableRow& row) {
  RowReport r;
  r.table_id = row.table_id;
  r.row_no = row.row_no;
  r.manifold = row.manifold;
  r.base = row.base;
  auto& out = r.checks;
  try {
    SpaceGroup M = atlas.load_group(row.fiber);
    BuiltTotal T = build_row(M, row);
    const SpaceGroup& G = T.G;
    out.push_back(check("torsion-free", is_torsion_free(G)));

    out.push_back(check("fiber complete", is_complete(G, T.N.sub_generators)));
    std::string fiber = atlas.name_group(fiber_group(T.N));
    out.push_back(check("fiber type", fiber == row.fiber, fiber));
    OrbifoldType kind = quotient_1orbifold_type(G, T.N);
    OrbifoldType want = row.base == BaseKind::Circle ? OrbifoldType::InfiniteCyclic : OrbifoldType::InfiniteDihedral;
    out.push_back(check("base", kind == want, to_string(kind)));

    StructureGroup sg = structure_group(G, T.N, action_kernel(G, T.N.V));
    const std::size_t order = sg.group.table.order();
    const std::size_t want_order = static_cast<std::size_t>(row.base == BaseKind::Circle ? row.m : 2 * row.m);
    out.push_back(check("structure group", order == want_order, structure_name(row.base, order)));

    const AtlasEntry& e = atlas.entry(row.manifold);
    InvariantRecord rec = invariant_record(G);
    std::string h1 = format_homology(rec.betti, rec.h1_torsion);
    out.push_back(check("homology", rec.betti == e.betti && rec.h1_torsion == e.torsion, h1));
    out.push_back(check("holonomy", canonical_label(rec.holonomy_label) == canonical_label(e.holonomy_label),
                        rec.holonomy_label));
    out.push_back(check("orientability", rec.orientable == e.orientable, rec.orientable ? "Y" : "N"));

    if (row.base == BaseKind::Interval) {
      auto [sb, sc] = singular_fibers(M, row.beta, *row.gamma);
      std::vector<std::string> got{atlas.name_group(sb), atlas.name_group(sc)};
      std::sort(got.begin(), got.end());
      std::vector<std::string> want_sf;
      if (row.singular_fibers) want_sf = {row.singular_fibers->first, row.singular_fibers->second};
      std::sort(want_sf.begin(), want_sf.end());
      out.push_back(check("singular fibers", got == want_sf, got[0] + "," + got[1]));
    }

    CalabiData cd = calabi_data(G);
    out.push_back(check("J betti", cd.J_fixed_dim == 0, std::to_string(cd.J_fixed_dim)));
    auto names = atlas.identify(atlas.full_query(G));
    std::string joined;
    for (const auto& n : names) joined += (joined.empty() ? "" : "|") + n;
    out.push_back(check("identify", std::find(names.begin(), names.end(), row.manifold) != names.end(), joined));
  } catch (const std::exception& ex) {
    out.push_back(check("build", false, ex.what()));
  }
  return r;
}

std::vector<PairReport> verify_pairs(const Atlas& atlas, const std::vector<TableRow>& rows, const VerifyOptions& opts) {
  std::vector<PairReport> out;
  std::vector<std::optional<FiberingSignature>> sig(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      sig[i] = row_signature(atlas.load_group(rows[i].fiber), rows[i]);
    } catch (const std::exception&) {
    }
  }
  std::map<std::pair<std::string, long>, std::vector<AffineMap>> samples;
  auto sample_for = [&](const std::string& fiber, const SearchBounds& b) -> const std::vector<AffineMap>& {
    auto key = std::make_pair(fiber, b.entry_bound);
    auto it = samples.find(key);
    if (it == samples.end()) it = samples.emplace(key, normalizer_sample(atlas.load_group(fiber), b)).first;
    return it->second;
  };
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = i + 1; j < rows.size(); ++j) {
      PairReport p;
      p.table_id = rows[i].table_id;
      p.row_a = rows[i].row_no;
      p.row_b = rows[j].row_no;
      if (!sig[i] || !sig[j] || rows[i].fiber != rows[j].fiber || rows[i].base != rows[j].base) {
        p.verdict.kind = EquivalenceVerdict::Kind::InequivalentByInvariant;
        p.verdict.invariant = !sig[i] || !sig[j] ? "unbuildable row" : "fiber or base";
        out.push_back(std::move(p));
        continue;
      }
      if (auto sep = separating_entry(*sig[i], *sig[j])) {
        p.verdict.kind = EquivalenceVerdict::Kind::InequivalentByInvariant;
        p.verdict.invariant = *sep;
        out.push_back(std::move(p));
        continue;
      }
      SpaceGroup M = atlas.load_group(rows[i].fiber);
      SearchBounds b = opts.bounds;
      std::vector<long> tries{b.entry_bound};
      if (opts.escalation_bound > b.entry_bound) tries.push_back(opts.escalation_bound);
      for (long eb : tries) {
        b.entry_bound = eb;
        p.entry_bound = eb;
        p.verdict.witness = row_search(M, rows[i], rows[j], b, sample_for(rows[i].fiber, b));
        if (p.verdict.witness) break;
      }
      p.verdict.kind = p.verdict.witness ? EquivalenceVerdict::Kind::Equivalent
                                         : EquivalenceVerdict::Kind::UnknownWithinBounds;
      out.push_back(std::move(p));
    }
  return out;
}

VerificationReport verify_tables(const Atlas& atlas, const std::vector<int>& table_ids, const VerifyOptions& opts) {
  VerificationReport rep;
  std::vector<std::vector<TableRow>> tables;
  std::vector<const TableRow*> all;
  for (int id : table_ids) tables.push_back(atlas.load_table(id));
  for (const auto& t : tables)
    for (const auto& r : t) all.push_back(&r);

  rep.rows.resize(all.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < all.size(); i = next++) rep.rows[i] = verify_row(atlas, *all[i]);
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opts.bounds.jobs, static_cast<unsigned>(all.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (opts.pairwise)
    for (const auto& t : tables) {
      auto p = verify_pairs(atlas, t, opts);
      rep.pairs.insert(rep.pairs.end(), p.begin(), p.end());
    }

  for (const auto& r : rep.rows) {
    (r.base == BaseKind::Circle ? rep.circle_rows : rep.interval_rows)++;
    for (const auto& c : r.checks) {
      if (c.status == CheckStatus::Pass) ++rep.passed;
      else if (c.status == CheckStatus::Fail) ++rep.failed;
      else ++rep.unknown;
    }
  }
  for (const auto& p : rep.pairs) {
    if (p.verdict.kind == EquivalenceVerdict::Kind::Equivalent) ++rep.failed;
    else if (p.verdict.kind == EquivalenceVerdict::Kind::UnknownWithinBounds) ++rep.unknown;
    else ++rep.passed;
  }
  return rep;
}

std::vector<std::string> VerificationReport::unknown_list() const {
  std::vector<std::string> out;
  for (const auto& p : pairs)
    if (p.verdict.kind == EquivalenceVerdict::Kind::UnknownWithinBounds)
      out.push_back("table " + std::to_string(p.table_id) + " rows " + std::to_string(p.row_a) + "/" +
                    std::to_string(p.row_b));
  return out;
}

int VerificationReport::exit_code(bool strict) const {
  if (failed > 0) return 1;
  if (strict && unknown > 0) return 1;
  return 0;
}

std::string VerificationReport::to_text() const {
  std::ostringstream os;
  for (const auto& r : rows) {
    os << "table " << r.table_id << " row " << r.row_no << " " << r.manifold << " (" << base_name(r.base) << "): "
       << (r.passed() ? "pass" : "FAIL") << "\n";
    for (const auto& c : r.checks)
      if (c.status != CheckStatus::Pass) os << "  " << c.name << ": " << to_string(c.status) << " " << c.detail << "\n";
  }
  for (const auto& p : pairs)
    if (p.verdict.kind == EquivalenceVerdict::Kind::Equivalent)
      os << "table " << p.table_id << " rows " << p.row_a << "/" << p.row_b << ": FAIL equivalent\n";
  os << "rows: " << rows.size() << " (circle " << circle_rows << ", interval " << interval_rows << ")\n";
  os << "checks: " << passed << " passed, " << failed << " failed, " << unknown << " unknown\n";
  auto unk = unknown_list();
  os << "unknown pairs: " << unk.size() << "\n";
  for (const auto& u : unk) os << "  " << u << "\n";
  return os.str();
}

std::string VerificationReport::to_tsv() const {
  std::ostringstream os;
  os << "table\trow\tmanifold\tcheck\tstatus\tdetail\n";
  for (const auto& r : rows)
    for (const auto& c : r.checks)
      os << r.table_id << "\t" << r.row_no << "\t" << r.manifold << "\t" << c.name << "\t" << to_string(c.status) << "\t"
         << escape_tsv(c.detail) << "\n";
  for (const auto& p : pairs) {
    std::string status = p.verdict.kind == EquivalenceVerdict::Kind::Equivalent           ? "FAIL"
                         : p.verdict.kind == EquivalenceVerdict::Kind::UnknownWithinBounds ? "unknown"
                                                                                            : "pass";
    std::string detail = p.verdict.kind == EquivalenceVerdict::Kind::InequivalentByInvariant
                             ? p.verdict.invariant
                             : "entry bound " + std::to_string(p.entry_bound);
    os << p.table_id << "\t" << p.row_a << "/" << p.row_b << "\t-\tinequivalence\t" << status << "\t"
       << escape_tsv(detail) << "\n";
  }
  return os.str();
}

std::string emit_table(const Atlas& atlas, int table_id, const std::string& format) {
  if (format != "markdown" && format != "tsv") throw std::invalid_argument("unknown table format: " + format);
  const bool md = format == "markdown";
  auto rows = atlas.load_table(table_id);
  const bool interval = !rows.empty() && rows.front().base == BaseKind::Interval;
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (md ? (i ? " | " : "| ") : (i ? "\t" : "")) << cells[i];
    os << (md ? " |\n" : "\n");
  };
  std::vector<std::string> head{"no.", "mfd.", "fbr.", "grp.", "beta"};
  if (interval) head.insert(head.end(), {"gamma", "s-fbrs."});
  if (md) os << "Table " << table_id << "\n\n";
  line(head);
  if (md) line(std::vector<std::string>(head.size(), "---"));
  for (const auto& r : rows) {
    std::string grp = "?", sf = "?";
    try {
      SpaceGroup M = atlas.load_group(r.fiber);
      BuiltTotal T = build_row(M, r);
      grp = structure_name(r.base, structure_group(T.G, T.N, action_kernel(T.G, T.N.V)).group.table.order());
      if (interval) {
        auto [sb, sc] = singular_fibers(M, r.beta, *r.gamma);
        sf = atlas.name_group(sb) + ", " + atlas.name_group(sc);
      }
    } catch (const std::exception&) {
    }
    std::vector<std::string> cells{std::to_string(r.row_no), r.manifold, r.fiber, grp, format_element(r.beta)};
    if (interval) cells.insert(cells.end(), {format_element(*r.gamma), sf});
    line(cells);
  }
  return os.str();
}

}  // namespace flatfold
