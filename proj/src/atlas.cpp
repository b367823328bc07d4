#include "flatfold/atlas.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#ifndef FLATFOLD_ATLAS_DEFAULT
#define FLATFOLD_ATLAS_DEFAULT "atlas"
#endif

namespace flatfold {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::optional<std::string> dash_is_empty(const std::string& s) {
  if (s == "-" || s.empty()) return std::nullopt;
  return s;
}

bool contains_name(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) h = (h ^ c) * 0x100000001b3ull;
  return h;
}

std::pair<std::size_t, std::vector<Integer>> parse_homology(const std::string& s) {
  std::size_t betti = 0;
  std::vector<Integer> torsion;
  for (const auto& term : split(s, '+')) {
    if (term.empty() || term[0] != 'Z') throw ParseError("bad homology term: " + term);
    auto caret = term.find('^');
    std::string base = term.substr(1, caret == std::string::npos ? std::string::npos : caret - 1);
    long mult = caret == std::string::npos ? 1 : std::stol(term.substr(caret + 1));
    if (base.empty()) {
      betti += static_cast<std::size_t>(mult);
    } else {
      for (long i = 0; i < mult; ++i) torsion.emplace_back(base);
    }
  }
  std::sort(torsion.begin(), torsion.end());
  return {betti, torsion};
}

std::string default_atlas_dir() {
  if (const char* env = std::getenv("FLATFOLD_ATLAS_DIR"); env && *env) return env;
  return FLATFOLD_ATLAS_DEFAULT;
}

FibrationDescriptor TableRow::descriptor() const {
  FibrationDescriptor d;
  d.fiber_name = fiber;
  d.base = base;
  d.m = m;
  d.beta = beta;
  d.gamma = gamma;
  d.expected_manifold = manifold;
  d.expected_singular_fibers = singular_fibers;
  return d;
}

std::string Atlas::read_file(const std::string& rel) const {
  std::ifstream in(std::filesystem::path(dir_) / rel, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read atlas file " + (std::filesystem::path(dir_) / rel).string());
  std::ostringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  auto it = checksums_.find(rel);
  if (it != checksums_.end() && it->second != fnv1a64(text)) throw ChecksumMismatch("checksum mismatch for " + rel);
  return text;
}

Atlas::Atlas(std::string dir, bool verify_checksums) : dir_(std::move(dir)) {
  if (verify_checksums) {
    std::ifstream in(std::filesystem::path(dir_) / "CHECKSUMS");
    if (!in) throw ChecksumMismatch("missing CHECKSUMS in " + dir_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      std::string hex, rel;
      ls >> hex >> rel;
      checksums_[rel] = std::stoull(hex, nullptr, 16);
    }
    for (const auto& [rel, sum] : checksums_) read_file(rel);
  }
  auto text = read_file("manifolds.tsv");
  auto lines = split(text, '\n');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto c = split(lines[i], '\t');
    if (c.size() < 11) throw ParseError("manifolds.tsv: short row " + std::to_string(i + 1));
    AtlasEntry e;
    e.name = c[0];
    e.dim = std::stoul(c[1]);
    e.orientable = c[2] == "Y";
    e.i_fiber = c[3];
    e.j_label = c[4];
    e.structure_label = c[5];
    e.h1 = c[6];
    std::tie(e.betti, e.torsion) = parse_homology(c[6]);
    e.holonomy_label = c[7];
    e.odc = dash_is_empty(c[8]);
    e.bbnwz = c[9];
    e.it_number = dash_is_empty(c[10]);
    if (!index_.emplace(e.name, entries_.size()).second) throw ParseError("duplicate atlas name " + e.name);
    entries_.push_back(std::move(e));
  }
}

const AtlasEntry& Atlas::entry(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownName("unknown manifold " + name);
  return entries_[it->second];
}

std::vector<int> Atlas::table_ids() {
  std::vector<int> ids;
  for (int t = 6; t <= 34; ++t) ids.push_back(t);
  return ids;
}

std::vector<TableRow> Atlas::load_table(int table_id) const {
  if (table_id < 6 || table_id > 34) throw UnknownName("no table " + std::to_string(table_id));
  char rel[32];
  std::snprintf(rel, sizeof rel, "tables/table-%02d.tsv", table_id);
  auto lines = split(read_file(rel), '\n');
  std::vector<TableRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto c = split(lines[i], '\t');
    if (c.size() < 8) throw ParseError(std::string(rel) + ": short row");
    TableRow r;
    r.table_id = table_id;
    r.row_no = std::stoi(c[0]);
    r.manifold = c[1];
    r.fiber = c[2];
    if (c[3] == "circle") {
      r.base = BaseKind::Circle;
    } else if (c[3] == "interval") {
      r.base = BaseKind::Interval;
    } else {
      throw ParseError(std::string(rel) + ": bad base " + c[3]);
    }
    r.m = std::stol(c[4]);
    std::size_t fdim = load_group_file(r.fiber).dim;
    r.beta = parse_element(c[5], fdim);
    if (c[6] != "-") r.gamma = parse_element(c[6], fdim);
    if (c[7] != "-") {
      auto sf = split(c[7], ',');
      if (sf.size() != 2) throw ParseError(std::string(rel) + ": bad singular fibers " + c[7]);
      r.singular_fibers = std::make_pair(sf[0], sf[1]);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<TableRow> Atlas::load_all_tables() const {
  std::vector<TableRow> out;
  for (int t : table_ids()) {
    auto rows = load_table(t);
    out.insert(out.end(), rows.begin(), rows.end());
  }
  return out;
}

GroupFile Atlas::load_group_file(const std::string& name) const {
  auto rel = "groups/" + name + ".grp";
  if (!std::filesystem::exists(std::filesystem::path(dir_) / rel)) throw UnknownName("no group file for " + name);
  return parse_group_file(read_file(rel));
}

SpaceGroup Atlas::load_group(const std::string& name) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = group_cache_.find(name);
    if (it != group_cache_.end()) return *it->second;
  }
  auto gf = load_group_file(name);
  auto G = std::make_shared<const SpaceGroup>(close_group(gf.dim, gf.gens));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  group_cache_.emplace(name, G);
  return *G;
}

std::vector<std::string> Atlas::group_names() const {
  std::vector<std::string> out;
  for (const auto& f : std::filesystem::directory_iterator(std::filesystem::path(dir_) / "groups"))
    if (f.path().extension() == ".grp") out.push_back(f.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> Atlas::candidates(const InvariantRecord& r) const {
  std::vector<std::string> out;
  const std::string hol = canonical_label(r.holonomy_label);
  for (const auto& e : entries_) {
    if (e.dim != r.dim || e.orientable != r.orientable || e.betti != r.betti || e.torsion != r.h1_torsion) continue;
    if (canonical_label(e.holonomy_label) != hol) continue;
    out.push_back(e.name);
  }
  return out;
}

std::string Atlas::name_group(const SpaceGroup& G) const {
  if (G.dim() == 0) return "E0";
  if (G.dim() == 1) return is_torsion_free(G) ? "S1" : "I";
  auto c = candidates(invariant_record(G));
  std::string out;
  for (const auto& n : c) out += (out.empty() ? "" : "|") + n;
  return out.empty() ? "?" : out;
}

IdentifyQuery Atlas::full_query(const SpaceGroup& G) const {
  IdentifyQuery q;
  q.record = invariant_record(G);
  CalabiData cd = calabi_data(G);
  const std::size_t k = cd.I.V.size();
  if (k == 0) {
    q.i_candidates = std::vector<std::string>{"E0"};
  } else if (k == G.dim()) {
    q.i_candidates = std::vector<std::string>{"self"};
  } else if (k == 1) {
    q.i_candidates = std::vector<std::string>{"S1"};
  } else {
    q.i_candidates = candidates(invariant_record(cd.I_group));
  }
  q.j_torsion_free = cd.J_torsion_free;
  if (cd.J_torsion_free) {
    if (k == 0) {
      q.j_candidates = std::vector<std::string>{"E0"};
    } else if (k == G.dim()) {
      q.j_candidates = std::vector<std::string>{"self"};
    } else if (k == 1) {
      q.j_candidates = std::vector<std::string>{"S1"};
    } else {
      q.j_candidates = candidates(invariant_record(cd.J_group));
    }
  }
  q.structure_label = cd.structure_group.label;
  if (!q.record.orientable) q.odc_candidates = candidates(invariant_record(orientation_double_cover(G)));
  return q;
}

std::vector<std::string> Atlas::identify(const IdentifyQuery& q) const {
  std::vector<std::string> out;
  auto is_manifold_label = [&](const std::string& s) { return s == "E0" || s == "S1" || has_entry(s); };
  for (const auto& name : candidates(q.record)) {
    const AtlasEntry& e = entry(name);
    if (q.i_candidates) {
      const auto& ic = *q.i_candidates;
      bool self = e.i_fiber == e.name && contains_name(ic, "self");
      if (!self && !contains_name(ic, e.i_fiber)) continue;
    }
    if (q.j_torsion_free && *q.j_torsion_free != is_manifold_label(e.j_label)) continue;
    if (q.j_candidates) {
      bool self = e.j_label == e.name && contains_name(*q.j_candidates, "self");
      if (!self && !contains_name(*q.j_candidates, e.j_label)) continue;
    }
    if (q.structure_label && canonical_label(e.structure_label) != canonical_label(*q.structure_label)) continue;
    if (q.odc_candidates && (!e.odc || !contains_name(*q.odc_candidates, *e.odc))) continue;
    if (q.j_label && e.j_label != *q.j_label) continue;
    out.push_back(name);
  }
  if (out.empty()) throw EmptyCandidateSet("no atlas entry matches " + format_record(q.record));
  return out;
}

FibrationMatch identify_fibration(const Atlas& atlas, const std::vector<TableRow>& rows, const SpaceGroup& G,
                                  const std::vector<RatVector>& V, const SearchBounds& bounds) {
  FibrationMatch out;
  ExtractedFibration ex = extract_fibration(G, V);
  out.kind = ex.kind;
  out.fiber = atlas.name_group(ex.fiber);
  if (!atlas.has_entry(out.fiber)) throw UnrecognizedGroup("fiber is not identified uniquely: " + out.fiber);
  SpaceGroup M = atlas.load_group(out.fiber);
  auto phi = find_affine_conjugator(ex.fiber, M, bounds);
  if (!phi) throw UnrecognizedGroup("no bounded affine conjugator onto the atlas fiber " + out.fiber);
  AffineMap phii = phi->inverse();
  out.beta = *phi * ex.beta * phii;
  if (ex.gamma) out.gamma = *phi * *ex.gamma * phii;
  const bool interval = ex.kind == OrbifoldType::InfiniteDihedral;
  auto ord = affinity_order(M, interval ? *out.gamma * out.beta : out.beta);
  if (!ord) throw PreconditionViolated("extracted monodromy has infinite order");
  out.m = *ord;
  const BaseKind base = interval ? BaseKind::Interval : BaseKind::Circle;
  std::vector<AffineMap> sample;
  bool have_sample = false;
  for (const auto& row : rows) {
    if (row.fiber != out.fiber || row.base != base) continue;
    EquivalenceVerdict v;
    if (row.m != out.m) {
      v.kind = EquivalenceVerdict::Kind::InequivalentByInvariant;
      v.invariant = "structure group";
    } else {
      if (!have_sample) {
        sample = normalizer_sample(M, bounds);
        have_sample = true;
      }
      v = interval ? interval_pairs_equivalent(M, {out.beta, *out.gamma}, {row.beta, *row.gamma}, bounds, &sample)
                   : circle_fiberings_equivalent(M, out.beta, row.beta, bounds, &sample);
    }
    if (v.kind == EquivalenceVerdict::Kind::Equivalent && !contains_name(out.manifolds, row.manifold))
      out.manifolds.push_back(row.manifold);
    out.verdicts.emplace_back(&row, std::move(v));
  }
  return out;
}

}  // namespace flatfold
