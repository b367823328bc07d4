// One PASS/FAIL line per acceptance criterion; exit status 0 iff every criterion passes.
#include "flatfold/verify.hpp"

#include <chrono>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

using namespace flatfold;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Built {
  const TableRow* row;
  SpaceGroup M;
  BuiltTotal total;
};

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, double secs) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << std::setw(2) << id << "  " << what << ": " << detail << " ("
            << std::fixed << std::setprecision(2) << secs << " s)" << std::endl;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
  return s;
}

bool circle_table(int id) {
  static const std::set<int> ids{6, 8, 10, 11, 15, 16, 19, 21, 23, 24, 25, 29, 31, 33};
  return ids.count(id) > 0;
}

}  // namespace

int main() {
  Atlas atlas;
  const SearchBounds bounds;

  // 1. Row counts.
  auto t0 = Clock::now();
  std::map<int, std::vector<TableRow>> tables;
  for (int id : Atlas::table_ids()) tables[id] = atlas.load_table(id);
  {
    const std::vector<std::pair<std::vector<int>, std::size_t>> groups{
        {{6}, 7},      {{7}, 7},          {{8}, 4},      {{9}, 1},      {{10, 11}, 16}, {{12, 13, 14}, 43},
        {{15, 16}, 20}, {{17, 18}, 28},   {{19}, 6},     {{20}, 4},     {{21}, 4},      {{22}, 1},
        {{23}, 2},     {{24}, 13},        {{25}, 14},    {{26, 27, 28}, 37}, {{29}, 7}, {{30}, 1},
        {{31}, 8},     {{32}, 1},         {{33}, 8},     {{34}, 1}};
    bool ok = true;
    std::vector<std::string> bad;
    for (const auto& [ids, want] : groups) {
      std::size_t got = 0;
      for (int id : ids) got += tables[id].size();
      if (got != want) {
        ok = false;
        bad.push_back("table " + std::to_string(ids.front()) + " has " + std::to_string(got));
      }
    }
    std::size_t three = 0, circle = 0, interval = 0;
    for (const auto& [id, rows] : tables)
      for (const auto& r : rows) {
        if (r.beta.dim() == 2) ++three;
        else (r.base == BaseKind::Circle ? circle : interval)++;
      }
    double secs = seconds_since(t0);
    ok = ok && three == 19 && circle == 98 && interval == 116 && secs < 1.0;
    report(1, ok, "row counts",
           std::to_string(three) + " three-dimensional, " + std::to_string(circle) + " circle, " +
               std::to_string(interval) + " interval, total " + std::to_string(circle + interval) +
               (bad.empty() ? "" : "; " + join(bad, ", ")),
           secs);
  }

  // Build every total group once.
  std::vector<Built> built;
  std::vector<std::string> build_errors;
  auto tb = Clock::now();
  for (const auto& [id, rows] : tables)
    for (const auto& r : rows) {
      try {
        SpaceGroup M = atlas.load_group(r.fiber);
        BuiltTotal T = r.base == BaseKind::Circle ? build_circle_total(M, r.beta, r.m)
                                                  : build_interval_total(M, r.beta, *r.gamma, r.m);
        built.push_back({&r, M, std::move(T)});
      } catch (const std::exception& e) {
        build_errors.push_back("table " + std::to_string(id) + " row " + std::to_string(r.row_no) + ": " + e.what());
      }
    }
  const double build_secs = seconds_since(tb);
  auto where = [](const TableRow& r) { return std::to_string(r.table_id) + "/" + std::to_string(r.row_no); };

  // 2. Torsion-freeness.
  {
    auto t = Clock::now();
    std::vector<std::string> bad = build_errors;
    for (const auto& b : built)
      if (!is_torsion_free(b.total.G)) bad.push_back(where(*b.row));
    double secs = seconds_since(t) + build_secs;
    report(2, bad.empty() && built.size() == 233 && secs < 60,
           "torsion-freeness", std::to_string(built.size() - (bad.size() - build_errors.size())) + "/233 built groups torsion-free" +
               (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           secs);
  }

  // 3. Homology.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    std::string sample6, sample24;
    for (const auto& b : built) {
      const AtlasEntry& e = atlas.entry(b.row->manifold);
      Homology h = first_homology(b.total.G);
      if (h.betti != e.betti || h.torsion != e.torsion) bad.push_back(where(*b.row));
      if (b.row->table_id == 6 && b.row->row_no == 2) sample6 = format_homology(h.betti, h.torsion);
      if (b.row->table_id == 24 && b.row->row_no == 1) sample24 = format_homology(h.betti, h.torsion);
    }
    double secs = seconds_since(t);
    bool ok = bad.empty() && built.size() == 233 && sample6 == "Z+Z2^2" && sample24 == "Z+Z4^2" && secs < 120;
    report(3, ok, "homology",
           "H1 matches for " + std::to_string(built.size() - bad.size()) + "/233 rows; table 6 row 2 " + sample6 +
               ", table 24 row 1 " + sample24 + (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           secs);
  }

  // 4. Holonomy and orientability.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    for (const auto& b : built) {
      const AtlasEntry& e = atlas.entry(b.row->manifold);
      if (canonical_label(holonomy_class(b.total.G)) != canonical_label(e.holonomy_label) ||
          is_orientable(b.total.G) != e.orientable)
        bad.push_back(where(*b.row));
    }
    report(4, bad.empty() && built.size() == 233, "holonomy and orientability",
           std::to_string(built.size() - bad.size()) + "/233 rows match" + (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           seconds_since(t));
  }

  // 5. Fiber and base.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    for (const auto& b : built) {
      const auto& r = *b.row;
      bool ok = is_complete(b.total.G, b.total.N.sub_generators);
      ok = ok && atlas.name_group(fiber_group(b.total.N)) == r.fiber;
      OrbifoldType want = circle_table(r.table_id) ? OrbifoldType::InfiniteCyclic : OrbifoldType::InfiniteDihedral;
      ok = ok && quotient_1orbifold_type(b.total.G, b.total.N) == want;
      if (!ok) bad.push_back(where(r));
    }
    report(5, bad.empty() && built.size() == 233, "fiber and base",
           std::to_string(built.size() - bad.size()) + "/233 rows: complete, fiber unique, orbifold type as tabulated" +
               (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           seconds_since(t));
  }

  // 6. Structure groups.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    for (const auto& b : built) {
      const auto& r = *b.row;
      StructureGroup sg = structure_group(b.total.G, b.total.N, action_kernel(b.total.G, b.total.N.V));
      if (sg.group.table.order() != std::size_t(r.base == BaseKind::Circle ? r.m : 2 * r.m))
        bad.push_back("fibering " + where(r));
    }
    // Original Calabi structure groups: group files for dimensions 2 and 3, one built total per 4-manifold.
    std::map<std::string, const SpaceGroup*> golden;
    std::vector<SpaceGroup> files;
    for (const auto& name : atlas.group_names())
      if (atlas.has_entry(name)) files.push_back(atlas.load_group(name));
    std::size_t fi = 0;
    for (const auto& name : atlas.group_names())
      if (atlas.has_entry(name)) golden[name] = &files[fi++];
    for (const auto& b : built) golden.emplace(b.row->manifold, &b.total.G);
    std::string hw, n47;
    for (const auto& [name, G] : golden) {
      CalabiData cd = calabi_data(*G);
      std::string label = cd.structure_group.label.value_or("?");
      if (!cd.structure_group.table.is_abelian() ||
          canonical_label(label) != canonical_label(atlas.entry(name).structure_label))
        bad.push_back("Calabi " + name + " " + label);
      if (name == "O3_6") hw = label;
      if (name == "N4_7") n47 = label;
    }
    std::size_t manifolds = 0;
    for (const auto& e : atlas.entries()) manifolds += e.dim >= 2;
    bool ok = bad.empty() && golden.size() == manifolds && hw == "C1" &&
              canonical_label(n47) == canonical_label("C4xC2");
    report(6, ok, "structure groups",
           "233 fibering orders checked, " + std::to_string(golden.size()) + "/" + std::to_string(manifolds) +
               " Calabi groups match (O3_6 " + hw + ", N4_7 " + n47 + ")" +
               (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           seconds_since(t));
  }

  // 7. Singular fibers.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    std::size_t n = 0;
    for (const auto& b : built) {
      const auto& r = *b.row;
      if (r.base != BaseKind::Interval || r.beta.dim() == 2) continue;
      ++n;
      auto [p, q] = singular_fibers(b.M, r.beta, *r.gamma);
      std::multiset<std::string> got{atlas.name_group(p), atlas.name_group(q)};
      std::multiset<std::string> want;
      if (r.singular_fibers) want = {r.singular_fibers->first, r.singular_fibers->second};
      if (got != want) bad.push_back(where(r));
    }
    report(7, bad.empty() && n == 116, "singular fibers",
           std::to_string(n - bad.size()) + "/" + std::to_string(n) + " interval rows match" +
               (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           seconds_since(t));
  }

  // 8. Calabi invariants.
  {
    auto t = Clock::now();
    std::vector<std::string> bad;
    std::size_t literal = 0, total = 0;
    std::vector<const SpaceGroup*> groups;
    std::vector<SpaceGroup> files;
    for (const auto& name : atlas.group_names()) files.push_back(atlas.load_group(name));
    for (const auto& g : files) groups.push_back(&g);
    for (const auto& b : built) groups.push_back(&b.total.G);
    for (const SpaceGroup* G : groups) {
      ++total;
      CalabiData cd = calabi_data(*G);
      auto perp = invariant_complement(*G, cd.I.V);
      bool ok = perp.size() == cd.Z_rank && cd.Z.rank() == cd.Z_rank;
      for (const auto& z : cd.Z.basis()) ok = ok && in_span(perp, z);
      ok = ok && cd.J_fixed_dim == 0;
      ok = ok && betti_via_fixed_space(*G) == first_homology(*G).betti;
      if (!ok) bad.push_back(std::to_string(total));
      bool plain = true;
      for (const auto& z : cd.Z.basis())
        for (const auto& v : cd.I.V) plain = plain && dot(z, v) == 0;
      literal += plain;
    }
    report(8, bad.empty(), "Calabi invariants",
           std::to_string(total - bad.size()) + "/" + std::to_string(total) +
               " groups: Span Z is the invariant-form complement of Span I, J has Betti number 0, fixed-space Betti "
               "matches H1 (" + std::to_string(literal) + "/" + std::to_string(total) +
               " also orthogonal in the standard inner product)",
           seconds_since(t));
  }

  // 9. Class counts.
  {
    auto t = Clock::now();
    bool ok = true;
    std::string detail;
    for (std::size_t n : {2u, 3u}) {
      auto elems = finite_order_elements(n, bounds);
      Partition pairs = inverse_pair_classes(conjugacy_classes(elems, bounds));
      std::set<std::size_t> hit;
      std::size_t reps = 0;
      const std::string fiber = n == 2 ? "T2" : "O3_1";
      for (int id : n == 2 ? std::vector<int>{6} : std::vector<int>{10, 11})
        for (const auto& r : tables[id]) {
          if (r.fiber != fiber) continue;
          ++reps;
          for (std::size_t i = 0; i < pairs.elements.size(); ++i)
            if (pairs.elements[i] == r.beta.A) hit.insert(pairs.class_of[i]);
        }
      const std::size_t want = n == 2 ? 7 : 16;
      ok = ok && pairs.count == want && reps == want && hit.size() == want;
      detail += (detail.empty() ? "" : "; ") + std::string("n=") + std::to_string(n) + ": " +
                std::to_string(pairs.count) + " classes, " + std::to_string(hit.size()) + "/" + std::to_string(reps) +
                " tabulated monodromies in distinct classes";
    }
    double secs = seconds_since(t);
    report(9, ok && secs < 300, "GL(n,Z) class counts", detail, secs);
  }

  // 10. Order-2 fixed-point-free classes.
  {
    auto t = Clock::now();
    const std::vector<std::pair<std::string, std::size_t>> want{{"K2", 1},   {"O3_4", 1}, {"N3_2", 1}, {"N3_3", 1},
                                                                 {"N3_4", 1}, {"O3_5", 0}, {"O3_6", 0}};
    bool ok = true;
    std::vector<std::string> parts;
    for (const auto& [name, count] : want) {
      auto cls = order2_fixed_point_free_classes(atlas.load_group(name), bounds);
      ok = ok && cls.size() == count;
      parts.push_back(name + " " + std::to_string(cls.size()));
    }
    report(10, ok, "order-2 fixed-point-free classes", join(parts, ", "), seconds_since(t));
  }

  // 11. Inequivalence of distinct rows, positive controls and the residual Unknown list.
  {
    auto t = Clock::now();
    VerifyOptions vo;
    vo.bounds = bounds;
    std::vector<PairReport> pairs;
    for (const auto& [id, rows] : tables) {
      auto p = verify_pairs(atlas, rows, vo);
      pairs.insert(pairs.end(), p.begin(), p.end());
    }
    std::vector<std::string> equivalent, unknown;
    std::size_t separated = 0;
    for (const auto& p : pairs) {
      std::string tag = "table " + std::to_string(p.table_id) + " rows " + std::to_string(p.row_a) + "/" +
                        std::to_string(p.row_b);
      if (p.verdict.kind == EquivalenceVerdict::Kind::Equivalent) equivalent.push_back(tag);
      else if (p.verdict.kind == EquivalenceVerdict::Kind::UnknownWithinBounds) unknown.push_back(tag);
      else ++separated;
    }
    // Positive controls: rows against copies moved by a sampled normalizer element (and swapped for intervals).
    std::mt19937 rng(20261016);
    std::map<std::string, std::vector<AffineMap>> samples;
    std::size_t controls = 0, confirmed = 0;
    std::vector<const Built*> pool;
    for (const auto& b : built)
      if (b.row->beta.dim() == 3) pool.push_back(&b);
    for (int k = 0; k < 20; ++k) {
      const Built& b = *pool[rng() % pool.size()];
      const auto& r = *b.row;
      auto it = samples.find(r.fiber);
      if (it == samples.end()) it = samples.emplace(r.fiber, normalizer_sample(b.M, bounds)).first;
      const AffineMap& psi = it->second[rng() % it->second.size()];
      ++controls;
      if (r.base == BaseKind::Circle) {
        AffineMap target = psi * r.beta * psi.inverse();
        if (k % 2) target = target.inverse();
        auto v = circle_fiberings_equivalent(b.M, r.beta, target, bounds, &it->second);
        confirmed += v.kind == EquivalenceVerdict::Kind::Equivalent && v.witness &&
                     check_circle_witness(b.M, r.beta, target, *v.witness);
      } else {
        std::pair<AffineMap, AffineMap> p{r.beta, *r.gamma};
        std::pair<AffineMap, AffineMap> q{psi * r.beta * psi.inverse(), psi * *r.gamma * psi.inverse()};
        if (k % 2) std::swap(q.first, q.second);
        auto v = interval_pairs_equivalent(b.M, p, q, bounds, &it->second);
        confirmed += v.kind == EquivalenceVerdict::Kind::Equivalent && v.witness &&
                     check_interval_witness(b.M, p, q, *v.witness);
      }
    }
    bool ok = equivalent.empty() && confirmed == controls && unknown.size() <= 10;
    report(11, ok, "inequivalence",
           std::to_string(pairs.size()) + " same-table pairs: " + std::to_string(separated) + " separated, " +
               std::to_string(equivalent.size()) + " equivalent" +
               (equivalent.empty() ? "" : " (" + join(equivalent, ", ") + ")") + ", " +
               std::to_string(unknown.size()) + " unknown [" + join(unknown, "; ") + "]; positive controls " +
               std::to_string(confirmed) + "/" + std::to_string(controls),
           seconds_since(t));
  }

  // 12. Worked examples through their fibration rows.
  {
    auto t = Clock::now();
    std::vector<TableRow> rows;
    for (const auto& [id, rs] : tables) rows.insert(rows.end(), rs.begin(), rs.end());
    const std::vector<std::pair<std::string, std::string>> cases{
        {"example-3", "N4_23"}, {"example-4", "N4_45"}, {"example-5", "N4_46"}};
    std::vector<RatVector> V{unit_vector(4, 0), unit_vector(4, 1), unit_vector(4, 2)};
    bool ok = true;
    std::vector<std::string> parts;
    for (const auto& [file, name] : cases) {
      std::string got = "error";
      try {
        FibrationMatch m = identify_fibration(atlas, rows, atlas.load_group(file), V, bounds);
        got = join(m.manifolds, "|");
        for (const auto& [row, v] : m.verdicts)
          if (v.kind == EquivalenceVerdict::Kind::Equivalent)
            got += " via table " + std::to_string(row->table_id) + " row " + std::to_string(row->row_no);
        ok = ok && m.manifolds == std::vector<std::string>{name};
      } catch (const std::exception& e) {
        ok = false;
        got += std::string(" ") + e.what();
      }
      parts.push_back(file + " -> " + got);
    }
    report(12, ok, "worked examples", join(parts, "; "), seconds_since(t));
  }

  // 13. Orientation double covers.
  {
    auto t = Clock::now();
    std::map<std::string, const SpaceGroup*> golden;
    std::vector<SpaceGroup> files;
    for (const auto& name : atlas.group_names())
      if (atlas.has_entry(name)) files.push_back(atlas.load_group(name));
    std::size_t fi = 0;
    for (const auto& name : atlas.group_names())
      if (atlas.has_entry(name)) golden[name] = &files[fi++];
    for (const auto& b : built) golden.emplace(b.row->manifold, &b.total.G);
    std::vector<std::string> bad;
    std::size_t n = 0, expected = 0;
    for (const auto& e : atlas.entries())
      if (!e.orientable && e.odc) ++expected;
    for (const auto& [name, G] : golden) {
      const AtlasEntry& e = atlas.entry(name);
      if (e.orientable || !e.odc) continue;
      ++n;
      SpaceGroup C = orientation_double_cover(*G);
      std::vector<std::string> cands;
      try {
        cands = atlas.identify(atlas.full_query(C));
      } catch (const EmptyCandidateSet&) {
      }
      if (std::find(cands.begin(), cands.end(), *e.odc) == cands.end()) bad.push_back(name);
    }
    report(13, bad.empty() && n == expected && n > 0, "orientation double covers",
           std::to_string(n - bad.size()) + "/" + std::to_string(expected) + " nonorientable entries match" +
               (bad.empty() ? "" : "; failing " + join(bad, ", ")),
           seconds_since(t));
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
