#include "flatfold/atlas.hpp"
#include "flatfold/fibration.hpp"

#include <doctest.h>

using namespace flatfold;

namespace {

const Atlas& atlas() {
  static Atlas a(FLATFOLD_TEST_ATLAS);
  return a;
}

const TableRow& row(int table, int no) {
  static std::map<int, std::vector<TableRow>> cache;
  auto it = cache.find(table);
  if (it == cache.end()) it = cache.emplace(table, atlas().load_table(table)).first;
  for (const auto& r : it->second)
    if (r.row_no == no) return r;
  throw std::out_of_range("no such row");
}

BuiltTotal build(const TableRow& r) {
  SpaceGroup M = atlas().load_group(r.fiber);
  return r.base == BaseKind::Circle ? build_circle_total(M, r.beta, r.m)
                                    : build_interval_total(M, r.beta, *r.gamma, r.m);
}

std::vector<RatVector> fiber_span(std::size_t n) {
  std::vector<RatVector> V;
  for (std::size_t i = 0; i + 1 < n; ++i) V.push_back(unit_vector(n, i));
  return V;
}

std::string h1_of(const SpaceGroup& G) {
  Homology h = first_homology(G);
  return format_homology(h.betti, h.torsion);
}

}  // namespace

TEST_CASE("hat extends fiber affinities") {
  AffineMap g = parse_element("1/2 0 | 1 0 0 -1", 2);
  AffineMap h = hat(g, -1, Rational(1, 3));
  CHECK(format_element(h) == "1/2 0 1/3 | 1 0 0 0 -1 0 0 0 -1");
}

TEST_CASE("circle totals from the 3-manifold tables") {
  // Table 6 row 2 is O3_2 with H1 Z+Z2^2.
  BuiltTotal T = build(row(6, 2));
  CHECK(is_torsion_free(T.G));
  CHECK(h1_of(T.G) == "Z+Z2^2");
  CHECK(quotient_1orbifold_type(T.G, T.N) == OrbifoldType::InfiniteCyclic);
  CHECK(is_complete(T.G, T.N.sub_generators));
  CHECK(T.N.V.size() == 2);
}

TEST_CASE("interval totals and singular fibers") {
  const TableRow& r = row(14, 43);
  BuiltTotal T = build(r);
  CHECK(is_torsion_free(T.G));
  CHECK(quotient_1orbifold_type(T.G, T.N) == OrbifoldType::InfiniteDihedral);
  auto [a, b] = singular_fibers(atlas().load_group(r.fiber), r.beta, *r.gamma);
  std::vector<std::string> names{atlas().name_group(a), atlas().name_group(b)};
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"N3_2", "O3_2"});

  const TableRow& s = row(18, 24);
  auto [c, d] = singular_fibers(atlas().load_group(s.fiber), s.beta, *s.gamma);
  names = {atlas().name_group(c), atlas().name_group(d)};
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"O3_2", "O3_6"});
}

TEST_CASE("builder preconditions") {
  SpaceGroup K = atlas().load_group("K2");
  AffineMap shift = AffineMap::translation({0, Rational(1, 2)});
  CHECK_NOTHROW(build_circle_total(K, shift, 2));
  CHECK_THROWS_AS(build_circle_total(K, shift, 3), PreconditionViolated);
  AffineMap shear = AffineMap::linear(int_matrix(2, 2, {1, 1, 0, 1}));
  CHECK_THROWS_AS(build_circle_total(K, shear, 1), PreconditionViolated);
  // The reflection in the first axis fixes points of the Klein bottle.
  AffineMap refl = AffineMap::linear(int_matrix(2, 2, {-1, 0, 0, 1}));
  CHECK_THROWS_AS(build_interval_total(K, refl, refl, 1), PreconditionViolated);
}

TEST_CASE("structure groups of the built totals") {
  for (int table : {6, 7, 12, 16, 18, 25, 28}) {
    for (const auto& r : atlas().load_table(table)) {
      CAPTURE(table);
      CAPTURE(r.row_no);
      BuiltTotal T = build(r);
      NormalSubgroupData K = action_kernel(T.G, T.N.V);
      CHECK(forms_direct_product(T.N, K));
      StructureGroup sg = structure_group(T.G, T.N, K);
      CHECK(sg.group.table.order() == std::size_t(r.base == BaseKind::Circle ? r.m : 2 * r.m));
      CHECK(sg.action_on_V.size() == sg.group.table.order());
    }
  }
}

TEST_CASE("extracting a fibration recovers the monodromy order") {
  for (int table : {6, 7, 15, 17, 24, 27}) {
    for (const auto& r : atlas().load_table(table)) {
      CAPTURE(table);
      CAPTURE(r.row_no);
      BuiltTotal T = build(r);
      ExtractedFibration ex = extract_fibration(T.G, fiber_span(T.G.dim()));
      CHECK(ex.kind == (r.base == BaseKind::Circle ? OrbifoldType::InfiniteCyclic : OrbifoldType::InfiniteDihedral));
      CHECK(invariant_record(ex.fiber) == invariant_record(atlas().load_group(r.fiber)));
      auto m = affinity_order(ex.fiber, ex.gamma ? *ex.gamma * ex.beta : ex.beta);
      REQUIRE(m);
      CHECK(*m == r.m);
    }
  }
}

TEST_CASE("completion of a worked example") {
  SpaceGroup G = atlas().load_group("example-3");
  NormalSubgroupData N = completion(G, fiber_span(4));
  CHECK(is_complete(G, N.sub_generators));
  CHECK(is_normal(G, N.sub_generators));
  CHECK(atlas().name_group(fiber_group(N)) == "O3_2");
  CHECK(quotient_1orbifold_type(G, N) == OrbifoldType::InfiniteCyclic);
}

TEST_CASE("invariant form and Calabi data of golden groups") {
  for (const auto& name : atlas().group_names()) {
    CAPTURE(name);
    SpaceGroup G = atlas().load_group(name);
    RatMatrix S = invariant_form(G);
    for (const auto& A : G.point_group()) CHECK(to_rational(A).transpose() * S * to_rational(A) == S);
    for (std::size_t i = 0; i < G.dim(); ++i) CHECK(S(i, i) > 0);

    CalabiData cd = calabi_data(G);
    CHECK(cd.J_fixed_dim == 0);
    CHECK(cd.Z_rank == first_homology(G).betti);
    CHECK(cd.I.V.size() + cd.Z_rank == G.dim());
    auto perp = invariant_complement(G, cd.I.V);
    CHECK(perp.size() == cd.Z_rank);
    for (const auto& z : cd.Z.basis()) CHECK(in_span(perp, z));
    CHECK(cd.structure_group.table.is_abelian());
  }
}

TEST_CASE("Calabi structure groups") {
  CHECK(calabi_data(atlas().load_group("O3_6")).structure_group.label == "C1");
  int seen = 0;
  for (const auto& r : atlas().load_table(16)) {
    if (r.manifold != "N4_7") continue;
    ++seen;
    CHECK(canonical_label(calabi_data(build(r).G).structure_group.label.value_or("?")) == canonical_label("C4xC2"));
  }
  CHECK(seen > 0);
}
