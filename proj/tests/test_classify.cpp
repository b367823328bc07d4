#include "flatfold/atlas.hpp"
#include "flatfold/classify.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace flatfold;

namespace {

const Atlas& atlas() {
  static Atlas a(FLATFOLD_TEST_ATLAS);
  return a;
}

const std::vector<AffineMap>& sample_of(const std::string& fiber) {
  static std::map<std::string, std::vector<AffineMap>> cache;
  auto it = cache.find(fiber);
  if (it == cache.end()) it = cache.emplace(fiber, normalizer_sample(atlas().load_group(fiber), SearchBounds{})).first;
  return it->second;
}

const TableRow& row(int table, int no) {
  static std::map<int, std::vector<TableRow>> cache;
  auto it = cache.find(table);
  if (it == cache.end()) it = cache.emplace(table, atlas().load_table(table)).first;
  for (const auto& r : it->second)
    if (r.row_no == no) return r;
  throw std::out_of_range("no such row");
}

std::size_t class_of(const Partition& p, const IntMatrix& A) {
  for (std::size_t i = 0; i < p.elements.size(); ++i)
    if (p.elements[i] == A) return p.class_of[i];
  throw std::out_of_range("matrix not enumerated");
}

}  // namespace

TEST_CASE("finite order matrices") {
  SearchBounds b;
  auto one = finite_order_elements(1, b);
  CHECK(one.size() == 2);
  CHECK(inverse_pair_classes(conjugacy_classes(one, b)).count == 2);
  for (const auto& A : finite_order_elements(2, b)) {
    CHECK(is_unimodular(A));
    IntMatrix P = A;
    int k = 1;
    while (!(P == IntMatrix::identity(2)) && k <= 12) {
      P = P * A;
      ++k;
    }
    CHECK(k <= 6);
  }
}

TEST_CASE("inverse pairs in GL(2,Z)") {
  SearchBounds b;
  auto elems = finite_order_elements(2, b);
  Partition conj = conjugacy_classes(elems, b);
  Partition pairs = inverse_pair_classes(conj);
  CHECK(pairs.count == 7);
  // Conjugate matrices share trace and determinant.
  for (const auto& cls : conj.classes())
    for (std::size_t i : cls) {
      CHECK(determinant(conj.elements[i]) == determinant(conj.elements[cls[0]]));
      CHECK(conj.elements[i](0, 0) + conj.elements[i](1, 1) == conj.elements[cls[0]](0, 0) + conj.elements[cls[0]](1, 1));
    }
  // The monodromies of the torus rows of the 3-manifold circle table are pairwise inequivalent.
  std::set<std::size_t> seen;
  std::size_t torus_rows = 0;
  for (const auto& r : atlas().load_table(6)) {
    if (r.fiber != "T2") continue;
    ++torus_rows;
    seen.insert(class_of(pairs, r.beta.A));
  }
  CHECK(seen.size() == torus_rows);
}

TEST_CASE("affine conjugators") {
  std::mt19937 rng(29);
  std::uniform_int_distribution<long> num(0, 11);
  for (const std::string name : {"K2", "O3_2", "N3_1", "N3_4"}) {
    CAPTURE(name);
    SpaceGroup M = atlas().load_group(name);
    const auto& sample = sample_of(name);
    REQUIRE_FALSE(sample.empty());
    for (int k = 0; k < 5; ++k) {
      AffineMap psi = sample[rng() % sample.size()];
      RatVector shift(M.dim());
      for (auto& x : shift) x = Rational(num(rng), 12);
      for (auto& x : shift) x.canonicalize();
      psi = AffineMap::translation(shift) * psi;
      std::vector<AffineMap> gens;
      for (const auto& g : M.generators()) gens.push_back(psi * g * psi.inverse());
      SpaceGroup S = close_group(M.dim(), gens);
      auto phi = find_affine_conjugator(S, M, SearchBounds{});
      REQUIRE(phi);
      std::vector<AffineMap> back;
      for (const auto& g : S.generators()) back.push_back(*phi * g * phi->inverse());
      CHECK(close_group(M.dim(), back) == M);
    }
  }
}

TEST_CASE("normalizer sample elements normalize") {
  for (const std::string name : {"K2", "O3_2", "N3_1", "N3_2"}) {
    CAPTURE(name);
    SpaceGroup M = atlas().load_group(name);
    for (const auto& psi : sample_of(name)) CHECK(normalizes(M, psi));
  }
}

TEST_CASE("order two fixed point free affinities of the Klein bottle") {
  SpaceGroup K = atlas().load_group("K2");
  auto classes = order2_fixed_point_free_classes(K, SearchBounds{});
  REQUIRE(classes.size() == 1);
  for (const auto& phi : classes[0].members) {
    CHECK(affinity_order(K, phi) == 2);
    CHECK(manifold_fixed_point_free(K, phi));
  }
}

TEST_CASE("invariant separation") {
  SearchBounds b;
  // Table 6 rows 2 and 6 have different homology.
  const TableRow& a = row(6, 2);
  const TableRow& c = row(6, 6);
  REQUIRE(a.fiber == c.fiber);
  auto v = circle_fiberings_equivalent(atlas().load_group(a.fiber), a.beta, c.beta, b, &sample_of(a.fiber));
  CHECK(v.kind == EquivalenceVerdict::Kind::InequivalentByInvariant);
  CHECK(v.invariant == "total space");

  // Table 7 rows 1 and 2 differ in the structure group.
  const TableRow& d = row(7, 1);
  const TableRow& e = row(7, 2);
  auto w = interval_pairs_equivalent(atlas().load_group(d.fiber), {d.beta, *d.gamma}, {e.beta, *e.gamma}, b,
                                     &sample_of(d.fiber));
  CHECK(w.kind == EquivalenceVerdict::Kind::InequivalentByInvariant);
  CHECK(w.invariant == "structure group");

  // Table 18 rows 24 and 25 differ in the singular fibers.
  const TableRow& f = row(18, 24);
  const TableRow& g = row(18, 25);
  auto x = interval_pairs_equivalent(atlas().load_group(f.fiber), {f.beta, *f.gamma}, {g.beta, *g.gamma}, b,
                                     &sample_of(f.fiber));
  CHECK(x.kind == EquivalenceVerdict::Kind::InequivalentByInvariant);
  CHECK(x.invariant == "singular fibers");
}

TEST_CASE("circle fiberings: conjugated and reversed monodromies are equivalent") {
  std::mt19937 rng(31);
  SearchBounds b;
  for (int table : {15, 25}) {
    for (const auto& r : atlas().load_table(table)) {
      CAPTURE(table);
      CAPTURE(r.row_no);
      SpaceGroup M = atlas().load_group(r.fiber);
      const auto& sample = sample_of(r.fiber);
      AffineMap psi = sample[rng() % sample.size()];
      AffineMap target = psi * r.beta * psi.inverse();
      if (rng() % 2) target = target.inverse();
      CHECK(circle_signature(M, target).entries == circle_signature(M, r.beta).entries);
      auto v = circle_fiberings_equivalent(M, r.beta, target, b, &sample);
      REQUIRE(v.kind == EquivalenceVerdict::Kind::Equivalent);
      REQUIRE(v.witness);
      CHECK(check_circle_witness(M, r.beta, target, *v.witness));
      // The same witness fails against a row separated by an invariant.
      for (const auto& o : atlas().load_table(table)) {
        if (o.fiber != r.fiber || circle_signature(M, o.beta).entries == circle_signature(M, r.beta).entries) continue;
        CHECK_FALSE(check_circle_witness(M, r.beta, o.beta, *v.witness));
        break;
      }
    }
  }
}

TEST_CASE("interval fiberings: swapped and conjugated pairs are equivalent") {
  std::mt19937 rng(37);
  SearchBounds b;
  for (int table : {17, 27}) {
    for (const auto& r : atlas().load_table(table)) {
      CAPTURE(table);
      CAPTURE(r.row_no);
      SpaceGroup M = atlas().load_group(r.fiber);
      const auto& sample = sample_of(r.fiber);
      AffineMap psi = sample[rng() % sample.size()];
      std::pair<AffineMap, AffineMap> p{r.beta, *r.gamma};
      std::pair<AffineMap, AffineMap> q{psi * *r.gamma * psi.inverse(), psi * r.beta * psi.inverse()};
      CHECK(interval_signature(M, q.first, q.second).entries == interval_signature(M, p.first, p.second).entries);
      auto v = interval_pairs_equivalent(M, p, q, b, &sample);
      REQUIRE(v.kind == EquivalenceVerdict::Kind::Equivalent);
      REQUIRE(v.witness);
      CHECK(check_interval_witness(M, p, q, *v.witness));
    }
  }
}

TEST_CASE("distinct rows are never declared equivalent") {
  SearchBounds b;
  for (int table : {6, 7, 15, 16}) {
    auto rows = atlas().load_table(table);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j) {
        if (rows[i].fiber != rows[j].fiber) continue;
        CAPTURE(table);
        CAPTURE(rows[i].row_no);
        CAPTURE(rows[j].row_no);
        SpaceGroup M = atlas().load_group(rows[i].fiber);
        EquivalenceVerdict v =
            rows[i].base == BaseKind::Circle
                ? circle_fiberings_equivalent(M, rows[i].beta, rows[j].beta, b, &sample_of(rows[i].fiber))
                : interval_pairs_equivalent(M, {rows[i].beta, *rows[i].gamma}, {rows[j].beta, *rows[j].gamma}, b,
                                            &sample_of(rows[i].fiber));
        CHECK(v.kind != EquivalenceVerdict::Kind::Equivalent);
      }
  }
}
