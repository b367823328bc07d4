#include "flatfold/fibration.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace flatfold {

RatMatrix invariant_form(const SpaceGroup& G) {
  const std::size_t n = G.dim();
  RatMatrix S(n, n);
  for (const auto& A : G.point_group())
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) S(i, j) += Rational(A(k, i) * A(k, j));
  return S;
}

std::vector<RatVector> invariant_complement(const SpaceGroup& G, const std::vector<RatVector>& V) {
  RatMatrix S = invariant_form(G);
  std::vector<RatVector> sv;
  for (const auto& v : V) sv.push_back(act(S, v));
  return orthogonal_complement(span_basis(sv, G.dim()), G.dim());
}

std::vector<RatVector> span_of(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens) {
  SpaceGroup S = close_group(G.dim(), sub_gens);
  return span_basis(S.lattice().basis(), G.dim());
}

bool is_normal(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens) {
  SpaceGroup S = close_group(G.dim(), sub_gens);
  for (const auto& g : G.normal_generators()) {
    AffineMap gi = g.inverse();
    for (const auto& s : sub_gens)
      if (!contains(S, g * s * gi) || !contains(S, gi * s * g)) return false;
  }
  return true;
}

NormalSubgroupData make_normal_subgroup(const std::vector<AffineMap>& sub_gens, std::size_t dim) {
  NormalSubgroupData N;
  N.sub_generators = sub_gens;
  N.sub = close_group(dim, sub_gens);
  N.V = span_basis(N.sub.lattice().basis(), dim);
  N.V_perp = orthogonal_complement(N.V, dim);
  return N;
}

NormalSubgroupData completion(const SpaceGroup& G, const std::vector<RatVector>& Vin) {
  const std::size_t n = G.dim();
  auto V = span_basis(Vin, n);
  auto perp = invariant_complement(G, V);
  auto annihilator = orthogonal_complement(V, n);
  const auto B = G.lattice().basis();
  std::vector<AffineMap> gens;
  for (const auto& b : lattice_intersection(V, G.lattice()).basis()) gens.push_back(AffineMap::translation(b));
  RatMatrix M(B.size(), annihilator.size());
  for (std::size_t i = 0; i < B.size(); ++i)
    for (std::size_t j = 0; j < annihilator.size(); ++j) M(i, j) = dot(B[i], annihilator[j]);
  for (std::size_t i = 1; i < G.point_group().size(); ++i) {
    const IntMatrix& A = G.point_group()[i];
    bool fixes = std::all_of(perp.begin(), perp.end(), [&](const RatVector& w) { return act(A, w) == w; });
    if (!fixes) continue;
    const RatVector& rep = G.coset_reps()[i];
    RatVector c(annihilator.size());
    for (std::size_t j = 0; j < annihilator.size(); ++j) c[j] = -dot(rep, annihilator[j]);
    auto y = solve_integer_left(M, c);
    if (!y) continue;
    RatVector t = rep;
    for (std::size_t k = 0; k < B.size(); ++k)
      if ((*y)[k] != 0) t = t + scale(B[k], Rational((*y)[k]));
    gens.emplace_back(t, A);
  }
  NormalSubgroupData N;
  N.sub_generators = gens;
  N.sub = close_group(n, gens);
  N.V = V;
  N.V_perp = perp;
  return N;
}

NormalSubgroupData completion(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens) {
  return completion(G, span_of(G, sub_gens));
}

bool is_complete(const SpaceGroup& G, const std::vector<AffineMap>& sub_gens) {
  SpaceGroup S = close_group(G.dim(), sub_gens);
  auto C = completion(G, span_basis(S.lattice().basis(), G.dim()));
  return S == C.sub;
}

NormalSubgroupData action_kernel(const SpaceGroup& G, const std::vector<RatVector>& V) {
  return completion(G, invariant_complement(G, span_basis(V, G.dim())));
}

bool forms_direct_product(const NormalSubgroupData& N, const NormalSubgroupData& K) {
  for (std::size_t i = 1; i < N.sub.point_group().size(); ++i)
    if (K.sub.find(N.sub.point_group()[i])) return false;
  auto ng = N.sub.normal_generators();
  auto kg = K.sub.normal_generators();
  for (const auto& a : ng)
    for (const auto& b : kg)
      if (!(a * b == b * a)) return false;
  return true;
}

SubspaceFrame::SubspaceFrame(std::vector<RatVector> V, std::vector<RatVector> W,
                             const std::vector<RatVector>& lattice_vectors) {
  n_ = V.empty() ? (W.empty() ? 0 : W[0].size()) : V[0].size();
  d_ = V.size();
  if (V.size() + W.size() != n_) throw std::invalid_argument("frame: V and W must be complementary");
  RatMatrix S(n_, n_);
  for (std::size_t j = 0; j < d_; ++j)
    for (std::size_t i = 0; i < n_; ++i) S(i, j) = V[j][i];
  for (std::size_t j = 0; j < W.size(); ++j)
    for (std::size_t i = 0; i < n_; ++i) S(i, d_ + j) = W[j][i];
  auto inv = inverse(S);
  if (!inv) throw std::invalid_argument("frame: V and W are not complementary");
  to_split_ = *inv;
  std::vector<RatVector> vc;
  for (const auto& x : lattice_vectors) {
    RatVector s = flatfold::act(to_split_, x);
    vc.emplace_back(s.begin(), s.begin() + static_cast<long>(d_));
  }
  Lattice lam = Lattice::from_vectors(d_, vc);
  if (lam.rank() != d_) throw std::invalid_argument("frame: lattice does not span V");
  RatMatrix Q = lam.basis_matrix();
  to_lattice_ = d_ ? *inverse(Q.transpose()) : RatMatrix(0, 0);
  for (std::size_t k = 0; k < d_; ++k) {
    RatVector e(n_);
    for (std::size_t j = 0; j < d_; ++j) e = e + scale(V[j], Q(k, j));
    lattice_.push_back(std::move(e));
  }
}

RatVector SubspaceFrame::coords(const RatVector& x) const {
  RatVector s = flatfold::act(to_split_, x);
  RatVector v(s.begin(), s.begin() + static_cast<long>(d_));
  return d_ ? flatfold::act(to_lattice_, v) : v;
}

RatVector SubspaceFrame::complement_coords(const RatVector& x) const {
  RatVector s = flatfold::act(to_split_, x);
  return RatVector(s.begin() + static_cast<long>(d_), s.end());
}

AffineMap SubspaceFrame::restrict(const AffineMap& g) const {
  RatMatrix A(d_, d_);
  for (std::size_t j = 0; j < d_; ++j) {
    RatVector c = coords(flatfold::act(g.A, lattice_[j]));
    for (std::size_t i = 0; i < d_; ++i) A(i, j) = c[i];
  }
  return AffineMap(coords(g.t), to_integer(A));
}

SpaceGroup induced_group(const std::vector<AffineMap>& elems, const SubspaceFrame& frame, std::size_t cap) {
  std::vector<AffineMap> gens;
  const std::size_t d = frame.dim();
  for (std::size_t i = 0; i < d; ++i) gens.push_back(AffineMap::translation(unit_vector(d, i)));
  for (const auto& e : elems) gens.push_back(frame.restrict(e));
  return close_group(d, gens, cap);
}

SubspaceFrame subgroup_frame(const NormalSubgroupData& N) {
  return SubspaceFrame(N.V, N.V_perp, N.sub.lattice().basis());
}

SpaceGroup fiber_group(const NormalSubgroupData& N) {
  return induced_group(N.sub.normal_generators(), subgroup_frame(N));
}

QuotientGroup quotient_group(const SpaceGroup& G, const std::vector<AffineMap>& normal_gens) {
  const std::size_t n = G.dim();
  SpaceGroup S = close_group(n, normal_gens);
  const Lattice& LS = S.lattice();
  if (!LS.full_rank()) throw InfiniteStructureGroup("normal subgroup lattice does not have full rank");
  const auto B = G.lattice().basis();
  IntMatrix MS(n, n);
  auto sb = LS.basis();
  for (std::size_t i = 0; i < n; ++i) {
    auto c = G.lattice().coordinates(sb[i]);
    if (!c) throw std::logic_error("quotient_group: subgroup lattice not inside group lattice");
    for (std::size_t j = 0; j < n; ++j) MS(i, j) = (*c)[j];
  }
  SnfResult s = smith_normal_form(MS);
  IntMatrix Vinv = inverse_unimodular(s.V);
  // Coset representatives of L / L_S: k * V^{-1} with 0 <= k_i < d_i.
  std::vector<RatVector> shifts{zero_vector(n)};
  for (std::size_t i = 0; i < n; ++i) {
    long d = s.D(i, i).get_si();
    std::vector<RatVector> next;
    for (const auto& base : shifts)
      for (long k = 0; k < d; ++k) {
        RatVector v = base;
        for (std::size_t j = 0; j < n; ++j) v = v + scale(B[j], Rational(Vinv(i, j) * k));
        next.push_back(std::move(v));
      }
    shifts = std::move(next);
  }
  const auto selems = S.coset_elements();
  auto key = [&](const AffineMap& x) {
    AffineMap best;
    bool first = true;
    for (const auto& se : selems) {
      AffineMap y = x * se;
      y.t = LS.reduce(y.t);
      if (first || y < best) {
        best = std::move(y);
        first = false;
      }
    }
    return best;
  };
  std::map<AffineMap, int> index;
  QuotientGroup Q;
  for (std::size_t i = 0; i < G.point_group().size(); ++i)
    for (const auto& sh : shifts) {
      AffineMap x(G.coset_reps()[i] + sh, G.point_group()[i]);
      if (index.emplace(key(x), static_cast<int>(Q.reps.size())).second) Q.reps.push_back(x);
    }
  std::vector<std::vector<int>> table(Q.reps.size(), std::vector<int>(Q.reps.size()));
  for (std::size_t a = 0; a < Q.reps.size(); ++a)
    for (std::size_t b = 0; b < Q.reps.size(); ++b) table[a][b] = index.at(key(Q.reps[a] * Q.reps[b]));
  Q.table = FiniteGroup(std::move(table), index.at(key(AffineMap::identity(n))));
  Q.label = recognize(Q.table);
  return Q;
}

StructureGroup structure_group(const SpaceGroup& G, const NormalSubgroupData& N, const NormalSubgroupData& K) {
  std::vector<AffineMap> gens = N.sub.normal_generators();
  auto kg = K.sub.normal_generators();
  gens.insert(gens.end(), kg.begin(), kg.end());
  StructureGroup out;
  out.group = quotient_group(G, gens);
  if (!N.V.empty()) {
    SubspaceFrame fv = subgroup_frame(N);
    for (const auto& r : out.group.reps) out.action_on_V.push_back(fv.restrict(r));
  }
  if (!K.V.empty()) {
    SubspaceFrame fk = subgroup_frame(K);
    for (const auto& r : out.group.reps) out.action_on_Vperp.push_back(fk.restrict(r));
  }
  return out;
}

std::string to_string(OrbifoldType t) {
  switch (t) {
    case OrbifoldType::InfiniteCyclic: return "InfiniteCyclic";
    case OrbifoldType::InfiniteDihedral: return "InfiniteDihedral";
    default: return "Other";
  }
}

OrbifoldType quotient_1orbifold_type(const SpaceGroup& G, const NormalSubgroupData& N) {
  if (N.V.size() + 1 != G.dim()) return OrbifoldType::Other;
  SubspaceFrame frame(N.V, N.V_perp, N.sub.lattice().basis());
  const RatVector& w = N.V_perp[0];
  for (const auto& A : G.point_group())
    if (frame.complement_coords(act(A, w))[0] < 0) return OrbifoldType::InfiniteDihedral;
  return OrbifoldType::InfiniteCyclic;
}

AffineMap hat(const AffineMap& g, int sign, const Rational& offset) {
  const std::size_t n = g.dim() + 1;
  RatVector t = g.t;
  t.push_back(offset);
  IntMatrix A(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = 0; j + 1 < n; ++j) A(i, j) = g.A(i, j);
  A(n - 1, n - 1) = sign;
  return AffineMap(std::move(t), std::move(A));
}

namespace {

std::vector<AffineMap> hatted_fiber(const SpaceGroup& M) {
  std::vector<AffineMap> out;
  for (const auto& g : M.generators()) out.push_back(hat(g, 1, 0));
  return out;
}

std::vector<AffineMap> standard_translations(std::size_t n) {
  std::vector<AffineMap> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(AffineMap::translation(unit_vector(n, i)));
  return out;
}

}  // namespace

BuiltTotal build_circle_total(const SpaceGroup& M, const AffineMap& beta, long m) {
  if (!normalizes(M, beta)) throw PreconditionViolated("circle monodromy does not normalize the fiber group");
  auto ord = affinity_order(M, beta);
  if (!ord || *ord != m) throw PreconditionViolated("circle monodromy does not have order " + std::to_string(m));
  const std::size_t n = M.dim() + 1;
  auto gens = standard_translations(n);
  auto fib = hatted_fiber(M);
  gens.insert(gens.end(), fib.begin(), fib.end());
  gens.push_back(hat(beta, 1, Rational(1, m)));
  return BuiltTotal{close_group(n, gens), make_normal_subgroup(fib, n)};
}

BuiltTotal build_interval_total(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma, long m) {
  for (const auto* phi : {&beta, &gamma}) {
    if (!normalizes(M, *phi)) throw PreconditionViolated("interval monodromy does not normalize the fiber group");
    auto ord = affinity_order(M, *phi);
    if (!ord || *ord != 2) throw PreconditionViolated("interval monodromy is not of order 2");
    if (!manifold_fixed_point_free(M, *phi)) throw PreconditionViolated("interval monodromy fixes a point of the fiber");
  }
  auto ord = affinity_order(M, gamma * beta);
  if (!ord || *ord != m) throw PreconditionViolated("product of the monodromies does not have order " + std::to_string(m));
  const std::size_t n = M.dim() + 1;
  auto gens = standard_translations(n);
  auto fib = hatted_fiber(M);
  gens.insert(gens.end(), fib.begin(), fib.end());
  gens.push_back(hat(beta, -1, 0));
  gens.push_back(hat(gamma, -1, Rational(1, m)));
  BuiltTotal out{close_group(n, gens), make_normal_subgroup(fib, n)};
  if (!is_torsion_free(out.G)) throw TorsionDetected("interval total space group has torsion");
  return out;
}

std::pair<SpaceGroup, SpaceGroup> singular_fibers(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma) {
  auto gb = M.generators();
  gb.push_back(beta);
  auto gc = M.generators();
  gc.push_back(gamma);
  return {close_group(M.dim(), gb), close_group(M.dim(), gc)};
}

namespace {

// Element g with Bezout combination of the given elements so that its offset equals the gcd of the offsets.
AffineMap bezout_product(const std::vector<AffineMap>& elems, const std::vector<Rational>& offsets) {
  Integer den = 1;
  for (const auto& t : offsets) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.get_den_mpz_t());
  Integer g = 0;
  std::vector<Integer> coef(offsets.size());
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    Integer v = Rational(offsets[i] * den).get_num();
    if (v == 0) continue;
    Integer ng, s, t;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) coef[j] *= s;
    coef[i] = t;
    g = ng;
  }
  if (g == 0) throw std::logic_error("fibration base action has no translations");
  AffineMap out = AffineMap::identity(elems.front().dim());
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (coef[i] != 0) out = out * elems[i].pow(coef[i].get_si());
  return out;
}

}  // namespace

ExtractedFibration extract_fibration(const SpaceGroup& G, const std::vector<RatVector>& V) {
  ExtractedFibration out;
  out.N = completion(G, V);
  if (out.N.V.size() + 1 != G.dim()) throw PreconditionViolated("subspace must have codimension one");
  SubspaceFrame frame = subgroup_frame(out.N);
  out.fiber = induced_group(out.N.sub.normal_generators(), frame);
  out.kind = quotient_1orbifold_type(G, out.N);
  const RatVector& w = out.N.V_perp[0];
  auto gens = G.normal_generators();
  auto sign = [&](const AffineMap& g) { return frame.complement_coords(act(g.A, w))[0]; };
  auto offset = [&](const AffineMap& g) { return frame.complement_coords(g.t)[0]; };
  if (out.kind == OrbifoldType::InfiniteCyclic) {
    std::vector<Rational> offs;
    for (const auto& g : gens) offs.push_back(offset(g));
    out.beta = frame.restrict(bezout_product(gens, offs));
  } else {
    auto r0 = *std::find_if(gens.begin(), gens.end(), [&](const AffineMap& g) { return sign(g) < 0; });
    AffineMap r0i = r0.inverse();
    std::vector<AffineMap> trans;
    std::vector<Rational> offs;
    for (const auto& g : gens) {
      AffineMap h = sign(g) < 0 ? g * r0i : g;
      offs.push_back(offset(h));
      trans.push_back(std::move(h));
    }
    AffineMap tau = bezout_product(trans, offs);
    out.beta = frame.restrict(r0);
    out.gamma = frame.restrict(tau * r0);
  }
  return out;
}

std::vector<RatVector> moving_space(const SpaceGroup& G) {
  const std::size_t n = G.dim();
  std::vector<RatVector> cols;
  for (const auto& A : G.point_group())
    for (std::size_t j = 0; j < n; ++j) {
      RatVector c(n);
      for (std::size_t i = 0; i < n; ++i) c[i] = Rational(A(i, j) - (i == j ? 1 : 0));
      if (!is_zero(c)) cols.push_back(std::move(c));
    }
  return span_basis(cols, n);
}

CalabiData calabi_data(const SpaceGroup& G) {
  const std::size_t n = G.dim();
  CalabiData c;
  auto VI = homology_torsion_span(G);
  c.I = completion(G, VI);
  auto fixed = point_group_fixed_space(G);
  c.Z = lattice_intersection(fixed, G.lattice());
  c.Z_rank = c.Z.rank();
  c.betti = c.Z_rank;
  auto gens = c.I.sub.normal_generators();
  for (const auto& z : c.Z.basis()) gens.push_back(AffineMap::translation(z));
  c.structure_group = quotient_group(G, gens);
  auto fixed_basis = span_basis(fixed, n);
  if (!c.I.V.empty()) {
    SubspaceFrame fi(c.I.V, fixed_basis, c.I.sub.lattice().basis());
    c.I_group = induced_group(c.I.sub.normal_generators(), fi);
    SubspaceFrame fj(c.I.V, fixed_basis, G.lattice().basis());
    c.J_group = induced_group(G.normal_generators(), fj);
    c.J_fixed_dim = betti_via_fixed_space(c.J_group);
    c.J_torsion_free = is_torsion_free(c.J_group);
  } else {
    c.J_fixed_dim = 0;
    c.J_torsion_free = true;
  }
  return c;
}

}  // namespace flatfold
