#include "flatfold/classify.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <map>
#include <numeric>
#include <set>
#include <thread>
#include <unordered_map>

namespace flatfold {

std::string to_string(EquivalenceVerdict::Kind k) {
  switch (k) {
    case EquivalenceVerdict::Kind::Equivalent: return "Equivalent";
    case EquivalenceVerdict::Kind::InequivalentByInvariant: return "InequivalentByInvariant";
    default: return "UnknownWithinBounds";
  }
}

namespace {

// Machine-integer square matrix for the enumerations (n <= 4).
struct Small {
  int n = 0;
  std::array<long, 16> a{};
  long& operator()(int i, int j) { return a[i * 4 + j]; }
  long operator()(int i, int j) const { return a[i * 4 + j]; }
  bool operator==(const Small& o) const { return n == o.n && a == o.a; }
  long max_abs() const {
    long m = 0;
    for (long v : a) m = std::max(m, v < 0 ? -v : v);
    return m;
  }
};

struct SmallHash {
  std::size_t operator()(const Small& s) const {
    std::size_t h = 1469598103934665603ull;
    for (long v : s.a) h = (h ^ static_cast<std::size_t>(v + 1000)) * 1099511628211ull;
    return h;
  }
};

Small identity_small(int n) {
  Small s;
  s.n = n;
  for (int i = 0; i < n; ++i) s(i, i) = 1;
  return s;
}

Small mul(const Small& x, const Small& y) {
  Small r;
  r.n = x.n;
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k) {
      long v = x(i, k);
      if (v == 0) continue;
      for (int j = 0; j < x.n; ++j) r(i, j) += v * y(k, j);
    }
  return r;
}

long det_small(const Small& m) {
  switch (m.n) {
    case 1: return m(0, 0);
    case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
             m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    default: {
      long d = 0;
      for (int c = 0; c < m.n; ++c) {
        Small minor;
        minor.n = m.n - 1;
        for (int i = 1; i < m.n; ++i)
          for (int j = 0, jj = 0; j < m.n; ++j)
            if (j != c) minor(i - 1, jj++) = m(i, j);
        long s = (c % 2 ? -1 : 1) * m(0, c) * det_small(minor);
        d += s;
      }
      return d;
    }
  }
}

Small to_small(const IntMatrix& m) {
  Small s;
  s.n = static_cast<int>(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) s(i, j) = m(i, j).get_si();
  return s;
}

IntMatrix from_small(const Small& s) {
  IntMatrix m(s.n, s.n);
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) m(i, j) = s(i, j);
  return m;
}

// Calls f on every n x n matrix with entries in [-b, b] and determinant +-1.
template <class F>
void for_each_unimodular(int n, long b, F&& f) {
  const int cells = n * n;
  std::vector<long> digits(cells, -b);
  Small s;
  s.n = n;
  while (true) {
    for (int c = 0; c < cells; ++c) s(c / n, c % n) = digits[c];
    long d = det_small(s);
    if (d == 1 || d == -1) f(s);
    int c = 0;
    while (c < cells && digits[c] == b) digits[c++] = -b;
    if (c == cells) break;
    ++digits[c];
  }
}

struct UnionFind {
  std::vector<std::size_t> parent;
  std::size_t add() {
    parent.push_back(parent.size());
    return parent.size() - 1;
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

Partition partition_from(const std::vector<IntMatrix>& elements, UnionFind& uf, const std::vector<std::size_t>& node) {
  Partition p;
  p.elements = elements;
  std::map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    auto root = uf.find(node[i]);
    auto it = label.emplace(root, label.size()).first;
    p.class_of.push_back(it->second);
  }
  p.count = label.size();
  return p;
}

// Smallest index in [0, count) satisfying pred, evaluated on `jobs` threads.
template <class Pred>
std::optional<std::size_t> parallel_find_first(std::size_t count, unsigned jobs, Pred&& pred) {
  std::atomic<std::size_t> best{count};
  auto worker = [&](unsigned w) {
    for (std::size_t i = w; i < count && i < best.load(); i += jobs)
      if (pred(i)) {
        std::size_t cur = best.load();
        while (i < cur && !best.compare_exchange_weak(cur, i)) {
        }
        return;
      }
  };
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      if (pred(i)) return i;
    return std::nullopt;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
  for (auto& t : pool) t.join();
  if (best.load() == count) return std::nullopt;
  return best.load();
}

// Membership in (lattice generated by gens) + W, inside Q^k.
class LatticePlusSubspace {
 public:
  LatticePlusSubspace(std::size_t k, std::vector<RatVector> gens, const std::vector<RatVector>& W)
      : k_(k), gens_(std::move(gens)) {
    R_ = orthogonal_complement(span_basis(W, k), k);
    std::vector<RatVector> img;
    for (const auto& g : gens_) img.push_back(project(g));
    image_ = Lattice::from_vectors(R_.size(), img);
    proj_gens_ = RatMatrix(gens_.size(), R_.size());
    for (std::size_t i = 0; i < gens_.size(); ++i)
      for (std::size_t j = 0; j < R_.size(); ++j) proj_gens_(i, j) = img[i][j];
  }
  RatVector project(const RatVector& v) const {
    RatVector out(R_.size());
    for (std::size_t j = 0; j < R_.size(); ++j) out[j] = dot(R_[j], v);
    return out;
  }
  bool contains(const RatVector& v) const { return R_.empty() || image_.contains(project(v)); }
  RatVector reduce(const RatVector& v) const { return R_.empty() ? RatVector{} : image_.reduce(project(v)); }
  // v = lattice part + subspace part; returns the lattice part.
  std::optional<RatVector> lattice_part(const RatVector& v) const {
    if (R_.empty()) return zero_vector(k_);
    auto z = solve_integer_left(proj_gens_, project(v));
    if (!z) return std::nullopt;
    RatVector l = zero_vector(k_);
    for (std::size_t i = 0; i < gens_.size(); ++i)
      if ((*z)[i] != 0) l = l + scale(gens_[i], Rational((*z)[i]));
    return l;
  }

 private:
  std::size_t k_;
  std::vector<RatVector> gens_;
  std::vector<RatVector> R_;
  Lattice image_;
  RatMatrix proj_gens_;
};

// Solutions x (mod Z^cols) of K x = c (mod Z^rows), free directions set to zero.
std::vector<RatVector> solve_congruence(const IntMatrix& K, const RatVector& c) {
  const std::size_t rows = K.rows(), cols = K.cols();
  SnfResult s = smith_normal_form(K);
  RatVector uc(rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < rows; ++j)
      if (s.U(i, j) != 0) uc[i] += Rational(s.U(i, j)) * c[j];
  std::size_t r = 0;
  while (r < std::min(rows, cols) && s.D(r, r) != 0) ++r;
  for (std::size_t i = r; i < rows; ++i)
    if (!is_integral(uc[i])) return {};
  std::vector<RatVector> ys{zero_vector(cols)};
  for (std::size_t i = 0; i < r; ++i) {
    Integer d = abs(s.D(i, i));
    std::vector<RatVector> next;
    for (const auto& y0 : ys)
      for (Integer k = 0; k < d; ++k) {
        RatVector y = y0;
        Rational v = (uc[i] + Rational(k)) / Rational(s.D(i, i));
        y[i] = v - Rational(floor_of(v));
        next.push_back(std::move(y));
      }
    ys = std::move(next);
  }
  std::vector<RatVector> out;
  for (const auto& y : ys) {
    RatVector x(cols);
    for (std::size_t i = 0; i < cols; ++i)
      for (std::size_t j = 0; j < cols; ++j)
        if (s.V(i, j) != 0) x[i] += Rational(s.V(i, j)) * y[j];
    out.push_back(std::move(x));
  }
  return out;
}

RatMatrix lattice_columns(const Lattice& L) {
  auto B = L.basis();
  const std::size_t n = L.dim();
  RatMatrix P(n, B.size());
  for (std::size_t j = 0; j < B.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) P(i, j) = B[j][i];
  return P;
}

bool lattice_maps_onto(const IntMatrix& C, const Lattice& from, const Lattice& to) { return from.image(C) == to; }

std::vector<AffineMap> hatted(const SpaceGroup& M) {
  std::vector<AffineMap> out;
  for (const auto& g : M.generators()) out.push_back(hat(g, 1, 0));
  return out;
}

std::string record_string(const SpaceGroup& G) { return format_record(invariant_record(G)); }

std::string calabi_string(const SpaceGroup& G) {
  CalabiData cd = calabi_data(G);
  const std::size_t k = cd.I.V.size();
  std::string s = "I " + (k == 0 ? std::string("E0") : record_string(cd.I_group));
  if (!cd.J_torsion_free)
    s += "; J torsion";
  else if (k > 0)
    s += "; J " + record_string(cd.J_group);
  return s + "; " + canonical_label(cd.structure_group.label.value_or("?"));
}

// Sorted multiset over the characters G -> Z/2 of the kernel type and of its intersection with the
// fiber, refined by the same data of each kernel when depth > 1.
std::string character_data(const SpaceGroup& G, const SpaceGroup& M, int depth) {
  std::vector<std::string> parts;
  for (const auto& chi : z2_characters(G)) {
    auto on_fiber = [&](const AffineMap& g) { return character_value(G, chi, hat(g, 1, 0)); };
    bool trivial = true;
    for (const auto& g : M.normal_generators()) trivial = trivial && on_fiber(g) == 0;
    SpaceGroup K = parity_kernel(G, [&](const AffineMap& g) { return character_value(G, chi, g); });
    SpaceGroup KM = trivial ? M : parity_kernel(M, on_fiber);
    std::string s = record_string(K) + (trivial ? " / fiber" : " / " + record_string(KM));
    if (depth > 1) s += " [" + character_data(K, KM, depth - 1) + "]";
    parts.push_back(std::move(s));
  }
  std::sort(parts.begin(), parts.end());
  std::string joined;
  for (const auto& p : parts) joined += (joined.empty() ? "" : " ; ") + p;
  return joined;
}

}  // namespace

std::vector<std::vector<std::size_t>> Partition::classes() const {
  std::vector<std::vector<std::size_t>> out(count);
  for (std::size_t i = 0; i < class_of.size(); ++i) out[class_of[i]].push_back(i);
  return out;
}

std::vector<IntMatrix> finite_order_elements(std::size_t n, const SearchBounds& bounds) {
  if (n < 1 || n > 3) throw std::invalid_argument("finite_order_elements: dimension must be 1, 2 or 3");
  std::vector<IntMatrix> out;
  const Small id = identity_small(static_cast<int>(n));
  for_each_unimodular(static_cast<int>(n), bounds.entry_bound, [&](const Small& s) {
    Small p = s;
    for (long k = 1; k <= bounds.order_cap; ++k) {
      if (p == id) {
        out.push_back(from_small(s));
        return;
      }
      if (p.max_abs() > 1000000) return;
      p = mul(p, s);
    }
  });
  return out;
}

Partition conjugacy_classes(const std::vector<IntMatrix>& elements, const SearchBounds& bounds) {
  if (elements.empty()) return {};
  const int n = static_cast<int>(elements.front().rows());
  // Elementary generators of GL(n,Z), each paired with its inverse.
  std::vector<std::pair<Small, Small>> gens;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      Small t = identity_small(n), ti = identity_small(n);
      t(i, j) = 1;
      ti(i, j) = -1;
      gens.emplace_back(t, ti);
      gens.emplace_back(ti, t);
      if (i < j) {
        Small p = identity_small(n);
        p(i, i) = p(j, j) = 0;
        p(i, j) = p(j, i) = 1;
        gens.emplace_back(p, p);
      }
    }
  for (int i = 0; i < n; ++i) {
    Small d = identity_small(n);
    d(i, i) = -1;
    gens.emplace_back(d, d);
  }
  std::unordered_map<Small, std::size_t, SmallHash> id;
  std::vector<Small> nodes;
  UnionFind uf;
  auto node_of = [&](const Small& s, bool& fresh) {
    auto it = id.find(s);
    fresh = it == id.end();
    if (!fresh) return it->second;
    std::size_t k = uf.add();
    id.emplace(s, k);
    nodes.push_back(s);
    return k;
  };
  std::vector<std::size_t> start;
  for (const auto& e : elements) {
    bool fresh;
    start.push_back(node_of(to_small(e), fresh));
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Small x = nodes[k];
    for (const auto& [p, pi] : gens) {
      Small y = mul(mul(p, x), pi);
      if (y.max_abs() > bounds.conj_bound) continue;
      bool fresh;
      std::size_t j = node_of(y, fresh);
      uf.unite(k, j);
    }
  }
  return partition_from(elements, uf, start);
}

Partition inverse_pair_classes(const Partition& p) {
  UnionFind uf;
  for (std::size_t i = 0; i < p.count; ++i) uf.add();
  std::map<IntMatrix, std::size_t> index;
  for (std::size_t i = 0; i < p.elements.size(); ++i) index.emplace(p.elements[i], i);
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    auto it = index.find(inverse_unimodular(p.elements[i]));
    if (it != index.end()) uf.unite(p.class_of[i], p.class_of[it->second]);
  }
  std::vector<std::size_t> node(p.count);
  std::iota(node.begin(), node.end(), 0);
  Partition out;
  out.elements = p.elements;
  std::map<std::size_t, std::size_t> label;
  for (std::size_t i = 0; i < p.elements.size(); ++i) {
    auto it = label.emplace(uf.find(p.class_of[i]), label.size()).first;
    out.class_of.push_back(it->second);
  }
  out.count = label.size();
  return out;
}

std::vector<RatVector> conjugating_translations(const SpaceGroup& S, const SpaceGroup& T, const IntMatrix& C) {
  const std::size_t n = S.dim();
  IntMatrix Ci = inverse_unimodular(C);
  RatMatrix P = lattice_columns(T.lattice());
  RatMatrix Pi = *inverse(P);
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < S.point_group().size(); ++i) idx.push_back(i);
  if (idx.empty()) return {zero_vector(n)};
  IntMatrix K(idx.size() * n, n);
  RatVector c(idx.size() * n);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    IntMatrix A = C * S.point_group()[idx[r]] * Ci;
    auto j = T.find(A);
    if (!j) return {};
    RatVector rhs = T.coset_reps()[*j] - act(C, S.coset_reps()[idx[r]]);
    RatMatrix IA = RatMatrix::identity(n) - to_rational(A);
    IntMatrix Kr = to_integer(Pi * IA * P);
    RatVector cr = act(Pi, rhs);
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) K(r * n + a, b) = Kr(a, b);
      c[r * n + a] = cr[a];
    }
  }
  std::vector<RatVector> out;
  for (const auto& x : solve_congruence(K, c)) out.push_back(T.lattice().reduce(act(P, x)));
  return out;
}

namespace {

bool normalizes_point_group(const Small& B, const std::vector<Small>& H) {
  for (std::size_t i = 1; i < H.size(); ++i) {
    Small BA = mul(B, H[i]);
    bool found = false;
    for (const auto& h : H)
      if (mul(h, B) == BA) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

bool conjugates_point_group(const Small& C, const std::vector<Small>& HS, const std::vector<Small>& HT) {
  for (std::size_t i = 1; i < HS.size(); ++i) {
    Small CA = mul(C, HS[i]);
    bool found = false;
    for (const auto& h : HT)
      if (mul(h, C) == CA) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

// Canonical form of an affinity modulo M and translations along a subspace.
struct CosetKeyer {
  const SpaceGroup* M;
  LatticePlusSubspace quotient;
  std::pair<IntMatrix, RatVector> key(const AffineMap& g) const {
    std::pair<IntMatrix, RatVector> best;
    bool first = true;
    for (const auto& m : M->coset_elements()) {
      AffineMap h = m * g;
      std::pair<IntMatrix, RatVector> k{h.A, quotient.reduce(h.t)};
      if (first || k < best) {
        best = std::move(k);
        first = false;
      }
    }
    return best;
  }
};

CosetKeyer keyer_mod(const SpaceGroup& M, const std::vector<RatVector>& W) {
  return CosetKeyer{&M, LatticePlusSubspace(M.dim(), M.lattice().basis(), W)};
}

}  // namespace

std::vector<AffineMap> normalizer_sample(const SpaceGroup& M, const SearchBounds& bounds) {
  const int n = static_cast<int>(M.dim());
  if (n < 1 || n > 3) throw std::invalid_argument("normalizer_sample: dimension must be 1, 2 or 3");
  std::vector<Small> H;
  for (const auto& A : M.point_group()) H.push_back(to_small(A));
  std::vector<Small> candidates;
  for_each_unimodular(n, bounds.entry_bound, [&](const Small& B) {
    if (normalizes_point_group(B, H)) candidates.push_back(B);
  });
  auto fixed = point_group_fixed_space(M);
  std::vector<std::vector<std::pair<std::pair<IntMatrix, RatVector>, AffineMap>>> found(candidates.size());
  unsigned jobs = std::max(1u, bounds.jobs);
  auto work = [&](unsigned w) {
    CosetKeyer keyer = keyer_mod(M, fixed);
    for (std::size_t i = w; i < candidates.size(); i += jobs) {
      IntMatrix B = from_small(candidates[i]);
      if (!M.lattice().stabilized_by(B)) continue;
      for (const auto& b : conjugating_translations(M, M, B)) {
        if (lcm_of_denominators(b) > bounds.denom_bound) continue;
        AffineMap phi(b, B);
        found[i].emplace_back(keyer.key(phi), phi);
      }
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < jobs; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::map<std::pair<IntMatrix, RatVector>, AffineMap> unique;
  for (auto& list : found)
    for (auto& [k, phi] : list) unique.emplace(std::move(k), std::move(phi));
  std::vector<AffineMap> out;
  out.reserve(unique.size());
  for (auto& [k, phi] : unique) out.push_back(phi);
  return out;
}

std::optional<AffineMap> find_affine_conjugator(const SpaceGroup& S, const SpaceGroup& T, const SearchBounds& bounds) {
  if (S.dim() != T.dim() || S.holonomy_order() != T.holonomy_order()) return std::nullopt;
  const int n = static_cast<int>(S.dim());
  std::vector<Small> HS, HT;
  for (const auto& A : S.point_group()) HS.push_back(to_small(A));
  for (const auto& A : T.point_group()) HT.push_back(to_small(A));
  std::optional<AffineMap> out;
  for_each_unimodular(n, bounds.entry_bound, [&](const Small& Cs) {
    if (out || !conjugates_point_group(Cs, HS, HT)) return;
    IntMatrix C = from_small(Cs);
    if (!lattice_maps_onto(C, S.lattice(), T.lattice())) return;
    auto bs = conjugating_translations(S, T, C);
    if (!bs.empty()) out = AffineMap(bs.front(), C);
  });
  return out;
}

std::string default_namer(const SpaceGroup& G) { return record_string(G); }

std::vector<Order2Class> order2_fixed_point_free_classes(const SpaceGroup& M, const SearchBounds& bounds,
                                                         const GroupNamer& namer) {
  const std::size_t n = M.dim();
  auto sample = normalizer_sample(M, bounds);
  auto fixed = span_basis(point_group_fixed_space(M), n);
  // Candidates: sample elements adjusted along the part of the fixed space on which B is trivial.
  std::vector<AffineMap> cands;
  for (const auto& phi : sample) {
    IntMatrix B2 = phi.A * phi.A;
    if (!M.find(B2)) continue;
    std::vector<RatVector> plus;
    for (const auto& v : fixed) plus.push_back(act(phi.A, v) + v);
    plus = span_basis(plus, n);
    Lattice lp = lattice_intersection(plus, M.lattice());
    auto G = lp.basis();
    std::vector<RatVector> shifts{zero_vector(n)};
    if (!G.empty()) {
      RatMatrix P = lattice_columns(M.lattice());
      RatMatrix Pi = *inverse(P);
      IntMatrix K(n, G.size());
      for (std::size_t j = 0; j < G.size(); ++j) {
        RatVector c = act(Pi, scale(G[j], Rational(2)));
        for (std::size_t i = 0; i < n; ++i) K(i, j) = c[i].get_num();
      }
      AffineMap sq = phi * phi;
      RatVector target = M.coset_reps()[*M.find(sq.A)] - sq.t;
      shifts.clear();
      for (const auto& z : solve_congruence(K, act(Pi, target))) {
        RatVector c = zero_vector(n);
        for (std::size_t j = 0; j < G.size(); ++j) c = c + scale(G[j], z[j]);
        shifts.push_back(c);
      }
    }
    for (const auto& c : shifts) {
      AffineMap cand(phi.t + c, phi.A);
      auto ord = affinity_order(M, cand, bounds.order_cap);
      if (ord && *ord == 2 && manifold_fixed_point_free(M, cand)) cands.push_back(cand);
    }
  }
  // Conjugacy in Aff(E/M): translations along the (-1)-part of the fixed space are absorbed.
  std::map<IntMatrix, CosetKeyer> keyers;
  auto key_of = [&](const AffineMap& g) {
    auto it = keyers.find(g.A);
    if (it == keyers.end()) {
      std::vector<RatVector> minus;
      for (const auto& v : fixed) minus.push_back(act(g.A, v) - v);
      it = keyers.emplace(g.A, keyer_mod(M, span_basis(minus, n))).first;
    }
    return it->second.key(g);
  };
  std::map<std::pair<IntMatrix, RatVector>, std::size_t> index;
  std::vector<AffineMap> uniq;
  for (const auto& c : cands)
    if (index.emplace(key_of(c), uniq.size()).second) uniq.push_back(c);
  UnionFind uf;
  for (std::size_t i = 0; i < uniq.size(); ++i) uf.add();
  for (std::size_t i = 0; i < uniq.size(); ++i)
    for (const auto& psi : sample) {
      auto it = index.find(key_of(psi * uniq[i] * psi.inverse()));
      if (it != index.end()) uf.unite(i, it->second);
    }
  std::map<std::size_t, std::size_t> label;
  std::vector<Order2Class> out;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    auto [it, fresh] = label.emplace(uf.find(i), out.size());
    if (fresh) {
      Order2Class cls;
      cls.representative = uniq[i];
      auto gens = M.generators();
      gens.push_back(uniq[i]);
      cls.quotient_type = namer(close_group(n, gens));
      out.push_back(std::move(cls));
    }
    out[it->second].members.push_back(uniq[i]);
  }
  return out;
}

FiberingSignature circle_signature(const SpaceGroup& M, const AffineMap& beta) {
  FiberingSignature sig;
  auto m = affinity_order(M, beta);
  if (!m) throw PreconditionViolated("monodromy has no finite affinity order");
  auto total = build_circle_total(M, beta, *m);
  sig.entries.emplace_back("structure group", "C" + std::to_string(*m));
  sig.entries.emplace_back("total space", record_string(total.G));
  sig.entries.emplace_back("calabi data", calabi_string(total.G));
  sig.entries.emplace_back("index 2 subgroups", character_data(total.G, M, 2));
  const std::size_t n = M.dim() + 1;
  AffineMap bh = hat(beta, 1, Rational(1, *m));
  for (long k = 2; k < *m; ++k) {
    auto gens = hatted(M);
    gens.push_back(bh.pow(k));
    sig.entries.emplace_back("cover " + std::to_string(k), record_string(close_group(n, gens)));
  }
  return sig;
}

FiberingSignature interval_signature(const SpaceGroup& M, const AffineMap& beta, const AffineMap& gamma) {
  FiberingSignature sig;
  auto m = affinity_order(M, gamma * beta);
  if (!m) throw PreconditionViolated("monodromy product has no finite affinity order");
  auto total = build_interval_total(M, beta, gamma, *m);
  sig.entries.emplace_back("structure group", "D" + std::to_string(*m));
  sig.entries.emplace_back("total space", record_string(total.G));
  auto [sb, sg] = singular_fibers(M, beta, gamma);
  std::vector<std::string> sf{record_string(sb), record_string(sg)};
  std::sort(sf.begin(), sf.end());
  sig.entries.emplace_back("singular fibers", sf[0] + " ; " + sf[1]);
  sig.entries.emplace_back("calabi data", calabi_string(total.G));
  sig.entries.emplace_back("index 2 subgroups", character_data(total.G, M, 2));
  const std::size_t n = M.dim() + 1;
  AffineMap bh = hat(beta, -1, 0), gh = hat(gamma, -1, Rational(1, *m));
  AffineMap tau = gh * bh;
  for (long k = 1; k < std::max(*m, 2L); ++k) {
    auto gens = hatted(M);
    gens.push_back(tau.pow(k));
    sig.entries.emplace_back("rotation cover " + std::to_string(k), record_string(close_group(n, gens)));
  }
  for (long k = 2; k <= std::max(*m, 2L); ++k) {
    std::vector<std::string> parts;
    for (long j = 0; j < k; ++j) {
      auto gens = hatted(M);
      gens.push_back(tau.pow(j) * bh);
      gens.push_back(tau.pow(k));
      parts.push_back(record_string(close_group(n, gens)));
    }
    std::sort(parts.begin(), parts.end());
    std::string joined;
    for (const auto& p : parts) joined += (joined.empty() ? "" : " ; ") + p;
    sig.entries.emplace_back("dihedral cover " + std::to_string(k), joined);
  }
  return sig;
}

std::optional<std::string> separating_entry(const FiberingSignature& a, const FiberingSignature& b) {
  for (std::size_t i = 0; i < std::min(a.entries.size(), b.entries.size()); ++i)
    if (a.entries[i] != b.entries[i]) return a.entries[i].first;
  if (a.entries.size() != b.entries.size()) return std::string("cover count");
  return std::nullopt;
}

namespace {

// Solves sum coeffs_i * gens_i = v over the rationals.
std::optional<RatVector> rational_combination(const std::vector<RatVector>& gens, const RatVector& v) {
  const std::size_t k = v.size();
  RatMatrix A(k, gens.size() + 1);
  for (std::size_t j = 0; j < gens.size(); ++j)
    for (std::size_t i = 0; i < k; ++i) A(i, j) = gens[j][i];
  for (std::size_t i = 0; i < k; ++i) A(i, gens.size()) = v[i];
  RatMatrix R = rref(A);
  RatVector out(gens.size());
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t p = 0;
    while (p <= gens.size() && R(i, p) == 0) ++p;
    if (p == gens.size()) return std::nullopt;
    if (p < gens.size()) out[p] = R(i, gens.size());
  }
  return out;
}

RatVector concat(const RatVector& a, const RatVector& b) {
  RatVector out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::optional<EquivalenceWitness> search_circle_equivalence(const SpaceGroup& M, const AffineMap& beta1,
                                                            const AffineMap& beta2, const SearchBounds& bounds,
                                                            const std::vector<AffineMap>& sample) {
  const std::size_t n = M.dim();
  auto fixed = span_basis(point_group_fixed_space(M), n);
  LatticePlusSubspace quotient(n, M.lattice().basis(), fixed);
  for (bool reversed : {false, true}) {
    AffineMap pinv = reversed ? beta2 : beta2.inverse();
    auto hit = parallel_find_first(sample.size(), std::max(1u, bounds.jobs), [&](std::size_t i) {
      const AffineMap& psi = sample[i];
      AffineMap z = pinv * psi * beta1 * psi.inverse();
      auto j = M.find(z.A);
      return j && quotient.contains(z.t - M.coset_reps()[*j]);
    });
    if (!hit) continue;
    const AffineMap& psi = sample[*hit];
    AffineMap z = pinv * psi * beta1 * psi.inverse();
    RatVector delta = z.t - M.coset_reps()[*M.find(z.A)];
    RatVector f = delta - *quotient.lattice_part(delta);
    return EquivalenceWitness{psi, reversed, zero_vector(n), f};
  }
  return std::nullopt;
}

EquivalenceVerdict circle_fiberings_equivalent(const SpaceGroup& M, const AffineMap& beta1, const AffineMap& beta2,
                                               const SearchBounds& bounds, const std::vector<AffineMap>* sample) {
  EquivalenceVerdict v;
  if (auto sep = separating_entry(circle_signature(M, beta1), circle_signature(M, beta2))) {
    v.kind = EquivalenceVerdict::Kind::InequivalentByInvariant;
    v.invariant = *sep;
    return v;
  }
  std::vector<AffineMap> local;
  if (!sample) {
    local = normalizer_sample(M, bounds);
    sample = &local;
  }
  v.witness = search_circle_equivalence(M, beta1, beta2, bounds, *sample);
  v.kind = v.witness ? EquivalenceVerdict::Kind::Equivalent : EquivalenceVerdict::Kind::UnknownWithinBounds;
  return v;
}

bool check_circle_witness(const SpaceGroup& M, const AffineMap& beta1, const AffineMap& beta2,
                          const EquivalenceWitness& w) {
  AffineMap target = w.reversed ? beta2.inverse() : beta2;
  AffineMap z = AffineMap::translation(-w.central_offset) * target.inverse() * w.conjugator * beta1 *
                w.conjugator.inverse();
  auto fixed = point_group_fixed_space(M);
  return in_span(span_basis(fixed, M.dim()), w.central_offset) && contains(M, z);
}

std::optional<EquivalenceWitness> search_interval_equivalence(const SpaceGroup& M,
                                                              const std::pair<AffineMap, AffineMap>& pair1,
                                                              const std::pair<AffineMap, AffineMap>& pair2,
                                                              const SearchBounds& bounds,
                                                              const std::vector<AffineMap>& sample) {
  const std::size_t n = M.dim();
  auto fixed = span_basis(point_group_fixed_space(M), n);
  std::vector<RatVector> lat2;
  for (const auto& b : M.lattice().basis()) {
    lat2.push_back(concat(b, zero_vector(n)));
    lat2.push_back(concat(zero_vector(n), b));
  }
  for (bool reversed : {false, true}) {
    const AffineMap& p = reversed ? pair2.second : pair2.first;
    const AffineMap& q = reversed ? pair2.first : pair2.second;
    // Twists u in Span Z(M) with Pu = Qu = -u.
    std::vector<RatVector> twists;
    {
      RatMatrix Ksys(2 * n, fixed.size());
      for (std::size_t j = 0; j < fixed.size(); ++j) {
        RatVector a = act(p.A, fixed[j]) + fixed[j], b = act(q.A, fixed[j]) + fixed[j];
        for (std::size_t i = 0; i < n; ++i) {
          Ksys(i, j) = a[i];
          Ksys(n + i, j) = b[i];
        }
      }
      for (const auto& z : nullspace(Ksys)) {
        RatVector u = zero_vector(n);
        for (std::size_t j = 0; j < fixed.size(); ++j) u = u + scale(fixed[j], z[j]);
        twists.push_back(u);
      }
    }
    IntMatrix Pi = inverse_unimodular(p.A), Qi = inverse_unimodular(q.A);
    std::vector<RatVector> wgens;
    for (const auto& f : fixed) wgens.push_back(concat(act(Pi, f) - f, act(Qi, f) - f));
    for (const auto& u : twists) wgens.push_back(concat(zero_vector(n), u));
    LatticePlusSubspace quotient(2 * n, lat2, wgens);
    AffineMap pinv = p.inverse(), qinv = q.inverse();
    auto deltas = [&](const AffineMap& psi) -> std::optional<RatVector> {
      AffineMap psii = psi.inverse();
      AffineMap z1 = pinv * psi * pair1.first * psii;
      auto j1 = M.find(z1.A);
      if (!j1) return std::nullopt;
      AffineMap z2 = qinv * psi * pair1.second * psii;
      auto j2 = M.find(z2.A);
      if (!j2) return std::nullopt;
      return concat(z1.t - M.coset_reps()[*j1], z2.t - M.coset_reps()[*j2]);
    };
    auto hit = parallel_find_first(sample.size(), std::max(1u, bounds.jobs), [&](std::size_t i) {
      auto d = deltas(sample[i]);
      return d && quotient.contains(*d);
    });
    if (!hit) continue;
    const AffineMap& psi = sample[*hit];
    RatVector d = *deltas(psi);
    RatVector w = *quotient.lattice_part(d) - d;
    auto coeffs = rational_combination(wgens, w);
    if (!coeffs) throw std::logic_error("interval equivalence: subspace decomposition failed");
    RatVector c = zero_vector(n), u = zero_vector(n);
    for (std::size_t j = 0; j < fixed.size(); ++j) c = c + scale(fixed[j], (*coeffs)[j]);
    for (std::size_t j = 0; j < twists.size(); ++j) u = u + scale(twists[j], (*coeffs)[fixed.size() + j]);
    return EquivalenceWitness{AffineMap::translation(c) * psi, reversed, u, zero_vector(n)};
  }
  return std::nullopt;
}

EquivalenceVerdict interval_pairs_equivalent(const SpaceGroup& M, const std::pair<AffineMap, AffineMap>& pair1,
                                             const std::pair<AffineMap, AffineMap>& pair2, const SearchBounds& bounds,
                                             const std::vector<AffineMap>* sample) {
  EquivalenceVerdict v;
  if (auto sep = separating_entry(interval_signature(M, pair1.first, pair1.second),
                                  interval_signature(M, pair2.first, pair2.second))) {
    v.kind = EquivalenceVerdict::Kind::InequivalentByInvariant;
    v.invariant = *sep;
    return v;
  }
  std::vector<AffineMap> local;
  if (!sample) {
    local = normalizer_sample(M, bounds);
    sample = &local;
  }
  v.witness = search_interval_equivalence(M, pair1, pair2, bounds, *sample);
  v.kind = v.witness ? EquivalenceVerdict::Kind::Equivalent : EquivalenceVerdict::Kind::UnknownWithinBounds;
  return v;
}

bool check_interval_witness(const SpaceGroup& M, const std::pair<AffineMap, AffineMap>& pair1,
                            const std::pair<AffineMap, AffineMap>& pair2, const EquivalenceWitness& w) {
  const AffineMap& p = w.reversed ? pair2.second : pair2.first;
  const AffineMap& q = w.reversed ? pair2.first : pair2.second;
  if (!(act(p.A, w.twist) == -w.twist) || !(act(q.A, w.twist) == -w.twist)) return false;
  if (!in_span(span_basis(point_group_fixed_space(M), M.dim()), w.twist)) return false;
  const AffineMap& psi = w.conjugator;
  AffineMap psii = psi.inverse();
  AffineMap tq = AffineMap::translation(w.twist) * q;
  return contains(M, p.inverse() * psi * pair1.first * psii) && contains(M, tq.inverse() * psi * pair1.second * psii);
}

}  // namespace flatfold
