#include "flatfold/spacegroup.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace flatfold {

AffineMap::AffineMap(RatVector translation, IntMatrix linear) : t(std::move(translation)), A(std::move(linear)) {
  if (!A.is_square() || A.rows() != t.size()) throw std::invalid_argument("affine map: shape mismatch");
}

AffineMap AffineMap::identity(std::size_t n) { return AffineMap(zero_vector(n), IntMatrix::identity(n)); }
AffineMap AffineMap::translation(const RatVector& v) { return AffineMap(v, IntMatrix::identity(v.size())); }
AffineMap AffineMap::linear(const IntMatrix& m) { return AffineMap(zero_vector(m.rows()), m); }

AffineMap operator*(const AffineMap& f, const AffineMap& g) { return AffineMap(f.t + act(f.A, g.t), f.A * g.A); }

bool operator<(const AffineMap& f, const AffineMap& g) {
  if (f.A < g.A) return true;
  if (g.A < f.A) return false;
  return f.t < g.t;
}

AffineMap AffineMap::inverse() const {
  IntMatrix inv = inverse_unimodular(A);
  return AffineMap(-act(inv, t), inv);
}

AffineMap AffineMap::pow(long k) const {
  AffineMap base = k < 0 ? inverse() : *this;
  AffineMap r = identity(dim());
  for (long i = 0; i < (k < 0 ? -k : k); ++i) r = r * base;
  return r;
}

RatVector AffineMap::operator()(const RatVector& x) const { return t + act(A, x); }

bool AffineMap::is_translation() const { return A == IntMatrix::identity(A.rows()); }

std::string format_element(const AffineMap& g) {
  std::ostringstream os;
  for (std::size_t i = 0; i < g.t.size(); ++i) os << (i ? " " : "") << g.t[i].get_str();
  os << " |";
  for (const auto& x : g.A.data()) os << ' ' << x.get_str();
  return os.str();
}

AffineMap parse_element(const std::string& text, std::size_t dim) {
  auto bar = text.find('|');
  if (bar == std::string::npos) throw ParseError("element lacks '|': " + text);
  std::istringstream left(text.substr(0, bar)), right(text.substr(bar + 1));
  std::vector<std::string> tl, ml;
  for (std::string tok; left >> tok;) tl.push_back(tok);
  for (std::string tok; right >> tok;) ml.push_back(tok);
  if (tl.size() != dim || ml.size() != dim * dim)
    throw ParseError("element has wrong number of entries for dimension " + std::to_string(dim) + ": " + text);
  RatVector t;
  IntMatrix A(dim, dim);
  try {
    for (const auto& s : tl) t.push_back(parse_rational(s));
    for (std::size_t i = 0; i < ml.size(); ++i) {
      Rational q = parse_rational(ml[i]);
      if (!is_integral(q)) throw ParseError("matrix entry is not an integer: " + ml[i]);
      A(i / dim, i % dim) = q.get_num();
    }
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  if (!is_unimodular(A)) throw ParseError("matrix is not unimodular: " + text);
  return AffineMap(std::move(t), std::move(A));
}

std::optional<std::size_t> SpaceGroup::find(const IntMatrix& A) const {
  auto it = index_.find(A);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<AffineMap> SpaceGroup::coset_elements() const {
  std::vector<AffineMap> out;
  for (std::size_t i = 0; i < point_group_.size(); ++i) out.push_back(coset_element(i));
  return out;
}

std::vector<AffineMap> SpaceGroup::normal_generators() const {
  std::vector<AffineMap> out;
  for (const auto& b : lattice_.basis()) out.push_back(AffineMap::translation(b));
  for (std::size_t i = 1; i < point_group_.size(); ++i) out.push_back(coset_element(i));
  return out;
}

AffineMap SpaceGroup::reduce(const AffineMap& g) const { return AffineMap(lattice_.reduce(g.t), g.A); }

FiniteGroup SpaceGroup::point_group_table() const {
  return FiniteGroup::generate(IntMatrix::identity(dim_), point_group_,
                               [](const IntMatrix& a, const IntMatrix& b) { return a * b; });
}

SpaceGroup close_group(std::size_t dim, const std::vector<AffineMap>& gens, std::size_t cap) {
  constexpr int kMaxRounds = 200;
  for (const auto& g : gens) {
    if (g.dim() != dim) throw std::invalid_argument("close_group: generator dimension mismatch");
    if (!is_unimodular(g.A)) throw std::invalid_argument("close_group: generator matrix not unimodular");
  }
  std::vector<RatVector> pure;
  for (const auto& g : gens)
    if (g.is_translation()) pure.push_back(g.t);
  Lattice L = Lattice::from_vectors(dim, pure);
  const IntMatrix I = IntMatrix::identity(dim);

  std::vector<IntMatrix> mats;
  std::vector<RatVector> reps;
  std::map<IntMatrix, std::size_t> index;
  for (int round = 0;; ++round) {
    if (round > kMaxRounds) throw NotDiscrete("translation closure does not stabilize");
    mats = {I};
    reps = {zero_vector(dim)};
    index = {{I, 0}};
    for (std::size_t i = 0; i < mats.size(); ++i)
      for (const auto& g : gens) {
        IntMatrix A = g.A * mats[i];
        if (index.count(A)) continue;
        if (mats.size() >= cap) throw CapExceeded("point group exceeds closure cap " + std::to_string(cap));
        index.emplace(A, mats.size());
        reps.push_back(L.reduce(g.t + act(g.A, reps[i])));
        mats.push_back(std::move(A));
      }
    // Schreier generators of the translation subgroup relative to the current transversal.
    std::vector<RatVector> fresh;
    for (std::size_t i = 0; i < mats.size(); ++i)
      for (const auto& g : gens) {
        std::size_t k = index.at(g.A * mats[i]);
        RatVector d = g.t + act(g.A, reps[i]) - reps[k];
        if (!L.contains(d)) fresh.push_back(std::move(d));
      }
    for (const auto& b : L.basis())
      for (const auto& g : gens) {
        RatVector d = act(g.A, b);
        if (!L.contains(d)) fresh.push_back(std::move(d));
      }
    if (fresh.empty()) break;
    L = L.add(fresh);
    for (const auto& x : L.hnf().data())
      if (mpz_sizeinbase(x.get_mpz_t(), 2) > 256 || mpz_sizeinbase(L.denominator().get_mpz_t(), 2) > 256)
        throw NotDiscrete("translation lattice denominators grow without bound");
  }

  // Canonical order: identity first, then sorted matrices.
  std::vector<std::size_t> order(mats.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin() + 1, order.end(), [&](std::size_t a, std::size_t b) { return mats[a] < mats[b]; });
  SpaceGroup G;
  G.dim_ = dim;
  G.gens_ = gens;
  G.lattice_ = L;
  for (std::size_t i : order) {
    G.index_.emplace(mats[i], G.point_group_.size());
    G.point_group_.push_back(mats[i]);
    G.reps_.push_back(L.reduce(reps[i]));
  }
  return G;
}

bool contains(const SpaceGroup& G, const AffineMap& g) {
  auto i = G.find(g.A);
  if (!i) return false;
  return G.lattice().contains(g.t - G.coset_reps()[*i]);
}

bool is_torsion_free(const SpaceGroup& G) {
  for (std::size_t i = 1; i < G.point_group().size(); ++i)
    if (torus_fixed_point_exists(G.point_group()[i], G.coset_reps()[i], G.lattice())) return false;
  return true;
}

namespace {

std::vector<Integer> lattice_coords(const Lattice& L, const RatVector& v) {
  auto c = L.coordinates(v);
  if (!c) throw std::logic_error("vector expected in lattice");
  return *c;
}

// Relation matrix of the abelianized extension presentation.
IntMatrix relation_matrix(const SpaceGroup& G) {
  const auto& L = G.lattice();
  if (!L.full_rank()) throw std::domain_error("first_homology: lattice must have full rank");
  const std::size_t n = G.dim(), h = G.point_group().size();
  const std::size_t k = n + h - 1;
  const auto basis = L.basis();
  std::vector<std::vector<Integer>> rows;
  for (std::size_t i = 1; i < h; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Integer> r(k);
      auto c = lattice_coords(L, act(G.point_group()[i], basis[j]));
      for (std::size_t q = 0; q < n; ++q) r[q] = c[q];
      r[j] -= 1;
      rows.push_back(std::move(r));
    }
  for (std::size_t i = 1; i < h; ++i)
    for (std::size_t j = 1; j < h; ++j) {
      const auto& A = G.point_group()[i];
      std::size_t p = *G.find(A * G.point_group()[j]);
      RatVector tij = G.coset_reps()[i] + act(A, G.coset_reps()[j]) - G.coset_reps()[p];
      auto c = lattice_coords(L, tij);
      std::vector<Integer> r(k);
      for (std::size_t q = 0; q < n; ++q) r[q] = -c[q];
      r[n + i - 1] += 1;
      r[n + j - 1] += 1;
      if (p != 0) r[n + p - 1] -= 1;
      rows.push_back(std::move(r));
    }
  IntMatrix R(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) R(i, j) = rows[i][j];
  return R;
}

}  // namespace

Homology first_homology(const SpaceGroup& G) {
  IntMatrix R = relation_matrix(G);
  auto divs = elementary_divisors(R);
  Homology h;
  h.betti = R.cols() - divs.size();
  for (const auto& d : divs)
    if (d != 1) h.torsion.push_back(d);
  return h;
}

std::vector<Character> z2_characters(const SpaceGroup& G) {
  IntMatrix R = relation_matrix(G);
  const std::size_t k = R.cols();
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < R.rows(); ++i) {
    std::vector<int> r(k);
    for (std::size_t j = 0; j < k; ++j) r[j] = mpz_odd_p(R(i, j).get_mpz_t()) ? 1 : 0;
    rows.push_back(std::move(r));
  }
  // Row echelon form over F2, then one kernel vector per free column.
  std::vector<std::size_t> pivots;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < k && rank < rows.size(); ++c) {
    std::size_t p = rank;
    while (p < rows.size() && !rows[p][c]) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (i != rank && rows[i][c])
        for (std::size_t j = 0; j < k; ++j) rows[i][j] ^= rows[rank][j];
    pivots.push_back(c);
    ++rank;
  }
  std::vector<Character> basis;
  for (std::size_t f = 0; f < k; ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    Character v(k);
    v[f] = 1;
    for (std::size_t i = 0; i < rank; ++i) v[pivots[i]] = rows[i][f];
    basis.push_back(std::move(v));
  }
  std::vector<Character> out;
  const std::size_t d = basis.size();
  if (d > 20) throw CapExceeded("z2_characters: too many characters");
  for (std::size_t mask = 1; mask < (std::size_t(1) << d); ++mask) {
    Character v(k);
    for (std::size_t b = 0; b < d; ++b)
      if (mask >> b & 1)
        for (std::size_t j = 0; j < k; ++j) v[j] ^= basis[b][j];
    out.push_back(std::move(v));
  }
  return out;
}

int character_value(const SpaceGroup& G, const Character& chi, const AffineMap& g) {
  auto i = G.find(g.A);
  if (!i) throw std::invalid_argument("character_value: element not in group");
  auto c = G.lattice().coordinates(g.t - G.coset_reps()[*i]);
  if (!c) throw std::invalid_argument("character_value: element not in group");
  const std::size_t n = G.dim();
  int v = *i == 0 ? 0 : chi[n + *i - 1];
  for (std::size_t j = 0; j < n; ++j)
    if (chi[j] && mpz_odd_p((*c)[j].get_mpz_t())) v ^= 1;
  return v;
}

SpaceGroup parity_kernel(const SpaceGroup& G, const std::function<int(const AffineMap&)>& parity) {
  const std::size_t n = G.dim();
  std::vector<AffineMap> gens;
  std::optional<AffineMap> odd;
  for (const auto& b : G.lattice().basis()) {
    AffineMap tb = AffineMap::translation(b);
    if (!parity(tb)) {
      gens.push_back(tb);
    } else if (!odd) {
      odd = tb;
      gens.push_back(tb * tb);
    } else {
      gens.push_back(tb * *odd);
    }
  }
  for (const auto& g : G.coset_elements()) {
    if (g.A == IntMatrix::identity(n)) continue;
    if (!parity(g))
      gens.push_back(g);
    else if (odd)
      gens.push_back(g * *odd);
    else
      for (const auto& h : G.coset_elements())
        if (parity(h)) gens.push_back(g * h);
  }
  return close_group(n, gens);
}

std::vector<RatVector> homology_torsion_span(const SpaceGroup& G) {
  const std::size_t n = G.dim();
  IntMatrix R = relation_matrix(G);
  SnfResult s = smith_normal_form(R, false, true);
  std::size_t r = 0;
  while (r < std::min(s.D.rows(), s.D.cols()) && s.D(r, r) != 0) ++r;
  const std::size_t k = R.cols();
  // Lattice coordinates y with y * V[0:n, r:k] = 0.
  RatMatrix M(k - r, n);
  for (std::size_t i = r; i < k; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i - r, j) = Rational(s.V(j, i));
  std::vector<RatVector> ker;
  if (M.rows() == 0) {
    for (std::size_t j = 0; j < n; ++j) ker.push_back(unit_vector(n, j));
  } else {
    ker = nullspace(M);
  }
  const auto basis = G.lattice().basis();
  std::vector<RatVector> out;
  for (const auto& y : ker) {
    RatVector v(n);
    for (std::size_t j = 0; j < n; ++j) v = v + scale(basis[j], y[j]);
    out.push_back(std::move(v));
  }
  return span_basis(out, n);
}

std::vector<RatVector> point_group_fixed_space(const SpaceGroup& G) {
  const std::size_t n = G.dim();
  RatMatrix stack(n * G.point_group().size(), n);
  for (std::size_t p = 0; p < G.point_group().size(); ++p)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        stack(p * n + i, j) = Rational(G.point_group()[p](i, j) - (i == j ? 1 : 0));
  return nullspace(stack);
}

std::size_t betti_via_fixed_space(const SpaceGroup& G) { return point_group_fixed_space(G).size(); }

bool is_orientable(const SpaceGroup& G) {
  for (const auto& A : G.point_group())
    if (determinant(A) != 1) return false;
  return true;
}

std::string holonomy_class(const SpaceGroup& G) {
  auto label = recognize(G.point_group_table());
  if (!label) throw UnrecognizedGroup("point group of order " + std::to_string(G.holonomy_order()) + " not catalogued");
  return *label;
}

SpaceGroup orientation_double_cover(const SpaceGroup& G) {
  if (is_orientable(G)) throw std::domain_error("AlreadyOrientable: group is orientable");
  std::vector<AffineMap> gens;
  for (const auto& b : G.lattice().basis()) gens.push_back(AffineMap::translation(b));
  for (std::size_t i = 1; i < G.point_group().size(); ++i)
    if (determinant(G.point_group()[i]) == 1) gens.push_back(G.coset_element(i));
  return close_group(G.dim(), gens);
}

InvariantRecord invariant_record(const SpaceGroup& G) {
  InvariantRecord r;
  r.dim = G.dim();
  r.orientable = is_orientable(G);
  Homology h = first_homology(G);
  r.betti = h.betti;
  r.h1_torsion = h.torsion;
  r.holonomy_label = holonomy_class(G);
  r.holonomy_order = G.holonomy_order();
  return r;
}

std::string format_homology(std::size_t betti, const std::vector<Integer>& torsion) {
  std::ostringstream os;
  bool first = true;
  if (betti > 0) {
    os << "Z";
    if (betti > 1) os << "^" << betti;
    first = false;
  }
  for (std::size_t i = 0; i < torsion.size();) {
    std::size_t j = i;
    while (j < torsion.size() && torsion[j] == torsion[i]) ++j;
    os << (first ? "" : "+") << "Z" << torsion[i].get_str();
    if (j - i > 1) os << "^" << (j - i);
    first = false;
    i = j;
  }
  if (first) os << "0";
  return os.str();
}

std::string format_record(const InvariantRecord& r) {
  std::ostringstream os;
  os << "dim " << r.dim << "; " << (r.orientable ? "orientable" : "nonorientable") << "; H1 "
     << format_homology(r.betti, r.h1_torsion) << "; holonomy " << r.holonomy_label;
  return os.str();
}

bool normalizes(const SpaceGroup& M, const AffineMap& phi) {
  AffineMap inv = phi.inverse();
  for (const auto& g : M.generators()) {
    if (!contains(M, phi * g * inv)) return false;
    if (!contains(M, inv * g * phi)) return false;
  }
  return true;
}

std::optional<long> affinity_order(const SpaceGroup& M, const AffineMap& phi, long cap) {
  AffineMap p = phi;
  for (long m = 1; m <= cap; ++m) {
    if (contains(M, p)) return m;
    p = p * phi;
  }
  return std::nullopt;
}

bool manifold_fixed_point_free(const SpaceGroup& M, const AffineMap& phi) {
  for (std::size_t i = 0; i < M.point_group().size(); ++i) {
    AffineMap h = M.coset_element(i) * phi;
    if (torus_fixed_point_exists(h.A, h.t, M.lattice())) return false;
  }
  return true;
}

GroupFile parse_group_file(const std::string& text) {
  GroupFile out;
  std::istringstream in(text);
  std::string line;
  bool have_dim = false;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "dim") {
      long d = 0;
      if (have_dim || !(ls >> d) || d <= 0) throw ParseError("line " + std::to_string(lineno) + ": bad dim header");
      out.dim = static_cast<std::size_t>(d);
      have_dim = true;
    } else if (key == "gen") {
      if (!have_dim) throw ParseError("line " + std::to_string(lineno) + ": gen before dim");
      std::string rest;
      std::getline(ls, rest);
      try {
        out.gens.push_back(parse_element(rest, out.dim));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    } else {
      throw ParseError("line " + std::to_string(lineno) + ": unknown keyword '" + key + "'");
    }
  }
  if (!have_dim) throw ParseError("missing dim header");
  return out;
}

GroupFile read_group_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_group_file(ss.str());
}

std::string write_group_file(const GroupFile& g) {
  std::ostringstream os;
  os << "dim " << g.dim << "\n";
  for (const auto& e : g.gens) os << "gen " << format_element(e) << "\n";
  return os.str();
}

}  // namespace flatfold
