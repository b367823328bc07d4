#include "flatfold/finite_group.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace flatfold {

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> table, int identity)
    : table_(std::move(table)), identity_(identity) {}

int FiniteGroup::inverse(int a) const {
  for (std::size_t b = 0; b < order(); ++b)
    if (table_[a][b] == identity_) return static_cast<int>(b);
  throw std::logic_error("element without inverse");
}

int FiniteGroup::element_order(int a) const {
  int k = 1;
  for (int x = a; x != identity_; x = table_[x][a]) ++k;
  return k;
}

bool FiniteGroup::is_abelian() const {
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = a + 1; b < order(); ++b)
      if (table_[a][b] != table_[b][a]) return false;
  return true;
}

std::vector<int> FiniteGroup::generated_subgroup(const std::vector<int>& gens) const {
  std::vector<int> elems{identity_};
  std::vector<bool> seen(order(), false);
  seen[identity_] = true;
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (int g : gens) {
      int p = table_[elems[i]][g];
      if (!seen[p]) {
        seen[p] = true;
        elems.push_back(p);
      }
    }
  std::sort(elems.begin(), elems.end());
  return elems;
}

std::size_t FiniteGroup::derived_subgroup_order() const {
  std::set<int> comms;
  for (std::size_t a = 0; a < order(); ++a)
    for (std::size_t b = 0; b < order(); ++b) {
      int ab = table_[a][b];
      int ba = table_[b][a];
      comms.insert(table_[ab][inverse(ba)]);
    }
  return generated_subgroup(std::vector<int>(comms.begin(), comms.end())).size();
}

std::vector<int> FiniteGroup::order_multiset() const {
  std::vector<int> out;
  for (std::size_t a = 0; a < order(); ++a) out.push_back(element_order(static_cast<int>(a)));
  std::sort(out.begin(), out.end());
  return out;
}

GroupFingerprint fingerprint(const FiniteGroup& g) {
  return GroupFingerprint{g.order(), g.order_multiset(), g.derived_subgroup_order()};
}

namespace {

using Perm = std::vector<int>;

Perm compose(const Perm& a, const Perm& b) {
  Perm c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = a[b[i]];
  return c;
}

Perm cycles(std::size_t n, const std::vector<std::vector<int>>& cs) {
  Perm p(n);
  std::iota(p.begin(), p.end(), 0);
  for (const auto& c : cs)
    for (std::size_t i = 0; i < c.size(); ++i) p[c[i]] = c[(i + 1) % c.size()];
  return p;
}

GroupFingerprint perm_group(std::size_t n, const std::vector<std::vector<std::vector<int>>>& gens) {
  Perm id(n);
  std::iota(id.begin(), id.end(), 0);
  std::vector<Perm> ps;
  for (const auto& g : gens) ps.push_back(cycles(n, g));
  return fingerprint(FiniteGroup::generate(id, ps, compose));
}

std::vector<std::pair<std::string, GroupFingerprint>> build_catalog() {
  std::vector<std::pair<std::string, GroupFingerprint>> c;
  c.emplace_back("C1", perm_group(1, {}));
  for (int k = 2; k <= 6; ++k) {
    std::vector<int> cyc(k);
    std::iota(cyc.begin(), cyc.end(), 0);
    c.emplace_back("C" + std::to_string(k), perm_group(k, {{cyc}}));
  }
  c.emplace_back("(C2)^2", perm_group(4, {{{0, 1}}, {{2, 3}}}));
  c.emplace_back("(C2)^3", perm_group(6, {{{0, 1}}, {{2, 3}}, {{4, 5}}}));
  c.emplace_back("C2xC4", perm_group(6, {{{0, 1}}, {{2, 3, 4, 5}}}));
  c.emplace_back("C2xC6", perm_group(8, {{{0, 1}}, {{2, 3, 4, 5, 6, 7}}}));
  c.emplace_back("(C3)^2", perm_group(6, {{{0, 1, 2}}, {{3, 4, 5}}}));
  c.emplace_back("D3", perm_group(3, {{{0, 1, 2}}, {{0, 1}}}));
  c.emplace_back("D4", perm_group(4, {{{0, 1, 2, 3}}, {{0, 2}}}));
  c.emplace_back("D6", perm_group(6, {{{0, 1, 2, 3, 4, 5}}, {{0, 5}, {1, 4}, {2, 3}}}));
  c.emplace_back("A4", perm_group(4, {{{0, 1, 2}}, {{1, 2, 3}}}));
  c.emplace_back("C2xA4", perm_group(6, {{{4, 5}}, {{0, 1, 2}}, {{1, 2, 3}}}));
  return c;
}

}  // namespace

const std::vector<std::pair<std::string, GroupFingerprint>>& label_catalog() {
  static const auto catalog = build_catalog();
  return catalog;
}

std::optional<std::string> recognize(const FiniteGroup& g) {
  GroupFingerprint f = fingerprint(g);
  for (const auto& [label, fp] : label_catalog())
    if (fp == f) return label;
  return std::nullopt;
}

std::string canonical_label(const std::string& label) {
  if (label == "C4xC2") return "C2xC4";
  if (label == "C6xC2") return "C2xC6";
  if (label == "D1") return "C2";
  if (label == "D2") return "(C2)^2";
  if (label == "C2^2") return "(C2)^2";
  if (label == "C2^3") return "(C2)^3";
  return label;
}

std::size_t label_order(const std::string& label) {
  std::string l = canonical_label(label);
  for (const auto& [name, fp] : label_catalog())
    if (name == l) return fp.order;
  if (l.size() >= 2 && (l[0] == 'C' || l[0] == 'D')) {
    std::size_t k = std::stoul(l.substr(1));
    return l[0] == 'C' ? k : 2 * k;
  }
  throw std::invalid_argument("unknown group label: " + label);
}

}  // namespace flatfold
