#pragma once
// Finite groups given by multiplication tables, and the label catalog used for holonomy and structure groups.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatfold {

class FiniteGroup {
 public:
  FiniteGroup() = default;
  FiniteGroup(std::vector<std::vector<int>> table, int identity);

  // Enumerate the group generated by gens under mul; T needs operator<.
  template <class T, class Mul>
  static FiniteGroup generate(const T& identity, const std::vector<T>& gens, Mul mul, std::size_t cap = 100000) {
    std::vector<T> elems{identity};
    std::map<T, int> index{{identity, 0}};
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (const auto& g : gens) {
        T p = mul(elems[i], g);
        if (index.emplace(p, static_cast<int>(elems.size())).second) {
          elems.push_back(p);
          if (elems.size() > cap) throw std::runtime_error("finite group exceeds cap");
        }
      }
    std::vector<std::vector<int>> table(elems.size(), std::vector<int>(elems.size()));
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (std::size_t j = 0; j < elems.size(); ++j) table[i][j] = index.at(mul(elems[i], elems[j]));
    return FiniteGroup(std::move(table), 0);
  }

  std::size_t order() const { return table_.size(); }
  int identity() const { return identity_; }
  int mul(int a, int b) const { return table_[a][b]; }
  int inverse(int a) const;
  int element_order(int a) const;
  bool is_abelian() const;
  std::size_t derived_subgroup_order() const;
  // Sorted multiset of element orders.
  std::vector<int> order_multiset() const;
  // Subgroup generated by the given elements, as a sorted element list.
  std::vector<int> generated_subgroup(const std::vector<int>& gens) const;

 private:
  std::vector<std::vector<int>> table_;
  int identity_ = 0;
};

struct GroupFingerprint {
  std::size_t order = 0;
  std::vector<int> orders;
  std::size_t derived_order = 0;
  bool operator==(const GroupFingerprint&) const = default;
};

GroupFingerprint fingerprint(const FiniteGroup& g);

// Canonical label of a catalogued group ("C1".."C6", "(C2)^2", "(C2)^3", "C2xC4", "C2xC6",
// "(C3)^2", "D3", "D4", "D6", "A4", "C2xA4"), or nullopt.
std::optional<std::string> recognize(const FiniteGroup& g);
// Normalizes spelling variants such as "C4xC2" or "D1"/"D2" to catalogue labels.
std::string canonical_label(const std::string& label);
// Order of a catalogued (or dihedral/cyclic) label.
std::size_t label_order(const std::string& label);
const std::vector<std::pair<std::string, GroupFingerprint>>& label_catalog();

}  // namespace flatfold
