#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "shimura/equations.hpp"
#include "shimura/quotients.hpp"

namespace shimura {

struct ecdb_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct curve_record {
  std::string label;  // e.g. 105a2
  i64 conductor;
  std::string cls;    // e.g. 105a
  a_invariants ai;
  std::vector<i64> isogeny_row;  // degrees to the class members, in index order
  int index = 0;                 // trailing number of the label
};

class ecdb {
 public:
  static ecdb load(const std::string& path);
  static ecdb parse(std::istream& in, const std::string& source = "<input>");
  std::string serialize() const;

  std::size_t size() const { return curves_.size(); }
  const std::vector<curve_record>& curves() const { return curves_; }
  const curve_record* find(const std::string& label) const;
  std::vector<curve_record> isogeny_class(const std::string& cls) const;  // sorted by index
  std::vector<curve_record> by_conductor(i64 N) const;
  i64 isogeny_degree(const std::string& l1, const std::string& l2) const;

 private:
  std::vector<curve_record> curves_;
  std::map<std::string, std::size_t> by_label_;
  std::map<std::string, std::vector<std::size_t>> by_class_;
};

struct class_resolution {
  std::map<i64, i64> symbols;        // Kodaira I_n at each p | D
  std::vector<std::string> labels;   // one label, or the ambiguity set
  bool unique() const { return labels.size() == 1; }
};

class_resolution resolve_isomorphism_class(i64 D, i64 N, const al_subgroup& W, const std::string& cls, const ecdb& db);

}  // namespace shimura
