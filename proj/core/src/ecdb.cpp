#include "shimura/ecdb.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include "shimura/cdunif.hpp"

namespace shimura {

namespace {

const char* kHeader = "label,conductor,class,a1,a2,a3,a4,a6,isogeny_row";

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

[[noreturn]] void fail(const std::string& src, int line, const std::string& msg) {
  throw ecdb_error(src + ":" + std::to_string(line) + ": " + msg);
}

}  // namespace

ecdb ecdb::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ecdb_error("cannot open " + path);
  return parse(in, path);
}

ecdb ecdb::parse(std::istream& in, const std::string& src) {
  static const std::regex label_re("^([0-9]+)([a-z]+)([0-9]+)$");
  ecdb db;
  std::string line;
  int ln = 0;
  bool header = false;
  std::map<std::string, int> class_line;
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kHeader) fail(src, ln, "expected header '" + std::string(kHeader) + "'");
      header = true;
      continue;
    }
    auto f = split(line, ',');
    if (f.size() != 9) fail(src, ln, "expected 9 fields, got " + std::to_string(f.size()));
    curve_record r;
    r.label = f[0];
    std::smatch m;
    if (!std::regex_match(r.label, m, label_re)) fail(src, ln, "bad label '" + r.label + "'");
    try {
      r.conductor = std::stoll(f[1]);
      r.index = std::stoi(m[3].str());
    } catch (...) {
      fail(src, ln, "bad conductor '" + f[1] + "'");
    }
    if (m[1].str() != f[1]) fail(src, ln, "label does not match conductor");
    r.cls = f[2];
    if (r.cls != m[1].str() + m[2].str()) fail(src, ln, "label does not match class");
    for (int i = 0; i < 5; ++i) {
      try {
        r.ai[i] = mpq_class(f[3 + i]);
        r.ai[i].canonicalize();
      } catch (...) {
        fail(src, ln, "bad a-invariant '" + f[3 + i] + "'");
      }
    }
    if (c_invs(r.ai).disc == 0) fail(src, ln, "singular curve");
    for (auto& d : split(f[8], ';')) {
      try {
        r.isogeny_row.push_back(std::stoll(d));
      } catch (...) {
        fail(src, ln, "bad isogeny degree '" + d + "'");
      }
    }
    if (db.by_label_.count(r.label)) fail(src, ln, "duplicate label " + r.label);
    db.by_label_[r.label] = db.curves_.size();
    db.by_class_[r.cls].push_back(db.curves_.size());
    class_line.emplace(r.cls, ln);
    db.curves_.push_back(std::move(r));
  }
  for (auto& [cls, ids] : db.by_class_) {
    std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return db.curves_[a].index < db.curves_[b].index; });
    for (std::size_t k = 0; k < ids.size(); ++k) {
      auto& r = db.curves_[ids[k]];
      if (r.isogeny_row.size() != ids.size()) fail(src, class_line[cls], "isogeny row of " + r.label + " has wrong length");
      if (r.isogeny_row[k] != 1) fail(src, class_line[cls], "isogeny row of " + r.label + " must have 1 on the diagonal");
      for (std::size_t j = 0; j < ids.size(); ++j)
        if (db.curves_[ids[j]].isogeny_row.size() == ids.size() && db.curves_[ids[j]].isogeny_row[k] != r.isogeny_row[j])
          fail(src, class_line[cls], "isogeny matrix of class " + cls + " is not symmetric");
    }
  }
  return db;
}

std::string ecdb::serialize() const {
  std::ostringstream out;
  out << kHeader << "\n";
  for (auto& r : curves_) {
    out << r.label << "," << r.conductor << "," << r.cls;
    for (auto& a : r.ai) out << "," << a.get_str();
    out << ",";
    for (std::size_t k = 0; k < r.isogeny_row.size(); ++k) out << (k ? ";" : "") << r.isogeny_row[k];
    out << "\n";
  }
  return out.str();
}

const curve_record* ecdb::find(const std::string& label) const {
  auto it = by_label_.find(label);
  return it == by_label_.end() ? nullptr : &curves_[it->second];
}

std::vector<curve_record> ecdb::isogeny_class(const std::string& cls) const {
  std::vector<curve_record> out;
  auto it = by_class_.find(cls);
  if (it == by_class_.end()) return out;
  for (auto k : it->second) out.push_back(curves_[k]);
  return out;
}

std::vector<curve_record> ecdb::by_conductor(i64 N) const {
  std::vector<curve_record> out;
  for (auto& [cls, ids] : by_class_)
    for (auto k : ids)
      if (curves_[k].conductor == N) out.push_back(curves_[k]);
  return out;
}

i64 ecdb::isogeny_degree(const std::string& l1, const std::string& l2) const {
  auto a = find(l1), b = find(l2);
  if (!a || !b) throw ecdb_error("unknown label");
  if (a->cls != b->cls) return 0;
  auto& ids = by_class_.at(a->cls);
  for (std::size_t k = 0; k < ids.size(); ++k)
    if (curves_[ids[k]].label == l2) return a->isogeny_row[k];
  return 0;
}

class_resolution resolve_isomorphism_class(i64 D, i64 N, const al_subgroup& W, const std::string& cls, const ecdb& db) {
  if (!is_squarefree(N)) throw arith_error("resolve_isomorphism_class: N must be squarefree");
  if (quotient_genus(D, N, W) != 1) throw arith_error("resolve_isomorphism_class: quotient genus is not 1");
  auto members = db.isogeny_class(cls);
  if (members.empty()) throw ecdb_error("class " + cls + " not in database");
  for (auto& f : factor(D))
    if (members.front().conductor % f.p != 0 || members.front().conductor % (f.p * f.p) == 0)
      throw ecdb_error("class " + cls + " is not multiplicative at " + std::to_string(f.p));
  class_resolution r;
  for (auto& f : factor(D)) r.symbols[f.p] = kodaira_In(base_graph(D, N, f.p), W);
  for (auto& c : isogeny_In_filter(r.symbols, members)) r.labels.push_back(c.label);
  if (r.labels.empty()) throw ecdb_error("no member of " + cls + " matches the Kodaira symbols");
  return r;
}

}  // namespace shimura
