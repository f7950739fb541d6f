#include "shimura/graphs.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace shimura {

int graph::add_vertex(std::int64_t w) {
  weight.push_back(w);
  return num_vertices() - 1;
}

int graph::add_edge(int a, int b, std::int64_t len) {
  int y = static_cast<int>(edges.size());
  edges.push_back({a, b, y + 1, len});
  edges.push_back({b, a, y, len});
  return y;
}

int graph::add_half_edge(int a, std::int64_t len) {
  int y = static_cast<int>(edges.size());
  edges.push_back({a, a, y, len});
  return y;
}

int graph::num_unoriented() const {
  int h = num_half_edges();
  return h + (static_cast<int>(edges.size()) - h) / 2;
}

int graph::num_half_edges() const {
  int h = 0;
  for (int y = 0; y < static_cast<int>(edges.size()); ++y) h += is_half(y);
  return h;
}

std::int64_t graph::total_length() const {
  std::int64_t s = 0;
  for (int y = 0; y < static_cast<int>(edges.size()); ++y)
    if (edges[y].inv >= y) s += edges[y].len;
  return s;
}

std::vector<int> graph::degree() const {
  std::vector<int> d(weight.size());
  for (auto& e : edges) ++d[e.o];
  return d;
}

bool graph::connected() const {
  if (weight.empty()) return true;
  std::vector<std::vector<int>> adj(weight.size());
  for (auto& e : edges) adj[e.o].push_back(e.t);
  std::vector<char> seen(weight.size());
  std::vector<int> st{0};
  seen[0] = 1;
  while (!st.empty()) {
    int x = st.back();
    st.pop_back();
    for (int y : adj[x])
      if (!seen[y]) seen[y] = 1, st.push_back(y);
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c; });
}

void graph::validate() const {
  int n = num_vertices();
  for (int y = 0; y < static_cast<int>(edges.size()); ++y) {
    auto& e = edges[y];
    if (e.o < 0 || e.o >= n || e.t < 0 || e.t >= n) throw graph_error("edge endpoint out of range");
    if (e.inv < 0 || e.inv >= static_cast<int>(edges.size())) throw graph_error("bad inverse index");
    auto& r = edges[e.inv];
    if (r.inv != y) throw graph_error("inversion is not an involution");
    if (r.o != e.t || r.t != e.o) throw graph_error("o(y) != t(inverse)");
    if (r.len != e.len || e.len < 1) throw graph_error("edge lengths must be positive and inversion-invariant");
  }
}

graph_perm compose(const graph_perm& a, const graph_perm& b) {
  graph_perm c;
  c.v.resize(b.v.size());
  c.e.resize(b.e.size());
  for (std::size_t i = 0; i < b.v.size(); ++i) c.v[i] = a.v[b.v[i]];
  for (std::size_t i = 0; i < b.e.size(); ++i) c.e[i] = a.e[b.e[i]];
  return c;
}

graph_perm identity_perm(const graph& g) {
  graph_perm p;
  p.v.resize(g.weight.size());
  p.e.resize(g.edges.size());
  std::iota(p.v.begin(), p.v.end(), 0);
  std::iota(p.e.begin(), p.e.end(), 0);
  return p;
}

void check_action(const graph& g, const graph_perm& h) {
  if (h.v.size() != g.weight.size() || h.e.size() != g.edges.size()) throw graph_error("action has wrong size");
  for (std::size_t y = 0; y < g.edges.size(); ++y) {
    auto& e = g.edges[y];
    auto& f = g.edges[h.e[y]];
    if (f.o != h.v[e.o] || f.t != h.v[e.t]) throw graph_error("action does not commute with o, t");
    if (h.e[e.inv] != g.edges[h.e[y]].inv) throw graph_error("action does not commute with inversion");
    if (f.len != e.len) throw graph_error("action does not preserve lengths");
  }
}

std::vector<graph_perm> group_closure(const graph& g, const std::vector<graph_perm>& gens) {
  for (auto& h : gens) check_action(g, h);
  std::set<graph_perm> seen{identity_perm(g)};
  std::vector<graph_perm> todo{identity_perm(g)};
  while (!todo.empty()) {
    auto x = todo.back();
    todo.pop_back();
    for (auto& h : gens) {
      auto y = compose(h, x);
      if (seen.insert(y).second) todo.push_back(y);
    }
  }
  return {seen.begin(), seen.end()};
}

quotient_map quotient_with_map(const graph& g, const std::vector<graph_perm>& gens) {
  auto H = group_closure(g, gens);
  std::int64_t order = static_cast<std::int64_t>(H.size());
  quotient_map q;
  int nv = g.num_vertices(), ne = static_cast<int>(g.edges.size());
  q.vclass.assign(nv, -1);
  q.eclass.assign(ne, -1);
  std::vector<std::int64_t> vorb, eorb;
  std::vector<int> vrep, erep;
  for (int x = 0; x < nv; ++x) {
    if (q.vclass[x] >= 0) continue;
    std::set<int> orb;
    for (auto& h : H) orb.insert(h.v[x]);
    for (int z : orb) q.vclass[z] = static_cast<int>(vrep.size());
    vrep.push_back(x);
    vorb.push_back(static_cast<std::int64_t>(orb.size()));
  }
  for (int y = 0; y < ne; ++y) {
    if (q.eclass[y] >= 0) continue;
    std::set<int> orb;
    for (auto& h : H) orb.insert(h.e[y]);
    for (int z : orb) q.eclass[z] = static_cast<int>(erep.size());
    erep.push_back(y);
    eorb.push_back(static_cast<std::int64_t>(orb.size()));
  }
  for (std::size_t c = 0; c < vrep.size(); ++c) q.g.weight.push_back(g.weight[vrep[c]] * (order / vorb[c]));
  for (std::size_t c = 0; c < erep.size(); ++c) {
    auto& e = g.edges[erep[c]];
    q.g.edges.push_back({q.vclass[e.o], q.vclass[e.t], q.eclass[e.inv], e.len * (order / eorb[c])});
  }
  q.g.validate();
  return q;
}

graph quotient(const graph& g, const std::vector<graph_perm>& gens) { return quotient_with_map(g, gens).g; }

namespace {

// keep the marked vertices and oriented edges (edges must be closed under inversion)
graph_map restrict(const graph& g, const std::vector<char>& keepv, const std::vector<char>& keepe) {
  graph_map m;
  std::vector<int> vnew(g.weight.size(), -1), enew(g.edges.size(), -1);
  for (std::size_t x = 0; x < g.weight.size(); ++x)
    if (keepv[x]) vnew[x] = m.g.add_vertex(g.weight[x]), m.vorig.push_back(static_cast<int>(x));
  int k = 0;
  for (std::size_t y = 0; y < g.edges.size(); ++y)
    if (keepe[y]) enew[y] = k++;
  for (std::size_t y = 0; y < g.edges.size(); ++y) {
    if (!keepe[y]) continue;
    auto& e = g.edges[y];
    m.g.edges.push_back({vnew[e.o], vnew[e.t], enew[e.inv], e.len});
    m.eorig.push_back(static_cast<int>(y));
  }
  return m;
}

}  // namespace

graph_map star_map(const graph& g) {
  std::vector<char> kv(g.weight.size(), 1), ke(g.edges.size());
  for (std::size_t y = 0; y < g.edges.size(); ++y) ke[y] = !g.is_half(static_cast<int>(y));
  return restrict(g, kv, ke);
}

graph star(const graph& g) { return star_map(g).g; }

graph_map minimize_map(const graph& g) {
  std::vector<char> kv(g.weight.size(), 1), ke(g.edges.size());
  for (std::size_t y = 0; y < g.edges.size(); ++y) ke[y] = !g.is_half(static_cast<int>(y));
  // prune all current leaves at once so the result is stable under automorphisms;
  // a tree ends at its center, which is a vertex or a single edge
  for (;;) {
    std::vector<int> deg(g.weight.size());
    for (std::size_t y = 0; y < g.edges.size(); ++y)
      if (ke[y]) ++deg[g.edges[y].o];
    std::vector<int> leaf_edges;
    for (std::size_t y = 0; y < g.edges.size(); ++y)
      if (ke[y] && deg[g.edges[y].o] == 1 && deg[g.edges[y].t] != 1) leaf_edges.push_back(static_cast<int>(y));
    if (leaf_edges.empty()) break;
    for (int y : leaf_edges) {
      ke[y] = ke[g.edges[y].inv] = 0;
      kv[g.edges[y].o] = 0;
    }
  }
  return restrict(g, kv, ke);
}

graph minimize(const graph& g) { return minimize_map(g).g; }

graph_map resolve_map(const graph& g) {
  graph_map m;
  m.g.weight = g.weight;
  m.vorig.resize(g.weight.size());
  std::iota(m.vorig.begin(), m.vorig.end(), 0);
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
    auto& e = g.edges[y];
    if (g.is_half(y)) throw graph_error("resolve: remove half-edges first (star)");
    if (e.inv < y) continue;
    int prev = e.o;
    for (std::int64_t k = 1; k <= e.len; ++k) {
      int next = k == e.len ? e.t : m.g.add_vertex(1);
      if (k < e.len) m.vorig.push_back(-1);
      m.g.add_edge(prev, next, 1);
      m.eorig.push_back(y);
      m.eorig.push_back(e.inv);
      prev = next;
    }
  }
  return m;
}

graph resolve(const graph& g) { return resolve_map(g).g; }

graph_perm induced_perm(const graph& src, const quotient_map& q, const graph_perm& h) {
  check_action(src, h);
  graph_perm r;
  r.v.assign(q.g.weight.size(), -1);
  r.e.assign(q.g.edges.size(), -1);
  for (std::size_t x = 0; x < src.weight.size(); ++x) {
    int a = q.vclass[x], b = q.vclass[h.v[x]];
    if (r.v[a] >= 0 && r.v[a] != b) throw graph_error("induced_perm: action does not descend");
    r.v[a] = b;
  }
  for (std::size_t y = 0; y < src.edges.size(); ++y) {
    int a = q.eclass[y], b = q.eclass[h.e[y]];
    if (r.e[a] >= 0 && r.e[a] != b) throw graph_error("induced_perm: action does not descend");
    r.e[a] = b;
  }
  check_action(q.g, r);
  return r;
}

graph_perm restrict_perm(const graph& src, const graph_map& m, const graph_perm& h) {
  check_action(src, h);
  std::vector<int> vback(src.weight.size(), -1), eback(src.edges.size(), -1);
  for (std::size_t x = 0; x < m.vorig.size(); ++x) vback[m.vorig[x]] = static_cast<int>(x);
  for (std::size_t y = 0; y < m.eorig.size(); ++y) eback[m.eorig[y]] = static_cast<int>(y);
  graph_perm r;
  for (int x : m.vorig) r.v.push_back(vback[h.v[x]]);
  for (int y : m.eorig) r.e.push_back(eback[h.e[y]]);
  for (int x : r.v)
    if (x < 0) throw graph_error("restrict_perm: action does not preserve the subgraph");
  for (int y : r.e)
    if (y < 0) throw graph_error("restrict_perm: action does not preserve the subgraph");
  check_action(m.g, r);
  return r;
}

// relies on the layout produced by resolve_map: chains in order of increasing representative edge
graph_perm resolve_perm(const graph& src, const graph_map& m, const graph_perm& h) {
  check_action(src, h);
  int ne = static_cast<int>(src.edges.size());
  std::vector<int> vstart(ne, -1), estart(ne, -1);
  int nv = src.num_vertices(), k = 0;
  for (int y = 0; y < ne; ++y) {
    auto& e = src.edges[y];
    if (e.inv < y) continue;
    vstart[y] = nv;
    estart[y] = k;
    nv += static_cast<int>(e.len - 1);
    k += static_cast<int>(2 * e.len);
  }
  // vertex i (0..len) and segment i (1..len, forward along z) of the chain of z
  auto vert = [&](int z, std::int64_t i) {
    auto& e = src.edges[z];
    bool fwd = e.inv > z;
    int r = fwd ? z : e.inv;
    std::int64_t j = fwd ? i : e.len - i;
    if (j == 0) return src.edges[r].o;
    if (j == e.len) return src.edges[r].t;
    return static_cast<int>(vstart[r] + j - 1);
  };
  auto seg = [&](int z, std::int64_t i) {
    auto& e = src.edges[z];
    bool fwd = e.inv > z;
    int r = fwd ? z : e.inv;
    return fwd ? static_cast<int>(estart[r] + 2 * (i - 1)) : static_cast<int>(estart[r] + 2 * (e.len - i) + 1);
  };
  graph_perm r;
  r.v.assign(m.g.weight.size(), -1);
  r.e.assign(m.g.edges.size(), -1);
  for (int x = 0; x < src.num_vertices(); ++x) r.v[x] = h.v[x];
  for (int y = 0; y < ne; ++y) {
    auto& e = src.edges[y];
    for (std::int64_t i = 1; i <= e.len; ++i) {
      r.e[seg(y, i)] = seg(h.e[y], i);
      if (i < e.len) r.v[vert(y, i)] = vert(h.e[y], i);
    }
  }
  check_action(m.g, r);
  return r;
}

graph dual_graph(const graph& g) {
  graph d;
  std::vector<int> id(g.edges.size(), -1);
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y)
    if (g.edges[y].inv >= y) id[y] = id[g.edges[y].inv] = d.add_vertex(1);
  std::vector<std::vector<int>> inc(g.weight.size());
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
    auto& e = g.edges[y];
    if (g.edges[y].inv < y) continue;
    inc[e.o].push_back(id[y]);
    if (e.t != e.o) inc[e.t].push_back(id[y]);
  }
  for (auto& l : inc)
    for (std::size_t i = 0; i < l.size(); ++i)
      for (std::size_t j = i + 1; j < l.size(); ++j) d.add_edge(l[i], l[j], 1);
  return d;
}

std::int64_t betti(const graph& g) {
  if (!g.connected()) throw graph_error("betti: graph is disconnected");
  if (g.weight.empty()) return 0;
  std::int64_t full = (static_cast<std::int64_t>(g.edges.size()) - g.num_half_edges()) / 2;
  return full - g.num_vertices() + 1;
}

namespace {

using code = std::vector<std::int64_t>;

code encode(const graph& g, const std::vector<int>& lab) {
  int n = g.num_vertices();
  code c;
  std::vector<std::int64_t> w(n);
  for (int x = 0; x < n; ++x) w[lab[x]] = g.weight[x];
  c.insert(c.end(), w.begin(), w.end());
  std::vector<std::array<std::int64_t, 4>> es;
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
    auto& e = g.edges[y];
    if (e.inv < y) continue;
    int a = lab[e.o], b = lab[e.t];
    es.push_back({std::min(a, b), std::max(a, b), e.len, g.is_half(y) ? 1 : 0});
  }
  std::sort(es.begin(), es.end());
  for (auto& t : es) c.insert(c.end(), t.begin(), t.end());
  return c;
}

// colour refinement, colours ordered by invariant so the result is label-independent
std::vector<int> refine(const graph& g) {
  int n = g.num_vertices();
  std::vector<std::vector<std::int64_t>> sig(n);
  std::vector<int> col(n, 0);
  for (int round = 0; round <= n; ++round) {
    for (int x = 0; x < n; ++x) sig[x] = {col[x], g.weight[x]};
    std::vector<std::vector<std::array<std::int64_t, 3>>> nb(n);
    for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
      auto& e = g.edges[y];
      nb[e.o].push_back({col[e.t], e.len, g.is_half(y)});
    }
    for (int x = 0; x < n; ++x) {
      std::sort(nb[x].begin(), nb[x].end());
      for (auto& t : nb[x]) sig[x].insert(sig[x].end(), t.begin(), t.end());
    }
    std::map<std::vector<std::int64_t>, int> ids;
    for (int x = 0; x < n; ++x) ids[sig[x]];
    int k = 0;
    for (auto& [s, v] : ids) v = k++;
    std::vector<int> nc(n);
    for (int x = 0; x < n; ++x) nc[x] = ids[sig[x]];
    bool same = std::set<int>(nc.begin(), nc.end()).size() == std::set<int>(col.begin(), col.end()).size();
    col = nc;
    if (same && round > 0) break;
  }
  return col;
}

}  // namespace

std::string canonical_form(const graph& g) {
  int n = g.num_vertices();
  auto col = refine(g);
  // cells in colour order; labels are assigned cell by cell
  std::map<int, std::vector<int>> cells;
  for (int x = 0; x < n; ++x) cells[col[x]].push_back(x);
  std::vector<std::vector<int>> cl;
  double combos = 1;
  for (auto& [c, v] : cells) {
    cl.push_back(v);
    for (std::size_t i = 2; i <= v.size(); ++i) combos *= static_cast<double>(i);
  }
  if (combos > 2e6) throw graph_error("canonical_form: graph too symmetric for exhaustive labeling");
  code best;
  bool have = false;
  std::vector<int> lab(n);
  // odometer over the permutations of every cell
  for (auto& v : cl) std::sort(v.begin(), v.end());
  for (;;) {
    int next = 0;
    for (auto& v : cl)
      for (int x : v) lab[x] = next++;
    auto c = encode(g, lab);
    if (!have || c < best) best = c, have = true;
    std::size_t i = 0;
    while (i < cl.size() && !std::next_permutation(cl[i].begin(), cl[i].end())) ++i;
    if (i == cl.size()) break;
  }
  std::ostringstream os;
  os << n << ':';
  for (auto v : best) os << v << ',';
  return os.str();
}

bool isomorphic(const graph& a, const graph& b) {
  if (a.num_vertices() != b.num_vertices() || a.edges.size() != b.edges.size()) return false;
  return canonical_form(a) == canonical_form(b);
}

std::string to_dot(const graph& g, const std::string& name, const std::vector<int>* vpair) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (int x = 0; x < g.num_vertices(); ++x) {
    os << "  v" << x << " [label=\"" << x << " (" << g.weight[x] << ")\"";
    if (vpair) os << ", frob=\"v" << (*vpair)[x] << "\"";
    os << "];\n";
  }
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
    auto& e = g.edges[y];
    if (e.inv < y) continue;
    if (g.is_half(y)) {
      os << "  h" << y << " [shape=point];\n  v" << e.o << " -- h" << y << " [label=\"" << e.len << "\", style=dashed];\n";
    } else {
      os << "  v" << e.o << " -- v" << e.t << " [label=\"" << e.len << "\"];\n";
    }
  }
  os << "}\n";
  return os.str();
}

std::string to_json(const graph& g, const std::vector<int>* vpair) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int x = 0; x < g.num_vertices(); ++x) {
    nlohmann::json v{{"id", x}, {"weight", g.weight[x]}};
    if (vpair) v["frobenius"] = (*vpair)[x];
    j["vertices"].push_back(v);
  }
  j["edges"] = nlohmann::json::array();
  for (int y = 0; y < static_cast<int>(g.edges.size()); ++y) {
    auto& e = g.edges[y];
    j["edges"].push_back({{"id", y}, {"o", e.o}, {"t", e.t}, {"inv", e.inv}, {"length", e.len}});
  }
  return j.dump();
}

}  // namespace shimura
