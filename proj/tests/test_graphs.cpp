#include <doctest.h>

#include <json.hpp>
#include <random>

#include "shimura/graphs.hpp"

using namespace shimura;

namespace {

graph cycle(int n) {
  graph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

// connected, random loops / multi-edges / half-edges, lengths 1..3
graph random_graph(std::mt19937& rng) {
  graph g;
  int n = 1 + static_cast<int>(rng() % 7);
  for (int i = 0; i < n; ++i) g.add_vertex(1 + rng() % 3);
  for (int i = 1; i < n; ++i) g.add_edge(static_cast<int>(rng() % i), i, 1 + rng() % 3);
  int extra = static_cast<int>(rng() % 6);
  for (int k = 0; k < extra; ++k) g.add_edge(rng() % n, rng() % n, 1 + rng() % 3);
  int halves = static_cast<int>(rng() % 3);
  for (int k = 0; k < halves; ++k) g.add_half_edge(rng() % n, 1 + rng() % 3);
  return g;
}

}  // namespace

TEST_CASE("graph invariants are validated") {
  graph g;
  g.add_vertex();
  g.add_vertex();
  int y = g.add_edge(0, 1, 2);
  CHECK(g.edges[y].inv == y + 1);
  CHECK(g.edges[y + 1].o == 1);
  CHECK(g.edges[y + 1].len == 2);
  g.validate();
  g.edges[y].len = 3;
  CHECK_THROWS_AS(g.validate(), graph_error);
}

TEST_CASE("quotient") {
  // trivial group
  auto c = cycle(4);
  CHECK(isomorphic(quotient(c, {}), c));
  // an edge swapped with its inverse gives a half-edge at the merged vertex; the oriented
  // stabilizer is trivial so the length stays 1
  graph e;
  e.add_vertex();
  e.add_vertex();
  e.add_edge(0, 1, 1);
  graph_perm flip{{1, 0}, {1, 0}};
  check_action(e, flip);
  auto q = quotient(e, {flip});
  CHECK(q.num_vertices() == 1);
  CHECK(q.num_half_edges() == 1);
  CHECK(q.edges[0].len == 1);
  // rotation of a 4-cycle by two steps: 2-cycle with lengths 1
  graph_perm rot{{2, 3, 0, 1}, {4, 5, 6, 7, 0, 1, 2, 3}};
  check_action(c, rot);
  auto q2 = quotient(c, {rot});
  CHECK(isomorphic(q2, cycle(2)));
}

TEST_CASE("quotient by a chain of subgroups") {
  // 4-cycle with the reflection s: 0<->2 fixing 1, 3 and the rotation r by two
  auto c = cycle(4);
  // edges: 0:(0,1) 1:(1,0) 2:(1,2) 3:(2,1) 4:(2,3) 5:(3,2) 6:(3,0) 7:(0,3)
  graph_perm s{{2, 1, 0, 3}, {3, 2, 1, 0, 7, 6, 5, 4}};
  graph_perm r{{2, 3, 0, 1}, {4, 5, 6, 7, 0, 1, 2, 3}};
  check_action(c, s);
  check_action(c, r);
  auto full = quotient(c, {s, r});
  auto qm = quotient_with_map(c, {s});
  auto r2 = induced_perm(c, qm, r);
  auto twostep = quotient(qm.g, {r2});
  CHECK(canonical_form(full) == canonical_form(twostep));
}

TEST_CASE("star") {
  auto c = cycle(3);
  CHECK(canonical_form(star(c)) == canonical_form(c));
  graph h;
  h.add_vertex();
  h.add_half_edge(0);
  auto s = star(h);
  CHECK(s.num_vertices() == 1);
  CHECK(s.edges.empty());
  // vertex v with a half-edge next to w with a loop
  graph f;
  f.add_vertex();
  f.add_vertex();
  f.add_half_edge(0);
  f.add_edge(1, 1);
  f.add_edge(0, 1);
  auto fs = star(f);
  CHECK(fs.num_half_edges() == 0);
  CHECK(fs.num_unoriented() == 2);
}

TEST_CASE("minimize") {
  // pendant edge, a double edge, two half-edges
  graph x;
  for (int i = 0; i < 3; ++i) x.add_vertex();
  x.add_edge(0, 1);
  x.add_edge(1, 2);
  x.add_edge(1, 2);
  x.add_half_edge(2);
  x.add_half_edge(2);
  graph want;
  want.add_vertex();
  want.add_vertex();
  want.add_edge(0, 1);
  want.add_edge(0, 1);
  CHECK(isomorphic(minimize(x), want));
  CHECK(isomorphic(minimize(cycle(5)), cycle(5)));
  graph tree;
  for (int i = 0; i < 6; ++i) tree.add_vertex();
  for (int i = 1; i < 6; ++i) tree.add_edge((i - 1) / 2, i);
  CHECK(minimize(tree).edges.empty());
  // a path with an even number of vertices keeps its middle edge, so the reversal still acts
  graph path;
  for (int i = 0; i < 4; ++i) path.add_vertex();
  for (int i = 1; i < 4; ++i) path.add_edge(i - 1, i);
  auto mm = minimize_map(path);
  CHECK(mm.g.num_vertices() == 2);
  CHECK(mm.g.num_unoriented() == 1);
  graph_perm rev{{3, 2, 1, 0}, {5, 4, 3, 2, 1, 0}};
  check_action(path, rev);
  auto r = restrict_perm(path, mm, rev);
  CHECK(r.v == std::vector<int>{1, 0});
}

TEST_CASE("resolve") {
  auto c = cycle(3);
  CHECK(isomorphic(resolve(c), c));
  graph e;
  e.add_vertex();
  e.add_vertex();
  e.add_edge(0, 1, 3);
  auto r = resolve(e);
  CHECK(r.num_vertices() == 4);
  CHECK(r.num_unoriented() == 3);
  CHECK(betti(r) == 0);
  graph loop;
  loop.add_vertex();
  loop.add_edge(0, 0, 2);
  CHECK(isomorphic(resolve(loop), cycle(2)));
  graph h;
  h.add_vertex();
  h.add_half_edge(0);
  CHECK_THROWS_AS(resolve(h), graph_error);
}

TEST_CASE("dual graph") {
  graph e;
  e.add_vertex();
  e.add_vertex();
  e.add_edge(0, 1);
  auto d = dual_graph(e);
  CHECK(d.num_vertices() == 1);
  CHECK(d.edges.empty());
  graph p;
  for (int i = 0; i < 3; ++i) p.add_vertex();
  p.add_edge(0, 1);
  p.add_edge(1, 2);
  auto dp = dual_graph(p);
  CHECK(dp.num_vertices() == 2);
  CHECK(dp.num_unoriented() == 1);
  CHECK(isomorphic(dual_graph(cycle(3)), cycle(3)));
}

TEST_CASE("betti") {
  graph tree;
  for (int i = 0; i < 4; ++i) tree.add_vertex();
  for (int i = 1; i < 4; ++i) tree.add_edge(0, i);
  CHECK(betti(tree) == 0);
  for (int n = 1; n < 7; ++n) CHECK(betti(cycle(n)) == 1);
  graph two;
  two.add_vertex();
  two.add_vertex();
  CHECK_THROWS_AS(betti(two), graph_error);
}

TEST_CASE("random graphs: minimize idempotent, resolve keeps betti, star never raises betti") {
  std::mt19937 rng(20240);
  for (int t = 0; t < 1000; ++t) {
    auto g = random_graph(rng);
    auto m = minimize(g);
    CHECK(isomorphic(minimize(m), m));
    auto s = star(g);
    CHECK(betti(resolve(s)) == betti(s));
    CHECK(betti(s) <= betti(g));
    CHECK(betti(m) == betti(s));
    // resolution bookkeeping
    auto r = resolve(s);
    CHECK(r.num_unoriented() == s.total_length());
    CHECK(r.num_vertices() == s.num_vertices() + s.total_length() - s.num_unoriented());
  }
}

TEST_CASE("canonical form ignores labels") {
  std::mt19937 rng(99);
  for (int t = 0; t < 200; ++t) {
    auto g = random_graph(rng);
    // relabel vertices by a random permutation
    int n = g.num_vertices();
    std::vector<int> pi(n);
    std::iota(pi.begin(), pi.end(), 0);
    std::shuffle(pi.begin(), pi.end(), rng);
    graph h;
    std::vector<std::int64_t> w(n);
    for (int x = 0; x < n; ++x) w[pi[x]] = g.weight[x];
    for (int x = 0; x < n; ++x) h.add_vertex(w[x]);
    for (int y = static_cast<int>(g.edges.size()) - 1; y >= 0; --y) {
      auto& e = g.edges[y];
      if (e.inv == y)
        h.add_half_edge(pi[e.o], e.len);
      else if (e.inv < y)
        h.add_edge(pi[e.t], pi[e.o], e.len);
    }
    CHECK(canonical_form(g) == canonical_form(h));
  }
  graph a = cycle(3), b = cycle(3);
  b.edges[0].len = b.edges[1].len = 2;
  CHECK_FALSE(isomorphic(a, b));
}

TEST_CASE("export") {
  auto c = cycle(3);
  auto j = nlohmann::json::parse(to_json(c));
  CHECK(j["vertices"].size() == 3);
  CHECK(j["edges"].size() == 6);
  auto dot = to_dot(c);
  CHECK(dot.find("graph") != std::string::npos);
}
