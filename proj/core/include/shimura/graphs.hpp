#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace shimura {

struct graph_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// oriented edges paired by inv; a half-edge is its own inverse
struct graph {
  struct edge {
    int o, t, inv;
    std::int64_t len = 1;
  };
  std::vector<std::int64_t> weight;  // f(x), 1 when unused
  std::vector<edge> edges;

  int num_vertices() const { return static_cast<int>(weight.size()); }
  int add_vertex(std::int64_t w = 1);
  // returns the index of the first oriented edge; the inverse follows it
  int add_edge(int a, int b, std::int64_t len = 1);
  int add_half_edge(int a, std::int64_t len = 1);

  bool is_half(int y) const { return edges[y].inv == y; }
  int num_unoriented() const;
  int num_half_edges() const;
  std::int64_t total_length() const;  // sum over unoriented edges, half-edges included
  std::vector<int> degree() const;    // oriented edges leaving each vertex
  bool connected() const;
  void validate() const;
};

// one group element acting on vertices and oriented edges
struct graph_perm {
  std::vector<int> v, e;
  bool operator==(const graph_perm&) const = default;
  auto operator<=>(const graph_perm&) const = default;
};

graph_perm compose(const graph_perm& a, const graph_perm& b);  // a after b
graph_perm identity_perm(const graph& g);
void check_action(const graph& g, const graph_perm& h);
std::vector<graph_perm> group_closure(const graph& g, const std::vector<graph_perm>& gens);

struct quotient_map {
  graph g;
  std::vector<int> vclass, eclass;  // orbit index of each vertex / oriented edge
};

// lengths and vertex weights multiply by stabilizer orders
quotient_map quotient_with_map(const graph& g, const std::vector<graph_perm>& gens);
graph quotient(const graph& g, const std::vector<graph_perm>& gens);

// the maps below return the index of each surviving oriented edge in the input (-1 for new ones)
struct graph_map {
  graph g;
  std::vector<int> vorig, eorig;
};

graph_map star_map(const graph& g);
graph star(const graph& g);
graph_map minimize_map(const graph& g);
graph minimize(const graph& g);
// new chain vertices get weight 1; edge k of the chain for y has eorig y
graph_map resolve_map(const graph& g);
graph resolve(const graph& g);
graph dual_graph(const graph& g);
std::int64_t betti(const graph& g);

// carry an automorphism of the source graph along a map; throws if it does not descend
graph_perm induced_perm(const graph& src, const quotient_map& q, const graph_perm& h);
graph_perm restrict_perm(const graph& src, const graph_map& m, const graph_perm& h);  // star / minimize maps
graph_perm resolve_perm(const graph& src, const graph_map& m, const graph_perm& h);

// lexicographically least relabeling; equal forms iff isomorphic (lengths and weights included)
std::string canonical_form(const graph& g);
bool isomorphic(const graph& a, const graph& b);

std::string to_dot(const graph& g, const std::string& name = "G", const std::vector<int>* vpair = nullptr);
std::string to_json(const graph& g, const std::vector<int>* vpair = nullptr);

}  // namespace shimura
