#pragma once

#include <map>
#include <string>
#include <vector>

#include "shimura/graphs.hpp"
#include "shimura/quatlat.hpp"
#include "shimura/quotients.hpp"

namespace shimura {

// dual graph data at p | D for X_0^D(N), N squarefree
struct cd_context {
  i64 D, N, p, Dhat;
  eichler_order order;
  ideal_class_set classes;
  graph G;  // vertex c is (c,+), vertex h+c is (c,-)
  std::map<i64, graph_perm> al;  // w_q for each prime q | DN
  int h() const { return static_cast<int>(classes.ideals.size()); }
};

cd_context base_graph(i64 D, i64 N, i64 p);
// same, with caller-chosen order and class representatives
cd_context base_graph(i64 D, i64 N, i64 p, const eichler_order& E, const ideal_class_set& C);

graph_perm al_perm(const cd_context& ctx, i64 m);
quotient_map cd_quotient_map(const cd_context& ctx, const al_subgroup& W);
graph cd_quotient(const cd_context& ctx, const al_subgroup& W);

// minimized G_W with lengths
graph reduction_edges(const cd_context& ctx, const al_subgroup& W);
graph reduction_edges(i64 D, i64 N, const al_subgroup& W, i64 p);

i64 kodaira_In(const cd_context& ctx, const al_subgroup& W);
i64 kodaira_In(i64 D, i64 N, const al_subgroup& W, i64 p);

// resolved minimized G_W with the Frobenius involution (identity when w_p in W)
struct frobenius_graph {
  graph g;
  graph_perm frob;
};
frobenius_graph resolved_with_frobenius(const cd_context& ctx, const al_subgroup& W);

bool has_Qp_point(const cd_context& ctx, const al_subgroup& W);
bool has_Qp_point(i64 D, i64 N, const al_subgroup& W, i64 p);

// Betti number of resolve(star(G_W)); equals the quotient genus
i64 cd_genus(const cd_context& ctx, const al_subgroup& W);

}  // namespace shimura
