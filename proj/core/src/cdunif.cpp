#include "shimura/cdunif.hpp"

#include <algorithm>
#include <set>

namespace shimura {

namespace {

void check_cd_input(i64 D, i64 N, i64 p) {
  check_level(D, N);
  if (!is_squarefree(N)) throw arith_error("cd: N must be squarefree");
  if (p < 2 || D % p != 0 || !is_prime(p)) throw arith_error("cd: p must be a prime dividing D");
}

struct neighbor_data {
  std::vector<quat_lattice> nb;
  std::map<std::string, int> index;
  std::vector<int> orbit;       // orbit id of each neighbor
  std::vector<int> rep;         // a neighbor in each orbit
  std::vector<i64> len;         // stabilizer order per orbit
  int find(const quat_lattice& L) const {
    auto it = index.find(L.key());
    if (it == index.end()) throw arith_error("cd: lattice is not a p-neighbor");
    return it->second;
  }
};

}  // namespace

cd_context base_graph(i64 D, i64 N, i64 p) {
  check_cd_input(D, N, p);
  auto E = eichler_order_for(D / p, N);
  auto C = ideal_classes(E);
  return base_graph(D, N, p, E, C);
}

cd_context base_graph(i64 D, i64 N, i64 p, const eichler_order& E, const ideal_class_set& C) {
  check_cd_input(D, N, p);
  if (E.alg.disc != D / p || E.level != N) throw arith_error("cd: order does not match (D/p, N)");
  const auto& B = E.alg;
  cd_context ctx{D, N, p, D / p, E, C, {}, {}};
  int h = ctx.h();
  std::vector<neighbor_data> nd(h);
  std::vector<i64> f(h);
  for (int c = 0; c < h; ++c) {
    auto& d = nd[c];
    d.nb = p_neighbors(B, C.ideals[c], p);
    for (int k = 0; k <= p; ++k) d.index[d.nb[k].key()] = k;
    if (static_cast<int>(d.index.size()) != p + 1) throw arith_error("cd: neighbors not distinct");
    auto units = unit_group(B, C.right_orders[c]);
    f[c] = static_cast<i64>(units.size()) / 2;
    d.orbit.assign(p + 1, -1);
    for (int k = 0; k <= p; ++k) {
      if (d.orbit[k] >= 0) continue;
      int id = static_cast<int>(d.rep.size());
      std::set<int> orb;
      for (auto& u : units) orb.insert(d.find(lattice_right_mul(B, d.nb[k], u)));
      for (int z : orb) d.orbit[z] = id;
      d.rep.push_back(k);
      i64 stab = f[c] / static_cast<i64>(orb.size());
      if (stab * static_cast<i64>(orb.size()) != f[c] || stab > 3) throw arith_error("cd: bad edge stabilizer");
      d.len.push_back(stab);
    }
  }
  // targets and inverses in G_p
  struct gp_edge { int c, o, tc, to; };
  std::vector<std::vector<gp_edge>> ge(h);
  for (int c = 0; c < h; ++c) {
    for (std::size_t o = 0; o < nd[c].rep.size(); ++o) {
      const auto& J = nd[c].nb[nd[c].rep[o]];
      int tc = -1;
      quat beta;
      for (int c2 = 0; c2 < h && tc < 0; ++c2) {
        auto a = ideal_isomorphism(B, C.ideals[c2], J, E.order);
        if (a) { tc = c2; beta = *a; }
      }
      if (tc < 0) throw arith_error("cd: neighbor class not found");
      auto L = lattice_scale(lattice_right_mul(B, C.ideals[c], qinv(B, beta)), p);
      int to = nd[tc].orbit[nd[tc].find(L)];
      ge[c].push_back({c, static_cast<int>(o), tc, to});
    }
  }
  // oriented edge ids in G
  std::vector<std::vector<int>> eid(h);
  int ne = 0;
  for (int c = 0; c < h; ++c)
    for (std::size_t o = 0; o < ge[c].size(); ++o) eid[c].push_back(ne++);
  auto& G = ctx.G;
  for (int s = 0; s < 2; ++s)
    for (int c = 0; c < h; ++c) G.add_vertex(f[c]);
  G.edges.resize(2 * ne);
  for (int s = 0; s < 2; ++s)
    for (int c = 0; c < h; ++c)
      for (auto& e : ge[c]) {
        int y = s * ne + eid[c][e.o];
        int yi = (1 - s) * ne + eid[e.tc][e.to];
        G.edges[y] = {s * h + c, (1 - s) * h + e.tc, yi, nd[c].len[e.o]};
      }
  G.validate();
  for (int x = 0; x < 2 * h; ++x) {
    i64 sum = 0;
    for (auto& e : G.edges)
      if (e.o == x) {
        if (G.weight[x] % e.len) throw arith_error("cd: length does not divide weight");
        sum += G.weight[x] / e.len;
      }
    if (sum != p + 1) throw arith_error("cd: vertex sum rule fails");
  }
  for (auto& e : G.edges)
    if ((e.o < h) == (e.t < h)) throw arith_error("cd: graph is not bipartite");

  // Atkin-Lehner involutions
  graph_perm wp;
  for (int s = 0; s < 2; ++s)
    for (int c = 0; c < h; ++c) wp.v.push_back((1 - s) * h + c);
  wp.e.resize(2 * ne);
  for (int y = 0; y < 2 * ne; ++y) wp.e[y] = (y + ne) % (2 * ne);
  check_action(G, wp);
  ctx.al[p] = wp;
  for (auto& q : factor(ctx.Dhat * N)) {
    auto A = al_class_action(E, C, q.p);
    auto b = al_ideal(E, q.p);
    graph_perm w;
    w.v.resize(2 * h);
    w.e.resize(2 * ne);
    for (int s = 0; s < 2; ++s)
      for (int c = 0; c < h; ++c) w.v[s * h + c] = s * h + A.perm[c];
    for (int c = 0; c < h; ++c) {
      int c2 = A.perm[c];
      quat einv = qinv(B, A.elt[c]);
      for (std::size_t o = 0; o < ge[c].size(); ++o) {
        const auto& J = nd[c].nb[nd[c].rep[o]];
        auto K = lattice_right_mul(B, lattice_product(B, b, J), einv);
        int o2 = nd[c2].orbit[nd[c2].find(K)];
        for (int s = 0; s < 2; ++s) w.e[s * ne + eid[c][o]] = s * ne + eid[c2][o2];
      }
    }
    check_action(G, w);
    if (!(compose(w, w) == identity_perm(G))) throw arith_error("cd: Atkin-Lehner action is not an involution");
    ctx.al[q.p] = w;
  }
  return ctx;
}

graph_perm al_perm(const cd_context& ctx, i64 m) {
  i64 DN = ctx.D * ctx.N;
  if (m < 1 || DN % m != 0 || std::gcd(m, DN / m) != 1) throw arith_error("al_perm: m must be a Hall divisor of DN");
  graph_perm r = identity_perm(ctx.G);
  for (auto& q : factor(m)) r = compose(ctx.al.at(q.p), r);
  return r;
}

quotient_map cd_quotient_map(const cd_context& ctx, const al_subgroup& W) {
  std::vector<graph_perm> gens;
  for (i64 m : W.elements)
    if (m != 1) gens.push_back(al_perm(ctx, m));
  if (gens.empty()) gens.push_back(identity_perm(ctx.G));
  return quotient_with_map(ctx.G, gens);
}

graph cd_quotient(const cd_context& ctx, const al_subgroup& W) { return cd_quotient_map(ctx, W).g; }

graph reduction_edges(const cd_context& ctx, const al_subgroup& W) { return minimize(cd_quotient(ctx, W)); }

graph reduction_edges(i64 D, i64 N, const al_subgroup& W, i64 p) { return reduction_edges(base_graph(D, N, p), W); }

i64 kodaira_In(const cd_context& ctx, const al_subgroup& W) {
  if (quotient_genus(ctx.D, ctx.N, W) != 1) throw arith_error("kodaira_In: quotient genus is not 1");
  graph m = reduction_edges(ctx, W);
  i64 n = m.total_length();
  if (n < 1 || betti(m) != 1) throw arith_error("kodaira_In: minimized graph is not a cycle");
  return n;
}

i64 kodaira_In(i64 D, i64 N, const al_subgroup& W, i64 p) { return kodaira_In(base_graph(D, N, p), W); }

frobenius_graph resolved_with_frobenius(const cd_context& ctx, const al_subgroup& W) {
  auto q = cd_quotient_map(ctx, W);
  graph_perm fr = induced_perm(ctx.G, q, ctx.al.at(ctx.p));
  auto mm = minimize_map(q.g);
  fr = restrict_perm(q.g, mm, fr);
  auto rm = resolve_map(mm.g);
  fr = resolve_perm(mm.g, rm, fr);
  return {rm.g, fr};
}

// a component x over F_p keeps a smooth F_p-point unless all p+1 rational points are nodes;
// the nodes on x rational over F_p are the edges at x fixed by Frobenius
bool has_Qp_point(const cd_context& ctx, const al_subgroup& W) {
  auto fg = resolved_with_frobenius(ctx, W);
  const auto& g = fg.g;
  for (int x = 0; x < g.num_vertices(); ++x) {
    if (fg.frob.v[x] != x) continue;
    i64 fixed = 0;
    for (int y = 0; y < static_cast<int>(g.edges.size()); ++y)
      if (g.edges[y].o == x && fg.frob.e[y] == y) ++fixed;
    if (fixed < ctx.p + 1) return true;
  }
  return false;
}

bool has_Qp_point(i64 D, i64 N, const al_subgroup& W, i64 p) { return has_Qp_point(base_graph(D, N, p), W); }

i64 cd_genus(const cd_context& ctx, const al_subgroup& W) { return betti(resolve(star(cd_quotient(ctx, W)))); }

}  // namespace shimura
