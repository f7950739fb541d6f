#include <doctest.h>

#include <algorithm>
#include <random>

#include "golden_graphs.hpp"
#include "shimura/cdunif.hpp"
#include "shimura/quotients.hpp"

using namespace shimura;

namespace {

al_subgroup W_of(i64 DN, std::vector<i64> g) { return al_subgroup::generated(DN, g); }

std::string shape(const graph& g) { return canonical_form(golden::strip_weights(g)); }

graph strip_minimized(const cd_context& ctx, std::vector<i64> gens) {
  return golden::strip_weights(minimize(cd_quotient(ctx, al_subgroup::generated(ctx.D * ctx.N, gens))));
}

void check_context(const cd_context& ctx) {
  auto& G = ctx.G;
  CHECK(G.num_vertices() == 2 * ctx.h());
  CHECK(G.num_half_edges() == 0);
  for (auto& e : G.edges) {
    CHECK((e.o < ctx.h()) != (e.t < ctx.h()));
    CHECK(e.len <= 3);
  }
  for (int x = 0; x < G.num_vertices(); ++x) {
    i64 s = 0;
    for (auto& e : G.edges)
      if (e.o == x) s += G.weight[x] / e.len;
    CHECK(s == ctx.p + 1);
    CHECK((G.weight[x] == 1 || G.weight[x] == 2 || G.weight[x] == 3 || G.weight[x] == 6 || G.weight[x] == 12));
  }
  auto wp = ctx.al.at(ctx.p);
  for (int x = 0; x < G.num_vertices(); ++x) CHECK((x < ctx.h()) != (wp.v[x] < ctx.h()));
}

quat_lattice conj_by(const quat_algebra& B, const quat& u, const quat_lattice& L) {
  return lattice_right_mul(B, lattice_left_mul(B, qinv(B, u), L), u);
}

}  // namespace

TEST_CASE("base graph (15,7,3)") {
  auto ctx = base_graph(15, 7, 3);
  check_context(ctx);
  CHECK(ctx.h() == 4);
  CHECK(canonical_form(ctx.G) == canonical_form(golden::g15_7_3()));
  CHECK(shape(cd_quotient(ctx, W_of(105, {3}))) == shape(golden::g15_7_3_w3()));
  CHECK(shape(cd_quotient(ctx, W_of(105, {3, 5}))) == shape(golden::g15_7_3_w3w5()));
  CHECK(canonical_form(cd_quotient(ctx, W_of(105, {}))) == canonical_form(ctx.G));
}

TEST_CASE("base graph (15,7,5)") {
  auto ctx = base_graph(15, 7, 5);
  check_context(ctx);
  CHECK(canonical_form(ctx.G) == canonical_form(golden::g15_7_5()));
  CHECK(shape(cd_quotient(ctx, W_of(105, {3}))) == shape(golden::g15_7_5_w3()));
  CHECK(shape(cd_quotient(ctx, W_of(105, {3, 5}))) == shape(golden::g15_7_5_w3w5()));
}

TEST_CASE("base graph (51,2,17)") {
  auto ctx = base_graph(51, 2, 17);
  check_context(ctx);
  CHECK(canonical_form(ctx.G) == canonical_form(golden::g51_2_17()));
  CHECK(shape(cd_quotient(ctx, W_of(102, {51}))) == shape(golden::g51_2_17_w51()));
  CHECK(shape(cd_quotient(ctx, W_of(102, {3, 17}))) == shape(golden::g51_2_17_one_loop()));
  CHECK(shape(cd_quotient(ctx, W_of(102, {2, 51}))) == shape(golden::g51_2_17_w2w51()));
  CHECK(canonical_form(strip_minimized(ctx, {2, 51})) == canonical_form(strip_minimized(ctx, {3, 17})));
  auto red = reduction_edges(ctx, W_of(102, {51}));
  CHECK(red.num_vertices() == 1);
  CHECK(red.num_unoriented() == 2);
  CHECK(shape(red) == shape(minimize(cd_quotient(ctx, W_of(102, {51})))));
}

TEST_CASE("base graph preconditions") {
  CHECK_THROWS(base_graph(15, 7, 7));
  CHECK_THROWS(base_graph(6, 25, 2));
}

TEST_CASE("Atkin-Lehner actions are involutions that commute") {
  auto ctx = base_graph(15, 7, 3);
  std::vector<graph_perm> ws;
  for (i64 m : hall_divisors(105)) {
    auto w = al_perm(ctx, m);
    check_action(ctx.G, w);
    CHECK(compose(w, w) == identity_perm(ctx.G));
    ws.push_back(w);
  }
  for (auto& a : ws)
    for (auto& b : ws) CHECK(compose(a, b) == compose(b, a));
  CHECK(compose(al_perm(ctx, 3), al_perm(ctx, 5)) == al_perm(ctx, 15));
}

TEST_CASE("Kodaira symbols") {
  CHECK(kodaira_In(15, 7, W_of(105, {3}), 3) == 2);
  CHECK(kodaira_In(15, 7, W_of(105, {3, 5}), 3) == 4);
  CHECK(kodaira_In(15, 7, W_of(105, {3}), 5) == 2);
  CHECK(kodaira_In(15, 7, W_of(105, {3, 5}), 5) == 1);
  CHECK_THROWS(kodaira_In(51, 2, W_of(102, {51}), 17));  // genus 2
  auto ctx = base_graph(15, 7, 3);
  auto m = minimize(cd_quotient(ctx, W_of(105, {3})));
  CHECK(isomorphic(golden::strip_weights(resolve(m)), golden::two_vertices_double_edge()));
  auto m2 = minimize(cd_quotient(ctx, W_of(105, {3, 5})));
  CHECK(isomorphic(golden::strip_weights(resolve(m2)), golden::square()));
  CHECK(betti(resolve(m2)) == 1);
  auto c5 = base_graph(15, 7, 5);
  CHECK(isomorphic(golden::strip_weights(resolve(minimize(cd_quotient(c5, W_of(105, {3, 5}))))), golden::one_loop()));
}

TEST_CASE("local points") {
  CHECK_FALSE(has_Qp_point(21, 5, W_of(105, {3, 5}), 7));
  CHECK(has_Qp_point(21, 5, W_of(105, {3, 5}), 3));
  CHECK_FALSE(has_Qp_point(15, 7, W_of(105, {3}), 5));
  // a quotient by a group containing w_p has points over Q_p: Frobenius is trivial
  CHECK(has_Qp_point(15, 7, W_of(105, {3, 5}), 3));
}

TEST_CASE("Frobenius on the resolved graph is an involutive automorphism") {
  auto ctx = base_graph(21, 5, 7);
  auto fg = resolved_with_frobenius(ctx, W_of(105, {3, 5}));
  check_action(fg.g, fg.frob);
  CHECK(compose(fg.frob, fg.frob) == identity_perm(fg.g));
}

TEST_CASE("genus cross-check for small levels") {
  int n = 0;
  for (i64 D = 6; D <= 80; ++D)
    for (i64 N = 1; D * N <= 80; ++N) {
      if (!valid_level(D, N) || !is_squarefree(N)) continue;
      for (auto& f : factor(D)) {
        auto ctx = base_graph(D, N, f.p);
        check_context(ctx);
        for (auto& W : all_subgroups(D, N)) {
          CHECK(cd_genus(ctx, W) == quotient_genus(D, N, W));
          ++n;
        }
      }
    }
  CHECK(n > 50);
}

TEST_CASE("outputs do not depend on the choice of order or class representatives") {
  struct lvl {
    i64 D, N, p;
  };
  for (auto [D, N, p] : {lvl{15, 7, 3}, lvl{21, 5, 7}, lvl{51, 2, 17}, lvl{6, 17, 2}}) {
    auto E = eichler_order_for(D / p, N);
    auto C = ideal_classes(E);
    auto ctx = base_graph(D, N, p, E, C);

    // conjugate everything by a non-normalizing element
    quat u{mpq_class(1), mpq_class(1), mpq_class(1), mpq_class(0)};
    auto& B = E.alg;
    eichler_order Ec{B, E.level, conj_by(B, u, E.order), conj_by(B, u, E.maximal), {}};
    for (auto& [q, I] : E.connecting) Ec.connecting.push_back({q, conj_by(B, u, I)});
    CHECK(reduced_discriminant(B, Ec.order) == reduced_discriminant(B, E.order));
    auto Cc = ideal_classes(Ec);
    CHECK(Cc.ideals.size() == C.ideals.size());
    auto cctx = base_graph(D, N, p, Ec, Cc);

    // shuffled representatives, each replaced by a scaled copy
    ideal_class_set Cs = C;
    std::vector<int> pi(C.ideals.size());
    std::iota(pi.begin(), pi.end(), 0);
    std::mt19937 rng(static_cast<unsigned>(D * N));
    std::shuffle(pi.begin(), pi.end(), rng);
    for (std::size_t k = 0; k < pi.size(); ++k) {
      Cs.ideals[k] = lattice_scale(C.ideals[pi[k]], static_cast<long>(k + 2));
      Cs.right_orders[k] = C.right_orders[pi[k]];
    }
    auto sctx = base_graph(D, N, p, E, Cs);

    CHECK(canonical_form(cctx.G) == canonical_form(ctx.G));
    CHECK(canonical_form(sctx.G) == canonical_form(ctx.G));
    for (auto& W : all_subgroups(D, N)) {
      auto want = canonical_form(cd_quotient(ctx, W));
      CHECK(canonical_form(cd_quotient(cctx, W)) == want);
      CHECK(canonical_form(cd_quotient(sctx, W)) == want);
      CHECK(has_Qp_point(cctx, W) == has_Qp_point(ctx, W));
      if (quotient_genus(D, N, W) == 1) {
        CHECK(kodaira_In(cctx, W) == kodaira_In(ctx, W));
        CHECK(kodaira_In(sctx, W) == kodaira_In(ctx, W));
      }
    }
  }
}
