#include <doctest.h>

#include <json.hpp>
#include <set>

#include "shimura/quatlat.hpp"

using namespace shimura;

namespace {

bool odd_squarefree(i64 n) { return is_squarefree(n) && omega(n) % 2 == 1; }

mpq_class expected_mass(i64 Dhat, i64 N) {
  mpq_class m(euler_phi(Dhat) * dedekind_psi(N), 12);
  m.canonicalize();
  return m;
}

}  // namespace

TEST_CASE("build_algebra") {
  auto B2 = build_algebra(2);
  CHECK(B2.a == -1);
  CHECK(B2.b == -1);
  auto B3 = build_algebra(3);
  CHECK(B3.a == -1);
  CHECK(B3.b == -3);
  for (i64 D : {5, 7, 11, 13, 30, 42, 97, 105, 231, 997}) {
    auto B = build_algebra(D);
    CHECK(B.a < 0);
    CHECK(B.b < 0);
    std::vector<i64> want;
    for (auto& f : factor(D)) want.push_back(f.p);
    CHECK(ramified_primes(B.a, B.b) == want);
    CHECK(hilbert_symbol(B.a, B.b, 0) == -1);
  }
  CHECK_THROWS_AS(build_algebra(6), arith_error);
  CHECK_THROWS_AS(build_algebra(12), arith_error);
}

TEST_CASE("hilbert symbol is symmetric and bimultiplicative at odd p") {
  for (i64 p : {3, 5, 7})
    for (i64 a : {-1, -2, -3, -5, 2, 3, 5, 7, 15})
      for (i64 b : {-1, -2, -3, -7, 2, 5, 6, 7}) {
        CHECK(hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p));
        for (i64 c : {-1, 3, 5})
          CHECK(hilbert_symbol(a, b * c, p) == hilbert_symbol(a, b, p) * hilbert_symbol(a, c, p));
      }
  // product formula
  for (i64 a : {-1, -2, -3, -5, -6, -7, 10, 15})
    for (i64 b : {-1, -3, -7, -11, 2, 5}) {
      int prod = hilbert_symbol(a, b, 0) * hilbert_symbol(a, b, 2);
      for (i64 p : {3, 5, 7, 11, 13}) prod *= hilbert_symbol(a, b, p);
      CHECK(prod == 1);
    }
}

TEST_CASE("quaternion arithmetic") {
  auto B = build_algebra(3);
  quat x{mpq_class(1), mpq_class(2), mpq_class(-1), mpq_class(1, 2)};
  quat y{mpq_class(0), mpq_class(1), mpq_class(3), mpq_class(-2)};
  CHECK(nrd(B, qmul(B, x, y)) == nrd(B, x) * nrd(B, y));
  CHECK(qmul(B, x, qinv(B, x)) == qone());
  CHECK(qmul(B, x, qconj(x)) == qscale(qone(), nrd(B, x)));
  CHECK(trd(x) == 2);
  // associativity on the basis
  quat i{0, 1, 0, 0}, j{0, 0, 1, 0};
  CHECK(qmul(B, qmul(B, i, j), x) == qmul(B, i, qmul(B, j, x)));
  CHECK(qmul(B, i, j) == qscale(qmul(B, j, i), -1));
}

TEST_CASE("maximal orders have reduced discriminant Dhat") {
  for (i64 D = 2; D <= 1000; ++D) {
    if (!odd_squarefree(D)) continue;
    auto B = build_algebra(D);
    auto O = maximal_order(B);
    CHECK(is_order(B, O.order));
    CHECK(reduced_discriminant(B, O.order) == D);
  }
}

TEST_CASE("eichler orders") {
  auto E21 = eichler_order_for(2, 1);
  CHECK(E21.order == E21.maximal);
  auto E57 = eichler_order_for(5, 7);
  CHECK(is_order(E57.alg, E57.order));
  CHECK(reduced_discriminant(E57.alg, E57.order) == 35);
  auto E32 = eichler_order_for(3, 2);
  CHECK(reduced_discriminant(E32.alg, E32.order) == 6);
  auto E29 = eichler_order_for(2, 9);
  CHECK(reduced_discriminant(E29.alg, E29.order) == 18);
  CHECK_THROWS_AS(eichler_order_for(5, 10), arith_error);
}

TEST_CASE("ideal classes") {
  CHECK(ideal_classes(eichler_order_for(2, 1)).ideals.size() == 1);
  CHECK(ideal_classes(eichler_order_for(3, 2)).ideals.size() == 1);
  CHECK(ideal_classes(eichler_order_for(11, 1)).ideals.size() == 2);
  CHECK(ideal_classes(eichler_order_for(97, 1)).ideals.size() == 8);
  auto E = eichler_order_for(5, 7);
  auto C = ideal_classes(E);
  REQUIRE(C.ideals.size() == 4);
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      CHECK(ideal_isomorphic(E.alg, C.ideals[a], C.ideals[b], E.order) == (a == b));
  // deterministic
  auto C2 = ideal_classes(eichler_order_for(5, 7));
  CHECK(C2.ideals == C.ideals);
  CHECK(C2.right_orders == C.right_orders);
}

TEST_CASE("unit groups") {
  auto O2 = eichler_order_for(2, 1);
  CHECK(unit_half_order(O2.alg, O2.order) == 12);
  auto O3 = eichler_order_for(3, 1);
  CHECK(unit_half_order(O3.alg, O3.order) == 6);
  auto E = eichler_order_for(5, 7);
  auto C = ideal_classes(E);
  std::multiset<int> f;
  for (auto& R : C.right_orders) f.insert(unit_half_order(E.alg, R));
  CHECK(f == std::multiset<int>{1, 1, 3, 3});
  CHECK(class_mass(E.alg, C) == mpq_class(8, 3));
  for (auto& u : unit_group(E.alg, E.order)) CHECK(nrd(E.alg, u) == 1);
}

TEST_CASE("mass formula over sampled levels") {
  int n = 0;
  for (i64 Dhat : {2, 3, 5, 7, 11, 13, 30, 42})
    for (i64 N : {1, 2, 3, 4, 5, 7, 9, 11, 25}) {
      if (std::gcd(Dhat, N) != 1) continue;
      auto E = eichler_order_for(Dhat, N);
      auto C = ideal_classes(E);
      CHECK(class_mass(E.alg, C) == expected_mass(Dhat, N));
      ++n;
    }
  CHECK(n >= 20);
}

TEST_CASE("ideal isomorphism basics") {
  auto E = eichler_order_for(11, 1);
  auto C = ideal_classes(E);
  for (auto& I : C.ideals) {
    CHECK(ideal_isomorphic(E.alg, I, I, E.order));
    CHECK(ideal_isomorphic(E.alg, I, lattice_scale(I, 2), E.order));
    auto a = ideal_isomorphism(E.alg, I, lattice_scale(I, 3), E.order);
    REQUIRE(a);
    CHECK(lattice_right_mul(E.alg, I, *a) == lattice_scale(I, 3));
  }
}

TEST_CASE("p-neighbors") {
  auto E = eichler_order_for(5, 7);
  auto C = ideal_classes(E);
  for (i64 p : {2, 3, 11}) {
    for (auto& I : C.ideals) {
      auto nb = p_neighbors(E.alg, I, p);
      CHECK(nb.size() == static_cast<std::size_t>(p + 1));
      std::set<std::string> keys;
      for (auto& J : nb) {
        keys.insert(J.key());
        CHECK(J.volume() / I.volume() == p * p);
        CHECK(left_order(E.alg, J) == E.order);
        // p I is a neighbour of J
        auto back = p_neighbors(E.alg, J, p);
        bool hit = false;
        for (auto& K : back) hit |= K == lattice_scale(I, p);
        CHECK(hit);
      }
      CHECK(keys.size() == nb.size());
    }
  }
  CHECK_THROWS_AS(p_neighbors(E.alg, C.ideals[0], 5), arith_error);
  // h = 1: every neighbour is principal
  auto E2 = eichler_order_for(2, 1);
  for (auto& J : p_neighbors(E2.alg, E2.order, 3)) CHECK(ideal_isomorphic(E2.alg, E2.order, J, E2.order));
}

TEST_CASE("Atkin-Lehner action on classes") {
  auto E = eichler_order_for(5, 7);
  auto C = ideal_classes(E);
  auto id = al_class_action(E, C, 1);
  CHECK(id.perm == std::vector<int>{0, 1, 2, 3});
  std::map<i64, std::vector<int>> perm;
  for (i64 m : {5, 7, 35}) {
    auto a = al_class_action(E, C, m);
    for (int c = 0; c < 4; ++c) CHECK(a.perm[a.perm[c]] == c);
    perm[m] = a.perm;
    auto b = al_ideal(E, m);
    CHECK(lattice_product(E.alg, b, b) == lattice_scale(E.order, m));
    CHECK(left_order(E.alg, b) == E.order);
    CHECK(right_order(E.alg, b) == E.order);
  }
  // w5 w7 = w35 on classes
  for (int c = 0; c < 4; ++c) CHECK(perm[5][perm[7][c]] == perm[35][c]);
  CHECK(perm[7] != std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("lattice json dump") {
  auto E = eichler_order_for(3, 2);
  auto j = nlohmann::json::parse(lattice_json(E.alg, E.order));
  CHECK(j["basis"].size() == 4);
  CHECK(j["norm_form"].size() == 4);
}
