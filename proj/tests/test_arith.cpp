#include <doctest.h>

#include <numeric>
#include <random>
#include <set>

#include "shimura/arith.hpp"

using namespace shimura;

namespace {

// primitive reduced forms (a, b, c), |b| <= a <= c, b >= 0 when |b| = a or a = c
i64 brute_class_number(i64 d) {
  i64 h = 0;
  for (i64 a = 1; 3 * a * a <= -d; ++a)
    for (i64 b = -a + 1; b <= a; ++b) {
      i64 num = b * b - d;
      if (num % (4 * a)) continue;
      i64 c = num / (4 * a);
      if (c < a) continue;
      if (a == c && b < 0) continue;
      if (std::gcd(std::gcd(a, std::abs(b)), c) != 1) continue;
      ++h;
    }
  return h;
}

int legendre_by_squares(i64 a, i64 p) {
  i64 r = ((a % p) + p) % p;
  if (r == 0) return 0;
  for (i64 x = 1; x < p; ++x)
    if (x * x % p == r) return 1;
  return -1;
}

}  // namespace

TEST_CASE("kronecker") {
  CHECK(kronecker(-3, 3) == 0);
  CHECK(kronecker(-4, 3) == -1);
  CHECK(kronecker(-4, 5) == 1);
  // odd primes: agrees with the square table
  for (i64 p : {3, 5, 7, 11, 13, 101})
    for (i64 a = -60; a <= 60; ++a) CHECK(kronecker(a, p) == legendre_by_squares(a, p));
}

TEST_CASE("kronecker is multiplicative in both arguments") {
  for (i64 a = -40; a <= 40; ++a)
    for (i64 m = 1; m <= 30; ++m)
      for (i64 n = 1; n <= 30; ++n) {
        CHECK(kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n));
      }
  for (i64 a = -20; a <= 20; ++a)
    for (i64 b = -20; b <= 20; ++b)
      for (i64 n : {3, 5, 7, 9, 15, 21}) CHECK(kronecker(a * b, n) == kronecker(a, n) * kronecker(b, n));
}

TEST_CASE("dedekind_psi and euler_phi") {
  CHECK(dedekind_psi(1) == 1);
  CHECK(dedekind_psi(6) == 12);
  CHECK(dedekind_psi(17) == 18);
  CHECK(dedekind_psi(25) == 30);
  CHECK(euler_phi(6) == 2);
  CHECK(euler_phi(35) == 24);
}

TEST_CASE("factor round trip") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 500; ++t) {
    i64 n = 1 + static_cast<i64>(rng() % 20000000);
    auto f = factor(n);
    CHECK(expand(f) == n);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(is_prime(f[i].p));
      CHECK(f[i].e >= 1);
      if (i) CHECK(f[i - 1].p < f[i].p);
    }
  }
  CHECK(factor(1).empty());
}

TEST_CASE("hall_divisors") {
  CHECK(hall_divisors(1) == std::vector<i64>{1});
  CHECK(hall_divisors(12) == std::vector<i64>{1, 3, 4, 12});
  CHECK(hall_divisors(6) == std::vector<i64>{1, 2, 3, 6});
  for (i64 n : {30, 210, 360, 2310, 19226700}) {
    auto h = hall_divisors(n);
    CHECK(h.size() == (std::size_t{1} << omega(n)));
    std::set<i64> s(h.begin(), h.end());
    for (i64 a : h)
      for (i64 b : h) CHECK(s.count(hall_compose(a, b)));
    for (i64 a : h) CHECK(hall_compose(a, a) == 1);
  }
}

TEST_CASE("class_number examples") {
  CHECK(class_number(-3) == 1);
  CHECK(class_number(-4) == 1);
  CHECK(class_number(-24) == 2);
  CHECK(class_number(-23) == 3);
  CHECK(class_number(-420) == 8);
  CHECK_THROWS_AS(class_number(-5), arith_error);
  CHECK_THROWS_AS(class_number(4), arith_error);
}

TEST_CASE("class_number agrees with brute force for |d| < 10^4") {
  int bad = 0;
  for (i64 d = -3; d > -10000; --d) {
    if (((d % 4) + 4) % 4 > 1) continue;
    if (class_number(d) != brute_class_number(d)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("quadratic discriminant data") {
  auto q = make_quad_disc(-12);
  CHECK(q.fundamental == -3);
  CHECK(q.conductor == 2);
  auto r = make_quad_disc(-4 * 45);
  CHECK(r.fundamental * r.conductor * r.conductor == -180);
  CHECK(r.fundamental == -20);
}
