#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace shimura {

using i64 = std::int64_t;

struct prime_power {
  i64 p;
  int e;
  bool operator==(const prime_power&) const = default;
};

// sorted by prime
using factorization = std::vector<prime_power>;

struct arith_error : std::domain_error {
  using std::domain_error::domain_error;
};

factorization factor(i64 n);
i64 expand(const factorization& f);

int omega(i64 n);
bool is_squarefree(i64 n);
bool is_prime(i64 n);
i64 euler_phi(i64 n);
i64 dedekind_psi(i64 n);
i64 ipow(i64 b, int e);
int valuation(i64 n, i64 p);

int kronecker(i64 a, i64 n);

std::vector<i64> hall_divisors(i64 n);
inline i64 hall_compose(i64 a, i64 b);

struct quad_disc {
  i64 disc;
  i64 fundamental;
  i64 conductor;
};

quad_disc make_quad_disc(i64 d);

// number of reduced primitive forms; memoized, safe to call from several threads
i64 class_number(i64 d);
i64 class_number(const quad_disc& d);
// same count without touching the memo
i64 class_number_uncached(i64 d);
// h(d) <= sqrt|d| (log|d| + 2) / pi, from the class number formula
double class_number_upper(i64 d);

// smallest-prime-factor table shared by factor() and class numbers; grows on demand
void reserve_factor_table(i64 limit);

}  // namespace shimura

#include <numeric>

inline shimura::i64 shimura::hall_compose(i64 a, i64 b) {
  i64 g = std::gcd(a, b);
  return (a / g) * (b / g);
}
