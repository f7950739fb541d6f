#include "shimura/arith.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <unordered_map>

namespace shimura {

namespace {

struct spf_table {
  i64 limit;
  std::vector<std::uint32_t> spf;
};

std::mutex table_mu;
std::atomic<const spf_table*> table_ptr{nullptr};
// old tables are kept alive so readers holding a pointer stay valid
std::vector<std::unique_ptr<spf_table>> table_keep;

const spf_table* build_table(i64 limit) {
  auto t = std::make_unique<spf_table>();
  t->limit = limit;
  t->spf.assign(static_cast<std::size_t>(limit) + 1, 0);
  std::vector<std::uint32_t> primes;
  for (i64 i = 2; i <= limit; ++i) {
    if (t->spf[i] == 0) {
      t->spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      if (p > t->spf[i] || i * p > limit) break;
      t->spf[i * p] = p;
    }
  }
  const spf_table* raw = t.get();
  table_keep.push_back(std::move(t));
  return raw;
}

factorization factor_trial(i64 n) {
  factorization f;
  auto take = [&](i64 p) {
    if (n % p) return;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    f.push_back({p, e});
  };
  take(2);
  take(3);
  take(5);
  // wheel mod 30
  static constexpr int gaps[8] = {4, 2, 4, 2, 4, 6, 2, 6};
  i64 p = 7;
  for (int k = 0; p * p <= n; p += gaps[k++ & 7]) take(p);
  if (n > 1) f.push_back({n, 1});
  return f;
}

}  // namespace

void reserve_factor_table(i64 limit) {
  const spf_table* cur = table_ptr.load(std::memory_order_acquire);
  if (cur && cur->limit >= limit) return;
  std::lock_guard lk(table_mu);
  cur = table_ptr.load(std::memory_order_acquire);
  if (cur && cur->limit >= limit) return;
  i64 want = std::max<i64>(limit, cur ? 2 * cur->limit : 1 << 16);
  table_ptr.store(build_table(want), std::memory_order_release);
}

factorization factor(i64 n) {
  if (n < 1) throw arith_error("factor: n must be positive");
  const spf_table* t = table_ptr.load(std::memory_order_acquire);
  if (!t || n > t->limit) return factor_trial(n);
  factorization f;
  while (n > 1) {
    i64 p = t->spf[n];
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    f.push_back({p, e});
  }
  return f;
}

i64 expand(const factorization& f) {
  i64 n = 1;
  for (auto [p, e] : f) n *= ipow(p, e);
  return n;
}

i64 ipow(i64 b, int e) {
  i64 r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int valuation(i64 n, i64 p) {
  if (n == 0) throw arith_error("valuation of 0");
  int v = 0;
  while (n % p == 0) n /= p, ++v;
  return v;
}

int omega(i64 n) { return static_cast<int>(factor(n).size()); }

bool is_squarefree(i64 n) {
  for (auto [p, e] : factor(n))
    if (e > 1) return false;
  return true;
}

bool is_prime(i64 n) {
  if (n < 2) return false;
  auto f = factor(n);
  return f.size() == 1 && f[0].e == 1;
}

i64 euler_phi(i64 n) {
  i64 r = n;
  for (auto [p, e] : factor(n)) r = r / p * (p - 1);
  return r;
}

i64 dedekind_psi(i64 n) {
  if (n < 1) throw arith_error("psi: n must be positive");
  i64 r = n;
  for (auto [p, e] : factor(n)) r = r / p * (p + 1);
  return r;
}

int kronecker(i64 a, i64 n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if (a % 2 == 0 && n % 2 == 0) return 0;
  int v = 0;
  while (n % 2 == 0) n /= 2, ++v;
  int k = 1;
  if (v & 1) {
    i64 r = ((a % 8) + 8) % 8;
    if (r == 3 || r == 5) k = -k;
  }
  if (n < 0) {
    n = -n;
    if (a < 0) k = -k;
  }
  // n odd positive: Jacobi symbol
  a %= n;
  if (a < 0) a += n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      i64 r = n % 8;
      if (r == 3 || r == 5) k = -k;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) k = -k;
    a %= n;
  }
  return n == 1 ? k : 0;
}

std::vector<i64> hall_divisors(i64 n) {
  std::vector<i64> out{1};
  for (auto [p, e] : factor(n)) {
    i64 q = ipow(p, e);
    std::size_t s = out.size();
    for (std::size_t i = 0; i < s; ++i) out.push_back(out[i] * q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

quad_disc make_quad_disc(i64 d) {
  if (d >= 0) throw arith_error("discriminant must be negative");
  i64 m = ((d % 4) + 4) % 4;
  if (m != 0 && m != 1) throw arith_error("not a discriminant (d mod 4)");
  i64 f = 1, dk = d;
  for (auto [p, e] : factor(-d)) {
    for (int k = 0; k + 2 <= e; k += 2) {
      i64 t = dk / (p * p);
      i64 tm = ((t % 4) + 4) % 4;
      if (tm == 0 || tm == 1) dk = t, f *= p;
    }
  }
  return {d, dk, f};
}

i64 class_number_uncached(i64 d) {
  make_quad_disc(d);
  i64 ad = -d;
  i64 h = 0;
  std::vector<i64> divs;
  for (i64 b = ad & 1; 3 * b * b <= ad; b += 2) {
    i64 n = (b * b + ad) / 4;
    divs.assign(1, 1);
    for (auto [p, e] : factor(n)) {
      std::size_t s = divs.size();
      i64 q = 1;
      for (int k = 1; k <= e; ++k) {
        q *= p;
        for (std::size_t i = 0; i < s; ++i) divs.push_back(divs[i] * q);
      }
    }
    for (i64 a : divs) {
      if (a < b || a < 1 || a * a > n) continue;
      i64 c = n / a;
      if (std::gcd(std::gcd(a, b), c) != 1) continue;
      h += (b == 0 || a == b || a == c) ? 1 : 2;
    }
  }
  return h;
}

namespace {
std::shared_mutex memo_mu;
std::unordered_map<i64, i64> memo;
}  // namespace

i64 class_number(i64 d) {
  {
    std::shared_lock lk(memo_mu);
    auto it = memo.find(d);
    if (it != memo.end()) return it->second;
  }
  i64 h = class_number_uncached(d);
  std::unique_lock lk(memo_mu);
  return memo.try_emplace(d, h).first->second;
}

i64 class_number(const quad_disc& d) { return class_number(d.disc); }

double class_number_upper(i64 d) {
  if (d == -3 || d == -4) return 1.0;
  double a = static_cast<double>(-d);
  // small slack so rounding never undercuts the true bound
  return 1.000001 * std::sqrt(a) * (std::log(a) + 2.0) / std::numbers::pi + 1e-9;
}

}  // namespace shimura
