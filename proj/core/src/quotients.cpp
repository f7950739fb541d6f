#include "shimura/quotients.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mpfr.h>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace shimura {

void check_level(i64 D, i64 N) {
  if (D < 2 || N < 1) throw arith_error("level: need D > 1 and N >= 1");
  auto f = factor(D);
  for (auto [p, e] : f)
    if (e > 1) throw arith_error("level: D must be squarefree");
  if (f.size() % 2) throw arith_error("level: D needs an even number of primes");
  if (std::gcd(D, N) != 1) throw arith_error("level: gcd(D, N) must be 1");
}

bool valid_level(i64 D, i64 N) {
  try {
    check_level(D, N);
    return true;
  } catch (const arith_error&) {
    return false;
  }
}

bool al_subgroup::contains(i64 m) const {
  return std::binary_search(elements.begin(), elements.end(), m);
}

al_subgroup al_subgroup::generated(i64 DN, const std::vector<i64>& gens) {
  std::set<i64> s{1};
  for (i64 g : gens) {
    if (g < 1 || DN % g || std::gcd(g, DN / g) != 1)
      throw arith_error("W: " + std::to_string(g) + " is not a Hall divisor of " + std::to_string(DN));
    std::vector<i64> add;
    for (i64 x : s) add.push_back(hall_compose(x, g));
    s.insert(add.begin(), add.end());
  }
  return {{s.begin(), s.end()}};
}

i64 e_k(i64 D, i64 N, int k) {
  if (k != 3 && k != 4) throw arith_error("e_k: k must be 3 or 4");
  i64 r = 1;
  for (auto [p, e] : factor(D)) r *= 1 - kronecker(-k, p);
  if (N > 1)
    for (auto [l, e] : factor(N)) {
      int s = kronecker(-k, l);
      r *= e == 1 ? 1 + s : (s == 1 ? 2 : 0);
    }
  return r;
}

namespace {

i64 genus_from(i64 phiD, i64 psiN, i64 e4, i64 e3) {
  i64 num = 12 + phiD * psiN - 3 * e4 - 4 * e3;
  if (num % 12 || num < 0) throw std::logic_error("genus formula is not a nonnegative integer");
  return num / 12;
}

// x^2 - s x + n with s = d mod 2, n = (s^2 - d)/4 has discriminant d
struct char_poly {
  i64 s, n;
  explicit char_poly(i64 d) : s(d & 1), n((s * s - d) / 4) {}
  __int128 at(__int128 x) const { return x * x - s * x + n; }
  __int128 deriv(__int128 x) const { return 2 * x - s; }
};

i64 pmod(__int128 a, i64 m) {
  __int128 r = a % m;
  return static_cast<i64>(r < 0 ? r + m : r);
}

// number of roots mod p^k that lift a root x mod p^j
i64 lift_count(const char_poly& c, i64 p, i64 x, int j, i64 pj, int k) {
  if (j == k) return 1;
  if (pmod(c.deriv(x), p) != 0) return 1;  // simple root, unique lift each step
  i64 total = 0;
  i64 pj1 = pj * p;
  for (i64 t = 0; t < p; ++t) {
    i64 y = x + t * pj;
    if (pmod(c.at(y), pj1) == 0) total += lift_count(c, p, y, j + 1, pj1, k);
  }
  return total;
}

i64 root_count(const char_poly& c, i64 p, int k) {
  i64 total = 0;
  for (i64 x = 0; x < p; ++x)
    if (pmod(c.at(x), p) == 0) total += lift_count(c, p, x, 1, p, k);
  return total;
}

// conductor of d = -m or -4m from the factorization of m
i64 conductor_of(const factorization& mf, bool four) {
  i64 s = 1, t = 1;
  for (auto [p, e] : mf) {
    if (e & 1) s *= p;
    t *= ipow(p, e / 2);
  }
  // d = -c s t^2 with c in {1,4}
  i64 c = four ? 4 : 1;
  i64 dk = (s % 4 == 3) ? -s : -4 * s;
  // |d| / |dk|
  __int128 ratio = static_cast<__int128>(c) * s * t * t / (-dk);
  i64 f = static_cast<i64>(std::llround(std::sqrt(static_cast<double>(ratio))));
  while (static_cast<__int128>(f) * f > ratio) --f;
  while (static_cast<__int128>(f + 1) * (f + 1) <= ratio) ++f;
  return f;
}

i64 nu_D(i64 d, i64 p, i64 f) {
  if (f % p == 0) return 0;
  return 1 - kronecker(d, p);
}

i64 nu_N(i64 d, i64 p, int e, i64 f) {
  if (e == 1 && d % p != 0) return 1 + kronecker(d, p);
  if (e > 40 || ipow(p, e) > (i64(1) << 40))
    throw embedding_table_incomplete("embedding count: p^e out of range");
  (void)f;
  char_poly c(d);
  i64 v = root_count(c, p, e);
  if (d % p == 0) v += root_count(c, p, e + 1) / p;
  return v;
}

// orders for m given its factorization
struct order_term {
  i64 d;
  i64 f;
};

std::vector<order_term> orders_for(i64 m, const factorization& mf) {
  if (m == 2) return {{-4, 1}, {-8, 1}};
  std::vector<order_term> out;
  if (m % 4 == 3) out.push_back({-m, conductor_of(mf, false)});
  out.push_back({-4 * m, conductor_of(mf, true)});
  return out;
}

}  // namespace

i64 genus_X0DN(i64 D, i64 N) {
  check_level(D, N);
  return genus_from(euler_phi(D), dedekind_psi(N), e_k(D, N, 4), e_k(D, N, 3));
}

std::vector<i64> fixed_orders(i64 m) {
  if (m <= 1) throw arith_error("fixed_orders: m must exceed 1");
  std::vector<i64> out;
  for (auto t : orders_for(m, factor(m))) out.push_back(t.d);
  return out;
}

i64 local_embedding_number(i64 d, i64 p, embed_role role, int e) {
  auto q = make_quad_disc(d);
  if (!is_prime(p)) throw arith_error("embedding number: p must be prime");
  if (role == embed_role::divides_D) return nu_D(d, p, q.conductor);
  if (e < 1) throw embedding_table_incomplete("embedding count: exponent must be >= 1");
  return nu_N(d, p, e, q.conductor);
}

namespace {

// everything about one level needed for fixed points
struct level_info {
  i64 D, N, DN;
  std::vector<prime_power> pf;  // primes of DN
  std::vector<bool> inD;
  i64 g;
  int w;  // omega(DN)

  level_info(i64 D_, i64 N_, const factorization& fD, const factorization& fN, bool with_genus = true)
      : D(D_), N(N_), DN(D_ * N_) {
    std::merge(fD.begin(), fD.end(), fN.begin(), fN.end(), std::back_inserter(pf),
               [](auto a, auto b) { return a.p < b.p; });
    for (auto& x : pf) inD.push_back(D % x.p == 0);
    w = static_cast<int>(pf.size());
    i64 phiD = 1, psiN = 1, e4 = 1, e3 = 1;
    for (std::size_t i = 0; i < pf.size(); ++i) {
      auto [p, e] = pf[i];
      int s4 = kronecker(-4, p), s3 = kronecker(-3, p);
      if (inD[i]) {
        phiD *= p - 1;
        e4 *= 1 - s4;
        e3 *= 1 - s3;
      } else {
        psiN *= ipow(p, e - 1) * (p + 1);
        e4 *= e == 1 ? 1 + s4 : (s4 == 1 ? 2 : 0);
        e3 *= e == 1 ? 1 + s3 : (s3 == 1 ? 2 : 0);
      }
    }
    g = with_genus ? genus_from(phiD, psiN, e4, e3) : -1;
  }

  i64 hall(unsigned mask) const {
    i64 m = 1;
    for (int i = 0; i < w; ++i)
      if (mask >> i & 1) m *= ipow(pf[i].p, pf[i].e);
    return m;
  }

  // h-coefficient products for each order fixed by w_mask
  std::vector<std::pair<i64, i64>> terms(unsigned mask) const {
    factorization mf;
    for (int i = 0; i < w; ++i)
      if (mask >> i & 1) mf.push_back(pf[i]);
    i64 m = hall(mask);
    std::vector<std::pair<i64, i64>> out;
    for (auto [d, f] : orders_for(m, mf)) {
      i64 c = 1;
      for (int i = 0; i < w && c; ++i) {
        if (mask >> i & 1) continue;
        c *= inD[i] ? nu_D(d, pf[i].p, f) : nu_N(d, pf[i].p, pf[i].e, f);
      }
      if (c) out.push_back({d, c});
    }
    return out;
  }

  i64 fix(unsigned mask) const {
    i64 s = 0;
    for (auto [d, c] : terms(mask)) s += c * class_number(d);
    return s;
  }
};

i64 genus_from_fix(i64 g, i64 order, i64 fixsum) {
  // 2g - 2 = |W| (2g' - 2) + fixsum
  i64 num = 2 * g - 2 - fixsum;
  if (num % order) throw std::logic_error("Riemann-Hurwitz: quotient genus is not an integer");
  i64 t = num / order + 2;
  if (t % 2 || t < 0) throw std::logic_error("Riemann-Hurwitz: quotient genus is not an integer");
  return t / 2;
}

level_info make_info(i64 D, i64 N) {
  check_level(D, N);
  return level_info(D, N, factor(D), N > 1 ? factor(N) : factorization{});
}

unsigned mask_of(const level_info& L, i64 m) {
  unsigned mask = 0;
  for (int i = 0; i < L.w; ++i)
    if (m % L.pf[i].p == 0) {
      if (m % ipow(L.pf[i].p, L.pf[i].e)) throw arith_error("not a Hall divisor");
      mask |= 1u << i;
    }
  if (L.hall(mask) != m) throw arith_error("not a Hall divisor");
  return mask;
}

}  // namespace

i64 fixed_point_count(i64 D, i64 N, i64 m) {
  auto L = make_info(D, N);
  if (m <= 1) throw arith_error("fixed_point_count: m must exceed 1");
  return L.fix(mask_of(L, m));
}

i64 quotient_genus(i64 D, i64 N, const al_subgroup& W) {
  auto L = make_info(D, N);
  i64 s = 0;
  for (i64 m : W.elements) {
    if (m == 1) continue;
    s += L.fix(mask_of(L, m));
  }
  if (!W.contains(1) || std::popcount(W.order()) != 1) throw arith_error("W is not a subgroup");
  return genus_from_fix(L.g, static_cast<i64>(W.order()), s);
}

i64 star_genus(i64 D, i64 N) {
  auto L = make_info(D, N);
  i64 s = 0;
  for (unsigned mask = 1; mask < (1u << L.w); ++mask) s += L.fix(mask);
  return genus_from_fix(L.g, i64(1) << L.w, s);
}

int ribet_sign(i64 D, i64 m) { return omega(std::gcd(D, m)) % 2 ? -1 : 1; }

namespace {

std::vector<i64> masks_to_hall(const level_info& L, const std::vector<unsigned>& ms) {
  std::vector<i64> out;
  for (unsigned x : ms) out.push_back(L.hall(x));
  return out;
}

// all reduced echelon bases over GF(2)^w; pivot = lowest set bit of each row
void echelon_forms(int w, std::vector<std::vector<unsigned>>& out) {
  for (unsigned piv = 0; piv < (1u << w); ++piv) {
    std::vector<int> pivots;
    for (int i = 0; i < w; ++i)
      if (piv >> i & 1) pivots.push_back(i);
    // free positions of row r: non-pivot columns above its pivot
    std::vector<std::vector<int>> free(pivots.size());
    int nfree = 0;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      for (int c = pivots[r] + 1; c < w; ++c)
        if (!(piv >> c & 1)) free[r].push_back(c), ++nfree;
    for (unsigned long long bits = 0; bits < (1ull << nfree); ++bits) {
      std::vector<unsigned> rows;
      int k = 0;
      for (std::size_t r = 0; r < pivots.size(); ++r) {
        unsigned row = 1u << pivots[r];
        for (int c : free[r])
          if (bits >> k++ & 1) row |= 1u << c;
        rows.push_back(row);
      }
      out.push_back(rows);
    }
  }
}

al_subgroup span(const level_info& L, const std::vector<unsigned>& rows) {
  std::vector<unsigned> el{0};
  for (unsigned r : rows) {
    std::size_t s = el.size();
    for (std::size_t i = 0; i < s; ++i) el.push_back(el[i] ^ r);
  }
  al_subgroup W;
  for (unsigned x : el) W.elements.push_back(L.hall(x));
  std::sort(W.elements.begin(), W.elements.end());
  return W;
}

std::vector<unsigned> rref(std::vector<unsigned> v) {
  std::vector<unsigned> basis;
  for (int bit = 0; bit < 32; ++bit) {
    auto it = std::find_if(v.begin(), v.end(), [&](unsigned x) { return x >> bit & 1 && !(x & ((1u << bit) - 1)); });
    if (it == v.end()) continue;
    unsigned piv = *it;
    v.erase(it);
    for (auto& x : v)
      if (x >> bit & 1) x ^= piv;
    for (auto& b : basis)
      if (b >> bit & 1) b ^= piv;
    basis.push_back(piv);
  }
  return basis;
}

}  // namespace

std::vector<al_subgroup> all_subgroups(i64 D, i64 N) {
  auto L = make_info(D, N);
  std::vector<std::vector<unsigned>> forms;
  echelon_forms(L.w, forms);
  std::vector<al_subgroup> out;
  for (auto& f : forms) out.push_back(span(L, f));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<i64> canonical_generators(i64 DN, const al_subgroup& W) {
  auto f = factor(DN);
  level_info L(DN, 1, f, {}, false);  // only the prime data is used
  std::vector<unsigned> ms;
  for (i64 m : W.elements) ms.push_back(mask_of(L, m));
  // rref would leave reduced rows with pivots in low bits; sort for stable output
  auto b = rref(ms);
  auto out = masks_to_hall(L, b);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct mpfr_num {
  mpfr_t v;
  mpfr_num() { mpfr_init2(v, 256); }
  ~mpfr_num() { mpfr_clear(v); }
  mpfr_num(const mpfr_num&) = delete;
};

// lower bound for 1 / (e^gamma loglog x + 3 / loglog 6) and sqrt x
void gonality_parts(i64 x, mpfr_t inv_lo, mpfr_t sq_lo, mpfr_t sq_hi) {
  mpfr_num eg, ll, ll6, t;
  mpfr_const_euler(eg.v, MPFR_RNDU);
  mpfr_exp(eg.v, eg.v, MPFR_RNDU);
  mpfr_set_si(ll.v, x, MPFR_RNDU);
  mpfr_log(ll.v, ll.v, MPFR_RNDU);
  mpfr_log(ll.v, ll.v, MPFR_RNDU);
  mpfr_set_si(ll6.v, 6, MPFR_RNDD);
  mpfr_log(ll6.v, ll6.v, MPFR_RNDD);
  mpfr_log(ll6.v, ll6.v, MPFR_RNDD);
  mpfr_mul(t.v, eg.v, ll.v, MPFR_RNDU);
  mpfr_si_div(ll6.v, 3, ll6.v, MPFR_RNDU);
  mpfr_add(t.v, t.v, ll6.v, MPFR_RNDU);
  mpfr_si_div(inv_lo, 1, t.v, MPFR_RNDD);
  mpfr_set_si(sq_lo, x, MPFR_RNDD);
  mpfr_sqrt(sq_lo, sq_lo, MPFR_RNDD);
  mpfr_set_si(sq_hi, x, MPFR_RNDU);
  mpfr_sqrt(sq_hi, sq_hi, MPFR_RNDU);
}

mpq_class to_q(mpfr_t v) {
  mpq_class q;
  mpfr_get_q(q.get_mpq_t(), v);
  return q;
}

}  // namespace

mpq_class gonality_genus_bound(i64 D, i64 N) {
  i64 x = D * N;
  if (x < 6) throw arith_error("gonality bound: DN must be at least 6");
  mpfr_num inv, lo, hi;
  gonality_parts(x, inv.v, lo.v, hi.v);
  // inv >= 0 always, so rounding sqrt down gives a lower bound
  mpq_class a = to_q(lo.v) * to_q(inv.v) / 12 - mpq_class(7, 3);
  return mpq_class(975, 16384) * a;
}

mpq_class genus_lower_bound(i64 D, i64 N) {
  i64 x = D * N;
  if (x < 6) throw arith_error("genus bound: DN must be at least 6");
  mpfr_num inv, lo, hi;
  gonality_parts(x, inv.v, lo.v, hi.v);
  return 1 + mpq_class(x, 12) * to_q(inv.v) - 7 * to_q(hi.v) / 3;
}

bool record_less(const quotient_record& a, const quotient_record& b) {
  if (a.D != b.D) return a.D < b.D;
  if (a.N != b.N) return a.N < b.N;
  return a.W.elements < b.W.elements;
}

int al_bielliptic_count(i64 D, i64 N, const al_subgroup& W) {
  std::set<std::vector<i64>> seen;
  int k = 0;
  for (i64 m : hall_divisors(D * N)) {
    if (W.contains(m)) continue;
    std::vector<i64> gens(W.elements.begin(), W.elements.end());
    gens.push_back(m);
    auto W2 = al_subgroup::generated(D * N, gens);
    if (!seen.insert(W2.elements).second) continue;
    if (quotient_genus(D, N, W2) == 1) ++k;
  }
  return k;
}

std::string format_W(const al_subgroup& W) {
  std::ostringstream os;
  bool first = true;
  for (i64 m : W.elements) {
    if (m == 1) continue;
    if (!first) os << ',';
    os << m;
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// the scan

namespace {

double h_upper(i64 d) { return class_number_upper(d); }

struct star_eval {
  bool viable = false;
  i64 genus = -1;
  std::vector<i64> fix;  // indexed by mask, exact when viable
};

// exact star genus if it is <= G; bails out as soon as the bound rules it out
star_eval eval_star(const level_info& L, i64 G) {
  star_eval r;
  unsigned full = 1u << L.w;
  struct term {
    unsigned mask;
    i64 d, c;
    double ub;
  };
  std::vector<term> ts;
  double ub_total = 0;
  for (unsigned mask = 1; mask < full; ++mask)
    for (auto [d, c] : L.terms(mask)) {
      double u = c * h_upper(d);
      ts.push_back({mask, d, c, u});
      ub_total += u;
    }
  // need sum Fix >= 2g - 2 - (G - 1) 2^{w+1}
  double need = static_cast<double>(2 * L.g - 2 - (G - 1) * (i64(2) << L.w));
  if (ub_total < need - 0.5) return r;
  std::sort(ts.begin(), ts.end(), [](const term& a, const term& b) { return a.ub > b.ub; });
  double rest = ub_total;
  i64 exact = 0;
  r.fix.assign(full, 0);
  for (auto& t : ts) {
    i64 v = t.c * class_number(t.d);
    exact += v;
    r.fix[t.mask] += v;
    rest -= t.ub;
    if (static_cast<double>(exact) + rest < need - 0.5) return r;
  }
  r.genus = genus_from_fix(L.g, full, exact);
  r.viable = r.genus <= G;
  return r;
}

struct scan_ctx {
  i64 G, B;
  const std::vector<std::uint32_t>* primes;
};

double nu_max_N(i64 p, int e) {
  double c = p == 2 ? 4 : 2;
  return 2 * c * std::pow(static_cast<double>(p), (e + 1) / 2);
}

struct viable_level {
  level_info info;
  star_eval ev;
};

// lower bound for the star genus at level N q, q a new prime (q >= 5)
struct new_prime_bound {
  double a, base, shift;
  std::vector<std::pair<double, i64>> f1;  // (coefficient, m')

  new_prime_bound(const level_info& L, const star_eval& ev) {
    i64 phiD = 1, psiN = 1, e4 = 1, e3 = 1;
    for (int i = 0; i < L.w; ++i) {
      auto [p, e] = L.pf[i];
      int s4 = kronecker(-4, p), s3 = kronecker(-3, p);
      if (L.inD[i]) {
        phiD *= p - 1;
        e4 *= 1 - s4;
        e3 *= 1 - s3;
      } else {
        psiN *= ipow(p, e - 1) * (p + 1);
        e4 *= e == 1 ? 1 + s4 : (s4 == 1 ? 2 : 0);
        e3 *= e == 1 ? 1 + s3 : (s3 == 1 ? 2 : 0);
      }
    }
    double F0 = 0;
    for (std::size_t m = 1; m < ev.fix.size(); ++m) F0 += 2.0 * ev.fix[m];
    a = static_cast<double>(phiD * psiN) / 6.0;
    base = -static_cast<double>(e4) - 4.0 * e3 / 3.0 - F0;
    shift = std::ldexp(1.0, L.w + 2);
    for (unsigned mask = 0; mask < (1u << L.w); ++mask) {
      double c = 1;
      for (int i = 0; i < L.w; ++i) {
        if (mask >> i & 1) continue;
        c *= L.inD[i] ? 2.0 : nu_max_N(L.pf[i].p, L.pf[i].e);
      }
      f1.push_back({c, L.hall(mask)});
    }
  }

  double operator()(double q) const {
    double F1 = 0;
    for (auto [c, m] : f1) {
      double x = m * q;
      F1 += c * (std::sqrt(x) * (std::log(x) + 2) + std::sqrt(4 * x) * (std::log(4 * x) + 2)) / 3.14159;
    }
    return 1 + (a * (q + 1) + base - F1) / shift;
  }
};

// all viable N for a fixed D whose N = 1 level is viable
void scan_N(const scan_ctx& ctx, i64 D, const factorization& fD, viable_level first, std::vector<viable_level>& out) {
  std::map<i64, std::size_t> viable;  // N -> index in out
  std::priority_queue<i64, std::vector<i64>, std::greater<>> heap;
  std::unordered_set<i64> seen;
  i64 maxN = ctx.B / D;

  auto extend = [&](const viable_level& v) {
    i64 N = v.info.N;
    auto push = [&](i64 M) {
      if (seen.insert(M).second) heap.push(M);
    };
    for (auto [q, e] : v.info.pf)
      if (D % q && N * q <= maxN) push(N * q);
    std::optional<new_prime_bound> lb;
    for (std::uint32_t q32 : *ctx.primes) {
      i64 q = q32;
      if (D % q == 0 || N % q == 0) continue;
      if (N * q > maxN) break;
      if (q >= 5) {
        if (!lb) lb.emplace(v.info, v.ev);
        double x = (*lb)(static_cast<double>(q));
        if (x > ctx.G + 1e-6 && (*lb)(q + 1.0) >= x) break;
      }
      push(N * q);
    }
  };

  viable[1] = out.size();
  out.push_back(std::move(first));
  extend(out.back());
  while (!heap.empty()) {
    i64 M = heap.top();
    heap.pop();
    auto fM = factor(M);
    bool ok = true;
    for (auto [r, e] : fM)
      if (!viable.count(M / r)) ok = false;
    if (!ok) continue;
    level_info L(D, M, fD, fM);
    auto ev = eval_star(L, ctx.G);
    if (!ev.viable) continue;
    viable[M] = out.size();
    out.push_back({std::move(L), std::move(ev)});
    // copy before extend, out may reallocate
    viable_level cur = out.back();
    extend(cur);
  }
}

void subgroup_records(const viable_level& v, i64 G, std::vector<quotient_record>& recs) {
  const auto& L = v.info;
  std::vector<std::vector<unsigned>> forms;
  echelon_forms(L.w, forms);
  for (auto& rows : forms) {
    if (rows.empty()) continue;
    std::vector<unsigned> el{0};
    for (unsigned r : rows) {
      std::size_t s = el.size();
      for (std::size_t i = 0; i < s; ++i) el.push_back(el[i] ^ r);
    }
    i64 s = 0;
    for (unsigned x : el) s += v.ev.fix[x];
    i64 g = genus_from_fix(L.g, static_cast<i64>(el.size()), s);
    if (g > G) continue;
    al_subgroup W;
    for (unsigned x : el) W.elements.push_back(L.hall(x));
    std::sort(W.elements.begin(), W.elements.end());
    recs.push_back({L.D, L.N, std::move(W), g});
  }
}

const std::vector<std::uint32_t>& primes_upto(i64 n) {
  static std::mutex mu;
  static std::vector<std::uint32_t> ps;
  static i64 have = 0;
  std::lock_guard lk(mu);
  if (have < n) {
    std::vector<bool> comp(n + 1);
    ps.clear();
    for (i64 i = 2; i <= n; ++i) {
      if (comp[i]) continue;
      ps.push_back(static_cast<std::uint32_t>(i));
      for (i64 j = i * i; j <= n; j += i) comp[j] = true;
    }
    have = n;
  }
  return ps;
}

bool skipped(const std::vector<std::pair<i64, i64>>& skip, i64 lo, i64 hi) {
  for (auto [a, b] : skip)
    if (a <= lo && hi <= b) return true;
  return false;
}

void scan_chunk(const scan_ctx& ctx, i64 lo, i64 hi, std::vector<star_level>& stars, std::vector<quotient_record>& recs) {
  for (i64 D = std::max<i64>(lo, 6); D <= hi; ++D) {
    auto fD = factor(D);
    if (fD.size() % 2) continue;
    bool sf = true;
    for (auto [p, e] : fD) sf &= e == 1;
    if (!sf) continue;
    level_info L(D, 1, fD, {});
    auto ev = eval_star(L, ctx.G);
    if (!ev.viable) continue;
    std::vector<viable_level> levels;
    scan_N(ctx, D, fD, {std::move(L), std::move(ev)}, levels);
    for (auto& v : levels) {
      stars.push_back({v.info.D, v.info.N, v.ev.genus});
      subgroup_records(v, ctx.G, recs);
    }
  }
}

}  // namespace

enumeration_result enumerate_all(const enumerate_options& opt) {
  if (opt.max_genus < 0 || opt.bound < 1) throw arith_error("enumerate: bad options");
  // (b^2 - d)/4 <= |d|/3 with |d| <= 4B
  reserve_factor_table(std::max<i64>(opt.bound, 4 * opt.bound / 3 + 16));
  scan_ctx ctx{opt.max_genus, opt.bound, &primes_upto(std::max<i64>(opt.bound / 6, 16))};

  std::vector<std::pair<i64, i64>> chunks;
  for (i64 lo = 1; lo <= opt.bound; lo += opt.chunk) {
    i64 hi = std::min(opt.bound, lo + opt.chunk - 1);
    if (!skipped(opt.skip, lo, hi)) chunks.push_back({lo, hi});
  }
  enumeration_result res;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next++;
      if (i >= chunks.size()) return;
      std::vector<star_level> st;
      std::vector<quotient_record> rc;
      try {
        scan_chunk(ctx, chunks[i].first, chunks[i].second, st, rc);
      } catch (...) {
        std::lock_guard lk(mu);
        if (!err) err = std::current_exception();
        return;
      }
      std::lock_guard lk(mu);
      if (opt.on_chunk) opt.on_chunk(chunks[i].first, chunks[i].second, st, rc);
      res.stars.insert(res.stars.end(), st.begin(), st.end());
      res.records.insert(res.records.end(), rc.begin(), rc.end());
    }
  };
  int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> th;
    for (int j = 0; j < jobs; ++j) th.emplace_back(worker);
    for (auto& t : th) t.join();
  }
  if (err) std::rethrow_exception(err);
  std::sort(res.stars.begin(), res.stars.end(),
            [](auto& a, auto& b) { return std::pair(a.D, a.N) < std::pair(b.D, b.N); });
  std::sort(res.records.begin(), res.records.end(), record_less);
  return res;
}

std::vector<quotient_record> enumerate_quotients(i64 max_genus, i64 DN_bound) {
  enumerate_options o;
  o.max_genus = max_genus;
  o.bound = DN_bound;
  return enumerate_all(o).records;
}

std::vector<star_level> star_levels_naive(i64 max_genus, i64 bound) {
  std::vector<star_level> out;
  for (i64 D = 6; D <= bound; ++D) {
    if (!valid_level(D, 1)) continue;
    for (i64 N = 1; D * N <= bound; ++N) {
      if (std::gcd(D, N) != 1) continue;
      i64 g = star_genus(D, N);
      if (g <= max_genus) out.push_back({D, N, g});
    }
  }
  return out;
}

}  // namespace shimura
