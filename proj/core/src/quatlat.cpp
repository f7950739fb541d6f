#include "shimura/quatlat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace shimura {

namespace {

using mat4q = std::array<std::array<mpq_class, 4>, 4>;
using row4z = std::array<mpz_class, 4>;

mpz_class floor_div(const mpz_class& a, const mpz_class& b) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

mpz_class round_q(const mpq_class& x) {
  mpq_class y = x + mpq_class(1, 2);
  mpz_class r;
  mpz_fdiv_q(r.get_mpz_t(), y.get_num_mpz_t(), y.get_den_mpz_t());
  return r;
}

i64 mod_i(const mpz_class& x, i64 m) {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(m));
  return r.get_si();
}

i64 inv_mod(i64 a, i64 m) {
  a %= m;
  if (a < 0) a += m;
  i64 r0 = m, r1 = a, s0 = 0, s1 = 1;
  while (r1) {
    i64 q = r0 / r1;
    std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
    std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
  }
  if (r0 != 1) throw arith_error("inv_mod: not invertible");
  return ((s0 % m) + m) % m;
}

// in-place HNF of integer rows; returns the 4 pivot rows
std::array<row4z, 4> hnf(std::vector<row4z> r) {
  size_t n = r.size();
  for (int j = 0; j < 4; ++j) {
    if (static_cast<size_t>(j) >= n) throw arith_error("lattice: rank deficient");
    for (;;) {
      size_t best = n;
      for (size_t i = j; i < n; ++i)
        if (r[i][j] != 0 && (best == n || abs(r[i][j]) < abs(r[best][j]))) best = i;
      if (best == n) throw arith_error("lattice: rank deficient");
      std::swap(r[j], r[best]);
      bool clean = true;
      for (size_t i = j + 1; i < n; ++i) {
        if (r[i][j] == 0) continue;
        mpz_class q = floor_div(r[i][j], r[j][j]);
        for (int k = j; k < 4; ++k) r[i][k] -= q * r[j][k];
        if (r[i][j] != 0) clean = false;
      }
      if (clean) break;
    }
    if (r[j][j] < 0)
      for (int k = j; k < 4; ++k) r[j][k] = -r[j][k];
    for (int i = 0; i < j; ++i) {
      mpz_class q = floor_div(r[i][j], r[j][j]);
      if (q != 0)
        for (int k = j; k < 4; ++k) r[i][k] -= q * r[j][k];
    }
  }
  return {r[0], r[1], r[2], r[3]};
}

bool invert(mat4q m, mat4q& out) {
  mat4q inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = -1;
    for (int r = c; r < 4; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) return false;
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    mpq_class d = m[c][c];
    for (int k = 0; k < 4; ++k) { m[c][k] /= d; inv[c][k] /= d; }
    for (int r = 0; r < 4; ++r) {
      if (r == c || m[r][c] == 0) continue;
      mpq_class f = m[r][c];
      for (int k = 0; k < 4; ++k) { m[r][k] -= f * m[c][k]; inv[r][k] -= f * inv[c][k]; }
    }
  }
  out = inv;
  return true;
}

mpq_class det4(mat4q m) {
  mpq_class d = 1;
  for (int c = 0; c < 4; ++c) {
    int piv = -1;
    for (int r = c; r < 4; ++r)
      if (m[r][c] != 0) { piv = r; break; }
    if (piv < 0) return 0;
    if (piv != c) { std::swap(m[c], m[piv]); d = -d; }
    d *= m[c][c];
    for (int r = c + 1; r < 4; ++r) {
      if (m[r][c] == 0) continue;
      mpq_class f = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

mat4q basis_matrix(const quat_lattice& L) {
  mat4q m;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) m[i][k] = mpq_class(L.rows[i][k], L.den);
  for (auto& r : m)
    for (auto& x : r) x.canonicalize();
  return m;
}

quat_lattice dual(const quat_lattice& L) {
  mat4q inv;
  if (!invert(basis_matrix(L), inv)) throw arith_error("lattice: singular");
  std::vector<quat> g(4);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) g[i][k] = inv[k][i];
  return quat_lattice::from_generators(g);
}

mpq_class sqrt_q(const mpq_class& x) {
  if (x < 0) throw arith_error("sqrt of negative");
  mpz_class n = x.get_num(), d = x.get_den(), sn, sd;
  mpz_sqrt(sn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(sd.get_mpz_t(), d.get_mpz_t());
  if (sn * sn != n || sd * sd != d) throw arith_error("sqrt: not a square");
  return mpq_class(sn, sd);
}

}  // namespace

// ---------- algebra ----------

int hilbert_symbol(i64 a, i64 b, i64 p) {
  if (a == 0 || b == 0) throw arith_error("hilbert_symbol: zero argument");
  if (p == 0) return (a < 0 && b < 0) ? -1 : 1;
  int al = 0, be = 0;
  while (a % p == 0) { a /= p; ++al; }
  while (b % p == 0) { b /= p; ++be; }
  if (p == 2) {
    auto e2 = [](i64 u) { return ((u % 4) + 4) % 4 == 3 ? 1 : 0; };
    auto w2 = [](i64 u) {
      i64 r = ((u % 8) + 8) % 8;
      return (r == 3 || r == 5) ? 1 : 0;
    };
    int ex = e2(a) * e2(b) + al * w2(b) + be * w2(a);
    return (ex & 1) ? -1 : 1;
  }
  int s = 1;
  if ((al & 1) && (be & 1) && ((p - 1) / 2) % 2 == 1) s = -s;
  if (be & 1) s *= kronecker(a, p);
  if (al & 1) s *= kronecker(b, p);
  return s;
}

std::vector<i64> ramified_primes(i64 a, i64 b) {
  std::vector<i64> ps;
  for (auto& f : factor(std::abs(2 * a * b))) ps.push_back(f.p);
  std::vector<i64> out;
  for (i64 p : ps)
    if (hilbert_symbol(a, b, p) == -1) out.push_back(p);
  return out;
}

quat_algebra build_algebra(i64 Dhat) {
  if (Dhat < 2 || !is_squarefree(Dhat) || omega(Dhat) % 2 == 0)
    throw arith_error("build_algebra: disc must be a squarefree product of an odd number of primes");
  std::vector<i64> want;
  for (auto& f : factor(Dhat)) want.push_back(f.p);
  for (i64 m = 1;; ++m) {
    // max(|a|,|b|) = m, |a| <= |b|, lexicographic
    for (i64 x = 1; x <= m; ++x) {
      i64 a = -x, b = -m;
      if (ramified_primes(a, b) == want) return {a, b, Dhat};
    }
  }
}

quat qone() { return {1, 0, 0, 0}; }

quat qmul(const quat_algebra& B, const quat& x, const quat& y) {
  mpq_class a = B.a, b = B.b, ab = a * b;
  return {x[0] * y[0] + a * x[1] * y[1] + b * x[2] * y[2] - ab * x[3] * y[3],
          x[0] * y[1] + x[1] * y[0] - b * x[2] * y[3] + b * x[3] * y[2],
          x[0] * y[2] + x[2] * y[0] + a * x[1] * y[3] - a * x[3] * y[1],
          x[0] * y[3] + x[3] * y[0] + x[1] * y[2] - x[2] * y[1]};
}

quat qconj(const quat& x) { return {x[0], -x[1], -x[2], -x[3]}; }
quat qadd(const quat& x, const quat& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]}; }
quat qsub(const quat& x, const quat& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]}; }
quat qscale(const quat& x, const mpq_class& s) { return {x[0] * s, x[1] * s, x[2] * s, x[3] * s}; }

mpq_class nrd(const quat_algebra& B, const quat& x) {
  mpq_class a = B.a, b = B.b;
  return x[0] * x[0] - a * x[1] * x[1] - b * x[2] * x[2] + a * b * x[3] * x[3];
}

mpq_class trd(const quat& x) { return 2 * x[0]; }

quat qinv(const quat_algebra& B, const quat& x) {
  mpq_class n = nrd(B, x);
  if (n == 0) throw arith_error("qinv: zero");
  return qscale(qconj(x), 1 / n);
}

// ---------- lattices ----------

quat_lattice quat_lattice::from_generators(const std::vector<quat>& gens) {
  mpz_class den = 1;
  for (auto& g : gens)
    for (auto& c : g) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<row4z> r;
  r.reserve(gens.size());
  for (auto& g : gens) {
    row4z v;
    bool nz = false;
    for (int k = 0; k < 4; ++k) {
      mpq_class t = g[k] * den;
      v[k] = t.get_num();
      if (v[k] != 0) nz = true;
    }
    if (nz) r.push_back(v);
  }
  quat_lattice L;
  L.rows = hnf(std::move(r));
  mpz_class g = den;
  for (auto& row : L.rows)
    for (auto& c : row) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g != 1) {
    den /= g;
    for (auto& row : L.rows)
      for (auto& c : row) c /= g;
  }
  L.den = den;
  return L;
}

quat quat_lattice::basis(int k) const {
  quat q;
  for (int i = 0; i < 4; ++i) {
    q[i] = mpq_class(rows[k][i], den);
    q[i].canonicalize();
  }
  return q;
}

std::vector<quat> quat_lattice::basis() const { return {basis(0), basis(1), basis(2), basis(3)}; }

std::optional<std::array<mpz_class, 4>> quat_lattice::coords(const quat& x) const {
  row4z v;
  for (int k = 0; k < 4; ++k) {
    mpq_class t = x[k] * den;
    if (t.get_den() != 1) return std::nullopt;
    v[k] = t.get_num();
  }
  std::array<mpz_class, 4> c;
  for (int j = 0; j < 4; ++j) {
    if (!mpz_divisible_p(v[j].get_mpz_t(), rows[j][j].get_mpz_t())) return std::nullopt;
    c[j] = v[j] / rows[j][j];
    for (int k = j; k < 4; ++k) v[k] -= c[j] * rows[j][k];
  }
  return c;
}

bool quat_lattice::contains(const quat& x) const { return coords(x).has_value(); }

mpq_class quat_lattice::volume() const {
  mpz_class p = 1;
  for (int j = 0; j < 4; ++j) p *= rows[j][j];
  mpz_class d4 = den * den * den * den;
  mpq_class v(p, d4);
  v.canonicalize();
  return v;
}

std::string quat_lattice::key() const {
  std::string s = den.get_str();
  for (auto& r : rows)
    for (auto& c : r) { s += ','; s += c.get_str(); }
  return s;
}

quat_lattice lattice_sum(const quat_lattice& x, const quat_lattice& y) {
  auto g = x.basis();
  auto h = y.basis();
  g.insert(g.end(), h.begin(), h.end());
  return quat_lattice::from_generators(g);
}

quat_lattice lattice_intersection(const quat_lattice& x, const quat_lattice& y) {
  return dual(lattice_sum(dual(x), dual(y)));
}

quat_lattice lattice_product(const quat_algebra& B, const quat_lattice& x, const quat_lattice& y) {
  std::vector<quat> g;
  g.reserve(16);
  auto bx = x.basis(), by = y.basis();
  for (auto& u : bx)
    for (auto& v : by) g.push_back(qmul(B, u, v));
  return quat_lattice::from_generators(g);
}

quat_lattice lattice_conj(const quat_lattice& x) {
  std::vector<quat> g;
  for (auto& u : x.basis()) g.push_back(qconj(u));
  return quat_lattice::from_generators(g);
}

quat_lattice lattice_scale(const quat_lattice& x, const mpq_class& s) {
  std::vector<quat> g;
  for (auto& u : x.basis()) g.push_back(qscale(u, s));
  return quat_lattice::from_generators(g);
}

quat_lattice lattice_right_mul(const quat_algebra& B, const quat_lattice& x, const quat& a) {
  std::vector<quat> g;
  for (auto& u : x.basis()) g.push_back(qmul(B, u, a));
  return quat_lattice::from_generators(g);
}

quat_lattice lattice_left_mul(const quat_algebra& B, const quat& a, const quat_lattice& x) {
  std::vector<quat> g;
  for (auto& u : x.basis()) g.push_back(qmul(B, a, u));
  return quat_lattice::from_generators(g);
}

// O_L(I) = intersection of I b^-1 over a basis b of I
quat_lattice left_order(const quat_algebra& B, const quat_lattice& I) {
  auto bs = I.basis();
  quat_lattice r = lattice_right_mul(B, I, qinv(B, bs[0]));
  for (int j = 1; j < 4; ++j) r = lattice_intersection(r, lattice_right_mul(B, I, qinv(B, bs[j])));
  return r;
}

quat_lattice right_order(const quat_algebra& B, const quat_lattice& I) {
  auto bs = I.basis();
  quat_lattice r = lattice_left_mul(B, qinv(B, bs[0]), I);
  for (int j = 1; j < 4; ++j) r = lattice_intersection(r, lattice_left_mul(B, qinv(B, bs[j]), I));
  return r;
}

std::array<std::array<mpq_class, 4>, 4> norm_gram(const quat_algebra& B, const quat_lattice& L) {
  auto bs = L.basis();
  mat4q G;
  for (int i = 0; i < 4; ++i) G[i][i] = nrd(B, bs[i]);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      G[i][j] = (nrd(B, qadd(bs[i], bs[j])) - G[i][i] - G[j][j]) / 2;
      G[j][i] = G[i][j];
    }
  return G;
}

mpz_class reduced_discriminant(const quat_algebra& B, const quat_lattice& O) {
  mpq_class d = sqrt_q(16 * det4(norm_gram(B, O)));
  if (d.get_den() != 1) throw arith_error("reduced_discriminant: not integral");
  return d.get_num();
}

bool is_order(const quat_algebra& B, const quat_lattice& L) {
  if (!L.contains(qone())) return false;
  auto bs = L.basis();
  for (auto& u : bs) {
    if (trd(u).get_den() != 1 || nrd(B, u).get_den() != 1) return false;
    for (auto& v : bs)
      if (!L.contains(qmul(B, u, v))) return false;
  }
  return true;
}

// ---------- short vectors ----------

std::vector<quat> short_vectors(const quat_algebra& B, const quat_lattice& L, const mpq_class& bound) {
  std::vector<quat> out;
  if (bound <= 0) return out;
  mat4q Gq = norm_gram(B, L);
  mpz_class s = 1;
  for (auto& r : Gq)
    for (auto& x : r) mpz_lcm(s.get_mpz_t(), s.get_mpz_t(), x.get_den_mpz_t());
  std::array<std::array<mpz_class, 4>, 4> G0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) G0[i][j] = mpq_class(Gq[i][j] * s).get_num();
  mpq_class cb = bound * s;
  mpz_class C;
  mpz_fdiv_q(C.get_mpz_t(), cb.get_num_mpz_t(), cb.get_den_mpz_t());

  // LLL on the Gram matrix; U rows are the reduced basis in original coordinates
  std::array<std::array<mpz_class, 4>, 4> U;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) U[i][j] = (i == j) ? 1 : 0;
  auto gram_of = [&](std::array<std::array<mpz_class, 4>, 4>& G) {
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        mpz_class t = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) t += U[i][a] * G0[a][b] * U[j][b];
        G[i][j] = t;
      }
  };
  auto gso = [&](const std::array<std::array<mpz_class, 4>, 4>& G, mat4q& mu, std::array<mpq_class, 4>& Bs) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < i; ++j) {
        mpq_class t = G[i][j];
        for (int k = 0; k < j; ++k) t -= mu[j][k] * mu[i][k] * Bs[k];
        mu[i][j] = t / Bs[j];
      }
      mpq_class t = G[i][i];
      for (int k = 0; k < i; ++k) t -= mu[i][k] * mu[i][k] * Bs[k];
      Bs[i] = t;
    }
  };
  std::array<std::array<mpz_class, 4>, 4> G;
  mat4q mu;
  std::array<mpq_class, 4> Bs;
  int k = 1;
  int guard = 0;
  while (k < 4) {
    if (++guard > 100000) throw arith_error("LLL did not terminate");
    gram_of(G);
    gso(G, mu, Bs);
    bool changed = false;
    for (int j = k - 1; j >= 0; --j) {
      gram_of(G);
      gso(G, mu, Bs);
      mpz_class r = round_q(mu[k][j]);
      if (r != 0) {
        for (int a = 0; a < 4; ++a) U[k][a] -= r * U[j][a];
        changed = true;
      }
    }
    if (changed) {
      gram_of(G);
      gso(G, mu, Bs);
    }
    if (Bs[k] >= (mpq_class(3, 4) - mu[k][k - 1] * mu[k][k - 1]) * Bs[k - 1]) {
      ++k;
    } else {
      std::swap(U[k], U[k - 1]);
      k = std::max(k - 1, 1);
    }
  }
  gram_of(G);

  // Fincke-Pohst in long double, exact recheck
  long double q[4][4] = {};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) q[i][j] = G[i][j].get_d();
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      q[j][i] = q[i][j];
      q[i][j] = q[i][j] / q[i][i];
    }
    for (int a = i + 1; a < 4; ++a)
      for (int b = a; b < 4; ++b) q[a][b] -= q[a][i] * q[i][b];
  }
  long double Cd = C.get_d();
  long double T0 = Cd * (1 + 1e-12L) + 1e-6L;
  std::array<long, 4> x{};
  std::function<void(int, long double)> rec = [&](int i, long double T) {
    long double c = 0;
    for (int j = i + 1; j < 4; ++j) c -= q[i][j] * x[j];
    long double r = std::sqrt(std::max<long double>(T, 0) / q[i][i]);
    long lo = static_cast<long>(std::ceil(c - r - 1e-9L)), hi = static_cast<long>(std::floor(c + r + 1e-9L));
    for (long v = lo; v <= hi; ++v) {
      x[i] = v;
      long double d = v - c;
      long double T2 = T - q[i][i] * d * d;
      if (T2 < -1e-6L * (1 + Cd)) continue;
      if (i > 0) {
        rec(i - 1, T2);
      } else {
        bool nz = false;
        for (long t : x) nz = nz || t != 0;
        if (!nz) continue;
        mpz_class val = 0;
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) val += G[a][b] * x[a] * x[b];
        if (val <= 0 || val > C) continue;
        quat e{0, 0, 0, 0};
        auto bs = L.basis();
        for (int a = 0; a < 4; ++a) {
          mpz_class co = 0;
          for (int t = 0; t < 4; ++t) co += U[t][a] * x[t];
          if (co != 0) e = qadd(e, qscale(bs[a], mpq_class(co)));
        }
        out.push_back(e);
      }
    }
  };
  rec(3, T0);
  return out;
}

// ---------- orders ----------

namespace {

// try to enlarge O at p; returns the larger order or nullopt
std::optional<quat_lattice> enlarge_at(const quat_algebra& B, const quat_lattice& O, i64 p, const mpz_class& maxindex) {
  auto bs = O.basis();
  std::array<i64, 4> tr{};
  for (int k = 0; k < 4; ++k) tr[k] = mod_i(trd(bs[k]).get_num(), p);
  mpq_class volO = O.volume();
  std::array<i64, 4> c{};
  mpz_class p2 = mpz_class(p) * p;
  for (i64 idx = 1; idx < ipow(p, 4); ++idx) {
    i64 t = idx;
    for (int k = 0; k < 4; ++k) { c[k] = t % p; t /= p; }
    i64 tt = 0;
    for (int k = 0; k < 4; ++k) tt = (tt + c[k] * tr[k]) % p;
    if (tt != 0) continue;
    quat y{0, 0, 0, 0};
    for (int k = 0; k < 4; ++k)
      if (c[k]) y = qadd(y, qscale(bs[k], c[k]));
    mpq_class n = nrd(B, y);
    if (n.get_den() != 1 || !mpz_divisible_p(n.get_num_mpz_t(), p2.get_mpz_t())) continue;
    quat x = qscale(y, mpq_class(1, p));
    auto gens = bs;
    gens.push_back(x);
    quat_lattice L = quat_lattice::from_generators(gens);
    bool ok = true;
    for (int it = 0; it < 16; ++it) {
      mpq_class idxq = volO / L.volume();
      if (idxq.get_den() != 1 || idxq.get_num() > maxindex) { ok = false; break; }
      auto lb = L.basis();
      std::vector<quat> g = lb;
      for (auto& u : lb)
        for (auto& v : lb) g.push_back(qmul(B, u, v));
      quat_lattice L2 = quat_lattice::from_generators(g);
      if (L2 == L) break;
      L = L2;
    }
    if (!ok) continue;
    mpq_class idxq = volO / L.volume();
    if (idxq.get_den() != 1 || idxq.get_num() > maxindex || idxq == 1) continue;
    if (!is_order(B, L)) continue;
    return L;
  }
  return std::nullopt;
}

}  // namespace

eichler_order maximal_order(const quat_algebra& B) {
  quat_lattice O = quat_lattice::from_generators({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}});
  for (;;) {
    mpz_class d = reduced_discriminant(B, O);
    if (d == B.disc) break;
    if (!mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(B.disc)))
      throw arith_error("maximal_order: discriminant mismatch");
    mpz_class r = d / B.disc;
    i64 p = factor(r.get_si()).front().p;
    auto L = enlarge_at(B, O, p, r);
    if (!L) throw arith_error("maximal_order: no enlargement found");
    O = *L;
  }
  return {B, 1, O, O, {}};
}

eichler_order make_eichler_order(const eichler_order& Omax, i64 N) {
  const auto& B = Omax.alg;
  if (N < 1 || std::gcd(N, B.disc) != 1) throw arith_error("eichler_order: level must be coprime to disc");
  if (Omax.level != 1) throw arith_error("eichler_order: need a maximal order");
  const quat_lattice& O = Omax.order;
  eichler_order E{B, N, O, O, {}};
  auto bs = O.basis();
  for (auto& f : factor(N)) {
    i64 q = f.p, qe = ipow(q, f.e);
    quat x;
    bool found = false;
    for (i64 idx = 1; idx < ipow(q, 4) && !found; ++idx) {
      i64 t = idx;
      quat y{0, 0, 0, 0};
      for (int k = 0; k < 4; ++k) {
        if (t % q) y = qadd(y, qscale(bs[k], t % q));
        t /= q;
      }
      if (mod_i(nrd(B, y).get_num(), q) == 0) { x = y; found = true; }
    }
    if (!found) throw arith_error("eichler_order: no zero divisor mod q");
    i64 qk = q;
    for (int k = 1; k < f.e; ++k) {
      mpz_class m = nrd(B, x).get_num() / qk;
      int yi = -1;
      i64 T = 0;
      for (int j = 0; j < 4; ++j) {
        T = mod_i(trd(qmul(B, x, qconj(bs[j]))).get_num(), q);
        if (T) { yi = j; break; }
      }
      if (yi < 0) throw arith_error("eichler_order: degenerate lift");
      i64 s = mod_i(-m * inv_mod(T, q), q);
      x = qadd(x, qscale(bs[yi], mpz_class(qk) * s));
      qk *= q;
    }
    std::vector<quat> g;
    for (auto& e : bs) {
      g.push_back(qmul(B, e, x));
      g.push_back(qscale(e, qe));
    }
    quat_lattice I = quat_lattice::from_generators(g);
    E.connecting.push_back({qe, I});
    E.order = lattice_intersection(E.order, right_order(B, I));
  }
  if (reduced_discriminant(B, E.order) != mpz_class(B.disc) * N)
    throw arith_error("eichler_order: discriminant check failed");
  return E;
}

eichler_order eichler_order_for(i64 Dhat, i64 N) { return make_eichler_order(maximal_order(build_algebra(Dhat)), N); }

// ---------- ideals ----------

mpq_class ideal_norm(const quat_algebra&, const quat_lattice& I, const quat_lattice& O) {
  return sqrt_q(I.volume() / O.volume());
}

std::optional<quat> ideal_isomorphism(const quat_algebra& B, const quat_lattice& I, const quat_lattice& J,
                                      const quat_lattice& O) {
  mpq_class nI = ideal_norm(B, I, O), nJ = ideal_norm(B, J, O);
  quat_lattice K = lattice_product(B, lattice_conj(I), J);
  mpq_class target = nI * nJ;
  for (auto& g : short_vectors(B, K, target)) {
    if (nrd(B, g) != target) continue;
    quat a = qscale(g, 1 / nI);
    if (lattice_right_mul(B, I, a) == J) return a;
  }
  return std::nullopt;
}

bool ideal_isomorphic(const quat_algebra& B, const quat_lattice& I, const quat_lattice& J, const quat_lattice& O) {
  return ideal_isomorphism(B, I, J, O).has_value();
}

std::vector<quat> unit_group(const quat_algebra& B, const quat_lattice& O) { return short_vectors(B, O, 1); }

int unit_half_order(const quat_algebra& B, const quat_lattice& O) {
  int n = static_cast<int>(unit_group(B, O).size()) / 2;
  if (n != 1 && n != 2 && n != 3 && n != 6 && n != 12) throw arith_error("unit_half_order: impossible unit group");
  return n;
}

std::vector<quat_lattice> p_neighbors(const quat_algebra& B, const quat_lattice& I, i64 p) {
  quat_lattice Or = right_order(B, I);
  mpz_class d = reduced_discriminant(B, Or);
  if (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p)))
    throw arith_error("p_neighbors: p divides the discriminant");
  auto bs = Or.basis();
  quat eps;
  bool found = false;
  for (i64 idx = 1; idx < ipow(p, 4) && !found; ++idx) {
    i64 t = idx;
    quat y{0, 0, 0, 0};
    for (int k = 0; k < 4; ++k) {
      if (t % p) y = qadd(y, qscale(bs[k], t % p));
      t /= p;
    }
    i64 tr = mod_i(trd(y).get_num(), p);
    if (tr == 0 || mod_i(nrd(B, y).get_num(), p) != 0) continue;
    eps = qscale(y, inv_mod(tr, p));
    found = true;
  }
  if (!found) throw arith_error("p_neighbors: no idempotent");
  quat one_m = qsub(qone(), eps);
  quat e12;
  found = false;
  for (auto& e : bs) {
    quat z = qmul(B, qmul(B, eps, e), one_m);
    auto c = Or.coords(z);
    bool zero = true;
    for (auto& ci : *c) zero = zero && mod_i(ci, p) == 0;
    if (!zero) { e12 = z; found = true; break; }
  }
  if (!found) throw arith_error("p_neighbors: no nilpotent");
  auto ib = I.basis();
  std::vector<quat_lattice> out;
  for (i64 t = 0; t <= p; ++t) {
    // (1:t) for t < p, then (0:1)
    quat x = (t < p) ? qsub(qscale(eps, t), e12) : eps;
    std::vector<quat> g;
    for (auto& u : ib) {
      g.push_back(qmul(B, u, x));
      g.push_back(qscale(u, p));
    }
    out.push_back(quat_lattice::from_generators(g));
  }
  mpq_class idx2 = mpz_class(p) * p;
  for (auto& J : out)
    if (J.volume() / I.volume() != idx2) throw arith_error("p_neighbors: wrong index");
  return out;
}

ideal_class_set ideal_classes(const eichler_order& E) {
  const auto& B = E.alg;
  i64 p0 = 2;
  while ((B.disc * E.level) % p0 == 0) do ++p0; while (!is_prime(p0));
  ideal_class_set C;
  C.ideals.push_back(E.order);
  std::deque<size_t> todo{0};
  while (!todo.empty()) {
    size_t c = todo.front();
    todo.pop_front();
    for (auto& J : p_neighbors(B, C.ideals[c], p0)) {
      bool seen = false;
      for (auto& K : C.ideals)
        if (ideal_isomorphic(B, K, J, E.order)) { seen = true; break; }
      if (!seen) {
        C.ideals.push_back(J);
        todo.push_back(C.ideals.size() - 1);
      }
    }
  }
  for (auto& I : C.ideals) C.right_orders.push_back(right_order(B, I));
  mpq_class mass = class_mass(B, C);
  mpq_class want(euler_phi(B.disc) * dedekind_psi(E.level), 12);
  want.canonicalize();
  if (mass != want) throw arith_error("ideal_classes: mass formula failed");
  return C;
}

mpq_class class_mass(const quat_algebra& B, const ideal_class_set& C) {
  mpq_class m = 0;
  for (auto& O : C.right_orders) m += mpq_class(1, unit_half_order(B, O));
  return m;
}

quat_lattice al_ideal(const eichler_order& E, i64 m) {
  const auto& B = E.alg;
  i64 DN = B.disc * E.level;
  if (m < 1 || DN % m != 0 || std::gcd(m, DN / m) != 1) throw arith_error("al_ideal: m must be a Hall divisor");
  quat_lattice b = E.order;
  auto bs = E.order.basis();
  for (auto& f : factor(m)) {
    i64 q = f.p;
    quat_lattice bq;
    if (B.disc % q == 0) {
      quat x;
      bool found = false;
      for (i64 idx = 1; idx < ipow(q, 4) && !found; ++idx) {
        i64 t = idx;
        quat y{0, 0, 0, 0};
        for (int k = 0; k < 4; ++k) {
          if (t % q) y = qadd(y, qscale(bs[k], t % q));
          t /= q;
        }
        if (mod_i(nrd(B, y).get_num(), q) == 0) { x = y; found = true; }
      }
      if (!found) throw arith_error("al_ideal: no element of norm divisible by q");
      std::vector<quat> g;
      for (auto& e : bs) {
        g.push_back(qmul(B, e, x));
        g.push_back(qscale(e, q));
      }
      bq = quat_lattice::from_generators(g);
    } else {
      const quat_lattice* I = nullptr;
      for (auto& [qe, L] : E.connecting)
        if (qe % q == 0) I = &L;
      if (!I) throw arith_error("al_ideal: missing connecting ideal");
      bq = lattice_intersection(lattice_intersection(*I, lattice_conj(*I)), E.order);
    }
    b = lattice_intersection(b, bq);
  }
  if (!(lattice_product(B, b, b) == lattice_scale(E.order, m))) throw arith_error("al_ideal: b^2 != mO");
  return b;
}

class_action al_class_action(const eichler_order& E, const ideal_class_set& C, i64 m) {
  const auto& B = E.alg;
  quat_lattice b = al_ideal(E, m);
  class_action A;
  for (auto& I : C.ideals) {
    quat_lattice K = lattice_product(B, b, I);
    bool found = false;
    for (size_t c = 0; c < C.ideals.size(); ++c) {
      auto a = ideal_isomorphism(B, C.ideals[c], K, E.order);
      if (a) {
        A.perm.push_back(static_cast<int>(c));
        A.elt.push_back(*a);
        found = true;
        break;
      }
    }
    if (!found) throw arith_error("al_class_action: class not found");
  }
  return A;
}

std::string lattice_json(const quat_algebra& B, const quat_lattice& L) {
  nlohmann::json j;
  j["den"] = L.den.get_str();
  nlohmann::json rows = nlohmann::json::array();
  for (auto& r : L.rows) {
    nlohmann::json row = nlohmann::json::array();
    for (auto& c : r) row.push_back(c.get_str());
    rows.push_back(row);
  }
  j["basis"] = rows;
  nlohmann::json gram = nlohmann::json::array();
  for (auto& r : norm_gram(B, L)) {
    nlohmann::json row = nlohmann::json::array();
    for (auto& c : r) row.push_back(c.get_str());
    gram.push_back(row);
  }
  j["norm_form"] = gram;
  return j.dump();
}

}  // namespace shimura
