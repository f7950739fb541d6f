#include "shimura/equations.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include <json.hpp>

namespace shimura {

namespace {

int vq(const mpz_class& x, i64 p) {
  if (x == 0) return 1 << 30;
  mpz_class t = x;
  int v = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), static_cast<unsigned long>(p))) {
    t /= p;
    ++v;
  }
  return v;
}

int vq(const mpq_class& x, i64 p) {
  if (x == 0) return 1 << 30;
  return vq(x.get_num(), p) - vq(x.get_den(), p);
}

poly_q padd(const poly_q& a, const poly_q& b) {
  poly_q r(std::max(a.size(), b.size()));
  for (size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return poly_trim(r);
}

poly_q pscale(const poly_q& a, const mpq_class& s) {
  poly_q r = a;
  for (auto& c : r) c *= s;
  return poly_trim(r);
}

poly_q pmul(const poly_q& a, const poly_q& b) {
  if (a.empty() || b.empty()) return {};
  poly_q r(a.size() + b.size() - 1);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return poly_trim(r);
}

poly_q pderiv(const poly_q& a) {
  poly_q r;
  for (size_t i = 1; i < a.size(); ++i) r.push_back(a[i] * static_cast<long>(i));
  return poly_trim(r);
}

poly_q prem(poly_q a, const poly_q& b, poly_q* quo = nullptr) {
  if (b.empty()) throw arith_error("polynomial division by zero");
  poly_q q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0);
  while (!a.empty() && a.size() >= b.size()) {
    mpq_class c = a.back() / b.back();
    size_t sh = a.size() - b.size();
    q[sh] = c;
    for (size_t i = 0; i < b.size(); ++i) a[sh + i] -= c * b[i];
    a = poly_trim(a);
  }
  if (quo) *quo = poly_trim(q);
  return a;
}

poly_q pgcd(poly_q a, poly_q b) {
  while (!b.empty()) {
    poly_q r = prem(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) a = pscale(a, 1 / a.back());
  return a;
}

int sgn_at_inf(const poly_q& p, bool neg) {
  if (p.empty()) return 0;
  int s = sgn(p.back());
  if (neg && (p.size() - 1) % 2 == 1) s = -s;
  return s;
}

std::vector<poly_q> sturm_chain(const poly_q& f) {
  std::vector<poly_q> s{f, pderiv(f)};
  while (!s.back().empty()) {
    poly_q r = prem(s[s.size() - 2], s.back());
    if (r.empty()) break;
    s.push_back(pscale(r, -1));
  }
  return s;
}

int sign_changes(const std::vector<poly_q>& s, const mpq_class& x) {
  int n = 0, last = 0;
  for (auto& p : s) {
    int v = sgn(poly_eval(p, x));
    if (v == 0) continue;
    if (last && v != last) ++n;
    last = v;
  }
  return n;
}

int sign_changes_inf(const std::vector<poly_q>& s, bool neg) {
  int n = 0, last = 0;
  for (auto& p : s) {
    int v = sgn_at_inf(p, neg);
    if (v == 0) continue;
    if (last && v != last) ++n;
    last = v;
  }
  return n;
}

poly_q squarefree_part(const poly_q& f) {
  poly_q g = pgcd(f, pderiv(f));
  if (g.size() <= 1) return f;
  poly_q q;
  prem(f, g, &q);
  return q;
}

std::string qstr(const mpq_class& x) { return x.get_str(); }

}  // namespace

bool hyperelliptic_model::operator<(const hyperelliptic_model& o) const {
  if (degree != o.degree) return degree < o.degree;
  for (int k = std::max(degree, o.degree); k >= 0; --k)
    if (coeff(k) != o.coeff(k)) return coeff(k) < o.coeff(k);
  return false;
}

poly_q poly_trim(poly_q p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

mpq_class poly_eval(const poly_q& p, const mpq_class& x) {
  mpq_class r = 0;
  for (size_t i = p.size(); i-- > 0;) r = r * x + p[i];
  return r;
}

int real_root_count(const poly_q& p0) {
  poly_q p = poly_trim(p0);
  if (p.empty()) throw arith_error("real_root_count: zero polynomial");
  if (p.size() == 1) return 0;
  auto s = sturm_chain(squarefree_part(p));
  return sign_changes_inf(s, true) - sign_changes_inf(s, false);
}

std::vector<mpq_class> rational_roots(const poly_q& p0) {
  poly_q p = poly_trim(p0);
  if (p.empty()) throw arith_error("rational_roots: zero polynomial");
  std::vector<mpq_class> out;
  size_t z = 0;
  while (z < p.size() && p[z] == 0) ++z;
  if (z > 0) {
    out.push_back(0);
    p.erase(p.begin(), p.begin() + static_cast<long>(z));
  }
  size_t n = p.size() - 1;
  if (n == 0) return out;
  // primitive integer polynomial, then y = lc * x makes it monic
  mpz_class den = 1;
  for (auto& c : p) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> a(n + 1);
  for (size_t i = 0; i <= n; ++i) a[i] = mpq_class(p[i] * den).get_num();
  mpz_class lc = a[n];
  if (lc < 0) {
    for (auto& c : a) c = -c;
    lc = -lc;
  }
  poly_q g(n + 1);
  mpz_class lp = 1;
  for (size_t i = n; i-- > 0;) {
    g[i] = a[i] * lp;
    lp *= lc;
  }
  g[n] = 1;
  mpz_class M = 1;
  for (size_t i = 0; i < n; ++i) M = std::max(M, mpz_class(abs(g[i].get_num())));
  M += 1;
  auto s = sturm_chain(squarefree_part(g));
  std::vector<std::pair<mpz_class, mpz_class>> todo{{-M - 1, M}};
  while (!todo.empty()) {
    auto [l, r] = todo.back();
    todo.pop_back();
    int cnt = sign_changes(s, l) - sign_changes(s, r);
    if (cnt == 0) continue;
    if (r - l <= 1) {
      if (poly_eval(g, r) == 0) out.push_back(mpq_class(r, lc));
      continue;
    }
    mpz_class mid;
    mpz_class sum = l + r;
    mpz_fdiv_q_2exp(mid.get_mpz_t(), sum.get_mpz_t(), 1);
    todo.push_back({l, mid});
    todo.push_back({mid, r});
  }
  for (auto& x : out) x.canonicalize();
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------- elliptic curves ----------

mpq_class discriminant_sw(const short_weierstrass& E) { return -16 * (4 * E.A * E.A * E.A + 27 * E.B * E.B); }

mpq_class j_invariant(const short_weierstrass& E) {
  mpq_class d = 4 * E.A * E.A * E.A + 27 * E.B * E.B;
  if (d == 0) throw arith_error("j_invariant: singular curve");
  return 1728 * 4 * E.A * E.A * E.A / d;
}

short_weierstrass twist_curve(const short_weierstrass& E, const mpq_class& d) {
  if (d == 0) throw arith_error("twist_curve: d = 0");
  return {E.A * d * d, E.B * d * d * d};
}

hyperelliptic_model twist_quartic(const mw_representative& rep, const short_weierstrass& E, const mpq_class& d) {
  if (d == 0) throw arith_error("twist_quartic: d = 0");
  auto Ed = twist_curve(E, d);
  const mpq_class &a = rep.a, &b = rep.b;
  if (b * b != a * a * a + Ed.A * a + Ed.B) throw arith_error("twist_quartic: point is not on the twist");
  poly_q f{-3 * a * a - 4 * E.A * d * d, 8 * b, -6 * a, 0, 1};
  hyperelliptic_model H;
  for (auto& c : f) H.f.push_back(c * d);
  H.degree = 4;
  return H;
}

std::array<short_weierstrass, 2> bielliptic_quotients(const hyperelliptic_model& H) {
  if (H.degree != 6) throw arith_error("bielliptic_quotients: need a sextic");
  for (int k = 1; k < 6; k += 2)
    if (H.coeff(k) != 0) throw arith_error("bielliptic_quotients: not even");
  auto red = [](const mpq_class& a, const mpq_class& b, const mpq_class& c, const mpq_class& d) {
    // y^2 = a t^3 + b t^2 + c t + d, x = a t + b/3
    return short_weierstrass{a * c - b * b / 3, a * a * d - a * b * c / 3 + 2 * b * b * b / 27};
  };
  mpq_class a = H.coeff(6), b = H.coeff(4), c = H.coeff(2), d = H.coeff(0);
  if (a == 0 || d == 0) throw arith_error("bielliptic_quotients: degenerate sextic");
  return {red(a, b, c, d), red(d, c, b, a)};
}

std::vector<hyperelliptic_model> bielliptic_candidates(const short_weierstrass& E1, const short_weierstrass& E2) {
  if (4 * E1.A * E1.A * E1.A + 27 * E1.B * E1.B == 0 || 4 * E2.A * E2.A * E2.A + 27 * E2.B * E2.B == 0)
    throw arith_error("bielliptic_candidates: singular input");
  const mpq_class &A1 = E1.A, &B1 = E1.B, &A2 = E2.A, &B2 = E2.B;
  // 27 a^3 B2 = P(b), 9 a^2 A2 = R(b)
  poly_q P = poly_trim({2 * A1 * A1 * A1 + 27 * B1 * B1, 9 * A1 * B1, 2 * A1 * A1, -B1});
  poly_q R = poly_trim({-3 * A1 * A1, 9 * B1, A1});
  std::vector<std::pair<mpq_class, mpq_class>> sols;
  auto check = [&](const mpq_class& a, const mpq_class& b) {
    if (a == 0) return;
    if (27 * a * a * a * B2 != poly_eval(P, b) || 9 * a * a * A2 != poly_eval(R, b)) return;
    sols.push_back({a, b});
  };
  if (A2 != 0 && B2 != 0) {
    // B2^2 R^3 = A2^3 P^2
    poly_q el = padd(pscale(pmul(R, pmul(R, R)), B2 * B2), pscale(pmul(P, P), -A2 * A2 * A2));
    if (el.empty()) throw arith_error("bielliptic_candidates: elimination degenerates");
    for (auto& b : rational_roots(el)) {
      mpq_class r = poly_eval(R, b);
      if (r == 0) continue;
      check(poly_eval(P, b) * A2 / (3 * B2 * r), b);
    }
  } else if (A2 == 0) {
    for (auto& b : rational_roots(R)) {
      mpq_class t = poly_eval(P, b) / (27 * B2);
      // rational cube root
      for (auto& a : rational_roots({-t, 0, 0, 1})) check(a, b);
    }
  } else {
    for (auto& b : rational_roots(P)) {
      mpq_class t = poly_eval(R, b) / (9 * A2);
      for (auto& a : rational_roots({-t, 0, 1})) check(a, b);
    }
  }
  std::vector<hyperelliptic_model> out;
  for (auto& [a, b] : sols) {
    mpq_class c = (3 * A1 + b * b) / (3 * a);
    mpq_class d = (27 * B1 + 9 * A1 * b + b * b * b) / (27 * a * a);
    out.push_back({{d, 0, c, 0, b, 0, a}, 6});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------- local solvability ----------

bool real_solvable(const hyperelliptic_model& H) {
  mpq_class lc = H.coeff(H.degree);
  if (lc >= 0) return true;  // real point at infinity
  return real_root_count(H.f) > 0;
}

namespace {

int legendre_mpz(const mpz_class& u, i64 p) {
  mpz_class pp = p;
  return mpz_legendre(u.get_mpz_t(), pp.get_mpz_t());
}

// is some value h(t), t in Z_p, a square in Q_p
bool zp_square_value(std::vector<mpz_class> h, i64 p, int depth, int max_depth) {
  while (!h.empty() && h.back() == 0) h.pop_back();
  if (h.empty()) return true;
  if (h[0] == 0) return true;
  int m = vq(h[0], p);
  int mu = 1 << 30;
  for (size_t i = 1; i < h.size(); ++i) mu = std::min(mu, vq(h[i], p));
  int need = p == 2 ? 3 : 1;
  if (mu >= m + need) {
    if (m % 2) return false;
    mpz_class u = h[0];
    for (int k = 0; k < m; ++k) u /= p;
    if (p == 2) {
      mpz_class r;
      mpz_fdiv_r_ui(r.get_mpz_t(), u.get_mpz_t(), 8);
      return r == 1;
    }
    return legendre_mpz(u, p) == 1;
  }
  // Hensel: a root of h lies in this disc
  if (h.size() > 1 && h[1] != 0 && m > 2 * vq(h[1], p)) return true;
  if (depth >= max_depth) throw precision_error("qp_solvable: precision bound exhausted");
  for (i64 j = 0; j < p; ++j) {
    // h(j + p t)
    size_t n = h.size();
    std::vector<mpz_class> g(h);
    // Taylor shift by j
    for (size_t i = 0; i < n; ++i)
      for (size_t k = n - 1; k > i; --k) g[k - 1] += g[k] * j;
    mpz_class pk = 1;
    for (size_t i = 0; i < n; ++i) {
      g[i] *= pk;
      pk *= p;
    }
    if (zp_square_value(g, p, depth + 1, max_depth)) return true;
  }
  return false;
}

mpz_class poly_discriminant(const std::vector<mpz_class>& f) {
  // resultant(f, f') via Sylvester determinant (fraction-free over Q)
  size_t n = f.size() - 1;
  std::vector<mpz_class> df;
  for (size_t i = 1; i <= n; ++i) df.push_back(f[i] * static_cast<long>(i));
  size_t m = n - 1, S = n + m;
  std::vector<std::vector<mpq_class>> M(S, std::vector<mpq_class>(S, 0));
  for (size_t r = 0; r < m; ++r)
    for (size_t i = 0; i <= n; ++i) M[r][r + i] = f[n - i];
  for (size_t r = 0; r < n; ++r)
    for (size_t i = 0; i <= m; ++i) M[m + r][r + i] = df[m - i];
  mpq_class det = 1;
  for (size_t c = 0; c < S; ++c) {
    size_t piv = S;
    for (size_t r = c; r < S; ++r)
      if (M[r][c] != 0) { piv = r; break; }
    if (piv == S) return 0;
    if (piv != c) { std::swap(M[piv], M[c]); det = -det; }
    det *= M[c][c];
    for (size_t r = c + 1; r < S; ++r) {
      if (M[r][c] == 0) continue;
      mpq_class t = M[r][c] / M[c][c];
      for (size_t k = c; k < S; ++k) M[r][k] -= t * M[c][k];
    }
  }
  return det.get_num();
}

}  // namespace

bool qp_solvable(const hyperelliptic_model& H, i64 p) {
  if (!is_prime(p)) throw arith_error("qp_solvable: p must be prime");
  int d = H.degree;
  mpz_class den = 1;
  for (auto& c : H.f) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<mpz_class> f(d + 1);
  for (int k = 0; k <= d; ++k) f[k] = mpq_class(H.coeff(k) * den * den).get_num();
  std::vector<mpz_class> fa = f;
  while (!fa.empty() && fa.back() == 0) fa.pop_back();
  if (fa.size() < 2) throw arith_error("qp_solvable: constant model");
  mpz_class disc = poly_discriminant(fa);
  if (disc == 0) throw arith_error("qp_solvable: model is singular");
  int k0 = vq(disc, p) + 2 * vq(mpz_class(2), p) + 2;
  if (zp_square_value(f, p, 0, k0)) return true;
  // x = 1 / (p s), s in Z_p, including the points at infinity
  std::vector<mpz_class> r(d + 1);
  mpz_class pk = 1;
  for (int k = 0; k <= d; ++k) {
    r[k] = f[d - k] * pk;
    pk *= p;
  }
  return zp_square_value(r, p, 0, k0);
}

// ---------- long Weierstrass ----------

c_invariants c_invs(const a_invariants& a) {
  const auto &a1 = a[0], &a2 = a[1], &a3 = a[2], &a4 = a[3], &a6 = a[4];
  mpq_class b2 = a1 * a1 + 4 * a2, b4 = 2 * a4 + a1 * a3, b6 = a3 * a3 + 4 * a6;
  mpq_class b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  mpq_class c4 = b2 * b2 - 24 * b4, c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
  mpq_class disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
  return {c4, c6, disc};
}

short_weierstrass short_model(const a_invariants& a) {
  auto c = c_invs(a);
  return {-27 * c.c4, -54 * c.c6};
}

namespace {

// integral model in reduced form with the given invariants, if any
std::optional<a_invariants> from_c4c6(const mpz_class& c4, const mpz_class& c6) {
  for (int a1 = 0; a1 <= 1; ++a1)
    for (int a2 = -1; a2 <= 1; ++a2)
      for (int a3 = 0; a3 <= 1; ++a3) {
        mpz_class b2 = a1 * a1 + 4 * a2;
        mpz_class t = b2 * b2 - c4;
        if (!mpz_divisible_ui_p(t.get_mpz_t(), 24)) continue;
        mpz_class b4 = t / 24;
        mpz_class u = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
        if (!mpz_divisible_ui_p(u.get_mpz_t(), 216)) continue;
        mpz_class b6 = u / 216;
        mpz_class v = b4 - a1 * a3;
        if (!mpz_divisible_ui_p(v.get_mpz_t(), 2)) continue;
        mpz_class w = b6 - a3 * a3;
        if (!mpz_divisible_ui_p(w.get_mpz_t(), 4)) continue;
        return a_invariants{a1, a2, a3, mpq_class(v / 2), mpq_class(w / 4)};
      }
  return std::nullopt;
}

std::vector<mpz_class> prime_divisors(mpz_class n) {
  n = abs(n);
  std::vector<mpz_class> ps;
  for (unsigned long p = 2; p < 10000000UL && mpz_class(p) * p <= n; p += (p == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      ps.push_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    }
  }
  if (n > 1) {
    if (mpz_probab_prime_p(n.get_mpz_t(), 30) == 0) throw arith_error("minimal_model: cannot factor discriminant");
    ps.push_back(n);
  }
  return ps;
}

}  // namespace

a_invariants minimal_model(const a_invariants& a) {
  auto c = c_invs(a);
  if (c.disc == 0) throw arith_error("minimal_model: singular curve");
  // scale to an integral model first
  mpz_class u = 1;
  for (int i = 0; i < 5; ++i) mpz_lcm(u.get_mpz_t(), u.get_mpz_t(), a[i].get_den_mpz_t());
  mpz_class u2 = u * u, u4 = u2 * u2, u6 = u4 * u2;
  mpz_class c4 = mpq_class(c.c4 * u4).get_num(), c6 = mpq_class(c.c6 * u6).get_num();
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), c4.get_mpz_t(), c6.get_mpz_t());
  for (auto& p : prime_divisors(g)) {
    mpz_class p4 = p * p * p * p, p6 = p4 * p * p;
    while (mpz_divisible_p(c4.get_mpz_t(), p4.get_mpz_t()) && mpz_divisible_p(c6.get_mpz_t(), p6.get_mpz_t())) {
      if (!from_c4c6(c4 / p4, c6 / p6)) break;
      c4 /= p4;
      c6 /= p6;
    }
  }
  auto m = from_c4c6(c4, c6);
  if (!m) throw arith_error("minimal_model: no integral model");
  return *m;
}

i64 tate_In(const a_invariants& a, i64 p) {
  auto c = c_invs(minimal_model(a));
  if (vq(c.c4, p) != 0 || vq(c.disc, p) <= 0) throw arith_error("tate_In: reduction is not multiplicative");
  return vq(c.disc, p);
}

bool isogeny_transition_ok(i64 n, i64 n2, i64 l) { return n2 == l * n || n2 * l == n; }

// ---------- output ----------

namespace {

std::string term(const mpq_class& c, const char* var, int k, bool first) {
  std::string s;
  mpq_class a = abs(c);
  if (!first) s += c < 0 ? " - " : " + ";
  else if (c < 0) s += "-";
  bool one = a == 1 && k > 0;
  if (!one) s += a.get_den() == 1 ? a.get_str() : "(" + a.get_str() + ")";
  if (k > 0) s += var;
  if (k > 1) s += "^" + std::to_string(k);
  return s;
}

}  // namespace

std::string render(const hyperelliptic_model& H) {
  std::string s = "y^2 =";
  bool first = true;
  for (int k = H.degree; k >= 0; --k) {
    mpq_class c = H.coeff(k);
    if (c == 0) continue;
    s += first ? " " : "";
    s += term(c, "x", k, first);
    first = false;
  }
  if (first) s += " 0";
  return s;
}

std::string render(const short_weierstrass& E) {
  std::string s = "y^2 = x^3";
  if (E.A != 0) s += term(E.A, "x", 1, false);
  if (E.B != 0) s += term(E.B, "x", 0, false);
  return s;
}

std::string model_json(const hyperelliptic_model& H) {
  nlohmann::json j;
  j["degree"] = H.degree;
  std::vector<std::string> f;
  for (int k = 0; k <= H.degree; ++k) f.push_back(qstr(H.coeff(k)));
  j["f"] = f;
  j["text"] = render(H);
  return j.dump();
}

}  // namespace shimura
