#pragma once

#include <array>
#include <gmpxx.h>
#include <map>
#include <string>
#include <vector>

#include "shimura/arith.hpp"

namespace shimura {

// y^2 = x^3 + A x + B
struct short_weierstrass {
  mpq_class A, B;
  bool operator==(const short_weierstrass&) const = default;
};

// y^2 = f(x), coefficients from the constant term up
struct hyperelliptic_model {
  std::vector<mpq_class> f;
  int degree = 0;  // declared degree, 4 or 6
  bool operator==(const hyperelliptic_model& o) const { return degree == o.degree && f == o.f; }
  bool operator<(const hyperelliptic_model& o) const;
  mpq_class coeff(int k) const { return k < static_cast<int>(f.size()) ? f[k] : mpq_class(0); }
};

struct mw_representative {
  mpq_class a, b;
};

using poly_q = std::vector<mpq_class>;  // low degree first

poly_q poly_trim(poly_q p);
mpq_class poly_eval(const poly_q& p, const mpq_class& x);
std::vector<mpq_class> rational_roots(const poly_q& p);
int real_root_count(const poly_q& p);  // distinct real roots, by Sturm sequences

mpq_class discriminant_sw(const short_weierstrass& E);
mpq_class j_invariant(const short_weierstrass& E);
short_weierstrass twist_curve(const short_weierstrass& E, const mpq_class& d);
hyperelliptic_model twist_quartic(const mw_representative& rep, const short_weierstrass& E, const mpq_class& d);

// rational solutions (a, b), a != 0, of the bielliptic system, expanded to y^2 = a x^6 + b x^4 + c x^2 + d
std::vector<hyperelliptic_model> bielliptic_candidates(const short_weierstrass& E1, const short_weierstrass& E2);
// the two elliptic quotients y^2 = a t^3 + b t^2 + c t + d and y^2 = d t^3 + c t^2 + b t + a
std::array<short_weierstrass, 2> bielliptic_quotients(const hyperelliptic_model& H);

bool real_solvable(const hyperelliptic_model& H);
struct precision_error : arith_error {
  using arith_error::arith_error;
};
bool qp_solvable(const hyperelliptic_model& H, i64 p);

// long Weierstrass data
using a_invariants = std::array<mpq_class, 5>;  // a1 a2 a3 a4 a6
struct c_invariants {
  mpq_class c4, c6, disc;
};
c_invariants c_invs(const a_invariants& a);
short_weierstrass short_model(const a_invariants& a);  // (-27 c4, -54 c6)
a_invariants minimal_model(const a_invariants& a);     // global minimal, reduced a1, a2, a3
i64 tate_In(const a_invariants& a, i64 p);

// members whose symbols match at every listed prime
template <class Curve>
std::vector<Curve> isogeny_In_filter(const std::map<i64, i64>& symbols, const std::vector<Curve>& members) {
  std::vector<Curve> out;
  for (auto& c : members) {
    bool ok = true;
    for (auto& [p, n] : symbols)
      if (tate_In(c.ai, p) != n) { ok = false; break; }
    if (ok) out.push_back(c);
  }
  return out;
}
// I_n -> I_{ln} or I_{n/l} across an l-isogeny
bool isogeny_transition_ok(i64 n, i64 n2, i64 l);

std::string render(const hyperelliptic_model& H);
std::string render(const short_weierstrass& E);
std::string model_json(const hyperelliptic_model& H);

}  // namespace shimura
