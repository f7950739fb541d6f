#pragma once

#include <array>
#include <gmpxx.h>
#include <optional>
#include <string>
#include <vector>

#include "shimura/arith.hpp"

namespace shimura {

// i^2 = a, j^2 = b, k = ij
struct quat_algebra {
  i64 a, b;
  i64 disc;  // product of the finite ramified primes
};

using quat = std::array<mpq_class, 4>;

int hilbert_symbol(i64 a, i64 b, i64 p);  // p = 0 means the real place
std::vector<i64> ramified_primes(i64 a, i64 b);
quat_algebra build_algebra(i64 Dhat);

quat qmul(const quat_algebra& B, const quat& x, const quat& y);
quat qconj(const quat& x);
quat qadd(const quat& x, const quat& y);
quat qsub(const quat& x, const quat& y);
quat qscale(const quat& x, const mpq_class& s);
quat qinv(const quat_algebra& B, const quat& x);
mpq_class nrd(const quat_algebra& B, const quat& x);
mpq_class trd(const quat& x);
quat qone();

// full-rank lattice: rows of `rows` divided by den, rows in Hermite normal form
struct quat_lattice {
  std::array<std::array<mpz_class, 4>, 4> rows;
  mpz_class den;

  static quat_lattice from_generators(const std::vector<quat>& gens);
  quat basis(int k) const;
  std::vector<quat> basis() const;
  bool contains(const quat& x) const;
  std::optional<std::array<mpz_class, 4>> coords(const quat& x) const;
  mpq_class volume() const;  // |det| of the basis
  std::string key() const;
  bool operator==(const quat_lattice& o) const { return den == o.den && rows == o.rows; }
  bool operator<(const quat_lattice& o) const { return key() < o.key(); }
};

quat_lattice lattice_sum(const quat_lattice& x, const quat_lattice& y);
quat_lattice lattice_intersection(const quat_lattice& x, const quat_lattice& y);
quat_lattice lattice_product(const quat_algebra& B, const quat_lattice& x, const quat_lattice& y);
quat_lattice lattice_conj(const quat_lattice& x);
quat_lattice lattice_scale(const quat_lattice& x, const mpq_class& s);
quat_lattice lattice_right_mul(const quat_algebra& B, const quat_lattice& x, const quat& a);
quat_lattice lattice_left_mul(const quat_algebra& B, const quat& a, const quat_lattice& x);
quat_lattice left_order(const quat_algebra& B, const quat_lattice& I);
quat_lattice right_order(const quat_algebra& B, const quat_lattice& I);

// Gram matrix of the reduced norm: nrd(sum c_i e_i) = c^T G c
std::array<std::array<mpq_class, 4>, 4> norm_gram(const quat_algebra& B, const quat_lattice& L);
mpz_class reduced_discriminant(const quat_algebra& B, const quat_lattice& O);
bool is_order(const quat_algebra& B, const quat_lattice& L);

// all x in L with 0 < nrd(x) <= bound
std::vector<quat> short_vectors(const quat_algebra& B, const quat_lattice& L, const mpq_class& bound);

struct eichler_order {
  quat_algebra alg;
  i64 level;
  quat_lattice order;
  quat_lattice maximal;  // a maximal order containing it
  // connecting ideal of norm q^e for each q^e || level, left ideal of `maximal`
  std::vector<std::pair<i64, quat_lattice>> connecting;
};

eichler_order maximal_order(const quat_algebra& B);
eichler_order make_eichler_order(const eichler_order& Omax, i64 N);
eichler_order eichler_order_for(i64 Dhat, i64 N);

// norm of a left ideal relative to its left order O
mpq_class ideal_norm(const quat_algebra& B, const quat_lattice& I, const quat_lattice& O);

// J = I * alpha for some alpha; the alpha is returned
std::optional<quat> ideal_isomorphism(const quat_algebra& B, const quat_lattice& I, const quat_lattice& J,
                                      const quat_lattice& O);
bool ideal_isomorphic(const quat_algebra& B, const quat_lattice& I, const quat_lattice& J, const quat_lattice& O);

std::vector<quat> unit_group(const quat_algebra& B, const quat_lattice& O);
int unit_half_order(const quat_algebra& B, const quat_lattice& O);

struct ideal_class_set {
  std::vector<quat_lattice> ideals;       // left ideals of the order
  std::vector<quat_lattice> right_orders;
};

ideal_class_set ideal_classes(const eichler_order& E);
mpq_class class_mass(const quat_algebra& B, const ideal_class_set& C);

// the p+1 left ideals J of index p^2 in I with pI in J
std::vector<quat_lattice> p_neighbors(const quat_algebra& B, const quat_lattice& I, i64 p);

// two-sided ideal b with b^2 = m O for a Hall divisor m of disc * level
quat_lattice al_ideal(const eichler_order& E, i64 m);

struct class_action {
  std::vector<int> perm;   // class c goes to perm[c]
  std::vector<quat> elt;   // b I_c = I_{perm[c]} elt[c]
};

class_action al_class_action(const eichler_order& E, const ideal_class_set& C, i64 m);

std::string lattice_json(const quat_algebra& B, const quat_lattice& L);

}  // namespace shimura
