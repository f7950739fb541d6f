#pragma once

#include <functional>
#include <gmpxx.h>
#include <string>
#include <vector>

#include "shimura/arith.hpp"

namespace shimura {

struct shimura_level {
  i64 D;
  i64 N;
};

// throws arith_error unless D is squarefree with an even number >= 2 of primes and gcd(D,N) = 1
void check_level(i64 D, i64 N);
bool valid_level(i64 D, i64 N);

struct embedding_table_incomplete : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// group law on Hall divisors is hall_compose(a, b) = ab / gcd(a,b)^2
struct al_subgroup {
  std::vector<i64> elements;  // sorted, contains 1

  static al_subgroup generated(i64 DN, const std::vector<i64>& gens);
  std::size_t order() const { return elements.size(); }
  bool contains(i64 m) const;
  bool operator==(const al_subgroup&) const = default;
  auto operator<=>(const al_subgroup&) const = default;
};

i64 e_k(i64 D, i64 N, int k);
i64 genus_X0DN(i64 D, i64 N);

std::vector<i64> fixed_orders(i64 m);

enum class embed_role { divides_D, divides_N };

// nu_p(R, O_N); for divides_N, e is the exponent of p in N
i64 local_embedding_number(i64 d, i64 p, embed_role role, int e = 1);

i64 fixed_point_count(i64 D, i64 N, i64 m);
i64 quotient_genus(i64 D, i64 N, const al_subgroup& W);
i64 star_genus(i64 D, i64 N);
int ribet_sign(i64 D, i64 m);

// every subgroup of W0(D,N), one per canonical echelon form; includes the trivial group
std::vector<al_subgroup> all_subgroups(i64 D, i64 N);
// index-2 overgroups W' of W with g(X/W') = 1, i.e. Atkin-Lehner bielliptic involutions of X/W
int al_bielliptic_count(i64 D, i64 N, const al_subgroup& W);
// minimal generating set: reduced echelon basis over the prime-power coordinates
std::vector<i64> canonical_generators(i64 DN, const al_subgroup& W);

mpq_class gonality_genus_bound(i64 D, i64 N);
mpq_class genus_lower_bound(i64 D, i64 N);

struct quotient_record {
  i64 D;
  i64 N;
  al_subgroup W;
  i64 genus;
  bool operator==(const quotient_record&) const = default;
};

bool record_less(const quotient_record& a, const quotient_record& b);

struct star_level {
  i64 D;
  i64 N;
  i64 genus;
  bool operator==(const star_level&) const = default;
};

struct enumerate_options {
  i64 max_genus = 2;
  i64 bound = 19226700;
  int jobs = 1;
  // D ranges already done (closed intervals); their D are skipped
  std::vector<std::pair<i64, i64>> skip;
  i64 chunk = 1 << 18;
  // called after every finished chunk of D, under a lock
  std::function<void(i64 lo, i64 hi, const std::vector<star_level>&,
                     const std::vector<quotient_record>&)>
      on_chunk;
};

struct enumeration_result {
  std::vector<star_level> stars;
  std::vector<quotient_record> records;
};

// levels with star genus <= max_genus, then every nontrivial W with genus <= max_genus
enumeration_result enumerate_all(const enumerate_options& opt);
std::vector<quotient_record> enumerate_quotients(i64 max_genus, i64 DN_bound);

// direct scan without the divisibility pruning; only for small bounds
std::vector<star_level> star_levels_naive(i64 max_genus, i64 bound);

std::string format_W(const al_subgroup& W);

}  // namespace shimura
