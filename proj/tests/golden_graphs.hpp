#pragma once

// hand transcriptions of the printed CD graphs; base graphs get weights from the
// vertex sum rule w(x) * sum 1/len = p + 1, quotients are compared without weights

#include <stdexcept>

#include "shimura/graphs.hpp"

namespace golden {

using shimura::graph;

inline graph strip_weights(graph g) {
  for (auto& w : g.weight) w = 1;
  return g;
}

inline graph with_sum_rule(graph g, std::int64_t p) {
  for (int x = 0; x < g.num_vertices(); ++x) {
    std::int64_t l = 1;
    for (auto& e : g.edges)
      if (e.o == x) l = std::lcm(l, e.len);
    std::int64_t s = 0;  // sum of l / len
    for (auto& e : g.edges)
      if (e.o == x) s += l / e.len;
    if (((p + 1) * l) % s) throw std::logic_error("sum rule has no integral weight");
    g.weight[x] = (p + 1) * l / s;
  }
  return g;
}

inline graph vertices(int n) {
  graph g;
  for (int i = 0; i < n; ++i) g.add_vertex();
  return g;
}

// D = 15, N = 7, p = 3; a1..a4 = 0..3, b1..b4 = 4..7
inline graph g15_7_3() {
  auto g = vertices(8);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  g.add_edge(0, 4);
  g.add_edge(0, 4);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_edge(2, 6, 3);
  g.add_edge(3, 7, 3);
  g.add_edge(4, 5);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(5, 7);
  return with_sum_rule(g, 3);
}

inline graph g15_7_3_w3() {
  auto g = vertices(4);  // u v w z
  g.add_half_edge(0);
  g.add_half_edge(0);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(1, 3);
  g.add_half_edge(2, 3);
  g.add_half_edge(3, 3);
  return g;
}

inline graph g15_7_3_w3w5() {
  auto g = vertices(3);  // u v w
  g.add_half_edge(0);
  g.add_edge(0, 1, 2);
  g.add_edge(0, 1, 2);
  g.add_edge(1, 2);
  g.add_half_edge(2, 3);
  return g;
}

// D = 15, N = 7, p = 5
inline graph g15_7_5() {
  auto g = vertices(4);
  for (int k = 0; k < 2; ++k) g.add_edge(0, 1);
  for (int k = 0; k < 4; ++k) g.add_edge(1, 2);
  for (int k = 0; k < 2; ++k) g.add_edge(2, 3);
  return with_sum_rule(g, 5);
}

inline graph g15_7_5_w3() {
  auto g = vertices(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return g;
}

inline graph g15_7_5_w3w5() {
  auto g = vertices(2);
  g.add_edge(0, 1);
  g.add_edge(1, 1);
  return g;
}

// D = 51, N = 2, p = 17
inline graph g51_2_17() {
  auto g = vertices(2);
  for (int k = 0; k < 8; ++k) g.add_edge(0, 1);
  g.add_edge(0, 1, 2);
  g.add_edge(0, 1, 2);
  return with_sum_rule(g, 17);
}

inline graph g51_2_17_w51() {
  auto g = vertices(1);
  for (int s = 0; s < 2; ++s) {
    g.add_half_edge(0);
    g.add_half_edge(0);
    g.add_half_edge(0, 2);
  }
  g.add_edge(0, 0);
  g.add_edge(0, 0);
  return g;
}

inline graph g51_2_17_one_loop() {
  auto g = vertices(1);
  g.add_edge(0, 0);
  g.add_half_edge(0);
  g.add_half_edge(0);
  g.add_half_edge(0, 2);
  return g;
}

// w2 comes from a norm-2 element whose square is the vertex unit of order 4 (no trace-zero
// element of norm 2 exists when the algebra ramifies at 3), so it fixes both length-2 edges
inline graph g51_2_17_w2w51() {
  auto g = vertices(1);
  g.add_edge(0, 0);
  g.add_half_edge(0);
  g.add_half_edge(0);
  g.add_half_edge(0, 4);
  g.add_half_edge(0, 4);
  return g;
}

// printed minimal-regular-model dual graphs
inline graph two_vertices_double_edge() {
  auto g = vertices(2);
  g.add_edge(0, 1);
  g.add_edge(0, 1);
  return g;
}

inline graph square() {
  auto g = vertices(4);
  for (int i = 0; i < 4; ++i) g.add_edge(i, (i + 1) % 4);
  return g;
}

inline graph one_loop() {
  auto g = vertices(1);
  g.add_edge(0, 0);
  return g;
}

}  // namespace golden
