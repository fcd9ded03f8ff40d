#ifndef LINKAGE_CATALOG_HPP
#define LINKAGE_CATALOG_HPP

// Ready-made linkages used by the tests, the acceptance suite and the sample
// files.

#include "linkage/io.hpp"

#include <array>
#include <string>
#include <vector>

namespace linkage::catalog {

/// Closed polygon A1..An with |A_i A_{i+1}| = lengths[i-1].
inline LinkageSpec polygon(const std::vector<double> &lengths, const std::string &prefix = "A") {
  LinkageSpec s;
  const auto n = lengths.size();
  for (std::size_t i = 1; i <= n; ++i) s.vertices.push_back(prefix + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) s.edges.push_back({s.vertices[i], s.vertices[(i + 1) % n], lengths[i]});
  return s;
}

/// Hexagon with marked diagonal A1A4, split into the quadrangles A1A2A3A4 and
/// A4A5A6A1: a (2,1) system.
inline LinkageFile hexagon(const std::array<double, 6> &lengths = {1.0, 1.1, 1.3, 1.7, 1.9, 2.3}) {
  LinkageFile f;
  f.spec = polygon({lengths.begin(), lengths.end()});
  f.spec.diagonals.push_back({"A1", "A4"});
  f.decomposition = Decomposition{{{"A1", "A2", "A3", "A4"}, {"A4", "A5", "A6", "A1"}}, {{"A1", "A4"}}};
  return f;
}

/// Heptagon ABCDEFG with diagonals CG and DF: pieces ABCG, CGFD, DEF give a
/// (2,2) system on a 4-dimensional space.
inline LinkageFile heptagon() {
  LinkageFile f;
  f.spec.vertices = {"A", "B", "C", "D", "E", "F", "G"};
  f.spec.edges = {{"A", "B", 1.0}, {"B", "C", 1.2}, {"C", "D", 1.1}, {"D", "E", 0.9},
                  {"E", "F", 1.3}, {"F", "G", 1.05}, {"G", "A", 1.15}};
  f.spec.diagonals = {{"C", "G"}, {"D", "F"}};
  f.decomposition = Decomposition{{{"A", "B", "C", "G"}, {"C", "G", "F", "D"}, {"D", "E", "F"}},
                                  {{"C", "G"}, {"D", "F"}}};
  return f;
}

/// Seven vertices in three 1DOF pieces ABG, BCFG, CDEF glued along the bar
/// BG and the marked diagonal CF: a (3,1) system.
inline LinkageFile three_piece_chain() {
  LinkageFile f;
  f.spec.vertices = {"A", "B", "C", "D", "E", "F", "G"};
  f.spec.edges = {{"A", "B", 1.0}, {"B", "G", 1.3}, {"B", "C", 1.1}, {"F", "G", 1.2},
                  {"C", "D", 0.9}, {"D", "E", 1.0}, {"E", "F", 1.15}};
  f.spec.diagonals = {{"C", "F"}};
  f.decomposition = Decomposition{{{"A", "B", "G"}, {"B", "C", "F", "G"}, {"C", "D", "E", "F"}},
                                  {{"B", "G"}, {"C", "F"}}};
  return f;
}

/// Complete graph on A, B, C, D with lengths measured from the given points.
inline LinkageSpec complete_four(const std::array<Point, 4> &at = {Point(0.0, 0.0), Point(1.3, 0.1),
                                                                   Point(0.9, 1.1), Point(-0.2, 0.8)}) {
  LinkageSpec s;
  s.vertices = {"A", "B", "C", "D"};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) s.edges.push_back({s.vertices[i], s.vertices[j], (at[i] - at[j]).norm()});
  return s;
}

/// 3-4-5 triangle with A, B based at (0,0), (3,0) and bars CA = 4, CB = 5;
/// optionally a pendant bar CD of length 1.
inline LinkageSpec pinned_triangle(bool pendant = false) {
  LinkageSpec s;
  s.vertices = {"A", "B", "C"};
  s.base = {{"A", Point(0.0, 0.0)}, {"B", Point(3.0, 0.0)}};
  s.edges = {{"C", "A", 4.0}, {"C", "B", 5.0}};
  if (pendant) {
    s.vertices.push_back("D");
    s.edges.push_back({"C", "D", 1.0});
  }
  return s;
}

/// Quadrangle ABCD without base points.
inline LinkageSpec quadrangle(const std::array<double, 4> &lengths = {1.0, 2.0, 2.0, 2.0}) {
  LinkageSpec s = polygon({lengths.begin(), lengths.end()});
  s.vertices = {"A", "B", "C", "D"};
  s.edges = {{"A", "B", lengths[0]}, {"B", "C", lengths[1]}, {"C", "D", lengths[2]}, {"D", "A", lengths[3]}};
  return s;
}

} // namespace linkage::catalog

#endif // LINKAGE_CATALOG_HPP
