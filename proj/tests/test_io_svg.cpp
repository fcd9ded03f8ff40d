#include "support.hpp"

#include <gtest/gtest.h>

#include <regex>

using namespace linkage;
using namespace testing_support;

namespace {

std::size_t count(const std::string &text, const std::string &needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string expect_input_error(const std::string &text) {
  try {
    parse_linkage(text);
  } catch (const InputError &e) {
    return e.what();
  }
  ADD_FAILURE() << "accepted: " << text;
  return {};
}

} // namespace

TEST(ParseLinkage, FullDocument) {
  const auto f = parse_linkage(R"({
    "vertices": ["A", "B", "C"],
    "edges": [{"a": "A", "b": "C", "length": 4}, {"a": "B", "b": "C", "length": 5.0}],
    "base": [{"vertex": "A", "x": 0, "y": 0}, {"vertex": "B", "x": 3, "y": 0}],
    "diagonals": [],
    "decomposition": {"pieces": [["A", "B", "C"]], "joints": []}
  })");
  EXPECT_EQ(f.spec.vertices.size(), 3u);
  ASSERT_EQ(f.spec.edges.size(), 2u);
  EXPECT_EQ(f.spec.edges[0].length, 4.0);
  EXPECT_EQ(*f.spec.base_position("B"), Point(3, 0));
  ASSERT_TRUE(f.decomposition);
  EXPECT_EQ(f.decomposition->pieces.size(), 1u);
}

TEST(ParseLinkage, OptionalSections) {
  const auto f = parse_linkage(R"({"vertices": ["A", "B"], "edges": [{"a": "A", "b": "B", "length": 1}]})");
  EXPECT_TRUE(f.spec.base.empty());
  EXPECT_TRUE(f.spec.diagonals.empty());
  EXPECT_FALSE(f.decomposition);
}

TEST(ParseLinkage, UnknownKeysRejectedEverywhere) {
  EXPECT_TRUE(contains_text(expect_input_error(R"({"vertices": [], "extra": 1})"), "unknown key \"extra\""));
  EXPECT_TRUE(contains_text(
      expect_input_error(R"({"vertices": ["A","B"], "edges": [{"a":"A","b":"B","length":1,"w":2}]})"), "\"w\""));
  EXPECT_TRUE(contains_text(expect_input_error(R"({"vertices": ["A"], "base": [{"vertex":"A","x":0,"y":0,"z":0}]})"),
                            "\"z\""));
  EXPECT_TRUE(contains_text(expect_input_error(R"({"vertices": ["A","B"], "diagonals": [{"a":"A","b":"B","c":1}]})"),
                            "\"c\""));
  EXPECT_TRUE(contains_text(expect_input_error(R"({"vertices": [], "decomposition": {"pieces": [], "tree": []}})"),
                            "\"tree\""));
}

TEST(ParseLinkage, TypeAndShapeErrors) {
  expect_input_error(R"({"edges": []})");
  expect_input_error(R"({"vertices": "A"})");
  expect_input_error(R"({"vertices": [1]})");
  expect_input_error(R"({"vertices": ["A","B"], "edges": [{"a":"A","b":"B","length":"1"}]})");
  expect_input_error(R"({"vertices": ["A","B"], "edges": [{"a":"A","length":1}]})");
  expect_input_error(R"([1, 2])");
}

TEST(ParseLinkage, SyntaxErrorReportsPosition) {
  const auto msg = expect_input_error("{\n  \"vertices\": [\"A\",\n}");
  EXPECT_TRUE(contains_text(msg, "line 3")) << msg;
  EXPECT_TRUE(contains_text(msg, "column")) << msg;
}

TEST(ParseLinkage, RoundTrip) {
  for (const auto &file : {catalog::hexagon(), catalog::heptagon(), catalog::three_piece_chain()}) {
    const auto again = parse_linkage(to_json_text(file));
    EXPECT_EQ(to_json_text(again), to_json_text(file));
    EXPECT_EQ(again.spec.edges.size(), file.spec.edges.size());
    EXPECT_EQ(again.decomposition->joints, file.decomposition->joints);
  }
  EXPECT_THROW(load_linkage("/nonexistent/linkage.json"), InputError);
}

TEST(RenderSvg, PinnedTriangle) {
  const auto spec = catalog::pinned_triangle();
  const ConstraintSystem s(pin(spec));
  const auto svg = render_svg(spec, s.positions(Eigen::Vector2d(0, 4)));
  EXPECT_EQ(count(svg, "<line class=\"bar\""), 2u);
  EXPECT_EQ(count(svg, "<rect class=\"base\""), 2u);
  EXPECT_EQ(count(svg, "fill=\"black\"/>"), 2u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 0u);
  EXPECT_EQ(count(svg, "<circle"), 1u);
  EXPECT_TRUE(contains_text(svg, "scale(1,-1)"));
  // bounding box x in [0,3], y in [0,4] padded by 10%; flipped y
  EXPECT_TRUE(contains_text(svg, "viewBox=\"-0.300000 -4.400000 3.600000 4.800000\"")) << svg;
}

TEST(RenderSvg, DiagonalsAreDashed) {
  const auto hex = catalog::hexagon();
  const ConstraintSystem s(pin(hex.spec));
  const auto svg = render_svg(hex.spec, s.positions(random_feasible(s, 1).coordinates));
  EXPECT_EQ(count(svg, "<line class=\"bar\""), 6u);
  EXPECT_EQ(count(svg, "<line class=\"diagonal\""), 1u);
  EXPECT_EQ(count(svg, "stroke-dasharray"), 1u);
  EXPECT_EQ(count(svg, "<circle"), 6u);
  EXPECT_EQ(count(svg, "<rect"), 0u);
  EXPECT_TRUE(std::regex_search(svg, std::regex("^<svg xmlns=\"http://www.w3.org/2000/svg\"")));
  EXPECT_TRUE(contains_text(svg, "</svg>\n"));
}

TEST(RenderSvg, StrokeScalesWithDiameter) {
  const auto spec = catalog::pinned_triangle();
  const auto big = scale(spec, 10.0);
  const ConstraintSystem s(pin(spec)), b(pin(big));
  const auto small_svg = render_svg(spec, s.positions(Eigen::Vector2d(0, 4)));
  const auto big_svg = render_svg(big, b.positions(Eigen::Vector2d(0, 40)));
  EXPECT_TRUE(contains_text(small_svg, "stroke-width=\"0.026667\""));
  EXPECT_TRUE(contains_text(big_svg, "stroke-width=\"0.266667\""));
}
