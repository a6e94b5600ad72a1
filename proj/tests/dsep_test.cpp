#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dtcausal/dsep.hpp"
#include "dtcausal/dsl.hpp"
#include "dtcausal/error.hpp"
#include "support.hpp"

using namespace dtc;
using dtc::testing::corpus;

namespace {

Dag fig(const std::string& file) { return load_graph_doc(corpus(file)).dag; }

bool sep(const Dag& g, const std::string& text) { return d_separated(g, parse_statement(text)); }

bool contains(const std::vector<EciStatement>& v, const std::string& text) {
  return std::find(v.begin(), v.end(), parse_statement(text)) != v.end();
}

}  // namespace

TEST(StatementSyntax, ParsesAllParts) {
  auto s = parse_statement("A, B _||_ C, F | D, F2=1, G=~");
  EXPECT_EQ(s.left, (NodeSet{"A", "B"}));
  EXPECT_EQ(s.right, (NodeSet{"C", "F"}));
  EXPECT_EQ(s.given, NodeSet{"D"});
  ASSERT_EQ(s.pinned.size(), 2u);
  EXPECT_EQ(s.pinned.at("F2"), RegimeValue::set("1"));
  EXPECT_TRUE(s.pinned.at("G").is_idle());
  EXPECT_EQ(format_statement(s), "A, B _||_ C, F | D, F2=1, G=~");
}

TEST(StatementSyntax, EmptyRightAndNoGiven) {
  auto s = parse_statement("Y _||_");
  EXPECT_TRUE(s.right.empty());
  EXPECT_EQ(format_statement(s), "Y _||_");
  EXPECT_EQ(parse_statement(format_statement(parse_statement("T*, X _||_ F_T"))),
            parse_statement("X, T* _||_ F_T"));
}

TEST(StatementSyntax, ErrorsCarryColumns) {
  try {
    parse_statement("A _||_ B | C=");
    FAIL();
  } catch (const StatementError& e) {
    EXPECT_EQ(e.column(), 14u);
  }
  EXPECT_THROW(parse_statement("_||_ B"), StatementError);
  EXPECT_THROW(parse_statement("A B"), StatementError);
  EXPECT_THROW(parse_statement("A _||_ B=1"), StatementError);
  EXPECT_THROW(parse_statement("A _||_ B | C, C"), StatementError);
  EXPECT_THROW(parse_statement("A _||_ B | C $"), StatementError);
}

TEST(DSeparated, SimpleRegimeGraph) {
  Dag g = fig("fig1.cadt");
  EXPECT_TRUE(sep(g, "Y _||_ F_T | T"));
  EXPECT_FALSE(sep(g, "Y _||_ F_T"));
}

TEST(DSeparated, Instrument) {
  Dag g = fig("fig2.cadt");
  EXPECT_TRUE(sep(g, "Y _||_ F_X | X, U"));
  EXPECT_TRUE(sep(g, "U _||_ Z | F_X"));
  EXPECT_FALSE(sep(g, "Y _||_ F_X | X"));
  EXPECT_TRUE(sep(g, "Y _||_"));
}

TEST(DSeparated, PinnedRegimeRestrictsGraph) {
  Dag g = fig("fig4.cadt");
  // With F_T set, T no longer transmits T*, so Y and T* stay dependent
  // only through the direct arrow.
  EXPECT_FALSE(sep(g, "Y _||_ T* | T, F_T=1"));
  Dag six = fig("fig6.cadt");
  EXPECT_TRUE(sep(six, "Y _||_ T* | T, F_T=1"));
  EXPECT_TRUE(sep(six, "Y _||_ T* | F_T=1"));
  EXPECT_FALSE(sep(six, "Y _||_ T* | F_T=~"));
  EXPECT_FALSE(sep(six, "Y _||_ T* | F_T"));
}

TEST(DSeparated, RejectsMalformedStatements) {
  Dag g = fig("fig1.cadt");
  EXPECT_THROW(sep(g, "F_T _||_ Y | T"), StatementError);
  EXPECT_THROW(sep(g, "Y _||_ Y"), StatementError);
  EXPECT_THROW(sep(g, "Y _||_ Q"), StatementError);
  EXPECT_THROW(sep(g, "Y _||_ T | F_T=5"), StatementError);
  EXPECT_THROW(sep(g, "Y _||_ F_T | T=1"), StatementError);
}

TEST(DSeparated, PathsAgreeOnCorpus) {
  for (const char* f : {"fig1.cadt", "fig2.cadt", "fig4.cadt", "fig6.cadt", "fig9.cadt", "fig10.cadt"}) {
    const GraphDoc doc = load_graph_doc(corpus(f));
    for (const auto& s : implied_statements(doc.dag, doc.dag.names()))
      EXPECT_TRUE(d_separated_paths(doc.dag, s)) << f << ": " << format_statement(s);
  }
}

TEST(ImpliedStatements, SimpleRegimeGraph) {
  auto v = implied_statements(fig("fig1.cadt"), {"F_T", "T", "Y"});
  EXPECT_TRUE(contains(v, "Y _||_ F_T | T"));
  EXPECT_FALSE(contains(v, "Y _||_ T"));
  EXPECT_FALSE(contains(v, "T _||_ Y"));
  EXPECT_FALSE(contains(v, "Y _||_ T | F_T"));
}

TEST(ImpliedStatements, AugmentedTwoStage) {
  Dag g = fig("fig9.cadt");
  auto v = implied_statements(g, g.names());
  EXPECT_TRUE(contains(v, "Y _||_ F0 | Z, X1"));
  EXPECT_TRUE(contains(v, "Z _||_ F1 | X0"));
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
}

TEST(ImpliedStatements, EmptyGraph) {
  Dag g;
  g.add_stochastic("A");
  g.add_stochastic("B");
  auto v = implied_statements(g, g.names());
  EXPECT_TRUE(contains(v, "A _||_ B"));
  EXPECT_TRUE(contains(v, "B _||_ A"));
}

TEST(ImpliedStatements, EnumerationBound) {
  Dag g;
  for (int i = 0; i < 15; ++i) g.add_stochastic("V" + std::to_string(i));
  try {
    implied_statements(g, g.names());
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_STREQ(e.what(), "enumeration bound exceeded");
  }
}

TEST(SeparationIndex, MoralAndBayesBallAgreeOnSmallRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 100; ++t) {
    Dag g = dtc::testing::random_dag(rng, 6, 0.4);
    SeparationIndex idx(g);
    const auto& names = idx.names();
    for (std::uint32_t x = 1; x < 64; x <<= 1)
      for (std::uint32_t y = 1; y < 64; y <<= 1)
        for (std::uint32_t z = 0; z < 64; ++z) {
          ASSERT_EQ(idx.moral(x, y, z), idx.bayes_ball(x, y, z));
          if (t < 20 && (x & z) == 0 && (y & z) == 0 && x != y) {
            NodeSet xs, ys, zs;
            for (std::size_t i = 0; i < names.size(); ++i) {
              if (x >> i & 1) xs.insert(names[i]);
              if (y >> i & 1) ys.insert(names[i]);
              if (z >> i & 1) zs.insert(names[i]);
            }
            ASSERT_EQ(idx.moral(x, y, z), dtc::testing::path_separated(g, xs, ys, zs));
          }
        }
  }
}

TEST(SeparationIndex, DegenerateConventions) {
  Dag g = fig("fig1.cadt");
  EXPECT_TRUE(separated_moral(g, {"Y"}, {}, {}));
  EXPECT_TRUE(separated_moral(g, {"Y"}, {"T"}, {"T"}));
  EXPECT_FALSE(separated_moral(g, {"Y"}, {"Y"}, {}));
  EXPECT_FALSE(separated_paths(g, {"Y"}, {"Y"}, {}));
  Dag big;
  for (int i = 0; i < 65; ++i) big.add_stochastic("V" + std::to_string(i));
  EXPECT_THROW(SeparationIndex{big}, GraphError);
}
