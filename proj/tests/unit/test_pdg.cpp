#include <gtest/gtest.h>

#include "rulesynth/error.hpp"
#include "rulesynth/pdg.hpp"
#include "rulesynth/pdg_io.hpp"
#include "testkit.hpp"

using namespace rulesynth;

namespace {

Pdg before_example() {
  return testkit::method(
      "void showFirstUser(Cursor cursor, TextView view) {\n"
      "  cursor.moveToFirst();\n"
      "  view.setText(cursor.getString(0));\n"
      "}\n");
}

}  // namespace

TEST(Pdg, EmptyGraphIsValid) { EXPECT_TRUE(validate(Pdg()).empty()); }

TEST(Pdg, DefEdgeFromDataNodeIsReported) {
  Pdg g({Node{"d", NodeKind::Data}, Node{"e", NodeKind::Data}}, {Edge{"d", "e", EdgeLabel::def()}});
  const auto problems = validate(g);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("d -def-> e"), std::string::npos);
}

TEST(Pdg, ReportsMalformedNodesAndEdges) {
  Node action{"a", NodeKind::Action};
  action.data_type = "T";
  Node data{"d", NodeKind::Data};
  data.num_para = 1;
  Pdg g({action, data, Node{"d", NodeKind::Data}},
        {Edge{"d", "zz", EdgeLabel::dep()}, Edge{"a", "d", EdgeLabel::recv()}, Edge{"a", "d", EdgeLabel::recv()}});
  const auto problems = validate(g);
  auto mentions = [&](const std::string& s) {
    for (const auto& p : problems)
      if (p.find(s) != std::string::npos) return true;
    return false;
  };
  EXPECT_TRUE(mentions("action node without label"));
  EXPECT_TRUE(mentions("data type on action node"));
  EXPECT_TRUE(mentions("parameter count on data node"));
  EXPECT_TRUE(mentions("duplicate id"));
  EXPECT_TRUE(mentions("unknown destination node"));
  EXPECT_TRUE(mentions("duplicate edge"));
  EXPECT_TRUE(mentions("must end at an action node"));
}

TEST(Pdg, FrontendGraphsAreWellFormed) { EXPECT_TRUE(validate(before_example()).empty()); }

TEST(Pdg, NeighborsOfIsolatedNodeAreEmpty) {
  Pdg g({Node{"d", NodeKind::Data}}, {});
  EXPECT_TRUE(neighbors(g, "d").empty());
  EXPECT_THROW(neighbors(g, "missing"), std::out_of_range);
}

TEST(Pdg, NeighborsFollowEdgesInBothDirections) {
  Node a{"a", NodeKind::Action, "f"};
  Pdg g({a, Node{"d", NodeKind::Data}}, {Edge{"a", "d", EdgeLabel::def()}});
  EXPECT_EQ(neighbors(g, "a"), std::vector<std::string>{"d"});
  EXPECT_EQ(neighbors(g, "d"), std::vector<std::string>{"a"});
}

TEST(Pdg, IgnoredCallHasOnlyItsReceiverAsNeighbor) {
  const Pdg g = before_example();
  const auto adj = neighbors(g, testkit::id_of(g, "moveToFirst"));
  ASSERT_EQ(adj.size(), 1u);
  EXPECT_EQ(g.node(g.at(adj[0])).data_type, std::optional<std::string>("Cursor"));
}

TEST(Pdg, MoveToFirstNeighborsAreCursorAndResult) {
  const Pdg g = testkit::method("void f(Cursor cursor) {\n  if (!cursor.moveToFirst()) {\n    return;\n  }\n}\n");
  const std::string call = testkit::id_of(g, "moveToFirst");
  const auto adj = neighbors(g, call);
  ASSERT_EQ(adj.size(), 2u);
  int cursors = 0, results = 0;
  for (const auto& id : adj) {
    const Node& n = g.node(g.at(id));
    EXPECT_EQ(n.kind, NodeKind::Data);
    if (n.data_type == std::optional<std::string>("Cursor")) ++cursors;
    if (g.has_edge(g.at(call), g.at(id), EdgeLabel::def())) ++results;
  }
  EXPECT_EQ(cursors, 1);
  EXPECT_EQ(results, 1);
}

TEST(Pdg, EdgeLabelTextRoundTrips) {
  for (EdgeLabel l : {EdgeLabel::recv(), EdgeLabel::para(0), EdgeLabel::para(3), EdgeLabel::def(), EdgeLabel::dep(),
                      EdgeLabel::cond(), EdgeLabel::thrw()})
    EXPECT_EQ(parse_edge_label(to_string(l)), l);
  EXPECT_EQ(parse_edge_label("para"), EdgeLabel::para(0));
  EXPECT_FALSE(parse_edge_label("bogus"));
}

TEST(PdgIo, EmptyGraphRoundTrips) {
  const Pdg g;
  EXPECT_TRUE(same_graph(read_pdg(write_pdg(g)), g));
}

TEST(PdgIo, RandomGraphsRoundTrip) {
  testkit::Rng rng(11);
  testkit::GraphShape shape;
  shape.max_nodes = 20;
  shape.random_tags = true;
  for (int i = 0; i < 3; ++i) {
    const Pdg g = testkit::random_pdg(rng, shape);
    ASSERT_TRUE(validate(g).empty());
    const Pdg back = read_pdg(write_pdg(g));
    EXPECT_TRUE(same_graph(back, g));
    EXPECT_EQ(back.origin(), g.origin());
    EXPECT_EQ(write_pdg(back), write_pdg(g));
  }
}

TEST(PdgIo, DanglingEdgeIsNamed) {
  const std::string text = R"({"nodes": [{"id": "a", "kind": "data"}],
                               "edges": [{"src": "a", "dst": "b", "label": "dep"}]})";
  try {
    read_pdg(text);
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("a -dep-> b"), std::string::npos) << e.what();
  }
}

TEST(PdgIo, MalformedJsonHasPosition) {
  try {
    read_pdg("{\n  \"nodes\": [\n  oops ]}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(PdgIo, UnknownFieldValuesAreSchemaErrors) {
  EXPECT_THROW(read_pdg(R"({"nodes": [{"id": "a", "kind": "blob"}], "edges": []})"), SchemaError);
  EXPECT_THROW(read_pdg(R"({"nodes": [{"id": "a", "kind": "action", "label": "f"}],
                            "edges": [{"src": "a", "dst": "a", "label": "sideways"}]})"),
               SchemaError);
}

TEST(PdgIo, FileErrorsNameTheFile) {
  const auto dir = testkit::temp_dir("pdgio");
  testkit::write_text(dir / "bad.pdg", "{");
  try {
    load_pdg_file(dir / "bad.pdg");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.pdg"), std::string::npos);
  }
}

TEST(Pdg, IsomorphismIgnoresIds) {
  testkit::Rng rng(5);
  const Pdg g = testkit::random_pdg(rng, testkit::GraphShape{});
  std::vector<Node> nodes = g.nodes();
  std::vector<Edge> edges = g.edges();
  for (auto& n : nodes) n.id = "r" + n.id;
  for (auto& e : edges) {
    e.src = "r" + e.src;
    e.dst = "r" + e.dst;
  }
  std::reverse(nodes.begin(), nodes.end());
  const Pdg renamed(nodes, edges);
  EXPECT_TRUE(isomorphic(g, renamed));
  EXPECT_FALSE(same_graph(g, renamed));
  nodes.push_back(Node{"extra", NodeKind::Data});
  EXPECT_FALSE(isomorphic(g, Pdg(nodes, edges)));
}
