#include <gtest/gtest.h>

#include "rulesynth/error.hpp"
#include "rulesynth/eval.hpp"
#include "rulesynth/uapdg.hpp"
#include "testkit.hpp"

using namespace rulesynth;
using testkit::id_of;
using testkit::method;

namespace {

Alignment align_uapdgs(const Uapdg& a, const Uapdg& b, AlignMode mode = AlignMode::Postcondition) {
  AlignmentProblem p;
  p.g1 = align_view(a);
  p.g2 = align_view(b);
  p.mode = mode;
  p.pins = frozen_pins(a, b);
  return align(p);
}

Valuation as_partial(const Vpdg& v) {
  Valuation out;
  for (const auto& [id, var] : v.valuation) out[var] = id;
  return out;
}

const char* kBeforeA =
    "void showFirstUser(Cursor cursor, TextView view) {\n"
    "  cursor.moveToFirst();\n"
    "  view.setText(cursor.getString(0));\n"
    "}\n";
const char* kBeforeB =
    "void loadTheme(Db db) {\n"
    "  Cursor mProviderCursor = db.query(\"themes\");\n"
    "  mProviderCursor.moveToFirst();\n"
    "  while (!mProviderCursor.isAfterLast()) {\n"
    "    apply(mProviderCursor.getLong(2));\n"
    "    mProviderCursor.moveToNext();\n"
    "  }\n"
    "}\n";

std::string receiver_of(const Pdg& g, const std::string& call) {
  for (std::size_t e : g.in_edges(g.at(call)))
    if (g.edges()[e].label == EdgeLabel::recv()) return g.node(g.endpoints(e)->first).id;
  return {};
}

Vpdg frozen_cursor_call(const Pdg& g) {
  const std::string call = id_of(g, "moveToFirst");
  return Vpdg{g, {{receiver_of(g, call), "x0"}, {call, "x1"}}};
}

}  // namespace

TEST(Uapdg, EmptyValuationLeavesEverythingBound) {
  const Pdg g = method(kBeforeA);
  const Uapdg a = from_vpdg(Vpdg{g, {}});
  EXPECT_TRUE(a.free_vars().empty());
  ASSERT_EQ(a.nodes.size(), g.size());
  for (std::size_t i = 0; i < a.nodes.size(); ++i) EXPECT_EQ(a.nodes[i].var, "y" + std::to_string(i + 1));
}

TEST(Uapdg, ValuatedNodesAreFrozen) {
  const Pdg g = method(kBeforeA);
  const Uapdg a = from_vpdg(frozen_cursor_call(g));
  EXPECT_EQ(a.free_vars(), (std::set<std::string>{"x0", "x1"}));
  std::size_t frozen = 0;
  for (const auto& n : a.nodes) frozen += n.frozen;
  EXPECT_EQ(frozen, 2u);
}

TEST(Uapdg, InvalidValuationsAreRejected) {
  const Pdg g = method(kBeforeA);
  EXPECT_THROW(check_vpdg(Vpdg{g, {{"nope", "x0"}}}), SchemaError);
  EXPECT_THROW(check_vpdg(Vpdg{g, {{g.node(0).id, "x0"}, {g.node(1).id, "x0"}}}), SchemaError);
}

TEST(Uapdg, SelfMergeIsIdentityUpToRenaming) {
  const Pdg g = method(kBeforeB);
  const Uapdg a = from_vpdg(Vpdg{g, {}}, 0);
  const Uapdg b = from_vpdg(Vpdg{g, {}}, 1);
  const Uapdg m = merge(a, b, align_uapdgs(a, b));
  EXPECT_EQ(m.nodes.size(), a.nodes.size());
  EXPECT_EQ(m.edges.size(), a.edges.size());
  for (const auto& n : m.nodes) EXPECT_EQ(n.presence(), (std::set<int>{0, 1}));
  const QuantifiedConjunct fa = to_formula(a);
  const QuantifiedConjunct fm = to_formula(project(m, {0, 1}));
  EXPECT_EQ(fa.size(), fm.size());
  EXPECT_EQ(fa.edges.size(), fm.edges.size());
  EXPECT_TRUE(match_conjunct(g, fm));
}

TEST(Uapdg, MotivatingBeforesMergeAndProject) {
  const Pdg ga = method(kBeforeA);
  const Pdg gb = method(kBeforeB);
  const Uapdg a = from_vpdg(Vpdg{ga, {}}, 0);
  const Uapdg b = from_vpdg(Vpdg{gb, {}}, 1);
  const Uapdg m = merge(a, b, align_uapdgs(a, b));
  auto presence_of = [&](const std::string& label) {
    for (const auto& n : m.nodes)
      if (n.pred.label == ConstLattice<std::string>::exactly(label)) return n.presence();
    return std::set<int>{};
  };
  EXPECT_EQ(presence_of("moveToFirst"), (std::set<int>{0, 1}));
  EXPECT_EQ(presence_of("getString"), std::set<int>{0});
  EXPECT_EQ(presence_of("getLong"), std::set<int>{1});
  EXPECT_EQ(presence_of("LOOP"), std::set<int>{1});
  EXPECT_EQ(presence_of("query"), std::set<int>{1});

  const Uapdg common = project(m, {0, 1});
  for (const auto& n : common.nodes) EXPECT_EQ(n.presence(), (std::set<int>{0, 1}));
  bool has_cursor = false;
  for (const auto& n : common.nodes)
    has_cursor |= n.pred.kind == NodeKind::Data && n.pred.data_type == AffixLattice::exactly("Cursor");
  EXPECT_TRUE(has_cursor);
  const QuantifiedConjunct q = to_formula(common);
  EXPECT_TRUE(match_conjunct(ga, q));
  EXPECT_TRUE(match_conjunct(gb, q));
}

TEST(Uapdg, ProjectionOntoOwnSourceIsIdentity) {
  const Pdg g = method(kBeforeA);
  const Uapdg a = from_vpdg(frozen_cursor_call(g));
  const Uapdg p = project(a, {0});
  EXPECT_EQ(p.nodes.size(), a.nodes.size());
  EXPECT_EQ(p.edges.size(), a.edges.size());
  EXPECT_EQ(to_formula(p), to_formula(a));
}

TEST(Uapdg, ProjectionMayNotDropFrozenNodes) {
  const Pdg ga = method("void f(Foo x) { x.a(); }");
  const Pdg gb = method("void g(Foo y) { y.b(); }");
  Uapdg a = from_vpdg(Vpdg{ga, {}}, 0);
  Uapdg b = from_vpdg(Vpdg{gb, {}}, 1);
  Uapdg m = merge(a, b, align_uapdgs(a, b));
  for (auto& n : m.nodes) {
    if (n.pred.label == ConstLattice<std::string>::exactly("a")) {
      n.frozen = true;
      n.var = "x0";
    }
  }
  EXPECT_THROW(project(m, {0, 1}), UapdgError);
}

TEST(Uapdg, MergeChecksFreeVariablesAndPins) {
  const Pdg g = method(kBeforeA);
  const Uapdg a = from_vpdg(frozen_cursor_call(g), 0);
  const Uapdg b = from_vpdg(Vpdg{g, {}}, 1);
  EXPECT_THROW(merge(a, b, Alignment{}), UapdgError);
  const Uapdg c = from_vpdg(frozen_cursor_call(g), 1);
  EXPECT_THROW(merge(a, c, Alignment{}), UapdgError);
  EXPECT_NO_THROW(merge(a, c, align_uapdgs(a, c)));
}

TEST(Uapdg, FormulaOfFrozenCoreHasExpectedAtoms) {
  const Pdg g = method("void f(Cursor cursor) { cursor.moveToFirst(); }");
  const Uapdg a = from_vpdg(frozen_cursor_call(g));
  Uapdg core;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].frozen) keep.push_back(i);
  for (std::size_t i : keep) core.nodes.push_back(a.nodes[i]);
  for (const auto& e : a.edges) {
    auto s = std::find(keep.begin(), keep.end(), e.src);
    auto d = std::find(keep.begin(), keep.end(), e.dst);
    if (s != keep.end() && d != keep.end())
      core.edges.push_back(UEdge{static_cast<std::size_t>(s - keep.begin()), static_cast<std::size_t>(d - keep.begin()),
                                 e.label, e.presence});
  }
  const QuantifiedConjunct q = to_formula(core);
  EXPECT_EQ(q.free_vars, (std::vector<std::string>{"x0", "x1"}));
  EXPECT_TRUE(q.bound_vars.empty());
  const std::string text = render_atoms(q);
  for (const char* s : {"data-type(x0) = \"Cursor\"", "label(x1) = \"moveToFirst\"", "num-para(x1) = 0",
                        "output-ignored(x1)", "x0 -recv-> x1"})
    EXPECT_NE(text.find(s), std::string::npos) << s << " in " << text;
}

TEST(Uapdg, EmptyUapdgIsTrue) {
  const QuantifiedConjunct q = to_formula(Uapdg{});
  EXPECT_TRUE(q.empty());
  EXPECT_TRUE(match_conjunct(Pdg(), q));
}

TEST(Uapdg, RevaluateWitnessesEachSource) {
  const Pdg ga = method(kBeforeA);
  const Pdg gb = method(kBeforeB);
  const Uapdg a = from_vpdg(frozen_cursor_call(ga), 0);
  const Uapdg b = from_vpdg(frozen_cursor_call(gb), 1);
  const Uapdg common = project(merge(a, b, align_uapdgs(a, b)), {0, 1});
  const QuantifiedConjunct q = to_formula(common);
  for (const auto& [src, g] : {std::pair<int, Pdg>{0, ga}, std::pair<int, Pdg>{1, gb}}) {
    const Vpdg w = revaluate(common, src, g);
    EXPECT_EQ(w.valuation.size(), q.size());
    Valuation full;
    for (const auto& [id, var] : w.valuation) full[var] = id;
    EXPECT_EQ(testkit::oracle_models(g, q, full).size(), 1u);
  }
}

TEST(Uapdg, MergeSoundnessOnRandomPairs) {
  testkit::Rng rng(404);
  for (int t = 0; t < 150; ++t) {
    auto [v1, v2] = testkit::random_vpdg_pair(rng, 7, 2);
    const Uapdg a = from_vpdg(v1, 0);
    const Uapdg b = from_vpdg(v2, 1);
    const AlignMode mode = testkit::chance(rng, 0.5) ? AlignMode::Precondition : AlignMode::Postcondition;
    const Uapdg m = merge(a, b, align_uapdgs(a, b, mode));
    const QuantifiedConjunct q = to_formula(project(m, {0, 1}));
    EXPECT_TRUE(Matcher(v1.graph).match(q, as_partial(v1)));
    EXPECT_TRUE(Matcher(v2.graph).match(q, as_partial(v2)));
    EXPECT_FALSE(testkit::oracle_models(v1.graph, q, as_partial(v1)).empty());
    EXPECT_FALSE(testkit::oracle_models(v2.graph, q, as_partial(v2)).empty());
  }
}

TEST(Uapdg, RenderDotMarksPartialElements) {
  const Uapdg a = from_vpdg(Vpdg{method(kBeforeA), {}}, 0);
  const Uapdg b = from_vpdg(Vpdg{method(kBeforeB), {}}, 1);
  const std::string dot = render_dot(merge(a, b, align_uapdgs(a, b)), "fig");
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("dashed"), std::string::npos);
  EXPECT_NE(dot.find("moveToFirst"), std::string::npos);
}
