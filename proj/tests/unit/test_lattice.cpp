#include <gtest/gtest.h>

#include "rulesynth/error.hpp"
#include "rulesynth/lattice.hpp"
#include "testkit.hpp"

using namespace rulesynth;

namespace {

ConstLattice<std::string> random_const(testkit::Rng& rng) {
  switch (testkit::uniform(rng, 0, 3)) {
    case 0: return ConstLattice<std::string>::bot();
    case 1: return ConstLattice<std::string>::top();
    default: return ConstLattice<std::string>::exactly(testkit::pick(rng, std::vector<std::string>{"a", "b"}));
  }
}

AffixLattice random_affix(testkit::Rng& rng) {
  static const std::vector<std::string> words{"FileInputStream", "BufferedInputStream", "InputStream", "Stream",
                                              "Reader", "aba", "abba"};
  switch (testkit::uniform(rng, 0, 4)) {
    case 0: return AffixLattice::bot();
    case 1: return AffixLattice::top();
    case 2: {
      const std::string& w = testkit::pick(rng, words);
      return AffixLattice::pattern(w.substr(0, testkit::uniform(rng, 0, 2)), w.substr(w.size() - testkit::uniform(rng, 0, 3)));
    }
    default: return AffixLattice::exactly(testkit::pick(rng, words));
  }
}

LabelSetLattice random_set(testkit::Rng& rng) {
  if (testkit::chance(rng, 0.2)) return LabelSetLattice::bot();
  std::set<std::string> s;
  for (const char* l : {"IF", "CATCH", "LOOP"})
    if (testkit::chance(rng, 0.5)) s.insert(l);
  return LabelSetLattice::of(s);
}

template <class L, class Gen>
void check_join_laws(Gen gen) {
  testkit::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const L a = gen(rng), b = gen(rng), c = gen(rng);
    EXPECT_EQ(a.join(b), b.join(a));
    EXPECT_EQ(a.join(b).join(c), a.join(b.join(c)));
    EXPECT_EQ(a.join(a), a);
    EXPECT_EQ(a.join(L::bot()), a);
    EXPECT_TRUE(a.join(L::top()).is_top());
  }
}

}  // namespace

TEST(Lattice, ConstJoinLaws) { check_join_laws<ConstLattice<std::string>>(random_const); }
TEST(Lattice, AffixJoinLaws) { check_join_laws<AffixLattice>(random_affix); }
TEST(Lattice, LabelSetJoinLaws) { check_join_laws<LabelSetLattice>(random_set); }

TEST(Lattice, AffixJoinKeepsCommonSuffix) {
  const auto j = AffixLattice::exactly("BufferedInputStream").join(AffixLattice::exactly("FileInputStream"));
  EXPECT_EQ(j, AffixLattice::pattern("", "InputStream"));
  EXPECT_EQ(encode(j), "affix:*InputStream");
  EXPECT_TRUE(j.admits(std::string("ObjectInputStream")));
  EXPECT_FALSE(j.admits(std::string("String")));
  EXPECT_FALSE(j.admits(std::nullopt));
  EXPECT_TRUE(AffixLattice::exactly("Cursor").join(AffixLattice::exactly("Cursor")).is_exact());
  EXPECT_TRUE(AffixLattice::exactly("abc").join(AffixLattice::exactly("xyz")).is_top());
}

TEST(Lattice, NumParaJoinIsTop) {
  EXPECT_TRUE(ConstLattice<int>::exactly(1).join(ConstLattice<int>::exactly(2)).is_top());
}

TEST(Lattice, TransControlDepJoinIsIntersection) {
  const auto j = LabelSetLattice::of({"IF", "CATCH"}).join(LabelSetLattice::of({"IF"}));
  EXPECT_EQ(j, LabelSetLattice::of({"IF"}));
  EXPECT_TRUE(j.admits({"IF", "LOOP"}));
  EXPECT_FALSE(j.admits({"LOOP"}));
  EXPECT_TRUE(LabelSetLattice::of({"IF"}).join(LabelSetLattice::of({"CATCH"})).is_top());
}

TEST(Lattice, AllTopBundleAdmitsAnyNodeOfItsKind) {
  testkit::Rng rng(8);
  const Pdg g = testkit::random_pdg(rng, testkit::GraphShape{});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const NodeKind k = g.node(i).kind;
    EXPECT_TRUE(satisfies(g, i, NodePredicates::any(k)));
    EXPECT_FALSE(satisfies(g, i, NodePredicates::any(k == NodeKind::Data ? NodeKind::Action : NodeKind::Data)));
  }
}

TEST(Lattice, DataTypeChecks) {
  Node cursor{"c", NodeKind::Data};
  cursor.data_type = "Cursor";
  Node str{"s", NodeKind::Data};
  str.data_type = "String";
  const Pdg g({cursor, str}, {});
  NodePredicates p = NodePredicates::any(NodeKind::Data);
  p.data_type = AffixLattice::exactly("Cursor");
  EXPECT_TRUE(satisfies(g, 0, p));
  p.data_type = AffixLattice::pattern("", "InputStream");
  EXPECT_FALSE(satisfies(g, 1, p));
}

TEST(Lattice, FromNodeIsSatisfiedByItsNode) {
  testkit::Rng rng(21);
  testkit::GraphShape shape;
  shape.max_nodes = 12;
  for (int t = 0; t < 50; ++t) {
    const Pdg g = testkit::random_pdg(rng, shape);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_TRUE(satisfies(g, i, from_node(g, i)));
      EXPECT_TRUE(testkit::oracle_satisfies(g, i, from_node(g, i)));
    }
  }
}

TEST(Lattice, SatisfactionIsMonotoneUnderJoin) {
  testkit::Rng rng(22);
  testkit::GraphShape shape;
  shape.max_nodes = 10;
  for (int t = 0; t < 200; ++t) {
    const Pdg g = testkit::random_pdg(rng, shape);
    const std::size_t i = static_cast<std::size_t>(testkit::uniform(rng, 0, static_cast<int>(g.size()) - 1));
    const std::size_t j = static_cast<std::size_t>(testkit::uniform(rng, 0, static_cast<int>(g.size()) - 1));
    if (g.node(i).kind != g.node(j).kind) continue;
    const NodePredicates a = from_node(g, i);
    const NodePredicates b = from_node(g, j);
    const NodePredicates ab = join(a, b);
    for (std::size_t n = 0; n < g.size(); ++n) {
      if (satisfies(g, n, a)) EXPECT_TRUE(satisfies(g, n, ab));
      if (satisfies(g, n, b)) EXPECT_TRUE(satisfies(g, n, ab));
    }
  }
}

TEST(Lattice, JoinOfDifferentKindsThrows) {
  EXPECT_THROW(join(NodePredicates::any(NodeKind::Data), NodePredicates::any(NodeKind::Action)),
               std::invalid_argument);
}

TEST(Lattice, OutputIgnoredOnlyHoldsForActions) {
  Node call{"a", NodeKind::Action, "f"};
  const Pdg g({Node{"d", NodeKind::Data}, call}, {Edge{"d", "a", EdgeLabel::recv()}});
  NodePredicates data = NodePredicates::any(NodeKind::Data);
  data.output_ignored = ConstLattice<bool>::exactly(true);
  EXPECT_FALSE(satisfies(g, 0, data));
  NodePredicates act = NodePredicates::any(NodeKind::Action);
  act.output_ignored = ConstLattice<bool>::exactly(true);
  EXPECT_TRUE(satisfies(g, 1, act));
  act.output_ignored = ConstLattice<bool>::exactly(false);
  EXPECT_FALSE(satisfies(g, 1, act));
}

TEST(Lattice, EncodingsRoundTrip) {
  testkit::Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    const auto c = random_const(rng);
    if (!c.is_bot()) EXPECT_EQ(decode_const_string(encode(c), "f"), c);
    const auto a = random_affix(rng);
    if (!a.is_bot()) EXPECT_EQ(decode_affix(encode(a), "f"), a);
    const auto s = random_set(rng);
    if (!s.is_bot()) EXPECT_EQ(decode_label_set(encode(s), "f"), s);
  }
  EXPECT_EQ(decode_const_int(encode(ConstLattice<int>::exactly(3)), "n"), ConstLattice<int>::exactly(3));
  EXPECT_EQ(decode_const_bool(encode(ConstLattice<bool>::exactly(true)), "b"), ConstLattice<bool>::exactly(true));
  EXPECT_THROW(decode_const_int("exact:x", "numPara"), SchemaError);
  EXPECT_THROW(decode_affix("nonsense", "dataType"), SchemaError);
}
