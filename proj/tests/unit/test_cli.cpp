#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>

#include "rulesynth/rule.hpp"
#include "testkit.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = RULESYNTH_CLI;
const std::string kSource = RULESYNTH_SOURCE_DIR;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = testkit::temp_dir("cli");
  const fs::path out = dir / ("out" + std::to_string(counter));
  const fs::path err = dir / ("err" + std::to_string(counter++));
  const std::string cmd = "'" + kCli + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = testkit::read_text(out);
  r.err = testkit::read_text(err);
  return r;
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

const fs::path kCorpus = fs::path(kSource) / "corpora" / "check-movetofirst";
const fs::path kRefinements = fs::path(kSource) / "corpora" / "check-movetofirst-refinements";
const fs::path kGolden = fs::path(kSource) / "tests" / "data" / "check-movetofirst.rule";

}  // namespace

TEST(Cli, SynthWritesRuleAndReport) {
  const fs::path dir = testkit::temp_dir("cli-synth");
  const CliRun r = run("synth " + quoted(kCorpus) + " -o " + quoted(dir / "r.rule"));
  ASSERT_EQ(r.code, 0) << r.err;
  const rulesynth::Rule rule = rulesynth::load_rule_file((dir / "r.rule").string());
  EXPECT_EQ(rule.pre.size(), 2u);
  EXPECT_EQ(rule.name, "check-movetofirst");
  EXPECT_TRUE(fs::exists(dir / "r.rule.report"));
}

TEST(Cli, SynthToStdout) {
  const CliRun r = run("synth " + quoted(kCorpus) + " --name demo");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(rulesynth::read_rule(r.out).name, "demo");
}

TEST(Cli, EmptyViolatingSetIsUsageError) {
  const fs::path dir = testkit::temp_dir("cli-empty");
  fs::create_directories(dir / "violating");
  testkit::write_text(dir / "conforming" / "a.mj", "void f(Foo x) { x.run(); }\n");
  const CliRun r = run("synth " + quoted(dir));
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("no violating"), std::string::npos) << r.err;
}

TEST(Cli, SingleChangeCorpusGivesProjectedBefore) {
  const fs::path dir = testkit::temp_dir("cli-one");
  fs::create_directories(dir / "changes");
  fs::copy(kCorpus / "changes" / "c1", dir / "changes" / "c1", fs::copy_options::recursive);
  const CliRun r = run("synth " + quoted(dir));
  ASSERT_EQ(r.code, 0) << r.err;
  const rulesynth::Rule rule = rulesynth::read_rule(r.out);
  EXPECT_TRUE(rule.post.empty());
  EXPECT_GE(rule.pre.size(), 2u);
}

TEST(Cli, SynthesisFailureExitsTwo) {
  const fs::path dir = testkit::temp_dir("cli-fail");
  testkit::write_text(dir / "violating" / "a.mj", "void f(Cursor c) { c.moveToFirst(); }\n");
  testkit::write_text(dir / "conforming" / "b.mj", "void f(Cursor c) { c.moveToFirst(); }\n");
  const CliRun r = run("synth " + quoted(dir));
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, CheckReportsDetectionsPerFile) {
  const CliRun r = run("check " + quoted(kGolden) + " " + quoted(kCorpus) + " " + quoted(kRefinements));
  EXPECT_EQ(r.code, 1) << r.err;
  EXPECT_EQ(count_lines(r.out), 4u) << r.out;
  for (int c = 1; c <= 4; ++c)
    EXPECT_NE(r.out.find("changes/c" + std::to_string(c) + "/before.mj"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("after.mj"), std::string::npos);
  EXPECT_NE(r.out.find("\tcheck-movetofirst\tx0="), std::string::npos);
}

TEST(Cli, CheckIsDeterministicAcrossJobCounts) {
  const CliRun one = run("check -j 1 " + quoted(kGolden) + " " + quoted(kCorpus) + " " + quoted(kRefinements));
  const CliRun many = run("check -j 8 " + quoted(kGolden) + " " + quoted(kCorpus) + " " + quoted(kRefinements));
  EXPECT_EQ(one.out, many.out);
}

TEST(Cli, CheckCleanInputExitsZeroAndLogsPrefilter) {
  const fs::path dir = testkit::temp_dir("cli-clean");
  testkit::write_text(dir / "a.mj", "void f(Foo x) { x.run(); }\n");
  const CliRun r = run("check " + quoted(kGolden) + " " + quoted(dir / "a.mj"));
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("1 prefiltered"), std::string::npos) << r.err;
}

TEST(Cli, CheckRejectsBadInputs) {
  const fs::path dir = testkit::temp_dir("cli-bad");
  testkit::write_text(dir / "bad.rule", "{ nope");
  testkit::write_text(dir / "bad.mj", "void f( {");
  EXPECT_EQ(run("check " + quoted(dir / "bad.rule") + " " + quoted(kCorpus)).code, 3);
  EXPECT_EQ(run("check " + quoted(kGolden) + " " + quoted(dir / "bad.mj")).code, 3);
  EXPECT_EQ(run("check " + quoted(kGolden) + " " + quoted(dir / "missing.mj")).code, 3);
  EXPECT_EQ(run("frobnicate").code, 3);
  EXPECT_EQ(run("").code, 3);
}

TEST(Cli, RefineSessionLifecycle) {
  const fs::path dir = testkit::temp_dir("cli-refine");
  const fs::path session = dir / "session";
  ASSERT_EQ(run("synth " + quoted(kCorpus) + " --session " + quoted(session)).code, 0);
  EXPECT_TRUE(fs::exists(session / "rules" / "000.rule"));

  const fs::path fp = kRefinements / "02-title-guard.mj";
  const CliRun first = run("refine " + quoted(session) + " " + quoted(fp));
  ASSERT_EQ(first.code, 0) << first.err;
  EXPECT_NE(first.out.find("converged=false"), std::string::npos) << first.out;
  EXPECT_TRUE(fs::exists(session / "rules" / "001.rule"));
  ASSERT_EQ(run("refine " + quoted(session) + " " + quoted(fp)).code, 0);
  const CliRun third = run("refine " + quoted(session) + " " + quoted(fp));
  ASSERT_EQ(third.code, 0) << third.err;
  EXPECT_NE(third.out.find("converged=true"), std::string::npos) << third.out;

  testkit::write_text(dir / "clean.mj", "void f(Foo x) { x.run(); }\n");
  const CliRun clean = run("refine " + quoted(session) + " " + quoted(dir / "clean.mj"));
  EXPECT_EQ(clean.code, 3);
  EXPECT_NE(clean.err.find("not a detection"), std::string::npos) << clean.err;

  const CliRun adversarial = run("refine " + quoted(session) + " " + quoted(kCorpus / "changes" / "c1" / "before.mj"));
  EXPECT_EQ(adversarial.code, 2) << adversarial.err;
  EXPECT_FALSE(adversarial.err.empty());
  EXPECT_FALSE(fs::exists(session / "rules" / "004.rule"));
}

TEST(Cli, ExplainRendersFormulas) {
  const CliRun r = run("explain " + quoted(kGolden));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("output-ignored(x1)"), std::string::npos);
  EXPECT_NE(r.out.find("x0 -recv-> x1"), std::string::npos);
  EXPECT_NE(r.out.find("digraph"), std::string::npos);

  const fs::path dir = testkit::temp_dir("cli-explain");
  rulesynth::Rule empty = rulesynth::load_rule_file(kGolden.string());
  empty.post.clear();
  rulesynth::save_rule_file(empty, (dir / "e.rule").string());
  const CliRun e = run("explain " + quoted(dir / "e.rule"));
  ASSERT_EQ(e.code, 0);
  EXPECT_NE(e.out.find("postcondition: False"), std::string::npos);
}

TEST(Cli, PdgCommandEmitsInterchange) {
  const CliRun r = run("pdg " + quoted(kCorpus / "changes" / "c1" / "before.mj"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\"moveToFirst\""), std::string::npos);
  const fs::path dir = testkit::temp_dir("cli-pdg");
  testkit::write_text(dir / "g.mj", "void f(int a) { if (a == 1) { return; } }\n");
  EXPECT_NE(run("pdg " + quoted(dir / "g.mj")).out.find("<rel_op>"), std::string::npos);
  EXPECT_NE(run("pdg --raw " + quoted(dir / "g.mj")).out.find("\"==\""), std::string::npos);
}

TEST(Cli, ConfigFileAndFlags) {
  const fs::path dir = testkit::temp_dir("cli-config");
  testkit::write_text(dir / "good.json", R"({"delta": 0.2, "radius": 2})");
  testkit::write_text(dir / "bad.json", R"({"speed": 3})");
  const CliRun good = run("synth " + quoted(kCorpus) + " --config " + quoted(dir / "good.json") + " --max-partitions 9");
  ASSERT_EQ(good.code, 0) << good.err;
  const rulesynth::Rule rule = rulesynth::read_rule(good.out);
  EXPECT_EQ(rule.provenance.settings.at("delta"), "0.2000");
  EXPECT_EQ(rule.provenance.settings.at("radius"), "2");
  EXPECT_EQ(rule.provenance.settings.at("maxPartitions"), "9");
  EXPECT_EQ(run("synth " + quoted(kCorpus) + " --config " + quoted(dir / "bad.json")).code, 3);
  EXPECT_EQ(run("synth " + quoted(kCorpus) + " --delta -1").code, 3);
}

TEST(Cli, DumpIlpWritesLpFiles) {
  const fs::path dir = testkit::temp_dir("cli-dump");
  ASSERT_EQ(run("synth " + quoted(kCorpus) + " --dump-ilp " + quoted(dir / "lp")).code, 0);
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "lp")) files += e.path().extension() == ".lp";
  EXPECT_GT(files, 0u);
}
