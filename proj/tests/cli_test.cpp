#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dtcausal/cli.hpp"
#include "dtcausal/dsl.hpp"
#include "dtcausal/model_io.hpp"
#include "support.hpp"

using namespace dtc;
using dtc::testing::corpus;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / ("cadt_cli_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::string canonical(const std::string& file) {
  const GraphDoc d = load_graph_doc(corpus(file));
  return format_dag(d.dag, d.name);
}

}  // namespace

TEST(CliDsep, QueryHolds) {
  const CliRun r = run({"dsep", corpus("fig1.cadt"), "--query", "Y _||_ F_T | T"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "holds: Y _||_ F_T | T\n");
}

TEST(CliDsep, QueryFails) {
  EXPECT_EQ(run({"dsep", corpus("fig2.cadt"), "--query", "Y _||_ F_X | X"}).code, kExitFails);
  EXPECT_EQ(run({"dsep", corpus("fig2.cadt"), "--query", "Y _||_ F_X | X", "--paths"}).code, kExitFails);
}

TEST(CliDsep, FileStatements) {
  const CliRun r = run({"dsep", corpus("fig2.cadt")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("exclusion: Y _||_ Z | F_X, U, X: holds"), std::string::npos);
  EXPECT_EQ(run({"dsep", corpus("chain.cadt")}).code, kExitUsage);
}

TEST(CliDsep, JsonOutput) {
  const CliRun r = run({"--json", "dsep", corpus("fig9.cadt")});
  ASSERT_EQ(r.code, kExitOk);
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.at("all_hold").get<bool>());
  EXPECT_EQ(j.at("statements").at(0).at("name"), "y_screened");
}

TEST(CliDsep, BadStatementIsUsageError) {
  const CliRun r = run({"dsep", corpus("fig1.cadt"), "--query", "Y _||_ Q"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("unknown variable 'Q'"), std::string::npos);
  EXPECT_TRUE(r.out.empty());
}

TEST(CliDerive, IntersectionNotDerivable) {
  const CliRun r = run({"derive", corpus("remark2.eci"), "--target", "X _||_ Y,Z | W"});
  EXPECT_EQ(r.code, kExitUndecided);
  EXPECT_NE(r.out.find("not derivable"), std::string::npos);
}

TEST(CliDerive, ContractionWithTrace) {
  const CliRun r = run({"derive", corpus("contraction.eci"), "--target", "X _||_ Y, W | Z"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("[P5]"), std::string::npos);
  const CliRun j = run({"--json", "derive", corpus("contraction.eci"), "--target", "X _||_ Y, W | Z"});
  const Json doc = Json::parse(j.out);
  EXPECT_TRUE(doc.at("derived").get<bool>());
  EXPECT_EQ(doc.at("trace").back().at("statement"), "X _||_ W, Y | Z");
}

TEST(CliDerive, RegimeFlag) {
  const std::vector<std::string> base{"derive", corpus("two_interventions.eci"), "--target", "F2 _||_ F1 | V1, X1"};
  EXPECT_EQ(run(base).code, kExitUsage);
  auto with = base;
  with.push_back("--regimes-stochastic");
  EXPECT_EQ(run(with).code, kExitOk);
}

TEST(CliAugment, IttMatchesGolden) {
  const CliRun r = run({"augment", corpus("fig8.cadt"), "--itt", "--name", "fig10"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, canonical("fig10.cadt"));
  const CliRun a = run({"augment", corpus("fig8.cadt"), "--name", "fig9"});
  EXPECT_EQ(a.out, canonical("fig9.cadt"));
  EXPECT_EQ(run({"augment", corpus("fig1.cadt")}).code, kExitUsage);
}

TEST(CliAugment, OutputReparsesToGoldenGraph) {
  const CliRun r = run({"augment", corpus("fig8.cadt"), "--itt"});
  EXPECT_EQ(parse_graph_doc(r.out).dag, load_graph_doc(corpus("fig10.cadt")).dag);
}

TEST(CliProject, DropsNodes) {
  const CliRun r = run({"project", corpus("fig4.cadt"), "--drop", "T*", "--name", "fig5"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, canonical("fig5.cadt"));
  const CliRun two = run({"project", corpus("fig10.cadt"), "--drop", "X0*,X1*", "--name", "fig9"});
  EXPECT_EQ(two.out, canonical("fig9.cadt"));
  EXPECT_EQ(run({"project", corpus("fig10.cadt"), "--drop", "nope"}).code, kExitUsage);
}

TEST(CliProject, NotProjectable) {
  const std::string f = temp_file("cycle.cadt",
                                  "graph c { node A; node B; node C; node D;\n"
                                  "node L0 latent; node L1 latent; node L2 latent; node L3 latent;\n"
                                  "edge L0 -> A; edge L0 -> B; edge L1 -> B; edge L1 -> C;\n"
                                  "edge L2 -> C; edge L2 -> D; edge L3 -> D; edge L3 -> A; }\n");
  const CliRun r = run({"project", f, "--drop", "L0,L1,L2,L3"});
  EXPECT_EQ(r.code, kExitFails);
  EXPECT_NE(r.err.find("not DAG-projectable"), std::string::npos);
}

TEST(CliVerify, Checks) {
  const std::string m4 = corpus("fig4_model.json");
  const std::string m6 = corpus("fig6_model.json");
  EXPECT_EQ(run({"verify", m4, "--check", "eci", "Y _||_ F_T | T, T*"}).code, kExitOk);
  EXPECT_EQ(run({"verify", m4, "--check", "eci", "Y _||_ F_T | T"}).code, kExitFails);
  EXPECT_EQ(run({"verify", m4, "--check", "consistency"}).code, kExitOk);
  EXPECT_EQ(run({"verify", corpus("inconsistent.json"), "--check", "consistency"}).code, kExitFails);
  EXPECT_EQ(run({"verify", m6, "--check", "ignorability", "--y", "Y"}).code, kExitOk);
  EXPECT_EQ(run({"verify", m4, "--check", "ignorability", "--y", "Y", "--action", "T"}).code, kExitFails);
  EXPECT_EQ(run({"verify", m4, "--check", "ignorability"}).code, kExitUsage);
  EXPECT_EQ(run({"verify", m4, "--check", "bogus"}).code, kExitUsage);
}

TEST(CliVerify, SufficientCovariate) {
  std::mt19937_64 rng(1);
  const auto m = random_itt_model(load_graph_doc(corpus("fig5star.cadt")).dag, rng);
  const std::string f = temp_file("cov.json", model_to_json(m).dump());
  EXPECT_EQ(run({"verify", f, "--check", "sufficient-covariate", "X", "--y", "Y"}).code, kExitOk);
  const CliRun j = run({"--json", "verify", f, "--check", "sufficient-covariate", "X", "--y", "Y"});
  EXPECT_TRUE(Json::parse(j.out).at("holds").get<bool>());
}

TEST(CliIdentify, Certificates) {
  const CliRun ok = run({"identify", corpus("fig8.cadt"), "--y", "Y", "--x0", "X0", "--x1", "X1", "--z", "Z"});
  EXPECT_EQ(ok.code, kExitOk);
  EXPECT_NE(ok.out.find("sum_Z p(Y | X1, Z) p(Z | X0)"), std::string::npos);
  const CliRun bad = run({"identify", corpus("fig8_hy.cadt"), "--y", "Y", "--x0", "X0", "--x1", "X1", "--z", "Z"});
  EXPECT_EQ(bad.code, kExitFails);
  EXPECT_NE(bad.out.find("not identified"), std::string::npos);
}

TEST(CliGformula, ComparesWithIntervention) {
  std::mt19937_64 rng(2);
  const auto m = random_itt_model(load_graph_doc(corpus("fig10.cadt")).dag, rng);
  const std::string f = temp_file("g.json", model_to_json(m).dump());
  const CliRun r = run({"--json", "gformula", f, "--y", "Y=1", "--x0", "X0=0", "--x1", "X1=1", "--z", "Z", "--compare"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_NEAR(j.at("gformula").get<double>(), j.at("interventional").get<double>(), 1e-12);
  EXPECT_EQ(run({"gformula", f, "--y", "Y", "--x0", "X0=0", "--x1", "X1=1", "--z", "Z"}).code, kExitUsage);
}

TEST(CliGformula, PositivityExitCode) {
  std::mt19937_64 rng(3);
  const Dag g = load_graph_doc(corpus("fig10.cadt")).dag;
  auto cpts = random_itt_model(g, rng).cpts();
  for (auto& c : cpts)
    if (c.child == "X0*") c.rows = {{1.0, 0.0}};
  const std::string f = temp_file("pos.json", model_to_json(MultiRegimeModel::itt(g, cpts)).dump());
  const CliRun r = run({"gformula", f, "--y", "Y=1", "--x0", "X0=1", "--x1", "X1=1", "--z", "Z"});
  EXPECT_EQ(r.code, kExitUndecided);
  EXPECT_NE(r.err.find("positivity"), std::string::npos);
}

TEST(CliEffects, AceEttLognormal) {
  EXPECT_EQ(run({"ace", corpus("fig4_model.json"), "--y", "Y"}).out, "ace: 0.3\n");
  EXPECT_EQ(run({"ett", corpus("fig4_model.json"), "--y", "Y", "--action", "T"}).out, "ett: 0.3\n");
  EXPECT_EQ(run({"ace", corpus("aspirin.json")}).out, "ace: -0.3\n");
  const CliRun ln = run({"--json", "lognormal", "--mu1", "1", "--mu0", "0", "--sigma2", "2"});
  ASSERT_EQ(ln.code, kExitOk);
  EXPECT_NEAR(Json::parse(ln.out).at("ratio").get<double>(), std::exp(1.0), 1e-12);
  EXPECT_EQ(run({"lognormal", "--mu1", "1", "--mu0", "0", "--sigma2", "0"}).code, kExitUsage);
}

TEST(CliSimulate, Deterministic) {
  const CliRun a = run({"simulate", corpus("randomized.json"), "--n", "500", "--seed", "4"});
  const CliRun b = run({"simulate", corpus("randomized.json"), "--n", "500", "--seed", "4"});
  EXPECT_EQ(a.code, kExitOk);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("treated: n="), std::string::npos);
  EXPECT_EQ(run({"simulate", corpus("randomized.json"), "--n", "0", "--seed", "4"}).code, kExitUsage);
}

TEST(CliSolve, Umbrella) {
  const CliRun r = run({"solve", corpus("umbrella.json")});
  EXPECT_EQ(r.out, "L(0) = 0.3\nL(1) = 0\noptimal: 1\n");
}

TEST(CliRender, DotToStdoutAndFile) {
  const CliRun r = run({"render", corpus("fig6.cadt"), "--dot", "-"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.rfind("digraph \"fig6\" {", 0), 0u);
  const auto path = (std::filesystem::temp_directory_path() / "cadt_cli_test_out.dot").string();
  EXPECT_EQ(run({"render", corpus("fig6.cadt"), "--dot", path}).code, kExitOk);
  EXPECT_EQ(dtc::read_file(path), r.out);
}

TEST(CliPrint, CanonicalForm) {
  const CliRun r = run({"print", corpus("fig8.cadt")});
  EXPECT_EQ(r.out, format_graph_doc(load_graph_doc(corpus("fig8.cadt"))));
  const CliRun j = run({"--json", "print", corpus("fig6.cadt")});
  const Json doc = Json::parse(j.out);
  EXPECT_EQ(doc.at("nodes").size(), 4u);
  EXPECT_TRUE(doc.at("edges").at(0).contains("dashed"));
}

TEST(CliUsage, Errors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"dsep"}).code, kExitUsage);
  EXPECT_EQ(run({"dsep", corpus("missing.cadt")}).code, kExitUsage);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("derive"), std::string::npos);
}

TEST(CliUsage, ParseDiagnosticOnStderr) {
  const std::string f = temp_file("bad.cadt", "graph g {\n  node A;\n  edge A -> A;\n}\n");
  const CliRun r = run({"print", f});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("3:3: self-loop"), std::string::npos);
}

TEST(CliUsage, FuzzedFilesExitTwo) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    std::string s(rng() % 60, ' ');
    for (auto& c : s) c = static_cast<char>(rng() % 256);
    const std::string f = temp_file("fuzz.cadt", s);
    const CliRun r = run({"print", f});
    ASSERT_EQ(r.code, kExitUsage);
    ASSERT_FALSE(r.err.empty());
  }
}
