#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

using json = nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun pcfl(const std::string& args) {
  std::string cmd = std::string(PCFL_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string corpus(const std::string& name) { return std::string(PCFL_CORPUS_DIR) + "/" + name + ".pcfl"; }

std::string temp_file(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("pcfl_cli_" + name);
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST(Cli, Check) {
  CliRun r = pcfl("check " + corpus("exp"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "bool -> bool -> bool\n");
  EXPECT_EQ(pcfl("check " + temp_file("bad_syntax", "\\x:bool")).code, 2);
  EXPECT_EQ(pcfl("check " + temp_file("bad_type", "1 + true")).code, 2);
}

TEST(Cli, EvalJson) {
  CliRun r = pcfl("eval --json " + corpus("half_id"));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["mass"], "1/2");
  ASSERT_EQ(j["support"].size(), 1u);
  EXPECT_EQ(j["support"][0]["prob"], "1/2");
  EXPECT_EQ(j["deficit"], "0");
  EXPECT_EQ(j["exact"], true);
}

TEST(Cli, EquivVerdicts) {
  CliRun r = pcfl("equiv --json " + corpus("exp") + " " + corpus("rnd"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(json::parse(r.out)["verdict"], "equivalent_up_to_bound");
  r = pcfl("equiv --json --test-depth 5 " + corpus("cex_m") + " " + corpus("cex_n"));
  EXPECT_EQ(r.code, 1);
  json j = json::parse(r.out);
  EXPECT_EQ(j["verdict"], "not_equivalent");
  EXPECT_EQ(j["p_left"], "1/4");
  EXPECT_EQ(j["p_right"], "1/2");
  EXPECT_EQ(pcfl("equiv " + corpus("id") + " " + corpus("arith")).code, 2);
}

TEST(Cli, Distinguish) {
  EXPECT_EQ(pcfl("distinguish " + corpus("exp_fst") + " " + corpus("exp_snd")).out, "none\n");
  CliRun r = pcfl("distinguish " + corpus("id") + " " + corpus("not"));
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, Sim) {
  CliRun r = pcfl("sim --json " + corpus("cex_m") + " " + corpus("cex_n"));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["left_below_right"], false);
  EXPECT_EQ(j["right_below_left"], false);
}

TEST(Cli, Disentangle) {
  CliRun r = pcfl("disentangle " + temp_file("ok.json", R"({"p":["1/2","1/2"],"r":{"1":"1/2","2":"1/2"}})"));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_EQ(j["s"]["1|1"], "1");
  EXPECT_EQ(j["s"]["2|2"], "1");
  r = pcfl("disentangle " + temp_file("bad.json", R"({"p":["1"],"r":{}})"));
  EXPECT_EQ(json::parse(r.out)["invalid_cut"], json::array({1}));
}

TEST(Cli, FragmentJson) {
  CliRun r = pcfl("fragment --depth 2 " + corpus("id"));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_TRUE(j.contains("states"));
  EXPECT_GT(j["states"].size(), 1u);
}

TEST(Cli, CompileTest) {
  CliRun r = pcfl("compile-test --json 'eval.w' 'bool -> bool'");
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  EXPECT_NE(j["C"].get<std::string>().find("[.]"), std::string::npos);
}

TEST(Cli, SpotCheckContextsFile) {
  std::string ctx = temp_file("ctx.txt", "# observe the projection\n(\\x:bool * (bool -> bool). (snd x) (fst x)) ([.] true false)\n");
  CliRun r = pcfl("spot-check --json --contexts " + ctx + " " + corpus("cpa_fst") + " " + corpus("cpa_snd"));
  ASSERT_EQ(r.code, 0);
  json j = json::parse(r.out);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["dist_left"]["support"][0]["value"], "true");
  EXPECT_EQ(j[0]["dist_right"]["support"][0]["value"], "false");
}

TEST(Cli, Corpus) {
  CliRun r = pcfl("corpus --dir " + std::string(PCFL_CORPUS_DIR));
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, ResourceLimit) {
  CliRun r = pcfl("equiv --state-cap 3 " + corpus("exp") + " " + corpus("rnd"));
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, Embed) {
  CliRun r = pcfl("embed " + corpus("id"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "\\x. x\n");
}
