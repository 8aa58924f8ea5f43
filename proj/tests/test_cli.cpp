#include "zeno/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "zeno-lab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = zeno::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

double field(const std::string& text, const std::string& key) {
  const auto pos = text.find(key + "=");
  if (pos == std::string::npos) return -1.0;
  return std::stod(text.substr(pos + key.size() + 1));
}

}  // namespace

TEST(Cli, VerifyExp) {
  const Outcome o = run({"functions", "verify", "--id", "exp"});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(contains(o.out, "admissible=true"));
  EXPECT_TRUE(contains(o.out, "im_nonpositive=false"));
  EXPECT_TRUE(contains(o.out, "on grid"));
}

TEST(Cli, VerifyClassification) {
  for (const char* id : {"resolvent-1", "resolvent-2"}) {
    const Outcome o = run({"functions", "verify", "--id", id});
    EXPECT_EQ(o.code, 0);
    EXPECT_TRUE(contains(o.out, "admissible=true")) << id;
    EXPECT_TRUE(contains(o.out, "im_nonpositive=true")) << id;
  }
  const Outcome r3 = run({"functions", "verify", "--id", "resolvent-3"});
  EXPECT_TRUE(contains(r3.out, "im_nonpositive=false"));
}

TEST(Cli, VerifyUnknownIdIsValidationError) {
  EXPECT_EQ(run({"functions", "verify", "--id", "sinc"}).code, 1);
}

TEST(Cli, ListShowsEveryBuiltin) {
  const Outcome o = run({"functions", "list"});
  EXPECT_EQ(o.code, 0);
  for (const char* id : {"exp", "resolvent-1", "resolvent-2", "resolvent-3", "cutoff-exp-[0,pi)"})
    EXPECT_TRUE(contains(o.out, id)) << id;
}

TEST(Cli, MissingConfigExitsOne) {
  const Outcome o = run({"run", "--config", "missing.json"});
  EXPECT_EQ(o.code, 1);
  EXPECT_FALSE(o.err.empty());
}

TEST(Cli, BadArgumentsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"functions"}).code, 1);
  EXPECT_EQ(run({"counterexample", "--n", "512"}).code, 1);
  EXPECT_EQ(run({"counterexample", "--n", "500", "--t", "0.1"}).code, 1);
  EXPECT_EQ(run({"counterexample", "--n", "512", "--t", "-1"}).code, 1);
  EXPECT_EQ(run({"models", "describe", "--spec", "{not json"}).code, 1);
  EXPECT_EQ(run({"models", "describe", "--spec", R"({"kind":"random","dim":4,"rank":9})"}).code, 1);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST(Cli, DescribeModel) {
  const Outcome o = run({"models", "describe", "--spec", R"({"kind":"laplacian","dim":8,"window":[3,6]})"});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(contains(o.out, "non_negative=true"));
  EXPECT_GT(field(o.out, "commutator_norm"), 1e-3);
  const Outcome m = run({"models", "describe", "--spec", R"({"kind":"momentum-circle","dim":64})"});
  EXPECT_EQ(m.code, 0);
  EXPECT_TRUE(contains(m.out, "out_of_assumption=true"));
  EXPECT_TRUE(contains(m.out, "non_negative=false"));
}

TEST(Cli, Counterexample) {
  const Outcome o = run({"counterexample", "--n", "512", "--t", "0.1"});
  EXPECT_EQ(o.code, 0);
  const double w = field(o.out, "contraction_witness");
  EXPECT_GE(w, 0.0);
  EXPECT_LE(w, 0.9);
  EXPECT_TRUE(contains(o.out, "discrete circle"));
}

TEST(Cli, RunWritesOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "zeno_lab_cli_run";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto config = dir / "config.json";
  std::ofstream(config) << R"({"model": {"kind": "laplacian", "dim": 8, "window": [3, 6]},
    "functions": ["resolvent-1"], "t_grid": [1], "n_list": [2, 4, 8, 16],
    "metrics": ["norm", "bound"], "output": ")"
                        << (dir / "out").string() << R"("})";
  const Outcome o = run({"run", "--config", config.string(), "--threads", "2"});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(contains(o.out, "cells=4"));
  for (const char* f : {"records.csv", "records.json", "summary.json"}) EXPECT_TRUE(std::filesystem::exists(dir / "out" / f));
}
