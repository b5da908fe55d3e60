#include <gtest/gtest.h>

#include <sstream>

#include <json.hpp>

#include "rjpois/cli.hpp"
#include "rjpois/io.hpp"
#include "rjpois/summary.hpp"
#include "support/oracles.hpp"

using namespace rjpois;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string simulate_dataset(const oracle::TempDir& dir) {
  const auto path = (dir / "d.csv").string();
  const auto r = cli({"simulate", "--k", "2", "--rates", "0.7,1.9", "--weights", "0.64,0.36",
                      "--n", "72", "--seed", "3", "--out", path});
  EXPECT_EQ(r.code, 0) << r.err;
  return path;
}

std::size_t count_lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST(Simulate, WritesDatasetAndTruth) {
  oracle::TempDir dir("cli");
  const auto path = simulate_dataset(dir);
  const auto d = load_csv(path);
  EXPECT_EQ(d.size(), 72u);
  const auto truth = oracle::read_file(dir / "d.truth.csv");
  EXPECT_EQ(truth.rfind("class_id,component\n", 0), 0u);
  EXPECT_EQ(count_lines(truth), 73u);
}

TEST(Simulate, IdenticalFlagsGiveIdenticalFiles) {
  oracle::TempDir a("cli");
  oracle::TempDir b("cli");
  simulate_dataset(a);
  simulate_dataset(b);
  EXPECT_EQ(oracle::read_file(a / "d.csv"), oracle::read_file(b / "d.csv"));
  EXPECT_EQ(oracle::read_file(a / "d.truth.csv"), oracle::read_file(b / "d.truth.csv"));
}

TEST(Simulate, InvalidSpecsExitTwo) {
  oracle::TempDir dir("cli");
  const auto out = (dir / "x.csv").string();
  EXPECT_EQ(cli({"simulate", "--rates", "2,1", "--weights", "0.5,0.5", "--out", out}).code, 2);
  EXPECT_EQ(cli({"simulate", "--k", "3", "--rates", "1,2", "--weights", "0.5,0.5", "--out", out})
                .code,
            2);
  EXPECT_EQ(cli({"simulate", "--rates", "1,2", "--weights", "0.5", "--out", out}).code, 2);
  EXPECT_EQ(cli({"simulate", "--rates", "1,x", "--weights", "0.5,0.5", "--out", out}).code, 2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Run, WritesExpectedFiles) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const auto out = dir / "run";
  const auto r = cli({"run", "--data", data, "--out", out.string(), "--sweeps", "2000",
                      "--chains", "4", "--seed", "5", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int c = 0; c < 4; ++c) {
    EXPECT_TRUE(fs::exists(out / ("chain_" + std::to_string(c) + ".csv")));
  }
  EXPECT_FALSE(fs::exists(out / "chain_4.csv"));
  EXPECT_TRUE(fs::exists(out / "diagnostics.csv"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  const auto summary = nlohmann::json::parse(oracle::read_file(out / "summary.json"));
  double total = 0.0;
  for (const auto& [k, p] : summary["model_probabilities"].items()) {
    total += p.get<double>();
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(summary["n_chains"], 4);
}

TEST(Run, SingleShortChain) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const auto out = dir / "run";
  const auto r = cli({"run", "--data", data, "--out", out.string(), "--chains", "1", "--sweeps",
                      "100", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  int files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    files += e.path().filename().string().rfind("chain_", 0) == 0;
  }
  EXPECT_EQ(files, 1);
  const auto lines = count_lines(oracle::read_file(out / "chain_0.csv"));
  EXPECT_LE(lines - 1, 100u);
  EXPECT_GE(lines, 2u);
}

TEST(Run, MissingDataFlagExitsTwo) {
  oracle::TempDir dir("cli");
  const auto r = cli({"run", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"run", "--data", "/nonexistent.csv", "--out", (dir / "o").string()}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({}).code, 2);
}

TEST(Run, BadConfigExitsTwo) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  oracle::write_file(dir / "c.toml", "alpha = 1\n");
  oracle::write_file(dir / "bad.json", R"({"alpha": 1, "gamma": 2})");
  for (const auto* cfg : {"c.toml", "bad.json", "missing.json"}) {
    const auto r = cli({"run", "--data", data, "--config", (dir / cfg).string(), "--out",
                        (dir / "o").string(), "--quiet"});
    EXPECT_EQ(r.code, 2) << cfg;
  }
  EXPECT_EQ(cli({"run", "--data", data, "--out", (dir / "o").string(), "--scheme", "gibbs"}).code,
            2);
}

TEST(Run, RepeatedRunIsByteIdentical) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const std::vector<std::string> common{"--data", data, "--sweeps", "1500", "--chains", "2",
                                        "--seed", "8", "--quiet"};
  for (const auto* name : {"a", "b"}) {
    auto args = std::vector<std::string>{"run", "--out", (dir / name).string()};
    args.insert(args.end(), common.begin(), common.end());
    ASSERT_EQ(cli(args).code, 0);
  }
  for (const auto* f : {"chain_0.csv", "chain_1.csv", "alloc_0.csv", "moves_1.csv",
                        "diagnostics.csv", "summary.json"}) {
    EXPECT_EQ(oracle::read_file(dir / "a" / f), oracle::read_file(dir / "b" / f)) << f;
  }
}

TEST(Config, ParsesKeysAndRejectsUnknown) {
  const auto cfg = parse_config(R"({
    "alpha": 2.0, "beta": 0.5, "delta": 1.5, "k_max": 10,
    "split_beta_u1": [3, 3], "split_beta_u2": [2, 4], "move_mix": 0.25,
    "b_k_default": 0.4, "sweeps": 5000, "burn_in": 100, "thin": 2, "chains": 2,
    "seeds": [11, 12], "scheme": "sm", "init_k": "random",
    "acceptance_form": "missing_data", "store_alloc": false})");
  EXPECT_EQ(cfg.hyper.alpha, 2.0);
  EXPECT_EQ(cfg.hyper.k_max, 10);
  EXPECT_EQ(cfg.hyper.split_u2.b, 4.0);
  EXPECT_EQ(cfg.hyper.move_mix, 0.25);
  EXPECT_EQ(cfg.up_prob, 0.4);
  EXPECT_EQ(cfg.run.burn_in, 100);
  EXPECT_EQ(cfg.run.seeds, (std::vector<std::uint64_t>{11, 12}));
  EXPECT_EQ(cfg.run.scheme, Scheme::split_merge);
  EXPECT_FALSE(cfg.run.init_k.has_value());
  EXPECT_EQ(cfg.run.form, AcceptanceForm::missing_data);
  EXPECT_FALSE(cfg.run.store_alloc);
  EXPECT_DOUBLE_EQ(cfg.move_probs().birth[5], 0.4);
  EXPECT_THROW(parse_config(R"({"colour": 1})"), ConfigError);
  EXPECT_THROW(parse_config("not json"), ConfigError);
  auto negative = parse_config(R"({"alpha": -1})");
  EXPECT_THROW(negative.finalize(), std::invalid_argument);
}

TEST(Config, BurnInDefaultsToTenthOfSweeps) {
  auto cfg = parse_config(R"({"sweeps": 3000})");
  cfg.finalize();
  EXPECT_EQ(cfg.run.burn_in, 300);
  cfg = parse_config(R"({"sweeps": 3000, "burn_in": 0})");
  cfg.finalize();
  EXPECT_EQ(cfg.run.burn_in, 0);
  cfg = parse_config("{}");
  cfg.finalize();
  EXPECT_EQ(cfg.run.burn_in, 10000);
}

TEST(Run, FlagsOverrideConfig) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  oracle::write_file(dir / "c.json",
                     R"({"sweeps": 400, "chains": 3, "thin": 1, "scheme": "bd", "burn_in": 0})");
  const auto r = cli({"run", "--data", data, "--config", (dir / "c.json").string(), "--out",
                      (dir / "o").string(), "--chains", "2", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto traces = read_traces(dir / "o");
  ASSERT_EQ(traces.size(), 2u);
  EXPECT_EQ(traces[0].records.size(), 400u);
  EXPECT_EQ(traces[0].tally.attempts(MoveKind::split), 0);
}

TEST(Run, MatchesLibraryCalls) {
  oracle::TempDir dir("cli");
  const auto data_path = simulate_dataset(dir);
  oracle::write_file(dir / "c.json", R"({"alpha": 1.5, "k_max": 12, "thin": 3, "seeds": [4, 9]})");
  const auto r = cli({"run", "--data", data_path, "--config", (dir / "c.json").string(), "--out",
                      (dir / "o").string(), "--sweeps", "1200", "--chains", "2", "--quiet"});
  ASSERT_EQ(r.code, 0) << r.err;

  auto cfg = load_config(dir / "c.json");
  cfg.run.sweeps = 1200;
  cfg.run.n_chains = 2;
  cfg.finalize();
  const auto data = load_csv(data_path);
  const auto traces = run_multichain(cfg.run, data, cfg.hyper, cfg.move_probs());
  EXPECT_EQ(read_traces(dir / "o"), traces);
  EXPECT_EQ(oracle::read_file(dir / "o" / "summary.json"),
            summary_json(traces, 0.95).dump(2) + "\n");
}

TEST(Summarize, RegenerationIsByteIdentical) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const auto run = dir / "run";
  ASSERT_EQ(cli({"run", "--data", data, "--out", run.string(), "--sweeps", "3000", "--chains",
                 "2", "--quiet"})
                .code,
            0);
  const auto first = oracle::read_file(run / "summary.json");
  const auto diag = oracle::read_file(run / "diagnostics.csv");
  const auto r = cli({"summarize", "--traces", run.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("k"), std::string::npos);
  EXPECT_EQ(oracle::read_file(run / "summary.json"), first);
  EXPECT_EQ(oracle::read_file(run / "diagnostics.csv"), diag);

  const auto other = dir / "other";
  ASSERT_EQ(cli({"summarize", "--traces", run.string(), "--out", other.string()}).code, 0);
  EXPECT_EQ(oracle::read_file(other / "summary.json"), first);
}

TEST(Summarize, UnvisitedKExitsOne) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const auto run = dir / "run";
  ASSERT_EQ(cli({"run", "--data", data, "--out", run.string(), "--sweeps", "500", "--chains", "2",
                 "--k-max", "3", "--quiet"})
                .code,
            0);
  const auto r = cli({"summarize", "--traces", run.string(), "--k", "40"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("insufficient conditional samples"), std::string::npos);
}

TEST(Summarize, UnreadableTracesExitTwo) {
  oracle::TempDir dir("cli");
  EXPECT_EQ(cli({"summarize", "--traces", (dir / "none").string()}).code, 2);
  oracle::write_file(dir / "chain_0.csv", "garbage\n1,2\n");
  EXPECT_EQ(cli({"summarize", "--traces", dir.path().string()}).code, 2);
}

TEST(Summarize, ConditionalOutputsForRequestedK) {
  oracle::TempDir dir("cli");
  const auto data = simulate_dataset(dir);
  const auto run = dir / "run";
  ASSERT_EQ(cli({"run", "--data", data, "--out", run.string(), "--sweeps", "4000", "--chains",
                 "2", "--thin", "1", "--quiet"})
                .code,
            0);
  const auto traces = read_traces(run);
  const auto summary = nlohmann::json::parse(oracle::read_file(run / "summary.json"));
  for (const auto& block : summary["conditional"]) {
    const int k = block["k"];
    EXPECT_GE(conditional_count(traces, k), kMinConditionalSamples);
    const auto alloc = oracle::read_file(run / ("allocation_k" + std::to_string(k) + ".csv"));
    EXPECT_EQ(count_lines(alloc), 73u);
  }
}
