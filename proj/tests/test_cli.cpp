#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "plankit/features.hpp"

namespace {

struct RunResult {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const char* bin = std::getenv("PLANKIT_CLI_PATH");
  REQUIRE_MESSAGE(bin != nullptr, "PLANKIT_CLI_PATH must point at the CLI binary");
  std::string cmd = std::string(bin) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[512];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof(buf), pipe)) > 0;) out.append(buf, n);
  int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const char* stem) {
  return std::string("/tmp/plankit_cli_") + stem + "_" + std::to_string(::getpid());
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synthesized corpora are deterministic in the seed") {
  std::string f1 = temp_path("syn1.jsonl"), f2 = temp_path("syn2.jsonl"),
              f3 = temp_path("syn3.jsonl");
  RunResult r1 = run_cli("synthesize --template car_follow --count 5 --seed 7 --out " + f1);
  CHECK(r1.code == 0);
  CHECK(r1.output.find("wrote 5 scenarios") != std::string::npos);
  CHECK(run_cli("synthesize --template car_follow --count 5 --seed 7 --out " + f2).code == 0);
  CHECK(run_cli("synthesize --template car_follow --count 5 --seed 8 --out " + f3).code == 0);
  CHECK(slurp(f1) == slurp(f2));
  CHECK(slurp(f1) != slurp(f3));
  std::remove(f1.c_str());
  std::remove(f2.c_str());
  std::remove(f3.c_str());
}

TEST_CASE("usage and data errors use distinct exit codes") {
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("").code == 1);  // a subcommand is required

  RunResult bad_count =
      run_cli("synthesize --template mixed --count 0 --out " + temp_path("none.jsonl"));
  CHECK(bad_count.code == 2);
  CHECK(bad_count.output.find("error:") != std::string::npos);

  CHECK(run_cli("evaluate --data /tmp/plankit_cli_no_such_file.jsonl").code == 2);
  CHECK(run_cli("evaluate --data /tmp/plankit_cli_no_such_file.jsonl --predictor learned")
            .code == 2);
}

TEST_CASE("IRL training writes weights and a loss curve") {
  std::string data = temp_path("irl_data.jsonl");
  std::string weights = temp_path("w.txt");
  REQUIRE(run_cli("synthesize --template car_follow --count 12 --seed 3 --out " + data)
              .code == 0);

  std::string train = "train-irl --data " + data + " --out " + weights +
                      " --predictor ctrv --steps 25 --lr 0.05";
  RunResult r = run_cli(train);
  CHECK(r.code == 0);
  CHECK(r.output.find("weights: " + weights) != std::string::npos);

  std::istringstream in(slurp(weights));
  const auto& names = plankit::FeatureVector::names();
  std::size_t rows = 0;
  for (std::string name, value; in >> name >> value; ++rows) {
    REQUIRE(rows < names.size());
    CHECK(name == names[rows]);
    CHECK(std::isfinite(std::stod(value)));
  }
  CHECK(rows == 7);

  std::string curve = slurp(weights + ".loss.csv");
  CHECK(curve.rfind("step,loss,lr\n", 0) == 0);
  CHECK(line_count(curve) == 26);  // header + one row per step

  std::string again = temp_path("w2.txt");
  REQUIRE(run_cli("train-irl --data " + data + " --out " + again +
                  " --predictor ctrv --steps 25 --lr 0.05")
              .code == 0);
  CHECK(slurp(weights) == slurp(again));

  std::remove(data.c_str());
  std::remove(weights.c_str());
  std::remove((weights + ".loss.csv").c_str());
  std::remove(again.c_str());
  std::remove((again + ".loss.csv").c_str());
}

TEST_CASE("evaluation prints the report and writes per-scenario rows") {
  std::string data = temp_path("eval_data.jsonl");
  std::string csv = temp_path("eval.csv");
  REQUIRE(run_cli("synthesize --template mixed --count 10 --seed 21 --out " + data).code == 0);

  RunResult r = run_cli("evaluate --data " + data + " --out " + csv);
  CHECK(r.code == 0);
  CHECK(r.output.find("scenarios=10") != std::string::npos);
  CHECK(r.output.find("plan_min_fde=") != std::string::npos);
  CHECK(r.output.find("top3_accuracy=") != std::string::npos);
  CHECK(line_count(slurp(csv)) == 13);  // comment + header + 10 rows + summary

  // Batched and per-plan inference must report identical numbers.
  RunResult batch = run_cli("evaluate --data " + data + " --batch");
  RunResult single = run_cli("evaluate --data " + data + " --single");
  CHECK(batch.code == 0);
  CHECK(batch.output == single.output);

  RunResult oracle = run_cli("evaluate --data " + data + " --predictor oracle");
  CHECK(oracle.code == 0);
  CHECK(oracle.output.find("min_ade=0 min_fde=0") != std::string::npos);

  std::remove(data.c_str());
  std::remove(csv.c_str());
}

TEST_CASE("CMP training round-trips through the learned predictor") {
  std::string data = temp_path("cmp_data.jsonl");
  std::string p1 = temp_path("cmp1.bin"), p2 = temp_path("cmp2.bin");
  REQUIRE(run_cli("synthesize --template car_follow --count 6 --seed 5 --out " + data)
              .code == 0);

  std::string train = " --steps 4 --batch-size 6 --embed-dim 4 --seed 9 --lr 1e-4";
  RunResult r = run_cli("train-cmp --data " + data + " --out " + p1 + train);
  CHECK(r.code == 0);
  CHECK(r.output.find("params: " + p1) != std::string::npos);
  REQUIRE(run_cli("train-cmp --data " + data + " --out " + p2 + train).code == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(line_count(slurp(p1 + ".loss.csv")) == 5);

  RunResult ev = run_cli("evaluate --data " + data + " --predictor learned --params " + p1);
  CHECK(ev.code == 0);
  CHECK(ev.output.find("scenarios=6") != std::string::npos);

  RunResult no_params = run_cli("evaluate --data " + data + " --predictor learned");
  CHECK(no_params.code == 2);
  CHECK(no_params.output.find("--params") != std::string::npos);

  std::remove(data.c_str());
  std::remove(p1.c_str());
  std::remove((p1 + ".loss.csv").c_str());
  std::remove(p2.c_str());
  std::remove((p2 + ".loss.csv").c_str());
}

TEST_CASE("divergent training exits with the numeric-failure code") {
  std::string data = temp_path("diverge.jsonl");
  REQUIRE(run_cli("synthesize --template car_follow --count 4 --seed 2 --out " + data)
              .code == 0);
  RunResult r = run_cli("train-cmp --data " + data + " --out " + temp_path("boom.bin") +
                        " --steps 8 --batch-size 4 --embed-dim 4 --lr 1e30");
  CHECK(r.code == 3);
  CHECK(r.output.find("numeric failure:") != std::string::npos);
  std::remove(data.c_str());
}

TEST_CASE("a config file stands in for flags") {
  std::string ini = temp_path("cfg.ini");
  std::string from_cfg = temp_path("cfg_out.jsonl"), from_flags = temp_path("flag_out.jsonl");
  {
    std::ofstream out(ini);
    out << "[synthesize]\n"
        << "template = lane_change\n"
        << "count = 3\n"
        << "seed = 4\n"
        << "out = " << from_cfg << "\n";
  }
  RunResult r = run_cli("--config " + ini + " synthesize");
  CHECK(r.code == 0);
  CHECK(r.output.find("wrote 3 scenarios") != std::string::npos);
  REQUIRE(run_cli("synthesize --template lane_change --count 3 --seed 4 --out " + from_flags)
              .code == 0);
  CHECK(slurp(from_cfg) == slurp(from_flags));
  std::remove(ini.c_str());
  std::remove(from_cfg.c_str());
  std::remove(from_flags.c_str());
}

TEST_CASE("plot renders a standalone SVG") {
  std::string data = temp_path("plot_data.jsonl");
  std::string svg = temp_path("scene.svg"), bare = temp_path("bare.svg");
  REQUIRE(run_cli("synthesize --template cut_in --count 2 --seed 6 --out " + data).code == 0);

  CHECK(run_cli("plot --data " + data + " --index 1 --out " + svg).code == 0);
  std::string body = slurp(svg);
  CHECK(body.rfind("<svg xmlns=", 0) == 0);
  CHECK(body.find("</svg>") != std::string::npos);
  CHECK(body.find("#d32f2f") != std::string::npos);

  CHECK(run_cli("plot --data " + data + " --index 1 --no-proposals --out " + bare).code == 0);
  CHECK(slurp(bare).size() < body.size());  // no candidate polylines

  CHECK(run_cli("plot --data " + data + " --index 9 --out " + svg).code == 2);

  std::remove(data.c_str());
  std::remove(svg.c_str());
  std::remove(bare.c_str());
}

}  // TEST_SUITE
