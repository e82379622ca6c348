#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "fekete_lab_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// Runs the CLI with the given arguments and returns its exit status.
int lab(const std::string& args, const std::string& env = "") {
  const std::string log = (scratch() / "last_run.log").string();
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" FEKETE_LAB_PATH "\" " + args + " > \"" + log + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string last_log() { return slurp(scratch() / "last_run.log"); }

json load(const fs::path& p) { return json::parse(slurp(p)); }

}  // namespace

TEST_CASE("check exit codes") {
  const auto o = out_dir("check");
  CHECK(lab("--out " + o + " check --fn sqrt_prod --mode componentwise") == 0);
  CHECK(load(fs::path(o) / "check_sqrt_prod_componentwise.json")["violations"].empty());

  CHECK(lab("--out " + o + " check --fn sqrt_prod --mode joint") == 3);
  const auto j = load(fs::path(o) / "check_sqrt_prod_joint.json");
  bool found = false;
  for (const auto& v : j["violations"]) {
    if (v["witness"] == json::parse("[[1,2],[2,1]]")) {
      found = true;
      CHECK(v["lhs"].get<double>() == 3.0);
      CHECK(std::abs(v["margin"].get<double>() - (3 - 2 * std::sqrt(2.0))) <= 1e-12);
    }
  }
  CHECK(found);
  CHECK(fs::exists(fs::path(o) / "check_sqrt_prod_joint.csv"));

  CHECK(lab("--out " + o + " check --fn nosuch") == 2);
  CHECK(lab("--out " + o + " check --fn sqrt_prod --mode sideways") == 2);
  CHECK(lab("--out " + o + " frobnicate") == 2);
  CHECK(lab("--out " + o + " check --samples notanumber --fn abs") == 2);
  CHECK(lab("--out " + o + " check --table /nonexistent/table.json") == 2);
}

TEST_CASE("set-union and shifted checks") {
  const auto o = out_dir("sets");
  const auto sets = (scratch() / "sets.json").string();
  std::ofstream(sets) << R"({"base": "nmod2", "sets": [[1, 2], [2, 3]]})";
  CHECK(lab("--out " + o + " check --mode set_union --sets " + sets) == 3);
  CHECK(lab("--out " + o + " check --fn nmod2 --mode shifted --shift 1") == 3);
  CHECK(lab("--out " + o + " check --fn nmod2 --mode shifted --shift 0") == 0);
}

TEST_CASE("limit outputs") {
  const auto o = out_dir("limit");
  CHECK(lab("--out " + o + " --no-timestamp limit --fn sqrt_prod --delta 0.01") == 0);
  const auto j = load(fs::path(o) / "limit_sqrt_prod.json");
  CHECK(j["status"] == "converged");
  CHECK(j["best_upper"].get<double>() <= 0.01);
  CHECK(j["version"] == "fekete_lab 0.3.0");
  CHECK(fs::exists(fs::path(o) / "limit_sqrt_prod_samples.csv"));
  const auto svg = slurp(fs::path(o) / "limit_sqrt_prod.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<!--") == std::string::npos);

  CHECK(lab("--out " + o + " limit --fn full_shift_count_log") == 0);
  CHECK(load(fs::path(o) / "limit_full_shift_count_log.json")["best_upper"].get<double>() == 1.0);
  CHECK(slurp(fs::path(o) / "limit_full_shift_count_log.svg").find("<!-- generated") != std::string::npos);

  CHECK(lab("--out " + o + " limit --fn x1sq_sqrt_x2 --iterated 2,1") == 0);
  const auto it = load(fs::path(o) / "limit_x1sq_sqrt_x2_iterated_2_1.json");
  CHECK(it.dump().find("inf") != std::string::npos);
  CHECK(lab("--out " + o + " limit --fn x1sq_sqrt_x2 --iterated 2,2") == 2);
}

TEST_CASE("entropy outputs") {
  const auto o = out_dir("entropy");
  CHECK(lab("--out " + o + " --no-timestamp entropy --sft golden_mean_1d --max-side 16") == 0);
  const auto j = load(fs::path(o) / "entropy_golden_mean_1d.json");
  CHECK(j["admissibility"] == "locally_admissible");
  CHECK(j["truncated"] == false);
  const double exact = std::log2((1 + std::sqrt(5.0)) / 2);
  CHECK(j["exact_1d"].get<double>() == doctest::Approx(exact));
  CHECK(j["best_upper"].get<double>() >= exact);
  const auto csv = slurp(fs::path(o) / "entropy_golden_mean_1d.csv");
  CHECK(csv.rfind("n1,count,log_complexity,ratio,running_min\n", 0) == 0);
  CHECK(csv.find("\n16,2584,") != std::string::npos);
  CHECK(fs::exists(fs::path(o) / "entropy_golden_mean_1d.svg"));

  CHECK(lab("--out " + o + " entropy --sft hard_square_2d --max-side 8 --max-volume 20") == 0);
  CHECK(load(fs::path(o) / "entropy_hard_square_2d.json")["truncated"] == true);
  CHECK(lab("--out " + o + " entropy --sft no_such_fixture") == 2);
}

TEST_CASE("levelset margins") {
  const auto o = out_dir("levelset");
  CHECK(lab("--out " + o + " levelset --fn sqrt_prod --anchors 1,1") == 0);
  const auto csv = slurp(fs::path(o) / "levelset_sqrt_prod.csv");
  REQUIRE(csv.rfind("anchor,k,mu_estimate,error,bound,margin\n", 0) == 0);
  const auto line = csv.substr(csv.find('\n') + 1);
  const double margin = std::stod(line.substr(line.rfind(',') + 1));
  CHECK(margin == doctest::Approx(0.514).epsilon(2e-3));
  CHECK(lab("--out " + o + " levelset --fn full_shift_count_log --anchors 1,1") == 2);
}

TEST_CASE("counterexamples reproduce") {
  const auto o = out_dir("counter");
  CHECK(lab("--out " + o + " counterexamples") == 0);
  CHECK(last_log().find("4/4 reproduced") != std::string::npos);
  const auto j = load(fs::path(o) / "counterexamples.json");
  CHECK(j["examples"].size() == 4);
  for (const auto& e : j["examples"]) CHECK(e["reproduced"] == true);
  CHECK(fs::exists(fs::path(o) / "counterexamples.txt"));
}

TEST_CASE("config files mirror flags and explicit flags win") {
  const auto cfg = (scratch() / "config.json").string();
  const auto o = out_dir("config");
  std::ofstream(cfg) << "{\"out\": \"" << o << "\", \"seed\": 7, \"fn\": \"sqrt_prod\", \"mode\": \"joint\", \"samples\": 300}";
  CHECK(lab("--config " + cfg + " check") == 3);
  const auto j = load(fs::path(o) / "check_sqrt_prod_joint.json");
  CHECK(j["seed"] == 7);
  CHECK(j["samples"] == 300);

  CHECK(lab("--config " + cfg + " --seed 9 check --mode componentwise") == 0);
  const auto k = load(fs::path(o) / "check_sqrt_prod_componentwise.json");
  CHECK(k["seed"] == 9);
  CHECK(k["samples"] == 300);

  const auto bad = (scratch() / "bad.json").string();
  std::ofstream(bad) << "{not json";
  CHECK(lab("--config " + bad + " check") == 2);
  CHECK(lab("--config /nonexistent/cfg.json check") == 2);
}

TEST_CASE("thread count from the environment leaves results unchanged") {
  const auto a = out_dir("threads_a"), b = out_dir("threads_b");
  CHECK(lab("--out " + a + " check --fn x1sq_sqrt_x2 --samples 2000") == 3);
  CHECK(lab("--out " + b + " check --fn x1sq_sqrt_x2 --samples 2000", "FEKETE_LAB_THREADS=3") == 3);
  CHECK(slurp(fs::path(a) / "check_x1sq_sqrt_x2_componentwise.json") ==
        slurp(fs::path(b) / "check_x1sq_sqrt_x2_componentwise.json"));
  CHECK(lab("--out " + b + " check --fn abs", "FEKETE_LAB_THREADS=many") == 2);
}

TEST_CASE("reruns are byte identical") {
  const std::string cmds[] = {
      "check --fn sqrt_prod --mode joint",
      "limit --fn sqrt_prod",
      "entropy --sft hard_square_2d --max-side 6",
      "levelset --fn sqrt_prod --random-anchors 3 --cells 300",
  };
  for (const auto& c : cmds) {
    CAPTURE(c);
    const auto a = out_dir("rerun_a"), b = out_dir("rerun_b");
    fs::remove_all(a);
    fs::remove_all(b);
    lab("--out " + a + " --seed 3 --no-timestamp " + c);
    lab("--out " + b + " --seed 3 --no-timestamp " + c);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      CHECK(slurp(e.path()) == slurp(fs::path(b) / e.path().filename()));
    }
    CHECK(files > 0);
  }
}
