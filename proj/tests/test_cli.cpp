// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

std::string cli_path() {
    const char* p = std::getenv("HJHOM_CLI");
    REQUIRE(p != nullptr);
    return p;
}

int run(const std::string& args) {
    const int rc = std::system((cli_path() + " " + args + " > cli_test_stdout.txt 2>&1").c_str());
    return WEXITSTATUS(rc);
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kQuadratic = R"({
  "problem": {"pieces": [{"form": "quadratic", "coeffs": {"p2": 0.5}}],
              "pins": [], "class": {"gamma": 2, "alpha0": 0.4, "beta0": 1}},
  "theta": 1.0,
  "solve": {"dx": 0.015625, "t_final": 1.0},
  "out": "cli_sol.csv"})";

}  // namespace

TEST_CASE("solve: constant-H config writes CSV with u(1,0) = -H(theta)") {
    write_file("cli_solve.json", kQuadratic);
    CHECK(run("solve cli_solve.json") == 0);
    std::ifstream csv("cli_sol.csv");
    REQUIRE(csv.good());
    std::string line, header;
    std::getline(csv, header);
    CHECK(header == "t,x,u");
    bool found = false;
    while (std::getline(csv, line)) {
        double t, x, u;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &x, &u) != 3) continue;
        if (t == 1.0 && x == 0.0) {
            found = true;
            CHECK(u == doctest::Approx(-0.5).epsilon(1e-9));
        }
    }
    CHECK(found);
    CHECK(nlohmann::json::parse(slurp("manifest.json")).contains("config_hash"));
}

TEST_CASE("solve: malformed JSON exits 2 with a diagnostic") {
    write_file("cli_bad.json", "{ \"problem\": [ oops");
    CHECK(run("solve cli_bad.json") == 2);
    CHECK(slurp("cli_test_stdout.txt").find("config error") != std::string::npos);
}

TEST_CASE("solve: undersized domain exits 3 naming the margin") {
    nlohmann::json cfg = nlohmann::json::parse(kQuadratic);
    cfg["solve"]["half_width"] = 0.25;
    write_file("cli_small.json", cfg.dump());
    CHECK(run("solve cli_small.json") == 3);
    CHECK(slurp("cli_test_stdout.txt").find("margin") != std::string::npos);
}

TEST_CASE("effective: quadratic curve approximates theta^2/2") {
    nlohmann::json cfg = nlohmann::json::parse(kQuadratic);
    cfg.erase("theta");
    cfg.erase("solve");
    cfg["thetas"] = {-2.0, -1.0, 0.0, 1.0, 2.0};
    cfg["seeds"] = {1};
    cfg["effective"] = {{"eps_ladder", {0.25, 0.125, 0.0625}}, {"dx_over_eps", 0.0625}};
    cfg["out"] = "cli_curve.csv";
    write_file("cli_eff.json", cfg.dump());
    CHECK(run("effective cli_eff.json") == 0);
    std::ifstream csv("cli_curve.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "theta,h_eff,err,alpha_env,beta_env,seed_count");
    while (std::getline(csv, line)) {
        double th, v;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf", &th, &v) == 2);
        CHECK(v == doctest::Approx(0.5 * th * th).epsilon(1e-4));
    }
}

TEST_CASE("effective: rerunning the same config is byte-identical") {
    CHECK(run("effective cli_eff.json") == 0);
    const std::string first = slurp("cli_curve.csv");
    CHECK(run("effective cli_eff.json") == 0);
    CHECK(slurp("cli_curve.csv") == first);
    CHECK_FALSE(first.empty());
}

TEST_CASE("ensemble: emits concentration statistics") {
    nlohmann::json cfg;
    cfg["problem"] = {
        {"pieces",
         {{{"form", "quadratic"}, {"coeffs", {{"p2", 0.5}, {"pb", 1.0}}}, {"medium_ref", "b"}},
          {{"form", "quadratic"}, {"coeffs", {{"p2", 0.5}, {"pb", -1.0}}}, {"medium_ref", "b"}}}},
        {"pins", {0.0}},
        {"class", {{"gamma", 2}, {"alpha0", 0.25}, {"beta0", 1.5}}},
        {"b_medium",
         {{"kind", "random-phase"},
          {"params",
           {{"mean", 1.1}, {"amplitudes", {0.4, 0.3}}, {"frequencies", {0.618, 1.0}}}},
          {"clamp", {0.5, 2.0}}}}};
    cfg["theta"] = 0.5;
    cfg["seed_count"] = 4;
    cfg["effective"] = {{"eps_ladder", {0.25, 0.125, 0.0625}}, {"dx_over_eps", 0.0625}};
    cfg["out"] = "cli_ens.json";
    write_file("cli_ens_cfg.json", cfg.dump());
    CHECK(run("ensemble cli_ens_cfg.json") == 0);
    const auto out = nlohmann::json::parse(slurp("cli_ens.json"));
    CHECK(out["seed_count"].get<int>() == 4);
    CHECK(out.contains("sd_by_eps"));
    CHECK(out.contains("sd_trend_p"));
}

TEST_CASE("verify: default suite exits 0, broken flux exits 1") {
    CHECK(run("verify") == 0);
    write_file("cli_broken.json", R"({"broken_flux": true})");
    CHECK(run("verify cli_broken.json") == 1);
}

TEST_CASE("media-sample: writes field CSV, --seed overrides the config") {
    write_file("cli_media.json", R"({
      "medium": {"kind": "random-phase",
                 "params": {"mean": 1.1, "amplitudes": [0.4, 0.3], "frequencies": [0.618, 1.0]},
                 "clamp": [0.5, 2.0]},
      "seed": 1, "count": 65, "out": "cli_medium.csv"})");
    CHECK(run("media-sample cli_media.json") == 0);
    const std::string one = slurp("cli_medium.csv");
    CHECK(one.rfind("x,b\n", 0) == 0);
    CHECK(run("--seed 2 media-sample cli_media.json") == 0);
    CHECK(slurp("cli_medium.csv") != one);
    CHECK(run("--seed 1 media-sample cli_media.json") == 0);
    CHECK(slurp("cli_medium.csv") == one);
}
