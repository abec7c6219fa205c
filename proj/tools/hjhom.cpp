// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end: run solves, effective-curve sweeps, ensembles, and
// verification suites from JSON configs; emit CSV/JSON artifacts.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "hjhom/effective.hpp"
#include "hjhom/solver.hpp"
#include "hjhom/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct GlobalOpts {
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool strict = false;
    std::string out_dir = ".";
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw hjhom::SpecError("cannot open config: " + path);
    // exceptions carry byte position; report it as-is for diagnostics
    return json::parse(in);
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
    return g.out_dir + "/" + name;
}

void write_manifest(const GlobalOpts& g, const std::string& command, const json& resolved,
                    const std::vector<std::string>& artifacts) {
    json m{{"command", command},
           {"config", resolved},
           {"config_hash", hjhom::fnv1a_hex(resolved.dump())},
           {"artifacts", artifacts}};
    std::ofstream out(out_path(g, "manifest.json"));
    out << m.dump(2) << "\n";
}

hjhom::ProblemSpec problem_from(const json& j) {
    if (j.contains("problem")) return hjhom::ProblemSpec::from_json(j["problem"]);
    return hjhom::ProblemSpec::from_json(j);
}

std::vector<double> theta_grid(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    const double lo = j.at("min").get<double>();
    const double hi = j.at("max").get<double>();
    const int n = j.at("count").get<int>();
    std::vector<double> out;
    for (int i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(n - 1));
    return out;
}

std::vector<std::uint64_t> seed_list(const json& j, const GlobalOpts& g) {
    if (g.seed) return {*g.seed};
    if (j.contains("seeds")) return j["seeds"].get<std::vector<std::uint64_t>>();
    return {j.value("seed", std::uint64_t{1})};
}

int cmd_solve(const std::string& config_path, const GlobalOpts& g) {
    const json cfg = load_config(config_path);
    const hjhom::ProblemSpec prob = problem_from(cfg);
    const std::uint64_t seed = seed_list(cfg, g).front();
    const hjhom::HamiltonianSpec h = prob.hamiltonian(seed);
    const auto sigma = prob.sigma(seed);

    hjhom::SolveConfig sc =
        cfg.contains("solve") ? hjhom::SolveConfig::from_json(cfg["solve"]) : hjhom::SolveConfig{};
    const double theta = cfg.value("theta", 0.0);
    const hjhom::GridSolution sol = hjhom::solve_linear_datum(h, sigma.get(), theta, sc);

    const std::string csv = out_path(g, cfg.value("out", std::string("solution.csv")));
    hjhom::write_csv(sol, csv);
    json resolved = cfg;
    resolved["seed"] = seed;
    resolved["solve"] = sc.to_json();
    write_manifest(g, "solve", resolved, {csv});
    std::printf("wrote %s (u(%g,0) = %.12g)\n", csv.c_str(), sol.times.back(), sol.final_center());
    return 0;
}

int cmd_effective(const std::string& config_path, const GlobalOpts& g) {
    const json cfg = load_config(config_path);
    const hjhom::ProblemSpec prob = problem_from(cfg);
    const auto seeds = seed_list(cfg, g);
    const auto thetas = theta_grid(cfg.at("thetas"));
    hjhom::EffectiveConfig ec = cfg.contains("effective")
                                    ? hjhom::EffectiveConfig::from_json(cfg["effective"])
                                    : hjhom::EffectiveConfig{};

    const hjhom::EffectiveCurve curve = hjhom::effective_curve(prob, thetas, seeds, ec);
    const std::string csv = out_path(g, cfg.value("out", std::string("curve.csv")));
    hjhom::write_curve_csv(curve, csv);
    std::vector<std::string> artifacts{csv};

    if (cfg.value("compose", false)) {
        // split at each pin, estimate the side curves, min-compose, and report
        // the worst discrepancy against the direct curve
        const hjhom::HamiltonianSpec h = prob.hamiltonian(seeds.front());
        if (h.pins.empty()) throw hjhom::SpecError("compose requested but spec has no pins");
        std::vector<hjhom::EffectiveCurve> parts;
        for (std::size_t side = 0; side < h.pieces.size(); ++side) {
            hjhom::ProblemSpec part = prob;
            part.pieces = {prob.pieces[side]};
            part.pins = {};
            parts.push_back(hjhom::effective_curve(part, thetas, seeds, ec));
        }
        hjhom::EffectiveCurve composed = parts.front();
        for (std::size_t i = 1; i < parts.size(); ++i)
            composed = hjhom::min_compose(composed, parts[i]);
        const std::string ccsv = out_path(g, "curve_composed.csv");
        hjhom::write_curve_csv(composed, ccsv);
        artifacts.push_back(ccsv);
        double worst = 0.0;
        for (std::size_t i = 0; i < thetas.size(); ++i)
            worst = std::max(worst, std::abs(curve.value(i) - composed.value(i)));
        std::printf("max direct-vs-composed discrepancy: %.6g\n", worst);
    }

    json resolved = cfg;
    resolved["seeds"] = seeds;
    resolved["effective"] = ec.to_json();
    write_manifest(g, "effective", resolved, artifacts);
    std::printf("wrote %s (%zu thetas, %zu seeds)\n", csv.c_str(), thetas.size(), seeds.size());
    return 0;
}

int cmd_ensemble(const std::string& config_path, const GlobalOpts& g) {
    const json cfg = load_config(config_path);
    const hjhom::ProblemSpec prob = problem_from(cfg);
    auto seeds = seed_list(cfg, g);
    if (cfg.contains("seed_count")) {
        seeds.clear();
        const std::uint64_t base = cfg.value("seed_base", std::uint64_t{1});
        for (std::uint64_t i = 0; i < cfg["seed_count"].get<std::uint64_t>(); ++i)
            seeds.push_back(base + i);
    }
    const double theta = cfg.at("theta").get<double>();
    hjhom::EffectiveConfig ec = cfg.contains("effective")
                                    ? hjhom::EffectiveConfig::from_json(cfg["effective"])
                                    : hjhom::EffectiveConfig{};

    const hjhom::EnsembleStats st = hjhom::ensemble_effective(prob, theta, seeds, ec);
    json out{{"theta", theta},
             {"eps", st.eps},
             {"mean_by_eps", st.mean_by_eps},
             {"sd_by_eps", st.sd_by_eps},
             {"sd_trend_tau", st.sd_trend.tau},
             {"sd_trend_p", st.sd_trend.p_one_sided},
             {"mean_extrapolated", st.mean_extrapolated},
             {"sd_extrapolated", st.sd_extrapolated},
             {"seed_count", seeds.size()}};
    const std::string path = out_path(g, cfg.value("out", std::string("ensemble.json")));
    std::ofstream os(path);
    os << out.dump(2) << "\n";
    write_manifest(g, "ensemble", cfg, {path});
    std::printf("wrote %s (sd trend p = %.4g)\n", path.c_str(), st.sd_trend.p_one_sided);
    return 0;
}

int cmd_verify(const std::string& config_path, const GlobalOpts& g) {
    json cfg = config_path.empty() ? json::object() : load_config(config_path);
    const std::uint64_t seed = g.seed ? *g.seed : cfg.value("seed", std::uint64_t{1});
    const bool broken = cfg.value("broken_flux", false);

    const auto reports = hjhom::run_suite(seed, broken);
    const std::string path = out_path(g, cfg.value("out", std::string("reports.jsonl")));
    hjhom::write_reports_jsonl(reports, path);
    std::fputs(hjhom::summary_table(reports).c_str(), stdout);
    write_manifest(g, "verify", {{"seed", seed}, {"broken_flux", broken}}, {path});

    bool failed = false;
    for (const auto& r : reports) {
        if (r.status == hjhom::CheckStatus::Fail) failed = true;
        if (g.strict && r.status == hjhom::CheckStatus::Inconclusive) {
            failed = true;
            std::printf("strict: inconclusive check %s\n", r.check_name.c_str());
        }
    }
    return failed ? 1 : 0;
}

int cmd_media_sample(const std::string& config_path, const GlobalOpts& g) {
    const json cfg = load_config(config_path);
    const hjhom::MediumSpec spec = hjhom::MediumSpec::from_json(cfg.at("medium"));
    const std::uint64_t seed = g.seed ? *g.seed : cfg.value("seed", std::uint64_t{1});
    const hjhom::MediumSample m = hjhom::sample_medium(spec, seed);

    const double lo = cfg.value("x_min", -8.0);
    const double hi = cfg.value("x_max", 8.0);
    const int n = cfg.value("count", 1025);
    const std::string path = out_path(g, cfg.value("out", std::string("medium.csv")));
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "x,b\n");
    for (int i = 0; i < n; ++i) {
        const double x = n == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(n - 1);
        std::fprintf(f, "%.17g,%.17g\n", x, m.value(x));
    }
    std::fclose(f);
    write_manifest(g, "media-sample", cfg, {path});
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1-D Hamilton-Jacobi homogenization experiments"};
    app.require_subcommand(1);

    GlobalOpts g;
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "override all config seeds");
    app.add_option("--threads", g.threads, "OpenMP thread count (0 = default)");
    app.add_flag("--strict", g.strict, "treat inconclusive checks as failures");
    app.add_option("--out-dir", g.out_dir, "directory for artifacts");

    std::string cfg_solve, cfg_eff, cfg_ens, cfg_ver, cfg_media;
    auto* solve = app.add_subcommand("solve", "single solve from a JSON config");
    solve->add_option("config", cfg_solve)->required();
    auto* eff = app.add_subcommand("effective", "effective-curve sweep");
    eff->add_option("config", cfg_eff)->required();
    auto* ens = app.add_subcommand("ensemble", "across-seed concentration study");
    ens->add_option("config", cfg_ens)->required();
    auto* ver = app.add_subcommand("verify", "run the verification suite");
    ver->add_option("config", cfg_ver);
    auto* media = app.add_subcommand("media-sample", "sample a medium to CSV");
    media->add_option("config", cfg_media)->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed_flag;
#ifdef _OPENMP
    if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

    try {
        if (*solve) return cmd_solve(cfg_solve, g);
        if (*eff) return cmd_effective(cfg_eff, g);
        if (*ens) return cmd_ensemble(cfg_ens, g);
        if (*ver) return cmd_verify(cfg_ver, g);
        if (*media) return cmd_media_sample(cfg_media, g);
    } catch (const hjhom::CflError& e) {
        std::fprintf(stderr, "solver error (CFL): %s\n", e.what());
        return kExitSolver;
    } catch (const hjhom::BoundaryInfluenceError& e) {
        std::fprintf(stderr, "solver error (boundary influence): %s\n", e.what());
        return kExitSolver;
    } catch (const hjhom::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
