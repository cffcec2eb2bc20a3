// fracstab command-line driver: solve, check, extend, verify-ops, run.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "fracstab/kernels.hpp"
#include "fracstab/scenario.hpp"

namespace {

std::filesystem::path default_out() {
    if (const char* env = std::getenv("FRACSTAB_OUT")) return env;
    return "out";
}

int finish_single(const fracstab::Scenario& s, const std::filesystem::path& out,
                  std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    const fracstab::RunRecord rec = fracstab::run_scenario(s, out, seed);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double, std::milli>(t1 - t0).count();
    fracstab::emit_summary({rec}, {{rec.scenario, wall, ""}}, out);
    std::printf("%s %s (%s) q=%.6g xi=%.6g margin=%.6g\n", rec.pass ? "[PASS]" : "[FAIL]",
                rec.scenario.c_str(), rec.action.c_str(), rec.q, rec.xi, rec.margin);
    if (rec.status != 0) std::fprintf(stderr, "error: %s\n", rec.error.c_str());
    return rec.pass && rec.status == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"psi-Hilfer fractional integro-differential solver and stability lab"};
    app.require_subcommand(1);

    std::string kernel = "auto";
    app.add_option("--kernel", kernel, "kernel variant: auto|scalar|simd128|avx2");

    std::filesystem::path out = default_out();
    std::string problem_path, scenarios_path;
    std::size_t mesh_n = 256;
    double grading = 0.0;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    int workers = 1;
    int max_iter = 200;
    int n_max = 3;
    std::size_t mesh_per_unit = 64;
    double theta = 0.1;
    std::string check_type = "uhr";
    std::string name = "cli";

    auto add_common = [&](CLI::App* cmd, bool with_problem) {
        cmd->add_option("--out", out, "output directory (default $FRACSTAB_OUT or ./out)");
        cmd->add_option("--tol", tol, "solver tolerance");
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_option("--name", name, "scenario name used in reports");
        cmd->add_option("--max-iter", max_iter, "Picard iteration cap");
        if (with_problem) {
            cmd->add_option("--problem", problem_path, "problem JSON file")->required();
            cmd->add_option("--mesh", mesh_n, "number of mesh panels");
            cmd->add_option("--grading", grading, "mesh grading exponent (0 = default)");
        }
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one problem by Picard iteration");
    add_common(solve, true);

    CLI::App* check = app.add_subcommand("check", "run a stability check");
    add_common(check, true);
    check->add_option("--type", check_type, "uhr|semi-uhr|uh");
    check->add_option("--theta", theta, "constant residual envelope (uh / semi-uhr)");

    CLI::App* extend = app.add_subcommand("extend", "half-line nested-interval solve");
    add_common(extend, true);
    extend->add_option("--n-max", n_max, "number of nested unit intervals");
    extend->add_option("--mesh-per-unit", mesh_per_unit, "panels per unit interval");

    CLI::App* verify = app.add_subcommand("verify-ops", "operator identity refinement sweep");
    add_common(verify, true);

    CLI::App* run = app.add_subcommand("run", "run a scenarios file");
    run->add_option("scenarios", scenarios_path, "scenarios JSON file")->required();
    run->add_option("--out", out, "output directory (default $FRACSTAB_OUT or ./out)");
    run->add_option("--workers", workers, "concurrent scenario workers");
    bool seed_given = false;
    run->add_option("--seed", seed, "override the file's base seed")
        ->each([&](const std::string&) { seed_given = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        fracstab::kernels::force(kernel);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        if (run->parsed()) {
            return fracstab::run_scenarios_file(
                scenarios_path, out, workers,
                seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt);
        }

        fracstab::Scenario s;
        s.name = name;
        s.output = name;
        s.problem = fracstab::load_problem_file(problem_path);
        s.mesh.n = mesh_n;
        s.mesh.grading = grading;
        s.tolerances.tol = tol;
        s.tolerances.max_iter = max_iter;
        s.perturbation.seed = seed;

        if (solve->parsed()) {
            s.action = fracstab::Action::solve;
        } else if (check->parsed()) {
            if (check_type == "uhr") {
                s.action = fracstab::Action::check_uhr;
                s.perturbation.kind = fracstab::PerturbationKind::sigma_bounded;
            } else if (check_type == "semi-uhr") {
                s.action = fracstab::Action::check_semi_uhr;
                s.perturbation.kind = fracstab::PerturbationKind::theta_bounded;
                s.perturbation.theta = theta;
            } else if (check_type == "uh") {
                s.action = fracstab::Action::check_uh;
                s.perturbation.kind = fracstab::PerturbationKind::theta_bounded;
                s.perturbation.theta = theta;
            } else {
                std::fprintf(stderr, "error: unknown check type '%s'\n", check_type.c_str());
                return 2;
            }
        } else if (extend->parsed()) {
            s.action = fracstab::Action::extend_halfline;
            s.n_max = n_max;
            s.mesh_per_unit = mesh_per_unit;
        } else if (verify->parsed()) {
            s.action = fracstab::Action::verify_operators;
        }
        return finish_single(s, out, seed);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
