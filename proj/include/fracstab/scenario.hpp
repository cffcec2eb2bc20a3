#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fracstab/stability.hpp"

// Scenario orchestration: problem/scenario file ingestion, dispatch to the
// solver and stability checks, and deterministic report emission.

namespace fracstab {

enum class Action {
    solve,
    check_uhr,
    check_semi_uhr,
    check_uh,
    extend_halfline,
    verify_operators,
};

std::string to_string(Action a);
Action action_from_string(const std::string& s);

struct MeshSpec {
    std::size_t n = 256;
    double grading = 0.0;  // 0 => default 2/gamma, capped at 4
};

struct ToleranceSpec {
    double tol = 1e-8;
    int max_iter = 200;
};

struct PerturbationConfig {
    PerturbationKind kind = PerturbationKind::sigma_bounded;
    double theta = 0.1;
    std::string shape;  // expression in x; empty => seeded random shape
    std::uint64_t seed = 1;
    double amplitude = 1.0;
};

struct Scenario {
    std::string name;
    ProblemSpec problem;
    MeshSpec mesh;
    Action action = Action::solve;
    PerturbationConfig perturbation;
    ToleranceSpec tolerances;
    int n_max = 3;
    std::size_t mesh_per_unit = 64;
    std::string output;  // subdirectory under the output root
};

struct RunRecord {
    std::string scenario;
    std::string action;
    int status = 0;  // 0 ok, nonzero = error captured below
    bool pass = false;
    std::string error;

    bool cert_valid = false;
    double xi = 0.0, m = 0.0, l = 0.0, q = 0.0;

    int iterations = 0;
    bool converged = false;
    double final_distance = 0.0;
    double aposteriori = 0.0;

    double margin = 0.0;
    double margin_printed = 0.0;
    bool printed_ok = true;
    double residual_max_ratio = 0.0;
    double max_mismatch = 0.0;

    std::vector<std::string> files;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& j);
};

// Problem compilation from the documented JSON schema (fracstab-problem/1).
// Expression strings are parsed with the variable sets
//   psi, psi_prime, sigma, delta : {x}
//   f : {x, u, g}      K : {x, tau, u, w}
// Errors carry the offending field and the line/column inside it.
ProblemSpec load_problem_json(const nlohmann::json& j);
ProblemSpec load_problem_file(const std::filesystem::path& path);

struct LoadedScenarios {
    std::vector<Scenario> scenarios;
    std::vector<std::string> warnings;
    std::uint64_t seed = 1;
};

// Parses and fully validates a fracstab-scenarios/1 file; every problem is
// run through validate_problem on a probe mesh and all diagnostics are
// aggregated into the thrown message.
LoadedScenarios load_scenarios(const std::filesystem::path& path);

RunRecord run_scenario(const Scenario& s, const std::filesystem::path& out_root,
                       std::uint64_t global_seed);

struct TimingRow {
    std::string scenario;
    double wall_ms = 0.0;
    std::string started_at;  // wall-clock; lives only in the sidecar
};

// summary.csv + digest.txt (deterministic) and timing.csv (sidecar).
void emit_summary(const std::vector<RunRecord>& records,
                  const std::vector<TimingRow>& timing,
                  const std::filesystem::path& out_root);

// Full `run` verb: load, execute with a worker pool, emit summary.
// Returns the process exit status (0 iff everything passed).
int run_scenarios_file(const std::filesystem::path& file,
                       const std::filesystem::path& out_root, int workers,
                       std::optional<std::uint64_t> seed_override);

}  // namespace fracstab
