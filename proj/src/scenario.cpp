#include "fracstab/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fracstab/expr.hpp"
#include "fracstab/frac_ops.hpp"

namespace fracstab {

using nlohmann::json;

namespace {

constexpr const char* kProblemSchema = "fracstab-problem/1";
constexpr const char* kScenariosSchema = "fracstab-scenarios/1";
constexpr const char* kRecordSchema = "fracstab-record/1";

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// major version must match; the minor part (after a dot, if any) is ignored
void check_schema(const json& j, const char* expected, const char* what) {
    if (!j.contains("schema") || !j["schema"].is_string())
        throw std::runtime_error(std::string(what) + ": missing schema field");
    const std::string got = j["schema"].get<std::string>();
    const std::string want(expected);
    const auto major = [](const std::string& s) { return s.substr(0, s.find('.')); };
    if (major(got) != major(want))
        throw std::runtime_error(std::string(what) + ": unsupported schema '" + got +
                                 "' (expected " + want + ")");
}

Expr parse_field(const json& j, const char* field, std::span<const std::string> vars,
                 const std::map<std::string, double>* params, bool required,
                 const char* fallback) {
    std::string src;
    if (j.contains(field)) {
        if (!j[field].is_string())
            throw std::runtime_error(std::string("problem field '") + field +
                                     "' must be an expression string");
        src = j[field].get<std::string>();
    } else if (required) {
        throw std::runtime_error(std::string("problem field '") + field + "' is required");
    } else {
        src = fallback;
    }
    try {
        return Expr::parse(src, vars, params);
    } catch (const ParseError& e) {
        throw std::runtime_error(std::string("problem field '") + field + "': " + e.what());
    }
}

const std::vector<std::string> kVarsX = {"x"};
const std::vector<std::string> kVarsF = {"x", "u", "g"};
const std::vector<std::string> kVarsK = {"x", "tau", "u", "w"};

double default_grading(double gamma) { return std::min(4.0, 2.0 / gamma); }

Mesh scenario_mesh(const Scenario& s) {
    const double r =
        s.mesh.grading > 0.0 ? s.mesh.grading : default_grading(s.problem.order.gamma());
    return Mesh::graded(s.problem.psi.domain_start, s.problem.psi.domain_end, s.mesh.n, r);
}

PerturbationSpec compile_perturbation(const PerturbationConfig& cfg,
                                      std::uint64_t effective_seed) {
    PerturbationSpec p;
    p.kind = cfg.kind;
    p.theta = cfg.theta;
    p.seed = effective_seed;
    p.amplitude = cfg.amplitude;
    if (!cfg.shape.empty()) {
        const Expr e = Expr::parse(cfg.shape, kVarsX);
        p.shape = [e](double x) {
            const double v[1] = {x};
            return e.eval(v);
        };
    }
    return p;
}

std::string csv_solution(const GridFunction& y, const ProblemSpec& spec) {
    const auto grid = y.grid();
    const double wexp = 1.0 - spec.order.gamma();
    const GridFunction yw = y.to_weighted(wexp);
    const auto plain = y.plain_values();
    std::string out = "x,psi_x,y_weighted,y_plain\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        out += g17(grid->x()[i]);
        out += ',';
        out += g17(grid->u()[i]);
        out += ',';
        out += g17(yw.values()[i]);
        out += ',';
        out += g17(plain[i]);
        out += '\n';
    }
    return out;
}

std::string csv_plot(const StabilityReport& rep) {
    std::string out = "x,deviation,bound,bound_printed\n";
    for (std::size_t i = 0; i < rep.x.size(); ++i) {
        out += g17(rep.x[i]);
        out += ',';
        out += g17(rep.deviation[i]);
        out += ',';
        out += g17(rep.bound[i]);
        out += ',';
        out += g17(rep.bound_printed[i]);
        out += '\n';
    }
    return out;
}

json report_to_json(const StabilityReport& rep) {
    json j;
    j["kind"] = rep.kind == StabilityKind::uhr
                    ? "uhr"
                    : (rep.kind == StabilityKind::uh ? "uh" : "semi_uhr");
    j["pass"] = rep.pass;
    j["residual_ok"] = rep.residual_ok;
    j["residual_max_ratio"] = rep.residual_max_ratio;
    j["theta"] = rep.theta;
    j["slack"] = rep.slack;
    j["margin"] = rep.margin;
    j["margin_printed"] = rep.margin_printed;
    j["printed_ok"] = rep.printed_ok;
    j["constants"] = {{"xi", rep.certificate.xi},
                      {"M", rep.certificate.m},
                      {"L", rep.certificate.l},
                      {"q", rep.certificate.q()}};
    return j;
}

void fill_certificate(RunRecord& rec, const ContractionCertificate& cert) {
    rec.cert_valid = cert.valid();
    rec.xi = cert.xi;
    rec.m = cert.m;
    rec.l = cert.l;
    rec.q = cert.q();
}

}  // namespace

std::string to_string(Action a) {
    switch (a) {
        case Action::solve: return "solve";
        case Action::check_uhr: return "check_uhr";
        case Action::check_semi_uhr: return "check_semi_uhr";
        case Action::check_uh: return "check_uh";
        case Action::extend_halfline: return "extend_halfline";
        case Action::verify_operators: return "verify_operators";
    }
    return "?";
}

Action action_from_string(const std::string& s) {
    if (s == "solve") return Action::solve;
    if (s == "check_uhr") return Action::check_uhr;
    if (s == "check_semi_uhr") return Action::check_semi_uhr;
    if (s == "check_uh") return Action::check_uh;
    if (s == "extend_halfline") return Action::extend_halfline;
    if (s == "verify_operators") return Action::verify_operators;
    throw std::runtime_error("unknown action '" + s + "'");
}

ProblemSpec load_problem_json(const json& j) {
    check_schema(j, kProblemSchema, "problem");
    ProblemSpec spec;
    spec.name = j.value("name", std::string());

    if (!j.contains("order") || !j["order"].contains("alpha") || !j["order"].contains("beta"))
        throw std::runtime_error("problem: order{alpha,beta} is required");
    spec.order = FractionalOrder(j["order"]["alpha"].get<double>(),
                                 j["order"]["beta"].get<double>());

    if (!j.contains("interval") || !j["interval"].contains("a") ||
        !j["interval"].contains("b"))
        throw std::runtime_error("problem: interval{a,b} is required");
    spec.psi.domain_start = j["interval"]["a"].get<double>();
    if (j["interval"]["b"].is_string()) {
        if (j["interval"]["b"].get<std::string>() != "inf")
            throw std::runtime_error("problem: interval.b must be a number or \"inf\"");
        spec.psi.domain_end = std::numeric_limits<double>::infinity();
    } else {
        spec.psi.domain_end = j["interval"]["b"].get<double>();
        if (!(spec.psi.domain_end > spec.psi.domain_start))
            throw std::runtime_error("problem: interval requires b > a");
    }

    spec.c = j.value("c", 0.0);

    std::map<std::string, double> params;
    if (j.contains("params")) {
        for (const auto& [k, v] : j["params"].items()) params[k] = v.get<double>();
    }

    const Expr psi = parse_field(j, "psi", kVarsX, &params, true, "");
    const Expr psi_prime = parse_field(j, "psi_prime", kVarsX, &params, true, "");
    const Expr sigma = parse_field(j, "sigma", kVarsX, &params, false, "1");
    const Expr delta = parse_field(j, "delta", kVarsX, &params, false, "x");
    const Expr f = parse_field(j, "f", kVarsF, &params, false, "0");
    const Expr kern = parse_field(j, "K", kVarsK, &params, false, "0");

    auto eval1 = [](const Expr& e, double x) {
        const double v[1] = {x};
        return e.eval(v);
    };
    spec.psi.psi = [psi, eval1](double x) { return eval1(psi, x); };
    spec.psi.psi_prime = [psi_prime, eval1](double x) { return eval1(psi_prime, x); };
    spec.sigma.sigma = [sigma, eval1](double x) { return eval1(sigma, x); };
    spec.delta.delta = [delta, eval1](double x) { return eval1(delta, x); };
    spec.f = [f](double x, double u, double g) {
        const double v[3] = {x, u, g};
        return f.eval(v);
    };
    spec.kernel = [kern](double x, double tau, double u, double w) {
        const double v[4] = {x, tau, u, w};
        return kern.eval(v);
    };

    if (j.contains("sigma_band")) {
        spec.sigma.lower = j["sigma_band"].value("epsilon", 0.0);
        spec.sigma.upper = j["sigma_band"].value(
            "omega", std::numeric_limits<double>::infinity());
    }

    auto read_lip = [&](const char* field) -> std::optional<double> {
        if (!j.contains(field)) return std::nullopt;
        if (j[field].is_string()) {
            if (j[field].get<std::string>() != "estimate")
                throw std::runtime_error(std::string("problem: ") + field +
                                         " must be a number or \"estimate\"");
            return std::nullopt;
        }
        const double v = j[field].get<double>();
        if (!(v >= 0.0))
            throw std::runtime_error(std::string("problem: ") + field + " must be >= 0");
        return v;
    };
    spec.lipschitz_m = read_lip("M");
    spec.lipschitz_l = read_lip("L");

    if (j.contains("box")) {
        auto rd = [&](const char* k, double& lo, double& hi) {
            if (j["box"].contains(k)) {
                lo = j["box"][k][0].get<double>();
                hi = j["box"][k][1].get<double>();
            }
        };
        rd("u", spec.box.u_min, spec.box.u_max);
        rd("g", spec.box.g_min, spec.box.g_max);
        rd("w", spec.box.w_min, spec.box.w_max);
    }
    return spec;
}

ProblemSpec load_problem_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open problem file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw std::runtime_error(path.string() + ": parse error at line " +
                                 std::to_string(line) + ", column " + std::to_string(col) +
                                 ": " + e.what());
    }
    try {
        return load_problem_json(j);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

LoadedScenarios load_scenarios(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenarios file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte);
        throw std::runtime_error(path.string() + ": parse error at line " +
                                 std::to_string(line) + ", column " + std::to_string(col) +
                                 ": " + e.what());
    }
    check_schema(j, kScenariosSchema, "scenarios");

    LoadedScenarios out;
    out.seed = j.value("seed", std::uint64_t{1});
    if (!j.contains("scenarios") || !j["scenarios"].is_array() || j["scenarios"].empty()) {
        out.warnings.push_back(path.string() + ": no scenarios defined");
        return out;
    }

    std::vector<std::string> problems;  // aggregated validation failures
    for (const auto& sj : j["scenarios"]) {
        Scenario s;
        s.name = sj.value("name", "scenario-" + std::to_string(out.scenarios.size()));
        try {
            if (!sj.contains("problem"))
                throw std::runtime_error("scenario requires a problem");
            if (sj["problem"].is_string()) {
                s.problem = load_problem_file(path.parent_path() /
                                              sj["problem"].get<std::string>());
            } else {
                s.problem = load_problem_json(sj["problem"]);
            }
            if (s.problem.name.empty()) s.problem.name = s.name;

            if (sj.contains("mesh")) {
                s.mesh.n = sj["mesh"].value("n", std::size_t{256});
                s.mesh.grading = sj["mesh"].value("grading", 0.0);
            }
            s.action = action_from_string(sj.value("action", std::string("solve")));
            if (sj.contains("perturbation")) {
                const auto& pj = sj["perturbation"];
                const std::string kind = pj.value("kind", std::string("sigma"));
                if (kind == "sigma") {
                    s.perturbation.kind = PerturbationKind::sigma_bounded;
                } else if (kind == "theta") {
                    s.perturbation.kind = PerturbationKind::theta_bounded;
                } else {
                    throw std::runtime_error("perturbation.kind must be sigma or theta");
                }
                s.perturbation.theta = pj.value("theta", 0.1);
                s.perturbation.shape = pj.value("shape", std::string());
                s.perturbation.seed = pj.value("seed", std::uint64_t{1});
                s.perturbation.amplitude = pj.value("amplitude", 1.0);
                if (!s.perturbation.shape.empty())
                    Expr::parse(s.perturbation.shape, kVarsX);  // fail fast
            }
            if (sj.contains("tolerances")) {
                s.tolerances.tol = sj["tolerances"].value("tol", 1e-8);
                s.tolerances.max_iter = sj["tolerances"].value("max_iter", 200);
            }
            if (sj.contains("halfline")) {
                s.n_max = sj["halfline"].value("n_max", 3);
                s.mesh_per_unit = sj["halfline"].value("mesh_per_unit", std::size_t{64});
            }
            s.output = sj.value("output", s.name);

            // action-specific requirements
            if ((s.action == Action::check_uh || s.action == Action::check_semi_uhr) &&
                !(s.perturbation.theta > 0.0)) {
                throw std::runtime_error("theta-bound checks require perturbation.theta > 0");
            }
            if (s.action == Action::check_uh || s.action == Action::check_semi_uhr)
                s.perturbation.kind = PerturbationKind::theta_bounded;
            if (s.action == Action::extend_halfline && !s.problem.psi.half_line())
                throw std::runtime_error("extend_halfline requires interval.b = \"inf\"");
            if (s.action != Action::extend_halfline && s.problem.psi.half_line())
                throw std::runtime_error("finite-interval action on a half-line problem");

            // validate on a probe mesh
            const double a = s.problem.psi.domain_start;
            const double b = s.problem.psi.half_line() ? a + 1.0 : s.problem.psi.domain_end;
            const Mesh probe =
                Mesh::graded(a, b, 48, default_grading(s.problem.order.gamma()));
            const auto diags = validate_problem(s.problem, probe.nodes);
            if (!diags.empty()) {
                std::string msg = "scenario '" + s.name + "': problem validation failed:";
                for (const auto& d : diags)
                    msg += "\n  [" + d.hypothesis + "] " + d.message + " (near x = " +
                           g17(d.at) + ")";
                throw std::runtime_error(msg);
            }
        } catch (const std::exception& e) {
            problems.push_back(e.what());
            continue;
        }
        out.scenarios.push_back(std::move(s));
    }
    if (!problems.empty()) {
        std::string all = path.string() + ": scenario loading failed";
        for (const auto& p : problems) all += "\n" + p;
        throw std::runtime_error(all);
    }
    return out;
}

json RunRecord::to_json() const {
    json j;
    j["schema"] = kRecordSchema;
    j["scenario"] = scenario;
    j["action"] = action;
    j["status"] = status;
    j["pass"] = pass;
    j["error"] = error;
    j["certificate"] = {{"valid", cert_valid}, {"xi", xi}, {"M", m}, {"L", l}, {"q", q}};
    j["solver"] = {{"iterations", iterations},
                   {"converged", converged},
                   {"final_distance", final_distance},
                   {"aposteriori", aposteriori}};
    j["margins"] = {{"margin", margin},
                    {"margin_printed", margin_printed},
                    {"printed_ok", printed_ok},
                    {"residual_max_ratio", residual_max_ratio},
                    {"max_mismatch", max_mismatch}};
    j["files"] = files;
    return j;
}

RunRecord RunRecord::from_json(const json& j) {
    check_schema(j, kRecordSchema, "run record");
    RunRecord r;
    r.scenario = j.value("scenario", "");
    r.action = j.value("action", "");
    r.status = j.value("status", 0);
    r.pass = j.value("pass", false);
    r.error = j.value("error", "");
    if (j.contains("certificate")) {
        const auto& c = j["certificate"];
        r.cert_valid = c.value("valid", false);
        r.xi = c.value("xi", 0.0);
        r.m = c.value("M", 0.0);
        r.l = c.value("L", 0.0);
        r.q = c.value("q", 0.0);
    }
    if (j.contains("solver")) {
        const auto& s = j["solver"];
        r.iterations = s.value("iterations", 0);
        r.converged = s.value("converged", false);
        r.final_distance = s.value("final_distance", 0.0);
        r.aposteriori = s.value("aposteriori", 0.0);
    }
    if (j.contains("margins")) {
        const auto& m2 = j["margins"];
        r.margin = m2.value("margin", 0.0);
        r.margin_printed = m2.value("margin_printed", 0.0);
        r.printed_ok = m2.value("printed_ok", true);
        r.residual_max_ratio = m2.value("residual_max_ratio", 0.0);
        r.max_mismatch = m2.value("max_mismatch", 0.0);
    }
    if (j.contains("files")) r.files = j["files"].get<std::vector<std::string>>();
    return r;
}

namespace {

void do_solve(const Scenario& s, const std::filesystem::path& dir, RunRecord& rec) {
    const PsiGridPtr grid = make_grid(scenario_mesh(s), s.problem.psi);
    const PicardResult result =
        picard_solve(s.problem, grid, s.tolerances.tol, s.tolerances.max_iter);
    fill_certificate(rec, result.certificate);
    rec.iterations = result.trace.iterations;
    rec.converged = result.trace.converged;
    rec.final_distance =
        result.trace.steps.empty() ? 0.0 : result.trace.steps.back().distance;
    rec.aposteriori = aposteriori_bound(result.trace, result.certificate.q());
    rec.pass = rec.converged;

    write_file(dir / "solution.csv", csv_solution(result.solution, s.problem));
    rec.files.push_back("solution.csv");
}

void do_check(const Scenario& s, const std::filesystem::path& dir, RunRecord& rec,
              std::uint64_t effective_seed) {
    const PsiGridPtr grid = make_grid(scenario_mesh(s), s.problem.psi);
    TOperator op(s.problem, grid);
    const ContractionCertificate cert = contraction_certificate(s.problem, grid);
    const PicardResult solved =
        picard_solve(op, cert, s.tolerances.tol, s.tolerances.max_iter);
    rec.iterations = solved.trace.iterations;
    rec.converged = solved.trace.converged;
    rec.final_distance =
        solved.trace.steps.empty() ? 0.0 : solved.trace.steps.back().distance;
    rec.aposteriori = aposteriori_bound(solved.trace, cert.q());

    const PerturbationSpec pert = compile_perturbation(s.perturbation, effective_seed);
    const GridFunction y = make_perturbed_solution(solved.solution, pert, op, cert.q());

    StabilityReport rep;
    if (s.action == Action::check_uhr) {
        rep = check_uhr(y, s.problem, grid, s.tolerances.tol, s.tolerances.max_iter);
    } else if (s.action == Action::check_semi_uhr) {
        rep = check_semi_uhr(y, s.problem, grid, s.perturbation.theta, s.tolerances.tol,
                             s.tolerances.max_iter);
    } else {
        rep = check_uh(y, s.problem, grid, s.perturbation.theta, s.tolerances.tol,
                       s.tolerances.max_iter);
    }
    fill_certificate(rec, rep.certificate);
    rec.pass = rep.pass;
    rec.margin = rep.margin;
    rec.margin_printed = rep.margin_printed;
    rec.printed_ok = rep.printed_ok;
    rec.residual_max_ratio = rep.residual_max_ratio;

    write_file(dir / "report.jsonl", report_to_json(rep).dump() + "\n");
    write_file(dir / "plot.csv", csv_plot(rep));
    write_file(dir / "solution.csv", csv_solution(solved.solution, s.problem));
    rec.files = {"report.jsonl", "plot.csv", "solution.csv"};
}

void do_extend(const Scenario& s, const std::filesystem::path& dir, RunRecord& rec,
               std::uint64_t effective_seed) {
    const double r =
        s.mesh.grading > 0.0 ? s.mesh.grading : default_grading(s.problem.order.gamma());
    const HalflineResult res =
        extend_to_halfline(s.problem, s.n_max, s.mesh_per_unit, r, s.tolerances.tol,
                           s.tolerances.max_iter, effective_seed);
    if (!res.intervals.empty()) fill_certificate(rec, res.intervals.back().certificate);
    rec.max_mismatch = res.max_mismatch;
    rec.pass = res.pass;
    if (!res.error.empty()) {
        rec.status = 1;
        rec.error = res.error;
    }

    std::string lines;
    for (const auto& iv : res.intervals) {
        json j;
        j["kind"] = "interval";
        j["n"] = iv.n;
        j["certificate"] = {{"valid", iv.certificate.valid()},
                            {"xi", iv.certificate.xi},
                            {"q", iv.certificate.q()}};
        j["converged"] = iv.converged;
        j["iterations"] = iv.iterations;
        j["mismatch_vs_prev"] = iv.mismatch_vs_prev;
        lines += j.dump() + "\n";
    }
    {
        json j;
        j["kind"] = "consistency";
        j["max_mismatch"] = res.max_mismatch;
        j["tolerance"] = res.consistency_tol;
        j["consistent"] = res.consistent;
        lines += j.dump() + "\n";
    }
    if (res.uhr_report) lines += report_to_json(*res.uhr_report).dump() + "\n";
    write_file(dir / "report.jsonl", lines);
    rec.files = {"report.jsonl"};
    if (res.assembled) {
        write_file(dir / "solution.csv", csv_solution(*res.assembled, s.problem));
        rec.files.push_back("solution.csv");
    }
    if (res.uhr_report) {
        rec.margin = res.uhr_report->margin;
        rec.residual_max_ratio = res.uhr_report->residual_max_ratio;
        write_file(dir / "plot.csv", csv_plot(*res.uhr_report));
        rec.files.push_back("plot.csv");
    }
}

void do_verify_ops(const Scenario& s, const std::filesystem::path& dir, RunRecord& rec) {
    const std::size_t sweep[] = {64, 128, 256, 512};
    const double a = s.problem.psi.domain_start;
    const double b = s.problem.psi.domain_end;
    const double r =
        s.mesh.grading > 0.0 ? s.mesh.grading : default_grading(s.problem.order.gamma());
    const double wexp = 1.0 - s.problem.order.gamma();

    std::string csv = "n,left_inverse,composition,zero_identity\n";
    std::vector<double> li, co, zi;
    for (const std::size_t n : sweep) {
        const PsiGridPtr grid = make_grid(Mesh::graded(a, b, n, r), s.problem.psi);
        std::vector<double> g1(grid->size()), g2(grid->size());
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double x = grid->x()[i];
            g1[i] = x * x;
            g2[i] = 1.0 + x;
        }
        const double res_li =
            verify_left_inverse(GridFunction::plain(grid, g1), s.problem.order);
        const double res_co =
            verify_composition(GridFunction::plain(grid, g2), s.problem.order);
        const GridFunction singular = GridFunction::weighted(
            grid, std::vector<double>(grid->size(), 1.0), wexp);
        const double res_zero =
            weighted_norm(hilfer_derivative(singular, s.problem.order), s.problem.order);
        li.push_back(res_li);
        co.push_back(res_co);
        zi.push_back(res_zero);
        csv += std::to_string(n) + "," + g17(res_li) + "," + g17(res_co) + "," +
               g17(res_zero) + "\n";
    }
    write_file(dir / "verify.csv", csv);
    rec.files = {"verify.csv"};

    // decreasing within 10% noise, and small at the finest mesh
    auto decreasing = [](const std::vector<double>& v) {
        for (std::size_t i = 1; i < v.size(); ++i)
            if (v[i] > 1.1 * v[i - 1]) return false;
        return true;
    };
    rec.margin = 1e-2 - std::max(li.back(), co.back());
    rec.pass = decreasing(li) && decreasing(co) && li.back() <= 1e-2 && co.back() <= 1e-2 &&
               zi.back() <= 1e-2;
}

}  // namespace

RunRecord run_scenario(const Scenario& s, const std::filesystem::path& out_root,
                       std::uint64_t global_seed) {
    RunRecord rec;
    rec.scenario = s.name;
    rec.action = to_string(s.action);
    const std::filesystem::path dir = out_root / s.output;
    std::filesystem::create_directories(dir);
    const std::uint64_t effective_seed =
        global_seed ^ fnv1a(s.name) ^ (s.perturbation.seed * 0x9e3779b97f4a7c15ULL);

    try {
        switch (s.action) {
            case Action::solve: do_solve(s, dir, rec); break;
            case Action::check_uhr:
            case Action::check_semi_uhr:
            case Action::check_uh: do_check(s, dir, rec, effective_seed); break;
            case Action::extend_halfline: do_extend(s, dir, rec, effective_seed); break;
            case Action::verify_operators: do_verify_ops(s, dir, rec); break;
        }
    } catch (const CertificateError& e) {
        rec.status = 2;
        rec.error = e.what();
        fill_certificate(rec, e.certificate);
        rec.pass = false;
    } catch (const std::exception& e) {
        rec.status = 1;
        rec.error = e.what();
        rec.pass = false;
    }
    write_file(dir / "record.json", rec.to_json().dump(2) + "\n");
    return rec;
}

void emit_summary(const std::vector<RunRecord>& records,
                  const std::vector<TimingRow>& timing,
                  const std::filesystem::path& out_root) {
    if (records.empty()) throw std::invalid_argument("emit_summary: no records");
    std::filesystem::create_directories(out_root);

    std::string csv = "scenario,action,q,xi,pass,margin\n";
    for (const auto& r : records) {
        csv += r.scenario + "," + r.action + "," + g17(r.q) + "," + g17(r.xi) + "," +
               (r.pass ? "true" : "false") + "," + g17(r.margin) + "\n";
    }
    write_file(out_root / "summary.csv", csv);

    std::string digest;
    std::size_t passed = 0;
    for (const auto& r : records) {
        digest += (r.pass ? "[PASS] " : "[FAIL] ") + r.scenario + " (" + r.action + ")";
        if (r.status != 0) digest += " error: " + r.error;
        digest += "\n";
        if (r.pass) ++passed;
    }
    digest += std::to_string(passed) + "/" + std::to_string(records.size()) +
              " scenarios passed\n";
    write_file(out_root / "digest.txt", digest);

    // wall-clock data is quarantined in a sidecar so everything else stays
    // byte-identical across reruns
    std::string tcsv = "scenario,wall_ms,started_at\n";
    for (const auto& t : timing) {
        tcsv += t.scenario + "," + g17(t.wall_ms) + "," + t.started_at + "\n";
    }
    write_file(out_root / "timing.csv", tcsv);
}

int run_scenarios_file(const std::filesystem::path& file,
                       const std::filesystem::path& out_root, int workers,
                       std::optional<std::uint64_t> seed_override) {
    const LoadedScenarios loaded = load_scenarios(file);
    for (const auto& w : loaded.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (loaded.scenarios.empty()) return 0;
    const std::uint64_t seed = seed_override.value_or(loaded.seed);

    const std::size_t n = loaded.scenarios.size();
    std::vector<RunRecord> records(n);
    std::vector<TimingRow> timing(n);
    std::atomic<std::size_t> next{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            const auto t0 = std::chrono::steady_clock::now();
            const std::time_t wall = std::time(nullptr);
            records[i] = run_scenario(loaded.scenarios[i], out_root, seed);
            const auto t1 = std::chrono::steady_clock::now();
            char stamp[32];
            std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&wall));
            timing[i] = {loaded.scenarios[i].name,
                         std::chrono::duration<double, std::milli>(t1 - t0).count(), stamp};
        }
    };

    const int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    emit_summary(records, timing, out_root);

    bool all_ok = true;
    for (const auto& r : records) all_ok = all_ok && r.pass && r.status == 0;
    return all_ok ? 0 : 1;
}

}  // namespace fracstab
