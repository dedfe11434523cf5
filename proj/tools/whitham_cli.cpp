#include "whitham/asymptotics.hpp"
#include "whitham/branch_io.hpp"
#include "whitham/continuation.hpp"
#include "whitham/error.hpp"
#include "whitham/evolution.hpp"
#include "whitham/spectral.hpp"
#include "whitham/steady.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

using namespace whitham;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kGenerator = "whitham-cli 0.1.0";

// A failed computation that should be reported with a specific error kind.
class CommandError : public std::runtime_error {
public:
    CommandError(std::string kind, const std::string& message, json details = json::object())
        : std::runtime_error(message), kind_(std::move(kind)), details_(std::move(details)) {}
    const std::string& kind() const { return kind_; }
    const json& details() const { return details_; }

private:
    std::string kind_;
    json details_;
};

struct ModelFlags {
    std::string model = "whitham";
    int k = 1;
    std::size_t n = 64;
    double newton_tol = 1e-12;
    int newton_max_iter = 50;
    bool line_search = false;

    DispersionModel dispersion() const { return DispersionModel::parse(model); }
    NewtonOptions newton() const { return {newton_tol, newton_max_iter, line_search}; }
};

struct ContinuationFlags {
    double eps0 = 0.005;
    double mu_step = 0.002;
    double height_step = 0.01;
    double height_max = 0.6;
    double switch_threshold = 0.5;
    int refine_factor = 2;
    std::size_t max_n = 1024;
    std::size_t max_points = 10000;
    double verify_tol = 1e-5;
    bool no_verify = false;
};

struct Flags {
    ModelFlags model;
    ContinuationFlags cont;
    std::optional<double> mu;
    std::optional<double> height;
    std::string input;
    std::string out;
    std::string json_out;
    double dt = 1.0 / 1024.0;
    double periods = 1.0;
    std::optional<double> t_final;
    std::optional<double> snapshot_every;
    std::size_t n_evolution = 32;
    double fixed_point_tol = 1e-12;
    int max_inner_iters = 10;
    double eps = 0.01;
    std::size_t samples = 256;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
    cmd->add_option("--model", f.model, "Dispersion model")
        ->check(CLI::IsMember({"whitham", "kdv"}))
        ->capture_default_str();
    cmd->add_option("--k", f.k, "Fundamental wavenumber of the branch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--n", f.n, "Collocation points")->check(CLI::Range(2, 1 << 16))->capture_default_str();
    cmd->add_option("--newton-tol", f.newton_tol, "Newton residual tolerance (sup-norm)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--newton-max-iter", f.newton_max_iter, "Newton iteration cap")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--line-search", f.line_search, "Damp Newton steps by halving");
}

void add_continuation_flags(CLI::App* cmd, ContinuationFlags& f) {
    cmd->add_option("--eps0", f.eps0, "Amplitude of the first branch point")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--mu-step", f.mu_step, "Speed step in speed mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--height-step", f.height_step, "Waveheight step in height mode")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--height-max", f.height_max, "Stop once the waveheight would exceed this")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--switch-threshold", f.switch_threshold, "|dmu/dh| below which height mode is used")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--refine-factor", f.refine_factor, "Grid factor for point verification")
        ->check(CLI::Range(2, 64))
        ->capture_default_str();
    cmd->add_option("--max-n", f.max_n, "Largest grid used by refinement")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--max-points", f.max_points, "Cap on stored branch points")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--verify-tol", f.verify_tol, "Speed/height agreement required on the refined grid")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--no-verify", f.no_verify, "Skip refined-grid verification of branch points");
}

ContinuationConfig continuation_config(const Flags& f, bool verify) {
    ContinuationConfig cfg;
    cfg.k = f.model.k;
    cfg.n_initial = f.model.n;
    cfg.eps0 = f.cont.eps0;
    cfg.mu_step = f.cont.mu_step;
    cfg.height_step = f.cont.height_step;
    cfg.height_max = f.cont.height_max;
    cfg.switch_threshold = f.cont.switch_threshold;
    cfg.newton = f.model.newton();
    cfg.refine_factor = f.cont.refine_factor;
    cfg.max_n = std::max(f.cont.max_n, f.model.n);
    cfg.max_points = f.cont.max_points;
    cfg.verify_points = verify && !f.cont.no_verify;
    cfg.verify_tol = f.cont.verify_tol;
    return cfg;
}

EvolutionConfig evolution_config(const Flags& f) {
    EvolutionConfig cfg;
    cfg.dt = f.dt;
    cfg.fixed_point_tol = f.fixed_point_tol;
    cfg.max_inner_iters = f.max_inner_iters;
    cfg.validate();
    return cfg;
}

std::vector<double> resampled_values(const WaveProfile& profile, std::size_t n) {
    return grid_values(resample(profile.spectrum, n));
}

void emit(const json& summary) { std::cout << summary.dump() << '\n'; }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json profile_summary(const ProfileRecord& rec) {
    return json{{"model", rec.model.name()},
                {"k", rec.k},
                {"N", rec.n},
                {"mu", rec.mu},
                {"height", rec.height},
                {"iterations", rec.metadata.newton_iters},
                {"residual_norm", rec.metadata.residual_norm}};
}

// Solves at a target height by tracing the branch up to it and correcting
// the last traced point. Throws CommandError naming the model on failure.
SteadySolution solve_at_height(const Flags& f, double target) {
    const DispersionModel model = f.model.dispersion();
    Flags local = f;
    local.cont.height_max = target;
    const Branch branch = trace_branch(model, continuation_config(local, false));
    const BranchPoint& last = branch.points.back();
    const SteadyOperator op(model, f.model.n);
    SteadySolution sol;
    try {
        sol = newton_fixed_height(op, resampled_values(last.profile, f.model.n), last.mu, target, f.model.k,
                                  f.model.newton());
    } catch (const SingularJacobianError&) {
        sol.report.converged = false;
    }
    const double reached = last.height;
    if (!sol.report.converged || std::abs(target - reached) > 2.0 * f.cont.height_step) {
        throw CommandError("nonconvergence",
                           std::string(model.name()) + " branch did not reach height " + format_number(target),
                           json{{"model", model.name()},
                                {"target_height", target},
                                {"last_height", reached},
                                {"termination", to_string(branch.termination)}});
    }
    return sol;
}

int cmd_solve(const Flags& f) {
    const DispersionModel model = f.model.dispersion();
    const SteadyOperator op(model, f.model.n);
    SteadySolution sol;
    if (f.height) {
        sol = solve_at_height(f, *f.height);
    } else {
        const double target = *f.mu;
        const Branch branch = trace_branch(model, continuation_config(f, false));
        const BranchPoint* below = nullptr;
        const BranchPoint* above = nullptr;
        const auto& pts = branch.points;
        const double mu_k = bifurcation_speed(model, f.model.k).mu;
        // The small-amplitude end of the branch connects to μ_k.
        if ((pts.front().mu - target) * (mu_k - target) < 0.0) {
            below = &pts.front();
            above = &pts.front();
        }
        for (std::size_t i = 1; i < pts.size() && below == nullptr; ++i) {
            if ((pts[i - 1].mu - target) * (pts[i].mu - target) <= 0.0) {
                below = &pts[i - 1];
                above = &pts[i];
            }
        }
        if (below == nullptr) {
            const std::vector<double> zero(f.model.n, 0.0);
            auto trivial = newton_fixed_speed(op, zero, target, f.model.k, f.model.newton());
            const auto rec = ProfileRecord::from_solution(trivial.profile, trivial.report, f.model.newton_tol, kGenerator);
            save_profile(rec, f.out);
            json summary = profile_summary(rec);
            summary["trivial"] = true;
            summary["message"] = "no nontrivial wave bracketed at this speed";
            emit(summary);
            return 0;
        }
        const double span = above->mu - below->mu;
        const double t = span == 0.0 ? 0.0 : (target - below->mu) / span;
        const auto a = resample(below->profile.spectrum, f.model.n).coeffs;
        const auto b = resample(above->profile.spectrum, f.model.n).coeffs;
        std::vector<double> coeffs(f.model.n);
        for (std::size_t l = 0; l < coeffs.size(); ++l) coeffs[l] = (1.0 - t) * a[l] + t * b[l];
        if (below == above) {
            // between μ_k and the first point: scale toward zero amplitude
            const double s = std::sqrt(std::abs(mu_k - target) / std::abs(mu_k - below->mu));
            for (double& c : coeffs) c *= s;
        }
        sol = newton_fixed_speed(op, grid_values(CosineSpectrum{coeffs}), target, f.model.k, f.model.newton());
        if (!sol.report.converged) {
            throw CommandError("nonconvergence", "Newton did not converge at mu = " + format_number(target),
                               json{{"mu", target}, {"iterations", sol.report.iterations},
                                    {"residual_norm", sol.report.final_residual()}});
        }
    }
    const auto rec = ProfileRecord::from_solution(sol.profile, sol.report, f.model.newton_tol, kGenerator);
    save_profile(rec, f.out);
    json summary = profile_summary(rec);
    summary["trivial"] = false;
    emit(summary);
    return 0;
}

int cmd_branch(const Flags& f) {
    const DispersionModel model = f.model.dispersion();
    const auto speed = bifurcation_speed(model, f.model.k);
    if (speed.nonphysical) {
        throw CommandError("invalid_argument", "bifurcation speed of the " + std::string(model.name()) +
                                                   " k=" + std::to_string(f.model.k) + " branch is not positive",
                           json{{"mu_k", speed.mu}});
    }
    const Branch branch = trace_branch(model, continuation_config(f, true));
    export_branch_csv(branch, f.out);
    if (!f.json_out.empty()) export_branch_json(branch, f.json_out);
    std::size_t n_max = 0;
    for (const auto& p : branch.points) n_max = std::max(n_max, p.profile.n_points());
    json summary{{"model", model.name()},
                 {"k", branch.k},
                 {"mu_k", speed.mu},
                 {"points", branch.points.size()},
                 {"termination", to_string(branch.termination)},
                 {"turning_point_index", nullptr},
                 {"final_mu", branch.points.back().mu},
                 {"final_height", branch.points.back().height},
                 {"max_N", n_max}};
    if (branch.turning_point_index) {
        const auto& tp = branch.points[*branch.turning_point_index];
        summary["turning_point_index"] = *branch.turning_point_index;
        summary["turning_mu"] = tp.mu;
        summary["turning_height"] = tp.height;
    }
    emit(summary);
    return 0;
}

int cmd_evolve(const Flags& f) {
    const ProfileRecord rec = load_profile(f.input);
    const WaveProfile profile = rec.to_profile();
    const EvolutionConfig cfg = evolution_config(f);
    const double t_final = f.t_final ? *f.t_final : f.periods * 2.0 * std::numbers::pi / profile.mu;
    const EvolutionState initial = sample_profile(profile, f.n_evolution);
    const double every = f.snapshot_every ? *f.snapshot_every : std::max(t_final, cfg.dt);
    const auto result = evolve(initial, t_final, cfg, every);
    export_snapshots_csv(result.snapshots, f.out);
    emit(json{{"t_final", t_final},
              {"steps", result.steps},
              {"snapshots", result.snapshots.size()},
              {"max_inner_iters", result.max_inner_iters},
              {"mass_drift", std::abs(result.final_state.coeff(0) - initial.coeff(0))}});
    return 0;
}

int cmd_validate(const Flags& f) {
    const ProfileRecord rec = load_profile(f.input);
    const EvolutionConfig cfg = evolution_config(f);
    const auto m = traveling_wave_metrics(rec.to_profile(), f.periods, f.n_evolution, cfg);
    const json metrics{{"mu", rec.mu},
                       {"periods", f.periods},
                       {"dt", f.dt},
                       {"n_evolution", f.n_evolution},
                       {"l2_error", m.l2_error},
                       {"height_error", m.height_error},
                       {"phase_shift", m.phase_shift},
                       {"inner_iters_max", m.inner_iters_max}};
    write_text(f.out, metrics.dump(2) + "\n");
    emit(metrics);
    return 0;
}

int cmd_compare_kdv(const Flags& f) {
    const double target = *f.height;
    Flags wf = f;
    wf.model.model = "whitham";
    Flags kf = f;
    kf.model.model = "kdv";
    const SteadySolution whitham_wave = solve_at_height(wf, target);
    const SteadySolution kdv_wave = solve_at_height(kf, target);

    std::vector<double> x(f.samples + 1);
    for (std::size_t i = 0; i <= f.samples; ++i) {
        x[i] = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(f.samples);
    }
    const auto [w, k] = align_for_comparison(whitham_wave.profile, kdv_wave.profile, x);
    std::string csv = "x,whitham,kdv\n";
    double sup_diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        csv += format_number(x[i]) + ',' + format_number(w[i]) + ',' + format_number(k[i]) + '\n';
        sup_diff = std::max(sup_diff, std::abs(w[i] - k[i]));
    }
    write_text(f.out, csv);
    emit(json{{"height", target},
              {"whitham_mu", whitham_wave.profile.mu},
              {"kdv_mu", kdv_wave.profile.mu},
              {"whitham_half_height_width", half_height_width(whitham_wave.profile)},
              {"kdv_half_height_width", half_height_width(kdv_wave.profile)},
              {"sup_difference", sup_diff}});
    return 0;
}

int cmd_asymptotics(const Flags& f) {
    const DispersionModel model = f.model.dispersion();
    const ExpansionCoefficients c = model.kind() == ModelKind::Whitham ? whitham_coefficients() : kdv_coefficients();
    const CollocationGrid grid(f.model.n);
    std::vector<double> values;
    double mu = 0.0;
    if (model.kind() == ModelKind::Whitham) {
        auto e = whitham_expansion(f.eps, grid.points());
        values = std::move(e.values);
        mu = e.mu;
    } else {
        values = kdv_expansion(f.eps, grid.points());
        mu = kdv_expansion_speed(f.eps);
    }
    std::string csv = "n,x,phi\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv += std::to_string(i + 1) + ',' + format_number(grid[i]) + ',' + format_number(values[i]) + '\n';
    }
    write_text(f.out, csv);
    double res = 0.0;
    for (double r : residual(values, mu, model)) res = std::max(res, std::abs(r));
    emit(json{{"model", model.name()},
              {"mu_star", c.mu_star},
              {"c1", c.c1},
              {"c2", c.c2},
              {"eps", f.eps},
              {"mu", mu},
              {"N", f.model.n},
              {"residual_norm", res}});
    return 0;
}

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const CommandError*>(&e)) return static_cast<const CommandError&>(e).kind();
    if (dynamic_cast<const BranchStartError*>(&e)) return "branch_start";
    if (dynamic_cast<const StepNonconvergenceError*>(&e)) return "step_nonconvergence";
    if (dynamic_cast<const SingularJacobianError*>(&e)) return "singular_jacobian";
    if (dynamic_cast<const VersionError*>(&e)) return "version";
    if (dynamic_cast<const ParseError*>(&e)) return "parse";
    if (dynamic_cast<const IoError*>(&e)) return "io";
    if (dynamic_cast<const InvalidGridError*>(&e)) return "invalid_grid";
    if (dynamic_cast<const MissingParameterError*>(&e)) return "missing_parameter";
    if (dynamic_cast<const std::invalid_argument*>(&e)) return "invalid_argument";
    return "internal";
}

void report_error(const std::string& command, const std::string& kind, const std::string& message,
                  const json& details = json::object()) {
    json err{{"error", kind}, {"command", command}, {"message", message}};
    if (!details.empty()) err["details"] = details;
    std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic traveling waves of the Whitham equation"};
    app.require_subcommand(1);
    Flags f;

    auto* solve = app.add_subcommand("solve", "Solve for one wave at a given speed or height");
    add_model_flags(solve, f.model);
    add_continuation_flags(solve, f.cont);
    auto* mu_opt = solve->add_option("--mu", f.mu, "Target speed")->check(CLI::PositiveNumber);
    auto* h_opt = solve->add_option("--height", f.height, "Target waveheight")->check(CLI::PositiveNumber);
    mu_opt->excludes(h_opt);
    solve->add_option("--out", f.out, "Profile JSON output")->required();

    auto* branch = app.add_subcommand("branch", "Trace a bifurcation branch");
    add_model_flags(branch, f.model);
    add_continuation_flags(branch, f.cont);
    branch->add_option("--out", f.out, "Branch CSV output")->required();
    branch->add_option("--json", f.json_out, "Optional JSON sidecar with full spectra");

    auto add_evolution_flags = [&](CLI::App* cmd) {
        cmd->add_option("--input", f.input, "Profile JSON written by solve")->required();
        cmd->add_option("--dt", f.dt, "Time step")->check(CLI::PositiveNumber)->capture_default_str();
        cmd->add_option("--n-evolution", f.n_evolution, "Fourier modes of the evolution grid")
            ->check(CLI::Range(2, 1 << 20))
            ->capture_default_str();
        cmd->add_option("--fixed-point-tol", f.fixed_point_tol, "Inner iteration tolerance")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--max-inner-iters", f.max_inner_iters, "Inner iteration cap")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };

    auto* evolve_cmd = app.add_subcommand("evolve", "Propagate a steady wave in time");
    add_evolution_flags(evolve_cmd);
    auto* periods_opt = evolve_cmd->add_option("--periods", f.periods, "Duration in wave periods 2pi/mu")
                            ->check(CLI::NonNegativeNumber)
                            ->capture_default_str();
    evolve_cmd->add_option("--t-final", f.t_final, "Duration in time units")
        ->check(CLI::NonNegativeNumber)
        ->excludes(periods_opt);
    evolve_cmd->add_option("--snapshot-every", f.snapshot_every, "Snapshot interval")->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--out", f.out, "Snapshot CSV output")->required();

    auto* validate = app.add_subcommand("validate", "Measure how well a steady wave travels");
    add_evolution_flags(validate);
    validate->add_option("--periods", f.periods, "Duration in wave periods 2pi/mu")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    validate->add_option("--out", f.out, "Metrics JSON output")->required();

    auto* compare = app.add_subcommand("compare-kdv", "Compare Whitham and KdV waves of equal height");
    add_model_flags(compare, f.model);
    add_continuation_flags(compare, f.cont);
    compare->add_option("--height", f.height, "Common waveheight")->required()->check(CLI::PositiveNumber);
    compare->add_option("--samples", f.samples, "Evaluation intervals on [-pi, pi]")
        ->check(CLI::Range(2, 1 << 20))
        ->capture_default_str();
    compare->add_option("--out", f.out, "Aligned profiles CSV output")->required();

    auto* asym = app.add_subcommand("asymptotics", "Bifurcation constants and small-amplitude expansion");
    asym->add_option("--model", f.model.model, "Dispersion model")
        ->check(CLI::IsMember({"whitham", "kdv"}))
        ->capture_default_str();
    asym->add_option("--eps", f.eps, "Expansion amplitude")->check(CLI::NonNegativeNumber)->capture_default_str();
    asym->add_option("--n", f.model.n, "Collocation points for the samples")
        ->check(CLI::Range(1, 1 << 20))
        ->capture_default_str();
    asym->add_option("--out", f.out, "Expansion samples CSV output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name(), "usage",
                     e.what());
        return 2;
    }

    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    try {
        if (name == "solve") {
            if (!f.mu && !f.height) throw CommandError("usage", "solve requires --mu or --height");
            return cmd_solve(f);
        }
        if (name == "branch") return cmd_branch(f);
        if (name == "evolve") return cmd_evolve(f);
        if (name == "validate") return cmd_validate(f);
        if (name == "compare-kdv") return cmd_compare_kdv(f);
        if (name == "asymptotics") return cmd_asymptotics(f);
    } catch (const CommandError& e) {
        report_error(name, e.kind(), e.what(), e.details());
        return e.kind() == "usage" ? 2 : 1;
    } catch (const std::exception& e) {
        report_error(name, error_kind(e), e.what());
        return 1;
    }
    return 1;
}
