#include "whitham/continuation.hpp"

#include "whitham/asymptotics.hpp"
#include "whitham/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

namespace whitham {

std::string_view to_string(ParamMode mode) {
    return mode == ParamMode::Speed ? "speed" : "height";
}

std::string_view to_string(Termination termination) {
    switch (termination) {
        case Termination::HeightLimit: return "height_limit";
        case Termination::RefinementFailure: return "refinement_failure";
        case Termination::StepFailure: return "step_failure";
        case Termination::MaxPoints: return "max_points";
    }
    return "unknown";
}

ParamMode parse_param_mode(std::string_view text) {
    if (text == "speed") return ParamMode::Speed;
    if (text == "height") return ParamMode::Height;
    throw ParseError("unknown parametrization mode '" + std::string(text) + "'");
}

void ContinuationConfig::validate() const {
    if (k < 1) throw std::invalid_argument("k must be a positive integer");
    if (n_initial < 2) throw std::invalid_argument("n_initial must be at least 2");
    if (!(eps0 > 0.0)) throw std::invalid_argument("eps0 must be positive");
    if (!(mu_step > 0.0)) throw std::invalid_argument("mu_step must be positive");
    if (!(height_step > 0.0)) throw std::invalid_argument("height_step must be positive");
    if (!(height_max > 0.0)) throw std::invalid_argument("height_max must be positive");
    if (!(switch_threshold >= 0.0)) throw std::invalid_argument("switch_threshold must be non-negative");
    if (!(newton.tol > 0.0) || newton.max_iter < 1) {
        throw std::invalid_argument("Newton tolerance and iteration cap must be positive");
    }
    if (refine_factor < 2) throw std::invalid_argument("refine_factor must be at least 2");
    if (max_n < n_initial) throw std::invalid_argument("max_n must be at least n_initial");
    if (max_points < 1) throw std::invalid_argument("max_points must be positive");
    if (!(verify_tol > 0.0)) throw std::invalid_argument("verify_tol must be positive");
}

BifurcationSpeed bifurcation_speed(DispersionModel model, int k) {
    if (k < 1) throw std::invalid_argument("bifurcation index k must be >= 1");
    const double kd = static_cast<double>(k);
    if (model.kind() == ModelKind::Whitham) return {symbol(model, kd), false};
    // Kernel of μ - 6μ/(6μ + k²) after the change of variables μ ↦ k²(μ-1) + 1.
    const double mu = 1.0 - kd * kd / 6.0;
    return {mu, !(mu > 0.0)};
}

InitialGuess small_amplitude_guess(DispersionModel model, int k, double eps,
                                   std::span<const double> points) {
    InitialGuess guess;
    guess.values.reserve(points.size());
    if (k == 1 && model.kind() == ModelKind::Whitham) {
        for (double x : points) guess.values.push_back(whitham_expansion_at(eps, x));
        guess.mu = whitham_expansion_speed(eps);
        return guess;
    }
    if (k == 1) {
        for (double x : points) guess.values.push_back(kdv_expansion_at(eps, x));
        guess.mu = kdv_expansion_speed(eps);
        return guess;
    }
    // Higher branches: linear mode only, nudged into the subcritical side.
    const double kd = static_cast<double>(k);
    for (double x : points) guess.values.push_back(eps * std::cos(kd * x));
    guess.mu = bifurcation_speed(model, k).mu - eps * eps;
    return guess;
}

InitialGuess small_amplitude_guess(DispersionModel model, int k, double eps, std::size_t n_points) {
    const CollocationGrid grid(n_points);
    return small_amplitude_guess(model, k, eps, grid.points());
}

namespace {

class OperatorCache {
public:
    explicit OperatorCache(DispersionModel model) : model_(model) {}

    const SteadyOperator& get(std::size_t n) {
        auto it = ops_.find(n);
        if (it == ops_.end()) {
            it = ops_.emplace(n, std::make_unique<SteadyOperator>(model_, n)).first;
        }
        return *it->second;
    }

private:
    DispersionModel model_;
    std::map<std::size_t, std::unique_ptr<SteadyOperator>> ops_;
};

Eigen::VectorXd coefficients(const WaveProfile& profile, std::size_t n) {
    const CosineSpectrum s = resample(profile.spectrum, n);
    return Eigen::Map<const Eigen::VectorXd>(s.coeffs.data(), static_cast<Eigen::Index>(n));
}

std::vector<double> values_from(const SteadyOperator& op, const Eigen::VectorXd& coeffs) {
    const Eigen::VectorXd v = op.analysis().transpose() * coeffs;
    return {v.data(), v.data() + v.size()};
}

// Whitham waves on the branch stay strictly below the singular level μ/2.
bool in_solution_set(const WaveProfile& profile) {
    if (profile.model.kind() != ModelKind::Whitham) return true;
    const auto values = profile.values();
    const double crest = std::max(cosine_synthesis(profile.spectrum, 0.0),
                                  *std::max_element(values.begin(), values.end()));
    return crest < 0.5 * profile.mu;
}

std::optional<SteadySolution> try_solve(const std::function<SteadySolution()>& solve) {
    try {
        SteadySolution sol = solve();
        if (!sol.report.converged) return std::nullopt;
        return sol;
    } catch (const SingularJacobianError&) {
        return std::nullopt;
    }
}

bool verify_with(OperatorCache& cache, const BranchPoint& point, int refine_factor,
                 const NewtonOptions& options, double tol) {
    const std::size_t n_fine = point.profile.n_points() * static_cast<std::size_t>(refine_factor);
    const SteadyOperator& op = cache.get(n_fine);
    const auto initial = values_from(op, coefficients(point.profile, n_fine));
    const auto sol = try_solve([&] {
        return newton_fixed_height(op, initial, point.mu, point.height, point.profile.k, options);
    });
    if (!sol) return false;
    return std::abs(sol->profile.mu - point.mu) <= tol &&
           std::abs(waveheight(sol->profile) - point.height) <= tol;
}

BranchPoint make_point(SteadySolution sol, ParamMode mode) {
    BranchPoint p;
    p.mu = sol.profile.mu;
    p.height = waveheight(sol.profile);
    p.profile = std::move(sol.profile);
    p.param_mode = mode;
    p.report = std::move(sol.report);
    return p;
}

}  // namespace

bool verify_branch_point(const BranchPoint& point, int refine_factor, const NewtonOptions& options,
                         double tol) {
    if (refine_factor < 2) throw std::invalid_argument("refine_factor must be at least 2");
    OperatorCache cache(point.profile.model);
    return verify_with(cache, point, refine_factor, options, tol);
}

Branch trace_branch(DispersionModel model, const ContinuationConfig& config) {
    config.validate();
    OperatorCache cache(model);
    Branch branch;
    branch.model = model;
    branch.k = config.k;

    const double mu_k = bifurcation_speed(model, config.k).mu;
    std::size_t n = config.n_initial;

    // First point: fixed speed on the asymptotic guess, falling back to a
    // fixed-height solve when the iteration collapses onto the trivial wave.
    {
        const SteadyOperator& op = cache.get(n);
        const InitialGuess guess = small_amplitude_guess(model, config.k, config.eps0, op.grid().points());
        const double start_height = 2.0 * config.eps0;
        ParamMode mode = ParamMode::Speed;
        auto sol = try_solve([&] {
            return newton_fixed_speed(op, guess.values, guess.mu, config.k, config.newton);
        });
        if (!sol || waveheight(sol->profile) < 0.5 * start_height) {
            mode = ParamMode::Height;
            sol = try_solve([&] {
                return newton_fixed_height(op, guess.values, guess.mu, start_height, config.k,
                                           config.newton);
            });
        }
        if (!sol) {
            throw BranchStartError("first Newton solve of the " + std::string(model.name()) +
                                   " k=" + std::to_string(config.k) + " branch did not converge");
        }
        branch.points.push_back(make_point(std::move(*sol), mode));
    }

    const double direction = branch.points.front().mu <= mu_k ? -1.0 : 1.0;
    ParamMode mode = branch.points.front().param_mode;

    while (true) {
        if (branch.points.size() >= config.max_points) {
            branch.termination = Termination::MaxPoints;
            break;
        }
        const BranchPoint& last = branch.points.back();
        const BranchPoint* prev = branch.points.size() >= 2 ? &branch.points[branch.points.size() - 2] : nullptr;

        if (mode == ParamMode::Speed && prev != nullptr) {
            const double slope = std::abs((last.mu - prev->mu) / (last.height - prev->height));
            if (slope < config.switch_threshold) mode = ParamMode::Height;
        }

        std::optional<BranchPoint> accepted;
        if (mode == ParamMode::Speed) {
            const double mu_new = last.mu + direction * config.mu_step;
            if (!(mu_new > 0.0)) {
                branch.termination = Termination::StepFailure;
                break;
            }
            const SteadyOperator& op = cache.get(n);
            Eigen::VectorXd pred = coefficients(last.profile, n);
            if (prev != nullptr) {
                const double s = (mu_new - last.mu) / (last.mu - prev->mu);
                pred += s * (pred - coefficients(prev->profile, n));
            } else {
                // amplitude ∝ |μ - μ_k|^{1/2} near a pitchfork
                pred *= std::sqrt(std::abs(mu_k - mu_new) / std::abs(mu_k - last.mu));
            }
            const auto initial = values_from(op, pred);
            auto sol = try_solve([&] {
                return newton_fixed_speed(op, initial, mu_new, config.k, config.newton);
            });
            if (sol && in_solution_set(sol->profile) && waveheight(sol->profile) > last.height) {
                BranchPoint candidate = make_point(std::move(*sol), ParamMode::Speed);
                const bool within_step = candidate.height - last.height <= config.height_step &&
                                         candidate.height <= config.height_max;
                if (within_step && (!config.verify_points ||
                    verify_with(cache, candidate, config.refine_factor, config.newton, config.verify_tol))) {
                    accepted = std::move(candidate);
                }
            }
            if (!accepted) {
                mode = ParamMode::Height;
                continue;
            }
        } else {
            const double h_new = last.height + config.height_step;
            if (h_new > config.height_max * (1.0 + 1e-12)) {
                branch.termination = Termination::HeightLimit;
                break;
            }
            bool newton_retry_used = false;
            std::optional<Termination> stop;
            while (!accepted && !stop) {
                const SteadyOperator& op = cache.get(n);
                Eigen::VectorXd pred = coefficients(last.profile, n);
                double mu_pred = last.mu;
                if (prev != nullptr) {
                    const double s = (h_new - last.height) / (last.height - prev->height);
                    pred += s * (pred - coefficients(prev->profile, n));
                    mu_pred += s * (last.mu - prev->mu);
                } else {
                    pred *= h_new / last.height;
                }
                const auto initial = values_from(op, pred);
                auto sol = try_solve([&] {
                    return newton_fixed_height(op, initial, mu_pred, h_new, config.k, config.newton);
                });
                const bool solved = sol && in_solution_set(sol->profile);
                if (!solved) {
                    if (n * 2 > config.max_n) {
                        stop = newton_retry_used ? Termination::RefinementFailure : Termination::StepFailure;
                    } else if (newton_retry_used) {
                        stop = Termination::RefinementFailure;
                    } else {
                        newton_retry_used = true;
                        n *= 2;
                    }
                    continue;
                }
                BranchPoint candidate = make_point(std::move(*sol), ParamMode::Height);
                if (config.verify_points &&
                    !verify_with(cache, candidate, config.refine_factor, config.newton, config.verify_tol)) {
                    if (n * 2 > config.max_n) {
                        stop = Termination::RefinementFailure;
                    } else {
                        n *= 2;
                    }
                    continue;
                }
                accepted = std::move(candidate);
            }
            if (stop) {
                branch.termination = *stop;
                break;
            }
        }

        if (accepted->report.iterations * 3 > config.newton.max_iter * 2 && n * 2 <= config.max_n) {
            n *= 2;
        }
        branch.points.push_back(std::move(*accepted));

        const std::size_t count = branch.points.size();
        if (!branch.turning_point_index && count >= 3) {
            const double d1 = branch.points[count - 2].mu - branch.points[count - 3].mu;
            const double d2 = branch.points[count - 1].mu - branch.points[count - 2].mu;
            if (d1 * d2 < 0.0) branch.turning_point_index = count - 2;
        }
    }
    return branch;
}

}  // namespace whitham
