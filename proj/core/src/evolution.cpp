#include "whitham/evolution.hpp"

#include "whitham/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace whitham {

using cplx = std::complex<double>;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void check_modes(std::size_t n) {
    if (n < 2 || n % 2 != 0) {
        throw InvalidGridError("evolution grid needs an even number of points >= 2, got " +
                               std::to_string(n));
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// EvolutionState

EvolutionState::EvolutionState(std::size_t n_modes, double time) : time_(time) {
    check_modes(n_modes);
    coeffs_.assign(n_modes, cplx{0.0, 0.0});
}

EvolutionState EvolutionState::from_samples(std::span<const double> samples, double time) {
    const std::size_t n = samples.size();
    EvolutionState state(n, time);
    const int half = static_cast<int>(n / 2);
    for (int k = 0; k < half; ++k) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -two_pi * static_cast<double>(k) * static_cast<double>(j) /
                                 static_cast<double>(n);
            acc += samples[j] * cplx{std::cos(angle), std::sin(angle)};
        }
        acc /= static_cast<double>(n);
        if (k == 0) acc.imag(0.0);
        state.set_coeff(k, acc);
    }
    return state;
}

cplx EvolutionState::coeff(int k) const {
    const int half = static_cast<int>(coeffs_.size() / 2);
    if (k < -half || k >= half) return {0.0, 0.0};
    return coeffs_[static_cast<std::size_t>(k + half)];
}

void EvolutionState::set_coeff(int k, cplx value) {
    const int half = static_cast<int>(coeffs_.size() / 2);
    if (k <= -half || k >= half) return;
    if (k == 0) value.imag(0.0);
    coeffs_[static_cast<std::size_t>(k + half)] = value;
    coeffs_[static_cast<std::size_t>(-k + half)] = std::conj(value);
}

double EvolutionState::value_at(double x) const {
    const int half = static_cast<int>(coeffs_.size() / 2);
    double acc = coeff(0).real();
    for (int k = 1; k < half; ++k) {
        acc += 2.0 * (coeff(k) * cplx{std::cos(k * x), std::sin(k * x)}).real();
    }
    return acc;
}

std::vector<double> EvolutionState::samples() const {
    const std::size_t n = coeffs_.size();
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = value_at(two_pi * static_cast<double>(j) / static_cast<double>(n));
    }
    return out;
}

void EvolutionConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!(fixed_point_tol > 0.0)) throw std::invalid_argument("fixed-point tolerance must be positive");
    if (max_inner_iters < 1) throw std::invalid_argument("max_inner_iters must be positive");
}

// ---------------------------------------------------------------------------
// MidpointIntegrator
//
// Internally the field is kept as the half spectrum k = 0..N/2 (the r2c
// layout) with the Nyquist entry pinned to zero.

struct MidpointIntegrator::Impl {
    std::size_t n;
    std::size_t n_half;  // N/2 + 1
    EvolutionConfig config;
    std::vector<double> dispersion;  // k m(k) for k < N/2, 0 at N/2
    std::vector<double> wavenumber;

    double* phys = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan to_phys = nullptr;
    fftw_plan to_spec = nullptr;

    std::vector<cplx> current, nonlin_old, base, guess, next, nonlin_guess;

    Impl(std::size_t n_modes, EvolutionConfig cfg) : n(n_modes), n_half(n_modes / 2 + 1), config(cfg) {
        check_modes(n);
        config.validate();
        dispersion.assign(n_half, 0.0);
        wavenumber.assign(n_half, 0.0);
        for (std::size_t k = 0; k + 1 < n_half; ++k) {
            const double kd = static_cast<double>(k);
            wavenumber[k] = kd;
            dispersion[k] = kd * symbol(DispersionModel::whitham(), kd);
        }
        phys = fftw_alloc_real(n);
        spec = fftw_alloc_complex(n_half);
        {
            std::lock_guard lock(planner_mutex());
            const int ni = static_cast<int>(n);
            to_phys = fftw_plan_dft_c2r_1d(ni, spec, phys, FFTW_ESTIMATE);
            to_spec = fftw_plan_dft_r2c_1d(ni, phys, spec, FFTW_ESTIMATE);
        }
        for (auto* v : {&current, &nonlin_old, &base, &guess, &next, &nonlin_guess}) {
            v->assign(n_half, cplx{0.0, 0.0});
        }
    }

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(to_phys);
        fftw_destroy_plan(to_spec);
        fftw_free(phys);
        fftw_free(spec);
    }

    void load(const EvolutionState& state) {
        if (state.n_modes() != n) throw std::invalid_argument("state size does not match integrator");
        for (std::size_t k = 0; k + 1 < n_half; ++k) current[k] = state.coeff(static_cast<int>(k));
        current[n_half - 1] = 0.0;
    }

    void store(const std::vector<cplx>& half, EvolutionState& state) const {
        for (std::size_t k = 0; k + 1 < n_half; ++k) state.set_coeff(static_cast<int>(k), half[k]);
    }

    // out(k) = -ik · coefficients of I_N(η²), with the N/2 entry dropped.
    void quadratic_term(const std::vector<cplx>& a, std::vector<cplx>& out) {
        for (std::size_t k = 0; k < n_half; ++k) {
            spec[k][0] = a[k].real();
            spec[k][1] = a[k].imag();
        }
        spec[n_half - 1][0] = spec[n_half - 1][1] = 0.0;
        fftw_execute(to_phys);
        for (std::size_t j = 0; j < n; ++j) phys[j] *= phys[j];
        fftw_execute(to_spec);
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t k = 0; k + 1 < n_half; ++k) {
            const cplx q{spec[k][0] * inv_n, spec[k][1] * inv_n};
            out[k] = cplx{0.0, -wavenumber[k]} * q;
        }
        out[n_half - 1] = 0.0;
    }

    StepInfo step(EvolutionState& state, double dt) {
        load(state);
        const double h = 0.5 * dt;
        if (config.nonlinear) {
            quadratic_term(current, nonlin_old);
        } else {
            std::fill(nonlin_old.begin(), nonlin_old.end(), cplx{0.0, 0.0});
        }
        // (1 + i h k m) η⁺ = (1 - i h k m) η + h (N(η) + N(η⁺))
        for (std::size_t k = 0; k < n_half; ++k) {
            const cplx lin{0.0, -dispersion[k]};
            base[k] = (1.0 + h * lin) * current[k] + h * nonlin_old[k];
        }
        guess = current;
        nonlin_guess = nonlin_old;
        int sweeps = 0;
        while (true) {
            ++sweeps;
            double change = 0.0;
            for (std::size_t k = 0; k < n_half; ++k) {
                const cplx lin{0.0, -dispersion[k]};
                next[k] = (base[k] + h * nonlin_guess[k]) / (1.0 - h * lin);
                change = std::max(change, std::abs(next[k] - guess[k]));
            }
            next[n_half - 1] = 0.0;
            std::swap(guess, next);
            if (!std::isfinite(change)) {
                throw StepNonconvergenceError("midpoint step produced a non-finite state", sweeps - 1);
            }
            if (change < config.fixed_point_tol || !config.nonlinear) break;
            if (sweeps - 1 >= config.max_inner_iters) {
                throw StepNonconvergenceError("fixed-point iteration did not settle within " +
                                                  std::to_string(config.max_inner_iters) + " sweeps",
                                              sweeps - 1);
            }
            quadratic_term(guess, nonlin_guess);
        }
        store(guess, state);
        state.set_time(state.time() + dt);
        return {sweeps - 1};
    }

    std::vector<cplx> rhs(const EvolutionState& state) {
        load(state);
        std::vector<cplx> quad(n_half, cplx{0.0, 0.0});
        if (config.nonlinear) quadratic_term(current, quad);
        std::vector<cplx> out(n, cplx{0.0, 0.0});
        const int half = static_cast<int>(n / 2);
        for (int k = 0; k < half; ++k) {
            const auto ku = static_cast<std::size_t>(k);
            const cplx value = quad[ku] + cplx{0.0, -dispersion[ku]} * current[ku];
            out[static_cast<std::size_t>(k + half)] = value;
            if (k > 0) out[static_cast<std::size_t>(half - k)] = std::conj(value);
        }
        return out;
    }
};

MidpointIntegrator::MidpointIntegrator(std::size_t n_modes, EvolutionConfig config)
    : impl_(std::make_unique<Impl>(n_modes, config)) {}
MidpointIntegrator::~MidpointIntegrator() = default;
MidpointIntegrator::MidpointIntegrator(MidpointIntegrator&&) noexcept = default;
MidpointIntegrator& MidpointIntegrator::operator=(MidpointIntegrator&&) noexcept = default;

const EvolutionConfig& MidpointIntegrator::config() const { return impl_->config; }

StepInfo MidpointIntegrator::step(EvolutionState& state, double dt) { return impl_->step(state, dt); }

std::vector<cplx> MidpointIntegrator::rhs(const EvolutionState& state) { return impl_->rhs(state); }

std::vector<cplx> evolution_rhs(const EvolutionState& state, const EvolutionConfig& config) {
    MidpointIntegrator integrator(state.n_modes(), config);
    return integrator.rhs(state);
}

EvolutionState midpoint_step(const EvolutionState& state, const EvolutionConfig& config, StepInfo* info) {
    MidpointIntegrator integrator(state.n_modes(), config);
    EvolutionState out = state;
    const StepInfo step_info = integrator.step(out, config.dt);
    if (info != nullptr) *info = step_info;
    return out;
}

EvolutionResult evolve(const EvolutionState& initial, double t_final, const EvolutionConfig& config,
                       std::optional<double> snapshot_every) {
    if (t_final < initial.time()) throw std::invalid_argument("t_final precedes the initial time");
    if (snapshot_every && !(*snapshot_every > 0.0)) {
        throw std::invalid_argument("snapshot interval must be positive");
    }
    EvolutionResult result{initial, {}, 0, 0};
    if (snapshot_every) result.snapshots.push_back(initial);
    if (t_final == initial.time()) return result;

    MidpointIntegrator integrator(initial.n_modes(), config);
    EvolutionState& state = result.final_state;
    const double t0 = initial.time();
    // Landing tolerance relative to dt so that round-off never leaves a sliver step.
    const double slack = 1e-9 * config.dt;
    std::size_t next_snapshot = 1;

    while (t_final - state.time() > slack) {
        double target = std::min(state.time() + config.dt, t_final);
        bool at_snapshot = false;
        if (snapshot_every) {
            const double t_snap = t0 + static_cast<double>(next_snapshot) * *snapshot_every;
            if (t_snap <= target + slack && t_snap < t_final - slack) {
                target = t_snap;
                at_snapshot = true;
            }
        }
        if (t_final - target <= slack) target = t_final;
        const double t_before = state.time();
        const StepInfo info = integrator.step(state, target - t_before);
        state.set_time(target);
        result.max_inner_iters = std::max(result.max_inner_iters, info.inner_iters);
        ++result.steps;
        if (at_snapshot) {
            result.snapshots.push_back(state);
            ++next_snapshot;
        }
    }
    state.set_time(t_final);
    if (snapshot_every) result.snapshots.push_back(state);
    return result;
}

EvolutionState sample_profile(const WaveProfile& profile, std::size_t n_evolution) {
    check_modes(n_evolution);
    std::vector<double> x(n_evolution);
    for (std::size_t j = 0; j < n_evolution; ++j) {
        x[j] = two_pi * static_cast<double>(j) / static_cast<double>(n_evolution);
    }
    return EvolutionState::from_samples(cosine_synthesis(profile.spectrum, x));
}

namespace {

struct TrigMax {
    double at = 0.0;
    double value = 0.0;
};

// Global maximum of f(s) = Re d(0) + 2 Re Σ_{k≥1} d(k) e^{iks}: the best of
// `samples` equispaced values, polished by Newton iteration on f'(s) = 0.
TrigMax trig_max(const std::vector<cplx>& d, std::size_t samples) {
    auto eval = [&](double s, int order) {
        double v = order == 0 ? d[0].real() : 0.0;
        for (std::size_t k = 1; k < d.size(); ++k) {
            const double kd = static_cast<double>(k);
            cplx term = d[k] * cplx{std::cos(kd * s), std::sin(kd * s)};
            if (order == 1) term *= cplx{0.0, kd};
            if (order == 2) term *= -kd * kd;
            v += 2.0 * term.real();
        }
        return v;
    };
    TrigMax best{0.0, -std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j < samples; ++j) {
        const double s = two_pi * static_cast<double>(j) / static_cast<double>(samples);
        const double v = eval(s, 0);
        if (v > best.value) best = {s, v};
    }
    const double spacing = two_pi / static_cast<double>(samples);
    double s = best.at;
    for (int it = 0; it < 20; ++it) {
        const double curvature = eval(s, 2);
        if (!(curvature < 0.0)) break;
        const double step = -eval(s, 1) / curvature;
        if (std::abs(s + step - best.at) > spacing) break;
        s += step;
        if (std::abs(step) < 1e-15) break;
    }
    const double v = eval(s, 0);
    if (v >= best.value) best = {s, v};
    return best;
}

double max_abs_interpolant(const EvolutionState& state, int refine) {
    const int half = static_cast<int>(state.n_modes() / 2);
    std::vector<cplx> up(static_cast<std::size_t>(half));
    std::vector<cplx> down(static_cast<std::size_t>(half));
    for (int k = 0; k < half; ++k) {
        up[static_cast<std::size_t>(k)] = state.coeff(k);
        down[static_cast<std::size_t>(k)] = -state.coeff(k);
    }
    const std::size_t samples = state.n_modes() * static_cast<std::size_t>(refine);
    return std::max(trig_max(up, samples).value, trig_max(down, samples).value);
}

}  // namespace

double phase_shift(const EvolutionState& a, const EvolutionState& b, int refine) {
    if (a.n_modes() != b.n_modes()) throw std::invalid_argument("phase_shift: mismatched grids");
    if (refine < 1) throw std::invalid_argument("phase_shift: refine must be >= 1");
    const int half = static_cast<int>(a.n_modes() / 2);
    // c(s) = ∫ a(x) b(x - s) dx ∝ Σ_k conj(â(k)) b̂(k) e^{-iks}
    std::vector<cplx> d(static_cast<std::size_t>(half));
    for (int k = 0; k < half; ++k) d[static_cast<std::size_t>(k)] = a.coeff(k) * std::conj(b.coeff(k));
    double s = trig_max(d, a.n_modes() * static_cast<std::size_t>(refine)).at;
    s = std::remainder(s, two_pi);
    if (s <= -std::numbers::pi) s += two_pi;
    return s;
}

TravelingWaveMetrics traveling_wave_metrics(const WaveProfile& profile, double n_periods,
                                            std::size_t n_evolution, const EvolutionConfig& config) {
    if (n_periods < 0.0) throw std::invalid_argument("n_periods must be non-negative");
    if (!(profile.mu > 0.0)) throw std::invalid_argument("profile speed must be positive");
    const EvolutionState initial = sample_profile(profile, n_evolution);
    TravelingWaveMetrics metrics;
    if (n_periods == 0.0) return metrics;

    const double t_final = n_periods * two_pi / profile.mu;
    const EvolutionResult run = evolve(initial, t_final, config);
    metrics.inner_iters_max = run.max_inner_iters;

    const auto before = initial.samples();
    const auto after = run.final_state.samples();
    double sum_sq = 0.0;
    for (std::size_t j = 0; j < before.size(); ++j) {
        const double d = after[j] - before[j];
        sum_sq += d * d;
    }
    metrics.l2_error = std::sqrt(sum_sq / static_cast<double>(before.size()));
    metrics.height_error = std::abs(max_abs_interpolant(run.final_state, 16) - max_abs_interpolant(initial, 16));
    metrics.phase_shift = phase_shift(run.final_state, initial);
    return metrics;
}

}  // namespace whitham
