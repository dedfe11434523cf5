#pragma once

// Pseudo-spectral Fourier discretization of
//   η_t + (η²)_x + K ∗ η_x = 0
// on x_j = 2πj/N, advanced by the trapezoidal (implicit midpoint) rule. The
// linear multiplier part is solved exactly per mode; the quadratic term is
// iterated to a fixed point starting from its value at the old time level.

#include "whitham/steady.hpp"

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace whitham {

// Discrete Fourier coefficients η̃(k), k = -N/2 .. N/2-1, of a real field.
// The k = -N/2 coefficient is held at zero.
class EvolutionState {
public:
    EvolutionState() = default;
    // Zero field. Throws InvalidGridError unless n_modes is even and ≥ 2.
    explicit EvolutionState(std::size_t n_modes, double time = 0.0);

    // Interpolates point values at x_j = 2πj/N and drops the -N/2 mode.
    static EvolutionState from_samples(std::span<const double> samples, double time = 0.0);

    std::size_t n_modes() const { return coeffs_.size(); }
    double time() const { return time_; }
    void set_time(double t) { time_ = t; }

    std::complex<double> coeff(int k) const;
    // Keeps the field real: writing k also writes -k (conjugated); k = ±N/2 is ignored.
    void set_coeff(int k, std::complex<double> value);
    std::span<const std::complex<double>> coeffs() const { return coeffs_; }

    std::vector<double> samples() const;
    double value_at(double x) const;

private:
    std::vector<std::complex<double>> coeffs_;  // index k + N/2
    double time_ = 0.0;
};

struct EvolutionConfig {
    double dt = 1.0 / 1024.0;
    double fixed_point_tol = 1e-12;  // sup-norm change of coefficients between sweeps
    int max_inner_iters = 10;
    bool nonlinear = true;  // false drops (η²)_x, leaving the linear dispersive flow

    void validate() const;
};

struct StepInfo {
    int inner_iters = 0;  // updates of the quadratic term after the initial solve
};

// Holds transform plans and per-mode factors for one grid size. Not safe to
// share between threads; create one per trajectory.
class MidpointIntegrator {
public:
    MidpointIntegrator(std::size_t n_modes, EvolutionConfig config);
    ~MidpointIntegrator();
    MidpointIntegrator(MidpointIntegrator&&) noexcept;
    MidpointIntegrator& operator=(MidpointIntegrator&&) noexcept;
    MidpointIntegrator(const MidpointIntegrator&) = delete;
    MidpointIntegrator& operator=(const MidpointIntegrator&) = delete;

    const EvolutionConfig& config() const;

    // Advances by dt (may be negative). Throws StepNonconvergenceError.
    StepInfo step(EvolutionState& state, double dt);
    std::vector<std::complex<double>> rhs(const EvolutionState& state);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<std::complex<double>> evolution_rhs(const EvolutionState& state,
                                                const EvolutionConfig& config = {});

EvolutionState midpoint_step(const EvolutionState& state, const EvolutionConfig& config,
                             StepInfo* info = nullptr);

struct EvolutionResult {
    EvolutionState final_state;
    std::vector<EvolutionState> snapshots;  // includes the initial state when requested
    int max_inner_iters = 0;
    std::size_t steps = 0;
};

// Full steps of config.dt, with the last step (and any step crossing a
// snapshot time) shortened to land exactly on the target time.
EvolutionResult evolve(const EvolutionState& initial, double t_final, const EvolutionConfig& config,
                       std::optional<double> snapshot_every = std::nullopt);

// Samples the cosine series of a steady wave at x_j = 2πj/N.
EvolutionState sample_profile(const WaveProfile& profile, std::size_t n_evolution);

struct TravelingWaveMetrics {
    double l2_error = 0.0;      // root-mean-square difference on the evolution grid
    double height_error = 0.0;  // | max|η| - max|φ| | over the trigonometric interpolants
    double phase_shift = 0.0;   // radians, in (-π, π]; η(x) ≈ φ(x - shift)
    int inner_iters_max = 0;
};

// Propagates the steady wave for n_periods·2π/μ and compares with the initial data.
TravelingWaveMetrics traveling_wave_metrics(const WaveProfile& profile, double n_periods,
                                            std::size_t n_evolution, const EvolutionConfig& config);

// Argmax of the correlation ∫ a(x) b(x - s) dx over s: the best of a grid
// `refine` times finer than the state grid, polished by Newton iteration.
double phase_shift(const EvolutionState& a, const EvolutionState& b, int refine = 16);

}  // namespace whitham
