#pragma once

// Branch tracing from the small-amplitude regime near μ_k through the
// turning point, with a secant predictor, a switch from speed to waveheight
// parametrization, and grid refinement as the wave steepens.

#include "whitham/spectral.hpp"
#include "whitham/steady.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace whitham {

enum class ParamMode { Speed, Height };
enum class Termination { HeightLimit, RefinementFailure, StepFailure, MaxPoints };

std::string_view to_string(ParamMode mode);
std::string_view to_string(Termination termination);
ParamMode parse_param_mode(std::string_view text);

struct BranchPoint {
    double mu = 0.0;
    double height = 0.0;
    WaveProfile profile;
    ParamMode param_mode = ParamMode::Speed;
    SolverReport report;
};

struct Branch {
    DispersionModel model;
    int k = 1;
    std::vector<BranchPoint> points;
    // Index of the point where Δμ first changes sign (the speed extremum).
    std::optional<std::size_t> turning_point_index;
    Termination termination = Termination::HeightLimit;
};

struct ContinuationConfig {
    int k = 1;
    std::size_t n_initial = 64;
    double eps0 = 0.005;
    double mu_step = 0.002;
    double height_step = 0.01;
    double height_max = 0.6;
    // Speed mode hands over to height mode once |Δμ/Δh| drops below this, or
    // when a speed step fails or would raise the height by more than height_step.
    double switch_threshold = 0.5;
    NewtonOptions newton;
    int refine_factor = 2;
    std::size_t max_n = 1024;
    std::size_t max_points = 10000;
    bool verify_points = true;
    double verify_tol = 1e-5;

    // Throws std::invalid_argument on non-positive steps or sizes.
    void validate() const;
};

struct BifurcationSpeed {
    double mu = 0.0;
    bool nonphysical = false;  // KdV with k ≥ 3: speed is not positive
};

BifurcationSpeed bifurcation_speed(DispersionModel model, int k);

struct InitialGuess {
    std::vector<double> values;
    double mu = 0.0;
};

// Collocation values and speed of a small wave of amplitude eps on the k
// branch, evaluated at the given points.
InitialGuess small_amplitude_guess(DispersionModel model, int k, double eps,
                                   std::span<const double> points);
InitialGuess small_amplitude_guess(DispersionModel model, int k, double eps, std::size_t n_points);

// Throws BranchStartError when the first solve fails.
Branch trace_branch(DispersionModel model, const ContinuationConfig& config);

// Re-solves the point at fixed height on a grid refine_factor times finer
// (zero-padded spectrum as the initial guess). True iff Newton converges and
// the refined speed agrees within tol.
bool verify_branch_point(const BranchPoint& point, int refine_factor,
                         const NewtonOptions& options = {}, double tol = 1e-5);

}  // namespace whitham
