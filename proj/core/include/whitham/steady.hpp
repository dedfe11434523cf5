#pragma once

// Steady traveling waves: the collocation system
//   -μ φ + φ² + K^N φ = 0                       (Whitham)
//   -μ φ + L_μ (φ + φ²) = 0                     (KdV, nonlocal form)
// enforced at the cosine grid, solved by dense Newton iteration either at a
// fixed speed μ or at a fixed waveheight with μ as an extra unknown.

#include "whitham/spectral.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace whitham {

struct NewtonOptions {
    double tol = 1e-12;  // sup-norm of the residual at the collocation points
    int max_iter = 50;
    bool line_search = false;  // halve the step until the residual decreases
};

struct SolverReport {
    bool converged = false;
    int iterations = 0;                  // Newton updates applied
    std::vector<double> residual_norms;  // one entry per evaluated iterate
    std::optional<double> condition_estimate;

    double final_residual() const {
        return residual_norms.empty() ? 0.0 : residual_norms.back();
    }
};

// An even 2π-periodic wave with crest at x = 0. `k` is the fundamental
// wavenumber of the branch it belongs to.
struct WaveProfile {
    DispersionModel model;
    int k = 1;
    double mu = 0.0;
    CosineSpectrum spectrum;

    std::size_t n_points() const { return spectrum.n_modes(); }
    std::vector<double> values() const { return grid_values(spectrum); }
};

struct SteadySolution {
    WaveProfile profile;
    SolverReport report;
};

// Collocation operator for one model and grid size. Holds the analysis
// matrix and (for Whitham) the speed-independent operator matrix so that
// repeated Newton solves at the same N do not rebuild them.
class SteadyOperator {
public:
    SteadyOperator(DispersionModel model, std::size_t n_points);

    DispersionModel model() const { return model_; }
    std::size_t size() const { return grid_.size(); }
    const CollocationGrid& grid() const { return grid_; }
    const Eigen::MatrixXd& analysis() const { return analysis_; }

    Eigen::MatrixXd multiplier_matrix(double mu) const;

    Eigen::VectorXd residual(const Eigen::VectorXd& phi, double mu) const;
    Eigen::MatrixXd jacobian(const Eigen::VectorXd& phi, double mu) const;
    // ∂residual/∂μ at fixed φ.
    Eigen::VectorXd speed_derivative(const Eigen::VectorXd& phi, double mu) const;

    // Row vector g with g·φ = φ(0) - φ(π/k).
    Eigen::RowVectorXd height_functional(int k) const;

private:
    DispersionModel model_;
    CollocationGrid grid_;
    Eigen::MatrixXd analysis_;
    Eigen::MatrixXd fixed_operator_;  // empty for speed-dependent models
};

std::vector<double> residual(std::span<const double> values, double mu, DispersionModel model);
Eigen::MatrixXd jacobian(std::span<const double> values, double mu, DispersionModel model);

// Plain Newton at fixed μ. Never throws on non-convergence: the report
// carries converged = false. Throws SingularJacobianError when the
// linearization cannot be factored.
SteadySolution newton_fixed_speed(std::span<const double> initial, double mu,
                                  DispersionModel model, int k = 1,
                                  const NewtonOptions& options = {});
SteadySolution newton_fixed_speed(const SteadyOperator& op, std::span<const double> initial,
                                  double mu, int k, const NewtonOptions& options);

// Newton on the bordered (N+1)-system {residual = 0, φ(0) - φ(π/k) = height}.
SteadySolution newton_fixed_height(std::span<const double> initial, double mu0,
                                   double target_height, DispersionModel model, int k = 1,
                                   const NewtonOptions& options = {});
SteadySolution newton_fixed_height(const SteadyOperator& op, std::span<const double> initial,
                                   double mu0, double target_height, int k,
                                   const NewtonOptions& options);

// Crest-to-trough height φ(0) - φ(π/k).
double waveheight(const WaveProfile& profile);

// Grid average of the collocation values.
double grid_mean(std::span<const double> values);

struct GalileanImage {
    std::vector<double> values;
    double mu = 0.0;
    double integration_constant = 0.0;  // B in -μφ + φ² + Kφ = B
};

// (φ, μ, 0) ↦ (φ + γ, μ + 2γ, γ(1 - μ - γ)).
GalileanImage galilean_shift(std::span<const double> values, double mu, double gamma);

}  // namespace whitham
