#pragma once

// Cosine collocation transforms and the dispersion operators acting on them.
//
// Even 2π-periodic functions are represented on the half-period midpoint grid
//   x_n = π(2n-1)/(2N),  n = 1..N,
// by orthonormal cosine coefficients Φ(l), l = 0..N-1:
//   φ(x) = Σ_l w(l) Φ(l) cos(l x),   Φ(l) = w(l) Σ_n φ(x_n) cos(l x_n),
// with w(0) = √(1/N) and w(l) = √(2/N) otherwise. The analysis matrix
// C(l,n) = w(l) cos(l x_n) is orthogonal, so synthesis at the grid is Cᵀ.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace whitham {

enum class ModelKind { Whitham, KdVNonlocal };

// Selects the Fourier multiplier of the steady/evolution equations.
//   Whitham:      m(k) = √(tanh k / k)
//   KdVNonlocal:  m(k; μ) = 1 / (1 + k²/(6μ)), the inverse of 1 - ∂²/(6μ)
class DispersionModel {
public:
    constexpr DispersionModel() = default;
    constexpr explicit DispersionModel(ModelKind kind) : kind_(kind) {}

    static constexpr DispersionModel whitham() { return DispersionModel{ModelKind::Whitham}; }
    static constexpr DispersionModel kdv() { return DispersionModel{ModelKind::KdVNonlocal}; }

    constexpr ModelKind kind() const { return kind_; }
    constexpr bool speed_dependent() const { return kind_ == ModelKind::KdVNonlocal; }

    std::string_view name() const;
    // Accepts "whitham" and "kdv"; throws ParseError otherwise.
    static DispersionModel parse(std::string_view name);

    friend constexpr bool operator==(DispersionModel, DispersionModel) = default;

private:
    ModelKind kind_ = ModelKind::Whitham;
};

// Symbol value at wavenumber k ≥ 0. Lies in (0, 1] and equals 1 at k = 0.
// Throws MissingParameterError for KdVNonlocal when mu is absent or ≤ 0.
double symbol(DispersionModel model, double k, std::optional<double> mu = std::nullopt);

// ∂/∂μ of the symbol (identically zero for Whitham).
double symbol_speed_derivative(DispersionModel model, double k, double mu);

class CollocationGrid {
public:
    explicit CollocationGrid(std::size_t n_points);

    std::size_t size() const { return points_.size(); }
    std::span<const double> points() const { return points_; }
    double operator[](std::size_t i) const { return points_[i]; }

private:
    std::vector<double> points_;
};

double cosine_weight(std::size_t l, std::size_t n_modes);

struct CosineSpectrum {
    std::vector<double> coeffs;

    std::size_t n_modes() const { return coeffs.size(); }
};

// Φ(l) from collocation values. Throws InvalidGridError when fewer than
// two values are given.
CosineSpectrum cosine_analysis(std::span<const double> values);

// Evaluates the cosine series at arbitrary points.
std::vector<double> cosine_synthesis(const CosineSpectrum& spectrum,
                                     std::span<const double> eval_points);
double cosine_synthesis(const CosineSpectrum& spectrum, double x);

// Collocation values at the native grid of the spectrum.
std::vector<double> grid_values(const CosineSpectrum& spectrum);

// Re-expresses the same function with n_modes coefficients: zero padding
// when growing, truncation of the top modes when shrinking.
CosineSpectrum resample(const CosineSpectrum& spectrum, std::size_t n_modes);

CosineSpectrum apply_multiplier(const CosineSpectrum& spectrum, DispersionModel model,
                                std::optional<double> mu = std::nullopt);

// C(l,n) = w(l) cos(l x_n). Orthogonal.
Eigen::MatrixXd analysis_matrix(const CollocationGrid& grid);

// [K^N](m,n) = Σ_l w²(l) m(l) cos(l x_n) cos(l x_m).
Eigen::MatrixXd operator_matrix(DispersionModel model, const CollocationGrid& grid,
                                std::optional<double> mu = std::nullopt);

// Same quadratic form with the symbol replaced by its μ-derivative.
Eigen::MatrixXd operator_speed_derivative_matrix(DispersionModel model,
                                                 const CollocationGrid& grid, double mu);

}  // namespace whitham
