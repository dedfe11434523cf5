#include "whitham/spectral.hpp"

#include "whitham/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace whitham {

std::string_view DispersionModel::name() const {
    return kind_ == ModelKind::Whitham ? "whitham" : "kdv";
}

DispersionModel DispersionModel::parse(std::string_view name) {
    if (name == "whitham") return whitham();
    if (name == "kdv") return kdv();
    throw ParseError("unknown dispersion model '" + std::string(name) + "'");
}

double symbol(DispersionModel model, double k, std::optional<double> mu) {
    k = std::abs(k);
    if (model.kind() == ModelKind::Whitham) {
        if (k == 0.0) return 1.0;
        // tanh(k)/k = 1 - k²/3 + O(k⁴)
        if (k < 1e-8) return 1.0 - k * k / 6.0;
        return std::sqrt(std::tanh(k) / k);
    }
    if (!mu || !(*mu > 0.0)) {
        throw MissingParameterError("KdV symbol requires a positive wave speed");
    }
    return 1.0 / (1.0 + k * k / (6.0 * *mu));
}

double symbol_speed_derivative(DispersionModel model, double k, double mu) {
    if (model.kind() == ModelKind::Whitham) return 0.0;
    if (!(mu > 0.0)) throw MissingParameterError("KdV symbol requires a positive wave speed");
    const double d = 6.0 * mu + k * k;
    return 6.0 * k * k / (d * d);
}

CollocationGrid::CollocationGrid(std::size_t n_points) {
    if (n_points == 0) throw InvalidGridError("collocation grid needs at least one point");
    points_.resize(n_points);
    const double n = static_cast<double>(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        points_[i] = std::numbers::pi * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n);
    }
}

double cosine_weight(std::size_t l, std::size_t n_modes) {
    const double n = static_cast<double>(n_modes);
    return l == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
}

CosineSpectrum cosine_analysis(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw InvalidGridError("cosine analysis needs N >= 2 values");
    const CollocationGrid grid(n);
    CosineSpectrum out{std::vector<double>(n, 0.0)};
    for (std::size_t l = 0; l < n; ++l) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += values[i] * std::cos(static_cast<double>(l) * grid[i]);
        }
        out.coeffs[l] = cosine_weight(l, n) * acc;
    }
    return out;
}

double cosine_synthesis(const CosineSpectrum& spectrum, double x) {
    const std::size_t n = spectrum.n_modes();
    double acc = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        acc += cosine_weight(l, n) * spectrum.coeffs[l] * std::cos(static_cast<double>(l) * x);
    }
    return acc;
}

std::vector<double> cosine_synthesis(const CosineSpectrum& spectrum,
                                     std::span<const double> eval_points) {
    std::vector<double> out;
    out.reserve(eval_points.size());
    for (double x : eval_points) out.push_back(cosine_synthesis(spectrum, x));
    return out;
}

std::vector<double> grid_values(const CosineSpectrum& spectrum) {
    const CollocationGrid grid(spectrum.n_modes());
    return cosine_synthesis(spectrum, grid.points());
}

CosineSpectrum resample(const CosineSpectrum& spectrum, std::size_t n_modes) {
    const std::size_t n = spectrum.n_modes();
    CosineSpectrum out{std::vector<double>(n_modes, 0.0)};
    for (std::size_t l = 0; l < std::min(n, n_modes); ++l) {
        out.coeffs[l] = spectrum.coeffs[l] * cosine_weight(l, n) / cosine_weight(l, n_modes);
    }
    return out;
}

CosineSpectrum apply_multiplier(const CosineSpectrum& spectrum, DispersionModel model,
                                std::optional<double> mu) {
    CosineSpectrum out = spectrum;
    for (std::size_t l = 0; l < out.n_modes(); ++l) {
        out.coeffs[l] *= symbol(model, static_cast<double>(l), mu);
    }
    return out;
}

namespace {

// cos(π j / (2N)) for j = 0..4N-1; every cos(l x_n) on the grid is an entry.
std::vector<double> quarter_wave_table(std::size_t n) {
    std::vector<double> table(4 * n);
    for (std::size_t j = 0; j < table.size(); ++j) {
        table[j] = std::cos(std::numbers::pi * static_cast<double>(j) / (2.0 * static_cast<double>(n)));
    }
    return table;
}

// With S(d) = Σ_{l≥1} m(l) cos(l d), the quadratic form Σ_l w²(l) m(l) cos(l x_i) cos(l x_j)
// equals (m(0) + S(x_i - x_j) + S(x_i + x_j)) / N. Both arguments are
// multiples of π/N, so S is tabulated once and the matrix is filled in O(N²).
Eigen::MatrixXd assemble_diagonal_form(const std::vector<double>& m) {
    const std::size_t n = m.size();
    const auto table = quarter_wave_table(n);
    std::vector<double> s(2 * n, 0.0);
    for (std::size_t j = 0; j < 2 * n; ++j) {
        double acc = 0.0;
        for (std::size_t l = 1; l < n; ++l) acc += m[l] * table[(2 * l * j) % (4 * n)];
        s[j] = acc;
    }
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd out(ni, ni);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double value = scale * (m[0] + s[a - b] + s[a + b + 1]);
            out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = value;
            out(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = value;
        }
    }
    return out;
}

}  // namespace

Eigen::MatrixXd analysis_matrix(const CollocationGrid& grid) {
    const std::size_t n = grid.size();
    const auto table = quarter_wave_table(n);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd c(ni, ni);
    for (std::size_t l = 0; l < n; ++l) {
        const double w = cosine_weight(l, n);
        for (std::size_t i = 0; i < n; ++i) {
            // l x_i = π l (2i + 1) / (2N)
            c(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i)) =
                w * table[(l * (2 * i + 1)) % (4 * n)];
        }
    }
    return c;
}

Eigen::MatrixXd operator_matrix(DispersionModel model, const CollocationGrid& grid,
                                std::optional<double> mu) {
    std::vector<double> m(grid.size());
    for (std::size_t l = 0; l < m.size(); ++l) m[l] = symbol(model, static_cast<double>(l), mu);
    return assemble_diagonal_form(m);
}

Eigen::MatrixXd operator_speed_derivative_matrix(DispersionModel model,
                                                 const CollocationGrid& grid, double mu) {
    std::vector<double> m(grid.size());
    for (std::size_t l = 0; l < m.size(); ++l) {
        m[l] = symbol_speed_derivative(model, static_cast<double>(l), mu);
    }
    return assemble_diagonal_form(m);
}

}  // namespace whitham
