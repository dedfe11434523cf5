#include "whitham/asymptotics.hpp"

#include <cmath>

namespace whitham {

ExpansionCoefficients whitham_coefficients() {
    const double mu_star = std::sqrt(std::tanh(1.0));
    return {DispersionModel::whitham(), mu_star, 1.0 / (mu_star - 1.0),
            1.0 / (2.0 * mu_star - std::sqrt(2.0 * std::tanh(2.0)))};
}

ExpansionCoefficients kdv_coefficients() {
    return {DispersionModel::kdv(), 5.0 / 6.0, -6.0, 1.0};
}

double whitham_expansion_at(double eps, double x) {
    const auto c = whitham_coefficients();
    return eps * std::cos(x) + eps * eps * (0.5 * c.c1 + c.c2 * std::cos(2.0 * x));
}

double whitham_expansion_speed(double eps) {
    const auto c = whitham_coefficients();
    return c.mu_star + eps * eps * (c.c1 + c.c2);
}

Expansion whitham_expansion(double eps, std::span<const double> points) {
    Expansion out;
    out.values.reserve(points.size());
    for (double x : points) out.values.push_back(whitham_expansion_at(eps, x));
    out.mu = whitham_expansion_speed(eps);
    return out;
}

double kdv_expansion_at(double eps, double x) {
    return eps * std::cos(x) + eps * eps * (std::cos(2.0 * x) - 3.0);
}

std::vector<double> kdv_expansion(double eps, std::span<const double> points) {
    std::vector<double> out;
    out.reserve(points.size());
    for (double x : points) out.push_back(kdv_expansion_at(eps, x));
    return out;
}

double kdv_expansion_speed(double eps) {
    const auto c = kdv_coefficients();
    return c.mu_star + eps * eps * (c.c1 + c.c2);
}

}  // namespace whitham
