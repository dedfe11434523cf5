#pragma once

// Closed-form small-amplitude data near the k = 1 bifurcation point:
//   φ(ε) = ε cos x + ε²(C₁/2 + C₂ cos 2x),   μ(ε) = μ* + ε²(C₁ + C₂)
// with μ* = √(tanh 1), C₁ = 1/(μ* - 1), C₂ = 1/(2μ* - √(2 tanh 2)), and the
// KdV counterpart φ(ε) = ε cos x + ε²(cos 2x - 3) bifurcating from μ* = 5/6,
// which has the same form with C₁ = -6 and C₂ = 1.

#include "whitham/spectral.hpp"

#include <span>
#include <vector>

namespace whitham {

struct ExpansionCoefficients {
    DispersionModel model;
    double mu_star = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
};

ExpansionCoefficients whitham_coefficients();
ExpansionCoefficients kdv_coefficients();

struct Expansion {
    std::vector<double> values;
    double mu = 0.0;
};

double whitham_expansion_at(double eps, double x);
double whitham_expansion_speed(double eps);
Expansion whitham_expansion(double eps, std::span<const double> points);

double kdv_expansion_at(double eps, double x);
std::vector<double> kdv_expansion(double eps, std::span<const double> points);

// μ = 5/6 + ε²(C₁ + C₂) = 5/6 - 5ε², from the cos x balance at third order.
double kdv_expansion_speed(double eps);

}  // namespace whitham
