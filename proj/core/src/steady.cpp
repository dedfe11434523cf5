#include "whitham/steady.hpp"

#include "whitham/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

namespace whitham {

namespace {

Eigen::VectorXd to_vector(std::span<const double> values) {
    return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

double sup_norm(const Eigen::VectorXd& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

WaveProfile make_profile(DispersionModel model, int k, double mu, const Eigen::VectorXd& phi) {
    const std::vector<double> values = to_std(phi);
    return WaveProfile{model, k, mu, phi.size() >= 2 ? cosine_analysis(values)
                                                     : CosineSpectrum{values}};
}

// Solves J d = rhs by partial-pivot LU and records the reciprocal condition
// estimate. Singular or numerically singular systems raise.
Eigen::VectorXd solve_dense(const Eigen::MatrixXd& jac, const Eigen::VectorXd& rhs,
                            SolverReport& report) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
    const double rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<double>::epsilon())) {
        throw SingularJacobianError("Newton linearization is singular (rcond = " +
                                    std::to_string(rcond) + ")");
    }
    report.condition_estimate = 1.0 / rcond;
    return lu.solve(rhs);
}

// Generic damped/undamped Newton loop over an unknown vector z.
template <class ResidualFn, class JacobianFn>
SolverReport run_newton(Eigen::VectorXd& z, ResidualFn&& residual_of, JacobianFn&& jacobian_of,
                        const NewtonOptions& options) {
    SolverReport report;
    Eigen::VectorXd r = residual_of(z);
    double norm = sup_norm(r);
    report.residual_norms.push_back(norm);
    while (true) {
        if (!std::isfinite(norm)) break;
        if (norm <= options.tol) {
            report.converged = true;
            break;
        }
        if (report.iterations >= options.max_iter) break;

        const Eigen::VectorXd step = solve_dense(jacobian_of(z), -r, report);
        Eigen::VectorXd trial = z + step;
        Eigen::VectorXd trial_r = residual_of(trial);
        double trial_norm = sup_norm(trial_r);
        if (options.line_search) {
            double lambda = 1.0;
            for (int halving = 0; halving < 20 && !(trial_norm < norm); ++halving) {
                lambda *= 0.5;
                trial = z + lambda * step;
                trial_r = residual_of(trial);
                trial_norm = sup_norm(trial_r);
            }
        }
        z = std::move(trial);
        r = std::move(trial_r);
        norm = trial_norm;
        ++report.iterations;
        report.residual_norms.push_back(norm);
    }
    return report;
}

}  // namespace

SteadyOperator::SteadyOperator(DispersionModel model, std::size_t n_points)
    : model_(model), grid_(n_points), analysis_(analysis_matrix(grid_)) {
    if (!model.speed_dependent()) fixed_operator_ = operator_matrix(model, grid_);
}

Eigen::MatrixXd SteadyOperator::multiplier_matrix(double mu) const {
    if (!model_.speed_dependent()) return fixed_operator_;
    return operator_matrix(model_, grid_, mu);
}

Eigen::VectorXd SteadyOperator::residual(const Eigen::VectorXd& phi, double mu) const {
    const Eigen::VectorXd square = phi.array().square().matrix();
    if (!model_.speed_dependent()) {
        return -mu * phi + square + fixed_operator_ * phi;
    }
    // L_μ v = Cᵀ (m ∘ C v), avoiding the O(N³) matrix build.
    const auto n = analysis_.rows();
    Eigen::VectorXd m(n);
    for (Eigen::Index l = 0; l < n; ++l) m(l) = symbol(model_, static_cast<double>(l), mu);
    const Eigen::VectorXd coeffs = analysis_ * (phi + square);
    return -mu * phi + analysis_.transpose() * m.cwiseProduct(coeffs);
}

Eigen::MatrixXd SteadyOperator::jacobian(const Eigen::VectorXd& phi, double mu) const {
    if (!model_.speed_dependent()) {
        Eigen::MatrixXd jac = fixed_operator_;
        jac.diagonal().array() += -mu + 2.0 * phi.array();
        return jac;
    }
    // -μI + L_μ (I + 2 diag φ)
    const Eigen::MatrixXd op = multiplier_matrix(mu);
    Eigen::MatrixXd jac = op + op * (2.0 * phi).asDiagonal();
    jac.diagonal().array() -= mu;
    return jac;
}

Eigen::VectorXd SteadyOperator::speed_derivative(const Eigen::VectorXd& phi, double mu) const {
    if (!model_.speed_dependent()) return -phi;
    const auto n = analysis_.rows();
    Eigen::VectorXd dm(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        dm(l) = symbol_speed_derivative(model_, static_cast<double>(l), mu);
    }
    const Eigen::VectorXd coeffs = analysis_ * (phi + phi.array().square().matrix());
    return -phi + analysis_.transpose() * dm.cwiseProduct(coeffs);
}

Eigen::RowVectorXd SteadyOperator::height_functional(int k) const {
    const auto n = analysis_.rows();
    Eigen::RowVectorXd weights(n);
    const double trough = std::numbers::pi / static_cast<double>(k);
    for (Eigen::Index l = 0; l < n; ++l) {
        const double ld = static_cast<double>(l);
        weights(l) = cosine_weight(static_cast<std::size_t>(l), size()) * (1.0 - std::cos(ld * trough));
    }
    return weights * analysis_;
}

std::vector<double> residual(std::span<const double> values, double mu, DispersionModel model) {
    const SteadyOperator op(model, values.size());
    return to_std(op.residual(to_vector(values), mu));
}

Eigen::MatrixXd jacobian(std::span<const double> values, double mu, DispersionModel model) {
    const SteadyOperator op(model, values.size());
    return op.jacobian(to_vector(values), mu);
}

SteadySolution newton_fixed_speed(const SteadyOperator& op, std::span<const double> initial,
                                  double mu, int k, const NewtonOptions& options) {
    Eigen::VectorXd phi = to_vector(initial);
    SolverReport report = run_newton(
        phi, [&](const Eigen::VectorXd& z) { return op.residual(z, mu); },
        [&](const Eigen::VectorXd& z) { return op.jacobian(z, mu); }, options);
    return {make_profile(op.model(), k, mu, phi), std::move(report)};
}

SteadySolution newton_fixed_speed(std::span<const double> initial, double mu,
                                  DispersionModel model, int k, const NewtonOptions& options) {
    const SteadyOperator op(model, initial.size());
    return newton_fixed_speed(op, initial, mu, k, options);
}

SteadySolution newton_fixed_height(const SteadyOperator& op, std::span<const double> initial,
                                   double mu0, double target_height, int k,
                                   const NewtonOptions& options) {
    const auto n = static_cast<Eigen::Index>(initial.size());
    const Eigen::RowVectorXd height_row = op.height_functional(k);

    Eigen::VectorXd z(n + 1);
    z.head(n) = to_vector(initial);
    z(n) = mu0;

    auto residual_of = [&](const Eigen::VectorXd& u) {
        Eigen::VectorXd r(n + 1);
        const Eigen::VectorXd phi = u.head(n);
        r.head(n) = op.residual(phi, u(n));
        r(n) = height_row.dot(phi) - target_height;
        return r;
    };
    auto jacobian_of = [&](const Eigen::VectorXd& u) {
        const Eigen::VectorXd phi = u.head(n);
        Eigen::MatrixXd jac(n + 1, n + 1);
        jac.topLeftCorner(n, n) = op.jacobian(phi, u(n));
        jac.topRightCorner(n, 1) = op.speed_derivative(phi, u(n));
        jac.bottomLeftCorner(1, n) = height_row;
        jac(n, n) = 0.0;
        return jac;
    };
    SolverReport report = run_newton(z, residual_of, jacobian_of, options);
    return {make_profile(op.model(), k, z(n), z.head(n)), std::move(report)};
}

SteadySolution newton_fixed_height(std::span<const double> initial, double mu0,
                                   double target_height, DispersionModel model, int k,
                                   const NewtonOptions& options) {
    const SteadyOperator op(model, initial.size());
    return newton_fixed_height(op, initial, mu0, target_height, k, options);
}

double waveheight(const WaveProfile& profile) {
    return cosine_synthesis(profile.spectrum, 0.0) -
           cosine_synthesis(profile.spectrum, std::numbers::pi / static_cast<double>(profile.k));
}

double grid_mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

GalileanImage galilean_shift(std::span<const double> values, double mu, double gamma) {
    GalileanImage image;
    image.values.assign(values.begin(), values.end());
    for (double& v : image.values) v += gamma;
    image.mu = mu + 2.0 * gamma;
    image.integration_constant = gamma * (1.0 - mu - gamma);
    return image;
}

}  // namespace whitham
