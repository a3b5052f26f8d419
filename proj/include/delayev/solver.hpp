#pragma once

#include <optional>
#include <utility>

#include "delayev/certify.hpp"
#include "delayev/system.hpp"
#include "delayev/trajectory.hpp"

namespace delayev {

struct PicardOptions {
    double tol = 1e-10;
    int max_iter = 64;
    std::optional<double> omega_prime;      // override the weighted-norm rate
    bool constant_initial_iterate = false;  // U^(0) == U0 instead of S(t) U0
    bool throw_on_failure = true;
};

struct SolveReport {
    Trajectory trajectory;
    int iterations = 0;
    double final_residual = 0.0;
    double omega_prime_used = 0.0;
    bool converged = false;
    std::vector<double> residual_history;
};

/// Thrown when the Picard iteration hits max_iter; carries the full report.
class PicardNonConvergence : public ConvergenceError {
public:
    PicardNonConvergence(const std::string& what, SolveReport r)
        : ConvergenceError(what, r.residual_history), report(std::move(r)) {}

    SolveReport report;
};

/// Mild solution by Picard iteration on the Duhamel formula over a uniform
/// grid: trapezoid quadrature, cached per-step propagator, linear state
/// interpolation at delayed times, histories used directly as B_i U values.
SolveReport picard_solve(const SystemSpec& sys, double horizon, double dt,
                         const PicardOptions& opts);
SolveReport picard_solve(const SystemSpec& sys, double horizon, double dt,
                         double tol, int max_iter);

/// Method-of-steps RK4 cross-validation oracle. Requires
/// inf_t tau_i(t) >= 10 dt for every channel.
Trajectory steps_solve(const SystemSpec& sys, double horizon, double dt);

/// Classical RK4 on U' = A U + sum_i k_i(t) B_i U + F(U). Zero delays only.
Trajectory ode_reference(const SystemSpec& sys, double horizon, double dt);

struct EnvelopeCheck {
    bool passed = false;
    double worst_margin = 0.0; // min over nodes of envelope - norm
    double worst_time = 0.0;
};

/// Node-wise check of ||U(t_k)||_H <= decay_envelope(t_k) + 1e-8.
EnvelopeCheck verify_envelope(const SolveReport& report, const CertificateReport& cert);

/// Least-squares slope and intercept of log ||U||_H over [t_a, t_b].
std::pair<double, double> fit_decay_rate(const Trajectory& traj, double t_a, double t_b);

/// The weighted-norm rate a solve will use: select_omega_prime when it
/// exists and is computable, otherwise |omega| + 1.
double pick_weight_rate(const SystemSpec& sys);

} // namespace delayev
