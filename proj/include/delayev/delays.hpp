#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "delayev/history.hpp"
#include "delayev/state_space.hpp"

namespace delayev {

/// Time-varying delay tau(t) >= 0 with declared slope bounds
/// slope_min <= tau'(t) <= c < 1. The callback must accept arguments down
/// to -tau0.
struct DelayFunction {
    std::function<double(double)> tau;
    double c = 0.0;
    double slope_min = 0.0;
    double tau0 = 0.0;

    /// Spot-validate nonnegativity and the declared slope bounds by finite
    /// differences on a sampled grid over [0, horizon].
    void validate(double horizon, int n_samples = 1024) const;
};

/// Kernel coefficient k in L^1_loc([0, inf)), optionally with a closed-form
/// tail bound T -> integral_T^inf |k|.
struct KernelCoefficient {
    std::function<double(double)> k;
    std::function<double(double)> l1_tail; // may be null

    bool has_tail() const { return static_cast<bool>(l1_tail); }
    /// Smallest T >= 0 with l1_tail(T) <= eps (expanding bisection).
    double tail_cutoff(double eps) const;
    /// Quadrature of |k| on [0, 1] must converge.
    void validate_local_integrability() const;
};

/// One delay feedback channel: k_i(t) B_i U(t - tau_i(t)).
struct DelayChannel {
    DelayFunction delay;
    KernelCoefficient kernel;
    Eigen::MatrixXd op_matrix;
    double op_norm_b = 0.0; // declared bound >= ||B_i||_{L(H)}
    HistorySegment history;
    int index = -1;
};

/// phi_i(s) = s - tau_i(s).
double phi(const DelayChannel& ch, double s);

/// Inverse of phi_i by bracketed bisection (phi' >= 1 - c > 0).
double phi_inverse(const DelayChannel& ch, double z, double tol);
double phi_inverse(const DelayChannel& ch, double z); // tol = 1e-10 (1 + |z|)

/// |k_i(phi_i^{-1}(z))| / (1 - c_i), the weight of the change of variables.
double effective_weight(const DelayChannel& ch, double z);

/// Finite truncation of the countable channel family. eps_tail is the
/// user-certified bound on the discarded channels' total contribution to
/// both integrals of the smallness assumption.
struct DelayFamily {
    std::vector<DelayChannel> channels;
    double eps_tail = 0.0;
    std::optional<double> tail_sup; // declared sup of the discarded tau_i(0)

    void validate(const StateSpace& space) const;
};

double family_tau_star(const DelayFamily& fam);

} // namespace delayev
