#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "delayev/state_space.hpp"

namespace delayev {

/// Generator A of the linear semigroup S(t) = e^{tA} on a concrete space.
struct Generator {
    Eigen::MatrixXd matrix;
    SpacePtr space;

    Generator(Eigen::MatrixXd m, SpacePtr s);
};

/// Apply S(t) = e^{tA} to a vector.
Eigen::VectorXd expm_apply(const Generator& g, double t, const Eigen::VectorXd& v);
StateVector expm_apply(const Generator& g, double t, const StateVector& v);

enum class CertificateOrigin { user, estimated };

/// Grid-validated growth bound  ||e^{tA}||_{L(H)} <= m e^{-omega t}.
/// The rate is signed: omega > 0 certifies decay, omega < 0 certifies only
/// growth no faster than m e^{|omega| t}.
struct GrowthCertificate {
    double m = 1.0;
    double omega = 0.0;
    std::vector<double> sample_grid;
    CertificateOrigin origin = CertificateOrigin::estimated;

    bool decay_signed() const { return omega > 0.0; }
    /// |omega|: the rate used where a growth-form bound  m e^{|omega| t} is needed.
    double rate_magnitude() const { return omega < 0.0 ? -omega : omega; }
};

/// Estimate (m, omega) on a geometric sample grid in (0, horizon], or
/// validate a user-supplied pair on the same grid.
GrowthCertificate certify_growth_bound(
    const Generator& g, double horizon, int n_samples,
    std::optional<std::pair<double, double>> supplied = std::nullopt);

/// Largest Rayleigh-type value <Av,v>_H / ||v||_H^2 over seeded random trials.
double dissipativity_check(const Generator& g, int n_trials, unsigned seed);

} // namespace delayev
