#pragma once

#include <functional>
#include <string>

#include "delayev/delays.hpp"
#include "delayev/semigroup.hpp"

namespace delayev {

/// Lipschitz nonlinearity F with F(0) = 0 and a declared constant L.
struct NonlinearMap {
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> f;
    double lipschitz = 0.0;
    std::string kind = "zero";
    double scale = 0.0;
};

/// The complete abstract problem: generator + growth certificate + delay
/// channels + nonlinearity + initial state.
struct SystemSpec {
    SpacePtr space;
    Generator generator;
    GrowthCertificate certificate;
    DelayFamily delays;
    NonlinearMap nonlinearity;
    Eigen::VectorXd u0;

    /// Dimension consistency, F(0) = 0, Lipschitz spot-check on seeded
    /// random pairs, and per-channel validation.
    void validate(unsigned seed = 0) const;
};

} // namespace delayev
