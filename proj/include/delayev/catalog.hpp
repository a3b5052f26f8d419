#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "delayev/delays.hpp"

namespace delayev {

/// One entry of the closed scalar-function catalog used for delays, kernel
/// coefficients and history time-profiles:
///   constant | linear | sinusoidal | exp_decay_kernel | poly_decay_kernel |
///   piecewise_table
struct CatalogEntry {
    std::string kind;
    std::map<std::string, double> params;
    std::vector<double> times;  // piecewise_table only
    std::vector<double> values; // piecewise_table only
};

/// Delay realization; the declared slope bound c comes from the channel
/// config, the derivative range is derived from the catalog entry unless
/// overridden.
DelayFunction make_delay(const CatalogEntry& entry, double declared_c,
                         std::optional<double> slope_min_override = std::nullopt);

/// Kernel realization. exp_decay_kernel and poly_decay_kernel (p > 1) carry
/// closed-form L1 tails; a piecewise_table kernel vanishes beyond its last
/// sample and carries an exact tail; a constant kernel has a tail only when
/// it is identically zero.
KernelCoefficient make_kernel(const CatalogEntry& entry);

/// Scalar time-profile (used for history magnitudes).
std::function<double(double)> make_profile(const CatalogEntry& entry);

} // namespace delayev
