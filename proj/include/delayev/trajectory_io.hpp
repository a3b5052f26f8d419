#pragma once

#include <filesystem>
#include <optional>
#include <ostream>

#include "delayev/trajectory.hpp"

namespace delayev {

/// Envelope column parameters: alpha_tilde e^{1 - rate t}.
struct EnvelopeColumn {
    double alpha_tilde = 0.0;
    double rate = 0.0;
};

/// CSV export: header t,norm_H[,envelope],component_0..component_{d-1};
/// floats printed with 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::optional<EnvelopeColumn>& envelope = std::nullopt);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::optional<EnvelopeColumn>& envelope = std::nullopt);

} // namespace delayev
