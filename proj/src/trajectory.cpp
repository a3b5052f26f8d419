#include "delayev/trajectory.hpp"

#include <cmath>

namespace delayev {

Trajectory::Trajectory(SpacePtr space, std::vector<double> grid,
                       std::vector<Eigen::VectorXd> states)
    : space_(std::move(space)), grid_(std::move(grid)), states_(std::move(states)) {
    if (!space_)
        throw DimensionError("Trajectory: null space");
    if (grid_.empty())
        throw DimensionError("Trajectory: empty time grid");
    if (grid_.size() != states_.size())
        throw DimensionError("Trajectory: grid and states lengths differ");
    if (grid_.front() != 0.0)
        throw DimensionError("Trajectory: the grid must start at t = 0");
    for (std::size_t k = 1; k < grid_.size(); ++k)
        if (!(grid_[k] > grid_[k - 1]))
            throw DimensionError("Trajectory: the grid must be strictly increasing");
    norms_.reserve(states_.size());
    for (const auto& u : states_)
        norms_.push_back(space_->norm(u));
}

double weighted_sup_norm(const Trajectory& traj, double omega_prime) {
    if (!(omega_prime > 0.0))
        throw DomainError("weighted_sup_norm: omega' must be positive");
    if (traj.size() == 0)
        throw DimensionError("weighted_sup_norm: empty trajectory");
    double best = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        best = std::max(best, std::exp(-omega_prime * traj.time(k)) * traj.norm(k));
    return best;
}

} // namespace delayev
