#pragma once

#include <Eigen/Dense>
#include <vector>

#include "delayev/state_space.hpp"

namespace delayev {

/// A discrete trajectory: time grid starting at 0, one state per node,
/// cached H-norms.
class Trajectory {
public:
    Trajectory(SpacePtr space, std::vector<double> grid,
               std::vector<Eigen::VectorXd> states);

    std::size_t size() const { return grid_.size(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<Eigen::VectorXd>& states() const { return states_; }
    const std::vector<double>& norms() const { return norms_; }

    double time(std::size_t k) const { return grid_[k]; }
    const Eigen::VectorXd& state(std::size_t k) const { return states_[k]; }
    double norm(std::size_t k) const { return norms_[k]; }

    const SpacePtr& space() const { return space_; }

private:
    SpacePtr space_;
    std::vector<double> grid_;
    std::vector<Eigen::VectorXd> states_;
    std::vector<double> norms_;
};

/// Discrete surrogate of the weighted sup norm: max_k e^{-omega' t_k} ||U(t_k)||_H.
double weighted_sup_norm(const Trajectory& traj, double omega_prime);

} // namespace delayev
