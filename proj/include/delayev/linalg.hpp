#pragma once

#include <Eigen/Dense>

namespace delayev {

/// Dense matrix exponential by scaling and squaring with diagonal Pade
/// approximants (degrees 3..13, Higham's degree selection).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// Largest singular value. Dense SVD up to a size crossover, then a
/// deterministic power iteration on m^T m.
double spectral_norm(const Eigen::MatrixXd& m);

} // namespace delayev
