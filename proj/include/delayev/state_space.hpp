#pragma once

#include <Eigen/Dense>
#include <memory>

#include "delayev/errors.hpp"

namespace delayev {

/// Finite-dimensional realization of the state space H: R^dim equipped with
/// a symmetric positive-definite Gram weight, <u,v>_H = u^T G v.
class StateSpace {
public:
    explicit StateSpace(Eigen::MatrixXd gram);

    int dim() const { return static_cast<int>(gram_.rows()); }
    const Eigen::MatrixXd& gram() const { return gram_; }

    double inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;
    double norm(const Eigen::VectorXd& v) const;

    /// Operator norm in L(H): sigma_max(L^T T L^{-T}) with G = L L^T.
    double operator_norm(const Eigen::MatrixXd& op) const;

    void check_vector(const Eigen::VectorXd& v) const;

private:
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd chol_lower_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

SpacePtr make_space(Eigen::MatrixXd gram);
SpacePtr make_euclidean_space(int dim);

/// A point of H together with the space it lives in.
struct StateVector {
    Eigen::VectorXd coords;
    SpacePtr space;

    StateVector(Eigen::VectorXd c, SpacePtr s);
};

double h_norm(const StateVector& v);

} // namespace delayev
