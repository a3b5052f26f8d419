#include "delayev/state_space.hpp"

#include <cmath>

#include "delayev/linalg.hpp"

namespace delayev {

StateSpace::StateSpace(Eigen::MatrixXd gram) {
    if (gram.rows() == 0 || gram.rows() != gram.cols())
        throw DimensionError("StateSpace: gram matrix must be square and non-empty");
    if (!gram.allFinite())
        throw NumericError("StateSpace: gram matrix has non-finite entries");
    const double scale = gram.cwiseAbs().maxCoeff();
    const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(1.0, scale))
        throw ConfigError("StateSpace: gram matrix is not symmetric to 1e-12 relative");
    gram_ = 0.5 * (gram + gram.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(gram_);
    if (llt.info() != Eigen::Success)
        throw ConfigError("StateSpace: gram matrix is not positive definite");
    chol_lower_ = llt.matrixL();
}

double StateSpace::inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    check_vector(u);
    check_vector(v);
    return u.dot(gram_ * v);
}

double StateSpace::norm(const Eigen::VectorXd& v) const {
    check_vector(v);
    return (chol_lower_.transpose() * v).norm();
}

double StateSpace::operator_norm(const Eigen::MatrixXd& op) const {
    if (op.rows() != dim() || op.cols() != dim())
        throw DimensionError("StateSpace::operator_norm: operator dimension mismatch");
    Eigen::MatrixXd lt_op = chol_lower_.transpose() * op;
    // X = L^T T L^{-T}: solve L X^T = (L^T T)^T.
    Eigen::MatrixXd xt =
        chol_lower_.triangularView<Eigen::Lower>().solve(lt_op.transpose());
    return spectral_norm(xt.transpose());
}

void StateSpace::check_vector(const Eigen::VectorXd& v) const {
    if (v.size() != dim())
        throw DimensionError("state vector length does not match space dimension");
    if (!v.allFinite())
        throw NumericError("state vector has non-finite entries");
}

SpacePtr make_space(Eigen::MatrixXd gram) {
    return std::make_shared<StateSpace>(std::move(gram));
}

SpacePtr make_euclidean_space(int dim) {
    return make_space(Eigen::MatrixXd::Identity(dim, dim));
}

StateVector::StateVector(Eigen::VectorXd c, SpacePtr s)
    : coords(std::move(c)), space(std::move(s)) {
    if (!space)
        throw DimensionError("StateVector: null space");
    space->check_vector(coords);
}

double h_norm(const StateVector& v) {
    return v.space->norm(v.coords);
}

} // namespace delayev
