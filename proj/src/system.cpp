#include "delayev/system.hpp"

#include <random>
#include <sstream>

namespace delayev {

void SystemSpec::validate(unsigned seed) const {
    if (!space)
        throw DimensionError("SystemSpec: null space");
    if (generator.space->dim() != space->dim())
        throw DimensionError("SystemSpec: generator dimension mismatch");
    space->check_vector(u0);
    if (!nonlinearity.f)
        throw ConfigError("SystemSpec: null nonlinearity callback");
    if (!(nonlinearity.lipschitz >= 0.0))
        throw ConfigError("SystemSpec: Lipschitz constant must be nonnegative");

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(space->dim());
    if (space->norm(nonlinearity.f(zero)) > 1e-12)
        throw ConfigError("SystemSpec: F(0) must vanish");

    delays.validate(*space);

    // Lipschitz spot-check on 200 seeded random pairs.
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double scale = 1.0 + space->norm(u0);
    const double l = nonlinearity.lipschitz;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd u(space->dim()), v(space->dim());
        for (int i = 0; i < u.size(); ++i) {
            u(i) = scale * gauss(rng);
            v(i) = scale * gauss(rng);
        }
        const double lhs = space->norm(nonlinearity.f(u) - nonlinearity.f(v));
        const double rhs = l * space->norm(u - v) * (1.0 + 1e-6) + 1e-14;
        if (lhs > rhs) {
            std::ostringstream msg;
            msg << "SystemSpec: nonlinearity violates its declared Lipschitz constant "
                << l << " (observed ratio " << lhs / std::max(space->norm(u - v), 1e-300)
                << ")";
            throw ConfigError(msg.str());
        }
    }
}

} // namespace delayev
