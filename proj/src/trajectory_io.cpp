#include "delayev/trajectory_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "delayev/errors.hpp"

namespace delayev {

namespace {

void put_g17(std::ostream& os, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    os << buf;
}

} // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::optional<EnvelopeColumn>& envelope) {
    const int dim = traj.space()->dim();
    os << "t,norm_H";
    if (envelope)
        os << ",envelope";
    for (int i = 0; i < dim; ++i)
        os << ",component_" << i;
    os << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        put_g17(os, traj.time(k));
        os << ',';
        put_g17(os, traj.norm(k));
        if (envelope) {
            os << ',';
            put_g17(os, envelope->alpha_tilde * std::exp(1.0 - envelope->rate * traj.time(k)));
        }
        const Eigen::VectorXd& u = traj.state(k);
        for (int i = 0; i < dim; ++i) {
            os << ',';
            put_g17(os, u(i));
        }
        os << "\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::optional<EnvelopeColumn>& envelope) {
    std::ofstream out(path);
    if (!out)
        throw Error("cannot open trajectory output file: " + path.string());
    write_trajectory_csv(out, traj, envelope);
}

} // namespace delayev
