#include "delayev/models.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace delayev {

double MemoryKernel::eval(double s) const {
    return mu0 * std::exp(-delta * s);
}

double MemoryKernel::tail(double s) const {
    return (mu0 / delta) * std::exp(-delta * s);
}

void MemoryKernel::validate() const {
    if (!(mu0 > 0.0))
        throw ConfigError("memory kernel: hypothesis (ii) needs mu(0) = mu0 > 0");
    if (!(delta > 0.0))
        throw ConfigError("memory kernel: hypothesis (iv) needs delta > 0");
    if (!(mu_tilde() < 1.0))
        throw ConfigError("memory kernel: hypothesis (iii) violated, mu_tilde >= 1");
}

Eigen::MatrixXd dirichlet_laplacian(int n_x) {
    if (n_x < 1)
        throw DomainError("dirichlet_laplacian: n_x must be positive");
    const double h = 1.0 / (n_x + 1);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n_x, n_x);
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 0; j < n_x; ++j) {
        lap(j, j) = -2.0 * inv_h2;
        if (j > 0) lap(j, j - 1) = inv_h2;
        if (j + 1 < n_x) lap(j, j + 1) = inv_h2;
    }
    return lap;
}

Eigen::MatrixXd clamped_biharmonic(int n_x) {
    if (n_x < 5)
        throw DomainError("clamped_biharmonic: the 5-point stencil needs n_x >= 5");
    const double h = 1.0 / (n_x + 1);
    const double inv_h4 = 1.0 / (h * h * h * h);
    Eigen::MatrixXd b4 = Eigen::MatrixXd::Zero(n_x, n_x);
    for (int j = 0; j < n_x; ++j) {
        b4(j, j) = 6.0;
        if (j > 0) b4(j, j - 1) = -4.0;
        if (j + 1 < n_x) b4(j, j + 1) = -4.0;
        if (j > 1) b4(j, j - 2) = 1.0;
        if (j + 2 < n_x) b4(j, j + 2) = 1.0;
    }
    // Clamped ends: the ghost reflection u_{-1} = u_1 folds into the first row.
    b4(0, 0) = 7.0;
    b4(n_x - 1, n_x - 1) = 7.0;
    return b4 * inv_h4;
}

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> region_nodes(int n_x, const RegionSpec& r) {
    if (!(r.lo < r.hi) || r.lo < 0.0 || r.hi > 1.0)
        throw ConfigError("region: requires 0 <= lo < hi <= 1");
    const double h = 1.0 / (n_x + 1);
    std::vector<int> nodes;
    for (int j = 1; j <= n_x; ++j) {
        const double x = j * h;
        if (x >= r.lo && x < r.hi)
            nodes.push_back(j);
    }
    return nodes;
}

void check_partition(const std::vector<std::vector<int>>& region_sets,
                     const std::vector<int>& target, const char* what) {
    std::map<int, int> cover;
    for (int j : target)
        cover[j] = 0;
    for (const auto& nodes : region_sets)
        for (int j : nodes) {
            auto it = cover.find(j);
            if (it == cover.end()) {
                std::ostringstream msg;
                msg << what << ": region node " << j << " lies outside the admissible set";
                throw ConfigError(msg.str());
            }
            it->second += 1;
        }
    for (const auto& [j, count] : cover)
        if (count != 1) {
            std::ostringstream msg;
            msg << what << ": node " << j << " covered " << count
                << " times; regions must be disjoint and covering";
            throw ConfigError(msg.str());
        }
}

DelayChannel make_channel(const ChannelConfig& cc, const SpacePtr& space,
                          Eigen::MatrixXd op, double op_norm,
                          Eigen::VectorXd hist_dir, int index) {
    DelayChannel ch;
    ch.delay = make_delay(cc.delay, cc.c, cc.slope_min);
    ch.kernel = make_kernel(cc.kernel);
    ch.op_matrix = std::move(op);
    ch.op_norm_b = op_norm;
    ch.index = index;
    auto profile = make_profile(cc.history);
    Eigen::VectorXd dir = std::move(hist_dir);
    ch.history =
        HistorySegment::from_callback(ch.delay.tau0, space->dim(),
                                      [profile, dir](double s) -> Eigen::VectorXd {
                                          return profile(s) * dir;
                                      })
            .with_channel_index(index);
    return ch;
}

GrowthCertificate make_certificate(const Generator& gen, const CertificateConfig& cc) {
    return certify_growth_bound(gen, cc.horizon, cc.n_samples, cc.supplied);
}

struct MemoryWaveAssembly {
    SpacePtr space;
    Eigen::MatrixXd a;
    int dim = 0;
    double h = 0.0;
};

/// Shared assembly for the viscoelastic wave (stiffness = Laplacian) and the
/// plate (stiffness = -biharmonic). K = -h * stiffness is the SPD energy form.
MemoryWaveAssembly assemble_memory_model(int n_x, int n_s, double s_max,
                                         const MemoryKernel& mk,
                                         const Eigen::MatrixXd& stiffness) {
    if (n_s < 1)
        throw DomainError("memory model: n_s must be positive");
    if (!(s_max > 0.0))
        throw DomainError("memory model: s_max must be positive");
    mk.validate();
    if (mk.tail(s_max) > 1e-10)
        throw ConfigError("memory model: s_max too small, kernel tail above 1e-10");

    const double h = 1.0 / (n_x + 1);
    const double mu_t = mk.mu_tilde();
    const double ds = s_max / n_s;
    const int dim = n_x * (2 + n_s);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_x, n_x);
    const Eigen::MatrixXd k_form = -h * stiffness;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
    const int u0 = 0, v0 = n_x;
    a.block(u0, v0, n_x, n_x) = id;
    a.block(v0, u0, n_x, n_x) = (1.0 - mu_t) * stiffness;
    gram.block(u0, u0, n_x, n_x) = (1.0 - mu_t) * k_form;
    gram.block(v0, v0, n_x, n_x) = h * id;
    for (int q = 0; q < n_s; ++q) {
        const int e0 = n_x * (2 + q);
        const double sq = (q + 1) * ds;
        const double wq = (q == n_s - 1) ? 0.5 * ds : ds;
        const double muq = mk.eval(sq);
        a.block(v0, e0, n_x, n_x) = wq * muq * stiffness;
        a.block(e0, v0, n_x, n_x) = id;
        a.block(e0, e0, n_x, n_x) = -(1.0 / ds) * id;
        if (q > 0)
            a.block(e0, e0 - n_x, n_x, n_x) = (1.0 / ds) * id;
        gram.block(e0, e0, n_x, n_x) = wq * muq * k_form;
    }
    return MemoryWaveAssembly{make_space(std::move(gram)), std::move(a), dim, h};
}

Eigen::VectorXd memory_initial_state(int n_x, int n_s, double ds, const WaveInit& init) {
    if (init.history_rate < 0.0)
        throw ConfigError("wave init: history_rate must be nonnegative");
    if (init.u_mode < 1 || init.v_mode < 1)
        throw ConfigError("wave init: mode numbers must be >= 1");
    const double h = 1.0 / (n_x + 1);
    Eigen::VectorXd state = Eigen::VectorXd::Zero(n_x * (2 + n_s));
    for (int j = 1; j <= n_x; ++j) {
        const double x = j * h;
        state(j - 1) = init.u_amp * std::sin(init.u_mode * kPi * x);
        state(n_x + j - 1) = init.v_amp * std::sin(init.v_mode * kPi * x);
    }
    for (int q = 0; q < n_s; ++q) {
        const double sq = (q + 1) * ds;
        const double factor = 1.0 - std::exp(-init.history_rate * sq);
        for (int j = 1; j <= n_x; ++j)
            state(n_x * (2 + q) + j - 1) = factor * state(j - 1);
    }
    return state;
}

/// Region channels for the wave-family models: B_i injects chi_{O_i} v into
/// the v slot; the history direction is sin(pi x) on the region's v nodes,
/// normalized to unit H-norm so the profile equals ||g_i||_H.
std::vector<DelayChannel> make_region_channels(
    const std::vector<ChannelConfig>& configs, const SpacePtr& space, int n_x,
    int v_offset, const std::vector<int>& admissible, const char* what,
    std::vector<std::array<double, 2>>& region_table,
    std::vector<int>& node_counts) {
    std::vector<std::vector<int>> sets;
    for (const auto& cc : configs) {
        if (!cc.region)
            throw ConfigError(std::string(what) + ": every channel needs a region");
        sets.push_back(region_nodes(n_x, *cc.region));
    }
    if (!configs.empty())
        check_partition(sets, admissible, what);

    const double h = 1.0 / (n_x + 1);
    std::vector<DelayChannel> channels;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        Eigen::MatrixXd op = Eigen::MatrixXd::Zero(space->dim(), space->dim());
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(space->dim());
        for (int j : sets[i]) {
            op(v_offset + j - 1, v_offset + j - 1) = 1.0;
            dir(v_offset + j - 1) = std::sin(kPi * j * h);
        }
        const double dn = space->norm(dir);
        if (dn > 0.0)
            dir /= dn;
        channels.push_back(make_channel(configs[i], space, std::move(op),
                                        sets[i].empty() ? 0.0 : 1.0, std::move(dir),
                                        static_cast<int>(i)));
        region_table.push_back({configs[i].region->lo, configs[i].region->hi});
        node_counts.push_back(static_cast<int>(sets[i].size()));
    }
    return channels;
}

std::vector<int> all_nodes(int n_x) {
    std::vector<int> nodes(n_x);
    for (int j = 1; j <= n_x; ++j)
        nodes[j - 1] = j;
    return nodes;
}

BuiltModel finish_model(SystemSpec sys, ModelInfo info) {
    sys.validate();
    info.dim = sys.space->dim();
    info.tau_star = family_tau_star(sys.delays);
    info.lipschitz = sys.nonlinearity.lipschitz;
    info.cert_m = sys.certificate.m;
    info.cert_omega = sys.certificate.omega;
    info.cert_origin =
        sys.certificate.origin == CertificateOrigin::user ? "user" : "estimated";
    return BuiltModel{std::move(sys), std::move(info)};
}

} // namespace

BuiltModel build_wave_memory(const WaveMemoryParams& p) {
    auto asmb = assemble_memory_model(p.n_x, p.n_s, p.s_max, p.kernel,
                                      dirichlet_laplacian(p.n_x));
    ModelInfo info;
    info.type = "wave_memory";
    info.n_x = p.n_x;
    info.n_s = p.n_s;
    info.mu_tilde = p.kernel.mu_tilde();

    Generator gen(asmb.a, asmb.space);
    DelayFamily family;
    family.channels = make_region_channels(p.channels, asmb.space, p.n_x, p.n_x,
                                           all_nodes(p.n_x), "wave_memory",
                                           info.regions, info.region_node_counts);
    family.eps_tail = p.eps_tail;
    family.tail_sup = p.tail_sup;

    SystemSpec sys{asmb.space,
                   gen,
                   make_certificate(gen, p.cert),
                   std::move(family),
                   nonlinearity_catalog(p.f.kind, p.f.scale, asmb.space, p.n_x, p.n_x),
                   memory_initial_state(p.n_x, p.n_s, p.s_max / p.n_s, p.init)};
    return finish_model(std::move(sys), std::move(info));
}

BuiltModel build_damped_wave(const DampedWaveParams& p) {
    if (p.n_x < 1)
        throw DomainError("damped_wave: n_x must be positive");
    if (p.a < 0.0)
        throw DomainError("damped_wave: damping coefficient a must be nonnegative");
    const double h = 1.0 / (p.n_x + 1);
    const Eigen::MatrixXd lap = dirichlet_laplacian(p.n_x);
    const int dim = 2 * p.n_x;

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    a.block(0, p.n_x, p.n_x, p.n_x) = Eigen::MatrixXd::Identity(p.n_x, p.n_x);
    a.block(p.n_x, 0, p.n_x, p.n_x) = lap;
    const auto damping_set = region_nodes(p.n_x, p.damping);
    for (int j : damping_set)
        a(p.n_x + j - 1, p.n_x + j - 1) = -p.a;

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
    gram.block(0, 0, p.n_x, p.n_x) = -h * lap;
    gram.block(p.n_x, p.n_x, p.n_x, p.n_x) =
        h * Eigen::MatrixXd::Identity(p.n_x, p.n_x);
    SpacePtr space = make_space(std::move(gram));

    ModelInfo info;
    info.type = "damped_wave";
    info.n_x = p.n_x;

    Generator gen(std::move(a), space);
    DelayFamily family;
    family.channels = make_region_channels(p.channels, space, p.n_x, p.n_x,
                                           damping_set, "damped_wave", info.regions,
                                           info.region_node_counts);
    family.eps_tail = p.eps_tail;
    family.tail_sup = p.tail_sup;

    Eigen::VectorXd u0 = memory_initial_state(p.n_x, 1, 1.0, p.init).head(dim);

    SystemSpec sys{space,
                   gen,
                   make_certificate(gen, p.cert),
                   std::move(family),
                   nonlinearity_catalog(p.f.kind, p.f.scale, space, p.n_x, p.n_x),
                   std::move(u0)};
    return finish_model(std::move(sys), std::move(info));
}

BuiltModel build_plate(const PlateParams& p) {
    auto asmb = assemble_memory_model(p.n_x, p.n_s, p.s_max, p.kernel,
                                      -clamped_biharmonic(p.n_x));
    ModelInfo info;
    info.type = "plate";
    info.n_x = p.n_x;
    info.n_s = p.n_s;
    info.mu_tilde = p.kernel.mu_tilde();

    Generator gen(asmb.a, asmb.space);
    DelayFamily family;
    family.channels = make_region_channels(p.channels, asmb.space, p.n_x, p.n_x,
                                           all_nodes(p.n_x), "plate", info.regions,
                                           info.region_node_counts);
    family.eps_tail = p.eps_tail;
    family.tail_sup = p.tail_sup;

    SystemSpec sys{asmb.space,
                   gen,
                   make_certificate(gen, p.cert),
                   std::move(family),
                   nonlinearity_catalog(p.f.kind, p.f.scale, asmb.space, p.n_x, p.n_x),
                   memory_initial_state(p.n_x, p.n_s, p.s_max / p.n_s, p.init)};
    return finish_model(std::move(sys), std::move(info));
}

BuiltModel build_scalar(const ScalarParams& p) {
    if (!(p.a > 0.0))
        throw DomainError("scalar model: a must be positive");
    SpacePtr space = make_euclidean_space(1);
    Generator gen(Eigen::MatrixXd::Constant(1, 1, -p.a), space);

    DelayFamily family;
    for (std::size_t i = 0; i < p.channels.size(); ++i) {
        const double b = p.channels[i].b.value_or(1.0);
        family.channels.push_back(make_channel(
            p.channels[i], space, Eigen::MatrixXd::Constant(1, 1, b), std::abs(b),
            Eigen::VectorXd::Ones(1), static_cast<int>(i)));
    }
    family.eps_tail = p.eps_tail;
    family.tail_sup = p.tail_sup;

    ModelInfo info;
    info.type = "scalar";

    SystemSpec sys{space,
                   gen,
                   make_certificate(gen, p.cert),
                   std::move(family),
                   nonlinearity_catalog(p.f.kind, p.f.scale, space, 0, 1),
                   Eigen::VectorXd::Constant(1, p.u0)};
    return finish_model(std::move(sys), std::move(info));
}

NonlinearMap nonlinearity_catalog(const std::string& kind, double scale,
                                  const SpacePtr& space, int slot_begin,
                                  int slot_len) {
    if (scale < 0.0)
        throw DomainError("nonlinearity: scale must be nonnegative");
    if (!space)
        throw DimensionError("nonlinearity: null space");
    const int dim = space->dim();
    NonlinearMap nm;
    nm.kind = kind;
    nm.scale = scale;

    if (kind == "zero") {
        nm.f = [dim](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(dim).eval(); };
        nm.lipschitz = 0.0;
        return nm;
    }
    if (kind == "sine") {
        if (slot_begin < 0 || slot_len < 1 || slot_begin + slot_len > dim)
            throw DimensionError("sine nonlinearity: slot out of range");
        // The Lipschitz bound L = scale holds in the H-norm because the slot
        // carries a uniform diagonal Gram block orthogonal to the rest.
        const auto& g = space->gram();
        const double c0 = g(slot_begin, slot_begin);
        for (int i = 0; i < slot_len; ++i)
            for (int j = 0; j < dim; ++j) {
                const double gij = g(slot_begin + i, j);
                const bool inside = j >= slot_begin && j < slot_begin + slot_len;
                const double expected = (inside && j == slot_begin + i) ? c0 : 0.0;
                if (std::abs(gij - expected) > 1e-12 * std::max(1.0, std::abs(c0)))
                    throw ConfigError(
                        "sine nonlinearity: the Gram block on the slot must be a uniform "
                        "diagonal, orthogonal to the rest of the state");
            }
        nm.f = [dim, slot_begin, slot_len, scale](const Eigen::VectorXd& u) {
            Eigen::VectorXd out = Eigen::VectorXd::Zero(dim);
            for (int i = 0; i < slot_len; ++i)
                out(slot_begin + i) = scale * std::sin(u(slot_begin + i));
            return out;
        };
        nm.lipschitz = scale;
        return nm;
    }
    if (kind == "saturating") {
        SpacePtr sp = space;
        nm.f = [sp, scale](const Eigen::VectorXd& u) {
            return (scale / (1.0 + sp->norm(u)) * u).eval();
        };
        nm.lipschitz = 2.0 * scale; // safe declared bound
        return nm;
    }
    throw ConfigError("nonlinearity: unknown kind '" + kind + "'");
}

nlohmann::json ModelInfo::to_json() const {
    nlohmann::json j;
    j["type"] = type;
    j["dim"] = dim;
    j["n_x"] = n_x;
    j["n_s"] = n_s;
    j["mu_tilde"] = mu_tilde;
    j["tau_star"] = tau_star;
    j["lipschitz"] = lipschitz;
    j["certificate"] = {{"m", cert_m}, {"omega", cert_omega}, {"origin", cert_origin}};
    nlohmann::json regs = nlohmann::json::array();
    for (std::size_t i = 0; i < regions.size(); ++i)
        regs.push_back({{"lo", regions[i][0]},
                        {"hi", regions[i][1]},
                        {"nodes", region_node_counts[i]}});
    j["regions"] = regs;
    return j;
}

} // namespace delayev
