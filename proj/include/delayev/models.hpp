#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "delayev/catalog.hpp"
#include "delayev/system.hpp"

namespace delayev {

/// Exponential memory kernel mu(s) = mu0 e^{-delta s}; the sole v1 catalog
/// kernel for the viscoelastic models. mu_tilde = mu0/delta must stay < 1.
struct MemoryKernel {
    double mu0 = 0.5;
    double delta = 1.0;

    double mu_tilde() const { return mu0 / delta; }
    double eval(double s) const;
    double tail(double s) const; // integral_s^inf mu
    void validate() const;
};

/// Spatial subinterval of (0, 1); a node x_j = j h belongs when lo <= x_j < hi.
struct RegionSpec {
    double lo = 0.0;
    double hi = 1.0;
};

/// One delay channel as configured (catalog entries plus declared bounds).
struct ChannelConfig {
    CatalogEntry delay;
    double c = 0.0;
    std::optional<double> slope_min; // override the catalog-derived bound
    CatalogEntry kernel;
    CatalogEntry history;               // scalar time-profile of ||B_i U||
    std::optional<double> b;            // scalar model: operator value
    std::optional<RegionSpec> region;   // wave-family models
};

struct NonlinearityConfig {
    std::string kind = "zero"; // zero | sine | saturating
    double scale = 0.0;
};

/// Growth-bound source: a user-supplied (M, omega) pair validated on the
/// sample grid, or estimation on (0, horizon] with n_samples points.
struct CertificateConfig {
    std::optional<std::pair<double, double>> supplied;
    double horizon = 10.0;
    int n_samples = 32;
};

/// Initial data for the wave-family models: u(x,0) = u_amp sin(u_mode pi x),
/// u_t(x,0) = v_amp sin(v_mode pi x), past displacement
/// u(x,t) = u_amp sin(u_mode pi x) e^{history_rate t} for t <= 0 (feeding the
/// memory variable eta_0(x,s) = u(x,0) - u(x,-s)).
struct WaveInit {
    double u_amp = 1.0;
    int u_mode = 1;
    double v_amp = 0.0;
    int v_mode = 1;
    double history_rate = 0.0;
};

struct WaveMemoryParams {
    int n_x = 20;
    int n_s = 16;
    double s_max = 23.0;
    MemoryKernel kernel;
    std::vector<ChannelConfig> channels;
    NonlinearityConfig f;
    WaveInit init;
    CertificateConfig cert;
    double eps_tail = 0.0;
    std::optional<double> tail_sup;
};

struct DampedWaveParams {
    int n_x = 20;
    double a = 1.0;
    RegionSpec damping{0.0, 1.0};
    std::vector<ChannelConfig> channels;
    NonlinearityConfig f;
    WaveInit init;
    CertificateConfig cert;
    double eps_tail = 0.0;
    std::optional<double> tail_sup;
};

using PlateParams = WaveMemoryParams;

struct ScalarParams {
    double a = 1.0;
    double u0 = 1.0;
    std::vector<ChannelConfig> channels;
    NonlinearityConfig f;
    CertificateConfig cert;
    double eps_tail = 0.0;
    std::optional<double> tail_sup;
};

/// Summary metadata emitted alongside a built system.
struct ModelInfo {
    std::string type;
    int dim = 0;
    int n_x = 0;
    int n_s = 0;
    double mu_tilde = 0.0;
    double tau_star = 0.0;
    double lipschitz = 0.0;
    double cert_m = 0.0;
    double cert_omega = 0.0;
    std::string cert_origin;
    std::vector<std::array<double, 2>> regions;
    std::vector<int> region_node_counts;

    nlohmann::json to_json() const;
};

struct BuiltModel {
    SystemSpec system;
    ModelInfo info;
};

/// Viscoelastic 1D wave with the history variable eta^t(x,s) = u(x,t) - u(x,t-s):
/// state (u, v, eta), 3-point Dirichlet Laplacian, upwind transport in s with
/// inflow eta(s=0) = 0, trapezoid memory quadrature on [0, s_max].
BuiltModel build_wave_memory(const WaveMemoryParams& p);

/// Locally damped 1D wave: state (u, v), A = [[0, I], [Lap, -a chi_O]],
/// H = (Dirichlet form) x (mass).
BuiltModel build_damped_wave(const DampedWaveParams& p);

/// Clamped 1D plate (beam) with memory: the wave-memory structure with the
/// Laplacian replaced by -Delta^2 (5-point clamped biharmonic stencil).
BuiltModel build_plate(const PlateParams& p);

/// One-dimensional testbed: H = R, A = -a, M = 1, omega = a.
BuiltModel build_scalar(const ScalarParams& p);

/// Catalog nonlinearities. sine acts componentwise on [slot_begin,
/// slot_begin + slot_len); saturating acts on the whole state.
NonlinearMap nonlinearity_catalog(const std::string& kind, double scale,
                                  const SpacePtr& space, int slot_begin,
                                  int slot_len);

/// Discretization helpers (exposed for tests).
Eigen::MatrixXd dirichlet_laplacian(int n_x);
Eigen::MatrixXd clamped_biharmonic(int n_x);

} // namespace delayev
