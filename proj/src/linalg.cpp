#include "delayev/linalg.hpp"

#include <cmath>
#include <vector>

#include "delayev/errors.hpp"

namespace delayev {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double one_norm(const MatrixXd& a) {
    return a.cwiseAbs().colwise().sum().maxCoeff();
}

MatrixXd pade_from_uv(const MatrixXd& u, const MatrixXd& v) {
    // r(A) = (V - U)^{-1} (V + U)
    return (v - u).partialPivLu().solve(v + u);
}

// Diagonal Pade numerator coefficients b_0..b_m for e^x.
const double b3[] = {120.0, 60.0, 12.0, 1.0};
const double b5[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
const double b7[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                     25200.0, 1512.0, 56.0, 1.0};
const double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                     30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0};
const double b13[] = {64764752532480000.0, 32382376266240000.0,
                      7771770303897600.0,  1187353796428800.0,
                      129060195264000.0,   10559470521600.0,
                      670442572800.0,      33522128640.0,
                      1323241920.0,        40840800.0,
                      960960.0,            16380.0,
                      182.0,               1.0};

MatrixXd pade_low(const MatrixXd& a, const MatrixXd& a2, const double* b, int m) {
    const auto n = a.rows();
    const MatrixXd id = MatrixXd::Identity(n, n);
    MatrixXd u_poly = b[1] * id;
    MatrixXd v_poly = b[0] * id;
    MatrixXd pw = id; // A^{2k}
    for (int k = 1; 2 * k + 1 <= m; ++k) {
        pw = pw * a2;
        u_poly += b[2 * k + 1] * pw;
        v_poly += b[2 * k] * pw;
    }
    return pade_from_uv(a * u_poly, v_poly);
}

MatrixXd pade13(const MatrixXd& a) {
    const auto n = a.rows();
    const MatrixXd id = MatrixXd::Identity(n, n);
    const MatrixXd a2 = a * a;
    const MatrixXd a4 = a2 * a2;
    const MatrixXd a6 = a2 * a4;
    MatrixXd u = a * (a6 * (b13[13] * a6 + b13[11] * a4 + b13[9] * a2)
                      + b13[7] * a6 + b13[5] * a4 + b13[3] * a2 + b13[1] * id);
    MatrixXd v = a6 * (b13[12] * a6 + b13[10] * a4 + b13[8] * a2)
                 + b13[6] * a6 + b13[4] * a4 + b13[2] * a2 + b13[0] * id;
    return pade_from_uv(u, v);
}

} // namespace

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols())
        throw DimensionError("expm: matrix must be square");
    if (a.rows() == 0)
        throw DimensionError("expm: empty matrix");
    if (!a.allFinite())
        throw NumericError("expm: matrix has non-finite entries");

    // Degree selection thresholds on ||A||_1 (Higham 2005).
    static const double theta3 = 1.495585217958292e-2;
    static const double theta5 = 2.539398330063230e-1;
    static const double theta7 = 9.504178996162932e-1;
    static const double theta9 = 2.097847961257068e0;
    static const double theta13 = 5.371920351148152e0;

    const double nrm = one_norm(a);
    MatrixXd r;
    if (nrm <= theta3) {
        r = pade_low(a, a * a, b3, 3);
    } else if (nrm <= theta5) {
        r = pade_low(a, a * a, b5, 5);
    } else if (nrm <= theta7) {
        r = pade_low(a, a * a, b7, 7);
    } else if (nrm <= theta9) {
        r = pade_low(a, a * a, b9, 9);
    } else {
        int s = static_cast<int>(std::ceil(std::log2(nrm / theta13)));
        if (s < 0) s = 0;
        if (s > 1100)
            throw NumericError("expm: matrix norm too large to scale");
        r = pade13(a / std::ldexp(1.0, s));
        for (int i = 0; i < s; ++i)
            r = r * r;
    }
    if (!r.allFinite())
        throw NumericError("expm: overflow in matrix exponential");
    return r;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0)
        throw DimensionError("spectral_norm: empty matrix");
    if (std::min(m.rows(), m.cols()) <= 160) {
        Eigen::BDCSVD<MatrixXd> svd(m);
        return svd.singularValues()(0);
    }
    // Power iteration on m^T m with a fixed, slightly de-symmetrized start.
    VectorXd v = VectorXd::Ones(m.cols());
    for (int i = 0; i < v.size(); ++i)
        v(i) += 1e-3 * std::sin(static_cast<double>(i + 1));
    v.normalize();
    double sigma = 0.0, prev = -1.0;
    for (int it = 0; it < 4000; ++it) {
        VectorXd w = m * v;
        sigma = w.norm();
        if (sigma == 0.0) return 0.0;
        VectorXd u = m.transpose() * w;
        double un = u.norm();
        if (un == 0.0) return sigma;
        v = u / un;
        if (it > 4 && std::abs(sigma - prev) <= 1e-13 * std::max(1.0, sigma))
            break;
        prev = sigma;
    }
    return sigma;
}

} // namespace delayev
