#include "delayev/quadrature.hpp"

#include <cmath>
#include <vector>

#include "delayev/errors.hpp"

namespace delayev {

namespace {

// 15-point Kronrod extension of 7-point Gauss on [-1, 1].
const double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
const double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
const double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct Panel {
    double a, b;
};

void eval_panel(const std::function<double(double)>& f, double a, double b,
                double& k15, double& err) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(mid);
    double resk = kWgk[7] * fc;
    double resg = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(mid - dx) + f(mid + dx);
        resk += kWgk[i] * fsum;
        if (i % 2 == 1)
            resg += kWg[i / 2] * fsum;
    }
    k15 = resk * half;
    err = std::abs((resk - resg) * half);
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_panels) {
    if (!(b >= a))
        throw DomainError("integrate_adaptive: requires b >= a");
    QuadResult out;
    if (a == b)
        return out;

    const double total_len = b - a;
    std::vector<Panel> stack{{a, b}};
    int evaluated = 0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        if (++evaluated > max_panels)
            throw ToleranceError("integrate_adaptive: panel budget exhausted before tolerance was met");

        double k15, err;
        eval_panel(f, p.a, p.b, k15, err);
        if (!std::isfinite(k15) || !std::isfinite(err))
            throw NumericError("integrate_adaptive: non-finite integrand");

        const double len = p.b - p.a;
        const double abs_goal = abs_tol * (len / total_len);
        const bool tiny = len < 1e-14 * (std::abs(a) + std::abs(b) + 1.0);
        if (err <= abs_goal || err <= rel_tol * std::abs(k15) || tiny) {
            out.value += k15;
            out.error += err;
            out.panels += 1;
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        stack.push_back({p.a, mid});
        stack.push_back({mid, p.b});
    }
    return out;
}

} // namespace delayev
