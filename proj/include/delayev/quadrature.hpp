#pragma once

#include <functional>

namespace delayev {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated per-panel |K15 - G7| estimates
    int panels = 0;
};

/// Adaptive Gauss-Kronrod (G7, K15) on [a, b]. A panel is accepted when its
/// error estimate meets the length-proportional absolute tolerance or the
/// relative one; otherwise it is bisected until the panel budget runs out.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_panels = 8192);

} // namespace delayev
