// Dormand-Prince 5(4) adaptive integrator over matrix-valued states.  Small
// and local on purpose: frame evolution needs tight control of the accept
// hook (re-orthonormalization) and of failure reporting, which rules out a
// fire-and-forget library call.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace maslov::ode {

struct IntegrationError : std::runtime_error {
    double t;
    explicit IntegrationError(double t_) : std::runtime_error(make(t_)), t(t_) {}
    static std::string make(double t) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "adaptive step size underflow at t = %.12g", t);
        return buf;
    }
};

// Integrate y' = f(t, y) from t0 to t1 (either direction).  `post` runs after
// every accepted step (e.g. QR re-orthonormalization) and may replace y by
// any representative equivalent for the purpose at hand.
template <typename State, typename F, typename Post>
void dopri5(F&& f, State& y, double t0, double t1, double rtol, double atol, Post&& post) {
    static const double A21 = 1.0 / 5;
    static const double A31 = 3.0 / 40, A32 = 9.0 / 40;
    static const double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
    static const double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                        A54 = -212.0 / 729;
    static const double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                        A64 = 49.0 / 176, A65 = -5103.0 / 18656;
    static const double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                        B5 = -2187.0 / 6784, B6 = 11.0 / 84;
    static const double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                        E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                        E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
    static const double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;

    double span = t1 - t0;
    if (span == 0.0) return;
    double dir = span > 0.0 ? 1.0 : -1.0;
    double t = t0;
    double h = span / 16.0;
    for (int guard = 0; guard < 1000000; ++guard) {
        if (dir * (t1 - t) <= 0.0) return;
        if (dir * (t + h) > dir * t1) h = t1 - t;
        State k1 = f(t, y);
        State k2 = f(t + C2 * h, (y + h * (A21 * k1)).eval());
        State k3 = f(t + C3 * h, (y + h * (A31 * k1 + A32 * k2)).eval());
        State k4 = f(t + C4 * h, (y + h * (A41 * k1 + A42 * k2 + A43 * k3)).eval());
        State k5 = f(t + C5 * h, (y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4)).eval());
        State k6 = f(t + h, (y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5)).eval());
        State y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        State k7 = f(t + h, y5);
        State err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);

        double errn = 0.0;
        for (int i = 0; i < err.rows(); ++i)
            for (int j = 0; j < err.cols(); ++j) {
                double sc = atol + rtol * std::max(std::abs(y(i, j)), std::abs(y5(i, j)));
                errn = std::max(errn, std::abs(err(i, j)) / sc);
            }
        if (!std::isfinite(errn)) errn = 1e6;

        if (errn <= 1.0) {
            t += h;
            y = y5;
            post(t, y);
            double grow = errn > 0.0 ? 0.9 * std::pow(errn, -0.2) : 5.0;
            h *= std::clamp(grow, 0.2, 5.0);
        } else {
            h *= std::clamp(0.9 * std::pow(errn, -0.2), 0.1, 0.9);
        }
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) throw IntegrationError(t);
    }
    throw IntegrationError(t);
}

template <typename State, typename F>
void dopri5(F&& f, State& y, double t0, double t1, double rtol, double atol) {
    dopri5(std::forward<F>(f), y, t0, t1, rtol, atol, [](double, State&) {});
}

}  // namespace maslov::ode
