#include "maslov/linearized.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace maslov::model {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Cubic Hermite value of the profile at xi, from the stored nodal values and
// the solver's high-order derivatives; clamped to the end states outside.
VectorXd hermite_profile(const wave::WaveProfile& p, double xi) {
    int N = static_cast<int>(p.xi.size());
    if (xi <= p.xi[0]) return p.w.row(0).transpose();
    if (xi >= p.xi[N - 1]) return p.w.row(N - 1).transpose();
    double h = p.xi[1] - p.xi[0];
    int k = std::min(static_cast<int>((xi - p.xi[0]) / h), N - 2);
    if (xi < p.xi[k]) --k;
    if (xi > p.xi[k + 1]) ++k;
    k = std::max(0, std::min(k, N - 2));
    double t = (xi - p.xi[k]) / h;
    double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    double h10 = t * (1.0 - t) * (1.0 - t);
    double h01 = t * t * (3.0 - 2.0 * t);
    double h11 = t * t * (t - 1.0);
    return h00 * p.w.row(k).transpose() + h * h10 * p.wp.row(k).transpose() +
           h01 * p.w.row(k + 1).transpose() + h * h11 * p.wp.row(k + 1).transpose();
}

}  // namespace

double bound_C(const LinearizedBundle& bundle) {
    constexpr double eps0 = 1e-6;
    const MatrixXd& Q = bundle.space.Q;
    double sup = -std::numeric_limits<double>::infinity();
    int samples = 2001;
    if (bundle.profile) samples = std::max<int>(samples, bundle.profile->xi.size());
    for (int j = 0; j < samples; ++j) {
        double xi = -bundle.Xi + 2.0 * bundle.Xi * j / (samples - 1);
        MatrixXd QB = Q * bundle.B_of_xi(xi);
        MatrixXd S = 0.5 * (QB + QB.transpose());
        sup = std::max(sup, Eigen::SelfAdjointEigenSolver<MatrixXd>(S).eigenvalues().maxCoeff());
    }
    return std::max(eps0, sup);
}

LinearizedBundle LinearizedBundle::from_profile(const SkewGradientSystem& system,
                                                const wave::WaveProfile& profile) {
    LinearizedBundle b;
    b.space = system.space;
    b.c = profile.c;
    b.B_minus = profile.w_minus.B;
    b.B_plus = profile.w_plus.B;
    b.Xi = profile.xi[profile.xi.size() - 1];
    b.profile = std::make_shared<const wave::WaveProfile>(profile);
    auto prof = b.profile;
    SkewGradientSystem sys = system;  // owned by the evaluator
    b.B_of_xi = [sys, prof](double xi) { return sys.B_at(hermite_profile(*prof, xi)); };
    double dm = (b.B_of_xi(-b.Xi) - b.B_minus).cwiseAbs().maxCoeff();
    double dp = (b.B_of_xi(b.Xi) - b.B_plus).cwiseAbs().maxCoeff();
    if (dm > 1e-4 || dp > 1e-4)
        throw ConsistencyError("bundle ends do not match the rest-state matrices");
    b.C = bound_C(b);
    return b;
}

LinearizedBundle LinearizedBundle::synthetic(const symp::SymplecticSpace& space, double c,
                                             std::function<Eigen::MatrixXd(double)> B,
                                             Eigen::MatrixXd B_minus, Eigen::MatrixXd B_plus,
                                             double Xi) {
    LinearizedBundle b;
    b.space = space;
    b.c = c;
    b.B_minus = std::move(B_minus);
    b.B_plus = std::move(B_plus);
    b.Xi = Xi;
    auto raw = std::move(B);
    Eigen::MatrixXd Bm = b.B_minus, Bp = b.B_plus;
    b.B_of_xi = [raw, Bm, Bp, Xi](double xi) {
        if (xi <= -Xi) return Bm;
        if (xi >= Xi) return Bp;
        return raw(xi);
    };
    double dm = (b.B_of_xi(-Xi + 1e-9) - Bm).cwiseAbs().maxCoeff();
    double dp = (b.B_of_xi(Xi - 1e-9) - Bp).cwiseAbs().maxCoeff();
    if (dm > 1e-4 || dp > 1e-4)
        throw ConsistencyError("synthetic bundle does not approach its end matrices");
    b.C = bound_C(b);
    return b;
}

Eigen::MatrixXd assemble_A(const LinearizedBundle& bundle, double lambda, double xi) {
    const MatrixXd& B = std::isinf(xi) ? (xi < 0.0 ? bundle.B_minus : bundle.B_plus)
                                       : bundle.B_of_xi(xi);
    return assemble_A(bundle.space.Q, B, bundle.c, lambda);
}

Eigen::MatrixXcd assemble_A(const LinearizedBundle& bundle, std::complex<double> lambda,
                            double xi) {
    const MatrixXd& B = std::isinf(xi) ? (xi < 0.0 ? bundle.B_minus : bundle.B_plus)
                                       : bundle.B_of_xi(xi);
    return assemble_A(bundle.space.Q, B, bundle.c, lambda);
}

Eigen::MatrixXd assemble_H(const LinearizedBundle& bundle, double lambda, double xi) {
    const MatrixXd& B = std::isinf(xi) ? (xi < 0.0 ? bundle.B_minus : bundle.B_plus)
                                       : bundle.B_of_xi(xi);
    return assemble_H(bundle.space.Q, B, bundle.c, lambda);
}

}  // namespace maslov::model
