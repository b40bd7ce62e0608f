// The coefficient bundle of the linearization about a wave: B(xi) along the
// profile, the asymptotic matrices, the quadratic-form bound C, and the
// first-order / Hamiltonian coefficient matrices built from them.
#pragma once

#include <complex>
#include <functional>
#include <memory>

#include "maslov/system_model.hpp"
#include "maslov/wave_solver.hpp"

namespace maslov::model {

struct LinearizedBundle {
    symp::SymplecticSpace space;
    double c = 0.0;
    // xi -> D^{1/2} grad^2 F(w*(xi)) D^{1/2}; constant at B_minus / B_plus
    // outside [-Xi, Xi]
    std::function<Eigen::MatrixXd(double)> B_of_xi;
    Eigen::MatrixXd B_minus, B_plus;
    double C = 0.0;   // sup of <QB(xi)v, v> on unit vectors, floored at eps0
    double Xi = 0.0;  // half-length of the resolved profile window
    std::shared_ptr<const wave::WaveProfile> profile;  // null for synthetic bundles

    // Bundle of an actual computed wave: B(xi) evaluates the exact reaction
    // Hessian on a cubic-Hermite reconstruction of the stored profile.
    static LinearizedBundle from_profile(const SkewGradientSystem& system,
                                         const wave::WaveProfile& profile);

    // Hand-built bundle (test problems with closed-form B); C is computed
    // from samples the same way as for a real wave.
    static LinearizedBundle synthetic(const symp::SymplecticSpace& space, double c,
                                      std::function<Eigen::MatrixXd(double)> B,
                                      Eigen::MatrixXd B_minus, Eigen::MatrixXd B_plus,
                                      double Xi);
};

// [[-cI, lambda I - QB(xi)], [I, 0]]; xi = +-infinity substitutes the end
// matrices.
Eigen::MatrixXd assemble_A(const LinearizedBundle& bundle, double lambda, double xi);
Eigen::MatrixXcd assemble_A(const LinearizedBundle& bundle, std::complex<double> lambda,
                            double xi);

// [[Q, (c/2)Q], [(c/2)Q, B(xi) - lambda Q]] (symmetric by construction,
// verified at assembly).
Eigen::MatrixXd assemble_H(const LinearizedBundle& bundle, double lambda, double xi);

// max(eps0, sup_xi lambda_max(sym(QB(xi)))) over a dense sample, so that
// <QB(xi)v, v> <= C |v|^2 everywhere and C > 0.
double bound_C(const LinearizedBundle& bundle);

}  // namespace maslov::model
