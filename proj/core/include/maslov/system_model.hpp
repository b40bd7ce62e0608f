// Skew-gradient reaction-diffusion systems: the nonlinearity and its
// derivatives, rest states, the matrices of the linearization about a wave,
// hypothesis checks on the asymptotic matrices, and the closed-form
// asymptotic spectra that drive the boundary-frame construction.
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "maslov/symplectic.hpp"

namespace maslov {

// An eigenvalue of an asymptotic coefficient matrix sits within `margin` of
// the imaginary axis, so the stable/unstable splitting is not defined.  For
// the spatial systems this doubles as the essential-spectrum detector.
struct HyperbolicityError : Error {
    double min_abs_re;
    explicit HyperbolicityError(double m)
        : Error("spectral splitting undefined: eigenvalue within " + std::to_string(m) +
                " of the imaginary axis"),
          min_abs_re(m) {}
};

}  // namespace maslov

namespace maslov::model {

using symp::LagrangianFrame;
using symp::SymplecticSpace;

// Reaction term in skew-gradient form: the PDE right-hand side is
// D w_xx + Q grad_F(w), with D positive diagonal and Q from the space.
struct SkewGradientSystem {
    SymplecticSpace space;
    Eigen::VectorXd D;  // diagonal of D; ones when the model has no scaling
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_F;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hess_F;
    std::vector<Eigen::VectorXd> rest_seeds;  // starting points for the equilibria
    std::string label;
    std::map<std::string, double> params;

    // D^{1/2} grad^2 F(w) D^{1/2}: the symmetric matrix entering every
    // linearization after the diffusion rescaling.
    Eigen::MatrixXd B_at(const Eigen::VectorXd& w) const;
};

// FitzHugh-Nagumo with cubic f(u) = u(1-u)(u-a) and slow field gamma:
//   u_t = d u_xx + f(u) - v,   v_t = v_xx + u - gamma v.
// Encoded with n = 2, r = 1, D = diag(1/d, 1) after rescaling by the wave
// operator's conventions; seeds are the resting and the excited equilibrium,
// in the order that yields a positive front speed.
SkewGradientSystem make_fhn_system(double a = 0.25, double gamma = 10.0, double d = 1.0);

enum class Side { minus, plus };

// Equilibrium of the reaction term together with its linearization matrix.
struct RestState {
    Eigen::VectorXd w;
    Eigen::MatrixXd B;  // D^{1/2} grad^2 F(w) D^{1/2}
    Side side;
};

// Newton-polish `seed` to a root of grad_F and package the matrices.
RestState make_rest_state(const SkewGradientSystem& system, const Eigen::VectorXd& seed,
                          Side side, double tol = 1e-12);

// First-order coefficient matrix of the linearized traveling-wave system,
//   A = [[-cI, lambda I - QB], [I, 0]],
// assembled from the symmetric B at one point (or one end) of the wave.
Eigen::MatrixXd assemble_A(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& B, double c,
                           double lambda);
Eigen::MatrixXcd assemble_A(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& B, double c,
                            std::complex<double> lambda);

// Symmetric coefficient of the Hamiltonian form of the same system,
//   H = [[Q, (c/2)Q], [(c/2)Q, B - lambda Q]].
// Throws ConsistencyError if the assembled matrix fails symmetry at 1e-12
// (which would mean an assembly bug, not bad data).
Eigen::MatrixXd assemble_H(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& B, double c,
                           double lambda);

// The two spatial roots mu = (-c +- sqrt(c^2 + 4(lambda - alpha)))/2 produced
// by one eigenvalue alpha of QB at an end state.  `first` carries the root
// with the principal square root added (the unstable one whenever Re alpha < 0
// and Re lambda >= 0), `second` the other.
std::pair<std::complex<double>, std::complex<double>> asymptotic_eigs(
    double c, std::complex<double> alpha, std::complex<double> lambda);

// Hypotheses on an end matrix B (with the Q of the ambient space):
//   H1:  all eigenvalues of QB lie strictly left of the imaginary axis;
//   H2:  the V^-(Q) block of sym(QB) is negative definite;
//   H2': sym(QB) is negative definite on all of R^n.
// H2' implies H1; the checks are independent so tests can confirm that.
bool check_H1(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double margin = 1e-10);
bool check_H2(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double margin = 0.0);
bool check_H2prime(const Eigen::MatrixXd& B, const Eigen::MatrixXd& Q, double margin = 0.0);

// For QB with spectrum strictly left of the axis, a nonsingular T such that
// sym(T^{-1} QB T) is negative definite.  Built from the real Schur form:
// rotate each complex 2x2 block to [[a,-b],[b,a]] shape, then shrink the
// strictly upper triangle by a geometric column scaling until the symmetric
// part goes negative.  Throws InputError when H1 fails.
Eigen::MatrixXd negativize_conjugation(const Eigen::MatrixXd& QB);

struct HyperbolicSplitting {
    Eigen::MatrixXd Vplus;   // orthonormal frame of the unstable subspace
    Eigen::MatrixXd Vminus;  // orthonormal frame of the stable subspace
};
struct HyperbolicSplittingC {
    Eigen::MatrixXcd Vplus;
    Eigen::MatrixXcd Vminus;
};

// Invariant subspaces of M for the right/left open half planes, via the
// matrix sign function (Newton iteration with determinant scaling).  Throws
// HyperbolicityError when an eigenvalue of M comes within `margin` of the
// imaginary axis.
HyperbolicSplitting hyperbolic_splitting(const Eigen::MatrixXd& M, double margin = 1e-8);
HyperbolicSplittingC hyperbolic_splitting(const Eigen::MatrixXcd& M, double margin = 1e-8);

// The reference Lagrangian {(p, q) : p in V^+(Q), q in V^-(Q)}.
LagrangianFrame build_LR(const SymplecticSpace& space);

// Round-trip of the defining parameters through a JSON document.  Doubles
// survive bit-exactly (shortest-round-trip serialization).  Only labeled
// built-in systems can be reconstructed; unknown labels are rejected.
std::string system_config_string(const SkewGradientSystem& system);
SkewGradientSystem system_from_config_string(const std::string& text);

}  // namespace maslov::model
