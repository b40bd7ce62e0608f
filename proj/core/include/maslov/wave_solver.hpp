// Traveling-front computation: damped-Newton collocation for the profile
// equation w'' + c w' + Q D grad_F(w) = 0 on a truncated domain, with
// projection boundary conditions at the hyperbolic ends, plus profile
// save/load with full revalidation.
#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maslov/system_model.hpp"

namespace maslov::wave {
struct WaveProfile;
}

namespace maslov {

// The Newton/continuation ladder failed partway up.  `stage` is the domain
// half-length that failed; `last_good` (possibly null) is the converged
// profile from the previous rung.
struct ContinuationError : Error {
    double stage;
    std::shared_ptr<const wave::WaveProfile> last_good;
    explicit ContinuationError(double s, std::shared_ptr<const wave::WaveProfile> lg = nullptr)
        : Error("continuation failed at domain half-length " + std::to_string(s)),
          stage(s),
          last_good(std::move(lg)) {}
};

// The solve converged but to a wave running the wrong way (c <= 0).  Swap the
// two rest states (xi -> -xi) and solve again.
struct OrientationError : Error {
    double c;
    explicit OrientationError(double c_)
        : Error("front speed came out nonpositive (c = " + std::to_string(c_) +
                "); swap the rest states and re-solve"),
          c(c_) {}
};

}  // namespace maslov

namespace maslov::wave {

// Computed heteroclinic profile on a uniform grid over [-Xi, Xi].  Rows of
// `w` / `wp` are nodes; `wp` carries the solver's high-order derivative so
// downstream consumers never re-differentiate.
struct WaveProfile {
    Eigen::VectorXd xi;
    Eigen::MatrixXd w;   // nodes x n
    Eigen::MatrixXd wp;  // nodes x n
    double c = 0.0;
    model::RestState w_minus;
    model::RestState w_plus;
    double residual_norm = std::numeric_limits<double>::infinity();
};

struct BVPConfig {
    double Xi = 40.0;
    int nodes = 2001;
    double tol_newton = 1e-10;
    double tol_bc = 1e-6;
    double tol_res = 1e-8;
    // Domain half-lengths solved in order (warm-started); empty means an
    // automatic ladder ending at Xi.
    std::vector<double> continuation;
    // Translation is fixed by pinning one component at the middle node.  A
    // NaN value means: the middle equilibrium branch for the built-in FHN
    // system, the midpoint of the two end states otherwise.
    int phase_component = 0;
    double phase_value = std::numeric_limits<double>::quiet_NaN();
};

struct Equilibria {
    double u1, u2, u3;
};

// The three solutions of u = gamma f(u) for the cubic FHN nonlinearity,
// polished to 1e-12.  Throws InputError when the fold has closed and fewer
// than three real roots exist.
Equilibria find_equilibria_fhn(double a, double gamma);

// Solve for (w*, c) with unknown speed, projection boundary conditions built
// from the stable/unstable splittings of the end linearizations, and one
// phase row.  `guess` warm-starts the first continuation rung; otherwise a
// tanh interpolant between the rest states is used.
WaveProfile solve_front(const model::SkewGradientSystem& system, const BVPConfig& config = {},
                        const std::optional<WaveProfile>& guess = {});

// Max-norm ODE residual with the solver's own stencils (4th order inside,
// 3-point beside the boundary).  This is what `residual_norm` stores.
double profile_residual(const model::SkewGradientSystem& system, const WaveProfile& profile);

// Independent plain second-order residual, used as the grid-refinement
// metric: it decays like h^2 on an exact wave, unlike the solver residual,
// which is small by construction.
double consistency_residual(const model::SkewGradientSystem& system, const WaveProfile& profile);

// Residual of the derivative of the profile equation on the stored w':
// the translation mode must lie in the kernel of the linearization at
// lambda = 0, so this stays at discretization level for a true wave.
double translation_residual(const model::SkewGradientSystem& system, const WaveProfile& profile);

// Profile files: CSV `xi,w1..wn,dw1..dwn` with full-precision doubles, plus
// a JSON sidecar holding c, the end states, the system parameters, and the
// stored residual.  Loading reconstructs the system from the sidecar and
// revalidates every profile invariant from scratch; a profile whose
// recomputed residual exceeds tol_res is rejected as not a wave of the
// declared system.
void save_profile(const WaveProfile& profile, const model::SkewGradientSystem& system,
                  const std::string& csv_path, const std::string& meta_path);

struct LoadedProfile {
    WaveProfile profile;
    model::SkewGradientSystem system;
};

LoadedProfile load_profile(const std::string& csv_path, const std::string& meta_path,
                           const BVPConfig& config = {});

}  // namespace maslov::wave
