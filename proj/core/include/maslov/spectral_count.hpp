#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <utility>
#include <vector>

#include "maslov/bundle_evolution.hpp"
#include "maslov/linearized.hpp"

namespace maslov::spectral {

// One point of the matching-determinant sweep.  The stable frame from the
// right end and the unstable frame from the left end are carried to xi = 0
// and joined; lambda is an eigenvalue exactly when the joined matrix drops
// rank, so det_value = 0 iff intersection_dim >= 1.
struct EvansSample {
    double lambda = 0.0;
    double det_value = 0.0;
    int intersection_dim = 0;
};

// Real nonnegative eigenvalues found on [0, C], with multiplicities.
// N_plus counts the strictly positive ones (above the delta0 exclusion zone
// around the translation eigenvalue); N_bar_plus adds the kernel dimension
// at lambda = 0.
struct EigCount {
    std::vector<std::pair<double, int>> eigenvalues;  // (lambda, multiplicity)
    int N_plus = 0;
    int N_bar_plus = 0;
    double zero_slope = 0.0;  // finite-difference slope of det across [0, delta0]
    bool zero_simple = false; // kernel at 0 is one-dimensional with nonzero slope
};

struct FlowCrossing {
    double lambda = 0.0;
    int kernel_dim = 0;
    int crossing_sign = 0;  // signature of <Q phi, phi> on the kernel
};

// Net signed count of eigenvalues of the self-adjoint family crossing zero
// as lambda sweeps the interval, plus the discretization that produced it.
struct SpectralFlowResult {
    std::vector<FlowCrossing> crossings;
    int sf = 0;
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double Xi = 0.0;
    int nodes = 0;
    int lambda_samples = 0;
};

// Outcome of the operator-inequality test that confines the unstable
// spectrum to the real axis.  Route (a) works from the activator block
// (S_a positive with its coupling a contraction), route (b) from the
// inhibitor block; either one suffices.
struct RealnessVerdict {
    bool holds = false;
    bool route_a = false;
    bool route_b = false;
    double margin_definite_a = 0.0;    // smallest eigenvalue of S_a
    double margin_definite_b = 0.0;    // smallest eigenvalue of -S_i
    double coupling_norm_sq_a = 0.0;   // ||S_a^{-1} S_c||^2, must be < 1
    double coupling_norm_sq_b = 0.0;   // ||(-S_i)^{-1} S_c^T||^2, must be < 1
    // d > gamma^{-2}, filled by callers that know the reaction parameters;
    // the operator test itself is parameter-agnostic.
    std::optional<bool> fhn_d_condition;
};

enum class CheckStatus { passed, failed, skipped };
const char* to_string(CheckStatus s);

// Everything the index identities need, gathered by the pipeline driver.
struct TheoremInputs {
    bool H1 = false;
    bool H2 = false;
    bool H2prime = false;
    RealnessVerdict realness;
    bundle::MaslovResult compactified;              // the wave index
    std::optional<bundle::MaslovResult> anchored;   // only when a usable tau0 exists
    bundle::BoundaryPathResult boundary;
    int triple_LR_0 = 0;  // asymptotic-subspace triple index against L_R at lambda = 0
    int triple_LR_C = 0;  // same at lambda = C
    EigCount counts;
    SpectralFlowResult flow;
};

// Pass/fail/skipped verdicts for the index identities, with the integers
// they compare.  Failures are report content, not exceptions.
struct IndexReport {
    bool H1 = false;
    bool H2 = false;
    bool H2prime = false;
    RealnessVerdict realness;
    std::optional<bool> d_gt_gamma_inv2;

    int index_compactified = 0;
    std::optional<int> index_anchored;
    std::optional<double> tau0_used;
    int boundary_index = 0;
    bool boundary_dual_checked = false;
    int triple_LR_0 = 0;
    int triple_LR_C = 0;

    int N_plus = 0;
    int N_bar_plus = 0;
    int sf_S = 0;

    // |index + triple_LR_0| <= N_bar_plus; needs H1 and H2.
    CheckStatus bound_with_boundary_term = CheckStatus::skipped;
    // |index| <= N_bar_plus; needs H2'.
    CheckStatus bound_plain = CheckStatus::skipped;
    // N_plus == sf_S == index; needs the route-(b) monotonicity mechanism.
    CheckStatus count_equals_index = CheckStatus::skipped;
    // anchored index == compactified index, when an anchored value exists.
    CheckStatus definitions_agree = CheckStatus::skipped;
    // -sf == pair index + boundary index; a homotopy identity, always checked.
    CheckStatus flow_decomposition = CheckStatus::skipped;

    bool all_applicable_pass() const;
};

// Sweeps the matching determinant over an increasing lambda grid.  Frames
// are QR-normalized and aligned to the frames of the first grid point, so
// det_value varies continuously along the grid.  Work items are independent
// and run in parallel (MASLOV_WAVE_THREADS caps the pool).
std::vector<EvansSample> evans_sweep(const model::LinearizedBundle& bundle,
                                     const Eigen::VectorXd& lambda_grid);

// One sample at a single lambda, aligned against reference frames computed
// at lambda_ref (pass the sweep's first grid point for grid consistency).
EvansSample evans_at(const model::LinearizedBundle& bundle, double lambda, double lambda_ref);

// Brackets the sign changes of a sweep, bisects each root to refine_tol,
// and reads off multiplicities from the intersection dimension at the root.
// A root within refine_tol of the top of the grid means the search interval
// was too short and raises an error.
EigCount count_eigenvalues(const model::LinearizedBundle& bundle,
                           const std::vector<EvansSample>& samples, double delta0 = 1e-4,
                           double refine_tol = 1e-9);

// Finite-difference Dirichlet discretization of the self-adjoint operator
//   S_lambda = -Q d^2/dxi^2 + (c^2/4) Q - B(xi) + lambda Q
// on the interior nodes of a uniform grid over [-Xi, Xi].  Exactly symmetric
// by construction.
Eigen::SparseMatrix<double> discretize_S(const model::LinearizedBundle& bundle, double lambda,
                                         double Xi, int nodes);

// Tracks eigenvalues of the discretized family through zero as lambda sweeps
// [lambda_lo, lambda_hi]: negative-inertia counts on a coarse grid, bisection
// to isolate each crossing, kernel vectors by inverse iteration, and crossing
// signs from the signature of <Q phi, phi> on the kernel, cross-checked
// against the inertia jump.
SpectralFlowResult spectral_flow_S(const model::LinearizedBundle& bundle, double lambda_lo,
                                   double lambda_hi, int nodes, double Xi = -1.0,
                                   int lambda_samples = 33);

// Negative-inertia count of the discretized operator at one lambda, by block
// LDL^T elimination along the grid.  Exposed for convergence testing.
int negative_count_S(const model::LinearizedBundle& bundle, double lambda, double Xi, int nodes);

// Checks the block operator inequalities behind the realness lemma on the
// discretization: route (a) S_a > 0 with ||S_a^{-1} S_c|| < 1, route (b)
// -S_i > 0 with ||(-S_i)^{-1} S_c^T|| < 1, where S_a, S_i are the activator
// and inhibitor compressions of S_0 and S_c the coupling block.
RealnessVerdict check_lemma31(const model::LinearizedBundle& bundle, int nodes,
                              double Xi = -1.0);

// Triple index of the asymptotic subspaces against the reference Lagrangian,
//   iota(E^u_lambda(-inf), E^s_lambda(+inf); L_R),
// at a single lambda.
int asymptotic_triple_index(const model::LinearizedBundle& bundle, double lambda);

// Applies the hypothesis gates and emits one verdict per identity.
IndexReport verify_theorems(const TheoremInputs& in);

}  // namespace maslov::spectral
