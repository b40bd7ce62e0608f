// Finite-dimensional symplectic linear algebra: Lagrangian frames and paths,
// crossing forms, the CLM (Maslov) index for pairs of paths, the triple index
// of three Lagrangians, and the Hormander index.  All computations run on
// (R^{2n}, omega) with omega(x,y) = <Jx,y>, J = [[0,-Q],[Q,0]], Q = diag(I_r, -I_{n-r}).
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace maslov {

// ------------------------------------------------------------------------- //
// error taxonomy
// ------------------------------------------------------------------------- //

// Base class for everything this library throws on its own behalf.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad argument: dimension mismatch, non-positive tolerance, and the like.
struct InputError : Error {
    using Error::Error;
};

// A claimed Lagrangian frame is rank-deficient (distinct from "not isotropic",
// which is an honest `false` from is_lagrangian).
struct NotAFrameError : Error {
    using Error::Error;
};

// An integer decision (rank, index) changed when the tolerance was moved by a
// factor of 10 in either direction; the input sits too close to a stratum
// boundary for the answer to be trusted.
struct AmbiguousRankError : Error {
    using Error::Error;
};

// A crossing form came out degenerate (m0 > 0).  Callers may perturb the
// parameter interval or lambda by a documented jitter and retry; nothing is
// regularized silently.
struct NonRegularCrossingError : Error {
    double t0;
    NonRegularCrossingError(const std::string& what, double t) : Error(what), t0(t) {}
};

// Crossing localization ran out of refinement (a cluster of crossings tighter
// than the grid can separate).
struct RefinementError : Error {
    using Error::Error;
};

// Two formulas that must agree disagreed (e.g. the two Hormander expressions);
// signals a numerical rank misjudgment rather than user error.
struct ConsistencyError : Error {
    using Error::Error;
};

// A path failed a required transversality condition at parameter t.
struct TransversalityError : Error {
    double t;
    TransversalityError(const std::string& what, double t_) : Error(what), t(t_) {}
};

// Linear solve for the crossing-form complement was too ill-conditioned.
struct ConditionError : Error {
    double condition;
    ConditionError(const std::string& what, double cond) : Error(what), condition(cond) {}
};

namespace symp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// ------------------------------------------------------------------------- //
// numerical policy (shared defaults, overridable per call where it matters)
// ------------------------------------------------------------------------- //
struct Tolerances {
    static constexpr double rank_rel = 1e-8;        // singular-value cut, relative to sigma_max
    static constexpr double bisect_width = 1e-10;   // crossing localization width in parameter
    static constexpr double fd_scale = 1e-5;        // finite-difference step, times parameter scale
    static constexpr double jitter = 1e-7;          // retry perturbation for degenerate crossings
    static constexpr double crossing_sigma = 1e-6;  // sigma_min band that triggers refinement
    static constexpr double candidate_sigma = 5e-2; // sigma_min minima below this get refined
    // A refined sigma_min minimum is a crossing only below this: a true
    // crossing bottoms out at machine level, a near-tangency at its miss
    // distance, so one decade under crossing_sigma separates them cleanly
    // while staying inside the rank test's decade-stability window.
    static constexpr double accept_sigma = 1e-9;
    // Zero band for finite-difference crossing forms.  Around a tangential
    // intersection the determinant is at rounding level over a window of
    // width ~sqrt(machine eps), so the located instant can sit anywhere in
    // it and the form picks up a genuine but meaningless slope of order
    // curvature * sqrt(eps) ~ 1e-8.  Transversal crossings produce slopes of
    // order the problem scale; eigenvalues below this band are treated as
    // zero and the crossing as non-regular.
    static constexpr double form_zero = 1e-6;
    static constexpr double dedupe = 1e-8;          // crossing dedup distance, times parameter scale
    static constexpr double isotropy = 1e-8;        // |Z^T J Z| ceiling for Lagrangian frames
};

// ------------------------------------------------------------------------- //
// domain types
// ------------------------------------------------------------------------- //

// The phase space (R^{2n}, omega) with signature structure Q = diag(I_r, -I_{n-r}).
struct SymplecticSpace {
    int n = 0;    // half-dimension
    int r = 0;    // dim V^+(Q)
    MatrixXd Q;   // n x n
    MatrixXd J;   // 2n x 2n

    SymplecticSpace() = default;  // empty placeholder; fill by assignment
    SymplecticSpace(int n_, int r_);
    int dim() const { return 2 * n; }
};

double omega(const SymplecticSpace& space, const VectorXd& x, const VectorXd& y);

// A Lagrangian subspace presented by a 2n x k column frame.  The subspace, not
// the particular frame, is the datum: every operation below is invariant under
// Z -> Z*G with G invertible.  Frames keep a pointer to their space; spaces are
// cheap immutable values that must outlive the frames built on them.
struct LagrangianFrame {
    MatrixXd Z;                              // 2n x k, usually k = n
    const SymplecticSpace* space = nullptr;

    LagrangianFrame() = default;
    LagrangianFrame(const SymplecticSpace& sp, MatrixXd frame);
    int cols() const { return static_cast<int>(Z.cols()); }
};

// A symmetric bilinear form together with the basis of the subspace it lives
// on: gram(i,j) = form(basis_i, basis_j).  For forms obtained by finite
// differences, `noise` bounds the absolute uncertainty of the gram entries
// (measured from the step-halving drift); eigenvalues inside that band have
// no trustworthy sign.
struct SymmetricFormOnSubspace {
    MatrixXd basis;      // 2n x k
    MatrixXd gram;       // k x k, symmetric
    double noise = 0.0;  // absolute entry uncertainty; 0 for exact forms
    int dim() const { return static_cast<int>(gram.rows()); }
};

// Inertia (m+, m0, m-) of a symmetric matrix; the zero band uses an absolute
// floor so that forms that are simply tiny do not read as all-degenerate.
struct Inertia {
    int pos = 0, zero = 0, neg = 0;
    int signature() const { return pos - neg; }
};
Inertia inertia(const MatrixXd& gram, double tol = Tolerances::rank_rel);

// A continuous path of Lagrangian subspaces over [a,b].
struct LagrangianPath {
    std::function<LagrangianFrame(double)> eval;
    double a = 0.0, b = 1.0;
    int sampling_hint = 400;  // initial grid for crossing localization

    LagrangianFrame operator()(double t) const { return eval(t); }
};

// Make a constant path out of a single frame.
LagrangianPath constant_path(const LagrangianFrame& V, double a, double b);

// One conjugate instant: where the path pair intersects nontrivially.
struct CrossingRecord {
    double t0 = 0.0;
    MatrixXd kernel_basis;           // columns span the intersection at t0
    SymmetricFormOnSubspace form;    // crossing form on that intersection
    bool regular = false;            // m0 == 0
    Inertia form_inertia;            // cached inertia of `form`
};

// CLM index plus the crossing list it was assembled from.
struct ClmResult {
    int index = 0;
    std::vector<CrossingRecord> crossings;
};

// ------------------------------------------------------------------------- //
// frame-level operations
// ------------------------------------------------------------------------- //

// Orthonormalize columns (thin QR with positive diagonal of R, so the result
// is deterministic and depends continuously on Z wherever Z has full rank).
MatrixXd orthonormalize(const MatrixXd& Z);

// True iff Z has full column rank and Z^T J Z vanishes to `tol`.
// Rank deficiency throws NotAFrameError instead of returning false.
bool is_lagrangian(const LagrangianFrame& frame, double tol = Tolerances::isotropy);

struct IntersectionResult {
    int dim = 0;
    MatrixXd basis;  // 2n x dim, orthonormal
};

// Intersection of two subspaces given by arbitrary column blocks (no
// Lagrangian structure assumed).  Rank decisions use the relative threshold
// `tol` and are re-checked at tol/10 and tol*10; disagreement throws
// AmbiguousRankError.
IntersectionResult intersect_subspaces(const MatrixXd& Z1, const MatrixXd& Z2,
                                       double tol = Tolerances::rank_rel);

// Spec'd entry point for Lagrangian frames; tol <= 0 is an input error.
IntersectionResult intersection(const SymplecticSpace& space, const LagrangianFrame& L1,
                                const LagrangianFrame& L2, double tol = Tolerances::rank_rel);

// ------------------------------------------------------------------------- //
// crossing forms
// ------------------------------------------------------------------------- //

// Crossing form of `path` against the fixed Lagrangian V at t0, computed on
// path(t0) cap V:  Gamma(v_i, v_j) = d/dt omega(v_i, w_j(t)) |_{t0}, where
// w_j(t) is the correction in a fixed Lagrangian complement W of path(t0) with
// v_j + w_j(t) in path(t).  Central differences with step h; the result is
// independent of the choice of W up to O(h^2).
SymmetricFormOnSubspace crossing_form(const LagrangianPath& path, const LagrangianFrame& V,
                                      double t0, double h);

// Relative crossing form of a pair of moving paths on path1(t0) cap path2(t0):
// Gamma = Q_{path2} - Q_{path1}, i.e. the form of the second path minus the
// form of the first.  With path1 frozen this reduces to crossing_form of
// path2 against V = path1(t0), which is what fixes the orientation: the pair
// index of (constant V, moving L) equals the fixed-V index of L.
SymmetricFormOnSubspace crossing_form_pair(const LagrangianPath& path1,
                                           const LagrangianPath& path2, double t0, double h);

// ------------------------------------------------------------------------- //
// CLM index
// ------------------------------------------------------------------------- //

// Locate all parameters in [a,b] where path1(t) cap path2(t) != {0}: sample
// det[Z1(t)|Z2(t)] on a grid, bisect sign changes to width 1e-10, and chase
// sigma_min minima (golden section) for even-dimensional crossings that leave
// the determinant sign unchanged.
std::vector<double> locate_crossings(const LagrangianPath& path1, const LagrangianPath& path2);

// CLM index of the pair over the shared interval, assembled from crossing
// forms:  m+(Gamma(a)) + sum_{a<t<b} sign Gamma(t) - m-(Gamma(b)).
// Degenerate crossings throw NonRegularCrossingError (carrying t0).
ClmResult clm_pair_detailed(const LagrangianPath& path1, const LagrangianPath& path2);
int clm_index_pair(const LagrangianPath& path1, const LagrangianPath& path2);

// CLM index of a single path against the fixed Lagrangian V (the pair index
// with the constant path in the first slot).
ClmResult clm_fixed_detailed(const LagrangianFrame& V, const LagrangianPath& path);
int clm_index_fixed(const LagrangianFrame& V, const LagrangianPath& path);

// ------------------------------------------------------------------------- //
// triple and Hormander indices
// ------------------------------------------------------------------------- //

// The form Q(alpha,beta;delta) on alpha cap (beta + delta): decompose
// x = y + z with y in beta, z in delta and set Q(x1,x2) = omega(y1, z2).
// Kernel of the result is alpha cap beta + alpha cap delta.
SymmetricFormOnSubspace triple_form(const SymplecticSpace& space, const LagrangianFrame& alpha,
                                    const LagrangianFrame& beta, const LagrangianFrame& delta);

// iota(alpha,beta;kappa) = m+(Q(alpha,beta;kappa)) + dim(alpha cap kappa)
//                          - dim(alpha cap beta cap kappa);  a nonnegative integer.
int triple_index(const SymplecticSpace& space, const LagrangianFrame& alpha,
                 const LagrangianFrame& beta, const LagrangianFrame& kappa);

// Hormander index s(l1,l2;k1,k2) = iota(l1,l2,k2) - iota(l1,l2,k1)
//                                = iota(l1,k1,k2) - iota(l2,k1,k2).
// Both expressions are evaluated and must agree exactly.
int hormander_index(const SymplecticSpace& space, const LagrangianFrame& l1,
                    const LagrangianFrame& l2, const LagrangianFrame& k1,
                    const LagrangianFrame& k2);

// CLM index of a pair of paths that both stay transversal to the fixed
// Lagrangian L, computed without crossing forms as
//   iota(path2(b), path1(b); L) - iota(path2(a), path1(a); L).
// Transversality is sampled on the paths' grid; a violation throws
// TransversalityError carrying the offending t.
int clm_via_transversal_endpoints(const SymplecticSpace& space, const LagrangianPath& path1,
                                  const LagrangianPath& path2, const LagrangianFrame& L);

}  // namespace symp
}  // namespace maslov
