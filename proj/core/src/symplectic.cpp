#include "maslov/symplectic.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace maslov {
namespace symp {

using Eigen::JacobiSVD;
using Eigen::SelfAdjointEigenSolver;

// ------------------------------------------------------------------------- //
// space and frames
// ------------------------------------------------------------------------- //

SymplecticSpace::SymplecticSpace(int n_, int r_) : n(n_), r(r_) {
    if (n < 1 || r < 0 || r > n)
        throw InputError("SymplecticSpace: need n >= 1 and 0 <= r <= n");
    Q = MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) Q(i, i) = (i < r) ? 1.0 : -1.0;
    J = MatrixXd::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = -Q;
    J.bottomLeftCorner(n, n) = Q;
}

double omega(const SymplecticSpace& space, const VectorXd& x, const VectorXd& y) {
    if (x.size() != space.dim() || y.size() != space.dim())
        throw InputError("omega: vector dimension does not match the space");
    return (space.J * x).dot(y);
}

LagrangianFrame::LagrangianFrame(const SymplecticSpace& sp, MatrixXd frame)
    : Z(std::move(frame)), space(&sp) {
    if (Z.rows() != sp.dim())
        throw InputError("LagrangianFrame: frame must have 2n rows");
}

MatrixXd orthonormalize(const MatrixXd& Z) {
    const auto k = Z.cols();
    if (k == 0) return Z;
    Eigen::HouseholderQR<MatrixXd> qr(Z);
    MatrixXd Q = qr.householderQ() * MatrixXd::Identity(Z.rows(), k);
    MatrixXd R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    // Fix the sign of each column so the factorization is unique and varies
    // continuously along paths of full-rank frames.
    for (Eigen::Index j = 0; j < k; ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    return Q;
}

bool is_lagrangian(const LagrangianFrame& frame, double tol) {
    if (!frame.space) throw InputError("is_lagrangian: frame has no space");
    const auto& sp = *frame.space;
    JacobiSVD<MatrixXd> svd(frame.Z);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * sv(0))
        throw NotAFrameError("is_lagrangian: rank-deficient matrix is not a frame");
    MatrixXd Zo = orthonormalize(frame.Z);
    double defect = (Zo.transpose() * sp.J * Zo).cwiseAbs().maxCoeff();
    return frame.cols() <= sp.n && defect <= tol;
}

// ------------------------------------------------------------------------- //
// inertia, intersections
// ------------------------------------------------------------------------- //

Inertia inertia(const MatrixXd& gram, double tol) {
    Inertia out;
    if (gram.rows() == 0) return out;
    SelfAdjointEigenSolver<MatrixXd> es(gram);
    if (es.info() != Eigen::Success)
        throw Error("inertia: eigensolver failed");
    const VectorXd& ev = es.eigenvalues();
    // Absolute floor: a uniformly tiny form is a zero form, not an excuse to
    // rescale noise into signature.
    double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) > tol * scale)
            ++out.pos;
        else if (ev(i) < -tol * scale)
            ++out.neg;
        else
            ++out.zero;
    }
    return out;
}

IntersectionResult intersect_subspaces(const MatrixXd& Z1, const MatrixXd& Z2, double tol) {
    if (tol <= 0) throw InputError("intersection: tolerance must be positive");
    IntersectionResult out;
    const Eigen::Index m = Z1.rows();
    if (Z1.cols() == 0 || Z2.cols() == 0) {
        out.basis = MatrixXd::Zero(m, 0);
        return out;
    }
    MatrixXd Q1 = orthonormalize(Z1);
    MatrixXd Q2 = orthonormalize(Z2);
    MatrixXd M(m, Q1.cols() + Q2.cols());
    M << Q1, Q2;
    JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const VectorXd& sv = svd.singularValues();
    double smax = sv(0);
    if (smax == 0.0) {  // cannot happen for orthonormal blocks, but be safe
        out.basis = MatrixXd::Zero(m, 0);
        return out;
    }
    // Intersection dimension = nullity of [Q1 Q2] = cols - rank.  Going
    // through the rank (not the count of listed small singular values)
    // matters when the stacked matrix is wide: a wide matrix has structural
    // nullity beyond the min(rows, cols) singular values on the list.  The
    // integer answer must be stable when the threshold moves a decade in
    // either direction, otherwise the configuration is too marginal to call.
    const int cols = static_cast<int>(M.cols());
    auto rank_at = [&](double cut) {
        int k = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cut) ++k;
        return k;
    };
    int dim = cols - rank_at(tol * smax);
    int dim_lo = cols - rank_at((tol / 10.0) * smax);
    int dim_hi = cols - rank_at((tol * 10.0) * smax);
    if (dim != dim_lo || dim != dim_hi) {
        std::ostringstream msg;
        msg << "intersection: rank decision ambiguous (dim " << dim_lo << "/" << dim << "/"
            << dim_hi << " at tol/10, tol, tol*10; tol=" << tol << ")";
        throw AmbiguousRankError(msg.str());
    }
    out.dim = dim;
    if (dim == 0) {
        out.basis = MatrixXd::Zero(m, 0);
        return out;
    }
    // Right null vectors (a;b) satisfy Q1 a = -Q2 b up to sigma; Q1 a spans
    // the intersection.  With the full V they are its trailing columns.
    MatrixXd vecs(m, dim);
    for (int j = 0; j < dim; ++j) {
        VectorXd ab = svd.matrixV().col(cols - 1 - j);
        vecs.col(j) = Q1 * ab.head(Q1.cols());
        double nrm = vecs.col(j).norm();
        if (nrm > 0) vecs.col(j) /= nrm;
    }
    out.basis = orthonormalize(vecs);
    return out;
}

IntersectionResult intersection(const SymplecticSpace& space, const LagrangianFrame& L1,
                                const LagrangianFrame& L2, double tol) {
    if (L1.Z.rows() != space.dim() || L2.Z.rows() != space.dim())
        throw InputError("intersection: frame rows do not match the space");
    return intersect_subspaces(L1.Z, L2.Z, tol);
}

// ------------------------------------------------------------------------- //
// crossing forms
// ------------------------------------------------------------------------- //

namespace {

// d/dt omega(v_i, w_j(t)) at t0 for the kernel columns K, where w_j(t) is the
// correction of K.col(j) in the complement W = J*path(t0) such that
// K.col(j) + w_j(t) lies in path(t).  One central difference with step h.
MatrixXd crossing_gram_one_path(const LagrangianPath& path, double t0, double h,
                                const MatrixXd& K, const SymplecticSpace& space) {
    MatrixXd Z0 = orthonormalize(path(t0).Z);
    MatrixXd W = space.J * Z0;  // Lagrangian complement of path(t0)
    const Eigen::Index n2 = Z0.rows();
    const int k = static_cast<int>(K.cols());

    auto corrections = [&](double t) -> MatrixXd {
        MatrixXd M(n2, Z0.cols() + W.cols());
        M << orthonormalize(path(t).Z), -W;
        JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const VectorXd& sv = svd.singularValues();
        double cond = sv(0) / sv(sv.size() - 1);
        if (!(cond < 1e12))
            throw ConditionError("crossing form: complement solve ill-conditioned", cond);
        MatrixXd X = svd.solve(K);
        return W * X.bottomRows(W.cols());  // w_j(t), one column per kernel vector
    };

    MatrixXd Wp = corrections(t0 + h);
    MatrixXd Wm = corrections(t0 - h);
    MatrixXd G(k, k);
    for (int i = 0; i < k; ++i) {
        VectorXd Jv = space.J * K.col(i);
        for (int j = 0; j < k; ++j)
            G(i, j) = (Jv.dot(Wp.col(j)) - Jv.dot(Wm.col(j))) / (2.0 * h);
    }
    return G;
}

MatrixXd symmetrized_checked(const MatrixXd& G, const char* who) {
    double scale = std::max(1.0, G.cwiseAbs().maxCoeff());
    double defect = (G - G.transpose()).cwiseAbs().maxCoeff();
    if (defect > 1e-6 * scale) {
        std::ostringstream msg;
        msg << who << ": form asymmetry " << defect << " exceeds tolerance";
        throw ConsistencyError(msg.str());
    }
    return 0.5 * (G + G.transpose());
}

// Evaluate at steps h and h/2; the two estimates of an O(h^2)-accurate
// derivative must agree or the difference quotient is not trustworthy.  The
// observed drift also calibrates `noise_out`: the h/2 estimate's own error is
// a fraction of the drift when convergence is clean, so a generous multiple
// of it bounds the entries we cannot vouch for.  Tangential intersections are
// the case that matters: there the true form is ~0 and the difference
// quotient returns pure cancellation residue, which this bound flags as
// carrying no usable sign.
MatrixXd richardson_checked(const std::function<MatrixXd(double)>& gram_at, double h,
                            const char* who, double* noise_out) {
    MatrixXd Gh = gram_at(h);
    MatrixXd Gh2 = gram_at(h / 2.0);
    double scale = std::max(1.0, Gh2.cwiseAbs().maxCoeff());
    double drift = (Gh - Gh2).cwiseAbs().maxCoeff();
    if (drift > 1e-5 * scale) {
        std::ostringstream msg;
        msg << who << ": finite-difference estimates at h and h/2 differ by " << drift;
        throw ConsistencyError(msg.str());
    }
    if (noise_out) *noise_out = 30.0 * drift + 1e-13;
    return Gh2;
}

}  // namespace

SymmetricFormOnSubspace crossing_form(const LagrangianPath& path, const LagrangianFrame& V,
                                      double t0, double h) {
    if (!V.space) throw InputError("crossing_form: frame has no space");
    if (h <= 0) throw InputError("crossing_form: step h must be positive");
    const SymplecticSpace& space = *V.space;
    IntersectionResult kernel = intersect_subspaces(path(t0).Z, V.Z);
    if (kernel.dim == 0)
        throw InputError("crossing_form: no crossing at t0");
    SymmetricFormOnSubspace form;
    form.basis = kernel.basis;
    form.gram = symmetrized_checked(
        richardson_checked(
            [&](double hh) { return crossing_gram_one_path(path, t0, hh, kernel.basis, space); },
            h, "crossing_form", &form.noise),
        "crossing_form");
    return form;
}

SymmetricFormOnSubspace crossing_form_pair(const LagrangianPath& path1,
                                           const LagrangianPath& path2, double t0, double h) {
    LagrangianFrame f1 = path1(t0);
    LagrangianFrame f2 = path2(t0);
    if (!f1.space) throw InputError("crossing_form_pair: frame has no space");
    const SymplecticSpace& space = *f1.space;
    IntersectionResult kernel = intersect_subspaces(f1.Z, f2.Z);
    if (kernel.dim == 0)
        throw InputError("crossing_form_pair: no crossing at t0");
    // Relative form: contribution of the second path minus the first, so that
    // freezing path1 recovers the fixed-Lagrangian crossing form of path2.
    auto gram_at = [&](double hh) -> MatrixXd {
        return crossing_gram_one_path(path2, t0, hh, kernel.basis, space) -
               crossing_gram_one_path(path1, t0, hh, kernel.basis, space);
    };
    SymmetricFormOnSubspace form;
    form.basis = kernel.basis;
    form.gram = symmetrized_checked(
        richardson_checked(gram_at, h, "crossing_form_pair", &form.noise),
        "crossing_form_pair");
    return form;
}

// ------------------------------------------------------------------------- //
// crossing localization
// ------------------------------------------------------------------------- //

LagrangianPath constant_path(const LagrangianFrame& V, double a, double b) {
    LagrangianPath p;
    p.eval = [V](double) { return V; };
    p.a = a;
    p.b = b;
    p.sampling_hint = 16;  // nothing moves; the partner path dictates sampling
    return p;
}

namespace {

struct PairProbe {
    const LagrangianPath* p1;
    const LagrangianPath* p2;

    // det and sigma_min of [Z1(t) | Z2(t)] with orthonormalized blocks.
    std::pair<double, double> operator()(double t) const {
        MatrixXd Z1 = orthonormalize((*p1)(t).Z);
        MatrixXd Z2 = orthonormalize((*p2)(t).Z);
        MatrixXd M(Z1.rows(), Z1.cols() + Z2.cols());
        M << Z1, Z2;
        JacobiSVD<MatrixXd> svd(M);
        double smin = svd.singularValues()(svd.singularValues().size() - 1);
        double det = (M.rows() == M.cols()) ? M.determinant() : 0.0;
        return {det, smin};
    }
};

double golden_min(const std::function<double(double)>& f, double lo, double hi, double width) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > width) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - phi * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + phi * (hi - lo); f2 = f(x2);
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> locate_crossings(const LagrangianPath& path1, const LagrangianPath& path2) {
    const double a = path1.a, b = path1.b;
    if (std::abs(path2.a - a) > 1e-12 || std::abs(path2.b - b) > 1e-12)
        throw InputError("locate_crossings: paths must share the parameter interval");
    const int N = std::max({path1.sampling_hint, path2.sampling_hint, 400});
    PairProbe probe{&path1, &path2};

    std::vector<double> ts(N + 1), dets(N + 1), smins(N + 1);
    for (int i = 0; i <= N; ++i) {
        ts[i] = a + (b - a) * i / N;
        std::tie(dets[i], smins[i]) = probe(ts[i]);
    }

    int below = 0;
    for (double s : smins)
        if (s < Tolerances::crossing_sigma) ++below;
    if (below > N / 4)
        throw RefinementError(
            "locate_crossings: intersection locus is not isolated at grid resolution");

    // Candidates carry their provenance: a bisected determinant root is a
    // crossing by the intermediate value theorem, while a sigma_min minimum
    // must bottom out below accept_sigma (a true crossing reaches machine
    // level there; a near-tangency stalls at its miss distance and is no
    // crossing at all).
    struct Candidate {
        double t;
        bool from_root;
    };
    std::vector<Candidate> candidates;
    const double refine_width = 1e-12 * std::max(1.0, b - a);
    auto refine_sigma = [&](double lo, double hi) {
        return golden_min([&](double x) { return probe(x).second; }, lo, hi, refine_width);
    };
    // samples inside the trigger band: refine to the nearby minimum
    for (int i = 0; i <= N; ++i)
        if (smins[i] < Tolerances::crossing_sigma)
            candidates.push_back({refine_sigma(ts[std::max(i - 1, 0)], ts[std::min(i + 1, N)]),
                                  false});
    // odd-dimensional crossings: determinant sign changes, bisected
    for (int i = 0; i < N; ++i) {
        if (smins[i] < Tolerances::crossing_sigma || smins[i + 1] < Tolerances::crossing_sigma)
            continue;
        if (dets[i] * dets[i + 1] < 0.0) {
            double lo = ts[i], hi = ts[i + 1], flo = dets[i];
            while (hi - lo > Tolerances::bisect_width) {
                double mid = 0.5 * (lo + hi);
                double fmid = probe(mid).first;
                if (fmid == 0.0) { lo = hi = mid; break; }
                if (flo * fmid < 0.0) hi = mid;
                else { lo = mid; flo = fmid; }
            }
            candidates.push_back({0.5 * (lo + hi), true});
        }
    }
    // even-dimensional crossings: sigma_min dips without a sign change
    for (int i = 1; i < N; ++i)
        if (smins[i] < Tolerances::candidate_sigma && smins[i] <= smins[i - 1] &&
            smins[i] <= smins[i + 1] && smins[i] >= Tolerances::crossing_sigma)
            candidates.push_back({refine_sigma(ts[i - 1], ts[i + 1]), false});

    // dedupe: cluster by gap, keep the member with the smallest sigma_min,
    // then apply the acceptance rule to the cluster
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.t < y.t; });
    const double gap = Tolerances::dedupe * std::max(1.0, b - a);
    std::vector<double> crossings;
    size_t i = 0;
    while (i < candidates.size()) {
        size_t j = i;
        double best_t = candidates[i].t, best_s = probe(best_t).second;
        bool has_root = candidates[i].from_root;
        while (j + 1 < candidates.size() && candidates[j + 1].t - candidates[j].t <= gap) {
            ++j;
            has_root = has_root || candidates[j].from_root;
            double s = probe(candidates[j].t).second;
            if (s < best_s) { best_s = s; best_t = candidates[j].t; }
        }
        if (has_root || best_s < Tolerances::accept_sigma) crossings.push_back(best_t);
        i = j + 1;
    }

    // Completion pass: between consecutive recorded crossings the determinant
    // must keep one sign.  A residual sign change means a root was hidden in
    // a grid cell (two roots in one cell leave the endpoint dets equal in
    // sign, and the dip chase recovers only one of them); bisect it out.
    const double margin = std::max(1e3 * Tolerances::bisect_width, gap);
    for (int round = 0; round < 4; ++round) {
        std::vector<double> edges{a};
        edges.insert(edges.end(), crossings.begin(), crossings.end());
        edges.push_back(b);
        std::sort(edges.begin(), edges.end());
        bool grew = false;
        for (size_t s = 0; s + 1 < edges.size(); ++s) {
            double lo = (s == 0 && edges[0] == a) ? a : edges[s] + margin;
            double hi = (s + 2 == edges.size() && edges.back() == b) ? b : edges[s + 1] - margin;
            if (hi - lo < 4.0 * margin) continue;
            const int K = 16;
            double prev_t = lo, prev_d = probe(lo).first;
            for (int k = 1; k <= K; ++k) {
                double t = lo + (hi - lo) * k / K;
                double d = probe(t).first;
                if (prev_d * d < 0.0) {
                    double llo = prev_t, lhi = t, flo = prev_d;
                    while (lhi - llo > Tolerances::bisect_width) {
                        double mid = 0.5 * (llo + lhi);
                        double fmid = probe(mid).first;
                        if (fmid == 0.0) { llo = lhi = mid; break; }
                        if (flo * fmid < 0.0) lhi = mid;
                        else { llo = mid; flo = fmid; }
                    }
                    crossings.push_back(0.5 * (llo + lhi));
                    grew = true;
                }
                prev_t = t;
                prev_d = d;
            }
        }
        if (!grew) break;
        std::sort(crossings.begin(), crossings.end());
    }
    return crossings;
}

// ------------------------------------------------------------------------- //
// CLM index assembly
// ------------------------------------------------------------------------- //

ClmResult clm_pair_detailed(const LagrangianPath& path1, const LagrangianPath& path2) {
    const double a = path1.a, b = path1.b;
    const double scale = std::max(std::abs(b - a), 1.0);
    const double h = Tolerances::fd_scale * scale;
    const double end_tol = 1e-7 * scale;

    ClmResult out;
    for (double t0 : locate_crossings(path1, path2)) {
        // Snap to the interval ends: an endpoint crossing localized to 1e-10
        // must be treated as the endpoint, not as an interior instant.
        if (std::abs(t0 - a) <= end_tol) t0 = a;
        if (std::abs(t0 - b) <= end_tol) t0 = b;

        CrossingRecord rec;
        rec.t0 = t0;
        rec.form = crossing_form_pair(path1, path2, t0, h);
        rec.kernel_basis = rec.form.basis;
        // Classify eigenvalues against the form zero band (and the measured
        // difference-quotient noise, if larger): near a tangential
        // intersection the located instant carries an O(sqrt(eps))
        // uncertainty, and the form evaluated there has a tiny slope whose
        // sign is an artifact of where in the rounding window the locator
        // landed.  Counting it would silently corrupt the index; flagging the
        // crossing non-regular refuses instead.  (inertia's scale factor is
        // >= 1, so passing the absolute bound as tol keeps the zero band at
        // least that wide.)
        rec.form_inertia =
            inertia(rec.form.gram, std::max(Tolerances::form_zero, rec.form.noise));
        rec.regular = (rec.form_inertia.zero == 0);
        if (!rec.regular)
            throw NonRegularCrossingError("clm_index_pair: degenerate crossing form", t0);
        out.crossings.push_back(std::move(rec));
    }

    // Parity audit for the interior crossings.  At a regular crossing every
    // kernel direction's eigenvalue branch passes through zero with nonzero
    // speed, so the determinant of the joined frames changes sign exactly
    // when the kernel dimension is odd.  A tangential intersection breaks
    // that parity (a branch touches zero and retreats), and its leaked form
    // can carry an arbitrarily large spurious slope when the curvature is
    // steep -- no magnitude band catches it, but this sign bookkeeping does.
    auto joined_det = [&](double t) {
        MatrixXd Z1 = orthonormalize(path1(t).Z);
        MatrixXd Z2 = orthonormalize(path2(t).Z);
        MatrixXd M(Z1.rows(), Z1.cols() + Z2.cols());
        M << Z1, Z2;
        return M.determinant();
    };
    for (std::size_t i = 0; i < out.crossings.size(); ++i) {
        const CrossingRecord& rec = out.crossings[i];
        if (rec.t0 == a || rec.t0 == b) continue;  // only one side exists
        double lo = (i == 0) ? a : out.crossings[i - 1].t0;
        double hi = (i + 1 == out.crossings.size()) ? b : out.crossings[i + 1].t0;
        double delta = std::min({1e-3 * scale, (rec.t0 - lo) / 3.0, (hi - rec.t0) / 3.0});
        double dm = joined_det(rec.t0 - delta);
        double dp = joined_det(rec.t0 + delta);
        if (std::abs(dm) < 1e-13 || std::abs(dp) < 1e-13)
            throw NonRegularCrossingError(
                "clm_index_pair: frames stay near-degenerate beside a crossing", rec.t0);
        bool flips = (dm < 0.0) != (dp < 0.0);
        if (flips != (rec.form.dim() % 2 == 1))
            throw NonRegularCrossingError(
                "clm_index_pair: crossing fails the sign-change parity expected of a "
                "regular crossing",
                rec.t0);
    }

    for (const CrossingRecord& rec : out.crossings) {
        if (rec.t0 == a)
            out.index += rec.form_inertia.pos;
        else if (rec.t0 == b)
            out.index -= rec.form_inertia.neg;
        else
            out.index += rec.form_inertia.signature();
    }
    return out;
}

int clm_index_pair(const LagrangianPath& path1, const LagrangianPath& path2) {
    return clm_pair_detailed(path1, path2).index;
}

ClmResult clm_fixed_detailed(const LagrangianFrame& V, const LagrangianPath& path) {
    return clm_pair_detailed(constant_path(V, path.a, path.b), path);
}

int clm_index_fixed(const LagrangianFrame& V, const LagrangianPath& path) {
    return clm_fixed_detailed(V, path).index;
}

// ------------------------------------------------------------------------- //
// triple and Hormander indices
// ------------------------------------------------------------------------- //

namespace {

// Orthonormal basis of the column space of [Z1 | Z2] (i.e. the subspace sum),
// with the decade-stable rank rule.
MatrixXd subspace_sum(const MatrixXd& Z1, const MatrixXd& Z2, double tol) {
    MatrixXd M(Z1.rows(), Z1.cols() + Z2.cols());
    M << orthonormalize(Z1), orthonormalize(Z2);
    JacobiSVD<MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    double smax = sv(0);
    auto rank_at = [&](double cut) {
        int k = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > cut * smax) ++k;
        return k;
    };
    int rank = rank_at(tol);
    if (rank != rank_at(tol / 10.0) || rank != rank_at(tol * 10.0))
        throw AmbiguousRankError("subspace sum: rank decision ambiguous");
    return svd.matrixU().leftCols(rank);
}

}  // namespace

SymmetricFormOnSubspace triple_form(const SymplecticSpace& space, const LagrangianFrame& alpha,
                                    const LagrangianFrame& beta, const LagrangianFrame& delta) {
    MatrixXd Zb = orthonormalize(beta.Z);
    MatrixXd Zd = orthonormalize(delta.Z);
    MatrixXd sum_bd = subspace_sum(Zb, Zd, Tolerances::rank_rel);
    IntersectionResult dom = intersect_subspaces(alpha.Z, sum_bd);

    SymmetricFormOnSubspace form;
    form.basis = dom.basis;
    form.gram = MatrixXd::Zero(dom.dim, dom.dim);
    if (dom.dim == 0) return form;

    // Decompose each domain vector x = y + z, y in beta, z in delta.  The
    // least-squares solution is fine: any ambiguity lives in beta cap delta
    // and cannot change omega(y_i, z_j) (both Lagrangians kill it).
    MatrixXd BD(space.dim(), Zb.cols() + Zd.cols());
    BD << Zb, Zd;
    JacobiSVD<MatrixXd> svd(BD, Eigen::ComputeThinU | Eigen::ComputeThinV);
    MatrixXd coeff = svd.solve(dom.basis);
    MatrixXd resid = BD * coeff - dom.basis;
    double worst = resid.colwise().norm().maxCoeff();
    if (worst > 1e-7)
        throw ConsistencyError("triple_form: domain vector not decomposable in beta + delta");
    MatrixXd Y = Zb * coeff.topRows(Zb.cols());
    MatrixXd Zpart = Zd * coeff.bottomRows(Zd.cols());

    MatrixXd G(dom.dim, dom.dim);
    for (int i = 0; i < dom.dim; ++i) {
        VectorXd Jy = space.J * Y.col(i);
        for (int j = 0; j < dom.dim; ++j) G(i, j) = Jy.dot(Zpart.col(j));
    }
    form.gram = symmetrized_checked(G, "triple_form");
    return form;
}

int triple_index(const SymplecticSpace& space, const LagrangianFrame& alpha,
                 const LagrangianFrame& beta, const LagrangianFrame& kappa) {
    SymmetricFormOnSubspace q = triple_form(space, alpha, beta, kappa);
    int m_plus = inertia(q.gram).pos;
    IntersectionResult ak = intersect_subspaces(alpha.Z, kappa.Z);
    IntersectionResult ab = intersect_subspaces(alpha.Z, beta.Z);
    int abk = 0;
    if (ab.dim > 0 && ak.dim > 0)
        abk = intersect_subspaces(ab.basis, kappa.Z).dim;
    return m_plus + ak.dim - abk;
}

int hormander_index(const SymplecticSpace& space, const LagrangianFrame& l1,
                    const LagrangianFrame& l2, const LagrangianFrame& k1,
                    const LagrangianFrame& k2) {
    int via_l = triple_index(space, l1, l2, k2) - triple_index(space, l1, l2, k1);
    int via_k = triple_index(space, l1, k1, k2) - triple_index(space, l2, k1, k2);
    if (via_l != via_k) {
        std::ostringstream msg;
        msg << "hormander_index: dual expressions disagree (" << via_l << " vs " << via_k << ")";
        throw ConsistencyError(msg.str());
    }
    return via_l;
}

int clm_via_transversal_endpoints(const SymplecticSpace& space, const LagrangianPath& path1,
                                  const LagrangianPath& path2, const LagrangianFrame& L) {
    // Transversality to L must hold along the whole paths, not just at the
    // sample points, so run the full crossing locator against the constant
    // path at L: any hit is a violation.
    LagrangianPath at_L = constant_path(L, path1.a, path1.b);
    for (const LagrangianPath* p : {&path1, &path2}) {
        std::vector<double> hits;
        try {
            hits = locate_crossings(at_L, *p);
        } catch (const RefinementError&) {
            throw TransversalityError("clm_via_transversal_endpoints: path meets L on a set "
                                      "that is not isolated",
                                      p->a);
        }
        if (!hits.empty())
            throw TransversalityError("clm_via_transversal_endpoints: path meets L",
                                      hits.front());
    }
    int at_b = triple_index(space, path2(path2.b), path1(path1.b), L);
    int at_a = triple_index(space, path2(path2.a), path1(path1.a), L);
    return at_b - at_a;
}

}  // namespace symp
}  // namespace maslov
