#include "maslov/wave_solver.hpp"

#include <Eigen/LU>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace maslov::wave {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Equilibria find_equilibria_fhn(double a, double gamma) {
    // u = gamma u(1-u)(u-a):  u = 0, or gamma u^2 - gamma(1+a)u + (gamma a + 1) = 0.
    double disc = gamma * gamma * (1.0 + a) * (1.0 + a) - 4.0 * gamma * (gamma * a + 1.0);
    if (!(disc > 0.0))
        throw InputError("fhn equilibria: fold closed, fewer than three roots (disc <= 0)");
    double s = std::sqrt(disc);
    double u2 = (gamma * (1.0 + a) - s) / (2.0 * gamma);
    double u3 = (gamma * (1.0 + a) + s) / (2.0 * gamma);
    // polish against the original fixed-point equation u = gamma f(u)
    for (double* u : {&u2, &u3}) {
        for (int it = 0; it < 3; ++it) {
            double f = *u * (1.0 - *u) * (*u - a);
            double fp = -3.0 * *u * *u + 2.0 * (1.0 + a) * *u - a;
            *u -= (gamma * f - *u) / (gamma * fp - 1.0);
        }
    }
    if (!(0.0 < u2 && u2 < u3))
        throw InputError("fhn equilibria: roots out of expected order 0 < u2 < u3");
    return {0.0, u2, u3};
}

namespace {

struct StageDiverge {};

// First-derivative stencils at the two nodes nearest each boundary
// (4th order, offsets counted inward from the boundary node):
constexpr double kD1End[5] = {-25.0, 48.0, -36.0, 16.0, -3.0};   // at the boundary node
constexpr double kD1Next[5] = {-3.0, -10.0, 18.0, -6.0, 1.0};    // one node in

// Derivative of the boundary value, rows 0..4 of w from the left end.
VectorXd left_end_derivative(const MatrixXd& w, double h) {
    VectorXd d = VectorXd::Zero(w.cols());
    for (int k = 0; k < 5; ++k) d += kD1End[k] * w.row(k).transpose();
    return d / (12.0 * h);
}

VectorXd right_end_derivative(const MatrixXd& w, double h) {
    int N = static_cast<int>(w.rows());
    VectorXd d = VectorXd::Zero(w.cols());
    for (int k = 0; k < 5; ++k) d -= kD1End[k] * w.row(N - 1 - k).transpose();
    return d / (12.0 * h);
}

struct Stage {
    const model::SkewGradientSystem* sys;
    MatrixXd QD;  // Q D, applied to grad/hess on the fly
    VectorXd wm, wp;
    int N, n, mid;
    double h;
    int phase_comp;
    double phase_val;

    int rows() const { return n * N + 1; }

    Eigen::MatrixXd reaction_jac(const VectorXd& w) const { return QD * sys->hess_F(w); }
    VectorXd reaction(const VectorXd& w) const { return QD * sys->grad_F(w); }

    // Projection rows killing the stable coefficients at the left end and
    // the unstable ones at the right end, for the current speed.
    void boundary_rows(double c, MatrixXd& Rm, MatrixXd& Rp) const {
        for (int side = 0; side < 2; ++side) {
            const VectorXd& rest = side == 0 ? wm : wp;
            MatrixXd At = MatrixXd::Zero(2 * n, 2 * n);
            At.topRightCorner(n, n).setIdentity();
            At.bottomLeftCorner(n, n) = -reaction_jac(rest);
            At.bottomRightCorner(n, n) = -c * MatrixXd::Identity(n, n);
            model::HyperbolicSplitting sp = model::hyperbolic_splitting(At);
            MatrixXd F(2 * n, 2 * n);
            F << sp.Vminus, sp.Vplus;
            MatrixXd Finv = F.partialPivLu().inverse();
            if (side == 0)
                Rm = Finv.topRows(n);  // stable coefficients, = 0 at -Xi
            else
                Rp = Finv.bottomRows(n);  // unstable coefficients, = 0 at +Xi
        }
    }

    VectorXd residual(const MatrixXd& w, double c, const MatrixXd& Rm,
                      const MatrixXd& Rp) const {
        VectorXd F(rows());
        double h2 = h * h;
        // left boundary block
        VectorXd zl(2 * n);
        zl << w.row(0).transpose() - wm, left_end_derivative(w, h);
        F.segment(0, n) = Rm * zl;
        // interior collocation
        for (int j = 1; j <= N - 2; ++j) {
            VectorXd d2(n), d1(n);
            if (j >= 2 && j <= N - 3) {
                d2 = (-w.row(j - 2) + 16.0 * w.row(j - 1) - 30.0 * w.row(j) +
                      16.0 * w.row(j + 1) - w.row(j + 2))
                         .transpose() /
                     (12.0 * h2);
                d1 = (w.row(j - 2) - 8.0 * w.row(j - 1) + 8.0 * w.row(j + 1) - w.row(j + 2))
                         .transpose() /
                     (12.0 * h);
            } else {
                d2 = (w.row(j - 1) - 2.0 * w.row(j) + w.row(j + 1)).transpose() / h2;
                d1 = (w.row(j + 1) - w.row(j - 1)).transpose() / (2.0 * h);
            }
            F.segment(n * j, n) = d2 + c * d1 + reaction(w.row(j).transpose());
        }
        // right boundary block
        VectorXd zr(2 * n);
        zr << w.row(N - 1).transpose() - wp, right_end_derivative(w, h);
        F.segment(n * (N - 1), n) = Rp * zr;
        // phase row
        F[n * N] = w(mid, phase_comp) - phase_val;
        return F;
    }

    Eigen::SparseMatrix<double> jacobian(const MatrixXd& w, double c, const MatrixXd& Rm,
                                         const MatrixXd& Rp) const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(rows()) * (5 * n + 2));
        double h2 = h * h;
        auto add_block = [&](int row0, int col_node, const MatrixXd& blk) {
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    if (blk(i, k) != 0.0) trip.emplace_back(row0 + i, n * col_node + k, blk(i, k));
        };
        MatrixXd I = MatrixXd::Identity(n, n);
        // boundary rows: the projection matrices are frozen (their c
        // dependence is dropped from the Jacobian; Newton still converges
        // since they are rebuilt every iteration)
        for (int k = 0; k < 5; ++k) {
            MatrixXd blkL = (kD1End[k] / (12.0 * h)) * Rm.rightCols(n);
            if (k == 0) blkL += Rm.leftCols(n);
            add_block(0, k, blkL);
            MatrixXd blkR = (-kD1End[k] / (12.0 * h)) * Rp.rightCols(n);
            if (k == 0) blkR += Rp.leftCols(n);
            add_block(n * (N - 1), N - 1 - k, blkR);
        }
        for (int j = 1; j <= N - 2; ++j) {
            VectorXd d1(n);
            if (j >= 2 && j <= N - 3) {
                const double c2[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
                const double c1[5] = {1.0, -8.0, 0.0, 8.0, -1.0};
                for (int o = -2; o <= 2; ++o) {
                    MatrixXd blk = (c2[o + 2] / (12.0 * h2) + c * c1[o + 2] / (12.0 * h)) * I;
                    if (o == 0) blk += reaction_jac(w.row(j).transpose());
                    add_block(n * j, j + o, blk);
                }
                d1 = (w.row(j - 2) - 8.0 * w.row(j - 1) + 8.0 * w.row(j + 1) - w.row(j + 2))
                         .transpose() /
                     (12.0 * h);
            } else {
                const double c2[3] = {1.0, -2.0, 1.0};
                const double c1[3] = {-0.5, 0.0, 0.5};
                for (int o = -1; o <= 1; ++o) {
                    MatrixXd blk = (c2[o + 1] / h2 + c * c1[o + 1] / h) * I;
                    if (o == 0) blk += reaction_jac(w.row(j).transpose());
                    add_block(n * j, j + o, blk);
                }
                d1 = (w.row(j + 1) - w.row(j - 1)).transpose() / (2.0 * h);
            }
            for (int i = 0; i < n; ++i) trip.emplace_back(n * j + i, n * N, d1[i]);
        }
        trip.emplace_back(n * N, n * mid + phase_comp, 1.0);
        Eigen::SparseMatrix<double> J(rows(), rows());
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    }
};

// Damped Newton on one fixed grid; returns (w, c).
std::pair<MatrixXd, double> newton_stage(const Stage& st, MatrixXd w, double c,
                                         double tol_newton, double accept_floor) {
    MatrixXd Rm, Rp;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    double fnorm = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 50; ++it) {
        st.boundary_rows(c, Rm, Rp);
        VectorXd F = st.residual(w, c, Rm, Rp);
        fnorm = F.lpNorm<Eigen::Infinity>();
        if (fnorm <= tol_newton) return {w, c};
        lu.compute(st.jacobian(w, c, Rm, Rp));
        if (lu.info() != Eigen::Success) throw StageDiverge{};
        VectorXd delta = lu.solve(-F);
        if (lu.info() != Eigen::Success || !delta.allFinite()) throw StageDiverge{};
        double s = 1.0;
        bool improved = false;
        for (int half = 0; half < 11; ++half) {
            MatrixXd w_try = w;
            for (int j = 0; j < st.N; ++j)
                w_try.row(j) += s * delta.segment(st.n * j, st.n).transpose();
            double c_try = c + s * delta[st.n * st.N];
            VectorXd F_try = st.residual(w_try, c_try, Rm, Rp);
            double fn = F_try.lpNorm<Eigen::Infinity>();
            if (std::isfinite(fn) && fn < fnorm) {
                w = std::move(w_try);
                c = c_try;
                improved = true;
                break;
            }
            s *= 0.5;
        }
        if (!improved) {
            if (fnorm <= accept_floor) return {w, c};  // at the rounding floor
            throw StageDiverge{};
        }
    }
    if (fnorm <= accept_floor) return {w, c};
    throw StageDiverge{};
}

VectorXd uniform_grid(double Xi, int N) {
    VectorXd xi(N);
    double h = 2.0 * Xi / (N - 1);
    for (int j = 0; j < N; ++j) xi[j] = -Xi + h * j;
    xi[N - 1] = Xi;  // exact endpoint
    return xi;
}

// Linear interpolation of nodal rows onto a new grid; outside the old domain
// the profile is padded with the appropriate rest state.
MatrixXd interp_pad(const VectorXd& x_old, const MatrixXd& w_old, const VectorXd& x_new,
                    const VectorXd& left, const VectorXd& right) {
    int N = static_cast<int>(x_new.size()), n = static_cast<int>(w_old.cols());
    int M = static_cast<int>(x_old.size());
    MatrixXd w(N, n);
    for (int j = 0; j < N; ++j) {
        double x = x_new[j];
        if (x <= x_old[0]) {
            if (x < x_old[0] - 1e-12)
                w.row(j) = left.transpose();
            else
                w.row(j) = w_old.row(0);
        } else if (x >= x_old[M - 1]) {
            if (x > x_old[M - 1] + 1e-12)
                w.row(j) = right.transpose();
            else
                w.row(j) = w_old.row(M - 1);
        } else {
            const double* beg = x_old.data();
            int k = static_cast<int>(std::upper_bound(beg, beg + M, x) - beg) - 1;
            k = std::min(k, M - 2);
            double t = (x - x_old[k]) / (x_old[k + 1] - x_old[k]);
            w.row(j) = (1.0 - t) * w_old.row(k) + t * w_old.row(k + 1);
        }
    }
    return w;
}

// High-order derivative of the converged profile, stored so downstream code
// never differentiates the samples again.
MatrixXd best_derivative(const MatrixXd& w, double h) {
    int N = static_cast<int>(w.rows()), n = static_cast<int>(w.cols());
    MatrixXd wp(N, n);
    for (int i = 0; i < n; ++i) {
        wp(0, i) = 0.0;
        wp(1, i) = 0.0;
        for (int k = 0; k < 5; ++k) {
            wp(0, i) += kD1End[k] * w(k, i);
            wp(1, i) += kD1Next[k] * w(k, i);
            wp(N - 1, i) -= kD1End[k] * w(N - 1 - k, i);
            wp(N - 2, i) -= kD1Next[k] * w(N - 1 - k, i);
        }
        wp(0, i) /= 12.0 * h;
        wp(1, i) /= 12.0 * h;
        wp(N - 1, i) /= 12.0 * h;
        wp(N - 2, i) /= 12.0 * h;
        for (int j = 2; j <= N - 3; ++j)
            wp(j, i) = (w(j - 2, i) - 8.0 * w(j - 1, i) + 8.0 * w(j + 1, i) - w(j + 2, i)) /
                       (12.0 * h);
    }
    return wp;
}

}  // namespace

double profile_residual(const model::SkewGradientSystem& system, const WaveProfile& profile) {
    const MatrixXd& w = profile.w;
    int N = static_cast<int>(w.rows());
    double h = profile.xi[1] - profile.xi[0];
    MatrixXd QD = system.space.Q * system.D.asDiagonal();
    double worst = 0.0;
    for (int j = 1; j <= N - 2; ++j) {
        VectorXd d2(w.cols()), d1(w.cols());
        if (j >= 2 && j <= N - 3) {
            d2 = (-w.row(j - 2) + 16.0 * w.row(j - 1) - 30.0 * w.row(j) + 16.0 * w.row(j + 1) -
                  w.row(j + 2))
                     .transpose() /
                 (12.0 * h * h);
            d1 = (w.row(j - 2) - 8.0 * w.row(j - 1) + 8.0 * w.row(j + 1) - w.row(j + 2))
                     .transpose() /
                 (12.0 * h);
        } else {
            d2 = (w.row(j - 1) - 2.0 * w.row(j) + w.row(j + 1)).transpose() / (h * h);
            d1 = (w.row(j + 1) - w.row(j - 1)).transpose() / (2.0 * h);
        }
        VectorXd r = d2 + profile.c * d1 + QD * system.grad_F(w.row(j).transpose());
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

double consistency_residual(const model::SkewGradientSystem& system,
                            const WaveProfile& profile) {
    const MatrixXd& w = profile.w;
    int N = static_cast<int>(w.rows());
    double h = profile.xi[1] - profile.xi[0];
    MatrixXd QD = system.space.Q * system.D.asDiagonal();
    double worst = 0.0;
    for (int j = 1; j <= N - 2; ++j) {
        VectorXd d2 = (w.row(j - 1) - 2.0 * w.row(j) + w.row(j + 1)).transpose() / (h * h);
        VectorXd d1 = (w.row(j + 1) - w.row(j - 1)).transpose() / (2.0 * h);
        VectorXd r = d2 + profile.c * d1 + QD * system.grad_F(w.row(j).transpose());
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

double translation_residual(const model::SkewGradientSystem& system,
                            const WaveProfile& profile) {
    const MatrixXd& v = profile.wp;
    int N = static_cast<int>(v.rows());
    double h = profile.xi[1] - profile.xi[0];
    MatrixXd QD = system.space.Q * system.D.asDiagonal();
    double worst = 0.0;
    for (int j = 2; j <= N - 3; ++j) {
        VectorXd d2 = (-v.row(j - 2) + 16.0 * v.row(j - 1) - 30.0 * v.row(j) +
                       16.0 * v.row(j + 1) - v.row(j + 2))
                          .transpose() /
                      (12.0 * h * h);
        VectorXd d1 = (v.row(j - 2) - 8.0 * v.row(j - 1) + 8.0 * v.row(j + 1) - v.row(j + 2))
                          .transpose() /
                      (12.0 * h);
        VectorXd r = d2 + profile.c * d1 +
                     QD * system.hess_F(profile.w.row(j).transpose()) * v.row(j).transpose();
        worst = std::max(worst, r.lpNorm<Eigen::Infinity>());
    }
    return worst;
}

WaveProfile solve_front(const model::SkewGradientSystem& system, const BVPConfig& config,
                        const std::optional<WaveProfile>& guess) {
    if (system.rest_seeds.size() < 2)
        throw InputError("solve_front: system must carry seeds for both rest states");
    if (config.nodes < 100) throw InputError("solve_front: need at least 100 nodes");
    if (!(config.Xi > 0.0)) throw InputError("solve_front: Xi must be positive");
    model::RestState rm = model::make_rest_state(system, system.rest_seeds[0], model::Side::minus);
    model::RestState rp = model::make_rest_state(system, system.rest_seeds[1], model::Side::plus);
    const MatrixXd& Q = system.space.Q;
    if (!model::check_H1(rm.B, Q) || !model::check_H1(rp.B, Q))
        throw InputError("solve_front: a rest state violates the spectral hypothesis on QB");

    int n = system.space.n;
    if (config.phase_component < 0 || config.phase_component >= n)
        throw InputError("solve_front: phase component out of range");
    double anchor = config.phase_value;
    if (std::isnan(anchor)) {
        if (system.label == "fhn")
            anchor = find_equilibria_fhn(system.params.at("a"), system.params.at("gamma")).u2;
        else
            anchor = 0.5 * (rm.w[config.phase_component] + rp.w[config.phase_component]);
    }

    // domain-length ladder: short domains are forgiving of the tanh guess,
    // each solved wave warm-starts the next
    std::vector<double> stages = config.continuation;
    if (stages.empty()) {
        stages = {config.Xi};
        while (stages.front() > 10.0 + 1e-12) stages.insert(stages.begin(), stages.front() / 2.0);
    } else if (std::abs(stages.back() - config.Xi) > 1e-12) {
        stages.push_back(config.Xi);
    }
    double h_final = 2.0 * config.Xi / (config.nodes - 1);

    VectorXd xi_prev;
    MatrixXd w_prev;
    double c = 0.1;
    std::shared_ptr<const WaveProfile> last_good;
    auto finalize = [&](const VectorXd& xi, const MatrixXd& w, double speed) {
        WaveProfile p;
        p.xi = xi;
        p.w = w;
        p.wp = best_derivative(w, xi[1] - xi[0]);
        p.c = speed;
        p.w_minus = rm;
        p.w_plus = rp;
        p.residual_norm = profile_residual(system, p);
        return p;
    };

    for (size_t si = 0; si < stages.size(); ++si) {
        double X = stages[si];
        int N;
        if (si + 1 == stages.size()) {
            N = config.nodes;
        } else {
            N = static_cast<int>(std::lround(2.0 * X / h_final)) + 1;
            if (N % 2 == 0) ++N;
            N = std::max(N, 101);
        }
        VectorXd xi = uniform_grid(X, N);
        MatrixXd w;
        if (xi_prev.size() > 0) {
            w = interp_pad(xi_prev, w_prev, xi, rm.w, rp.w);
        } else if (guess) {
            w = interp_pad(guess->xi, guess->w, xi, rm.w, rp.w);
            c = guess->c;
        } else {
            w.resize(N, n);
            for (int j = 0; j < N; ++j) {
                double t = 0.5 * (1.0 + std::tanh(0.5 * xi[j]));
                w.row(j) = ((1.0 - t) * rm.w + t * rp.w).transpose();
            }
        }
        Stage st{&system,
                 Q * system.D.asDiagonal(),
                 rm.w,
                 rp.w,
                 N,
                 n,
                 (N - 1) / 2,
                 xi[1] - xi[0],
                 config.phase_component,
                 anchor};
        try {
            std::tie(w, c) = newton_stage(st, std::move(w), c, config.tol_newton, config.tol_res);
        } catch (const StageDiverge&) {
            throw ContinuationError(X, last_good);
        } catch (const HyperbolicityError&) {
            throw ContinuationError(X, last_good);
        }
        xi_prev = xi;
        w_prev = w;
        if (si + 1 < stages.size())
            last_good = std::make_shared<const WaveProfile>(finalize(xi, w, c));
    }

    if (!(c > 0.0)) throw OrientationError(c);
    WaveProfile p = finalize(xi_prev, w_prev, c);
    double bm = (p.w.row(0).transpose() - rm.w).norm();
    double bp = (p.w.row(p.w.rows() - 1).transpose() - rp.w).norm();
    if (bm > config.tol_bc || bp > config.tol_bc)
        throw ConsistencyError("solved profile misses its rest states at the boundary; "
                               "the domain is too short");
    if (p.residual_norm > config.tol_res)
        throw ConsistencyError("converged profile exceeds the residual tolerance");
    return p;
}

// ------------------------------------------------------------------------- //
// profile files
// ------------------------------------------------------------------------- //

using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void save_profile(const WaveProfile& profile, const model::SkewGradientSystem& system,
                  const std::string& csv_path, const std::string& meta_path) {
    int n = static_cast<int>(profile.w.cols());
    if (auto parent = std::filesystem::path(csv_path).parent_path(); !parent.empty())
        std::filesystem::create_directories(parent);
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot open profile file for writing: " + csv_path);
    csv << "xi";
    for (int i = 1; i <= n; ++i) csv << ",w" << i;
    for (int i = 1; i <= n; ++i) csv << ",dw" << i;
    csv << "\n";
    for (int j = 0; j < profile.xi.size(); ++j) {
        csv << fmt17(profile.xi[j]);
        for (int i = 0; i < n; ++i) csv << "," << fmt17(profile.w(j, i));
        for (int i = 0; i < n; ++i) csv << "," << fmt17(profile.wp(j, i));
        csv << "\n";
    }
    if (!csv.good()) throw Error("write failed on profile file: " + csv_path);

    ordered_json meta;
    meta["c"] = profile.c;
    meta["residual_norm"] = profile.residual_norm;
    meta["Xi"] = profile.xi[profile.xi.size() - 1];
    meta["nodes"] = static_cast<int>(profile.xi.size());
    meta["w_minus"] = std::vector<double>(profile.w_minus.w.data(),
                                          profile.w_minus.w.data() + profile.w_minus.w.size());
    meta["w_plus"] = std::vector<double>(profile.w_plus.w.data(),
                                         profile.w_plus.w.data() + profile.w_plus.w.size());
    meta["system"] = ordered_json::parse(model::system_config_string(system));
    std::ofstream mf(meta_path);
    if (!mf) throw Error("cannot open profile metadata for writing: " + meta_path);
    mf << meta.dump(2) << "\n";
    if (!mf.good()) throw Error("write failed on profile metadata: " + meta_path);
}

LoadedProfile load_profile(const std::string& csv_path, const std::string& meta_path,
                           const BVPConfig& config) {
    std::ifstream mf(meta_path);
    if (!mf) throw InputError("cannot open profile metadata: " + meta_path);
    ordered_json meta;
    try {
        meta = ordered_json::parse(mf);
    } catch (const std::exception& e) {
        throw InputError(std::string("profile metadata is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : meta.items()) {
        (void)value;
        if (key != "c" && key != "residual_norm" && key != "Xi" && key != "nodes" &&
            key != "w_minus" && key != "w_plus" && key != "system")
            throw InputError("unrecognized key '" + key + "' in profile metadata");
    }
    model::SkewGradientSystem system =
        model::system_from_config_string(meta.at("system").dump());
    int n = system.space.n;
    double c = meta.at("c").get<double>();
    if (!(c > 0.0)) throw InputError("profile metadata: speed must be positive");
    auto vm = meta.at("w_minus").get<std::vector<double>>();
    auto vp = meta.at("w_plus").get<std::vector<double>>();
    if (static_cast<int>(vm.size()) != n || static_cast<int>(vp.size()) != n)
        throw InputError("profile metadata: rest-state dimension mismatch");
    int nodes = meta.at("nodes").get<int>();

    std::ifstream csv(csv_path);
    if (!csv) throw InputError("cannot open profile file: " + csv_path);
    std::string line;
    if (!std::getline(csv, line)) throw InputError("profile file is empty: " + csv_path);
    {
        std::string expect = "xi";
        for (int i = 1; i <= n; ++i) expect += ",w" + std::to_string(i);
        for (int i = 1; i <= n; ++i) expect += ",dw" + std::to_string(i);
        if (line != expect)
            throw InputError("profile CSV header mismatch (expected '" + expect + "')");
    }
    std::vector<std::vector<double>> rows;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            size_t used = 0;
            double v = std::stod(cell, &used);
            if (used != cell.size()) throw InputError("profile CSV: malformed number '" + cell + "'");
            vals.push_back(v);
        }
        if (static_cast<int>(vals.size()) != 1 + 2 * n)
            throw InputError("profile CSV: wrong column count");
        rows.push_back(std::move(vals));
    }
    int N = static_cast<int>(rows.size());
    if (N != nodes) throw InputError("profile CSV row count disagrees with metadata");
    if (N < 7) throw InputError("profile grid too small");

    WaveProfile p;
    p.xi.resize(N);
    p.w.resize(N, n);
    p.wp.resize(N, n);
    for (int j = 0; j < N; ++j) {
        p.xi[j] = rows[j][0];
        for (int i = 0; i < n; ++i) {
            p.w(j, i) = rows[j][1 + i];
            p.wp(j, i) = rows[j][1 + n + i];
        }
    }
    for (int j = 1; j < N; ++j)
        if (!(p.xi[j] > p.xi[j - 1])) throw InputError("profile grid must be strictly increasing");
    double h = p.xi[1] - p.xi[0];
    for (int j = 1; j < N; ++j)
        if (std::abs(p.xi[j] - p.xi[j - 1] - h) > 1e-8 * h)
            throw InputError("profile grid must be uniform");
    p.c = c;
    Eigen::Map<const VectorXd> wm(vm.data(), n), wp(vp.data(), n);
    p.w_minus = model::make_rest_state(system, wm, model::Side::minus);
    p.w_plus = model::make_rest_state(system, wp, model::Side::plus);

    // Revalidate everything; the file's own residual claim is ignored.
    p.residual_norm = profile_residual(system, p);
    if (p.residual_norm > config.tol_res) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "not a wave of this system: residual %.3e exceeds %.3e",
                      p.residual_norm, config.tol_res);
        throw Error(buf);
    }
    double bm = (p.w.row(0).transpose() - p.w_minus.w).norm();
    double bp = (p.w.row(N - 1).transpose() - p.w_plus.w).norm();
    if (bm > config.tol_bc || bp > config.tol_bc)
        throw Error("profile does not reach its rest states at the boundary");
    double scale = std::max(1.0, p.w.cwiseAbs().maxCoeff());
    double worst = 0.0;
    for (int j = 1; j < N - 1; ++j) {
        VectorXd cd = (p.w.row(j + 1) - p.w.row(j - 1)).transpose() / (2.0 * h);
        worst = std::max(worst, (p.wp.row(j).transpose() - cd).lpNorm<Eigen::Infinity>());
    }
    if (worst > std::max(50.0 * h * h * scale, 1e-6))
        throw InputError("stored derivative columns are inconsistent with the samples");
    return {std::move(p), std::move(system)};
}

}  // namespace maslov::wave
