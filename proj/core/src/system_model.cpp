#include "maslov/system_model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <cmath>

#include <json.hpp>

namespace maslov::model {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::MatrixXd SkewGradientSystem::B_at(const Eigen::VectorXd& w) const {
    VectorXd dh = D.cwiseSqrt();
    MatrixXd H = hess_F(w);
    MatrixXd B = dh.asDiagonal() * H * dh.asDiagonal();
    return 0.5 * (B + B.transpose());  // kill rounding asymmetry
}

SkewGradientSystem make_fhn_system(double a, double gamma, double d) {
    if (!(d > 0.0)) throw InputError("fhn: diffusion ratio d must be positive");
    if (!(gamma > 0.0)) throw InputError("fhn: gamma must be positive");
    SkewGradientSystem sys{SymplecticSpace(2, 1),
                           VectorXd::Zero(2),
                           {},
                           {},
                           {},
                           "fhn",
                           {{"a", a}, {"gamma", gamma}, {"d", d}}};
    sys.D << 1.0 / d, 1.0;
    auto f = [a](double u) { return u * (1.0 - u) * (u - a); };
    auto fp = [a](double u) { return -3.0 * u * u + 2.0 * (1.0 + a) * u - a; };
    sys.grad_F = [f, gamma](const VectorXd& w) {
        VectorXd g(2);
        g << f(w[0]) - w[1], -w[0] + gamma * w[1];
        return g;
    };
    sys.hess_F = [fp, gamma](const VectorXd& w) {
        MatrixXd H(2, 2);
        H << fp(w[0]), -1.0, -1.0, gamma;
        return H;
    };
    // Nonzero equilibria solve gamma u^2 - gamma(1+a) u + (gamma a + 1) = 0;
    // the front of interest runs from the origin to the larger root u3.
    double disc = gamma * gamma * (1.0 + a) * (1.0 + a) - 4.0 * gamma * (gamma * a + 1.0);
    if (!(disc > 0.0))
        throw InputError("fhn: parameters admit no excited rest state (discriminant <= 0)");
    double u3 = (gamma * (1.0 + a) + std::sqrt(disc)) / (2.0 * gamma);
    VectorXd w0 = VectorXd::Zero(2), w1(2);
    w1 << u3, u3 / gamma;
    sys.rest_seeds = {w0, w1};
    return sys;
}

RestState make_rest_state(const SkewGradientSystem& system, const Eigen::VectorXd& seed,
                          Side side, double tol) {
    VectorXd w = seed;
    bool done = false;
    for (int it = 0; it < 50; ++it) {
        VectorXd g = system.grad_F(w);
        if (g.norm() <= tol * std::max(1.0, w.norm())) {
            done = true;
            break;
        }
        w -= system.hess_F(w).partialPivLu().solve(g);
    }
    if (!done && system.grad_F(w).norm() > tol * std::max(1.0, w.norm()))
        throw ConsistencyError("rest-state iteration did not converge from the given seed");
    return RestState{w, system.B_at(w), side};
}

MatrixXd assemble_A(const MatrixXd& Q, const MatrixXd& B, double c, double lambda) {
    int n = static_cast<int>(Q.rows());
    MatrixXd A = MatrixXd::Zero(2 * n, 2 * n);
    A.topLeftCorner(n, n) = -c * MatrixXd::Identity(n, n);
    A.topRightCorner(n, n) = lambda * MatrixXd::Identity(n, n) - Q * B;
    A.bottomLeftCorner(n, n) = MatrixXd::Identity(n, n);
    return A;
}

MatrixXcd assemble_A(const MatrixXd& Q, const MatrixXd& B, double c,
                     std::complex<double> lambda) {
    int n = static_cast<int>(Q.rows());
    MatrixXcd A = MatrixXcd::Zero(2 * n, 2 * n);
    A.topLeftCorner(n, n) = -c * MatrixXcd::Identity(n, n);
    A.topRightCorner(n, n) =
        lambda * MatrixXcd::Identity(n, n) - (Q * B).cast<std::complex<double>>();
    A.bottomLeftCorner(n, n) = MatrixXcd::Identity(n, n);
    return A;
}

MatrixXd assemble_H(const MatrixXd& Q, const MatrixXd& B, double c, double lambda) {
    int n = static_cast<int>(Q.rows());
    MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = Q;
    H.topRightCorner(n, n) = 0.5 * c * Q;
    H.bottomLeftCorner(n, n) = 0.5 * c * Q;
    H.bottomRightCorner(n, n) = B - lambda * Q;
    double defect = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (defect > 1e-12 * std::max(1.0, H.cwiseAbs().maxCoeff()))
        throw ConsistencyError("assembly bug: Hamiltonian coefficient matrix not symmetric");
    return H;
}

std::pair<std::complex<double>, std::complex<double>> asymptotic_eigs(
    double c, std::complex<double> alpha, std::complex<double> lambda) {
    std::complex<double> s = std::sqrt(c * c + 4.0 * (lambda - alpha));
    return {0.5 * (-c + s), 0.5 * (-c - s)};
}

bool check_H1(const MatrixXd& B, const MatrixXd& Q, double margin) {
    Eigen::EigenSolver<MatrixXd> es(Q * B, false);
    if (es.info() != Eigen::Success) throw Error("eigensolver failure on QB");
    return es.eigenvalues().real().maxCoeff() < -margin;
}

bool check_H2(const MatrixXd& B, const MatrixXd& Q, double margin) {
    int n = static_cast<int>(Q.rows());
    MatrixXd QB = Q * B;
    MatrixXd S = 0.5 * (QB + QB.transpose());
    std::vector<int> neg;
    for (int i = 0; i < n; ++i)
        if (Q(i, i) < 0.0) neg.push_back(i);
    if (neg.empty()) return true;  // V^-(Q) trivial when r = n
    MatrixXd Sneg(neg.size(), neg.size());
    for (size_t i = 0; i < neg.size(); ++i)
        for (size_t j = 0; j < neg.size(); ++j) Sneg(i, j) = S(neg[i], neg[j]);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Sneg);
    return es.eigenvalues().maxCoeff() < -margin;
}

bool check_H2prime(const MatrixXd& B, const MatrixXd& Q, double margin) {
    MatrixXd QB = Q * B;
    MatrixXd S = 0.5 * (QB + QB.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
    return es.eigenvalues().maxCoeff() < -margin;
}

namespace {

double max_sym_eig(const MatrixXd& M) {
    MatrixXd S = 0.5 * (M + M.transpose());
    return Eigen::SelfAdjointEigenSolver<MatrixXd>(S).eigenvalues().maxCoeff();
}

}  // namespace

Eigen::MatrixXd negativize_conjugation(const Eigen::MatrixXd& QB) {
    int n = static_cast<int>(QB.rows());
    Eigen::EigenSolver<MatrixXd> es(QB, false);
    double max_re = es.eigenvalues().real().maxCoeff();
    if (!(max_re < 0.0))
        throw InputError("negativize_conjugation: spectrum not strictly left of the axis");
    if (max_sym_eig(QB) < 0.0) return MatrixXd::Identity(n, n);

    Eigen::RealSchur<MatrixXd> schur(QB);
    MatrixXd U = schur.matrixU();
    MatrixXd S = schur.matrixT();
    double tiny = 1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff());

    // Rotate each complex-conjugate 2x2 block to [[a,b],[-b,a]] shape, whose
    // symmetric part is a*I with a = Re(eigenvalue) < 0.  Real 1x1 blocks are
    // already their own (negative) symmetric part.
    MatrixXd R = MatrixXd::Identity(n, n);
    std::vector<int> block_of(n);  // consecutive index of the diagonal block
    int blocks = 0;
    for (int i = 0; i < n;) {
        if (i + 1 < n && std::abs(S(i + 1, i)) > tiny) {
            Eigen::Matrix2d M = S.block<2, 2>(i, i);
            Eigen::EigenSolver<Eigen::Matrix2d> bes(M);
            std::complex<double> mu = bes.eigenvalues()[0];
            if (mu.imag() < 0.0) mu = std::conj(mu);
            // eigenvector of M for mu, written out to avoid complex solvers
            Eigen::Vector2cd v;
            if (std::abs(M(0, 1)) > tiny)
                v << M(0, 1), mu - M(0, 0);
            else
                v << mu - M(1, 1), M(1, 0);
            Eigen::Matrix2d P;
            P.col(0) = v.real();
            P.col(1) = v.imag();
            // One common factor: normalizing the columns separately would skew
            // the rotated block away from [[a,b],[-b,a]] and leave a symmetric
            // off-diagonal defect inside the block that no column scaling can
            // remove (the delta sweep only shrinks between-block entries).
            P /= P.norm();
            R.block<2, 2>(i, i) = P;
            block_of[i] = block_of[i + 1] = blocks++;
            i += 2;
        } else {
            block_of[i] = blocks++;
            i += 1;
        }
    }
    MatrixXd base = U * R;

    // Geometric per-block column scaling: entries of the strictly upper block
    // triangle shrink like delta^(block gap), so a small enough delta makes
    // the symmetric part negative definite; the Schur diagonal is untouched.
    double delta = 1.0;
    for (int halvings = 0; halvings < 200; ++halvings) {
        VectorXd scal(n);
        for (int i = 0; i < n; ++i) scal[i] = std::pow(delta, block_of[i]);
        MatrixXd T = base * scal.asDiagonal();
        MatrixXd conj = T.partialPivLu().solve(QB * T);
        if (max_sym_eig(conj) < 0.5 * max_re) return T;
        delta *= 0.5;
    }
    throw ConsistencyError("negativize_conjugation: scaling iteration exhausted");
}

namespace {

// Matrix sign function by Newton iteration with determinant scaling; the
// halves of (I +- sign(M)) project onto the right/left-half-plane invariant
// subspaces.  Works verbatim for real and complex matrices.
template <typename Mat>
Mat matrix_sign(const Mat& M) {
    const int m = static_cast<int>(M.rows());
    Mat S = M;
    for (int it = 0; it < 100; ++it) {
        auto lu = S.partialPivLu();
        double adet = std::abs(std::abs(lu.determinant()));
        double mu = adet > 0.0 ? std::pow(adet, -1.0 / m) : 1.0;
        Mat Snext = 0.5 * (mu * S + (1.0 / mu) * lu.inverse());
        double step = (Snext - S).norm();
        S = Snext;
        if (step <= 1e-13 * std::max(1.0, S.norm())) return S;
    }
    throw Error("matrix sign iteration did not converge");
}

template <typename Mat>
std::pair<Mat, Mat> split_by_sign(const Mat& M, double margin, double min_abs_re) {
    if (min_abs_re < margin) throw HyperbolicityError(min_abs_re);
    const int m = static_cast<int>(M.rows());
    Mat S = matrix_sign(M);
    Mat Pp = 0.5 * (Mat::Identity(m, m) + S);
    Mat Pm = 0.5 * (Mat::Identity(m, m) - S);
    int kp = static_cast<int>(std::lround(std::real(std::complex<double>(Pp.trace()))));
    int km = m - kp;
    Eigen::ColPivHouseholderQR<Mat> qp(Pp), qm(Pm);
    Mat Qp = qp.householderQ() * Mat::Identity(m, kp);
    Mat Qm = qm.householderQ() * Mat::Identity(m, km);
    // Invariance is the whole point; verify it instead of trusting trace counts.
    double scale = M.norm() + 1.0;
    double rp = kp > 0 ? (M * Qp - Qp * (Qp.adjoint() * M * Qp)).norm() / scale : 0.0;
    double rm = km > 0 ? (M * Qm - Qm * (Qm.adjoint() * M * Qm)).norm() / scale : 0.0;
    if (rp > 1e-6 || rm > 1e-6)
        throw ConsistencyError("spectral splitting failed the invariance check");
    return {Qp, Qm};
}

}  // namespace

HyperbolicSplitting hyperbolic_splitting(const Eigen::MatrixXd& M, double margin) {
    Eigen::EigenSolver<MatrixXd> es(M, false);
    if (es.info() != Eigen::Success) throw Error("eigensolver failure in splitting");
    double min_abs_re = es.eigenvalues().real().cwiseAbs().minCoeff();
    auto [Vp, Vm] = split_by_sign(M, margin, min_abs_re);
    return {Vp, Vm};
}

HyperbolicSplittingC hyperbolic_splitting(const Eigen::MatrixXcd& M, double margin) {
    Eigen::ComplexEigenSolver<MatrixXcd> es(M, false);
    if (es.info() != Eigen::Success) throw Error("eigensolver failure in splitting");
    double min_abs_re = es.eigenvalues().real().cwiseAbs().minCoeff();
    auto [Vp, Vm] = split_by_sign(M, margin, min_abs_re);
    return {Vp, Vm};
}

LagrangianFrame build_LR(const SymplecticSpace& space) {
    int n = space.n, r = space.r;
    MatrixXd Z = MatrixXd::Zero(2 * n, n);
    for (int i = 0; i < r; ++i) Z(i, i) = 1.0;                  // p components in V^+(Q)
    for (int i = r; i < n; ++i) Z(n + i, i) = 1.0;              // q components in V^-(Q)
    return LagrangianFrame(space, Z);
}

using nlohmann::ordered_json;

std::string system_config_string(const SkewGradientSystem& system) {
    ordered_json j;
    j["label"] = system.label;
    j["n"] = system.space.n;
    j["r"] = system.space.r;
    j["D"] = std::vector<double>(system.D.data(), system.D.data() + system.D.size());
    j["params"] = system.params;
    std::vector<std::vector<double>> seeds;
    for (const auto& s : system.rest_seeds)
        seeds.emplace_back(s.data(), s.data() + s.size());
    j["rest_seeds"] = seeds;
    return j.dump(2);
}

SkewGradientSystem system_from_config_string(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw InputError(std::string("system config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "label" && key != "n" && key != "r" && key != "D" && key != "params" &&
            key != "rest_seeds")
            throw InputError("unrecognized key '" + key + "' in system config");
    }
    std::string label = j.at("label").get<std::string>();
    if (label != "fhn")
        throw InputError("unknown system label '" + label + "' (built-ins: fhn)");
    auto params = j.at("params").get<std::map<std::string, double>>();
    for (const auto& [key, value] : params) {
        (void)value;
        if (key != "a" && key != "gamma" && key != "d")
            throw InputError("unrecognized fhn parameter '" + key + "'");
    }
    SkewGradientSystem sys =
        make_fhn_system(params.at("a"), params.at("gamma"), params.at("d"));
    if (j.at("n").get<int>() != sys.space.n || j.at("r").get<int>() != sys.space.r)
        throw InputError("system config (n, r) does not match the labeled system");
    return sys;
}

}  // namespace maslov::model
