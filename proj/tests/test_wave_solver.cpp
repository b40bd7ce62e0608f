// Wave layer: the cubic's equilibria, the front boundary-value solve and its
// tolerances, the scalar bistable benchmark with closed-form speed and
// profile, translation and refinement behavior, and profile file round-trips
// with full revalidation.
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maslov/system_model.hpp"
#include "maslov/wave_solver.hpp"

using namespace maslov;
using namespace maslov::model;
using namespace maslov::wave;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kU2 = 0.4234435562925362;
constexpr double kU3 = 0.8265564437074637;

// The default front is expensive enough to share across cases.
const WaveProfile& fhn_wave() {
    static WaveProfile p = solve_front(make_fhn_system());
    return p;
}

// Scalar bistable reaction with r = 1: the cubic front has a closed-form
// profile 1/(1 + e^{xi/sqrt(2)}) and speed (1 - 2a)/sqrt(2).
SkewGradientSystem make_bistable_scalar(double a) {
    SkewGradientSystem sys{symp::SymplecticSpace(1, 1),
                           VectorXd::Ones(1),
                           {},
                           {},
                           {},
                           "bistable",
                           {{"a", a}}};
    sys.grad_F = [a](const VectorXd& w) {
        VectorXd g(1);
        g << w[0] * (1.0 - w[0]) * (w[0] - a);
        return g;
    };
    sys.hess_F = [a](const VectorXd& w) {
        MatrixXd H(1, 1);
        H << -3.0 * w[0] * w[0] + 2.0 * (1.0 + a) * w[0] - a;
        return H;
    };
    VectorXd one = VectorXd::Ones(1), zero = VectorXd::Zero(1);
    sys.rest_seeds = {one, zero};  // 1 at -infinity, 0 at +infinity: c > 0
    return sys;
}

// Least-squares slope of log ||w(xi) - end|| over the nodes with xi in
// [lo, hi]: the measured exponential approach rate toward that end state.
double decay_slope(const WaveProfile& p, const VectorXd& end, double lo, double hi) {
    std::vector<double> xs, ys;
    for (int j = 0; j < p.xi.size(); ++j) {
        if (p.xi[j] < lo || p.xi[j] > hi) continue;
        double dist = (p.w.row(j).transpose() - end).norm();
        REQUIRE(dist > 0.0);
        xs.push_back(p.xi[j]);
        ys.push_back(std::log(dist));
    }
    REQUIRE(xs.size() >= 10);
    double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Real part of the asymptotic root with the smallest magnitude on the given
// side of the axis (+1: unstable, -1: stable) over the spectrum of QB.
double slowest_rate(const MatrixXd& Q, const MatrixXd& B, double c, int side) {
    Eigen::EigenSolver<MatrixXd> es(Q * B, false);
    double best = side > 0 ? 1e300 : -1e300;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        auto [mp, mm] = asymptotic_eigs(c, es.eigenvalues()[i], 0.0);
        if (side > 0)
            best = std::min(best, mp.real());
        else
            best = std::max(best, mm.real());
    }
    return best;
}

}  // namespace

// --------------------------------------------------------------------------- //
// equilibria
// --------------------------------------------------------------------------- //

TEST_CASE("cubic equilibria solve u = gamma f(u)") {
    Equilibria eq = find_equilibria_fhn(0.25, 10.0);
    CHECK(eq.u1 == 0.0);
    CHECK(eq.u2 == doctest::Approx(kU2).epsilon(1e-13));
    CHECK(eq.u3 == doctest::Approx(kU3).epsilon(1e-13));

    auto f = [](double a, double u) { return u * (1.0 - u) * (u - a); };
    for (double u : {eq.u2, eq.u3}) CHECK(std::abs(u - 10.0 * f(0.25, u)) <= 1e-11);

    // Root symmetric functions of the reduced quadratic u^2-(1+a)u+(a+1/g).
    CHECK(eq.u2 + eq.u3 == doctest::Approx(1.25).epsilon(1e-13));
    CHECK(eq.u2 * eq.u3 == doctest::Approx(0.35).epsilon(1e-13));

    // The fold for a = 1/4 closes at gamma = 4/(1-a)^2 = 64/9 ~ 7.111.
    CHECK_THROWS_AS(find_equilibria_fhn(0.25, 7.0), InputError);
    Equilibria near_fold = find_equilibria_fhn(0.25, 7.2);
    CHECK(near_fold.u2 < near_fold.u3);
    CHECK(near_fold.u2 > 0.4);
    CHECK(near_fold.u3 < 0.9);
    for (double u : {near_fold.u2, near_fold.u3})
        CHECK(std::abs(u - 7.2 * f(0.25, u)) <= 1e-11);
}

// --------------------------------------------------------------------------- //
// the default front
// --------------------------------------------------------------------------- //

TEST_CASE("default front meets every declared profile invariant") {
    SkewGradientSystem sys = make_fhn_system();
    const WaveProfile& w = fhn_wave();
    int N = static_cast<int>(w.xi.size());
    REQUIRE(N == 2001);

    CHECK(std::abs(w.c - 0.014447885334) <= 1e-8);
    CHECK(w.residual_norm <= 1e-8);
    CHECK(w.residual_norm <= 1e-9);  // regression guard: actual value ~5.6e-11
    CHECK(profile_residual(sys, w) == w.residual_norm);

    // Uniform grid over [-40, 40].
    CHECK(w.xi[0] == -40.0);
    CHECK(std::abs(w.xi[N - 1] - 40.0) <= 1e-12);
    double h = w.xi[1] - w.xi[0];
    for (int j = 1; j < N; ++j) CHECK(std::abs(w.xi[j] - w.xi[j - 1] - h) <= 1e-12);

    // Orientation: origin behind, excited state ahead, positive speed.
    CHECK(w.c > 0.0);
    CHECK(w.w_minus.w.norm() <= 1e-12);
    CHECK(w.w_plus.w[0] == doctest::Approx(kU3).epsilon(1e-12));
    CHECK(w.w_plus.w[1] == doctest::Approx(kU3 / 10.0).epsilon(1e-12));
    CHECK((w.w.row(0).transpose() - w.w_minus.w).norm() <= 1e-6);
    CHECK((w.w.row(N - 1).transpose() - w.w_plus.w).norm() <= 1e-6);

    // The u component rises monotonically through the pinned middle root.
    for (int j = 1; j < N; ++j) CHECK(w.w(j, 0) >= w.w(j - 1, 0) - 1e-10);
    CHECK(w.w((N - 1) / 2, 0) == doctest::Approx(kU2).epsilon(1e-9));

    // Stored derivative agrees with divided differences at second order.
    double worst = 0.0;
    for (int j = 1; j < N - 1; ++j) {
        VectorXd dd = (w.w.row(j + 1) - w.w.row(j - 1)).transpose() / (2.0 * h);
        worst = std::max(worst, (w.wp.row(j).transpose() - dd).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 2e-4);

    // The derivative of the profile equation annihilates the stored w'.
    CHECK(translation_residual(sys, w) <= 1e-7);

    CHECK(check_H1(w.w_minus.B, sys.space.Q));
    CHECK(check_H1(w.w_plus.B, sys.space.Q));
}

TEST_CASE("front ends decay at the asymptotic rates") {
    SkewGradientSystem sys = make_fhn_system();
    const WaveProfile& w = fhn_wave();

    // Toward +infinity the slowest stable root of the end linearization
    // governs; toward -infinity the slowest unstable one does.
    double rate_plus = slowest_rate(sys.space.Q, w.w_plus.B, w.c, -1);
    double rate_minus = slowest_rate(sys.space.Q, w.w_minus.B, w.c, +1);
    CHECK(rate_plus == doctest::Approx(-0.5875).epsilon(2e-3));
    CHECK(rate_minus == doctest::Approx(+0.5875).epsilon(2e-3));

    double s_plus = decay_slope(w, w.w_plus.w, 20.0, 30.0);
    double s_minus = decay_slope(w, w.w_minus.w, -30.0, -20.0);
    CHECK(std::abs(s_plus - rate_plus) <= 0.2 * std::abs(rate_plus));
    CHECK(std::abs(s_minus - rate_minus) <= 0.2 * std::abs(rate_minus));
}

TEST_CASE("solver input contracts are enforced") {
    SkewGradientSystem sys = make_fhn_system();

    BVPConfig bad = {};
    bad.nodes = 50;
    CHECK_THROWS_AS(solve_front(sys, bad), InputError);
    bad = {};
    bad.Xi = -1.0;
    CHECK_THROWS_AS(solve_front(sys, bad), InputError);
    bad = {};
    bad.phase_component = 2;
    CHECK_THROWS_AS(solve_front(sys, bad), InputError);

    SkewGradientSystem no_seeds = sys;
    no_seeds.rest_seeds.clear();
    CHECK_THROWS_AS(solve_front(no_seeds), InputError);

    // A rest state with spectrum on the wrong side is refused up front.
    SkewGradientSystem unstable{symp::SymplecticSpace(1, 1), VectorXd::Ones(1),
                                {},                          {},
                                {},                          "custom",
                                {}};
    unstable.grad_F = [](const VectorXd& w) { return w; };
    unstable.hess_F = [](const VectorXd&) { return MatrixXd::Identity(1, 1); };
    unstable.rest_seeds = {VectorXd::Zero(1), VectorXd::Zero(1)};
    CHECK_THROWS_AS(solve_front(unstable), InputError);

    // Reversing the rest states converges to the mirrored front with c < 0,
    // which the solver reports as an orientation error.
    SkewGradientSystem swapped = make_fhn_system();
    std::swap(swapped.rest_seeds[0], swapped.rest_seeds[1]);
    BVPConfig small = {};
    small.Xi = 20.0;
    small.nodes = 801;
    small.tol_bc = 1e-4;  // ends only reach ~8e-6 on this short domain
    CHECK_THROWS_AS(solve_front(swapped, small), OrientationError);
}

// --------------------------------------------------------------------------- //
// scalar benchmark with closed-form solution
// --------------------------------------------------------------------------- //

TEST_CASE("scalar bistable front matches the closed-form speed and profile") {
    double a = 0.3;
    SkewGradientSystem sys = make_bistable_scalar(a);
    BVPConfig cfg = {};
    cfg.Xi = 20.0;
    cfg.nodes = 1001;
    WaveProfile w = solve_front(sys, cfg);

    double c_exact = (1.0 - 2.0 * a) / std::sqrt(2.0);
    CHECK(std::abs(w.c - c_exact) <= 1e-4);
    CHECK(std::abs(w.c - c_exact) <= 1e-6);  // the solve is much better than asked

    // With the phase pinned at the midpoint 1/2 the solution is exactly the
    // logistic front 1/(1 + e^{xi/sqrt 2}).
    double worst = 0.0;
    for (int j = 0; j < w.xi.size(); ++j) {
        double exact = 1.0 / (1.0 + std::exp(w.xi[j] / std::sqrt(2.0)));
        worst = std::max(worst, std::abs(w.w(j, 0) - exact));
    }
    CHECK(worst <= 1e-4);

    CHECK(w.w_minus.w[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(w.w_plus.w.norm() <= 1e-12);
    CHECK(w.residual_norm <= 1e-8);
}

// --------------------------------------------------------------------------- //
// convergence behavior
// --------------------------------------------------------------------------- //

TEST_CASE("grid refinement converges at second order, domain growth is spent") {
    SkewGradientSystem sys = make_fhn_system();

    BVPConfig coarse = {}, fine = {};
    coarse.Xi = fine.Xi = 30.0;
    coarse.nodes = 751;   // h = 0.08
    fine.nodes = 1501;    // h = 0.04
    WaveProfile wc = solve_front(sys, coarse);
    WaveProfile wf = solve_front(sys, fine);
    double rc = consistency_residual(sys, wc);
    double rf = consistency_residual(sys, wf);
    double ratio = rc / rf;
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.5);

    // Same step, doubled half-length: the speed is already converged.  The
    // short domain's ends sit ~e^{-0.5875*20} ~ 8e-6 from the rest states,
    // so its boundary tolerance must admit that.
    BVPConfig half = {}, full = {};
    half.Xi = 20.0;
    half.nodes = 801;
    half.tol_bc = 1e-4;
    full.Xi = 40.0;
    full.nodes = 1601;
    WaveProfile wh = solve_front(sys, half);
    WaveProfile wfull = solve_front(sys, full);
    CHECK(std::abs(wh.c - wfull.c) <= 1e-6);

    // Changing the phase anchor slides the front without changing the speed.
    BVPConfig shifted = half;
    shifted.phase_value = 0.6;
    WaveProfile ws = solve_front(sys, shifted);
    CHECK(ws.w((ws.xi.size() - 1) / 2, 0) == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(std::abs(ws.c - wh.c) <= 1e-8);
}

// --------------------------------------------------------------------------- //
// profile files
// --------------------------------------------------------------------------- //

TEST_CASE("profile files round-trip bit-exactly and are revalidated on load") {
    namespace fs = std::filesystem;
    SkewGradientSystem sys = make_fhn_system();
    const WaveProfile& w = fhn_wave();

    fs::path dir = fs::temp_directory_path() / "maslov_wave_test" / "nested";
    fs::remove_all(dir.parent_path());
    std::string csv = (dir / "wave.csv").string();
    std::string meta = (dir / "wave_meta.json").string();
    save_profile(w, sys, csv, meta);  // also creates the missing directories

    LoadedProfile back = load_profile(csv, meta);
    CHECK((back.profile.xi - w.xi).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.profile.w - w.w).cwiseAbs().maxCoeff() == 0.0);
    CHECK((back.profile.wp - w.wp).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.profile.c == w.c);
    CHECK(back.profile.residual_norm == w.residual_norm);
    CHECK(back.system.label == "fhn");
    CHECK(back.system.params.at("a") == 0.25);
    CHECK(back.system.params.at("gamma") == 10.0);
    CHECK(back.system.params.at("d") == 1.0);
    CHECK((back.profile.w_minus.w - w.w_minus.w).cwiseAbs().maxCoeff() <= 1e-12);

    // A tampered speed fails the recomputed residual: not a wave any more.
    nlohmann::json j = nlohmann::json::parse(std::ifstream(meta));
    j["c"] = w.c + 0.01;
    std::string bad_meta = (dir / "bad_meta.json").string();
    std::ofstream(bad_meta) << j.dump(2);
    CHECK_THROWS_AS(load_profile(csv, bad_meta), Error);

    // Unknown metadata keys are rejected.
    nlohmann::json j2 = nlohmann::json::parse(std::ifstream(meta));
    j2["comment"] = "hi";
    std::string extra_meta = (dir / "extra_meta.json").string();
    std::ofstream(extra_meta) << j2.dump(2);
    CHECK_THROWS_AS(load_profile(csv, extra_meta), InputError);

    // Node-count disagreement between file and metadata is rejected.
    nlohmann::json j3 = nlohmann::json::parse(std::ifstream(meta));
    j3["nodes"] = 17;
    std::string short_meta = (dir / "short_meta.json").string();
    std::ofstream(short_meta) << j3.dump(2);
    CHECK_THROWS_AS(load_profile(csv, short_meta), InputError);

    // Header tampering is a schema error.
    std::ifstream in(csv);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();
    std::string bad_csv = (dir / "bad.csv").string();
    std::ofstream(bad_csv) << "zeta" << text.substr(2);
    CHECK_THROWS_AS(load_profile(bad_csv, meta), InputError);

    CHECK_THROWS_AS(load_profile((dir / "missing.csv").string(), meta), InputError);
    CHECK_THROWS_AS(load_profile(csv, (dir / "missing.json").string()), InputError);

    fs::remove_all(dir.parent_path());
}
