#include "maslov/reporting.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "maslov/system_model.hpp"

namespace maslov::reporting {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::ordered_json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---------- strict config parsing ----------

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw InputError("config: " + path + ": " + msg);
}

void reject_unknown(const ordered_json& j, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(path, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) bad(path, "unknown key '" + it.key() + "'");
    }
}

double want_number(const ordered_json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

int want_int(const ordered_json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

std::string want_string(const ordered_json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

MatrixXd want_matrix(const ordered_json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected an array of rows");
    int rows = static_cast<int>(j.size());
    int cols = -1;
    MatrixXd M;
    for (int i = 0; i < rows; ++i) {
        const ordered_json& row = j[i];
        if (!row.is_array() || row.empty()) bad(path, "expected an array of rows");
        if (cols < 0) {
            cols = static_cast<int>(row.size());
            M.resize(rows, cols);
        }
        if (static_cast<int>(row.size()) != cols) bad(path, "ragged rows");
        for (int k = 0; k < cols; ++k) M(i, k) = want_number(row[k], path);
    }
    return M;
}

void parse_system_block(const ordered_json& j, RunConfig& cfg) {
    reject_unknown(j, "system", {"label", "a", "gamma", "d", "n", "r", "B", "B_minus", "B_plus"});
    if (!j.count("label")) bad("system", "missing 'label'");
    std::string label = want_string(j["label"], "system.label");
    if (label == "fhn") {
        reject_unknown(j, "system", {"label", "a", "gamma", "d"});
        double a = j.count("a") ? want_number(j["a"], "system.a") : 0.25;
        double g = j.count("gamma") ? want_number(j["gamma"], "system.gamma") : 10.0;
        double d = j.count("d") ? want_number(j["d"], "system.d") : 1.0;
        cfg.system = model::make_fhn_system(a, g, d);
    } else if (label == "custom") {
        reject_unknown(j, "system", {"label", "n", "r", "B", "B_minus", "B_plus"});
        if (!j.count("n") || !j.count("r")) bad("system", "custom ends need 'n' and 'r'");
        CustomEnds ce;
        ce.n = want_int(j["n"], "system.n");
        ce.r = want_int(j["r"], "system.r");
        if (ce.n < 1 || ce.r < 0 || ce.r > ce.n) bad("system", "need 1 <= n and 0 <= r <= n");
        if (j.count("B")) {
            if (j.count("B_minus") || j.count("B_plus"))
                bad("system", "give either 'B' or the 'B_minus'/'B_plus' pair, not both");
            ce.B_minus = ce.B_plus = want_matrix(j["B"], "system.B");
        } else if (j.count("B_minus") && j.count("B_plus")) {
            ce.B_minus = want_matrix(j["B_minus"], "system.B_minus");
            ce.B_plus = want_matrix(j["B_plus"], "system.B_plus");
        } else {
            bad("system", "custom ends need 'B' or both 'B_minus' and 'B_plus'");
        }
        for (const MatrixXd* M : {&ce.B_minus, &ce.B_plus})
            if (M->rows() != ce.n || M->cols() != ce.n)
                bad("system", "end matrices must be n x n");
        cfg.custom = ce;
    } else {
        bad("system.label", "expected 'fhn' or 'custom'");
    }
}

void parse_bvp_block(const ordered_json& j, wave::BVPConfig& bvp) {
    reject_unknown(j, "bvp", {"Xi", "nodes", "tol_newton", "tol_bc", "tol_res", "continuation",
                              "phase_component", "phase_value"});
    if (j.count("Xi")) bvp.Xi = want_number(j["Xi"], "bvp.Xi");
    if (j.count("nodes")) bvp.nodes = want_int(j["nodes"], "bvp.nodes");
    if (j.count("tol_newton")) bvp.tol_newton = want_number(j["tol_newton"], "bvp.tol_newton");
    if (j.count("tol_bc")) bvp.tol_bc = want_number(j["tol_bc"], "bvp.tol_bc");
    if (j.count("tol_res")) bvp.tol_res = want_number(j["tol_res"], "bvp.tol_res");
    if (j.count("continuation")) {
        const ordered_json& arr = j["continuation"];
        if (!arr.is_array()) bad("bvp.continuation", "expected an array");
        bvp.continuation.clear();
        for (size_t i = 0; i < arr.size(); ++i)
            bvp.continuation.push_back(want_number(arr[i], "bvp.continuation"));
    }
    if (j.count("phase_component"))
        bvp.phase_component = want_int(j["phase_component"], "bvp.phase_component");
    if (j.count("phase_value")) {
        if (j["phase_value"].is_null())
            bvp.phase_value = std::numeric_limits<double>::quiet_NaN();
        else
            bvp.phase_value = want_number(j["phase_value"], "bvp.phase_value");
    }
}

void parse_sweep_block(const ordered_json& j, SweepConfig& sw) {
    reject_unknown(j, "sweep", {"lambda_grid", "delta0", "C_override", "flow_nodes",
                                "flow_samples", "bundle_steps", "lemma31_nodes"});
    if (j.count("lambda_grid")) sw.lambda_grid = want_int(j["lambda_grid"], "sweep.lambda_grid");
    if (j.count("delta0")) sw.delta0 = want_number(j["delta0"], "sweep.delta0");
    if (j.count("C_override")) {
        if (j["C_override"].is_null())
            sw.C_override = -1.0;
        else
            sw.C_override = want_number(j["C_override"], "sweep.C_override");
    }
    if (j.count("flow_nodes")) sw.flow_nodes = want_int(j["flow_nodes"], "sweep.flow_nodes");
    if (j.count("flow_samples"))
        sw.flow_samples = want_int(j["flow_samples"], "sweep.flow_samples");
    if (j.count("bundle_steps"))
        sw.bundle_steps = want_int(j["bundle_steps"], "sweep.bundle_steps");
    if (j.count("lemma31_nodes"))
        sw.lemma31_nodes = want_int(j["lemma31_nodes"], "sweep.lemma31_nodes");
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(name, e.what());
    }
}

ordered_json build_report_json(const AnalyzeOutcome& o, const RunConfig& config) {
    ordered_json j;
    ordered_json hyp;
    hyp["H1"] = o.report.H1;
    hyp["H2"] = o.report.H2;
    hyp["H2prime"] = o.report.H2prime;
    hyp["lemma31"] = o.realness.holds;
    if (o.realness.fhn_d_condition)
        hyp["d_gt_gamma_inv2"] = *o.realness.fhn_d_condition;
    else
        hyp["d_gt_gamma_inv2"] = nullptr;
    j["hypotheses"] = hyp;

    ordered_json idx;
    idx["maslov_def15"] = o.report.index_compactified;
    if (o.report.index_anchored)
        idx["maslov_def14"] = *o.report.index_anchored;
    else
        idx["maslov_def14"] = nullptr;
    idx["boundary_lambda"] = o.report.boundary_index;
    idx["triple_LR_0"] = o.report.triple_LR_0;
    idx["triple_LR_C"] = o.report.triple_LR_C;
    j["indices"] = idx;

    ordered_json cnt;
    cnt["N_plus"] = o.report.N_plus;
    cnt["N_bar_plus"] = o.report.N_bar_plus;
    cnt["sf_S"] = o.report.sf_S;
    j["counts"] = cnt;

    ordered_json ids;
    ids["thm_main"] = spectral::to_string(o.report.bound_with_boundary_term);
    ids["thm_central"] = spectral::to_string(o.report.bound_plain);
    ids["thm_fhn"] = spectral::to_string(o.report.count_equals_index);
    ids["prop_16"] = spectral::to_string(o.report.definitions_agree);
    ids["prop_29"] = spectral::to_string(o.report.flow_decomposition);
    j["identities"] = ids;

    ordered_json prov;
    prov["config_hash"] = hash_hex(o.config_hash);
    prov["C"] = o.C;
    prov["C_overridden"] = o.C_overridden;
    prov["delta0"] = config.sweep.delta0;
    // The upper-count convention: eigenvalues at zero are counted into the
    // nonnegative total, so N_bar_plus = N_plus + dim ker at 0.
    prov["nonnegative_count_reading"] = "N_bar_plus = N_plus + kernel dimension at lambda = 0";
    prov["real_axis_search"] =
        "eigenvalue search restricted to real lambda in [0, C]; off-axis spectrum is out of "
        "scope and covered by the realness verdict";
    ordered_json grids;
    grids["Xi"] = o.bundle.Xi;
    grids["profile_nodes"] = static_cast<int>(o.profile->xi.size());
    grids["lambda_grid"] = config.sweep.lambda_grid;
    grids["flow_nodes"] = config.sweep.flow_nodes;
    grids["flow_samples"] = config.sweep.flow_samples;
    grids["bundle_steps"] = config.sweep.bundle_steps;
    grids["lemma31_nodes"] = config.sweep.lemma31_nodes;
    prov["grids"] = grids;
    ordered_json wavej;
    wavej["c"] = o.profile->c;
    wavej["residual"] = o.profile->residual_norm;
    prov["wave"] = wavej;
    prov["seed"] = config.seed;
    j["provenance"] = prov;
    return j;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw InputError(std::string("config: invalid JSON: ") + e.what());
    }
    reject_unknown(j, "(top level)",
                   {"system", "bvp", "sweep", "profile", "meta", "out_dir", "seed"});
    RunConfig cfg;
    if (j.count("system")) parse_system_block(j["system"], cfg);
    if (j.count("bvp")) parse_bvp_block(j["bvp"], cfg.bvp);
    if (j.count("sweep")) parse_sweep_block(j["sweep"], cfg.sweep);
    if (j.count("profile")) cfg.profile_csv = want_string(j["profile"], "profile");
    if (j.count("meta")) cfg.meta_json = want_string(j["meta"], "meta");
    if (j.count("out_dir")) cfg.out_dir = want_string(j["out_dir"], "out_dir");
    if (j.count("seed")) cfg.seed = want_int(j["seed"], "seed");
    if (cfg.profile_csv.empty() != cfg.meta_json.empty())
        bad("profile", "'profile' and 'meta' must be given together");
    if (cfg.sweep.lambda_grid < 2) bad("sweep.lambda_grid", "need at least 2");
    if (!(cfg.sweep.delta0 > 0.0)) bad("sweep.delta0", "must be positive");
    return cfg;
}

std::string canonical_config_string(const RunConfig& config) {
    ordered_json j;
    if (config.system) {
        ordered_json s;
        s["label"] = config.system->label;
        for (const auto& [k, v] : config.system->params) s[k] = v;
        j["system"] = s;
    } else if (config.custom) {
        ordered_json s;
        s["label"] = "custom";
        s["n"] = config.custom->n;
        s["r"] = config.custom->r;
        auto rows = [](const MatrixXd& M) {
            ordered_json out = ordered_json::array();
            for (int i = 0; i < M.rows(); ++i) {
                ordered_json row = ordered_json::array();
                for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
                out.push_back(row);
            }
            return out;
        };
        s["B_minus"] = rows(config.custom->B_minus);
        s["B_plus"] = rows(config.custom->B_plus);
        j["system"] = s;
    }
    ordered_json b;
    b["Xi"] = config.bvp.Xi;
    b["nodes"] = config.bvp.nodes;
    b["tol_newton"] = config.bvp.tol_newton;
    b["tol_bc"] = config.bvp.tol_bc;
    b["tol_res"] = config.bvp.tol_res;
    b["continuation"] = config.bvp.continuation;
    b["phase_component"] = config.bvp.phase_component;
    if (std::isnan(config.bvp.phase_value))
        b["phase_value"] = nullptr;
    else
        b["phase_value"] = config.bvp.phase_value;
    j["bvp"] = b;
    ordered_json s;
    s["lambda_grid"] = config.sweep.lambda_grid;
    s["delta0"] = config.sweep.delta0;
    s["C_override"] = config.sweep.C_override;
    s["flow_nodes"] = config.sweep.flow_nodes;
    s["flow_samples"] = config.sweep.flow_samples;
    s["bundle_steps"] = config.sweep.bundle_steps;
    s["lemma31_nodes"] = config.sweep.lemma31_nodes;
    j["sweep"] = s;
    j["profile"] = config.profile_csv;
    j["meta"] = config.meta_json;
    j["seed"] = config.seed;
    return j.dump();
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CheckOutcome run_check(const RunConfig& config) {
    std::vector<std::pair<std::string, MatrixXd>> ends;
    MatrixXd Q;
    std::optional<bool> dcond;
    if (config.custom) {
        symp::SymplecticSpace sp(config.custom->n, config.custom->r);
        Q = sp.Q;
        ends.emplace_back("minus", config.custom->B_minus);
        ends.emplace_back("plus", config.custom->B_plus);
    } else if (config.system) {
        const model::SkewGradientSystem& sys = *config.system;
        if (sys.rest_seeds.size() < 2)
            throw InputError("hypothesis check needs two rest states");
        Q = sys.space.Q;
        model::RestState rm = model::make_rest_state(sys, sys.rest_seeds[0], model::Side::minus);
        model::RestState rp = model::make_rest_state(sys, sys.rest_seeds[1], model::Side::plus);
        ends.emplace_back("minus", rm.B);
        ends.emplace_back("plus", rp.B);
        if (sys.label == "fhn") {
            double g = sys.params.at("gamma");
            double d = sys.params.at("d");
            dcond = d * g * g > 1.0;
        }
    } else {
        throw InputError("hypothesis check needs a system or custom end matrices");
    }

    CheckOutcome out;
    out.H1 = out.H2 = out.H2prime = true;
    for (const auto& [name, B] : ends) {
        EndCheck ec;
        ec.name = name;
        Eigen::EigenSolver<MatrixXd> es(Q * B);
        std::vector<std::complex<double>> eigs(es.eigenvalues().data(),
                                               es.eigenvalues().data() + B.rows());
        std::sort(eigs.begin(), eigs.end(), [](auto a, auto b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        ec.eig_QB = Eigen::Map<const Eigen::VectorXcd>(eigs.data(), eigs.size());
        ec.H1 = model::check_H1(B, Q);
        ec.H2 = model::check_H2(B, Q);
        ec.H2prime = model::check_H2prime(B, Q);
        out.H1 = out.H1 && ec.H1;
        out.H2 = out.H2 && ec.H2;
        out.H2prime = out.H2prime && ec.H2prime;
        out.ends.push_back(std::move(ec));
    }
    out.d_gt_gamma_inv2 = dcond;
    out.all_hold = out.H1 && out.H2 && out.H2prime;

    ordered_json j;
    ordered_json hyp;
    hyp["H1"] = out.H1;
    hyp["H2"] = out.H2;
    hyp["H2prime"] = out.H2prime;
    if (dcond)
        hyp["d_gt_gamma_inv2"] = *dcond;
    else
        hyp["d_gt_gamma_inv2"] = nullptr;
    j["hypotheses"] = hyp;
    ordered_json endsj = ordered_json::array();
    for (const EndCheck& ec : out.ends) {
        ordered_json e;
        e["name"] = ec.name;
        ordered_json eig = ordered_json::array();
        for (int i = 0; i < ec.eig_QB.size(); ++i)
            eig.push_back({ec.eig_QB[i].real(), ec.eig_QB[i].imag()});
        e["eig_QB"] = eig;
        e["H1"] = ec.H1;
        e["H2"] = ec.H2;
        e["H2prime"] = ec.H2prime;
        endsj.push_back(e);
    }
    j["ends"] = endsj;
    out.json = j;
    return out;
}

AnalyzeOutcome run_analyze(const RunConfig& config) {
    AnalyzeOutcome out;

    if (!config.profile_csv.empty()) {
        wave::LoadedProfile loaded = stage("load_profile", [&] {
            return wave::load_profile(config.profile_csv, config.meta_json, config.bvp);
        });
        out.system = loaded.system;
        out.profile = std::make_shared<const wave::WaveProfile>(std::move(loaded.profile));
    } else {
        if (!config.system)
            throw InputError("analyze needs a reaction system or a stored profile");
        out.system = *config.system;
        out.profile = stage("solve_wave", [&]() -> std::shared_ptr<const wave::WaveProfile> {
            try {
                return std::make_shared<const wave::WaveProfile>(
                    wave::solve_front(out.system, config.bvp));
            } catch (const OrientationError&) {
                // The seeds were ordered against the propagation direction;
                // swap the rest states and solve again.
                model::SkewGradientSystem flipped = out.system;
                std::swap(flipped.rest_seeds[0], flipped.rest_seeds[1]);
                auto p = std::make_shared<const wave::WaveProfile>(
                    wave::solve_front(flipped, config.bvp));
                out.system = flipped;
                return p;
            }
        });
    }

    out.bundle = stage("linearize", [&] {
        return model::LinearizedBundle::from_profile(out.system, *out.profile);
    });
    out.C_overridden = config.sweep.C_override > 0.0;
    out.C = stage("bound_C", [&] {
        return out.C_overridden ? config.sweep.C_override : model::bound_C(out.bundle);
    });

    bool H1 = false, H2 = false, H2p = false;
    stage("hypotheses", [&] {
        const MatrixXd& Q = out.bundle.space.Q;
        H1 = model::check_H1(out.bundle.B_minus, Q) && model::check_H1(out.bundle.B_plus, Q);
        H2 = model::check_H2(out.bundle.B_minus, Q) && model::check_H2(out.bundle.B_plus, Q);
        H2p = model::check_H2prime(out.bundle.B_minus, Q) &&
              model::check_H2prime(out.bundle.B_plus, Q);
        return 0;
    });

    out.realness = stage("realness", [&] {
        spectral::RealnessVerdict v =
            spectral::check_lemma31(out.bundle, config.sweep.lemma31_nodes);
        if (out.system.label == "fhn") {
            double g = out.system.params.at("gamma");
            double d = out.system.params.at("d");
            v.fhn_d_condition = d * g * g > 1.0;
        }
        return v;
    });

    out.compactified = stage("wave_index", [&] {
        return bundle::maslov_def15(out.bundle, -1.0, config.sweep.delta0,
                                    config.sweep.bundle_steps);
    });

    out.anchored = stage("anchored_index", [&]() -> std::optional<bundle::MaslovResult> {
        for (double frac : {0.5, 0.25, 0.75, 0.125}) {
            try {
                return bundle::maslov_def14(out.bundle, frac * out.bundle.Xi, -1.0,
                                            config.sweep.delta0, config.sweep.bundle_steps);
            } catch (const ConditionIneffectiveError&) {
                continue;  // this waypoint still sees later intersections
            }
        }
        return std::nullopt;
    });

    VectorXd grid(config.sweep.lambda_grid);
    for (int i = 0; i < grid.size(); ++i)
        grid[i] = out.C * i / (grid.size() - 1.0);

    out.boundary =
        stage("boundary_path", [&] { return bundle::boundary_lambda_path(out.bundle, grid); });
    out.sweep = stage("evans_sweep", [&] { return spectral::evans_sweep(out.bundle, grid); });
    out.counts = stage("eigenvalue_count", [&] {
        return spectral::count_eigenvalues(out.bundle, out.sweep, config.sweep.delta0);
    });
    out.flow = stage("spectral_flow", [&] {
        return spectral::spectral_flow_S(out.bundle, config.sweep.delta0, out.C,
                                         config.sweep.flow_nodes, -1.0,
                                         config.sweep.flow_samples);
    });
    out.triples_on_grid = stage("triples", [&] {
        std::vector<int> t(grid.size());
        for (int i = 0; i < grid.size(); ++i)
            t[i] = spectral::asymptotic_triple_index(out.bundle, grid[i]);
        return t;
    });

    spectral::TheoremInputs in;
    in.H1 = H1;
    in.H2 = H2;
    in.H2prime = H2p;
    in.realness = out.realness;
    in.compactified = out.compactified;
    in.anchored = out.anchored;
    in.boundary = out.boundary;
    in.triple_LR_0 = out.triples_on_grid.front();
    in.triple_LR_C = out.triples_on_grid.back();
    in.counts = out.counts;
    in.flow = out.flow;
    out.report = spectral::verify_theorems(in);

    out.config_hash = fnv1a64(canonical_config_string(config));
    out.report_json = build_report_json(out, config);
    return out;
}

std::string evans_curve_csv(const std::vector<spectral::EvansSample>& samples) {
    std::string out = "lambda,det,intersection_dim\n";
    for (const spectral::EvansSample& s : samples)
        out += fmt17(s.lambda) + "," + fmt17(s.det_value) + "," +
               std::to_string(s.intersection_dim) + "\n";
    return out;
}

std::string principal_angle_csv(const bundle::FrameTrajectory& trajectory) {
    std::string out = "tau,angle\n";
    for (Eigen::Index j = 0; j < trajectory.tau_grid.size(); ++j) {
        const MatrixXd& A = trajectory.Es_frames[j].Z;
        const MatrixXd& B = trajectory.Eu_frames[j].Z;
        Eigen::JacobiSVD<MatrixXd> svd(A.transpose() * B);
        double cosmax = std::min(1.0, svd.singularValues()[0]);
        out += fmt17(trajectory.tau_grid[j]) + "," + fmt17(std::acos(cosmax)) + "\n";
    }
    return out;
}

void write_analyze_outputs(const AnalyzeOutcome& outcome, const RunConfig& config) {
    if (config.out_dir.empty()) return;
    std::filesystem::create_directories(config.out_dir);
    auto put = [&](const std::string& name, const std::string& content) {
        std::string path = config.out_dir + "/" + name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path);
        f << content;
    };
    put("report.json", outcome.report_json.dump(2) + "\n");
    wave::save_profile(*outcome.profile, outcome.system, config.out_dir + "/wave.csv",
                       config.out_dir + "/wave_meta.json");

    std::vector<bundle::CrossingRow> wave_rows;
    for (const symp::CrossingRecord& rec : outcome.compactified.crossings)
        wave_rows.push_back(bundle::make_crossing_row(outcome.compactified.lambda_used, rec));
    if (outcome.anchored)
        for (const symp::CrossingRecord& rec : outcome.anchored->crossings)
            wave_rows.push_back(bundle::make_crossing_row(outcome.anchored->lambda_used, rec));
    put("wave_crossings.csv", bundle::crossing_table_csv(wave_rows));

    std::vector<bundle::CrossingRow> boundary_rows;
    for (const symp::CrossingRecord& rec : outcome.boundary.crossings) {
        bundle::CrossingRow row = bundle::make_crossing_row(rec.t0, rec);
        row.tau = std::numeric_limits<double>::infinity();  // the path lives at the ends
        boundary_rows.push_back(row);
    }
    put("boundary_crossings.csv", bundle::crossing_table_csv(boundary_rows));

    put("evans_det.csv", evans_curve_csv(outcome.sweep));

    bundle::FrameTrajectory tr =
        bundle::evolve_frames(outcome.bundle, outcome.compactified.lambda_used,
                              outcome.bundle.Xi, config.sweep.bundle_steps);
    put("principal_angle.csv", principal_angle_csv(tr));
}

}  // namespace maslov::reporting
