// Command-line driver: hypothesis checks, front solving, and the full
// index/counting pipeline with report and plot-data output.
//
// Exit codes: 0 success, 1 hypothesis failure, 2 invalid configuration,
// 3 pipeline error, 4 identity-check failure.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "maslov/reporting.hpp"
#include "maslov/system_model.hpp"
#include "maslov/wave_solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitHypothesis = 1;
constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;
constexpr int kExitIdentity = 4;

struct Flags {
    std::string config_path;
    std::string system_name;
    double a = 0.25;
    double gamma = 10.0;
    double d = 1.0;
    double xi_max = 0.0;
    int nodes = 0;
    int lambda_grid = 0;
    double delta0 = 0.0;
    std::string profile_path;
    std::string meta_path;
    std::string out_dir;
    long seed = 0;
};

void add_common_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON run configuration file");
    sub->add_option("--system", f.system_name, "builtin system name (fhn)");
    sub->add_option("--a", f.a, "FHN threshold parameter");
    sub->add_option("--gamma", f.gamma, "FHN slow-field strength");
    sub->add_option("--d", f.d, "FHN activator diffusion");
    sub->add_option("--xi-max", f.xi_max, "domain half-length");
    sub->add_option("--nodes", f.nodes, "profile grid nodes");
    sub->add_option("--lambda-grid", f.lambda_grid, "determinant sweep samples");
    sub->add_option("--delta0", f.delta0, "exclusion zone around lambda = 0");
    sub->add_option("--profile", f.profile_path, "stored wave CSV to load");
    sub->add_option("--meta", f.meta_path, "sidecar JSON for --profile");
    sub->add_option("--out", f.out_dir, "output directory");
    sub->add_option("--seed", f.seed, "recorded in provenance");
}

// Builds the run configuration: the config file first, explicit flags on top.
maslov::reporting::RunConfig build_config(const CLI::App* sub, const Flags& f) {
    maslov::reporting::RunConfig cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path, std::ios::binary);
        if (!in) throw maslov::InputError("cannot read config file " + f.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        cfg = maslov::reporting::parse_run_config(ss.str());
    }
    bool system_touched = sub->count("--system") || sub->count("--a") ||
                          sub->count("--gamma") || sub->count("--d");
    if (system_touched) {
        if (!f.system_name.empty() && f.system_name != "fhn")
            throw maslov::InputError("unknown builtin system '" + f.system_name + "'");
        double a = f.a, g = f.gamma, d = f.d;
        if (cfg.system && cfg.system->label == "fhn") {
            if (!sub->count("--a")) a = cfg.system->params.at("a");
            if (!sub->count("--gamma")) g = cfg.system->params.at("gamma");
            if (!sub->count("--d")) d = cfg.system->params.at("d");
        }
        cfg.custom.reset();
        cfg.system = maslov::model::make_fhn_system(a, g, d);
    }
    if (!cfg.system && !cfg.custom) cfg.system = maslov::model::make_fhn_system();
    if (sub->count("--xi-max")) cfg.bvp.Xi = f.xi_max;
    if (sub->count("--nodes")) cfg.bvp.nodes = f.nodes;
    if (sub->count("--lambda-grid")) cfg.sweep.lambda_grid = f.lambda_grid;
    if (sub->count("--delta0")) cfg.sweep.delta0 = f.delta0;
    if (sub->count("--profile")) cfg.profile_csv = f.profile_path;
    if (sub->count("--meta")) cfg.meta_json = f.meta_path;
    if (sub->count("--out")) cfg.out_dir = f.out_dir;
    if (sub->count("--seed")) cfg.seed = f.seed;
    if (cfg.profile_csv.empty() != cfg.meta_json.empty())
        throw maslov::InputError("--profile and --meta must be given together");
    return cfg;
}

int cmd_check(const maslov::reporting::RunConfig& cfg) {
    maslov::reporting::CheckOutcome out = maslov::reporting::run_check(cfg);
    for (const auto& ec : out.ends) {
        std::printf("end %-5s  H1=%s H2=%s H2'=%s  eig(QB) =", ec.name.c_str(),
                    ec.H1 ? "true" : "false", ec.H2 ? "true" : "false",
                    ec.H2prime ? "true" : "false");
        for (int i = 0; i < ec.eig_QB.size(); ++i)
            std::printf(" (%.12g%+.12gi)", ec.eig_QB[i].real(), ec.eig_QB[i].imag());
        std::printf("\n");
    }
    if (out.d_gt_gamma_inv2)
        std::printf("d > gamma^-2: %s\n", *out.d_gt_gamma_inv2 ? "true" : "false");
    std::printf("overall: H1=%s H2=%s H2'=%s\n", out.H1 ? "true" : "false",
                out.H2 ? "true" : "false", out.H2prime ? "true" : "false");
    std::cout << out.json.dump(2) << "\n";
    return out.all_hold ? kExitOk : kExitHypothesis;
}

int cmd_solve_wave(maslov::reporting::RunConfig cfg) {
    if (!cfg.system) throw maslov::InputError("solve-wave needs a builtin system");
    maslov::model::SkewGradientSystem system = *cfg.system;
    maslov::wave::WaveProfile profile;
    try {
        profile = maslov::wave::solve_front(system, cfg.bvp);
    } catch (const maslov::OrientationError&) {
        std::swap(system.rest_seeds[0], system.rest_seeds[1]);
        profile = maslov::wave::solve_front(system, cfg.bvp);
    }
    std::string dir = cfg.out_dir.empty() ? "." : cfg.out_dir;
    maslov::wave::save_profile(profile, system, dir + "/wave.csv", dir + "/wave_meta.json");
    std::printf("c = %.12g  residual = %.3e  nodes = %d  Xi = %g\n", profile.c,
                profile.residual_norm, static_cast<int>(profile.xi.size()), cfg.bvp.Xi);
    std::printf("wrote %s/wave.csv and %s/wave_meta.json\n", dir.c_str(), dir.c_str());
    return kExitOk;
}

int cmd_analyze(const maslov::reporting::RunConfig& cfg) {
    maslov::reporting::AnalyzeOutcome out = maslov::reporting::run_analyze(cfg);
    maslov::reporting::write_analyze_outputs(out, cfg);
    const maslov::spectral::IndexReport& r = out.report;
    std::printf("wave: c = %.12g, residual = %.3e\n", out.profile->c,
                out.profile->residual_norm);
    std::printf("hypotheses: H1=%s H2=%s H2'=%s realness=%s\n", r.H1 ? "true" : "false",
                r.H2 ? "true" : "false", r.H2prime ? "true" : "false",
                out.realness.holds ? "true" : "false");
    std::printf("wave index (compactified pair) = %d\n", r.index_compactified);
    if (r.index_anchored)
        std::printf("wave index (anchored, tau0 = %g) = %d\n", *r.tau0_used, *r.index_anchored);
    else
        std::printf("wave index (anchored): no usable waypoint found\n");
    std::printf("boundary index = %d, asymptotic triples = %d / %d\n", r.boundary_index,
                r.triple_LR_0, r.triple_LR_C);
    std::printf("counts: N+ = %d, Nbar+ = %d, sf = %d (C = %.6g)\n", r.N_plus, r.N_bar_plus,
                r.sf_S, out.C);
    auto line = [](const char* what, maslov::spectral::CheckStatus s) {
        std::printf("identity %-28s %s\n", what, maslov::spectral::to_string(s));
    };
    line("bound with boundary term:", r.bound_with_boundary_term);
    line("plain index bound:", r.bound_plain);
    line("count equals index:", r.count_equals_index);
    line("definitions agree:", r.definitions_agree);
    line("flow decomposition:", r.flow_decomposition);
    if (!cfg.out_dir.empty()) std::printf("report written to %s/report.json\n", cfg.out_dir.c_str());
    return r.all_applicable_pass() ? kExitOk : kExitIdentity;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"traveling-wave stability indices for skew-gradient systems"};
    app.require_subcommand(1);
    Flags f;
    CLI::App* check = app.add_subcommand("check", "verify end-state hypotheses");
    CLI::App* solve = app.add_subcommand("solve-wave", "solve the front and store it");
    CLI::App* analyze = app.add_subcommand("analyze", "run the full index pipeline");
    for (CLI::App* sub : {check, solve, analyze}) add_common_flags(sub, f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    maslov::reporting::RunConfig cfg;
    try {
        cfg = build_config(sub, f);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    }

    try {
        if (sub == check) return cmd_check(cfg);
        if (sub == solve) return cmd_solve_wave(cfg);
        return cmd_analyze(cfg);
    } catch (const maslov::InputError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const maslov::PipelineError& e) {
        std::fprintf(stderr, "pipeline error in %s: %s\n", e.stage().c_str(), e.what());
        return kExitPipeline;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "pipeline error: %s\n", e.what());
        return kExitPipeline;
    }
}
