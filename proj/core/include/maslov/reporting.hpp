#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "maslov/spectral_count.hpp"
#include "maslov/wave_solver.hpp"

namespace maslov {

// A failure inside one pipeline stage, labeled with the stage name so
// drivers can report where the run died.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& what)
        : Error("stage '" + stage + "': " + what), stage_(std::move(stage)) {}
    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

namespace reporting {

// Custom constant end matrices for hypothesis checking without a wave.
struct CustomEnds {
    int n = 0;
    int r = 0;
    Eigen::MatrixXd B_minus;
    Eigen::MatrixXd B_plus;
};

// Knobs for the lambda sweeps and discretizations.
struct SweepConfig {
    int lambda_grid = 60;      // matching-determinant samples on [0, C]
    double delta0 = 1e-4;      // exclusion zone around the translation eigenvalue
    double C_override = -1.0;  // <= 0 means: compute the bound from the profile
    int flow_nodes = 1201;     // grid nodes for the discretized flow
    int flow_samples = 25;     // coarse lambda samples for the flow
    int bundle_steps = 0;      // frame-evolution nodes (0 = library default)
    int lemma31_nodes = 801;   // grid nodes for the block-inequality test
};

struct RunConfig {
    std::optional<model::SkewGradientSystem> system;  // builtin reaction system
    std::optional<CustomEnds> custom;                 // check-only end matrices
    wave::BVPConfig bvp;
    SweepConfig sweep;
    std::string profile_csv;  // nonempty: load this wave instead of solving
    std::string meta_json;
    std::string out_dir;  // nonempty: write report and plot files here
    long seed = 0;        // recorded in provenance; reserved for future use
};

// Parses the strict JSON config format; unknown keys anywhere are rejected.
RunConfig parse_run_config(const std::string& json_text);

// Deterministic serialization of the fields that define the computation
// (out_dir excluded), used for the provenance hash.
std::string canonical_config_string(const RunConfig& config);

std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t h);

// Hypothesis verdicts for one constant end matrix.
struct EndCheck {
    std::string name;  // "minus" or "plus"
    Eigen::VectorXcd eig_QB;
    bool H1 = false;
    bool H2 = false;
    bool H2prime = false;
};

struct CheckOutcome {
    std::vector<EndCheck> ends;
    bool H1 = false;  // conjunction over ends
    bool H2 = false;
    bool H2prime = false;
    std::optional<bool> d_gt_gamma_inv2;
    bool all_hold = false;  // H1 && H2 && H2prime
    nlohmann::ordered_json json;
};

CheckOutcome run_check(const RunConfig& config);

// Everything the full pipeline produced, kept around so tests and the CLI
// can probe intermediate objects without re-running stages.
struct AnalyzeOutcome {
    model::SkewGradientSystem system;  // possibly orientation-flipped
    std::shared_ptr<const wave::WaveProfile> profile;
    model::LinearizedBundle bundle;
    double C = 0.0;
    bool C_overridden = false;
    spectral::RealnessVerdict realness;
    bundle::MaslovResult compactified;
    std::optional<bundle::MaslovResult> anchored;
    bundle::BoundaryPathResult boundary;
    std::vector<spectral::EvansSample> sweep;
    spectral::EigCount counts;
    spectral::SpectralFlowResult flow;
    std::vector<int> triples_on_grid;  // asymptotic triple index per sweep lambda
    spectral::IndexReport report;
    nlohmann::ordered_json report_json;
    std::uint64_t config_hash = 0;
};

// Runs the whole pipeline: wave, hypothesis checks, frame evolution and
// indices, determinant sweep, discretized flow, and identity verdicts.
// Failures carry the stage name via PipelineError.  A wave solved with the
// rest states in the wrong order is retried once with the seeds swapped.
AnalyzeOutcome run_analyze(const RunConfig& config);

// Writes report.json, the wave profile pair, and the plot CSVs into
// config.out_dir (no-op when empty).
void write_analyze_outputs(const AnalyzeOutcome& outcome, const RunConfig& config);

// Plot data: matching determinant against lambda.
std::string evans_curve_csv(const std::vector<spectral::EvansSample>& samples);

// Plot data: smallest principal angle between the paired frames against tau.
std::string principal_angle_csv(const bundle::FrameTrajectory& trajectory);

}  // namespace reporting
}  // namespace maslov
