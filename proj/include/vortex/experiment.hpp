#pragma once

// Experiment configurations and run reports behind the command-line tool.
// Configs and reports are JSON; exact rationals travel as "p/q" strings.

#include "vortex/deformation.hpp"
#include "vortex/flow_solver.hpp"
#include "vortex/stability.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace vortex {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct AlphaRange {
    Rational start, stop, step;
    std::vector<Rational> values() const; // start, start + step, ... <= stop
};

struct LinePieceSpec {
    int degree = 0;
    std::vector<Polynomial> sections;
};

struct DeformSpec {
    LinePieceSpec sub, quotient;
    std::vector<Polynomial> lifts;
    double lambda = 0.5;
    std::vector<double> s_values;
    cd extension_amplitude = 0; // extension class amplitude * e^{i winding phi}
    int extension_winding = 0;
};

struct ExperimentConfig {
    std::string mode; // stability, walls, hn, solve, sweep, deform

    // exactly one system description
    std::optional<SystemType> type;
    std::optional<DecomposableSystem> summands;
    std::optional<SplitSystemConfig> split;

    std::optional<ParsedRational> alpha;
    std::optional<AlphaRange> alpha_range;
    Rational alpha_max = 4;

    int grid_n = 32;
    double overlap = 1.5;
    FlowParams flow;
    std::uint64_t seed = 1;
    bool random_start = false;
    bool field_dump = false;
    std::optional<DeformSpec> deform;
};

// Throws ValidationError (and RationalParseError) with a one-line reason.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg); // the resolved config

struct OutputFile {
    std::string name;
    std::string contents;
};

struct RunOutput {
    nlohmann::json report; // deterministic part
    double wall_seconds = 0;
    std::vector<OutputFile> files;
};

RunOutput run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    Rational alpha;
    std::string verdict; // stable / strictly-semistable / unstable, or n/a for non-split systems
    std::optional<Rational> bound;
    std::optional<Rational> wall; // a wall within half a step of alpha
    SolveReport solve;
};

// Rows in alpha order; rows run concurrently, each solve serially.
std::vector<SweepRow> sweep(const SplitSystemConfig& cfg, const AlphaRange& range, const SphereGrid& g,
                            FlowParams params);
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string history_csv(const SolveReport& rep);

} // namespace vortex
