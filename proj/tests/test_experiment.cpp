#include "vortex/errors.hpp"
#include "vortex/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace vortex;
using nlohmann::json;

namespace {

json base() {
    return json::parse(R"({"schema_version": 1, "mode": "stability", "system": {"summands": [[1, 1], [1, 1]]}, "alpha": "1"})");
}

Rational q(long p, long d = 1) { return Rational(BigInt(p)) / BigInt(d); }

} // namespace

TEST(ParseConfig, SummandsAndRationalAlpha) {
    auto cfg = parse_config(base());
    ASSERT_TRUE(cfg.summands);
    EXPECT_EQ(cfg.summands->size(), 2u);
    EXPECT_EQ(cfg.alpha->value, q(1));
    EXPECT_FALSE(cfg.alpha->from_decimal);
    EXPECT_EQ(cfg.grid_n, 32);
}

TEST(ParseConfig, DecimalAlphaIsExactAndFlagged) {
    auto j = base();
    j["alpha"] = 0.1;
    auto cfg = parse_config(j);
    EXPECT_EQ(cfg.alpha->value, q(1, 10));
    EXPECT_TRUE(cfg.alpha->from_decimal);
    j["alpha"] = "7/4";
    EXPECT_EQ(parse_config(j).alpha->value, q(7, 4));
}

TEST(ParseConfig, SplitSystemWithComplexCoefficients) {
    json j = json::parse(R"({"schema_version": 1, "mode": "solve", "alpha": "1/2",
        "system": {"split": {"degrees": [1, 0], "sections": [[[1, [0, 2]], [3]]]}},
        "flow": {"exec": "serial", "tol_J": 1e-9}})");
    auto cfg = parse_config(j);
    ASSERT_TRUE(cfg.split);
    EXPECT_EQ(cfg.split->sections[0][0][1], cd(0, 2));
    EXPECT_EQ(cfg.flow.exec, Exec::serial);
    EXPECT_DOUBLE_EQ(cfg.flow.tol_J, 1e-9);
}

TEST(ParseConfig, RejectsBadInput) {
    auto expect_invalid = [](json j) { EXPECT_THROW(parse_config(j), ValidationError) << j.dump(); };
    auto j = base();
    j["colour"] = 1;
    expect_invalid(j);
    j = base();
    j.erase("schema_version");
    expect_invalid(j);
    j = base();
    j["schema_version"] = 2;
    expect_invalid(j);
    j = base();
    j["alpha"] = "0";
    expect_invalid(j);
    j = base();
    j["alpha"] = "one";
    expect_invalid(j);
    j = base();
    j["grid"] = {{"N", 6}};
    expect_invalid(j);
    j = base();
    j["system"]["type"] = json::parse(R"({"d": 1, "r": 1, "k": 0})");
    expect_invalid(j);
    j = base();
    j["alpha_range"] = {{"start", "1"}, {"stop", "2"}, {"step", "0"}};
    expect_invalid(j);
    j = base();
    j["flow"] = {{"backtrack", 2.0}};
    expect_invalid(j);
}

TEST(ParseConfig, RoundTripsThroughResolvedEcho) {
    json j = json::parse(R"({"schema_version": 1, "mode": "deform", "alpha": "3/20",
        "system": {"split": {"degrees": [2, -1], "sections": [[[1, 0, 1], [0]]]}},
        "alpha_range": {"start": "1/2", "stop": "3", "step": "1/4"},
        "grid": {"N": 24, "overlap": 1.25}, "seed": 42, "random_start": true,
        "deform": {"sub": {"degree": 1, "sections": [[1]]}, "quotient": {"degree": 2, "sections": [[1]]},
                   "lifts": [[0, 1]], "lambda": "1/2", "s_values": [0.25, 1.0],
                   "extension": {"amplitude": [0.1, -0.2], "winding": -1}}})");
    json echo = to_json(parse_config(j));
    EXPECT_EQ(to_json(parse_config(echo)), echo);
    EXPECT_EQ(echo["alpha"], "3/20");
    EXPECT_EQ(echo["seed"], 42);
}

TEST(AlphaRangeValues, InclusiveAndEmpty) {
    AlphaRange r{q(19, 10), q(21, 10), q(1, 20)};
    auto v = r.values();
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[2], q(2));
    EXPECT_TRUE((AlphaRange{q(2), q(1), q(1)}.values().empty()));
}

TEST(RunExperiment, StabilityReport) {
    auto out = run_experiment(parse_config(base()));
    EXPECT_EQ(out.report["result"]["verdict"], "strictly-semistable");
    EXPECT_FALSE(out.report["result"]["witness"].is_null());
    EXPECT_EQ(out.report["schema_version"], kSchemaVersion);
    EXPECT_TRUE(out.report["warnings"].empty());
}

TEST(RunExperiment, WallsForType) {
    json j = json::parse(R"({"schema_version": 1, "mode": "walls", "system": {"type": {"d": 2, "r": 2, "k": 1}}})");
    auto walls = run_experiment(parse_config(j)).report["result"]["walls"];
    bool found = false;
    for (const auto& w : walls) found |= w["alpha"] == "2";
    EXPECT_TRUE(found);
}

TEST(RunExperiment, ModeNeedsItsFields) {
    auto j = base();
    j["mode"] = "sweep";
    EXPECT_THROW(run_experiment(parse_config(j)), ValidationError);
    j["mode"] = "deform";
    EXPECT_THROW(run_experiment(parse_config(j)), ValidationError);
    j["mode"] = "explode";
    EXPECT_THROW(run_experiment(parse_config(j)), ValidationError);
}

TEST(Sweep, RowsInAlphaOrderWithWallAnnotation) {
    SplitSystemConfig cfg{{2, 0}, {{{cd(0)}, {cd(1)}}}};
    auto g = build_grid(8, 1.5);
    auto rows = sweep(cfg, AlphaRange{q(3, 2), q(5, 2), q(1, 2)}, g, FlowParams{});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].alpha, q(3, 2));
    EXPECT_EQ(rows[1].verdict, "strictly-semistable");
    EXPECT_TRUE(rows[1].solve.converged);
    EXPECT_EQ(*rows[1].wall, q(2));
    EXPECT_FALSE(rows[0].wall);
    EXPECT_EQ(rows[0].verdict, "unstable");
    EXPECT_EQ(*rows[0].bound, q(1, 2));
    auto csv = sweep_csv(rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "alpha,verdict,J,bound,converged,min_J,status,iterations,wall");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
