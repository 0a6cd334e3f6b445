#include "vortex/experiment.hpp"

#include "vortex/errors.hpp"
#include "vortex/states.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <set>
#include <sstream>

namespace vortex {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw ValidationError(what); }

ParsedRational rational_of(const json& v, const std::string& what) {
    try {
        if (v.is_string()) return parse_rational(v.get<std::string>());
        if (v.is_number_integer()) return {Rational(BigInt(v.get<long long>())), false};
        if (v.is_number_float()) return parse_rational(v.dump());
    } catch (const RationalParseError& e) {
        invalid(what + ": " + e.what());
    }
    invalid(what + " must be a number or a \"p/q\" string");
}

cd complex_of(const json& v, const std::string& what) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    invalid(what + " must be a number or [re, im]");
}

Polynomial polynomial_of(const json& v, const std::string& what) {
    if (!v.is_array()) invalid(what + " must be an array of coefficients");
    Polynomial p;
    for (const auto& c : v) p.push_back(complex_of(c, what));
    return p;
}

int int_of(const json& v, const std::string& what) {
    if (!v.is_number_integer()) invalid(what + " must be an integer");
    return v.get<int>();
}

double real_of(const json& v, const std::string& what) {
    if (!v.is_number()) invalid(what + " must be a number");
    return v.get<double>();
}

void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) invalid(where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) invalid("unknown key \"" + key + "\" in " + where);
}

json complex_json(cd z) { return z.imag() == 0 ? json(z.real()) : json::array({z.real(), z.imag()}); }

json polynomial_json(const Polynomial& p) {
    json out = json::array();
    for (cd c : p) out.push_back(complex_json(c));
    return out;
}

json type_json(const SystemType& t) { return {{"d", t.d}, {"r", t.r}, {"k", t.k}}; }

SystemType type_of_json(const json& v) {
    only_keys(v, {"d", "r", "k"}, "system.type");
    for (const char* key : {"d", "r", "k"})
        if (!v.contains(key)) invalid(std::string("system.type needs \"") + key + "\"");
    SystemType t{int_of(v["d"], "system.type.d"), int_of(v["r"], "system.type.r"), int_of(v["k"], "system.type.k")};
    if (t.r < 1) invalid("system.type.r must be positive");
    if (t.k < 0) invalid("system.type.k must be non-negative");
    return t;
}

LinePieceSpec piece_of_json(const json& v, const std::string& where) {
    only_keys(v, {"degree", "sections"}, where);
    if (!v.contains("degree")) invalid(where + " needs \"degree\"");
    LinePieceSpec p;
    p.degree = int_of(v["degree"], where + ".degree");
    if (v.contains("sections")) {
        if (!v["sections"].is_array()) invalid(where + ".sections must be an array");
        for (const auto& s : v["sections"]) p.sections.push_back(polynomial_of(s, where + ".sections"));
    }
    return p;
}

json piece_json(const LinePieceSpec& p) {
    json secs = json::array();
    for (const auto& s : p.sections) secs.push_back(polynomial_json(s));
    return {{"degree", p.degree}, {"sections", secs}};
}

SplitSystemConfig line_config(const LinePieceSpec& p) {
    SplitSystemConfig cfg{{p.degree}, {}};
    for (const auto& s : p.sections) cfg.sections.push_back({s});
    return cfg;
}

json subobject_json(const IndexedSubobject& s) { return {{"indices", s.indices}, {"type", type_json(s.type)}}; }

json walls_json(const std::vector<Wall>& ws) {
    json out = json::array();
    for (const auto& w : ws) {
        json subs = json::array();
        for (const auto& t : w.subobjects) subs.push_back(type_json(t));
        out.push_back({{"alpha", to_string(w.alpha)}, {"subobjects", subs}});
    }
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void require_finite(double x, const std::string& what) {
    if (!std::isfinite(x)) throw NumericalError("NaN detected in " + what);
}

json solve_json(const SolveReport& rep) {
    require_finite(rep.J, "J");
    json out = {{"converged", rep.converged},
                {"status", to_string(rep.status)},
                {"J", rep.J},
                {"l2", rep.l2},
                {"sup_residual", rep.sup_residual},
                {"gram_residual", rep.gram_residual},
                {"min_J", rep.min_J},
                {"iterations", rep.iterations}};
    out["lower_bound"] = rep.lower_bound ? json(to_string(*rep.lower_bound)) : json(nullptr);
    out["margin"] = rep.margin ? json(*rep.margin) : json(nullptr);
    return out;
}

DecomposableSystem decomposable_or_fail(const ExperimentConfig& cfg) {
    if (cfg.summands) return *cfg.summands;
    if (cfg.split) {
        if (auto d = cfg.split->decomposition()) return *d;
        invalid("mode " + cfg.mode + " needs every section in a single summand");
    }
    invalid("mode " + cfg.mode + " needs a summand list");
}

AlphaParam alpha_or_fail(const ExperimentConfig& cfg) {
    if (!cfg.alpha) invalid("mode " + cfg.mode + " needs \"alpha\"");
    return AlphaParam(cfg.alpha->value);
}

SplitSystemConfig split_or_fail(const ExperimentConfig& cfg) {
    if (cfg.split) return *cfg.split;
    if (cfg.summands) {
        // monomial sections 1, z, z^2, ... in each summand
        SplitSystemConfig out;
        int r = static_cast<int>(cfg.summands->size());
        for (const auto& s : cfg.summands->summands()) out.degrees.push_back(static_cast<int>(s.degree));
        for (int i = 0; i < r; ++i)
            for (int n = 0; n < cfg.summands->summands()[i].sections; ++n) {
                SectionVector v(r, Polynomial{cd(0)});
                v[i] = Polynomial(n + 1, cd(0));
                v[i][n] = 1;
                out.sections.push_back(v);
            }
        return out;
    }
    invalid("mode " + cfg.mode + " needs a split system or a summand list");
}

json run_stability(const ExperimentConfig& cfg) {
    auto sys = decomposable_or_fail(cfg);
    auto alpha = alpha_or_fail(cfg);
    auto res = stability_verdict(sys, alpha);
    json out = {{"verdict", to_string(res.verdict)},
                {"total_slope", to_string(res.total_slope)},
                {"generic", is_generic(alpha, sys.type())}};
    if (res.witness) {
        out["witness"] = subobject_json(*res.witness);
        out["witness"]["slope"] = to_string(*res.witness_slope);
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json run_hn(const ExperimentConfig& cfg) {
    auto sys = decomposable_or_fail(cfg);
    auto alpha = alpha_or_fail(cfg);
    auto f = hn_filtration(sys, alpha);
    json steps = json::array();
    for (std::size_t i = 0; i < f.steps.size(); ++i)
        steps.push_back({{"type", type_json(f.steps[i])},
                         {"indices", f.index_sets[i]},
                         {"quotient_slope", to_string(f.quotient_slopes[i])}});
    auto verdict = stability_verdict(sys, alpha).verdict;
    json out = {{"verdict", to_string(verdict)}, {"steps", steps}};
    if (verdict != Verdict::unstable) {
        json factors = json::array();
        for (const auto& t : seshadri_graded(sys, alpha)) factors.push_back(type_json(t));
        out["seshadri"] = factors;
    }
    return out;
}

json run_walls(const ExperimentConfig& cfg) {
    if (cfg.type) return {{"walls", walls_json(walls(*cfg.type, cfg.alpha_max))}, {"family", "numerical subtypes"}};
    return {{"walls", walls_json(walls(decomposable_or_fail(cfg)))}, {"family", "summand subobjects"}};
}

RunOutput run_solve(const ExperimentConfig& cfg) {
    auto split = split_or_fail(cfg);
    auto alpha = alpha_or_fail(cfg);
    auto g = build_grid(cfg.grid_n, cfg.overlap);
    std::optional<MatrixField> start;
    if (cfg.random_start) start = random_smooth_state(split, g, cfg.seed);
    auto rep = solve_vortex(split, alpha, g, cfg.flow, start ? &*start : nullptr);
    RunOutput out;
    out.report = solve_json(rep);
    out.files.push_back({"history.csv", history_csv(rep)});
    if (cfg.field_dump) {
        auto dev = moment_map_deviation(split, rep.S, alpha, g);
        std::vector<ComplexField> store;
        std::vector<DumpColumn> cols;
        int r = split.rank();
        store.reserve(2 * r * r);
        for (int p = 0; p < r; ++p)
            for (int q = p; q < r; ++q) {
                store.push_back(rep.S.entry(p, q));
                cols.push_back({"S_" + std::to_string(p) + std::to_string(q), nullptr, split.charge(p, q)});
                store.push_back(dev.entry(p, q));
                cols.push_back({"dev_" + std::to_string(p) + std::to_string(q), nullptr, split.charge(p, q)});
            }
        for (std::size_t i = 0; i < cols.size(); ++i) cols[i].values = &store[i];
        std::ostringstream os;
        dump_fields_csv(os, g, cols);
        out.files.push_back({"fields.csv", os.str()});
    }
    return out;
}

RunOutput run_sweep(const ExperimentConfig& cfg) {
    if (!cfg.alpha_range) invalid("mode sweep needs \"alpha_range\"");
    auto split = split_or_fail(cfg);
    auto g = build_grid(cfg.grid_n, cfg.overlap);
    auto rows = sweep(split, *cfg.alpha_range, g, cfg.flow);
    RunOutput out;
    json list = json::array();
    for (const auto& row : rows) {
        json j = solve_json(row.solve);
        j["alpha"] = to_string(row.alpha);
        j["verdict"] = row.verdict;
        j["bound"] = row.bound ? json(to_string(*row.bound)) : json(nullptr);
        j["wall"] = row.wall ? json(to_string(*row.wall)) : json(nullptr);
        list.push_back(j);
    }
    out.report = {{"rows", list}};
    out.files.push_back({"sweep.csv", sweep_csv(rows)});
    return out;
}

RunOutput run_deform(const ExperimentConfig& cfg) {
    if (!cfg.deform) invalid("mode deform needs \"deform\"");
    const auto& d = *cfg.deform;
    auto alpha = alpha_or_fail(cfg);
    auto g = build_grid(cfg.grid_n, cfg.overlap);
    DeformationInput in;
    json pieces;
    for (int i = 0; i < 2; ++i) {
        auto pc = line_config(i == 0 ? d.sub : d.quotient);
        auto rep = solve_vortex(pc, alpha, g, cfg.flow);
        (i == 0 ? in.sub : in.quotient) = LinePiece{pc, rep.S};
        pieces[i == 0 ? "sub" : "quotient"] = {{"J", rep.J}, {"iterations", rep.iterations}, {"converged", rep.converged}};
    }
    in.lifts = d.lifts;
    in.lambda = d.lambda;
    if (d.extension_amplitude != cd(0)) {
        in.extension.resize(g.cells());
        for (int c = 0; c < g.cells(); ++c)
            in.extension[c] = d.extension_amplitude * std::polar(1.0, d.extension_winding * g.phi[g.col(c)]);
    }
    auto fam = build_deformation(in, alpha, g);
    int k = fam.k_sub() + fam.k_quotient();
    json curve = json::array();
    std::ostringstream csv;
    csv << "s,J,J_frame,predicted_k,predicted_k2,predicted_2k2\n";
    for (double s : d.s_values) {
        double J = deform_at(fam, s).J, Jf = deform_at(fam, s, DeviationPath::frame).J;
        require_finite(J, "j_curve");
        double pk = predicted_j(fam, s, k), pk2 = predicted_j(fam, s, fam.k_quotient()),
               p2k2 = predicted_j(fam, s, 2.0 * fam.k_quotient());
        curve.push_back({{"s", s}, {"J", J}, {"J_frame", Jf}, {"predicted_k", pk}, {"predicted_k2", pk2},
                         {"predicted_2k2", p2k2}});
        csv << fmt(s) << ',' << fmt(J) << ',' << fmt(Jf) << ',' << fmt(pk) << ',' << fmt(pk2) << ',' << fmt(p2k2) << '\n';
    }
    RunOutput out;
    out.report = {{"gap", to_string(fam.gap)},
                  {"tau", fam.tau},
                  {"pieces", pieces},
                  {"extension_norm2", fam.extension_norm2},
                  {"gauge", {{"residual", fam.gauge.residual},
                             {"min_eigenvalue", fam.gauge.min_eigenvalue},
                             {"iterations", fam.gauge.iterations}}},
                  {"curve", curve}};
    out.files.push_back({"j_curve.csv", csv.str()});
    return out;
}

} // namespace

std::vector<Rational> AlphaRange::values() const {
    std::vector<Rational> out;
    for (Rational a = start; a <= stop; a += step) out.push_back(a);
    return out;
}

ExperimentConfig parse_config(const json& j) {
    only_keys(j, {"schema_version", "mode", "system", "alpha", "alpha_range", "alpha_max", "grid", "flow", "seed",
                  "random_start", "field_dump", "deform"},
              "config");
    if (!j.contains("schema_version")) invalid("config needs \"schema_version\"");
    if (j["schema_version"] != kSchemaVersion)
        invalid("unsupported schema_version " + j["schema_version"].dump() + ", expected " + std::to_string(kSchemaVersion));
    ExperimentConfig cfg;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) invalid("mode must be a string");
        cfg.mode = j["mode"].get<std::string>();
    }

    if (j.contains("system")) {
        const auto& s = j["system"];
        only_keys(s, {"type", "summands", "split"}, "system");
        if (s.size() != 1) invalid("system needs exactly one of type, summands, split");
        if (s.contains("type")) cfg.type = type_of_json(s["type"]);
        if (s.contains("summands")) {
            if (!s["summands"].is_array()) invalid("system.summands must be an array of [degree, sections]");
            std::vector<Summand> list;
            for (const auto& e : s["summands"]) {
                if (!e.is_array() || e.size() != 2) invalid("system.summands entries must be [degree, sections]");
                list.push_back({int_of(e[0], "summand degree"), int_of(e[1], "summand sections")});
            }
            cfg.summands = DecomposableSystem(list);
        }
        if (s.contains("split")) {
            const auto& sp = s["split"];
            only_keys(sp, {"degrees", "sections"}, "system.split");
            if (!sp.contains("degrees") || !sp["degrees"].is_array()) invalid("system.split needs \"degrees\"");
            SplitSystemConfig c;
            for (const auto& a : sp["degrees"]) c.degrees.push_back(int_of(a, "system.split.degrees"));
            if (sp.contains("sections")) {
                if (!sp["sections"].is_array()) invalid("system.split.sections must be an array");
                for (const auto& sec : sp["sections"]) {
                    if (!sec.is_array()) invalid("each section is an array of per-summand polynomials");
                    SectionVector v;
                    for (const auto& p : sec) v.push_back(polynomial_of(p, "section component"));
                    if (static_cast<int>(v.size()) != c.rank())
                        invalid("section has " + std::to_string(v.size()) + " components for " +
                                std::to_string(c.rank()) + " summands");
                    c.sections.push_back(v);
                }
            }
            c.validate();
            cfg.split = c;
        }
    }

    if (j.contains("alpha")) {
        cfg.alpha = rational_of(j["alpha"], "alpha");
        AlphaParam check(cfg.alpha->value);
    }
    if (j.contains("alpha_range")) {
        const auto& r = j["alpha_range"];
        only_keys(r, {"start", "stop", "step"}, "alpha_range");
        for (const char* key : {"start", "stop", "step"})
            if (!r.contains(key)) invalid(std::string("alpha_range needs \"") + key + "\"");
        AlphaRange ar{rational_of(r["start"], "alpha_range.start").value, rational_of(r["stop"], "alpha_range.stop").value,
                      rational_of(r["step"], "alpha_range.step").value};
        if (ar.step <= 0) invalid("alpha_range.step must be positive");
        if (ar.start <= 0) throw InfeasibleParameterError("alpha_range.start must be positive");
        cfg.alpha_range = ar;
    }
    if (j.contains("alpha_max")) {
        cfg.alpha_max = rational_of(j["alpha_max"], "alpha_max").value;
        if (cfg.alpha_max <= 0) throw InfeasibleParameterError("alpha_max must be positive");
    }
    if (j.contains("grid")) {
        only_keys(j["grid"], {"N", "overlap"}, "grid");
        if (j["grid"].contains("N")) cfg.grid_n = int_of(j["grid"]["N"], "grid.N");
        if (j["grid"].contains("overlap")) cfg.overlap = real_of(j["grid"]["overlap"], "grid.overlap");
    }
    if (cfg.grid_n < 8) invalid("grid.N must be at least 8");
    if (j.contains("flow")) {
        const auto& f = j["flow"];
        only_keys(f, {"step", "max_step", "backtrack", "armijo", "tol_a", "tol_J", "max_iterations", "stall_window",
                      "stall_tolerance", "shift", "divergence_limit", "exec"},
                  "flow");
        auto& p = cfg.flow;
        if (f.contains("step")) p.step = real_of(f["step"], "flow.step");
        if (f.contains("max_step")) p.max_step = real_of(f["max_step"], "flow.max_step");
        if (f.contains("backtrack")) p.backtrack = real_of(f["backtrack"], "flow.backtrack");
        if (f.contains("armijo")) p.armijo = real_of(f["armijo"], "flow.armijo");
        if (f.contains("tol_a")) p.tol_a = real_of(f["tol_a"], "flow.tol_a");
        if (f.contains("tol_J")) p.tol_J = real_of(f["tol_J"], "flow.tol_J");
        if (f.contains("max_iterations")) p.max_iterations = int_of(f["max_iterations"], "flow.max_iterations");
        if (f.contains("stall_window")) p.stall_window = int_of(f["stall_window"], "flow.stall_window");
        if (f.contains("stall_tolerance")) p.stall_tolerance = real_of(f["stall_tolerance"], "flow.stall_tolerance");
        if (f.contains("shift")) p.shift = real_of(f["shift"], "flow.shift");
        if (f.contains("divergence_limit")) p.divergence_limit = real_of(f["divergence_limit"], "flow.divergence_limit");
        if (f.contains("exec")) {
            auto e = f["exec"].is_string() ? f["exec"].get<std::string>() : "";
            if (e == "serial") p.exec = Exec::serial;
            else if (e == "parallel") p.exec = Exec::parallel;
            else invalid("flow.exec must be \"serial\" or \"parallel\"");
        }
        p.validate();
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) invalid("seed must be a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("random_start")) {
        if (!j["random_start"].is_boolean()) invalid("random_start must be a boolean");
        cfg.random_start = j["random_start"].get<bool>();
    }
    if (j.contains("field_dump")) {
        if (!j["field_dump"].is_boolean()) invalid("field_dump must be a boolean");
        cfg.field_dump = j["field_dump"].get<bool>();
    }
    if (j.contains("deform")) {
        const auto& d = j["deform"];
        only_keys(d, {"sub", "quotient", "lifts", "lambda", "s_values", "extension"}, "deform");
        for (const char* key : {"sub", "quotient", "lifts", "s_values"})
            if (!d.contains(key)) invalid(std::string("deform needs \"") + key + "\"");
        DeformSpec spec;
        spec.sub = piece_of_json(d["sub"], "deform.sub");
        spec.quotient = piece_of_json(d["quotient"], "deform.quotient");
        if (!d["lifts"].is_array()) invalid("deform.lifts must be an array");
        for (const auto& p : d["lifts"]) spec.lifts.push_back(polynomial_of(p, "deform.lifts"));
        if (d.contains("lambda")) spec.lambda = to_double(rational_of(d["lambda"], "deform.lambda").value);
        if (!d["s_values"].is_array()) invalid("deform.s_values must be an array");
        for (const auto& s : d["s_values"]) spec.s_values.push_back(real_of(s, "deform.s_values"));
        if (d.contains("extension")) {
            only_keys(d["extension"], {"amplitude", "winding"}, "deform.extension");
            if (d["extension"].contains("amplitude"))
                spec.extension_amplitude = complex_of(d["extension"]["amplitude"], "deform.extension.amplitude");
            if (d["extension"].contains("winding"))
                spec.extension_winding = int_of(d["extension"]["winding"], "deform.extension.winding");
        }
        cfg.deform = spec;
    }
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json j = {{"schema_version", kSchemaVersion}, {"mode", cfg.mode}};
    json sys = json::object();
    if (cfg.type) sys["type"] = type_json(*cfg.type);
    if (cfg.summands) {
        json list = json::array();
        for (const auto& s : cfg.summands->summands()) list.push_back({s.degree, s.sections});
        sys["summands"] = list;
    }
    if (cfg.split) {
        json secs = json::array();
        for (const auto& v : cfg.split->sections) {
            json comps = json::array();
            for (const auto& p : v) comps.push_back(polynomial_json(p));
            secs.push_back(comps);
        }
        sys["split"] = {{"degrees", cfg.split->degrees}, {"sections", secs}};
    }
    j["system"] = sys;
    j["alpha"] = cfg.alpha ? json(to_string(cfg.alpha->value)) : json(nullptr);
    if (cfg.alpha_range)
        j["alpha_range"] = {{"start", to_string(cfg.alpha_range->start)},
                            {"stop", to_string(cfg.alpha_range->stop)},
                            {"step", to_string(cfg.alpha_range->step)}};
    j["alpha_max"] = to_string(cfg.alpha_max);
    j["grid"] = {{"N", cfg.grid_n}, {"overlap", cfg.overlap}};
    const auto& p = cfg.flow;
    j["flow"] = {{"step", p.step},
                 {"max_step", p.max_step},
                 {"backtrack", p.backtrack},
                 {"armijo", p.armijo},
                 {"tol_a", p.tol_a},
                 {"tol_J", p.tol_J},
                 {"max_iterations", p.max_iterations},
                 {"stall_window", p.stall_window},
                 {"stall_tolerance", p.stall_tolerance},
                 {"shift", p.shift},
                 {"divergence_limit", p.divergence_limit},
                 {"exec", p.exec == Exec::serial ? "serial" : "parallel"}};
    j["seed"] = cfg.seed;
    j["random_start"] = cfg.random_start;
    j["field_dump"] = cfg.field_dump;
    if (cfg.deform) {
        const auto& d = *cfg.deform;
        json lifts = json::array();
        for (const auto& l : d.lifts) lifts.push_back(polynomial_json(l));
        j["deform"] = {{"sub", piece_json(d.sub)},
                       {"quotient", piece_json(d.quotient)},
                       {"lifts", lifts},
                       {"lambda", d.lambda},
                       {"s_values", d.s_values},
                       {"extension", {{"amplitude", complex_json(d.extension_amplitude)}, {"winding", d.extension_winding}}}};
    }
    return j;
}

RunOutput run_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    RunOutput out;
    json result;
    if (cfg.mode == "stability") result = run_stability(cfg);
    else if (cfg.mode == "hn") result = run_hn(cfg);
    else if (cfg.mode == "walls") result = run_walls(cfg);
    else {
        RunOutput part;
        if (cfg.mode == "solve") part = run_solve(cfg);
        else if (cfg.mode == "sweep") part = run_sweep(cfg);
        else if (cfg.mode == "deform") part = run_deform(cfg);
        else invalid("unknown mode \"" + cfg.mode + "\"");
        result = std::move(part.report);
        out.files = std::move(part.files);
    }
    json warnings = json::array();
    if (cfg.alpha && cfg.alpha->from_decimal && (cfg.mode == "stability" || cfg.mode == "hn"))
        warnings.push_back("alpha given as a decimal, converted exactly to " + to_string(cfg.alpha->value));
    out.report = {{"schema_version", kSchemaVersion},
                  {"tool_version", kToolVersion},
                  {"mode", cfg.mode},
                  {"config", to_json(cfg)},
                  {"result", result},
                  {"warnings", warnings}};
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::vector<SweepRow> sweep(const SplitSystemConfig& cfg, const AlphaRange& range, const SphereGrid& g,
                            FlowParams params) {
    cfg.validate();
    auto alphas = range.values();
    std::vector<SweepRow> rows(alphas.size());
    auto sys = cfg.decomposition();
    auto ws = sys ? walls(*sys) : walls(cfg.type(), range.stop);
    params.exec = Exec::serial;
    std::vector<std::exception_ptr> errors(alphas.size());
    int n = static_cast<int>(alphas.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            AlphaParam a(alphas[i]);
            SweepRow& row = rows[i];
            row.alpha = alphas[i];
            row.verdict = "n/a";
            if (sys) {
                row.verdict = to_string(stability_verdict(*sys, a).verdict);
                if (auto ob = decomposable_obstruction(*sys, a)) row.bound = ob->bound;
            }
            for (const auto& w : ws)
                if (abs(w.alpha - alphas[i]) * 2 <= range.step) {
                    row.wall = w.alpha;
                    break;
                }
            row.solve = solve_vortex(cfg, a, g, params);
            row.solve.history.clear();
            row.solve.S = MatrixField();
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "alpha,verdict,J,bound,converged,min_J,status,iterations,wall\n";
    for (const auto& r : rows)
        os << to_string(r.alpha) << ',' << r.verdict << ',' << fmt(r.solve.J) << ','
           << (r.bound ? to_string(*r.bound) : "") << ',' << (r.solve.converged ? "true" : "false") << ','
           << fmt(r.solve.min_J) << ',' << to_string(r.solve.status) << ',' << r.solve.iterations << ','
           << (r.wall ? to_string(*r.wall) : "") << '\n';
    return os.str();
}

std::string history_csv(const SolveReport& rep) {
    std::ostringstream os;
    os << "iteration,J,l2,sup_residual,step\n";
    for (const auto& h : rep.history)
        os << h.iteration << ',' << fmt(h.J) << ',' << fmt(h.l2) << ',' << fmt(h.sup_residual) << ',' << fmt(h.step) << '\n';
    return os.str();
}

} // namespace vortex
