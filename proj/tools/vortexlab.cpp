// vortexlab: command-line front end for the stability and flow experiments.
#include "vortex/errors.hpp"
#include "vortex/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum Exit { ok = 0, bad_input = 2, numerical = 3 };

int fail(const std::string& kind, const std::string& reason, int code) {
    std::string line = reason;
    for (char& c : line)
        if (c == '\n') c = ' ';
    std::cerr << "error: " << kind << ": " << line << '\n';
    return code;
}

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw vortex::ValidationError("cannot read config file " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw vortex::ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
}

void write_file(const fs::path& p, const std::string& contents) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw vortex::ValidationError("cannot write " + p.string());
    out << contents;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent-system vortex experiments on the Riemann sphere"};
    app.require_subcommand(1, 1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> grid_n;
    const std::vector<std::pair<std::string, std::string>> modes = {
        {"stability", "alpha-stability verdict and destabilizing witness"},
        {"walls", "critical alpha values"},
        {"hn", "Harder-Narasimhan filtration"},
        {"solve", "run the vortex flow for one alpha"},
        {"sweep", "solve over an alpha range, one CSV row per alpha"},
        {"deform", "J along the one-parameter deformation of a split system"}};
    for (const auto& [name, help] : modes) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory; the report goes to stdout when omitted");
        sub->add_option("--seed", seed, "random seed override");
        sub->add_option("--grid-n", grid_n, "grid resolution override");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), bad_input);
    }
    std::string mode = app.get_subcommands().front()->get_name();

    try {
        json raw = read_config(config_path);
        if (raw.is_object()) {
            if (raw.contains("mode") && raw["mode"] != mode)
                throw vortex::ValidationError("config mode " + raw["mode"].dump() + " does not match subcommand " + mode);
            raw["mode"] = mode;
            if (seed) raw["seed"] = *seed;
            if (grid_n) raw["grid"]["N"] = *grid_n;
        }
        auto cfg = vortex::parse_config(raw);
        auto run = vortex::run_experiment(cfg);
        json doc = {{"report", run.report}, {"timing", {{"wall_seconds", run.wall_seconds}}}};
        std::string text = doc.dump(2) + "\n";
        if (out_dir.empty()) {
            std::cout << text;
        } else {
            fs::create_directories(out_dir);
            write_file(fs::path(out_dir) / "report.json", text);
            for (const auto& f : run.files) write_file(fs::path(out_dir) / f.name, f.contents);
        }
    } catch (const vortex::ValidationError& e) {
        return fail("validation", e.what(), bad_input);
    } catch (const vortex::NumericalError& e) {
        return fail("numerical", e.what(), numerical);
    } catch (const json::exception& e) {
        return fail("validation", e.what(), bad_input);
    } catch (const std::invalid_argument& e) {
        return fail("validation", e.what(), bad_input);
    }
    return ok;
}
