#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ttv/pipeline.hpp"
#include "ttv/synth.hpp"

namespace {

int parse_grid(const std::string& text, int& gx, int& gy) {
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) return -1;
    try {
        gx = std::stoi(text.substr(0, x));
        gy = std::stoi(text.substr(x + 1));
    } catch (...) {
        return -1;
    }
    if (gx <= 0 || gy <= 0) return -1;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timetable travel-time variability analysis"};
    app.set_version_flag("--version", std::string("ttv ") + ttv::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    int threads_override = 0;
    auto* run = app.add_subcommand("run", "Run the full analysis pipeline");
    run->add_option("--config", config_path, "Run configuration file")->required();
    run->add_option("--out", out_override, "Override the output directory");
    run->add_option("--threads", threads_override, "Override the routing worker count");

    std::string grid = "10x10";
    std::int32_t downtown_headway = 600;
    std::int32_t rural_headway = 3600;
    std::uint64_t seed = 7;
    std::string synth_out = "fixtures";
    auto* synth = app.add_subcommand("synth", "Generate a synthetic test city");
    synth->add_option("--grid", grid, "Grid dimensions, e.g. 10x10");
    synth->add_option("--downtown-headway", downtown_headway, "Downtown headway in seconds");
    synth->add_option("--rural-headway", rural_headway, "Peripheral headway in seconds");
    synth->add_option("--seed", seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output directory");

    std::vector<std::string> run_dirs;
    auto* compare = app.add_subcommand("compare-runs", "Correlate TTV across runs");
    compare->add_option("dirs", run_dirs, "Completed run directories")->expected(-2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            ttv::RunConfig cfg = ttv::parse_run_config(config_path);
            if (!out_override.empty()) cfg.out_dir = out_override;
            if (threads_override > 0) cfg.threads = threads_override;
            const auto result = ttv::run_pipeline(cfg);
            std::size_t zones = 0;
            if (!result.kinds.empty()) zones = result.kinds.begin()->second.zones.size();
            std::cout << "run complete: " << zones << " zones, outputs in "
                      << result.out_dir.string() << "\n";
        } else if (synth->parsed()) {
            ttv::SynthSpec spec;
            if (parse_grid(grid, spec.grid_x, spec.grid_y) != 0) {
                std::cerr << "ttv: invalid --grid '" << grid << "' (expected WxH)\n";
                return 2;
            }
            spec.downtown_headway_s = downtown_headway;
            spec.rural_headway_s = rural_headway;
            spec.seed = seed;
            ttv::generate_synthetic_city(spec, synth_out);
            std::cout << "synthetic city written to " << synth_out << "\n";
        } else if (compare->parsed()) {
            std::vector<std::filesystem::path> dirs(run_dirs.begin(), run_dirs.end());
            const auto comparisons = ttv::compare_runs(dirs);
            std::cout << "kind,run_a,run_b,n,r\n";
            for (const auto& c : comparisons) {
                std::cout << c.kind << "," << c.run_a << "," << c.run_b << "," << c.n << ","
                          << c.r << "\n";
            }
        }
    } catch (const ttv::input_error& e) {
        std::cerr << "ttv: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ttv: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "ttv: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
