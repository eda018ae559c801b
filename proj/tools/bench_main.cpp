#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "otrp/bench.hpp"

namespace {

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

// "11..30" (inclusive range), "11,14,30" (list) or a single count.
std::vector<int> parse_waypoints(const std::string& s) {
    std::vector<int> out;
    const auto dots = s.find("..");
    if (dots != std::string::npos) {
        const int lo = std::stoi(s.substr(0, dots));
        const int hi = std::stoi(s.substr(dots + 2));
        if (hi < lo) throw CLI::ValidationError("--waypoints: empty range " + s);
        for (int w = lo; w <= hi; ++w) out.push_back(w);
        return out;
    }
    size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? s.npos : comma - pos);
        out.push_back(std::stoi(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
    std::vector<std::uint64_t> out;
    size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? s.npos : comma - pos);
        out.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw CLI::ValidationError("cannot write " + out_path);
        out << j.dump(2) << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Corridor trajectory benchmark harness"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Sweep waypoint counts x seeds and write a result suite");
    std::string run_config, run_out, run_seeds, run_waypoints = "11..30", run_mode;
    run->add_option("--config", run_config, "config JSON path")->required();
    run->add_option("--out", run_out, "output directory")->required();
    run->add_option("--seeds", run_seeds, "comma-separated seed list (default: config seed + 0..4)");
    run->add_option("--waypoints", run_waypoints, "waypoint counts, e.g. 11..30 or 12,16,20");
    run->add_option("--mode", run_mode, "block update mode: single | exact");

    auto* gen = app.add_subcommand("gen-env", "Generate a rooms environment and print it as JSON");
    std::vector<int> gen_shape{3, 3, 2};
    std::vector<double> gen_room{4.0, 4.0, 3.0};
    double gen_door = 1.2;
    int gen_ppw = 40;
    std::uint64_t gen_seed = 1;
    std::string gen_out;
    gen->add_option("--shape", gen_shape, "rooms per axis")->expected(3);
    gen->add_option("--room", gen_room, "room size per axis")->expected(3);
    gen->add_option("--door", gen_door, "door side length");
    gen->add_option("--ppw", gen_ppw, "collision points per shared wall");
    gen->add_option("--seed", gen_seed, "sampling seed");
    gen->add_option("--out", gen_out, "output file (default stdout)");

    auto* single = app.add_subcommand("single", "Run one trial from a scenario config");
    std::string single_scenario, single_out;
    single->add_option("--scenario", single_scenario, "config JSON path")->required();
    single->add_option("--out", single_out, "output file (default stdout)");

    auto* validate = app.add_subcommand("validate", "Re-check containment and KKT of a stored trial");
    std::string validate_path;
    validate->add_option("trial", validate_path, "trial JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            otrp::bench::BenchConfig cfg = otrp::bench::BenchConfig::from_json(load_json(run_config));
            if (!run_mode.empty()) cfg.solver.block_mode = otrp::block_mode_from_string(run_mode);
            std::vector<std::uint64_t> seeds;
            if (run_seeds.empty())
                for (std::uint64_t k = 0; k < 5; ++k) seeds.push_back(cfg.seed + k);
            else
                seeds = parse_seeds(run_seeds);
            const auto summary =
                otrp::bench::run_suite(cfg, parse_waypoints(run_waypoints), seeds, run_out);
            std::cout << summary.to_json().dump(2) << std::endl;
            return 0;
        }
        if (*gen) {
            const auto grid = otrp::bench::generate_environment(
                {gen_shape[0], gen_shape[1], gen_shape[2]},
                Eigen::Vector3d(gen_room[0], gen_room[1], gen_room[2]), gen_door, gen_ppw, gen_seed);
            emit(grid.to_json(), gen_out);
            return 0;
        }
        if (*single) {
            const otrp::bench::BenchConfig cfg =
                otrp::bench::BenchConfig::from_json(load_json(single_scenario));
            const auto trial = otrp::bench::run_trial(
                otrp::bench::scenario_from_config(cfg, cfg.n_waypoints, cfg.seed));
            emit(trial.to_json(), single_out);
            return trial.passed ? 0 : 1;
        }
        if (*validate) {
            const auto report = otrp::bench::validate_trial(load_json(validate_path));
            std::cout << report.dump(2) << std::endl;
            return report.at("passed").get<bool>() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
