#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lidarseg/errors.hpp"
#include "lidarseg_app/commands.hpp"

namespace app = lidarseg::app;

int main(int argc, char** argv) {
    CLI::App cli{"LiDAR-guided pseudo labels for weakly supervised instance segmentation", "lidarseg"};
    cli.require_subcommand(1);
    cli.fallthrough();

    std::optional<std::uint64_t> seed;
    cli.add_option("--seed", seed, "Seed for every random stream (overrides config files)");

    app::GenerateOptions gen;
    auto* generate = cli.add_subcommand("generate", "Write pseudo labels and graphs for a directory of frames");
    generate->add_option("--frames", gen.frames_dir, "Directory of frame descriptors")->required();
    generate->add_option("--out", gen.out, "Output labels file (graphs go to <stem>.graphs.json)")->required();
    generate->add_option("--config", gen.config, "key = value configuration file");

    app::SimulateOptions sim;
    auto* simulate = cli.add_subcommand("simulate", "Ray-cast a scene file into a frame");
    simulate->add_option("--scene", sim.scene, "Scene JSON")->required();
    simulate->add_option("--out", sim.out, "Output directory")->required();
    simulate->add_option("--feature-stride", sim.feature_stride, "Image pixels per feature cell")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--feature-channels", sim.feature_channels)->check(CLI::PositiveNumber);
    bool no_predictions = false;
    simulate->add_flag("--no-predictions", no_predictions, "Skip the synthetic prediction maps");

    app::GradCheckOptions gc;
    auto* grad = cli.add_subcommand("grad-check", "Compare analytic loss gradients with finite differences");
    grad->add_option("--trials", gc.trials, "Random instances")->check(CLI::PositiveNumber);
    grad->add_option("--tol", gc.tol, "Maximum relative error")->check(CLI::PositiveNumber);
    grad->add_option("--step", gc.step, "Finite-difference step")->check(CLI::PositiveNumber);

    app::VisualizeOptions vis;
    std::string mode = "labels";
    auto* visualize = cli.add_subcommand("visualize", "Render a frame overlay as a PPM image");
    visualize->add_option("--frame", vis.frame_id, "Frame id")->required();
    visualize->add_option("--mode", mode, "raw, refined or labels")
        ->check(CLI::IsMember({"raw", "refined", "labels"}));
    visualize->add_option("--frames", vis.frames_dir, "Directory holding <frame>.json");
    visualize->add_option("--out", vis.out, "Output image (default <frame>.<mode>.ppm)");
    visualize->add_option("--config", vis.config, "key = value configuration file");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? app::kExitOk : app::kExitUsage;
    }

    try {
        if (*generate) {
            gen.seed = seed;
            const auto s = app::generate(gen, std::cerr);
            std::cout << "frames " << s.frames << ", records " << s.records << ", graphs " << s.graphs
                      << ", skipped " << s.skipped << "\n"
                      << s.labels_file.string() << "\n"
                      << s.graphs_file.string() << "\n";
        } else if (*simulate) {
            sim.seed = seed;
            sim.predictions = !no_predictions;
            std::cout << app::simulate(sim, std::cerr).string() << "\n";
        } else if (*grad) {
            if (seed) gc.seed = *seed;
            const auto r = app::grad_check(gc);
            std::cout << "trials " << r.trials << "\n"
                      << "max_rel_error L_p " << r.max_error_point << "\n"
                      << "max_rel_error L_g " << r.max_error_graph << "\n"
                      << "max_rel_error L " << r.max_error_total << "\n"
                      << (r.passed(gc.tol) ? "PASS" : "FAIL") << " (tol " << gc.tol << ")\n";
            return r.passed(gc.tol) ? app::kExitOk : app::kExitCheckFailure;
        } else if (*visualize) {
            vis.seed = seed;
            vis.mode = lidarseg::overlay_mode_from_string(mode);
            app::visualize(vis, std::cerr);
        }
    } catch (const lidarseg::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return app::kExitUsage;
    } catch (const lidarseg::Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return app::kExitDataError;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return app::kExitDataError;
    }
    return app::kExitOk;
}
