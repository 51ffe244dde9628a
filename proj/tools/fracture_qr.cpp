#include <CLI11.hpp>
#include <cstdio>

#include "qrpf/scenario.hpp"

using namespace qrpf;

namespace {

int run(const std::string& scenario_name, ScenarioConfig config) {
    switch (config.scenario) {
        case ScenarioKind::FrozenCrack: {
            auto result = run_frozen_crack(config);
            std::printf("frozen-crack mode %s: crack/intact energy ratio %.6g, uniformity rms %.6g\n",
                        result.mode.c_str(), result.ratio, result.uniformity_rms);
            break;
        }
        case ScenarioKind::Landscape: {
            auto run = run_landscape(config);
            std::printf("landscape: %zu samples, %zu local minima\n", run.samples.size(),
                        run.minima.size());
            for (int idx : run.minima)
                std::printf("  minimum at theta = %.6f, Wd/mu = %.6g\n", run.samples[idx].theta,
                            run.samples[idx].wd);
            break;
        }
        case ScenarioKind::CyclicShear: {
            auto result = run_cyclic_shear(config);
            std::printf("cyclic-shear: %d new frozen nodes in phase 1, %d in phase 2\n",
                        result.phase1_new_frozen, result.phase2_new_frozen);
            std::printf("  kink toward bottom-right: %s\n",
                        result.kink_toward_bottom_right ? "yes" : "no");
            std::printf("  branch nucleation distance to kink: %.4g\n",
                        result.branch_distance_to_kink);
            std::printf("  closed-crack energy signature: %.4g of peak\n",
                        result.closed_signature_ratio);
            break;
        }
        case ScenarioKind::Cavity: {
            auto result = run_cavity(config);
            std::printf("cavity: %zu of 8 seeds grew; closure L2 error %.4g\n",
                        result.grown.size(), result.closure_l2_error);
            break;
        }
        case ScenarioKind::SplittingDemo: {
            auto report = run_splitting_demo(config);
            std::printf("splitting-demo: %zu comparison cases written\n", report.cases.size());
            break;
        }
    }
    std::printf("%s: output in %s\n", scenario_name.c_str(), config.output_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-field fracture toolkit with a crack-frame effective energy"};
    std::string scenario;
    std::string config_path;
    std::string output_dir;
    std::string mesh_path;
    int seed = 0;

    app.add_option("scenario", scenario,
                   "one of: frozen-crack, cyclic-shear, cavity, landscape, splitting-demo")
        ->required();
    app.add_option("--config", config_path, "JSON scenario configuration")->required();
    app.add_option("--output", output_dir, "override the configured output directory");
    app.add_option("--mesh", mesh_path, "override the configured mesh file");
    app.add_option("--seed", seed, "random seed recorded in the outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        ScenarioConfig config = load_config(config_path);
        std::string expected;
        switch (config.scenario) {
            case ScenarioKind::FrozenCrack: expected = "frozen-crack"; break;
            case ScenarioKind::CyclicShear: expected = "cyclic-shear"; break;
            case ScenarioKind::Cavity: expected = "cavity"; break;
            case ScenarioKind::Landscape: expected = "landscape"; break;
            case ScenarioKind::SplittingDemo: expected = "splitting-demo"; break;
        }
        if (scenario != expected)
            throw ConfigError("config describes scenario '" + expected + "', got '" + scenario +
                              "'");
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (!mesh_path.empty()) {
            config.mesh.kind = MeshSpec::Kind::File;
            config.mesh.path = mesh_path;
        }
        config.seed = seed;
        return run(scenario, std::move(config));
    } catch (const ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return 2;
    } catch (const NotConverged& err) {
        std::fprintf(stderr, "solver did not converge: %s\n", err.what());
        return 3;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}
