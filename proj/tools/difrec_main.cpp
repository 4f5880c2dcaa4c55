#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "difrec/commands.hpp"
#include "difrec/config.hpp"
#include "difrec/errors.hpp"

namespace {

using CommandFn = void (*)(const difrec::RunConfig&, const std::string&);

struct StageSpec {
    const char* name;
    const char* help;
    CommandFn fn;
};

constexpr StageSpec kStages[] = {
    {"synth-gen", "Generate the synthetic identity world", difrec::cmd_synth_gen},
    {"train-encoder", "Train the recognition encoder", difrec::cmd_train_encoder},
    {"train-diffusion", "Train the conditional latent denoiser", difrec::cmd_train_diffusion},
    {"train-refiner", "Train the latent-to-feature refiner", difrec::cmd_train_refiner},
    {"eval-verify", "Run the verification benchmark", difrec::cmd_eval_verify},
    {"eval-identify", "Run the identification benchmark", difrec::cmd_eval_identify},
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"difrec: text-conditioned latent diffusion face recognition"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<long long> seed_override;

    CommandFn selected = nullptr;
    for (const StageSpec& stage : kStages) {
        CLI::App* sub = app.add_subcommand(stage.name, stage.help);
        sub->add_option("--config", config_path, "Run configuration file")->required();
        sub->add_option("--out", out_dir, "Artifact directory");
        sub->add_option("--seed", seed_override, "Master seed override");
        sub->callback([&selected, &stage] { selected = stage.fn; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        difrec::RunConfig cfg = difrec::load_run_config(config_path);
        if (seed_override) cfg.seed = static_cast<std::uint64_t>(*seed_override);
        difrec::validate_config(cfg);
        selected(cfg, out_dir);
        return 0;
    } catch (const difrec::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const difrec::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const difrec::IntegrityError& e) {
        std::fprintf(stderr, "integrity error: %s\n", e.what());
        return 3;
    } catch (const difrec::DivergenceError& e) {
        std::fprintf(stderr, "training diverged: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
