#pragma once

#include <string>

#include "difrec/config.hpp"

namespace difrec {

// Pipeline stages behind the difrec subcommands. Each regenerates the
// synthetic world from the config seed, loads whatever upstream checkpoints
// it needs (verifying integrity and stage order), writes its artifacts under
// out_dir, and prints one `metric=<name> value=<float>` line per summary
// metric on stdout. All throw: ConfigError / IntegrityError /
// DivergenceError map to process exit codes in the CLI wrapper.
void cmd_synth_gen(const RunConfig& cfg, const std::string& out_dir);
void cmd_train_encoder(const RunConfig& cfg, const std::string& out_dir);
void cmd_train_diffusion(const RunConfig& cfg, const std::string& out_dir);
void cmd_train_refiner(const RunConfig& cfg, const std::string& out_dir);
void cmd_eval_verify(const RunConfig& cfg, const std::string& out_dir);
void cmd_eval_identify(const RunConfig& cfg, const std::string& out_dir);

}  // namespace difrec
