#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difrec/array.hpp"

namespace difrec {

// A named tensor inside a checkpoint file. Blocks carry values only; optimizer
// state and gradients are never persisted.
struct CheckpointBlock {
    std::string name;
    NumericArray value{std::vector<int>{0}, {}};
};

struct Checkpoint {
    std::string component;
    std::uint64_t config_hash = 0;
    std::vector<CheckpointBlock> blocks;

    const CheckpointBlock* find(const std::string& name) const;
    const CheckpointBlock& require(const std::string& name) const;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws IntegrityError on truncation, bad magic, per-block checksum
// mismatch, or (when expectations are given) wrong component / config hash.
Checkpoint load_checkpoint(const std::string& path);
Checkpoint load_checkpoint(const std::string& path, const std::string& expect_component,
                           std::uint64_t expect_config_hash);

// Collects parameter values into blocks, and restores them by name.
std::vector<CheckpointBlock> parameter_blocks(const std::vector<const Parameter*>& params);
void assign_parameters(const Checkpoint& ckpt, const std::vector<Parameter*>& params);

}  // namespace difrec
