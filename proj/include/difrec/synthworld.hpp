#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difrec/array.hpp"
#include "difrec/prompts.hpp"
#include "difrec/rng.hpp"

namespace difrec {

enum class Split { train, val, test };

const char* split_name(Split s);

struct WorldConfig {
    int n_train_ids = 64;
    int n_val_ids = 32;
    int n_test_ids = 32;
    int samples_per_id = 20;
    int image_dim = 128;
    int attr_count = 18;
    double within_id_noise = 0.3;
    std::uint64_t seed = 0;

    int total_ids() const { return n_train_ids + n_val_ids + n_test_ids; }
    int total_samples() const { return total_ids() * samples_per_id; }
};

struct SyntheticIdentity {
    NumericArray prototype;  // [image_dim]
    PromptVector prompt;     // sign bits of the first attr_count coords
};

/// Identities are stored train block, then val, then test; sample row
/// id_index*samples_per_id + s of `images` belongs to identity id_index.
struct SyntheticDataset {
    WorldConfig cfg;
    std::vector<SyntheticIdentity> identities;
    NumericArray images;  // [total_samples x image_dim]
    int prompt_collision_pairs = 0;

    int split_offset(Split s) const;
    int split_size(Split s) const;
    int identity_of_sample(int sample_row) const { return sample_row / cfg.samples_per_id; }
};

struct SplitItem {
    int sample_row;       // row into dataset.images
    int label;            // split-local contiguous identity id
    int global_identity;  // index into dataset.identities
};

SyntheticDataset generate_world(const WorldConfig& cfg);

std::vector<SplitItem> split_items(const SyntheticDataset& ds, Split split);

// Copies the images of the given items into a [n x image_dim] batch.
NumericArray gather_images(const SyntheticDataset& ds, const std::vector<SplitItem>& items);
NumericArray gather_images(const SyntheticDataset& ds, const std::vector<SplitItem>& items,
                           const std::vector<int>& pick);

// Attribute names used by the synthetic world: the default identity-relevant
// mask, extended with Synth_Attr_<i> beyond 18.
std::vector<std::string> synthetic_attribute_names(int attr_count);

// Per-sample attribute table in the CelebA file layout (leading count line),
// so module prompts can ingest it back.
AttributeTable export_attribute_table(const SyntheticDataset& ds);

}  // namespace difrec
