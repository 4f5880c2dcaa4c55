#include "difrec/synthworld.hpp"

#include <cmath>
#include <cstdio>

namespace difrec {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

int SyntheticDataset::split_offset(Split s) const {
    switch (s) {
        case Split::train: return 0;
        case Split::val: return cfg.n_train_ids;
        case Split::test: return cfg.n_train_ids + cfg.n_val_ids;
    }
    return 0;
}

int SyntheticDataset::split_size(Split s) const {
    switch (s) {
        case Split::train: return cfg.n_train_ids;
        case Split::val: return cfg.n_val_ids;
        case Split::test: return cfg.n_test_ids;
    }
    return 0;
}

SyntheticDataset generate_world(const WorldConfig& cfg) {
    if (cfg.n_train_ids < 1 || cfg.n_val_ids < 1 || cfg.n_test_ids < 1) {
        throw ConfigError("world: every split needs at least one identity");
    }
    if (cfg.samples_per_id < 1) throw ConfigError("world: samples_per_id must be >= 1");
    if (cfg.attr_count < 1) throw ConfigError("world: attr_count must be >= 1");
    if (cfg.image_dim < cfg.attr_count) {
        throw ConfigError("world: image_dim must be >= attr_count (attributes are coordinate signs)");
    }
    if (cfg.within_id_noise < 0.0) throw ConfigError("world: within_id_noise must be >= 0");

    SyntheticDataset ds;
    ds.cfg = cfg;
    Rng rng(cfg.seed);

    const int n_ids = cfg.total_ids();
    ds.identities.reserve(static_cast<std::size_t>(n_ids));
    for (int i = 0; i < n_ids; ++i) {
        SyntheticIdentity id;
        id.prototype = NumericArray::zeros({cfg.image_dim});
        rng.fill_normal(id.prototype);
        id.prompt.selected.reserve(static_cast<std::size_t>(cfg.attr_count));
        for (int k = 0; k < cfg.attr_count; ++k) {
            id.prompt.selected.push_back(id.prototype.data[static_cast<std::size_t>(k)] >= 0.0 ? 1
                                                                                               : -1);
        }
        ds.identities.push_back(std::move(id));
    }

    ds.images = NumericArray::zeros({cfg.total_samples(), cfg.image_dim});
    for (int i = 0; i < n_ids; ++i) {
        const NumericArray& proto = ds.identities[static_cast<std::size_t>(i)].prototype;
        for (int s = 0; s < cfg.samples_per_id; ++s) {
            double* row = ds.images.row_ptr(i * cfg.samples_per_id + s);
            for (int d = 0; d < cfg.image_dim; ++d) {
                row[d] = proto.data[static_cast<std::size_t>(d)] + cfg.within_id_noise * rng.normal();
            }
        }
    }

    for (int i = 0; i < n_ids; ++i) {
        for (int j = i + 1; j < n_ids; ++j) {
            if (ds.identities[static_cast<std::size_t>(i)].prompt ==
                ds.identities[static_cast<std::size_t>(j)].prompt) {
                ++ds.prompt_collision_pairs;
            }
        }
    }

    // Statistical learnability check: mean inter-prototype distance must
    // dominate the within-identity spread. For unit-normal prototypes the
    // ratio is ~= sqrt(2)/within_id_noise, independent of dimension.
    if (cfg.within_id_noise > 0.0) {
        double mean_dist = 0.0;
        int pairs = 0;
        for (int i = 0; i < n_ids; ++i) {
            for (int j = i + 1; j < n_ids; ++j) {
                const auto& a = ds.identities[static_cast<std::size_t>(i)].prototype;
                const auto& b = ds.identities[static_cast<std::size_t>(j)].prototype;
                double sq = 0.0;
                for (int d = 0; d < cfg.image_dim; ++d) {
                    const double diff = a.data[static_cast<std::size_t>(d)] -
                                        b.data[static_cast<std::size_t>(d)];
                    sq += diff * diff;
                }
                mean_dist += std::sqrt(sq);
                ++pairs;
            }
        }
        mean_dist /= static_cast<double>(pairs);
        const double spread = cfg.within_id_noise * std::sqrt(static_cast<double>(cfg.image_dim));
        if (mean_dist <= 3.0 * spread) {
            throw ConfigError("world: identities not separable (inter-prototype distance " +
                              std::to_string(mean_dist) + " vs 3x within-id spread " +
                              std::to_string(3.0 * spread) + "); lower within_id_noise");
        }
    }
    return ds;
}

std::vector<SplitItem> split_items(const SyntheticDataset& ds, Split split) {
    const int offset = ds.split_offset(split);
    const int n_ids = ds.split_size(split);
    std::vector<SplitItem> items;
    items.reserve(static_cast<std::size_t>(n_ids * ds.cfg.samples_per_id));
    for (int i = 0; i < n_ids; ++i) {
        for (int s = 0; s < ds.cfg.samples_per_id; ++s) {
            SplitItem it;
            it.sample_row = (offset + i) * ds.cfg.samples_per_id + s;
            it.label = i;
            it.global_identity = offset + i;
            items.push_back(it);
        }
    }
    return items;
}

NumericArray gather_images(const SyntheticDataset& ds, const std::vector<SplitItem>& items) {
    NumericArray out = NumericArray::zeros({static_cast<int>(items.size()), ds.cfg.image_dim});
    for (std::size_t i = 0; i < items.size(); ++i) {
        const double* src = ds.images.row_ptr(items[i].sample_row);
        double* dst = out.row_ptr(static_cast<int>(i));
        for (int d = 0; d < ds.cfg.image_dim; ++d) dst[d] = src[d];
    }
    return out;
}

NumericArray gather_images(const SyntheticDataset& ds, const std::vector<SplitItem>& items,
                           const std::vector<int>& pick) {
    NumericArray out = NumericArray::zeros({static_cast<int>(pick.size()), ds.cfg.image_dim});
    for (std::size_t i = 0; i < pick.size(); ++i) {
        const double* src = ds.images.row_ptr(items[static_cast<std::size_t>(pick[i])].sample_row);
        double* dst = out.row_ptr(static_cast<int>(i));
        for (int d = 0; d < ds.cfg.image_dim; ++d) dst[d] = src[d];
    }
    return out;
}

std::vector<std::string> synthetic_attribute_names(int attr_count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(attr_count));
    const auto& base = default_attribute_mask();
    for (int k = 0; k < attr_count; ++k) {
        if (k < static_cast<int>(base.size())) {
            names.push_back(base[static_cast<std::size_t>(k)]);
        } else {
            names.push_back("Synth_Attr_" + std::to_string(k + 1));
        }
    }
    return names;
}

AttributeTable export_attribute_table(const SyntheticDataset& ds) {
    AttributeTable table;
    table.count_header = true;
    table.names = synthetic_attribute_names(ds.cfg.attr_count);
    table.records.reserve(static_cast<std::size_t>(ds.cfg.total_samples()));
    char buf[32];
    for (int row = 0; row < ds.cfg.total_samples(); ++row) {
        AttributeRecord rec;
        std::snprintf(buf, sizeof(buf), "img_%06d", row);
        rec.sample_id = buf;
        rec.flags = ds.identities[static_cast<std::size_t>(ds.identity_of_sample(row))]
                        .prompt.selected;
        table.records.push_back(std::move(rec));
    }
    return table;
}

}  // namespace difrec
