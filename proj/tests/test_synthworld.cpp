#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <set>

#include "difrec/prompts.hpp"
#include "difrec/synthworld.hpp"

using namespace difrec;

namespace {

WorldConfig tiny_config() {
    WorldConfig cfg;
    cfg.n_train_ids = 6;
    cfg.n_val_ids = 3;
    cfg.n_test_ids = 3;
    cfg.samples_per_id = 4;
    cfg.image_dim = 24;
    cfg.attr_count = 6;
    cfg.within_id_noise = 0.3;
    cfg.seed = 42;
    return cfg;
}

}  // namespace

TEST_CASE("world generation is deterministic") {
    const SyntheticDataset a = generate_world(tiny_config());
    const SyntheticDataset b = generate_world(tiny_config());
    CHECK(a.images.shape == b.images.shape);
    CHECK(std::memcmp(a.images.data.data(), b.images.data.data(),
                      a.images.data.size() * sizeof(double)) == 0);
    REQUIRE(a.identities.size() == b.identities.size());
    for (std::size_t i = 0; i < a.identities.size(); ++i) {
        CHECK(a.identities[i].prompt == b.identities[i].prompt);
        CHECK(std::memcmp(a.identities[i].prototype.data.data(),
                          b.identities[i].prototype.data.data(),
                          a.identities[i].prototype.data.size() * sizeof(double)) == 0);
    }
    CHECK(a.prompt_collision_pairs == b.prompt_collision_pairs);

    WorldConfig other = tiny_config();
    other.seed = 43;
    const SyntheticDataset c = generate_world(other);
    CHECK(std::memcmp(a.images.data.data(), c.images.data.data(),
                      a.images.data.size() * sizeof(double)) != 0);
}

TEST_CASE("default-scale arithmetic") {
    const WorldConfig cfg;  // defaults
    CHECK(cfg.total_ids() == 128);
    CHECK(cfg.total_samples() == 2560);

    WorldConfig gen = cfg;
    gen.seed = 7;
    const SyntheticDataset ds = generate_world(gen);
    CHECK(static_cast<int>(ds.identities.size()) == 128);
    CHECK(ds.images.rows() == 2560);
    CHECK(split_items(ds, Split::train).size() == 1280);
    CHECK(split_items(ds, Split::val).size() == 640);
    CHECK(split_items(ds, Split::test).size() == 640);
}

TEST_CASE("splits partition identities with local labels") {
    const SyntheticDataset ds = generate_world(tiny_config());

    std::set<int> seen_rows;
    std::set<int> train_ids, val_ids, test_ids;
    for (Split s : {Split::train, Split::val, Split::test}) {
        const auto items = split_items(ds, s);
        int expected_label = 0;
        int last_gid = -1;
        for (const auto& it : items) {
            CHECK(seen_rows.insert(it.sample_row).second);
            if (it.global_identity != last_gid) {
                if (last_gid >= 0) ++expected_label;
                last_gid = it.global_identity;
            }
            CHECK(it.label == expected_label);
            CHECK(ds.identity_of_sample(it.sample_row) == it.global_identity);
            if (s == Split::train) train_ids.insert(it.global_identity);
            if (s == Split::val) val_ids.insert(it.global_identity);
            if (s == Split::test) test_ids.insert(it.global_identity);
        }
    }
    CHECK(static_cast<int>(seen_rows.size()) == ds.cfg.total_samples());
    for (int id : train_ids) {
        CHECK(val_ids.count(id) == 0);
        CHECK(test_ids.count(id) == 0);
    }
    for (int id : val_ids) CHECK(test_ids.count(id) == 0);
}

TEST_CASE("zero within-identity noise collapses samples onto the prototype") {
    WorldConfig cfg = tiny_config();
    cfg.within_id_noise = 0.0;
    const SyntheticDataset ds = generate_world(cfg);
    for (int row = 0; row < ds.images.rows(); ++row) {
        const auto& proto = ds.identities[static_cast<std::size_t>(ds.identity_of_sample(row))].prototype;
        CHECK(std::memcmp(ds.images.row_ptr(row), proto.data.data(),
                          proto.data.size() * sizeof(double)) == 0);
    }
}

TEST_CASE("prompts are prototype sign bits shared within an identity") {
    const SyntheticDataset ds = generate_world(tiny_config());
    for (const auto& id : ds.identities) {
        REQUIRE(id.prompt.size() == ds.cfg.attr_count);
        for (int k = 0; k < ds.cfg.attr_count; ++k) {
            const int flag = id.prompt.selected[static_cast<std::size_t>(k)];
            CHECK((flag == 1 || flag == -1));
            const double coord = id.prototype.data[static_cast<std::size_t>(k)];
            CHECK(flag == (coord >= 0.0 ? 1 : -1));
        }
    }

    SUBCASE("collision count matches a brute-force recount") {
        int collisions = 0;
        for (std::size_t i = 0; i < ds.identities.size(); ++i) {
            for (std::size_t j = i + 1; j < ds.identities.size(); ++j) {
                if (ds.identities[i].prompt == ds.identities[j].prompt) ++collisions;
            }
        }
        CHECK(ds.prompt_collision_pairs == collisions);
    }
}

TEST_CASE("degenerate worlds are rejected") {
    WorldConfig cfg = tiny_config();
    cfg.n_val_ids = 0;
    CHECK_THROWS_AS(generate_world(cfg), ConfigError);

    cfg = tiny_config();
    cfg.image_dim = 3;  // fewer coords than attributes
    CHECK_THROWS_AS(generate_world(cfg), ConfigError);

    cfg = tiny_config();
    cfg.within_id_noise = 10.0;  // spread swamps prototype separation
    CHECK_THROWS_AS(generate_world(cfg), ConfigError);
}

TEST_CASE("attribute export round-trips through the prompts module") {
    const SyntheticDataset ds = generate_world(tiny_config());
    const AttributeTable table = export_attribute_table(ds);
    CHECK(table.count_header);
    CHECK(table.names == synthetic_attribute_names(ds.cfg.attr_count));
    REQUIRE(static_cast<int>(table.records.size()) == ds.cfg.total_samples());

    const std::string path =
        (std::filesystem::temp_directory_path() / "difrec_world_attr.txt").string();
    save_attribute_file(table, path);
    const AttributeTable loaded = load_attribute_file(path);
    std::remove(path.c_str());

    REQUIRE(loaded.records.size() == table.records.size());
    CHECK(loaded.names == table.names);
    for (std::size_t i = 0; i < loaded.records.size(); ++i) {
        CHECK(loaded.records[i].sample_id == table.records[i].sample_id);
        CHECK(loaded.records[i].flags == table.records[i].flags);
    }

    // Selecting every synthetic attribute as the mask recovers each sample's
    // identity prompt exactly.
    const auto mask = synthetic_attribute_names(ds.cfg.attr_count);
    for (int row = 0; row < ds.cfg.total_samples(); ++row) {
        const PromptVector p =
            select_identity_relevant(loaded, loaded.records[static_cast<std::size_t>(row)], mask);
        CHECK(p == ds.identities[static_cast<std::size_t>(ds.identity_of_sample(row))].prompt);
    }
}

TEST_CASE("synthetic attribute names extend the default mask") {
    const auto base = synthetic_attribute_names(18);
    CHECK(base == default_attribute_mask());
    const auto more = synthetic_attribute_names(20);
    REQUIRE(more.size() == 20);
    for (int i = 0; i < 18; ++i) CHECK(more[static_cast<std::size_t>(i)] == base[static_cast<std::size_t>(i)]);
    CHECK(more[18] != more[19]);
}
