#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "difrec/optim.hpp"
#include "difrec/prompts.hpp"

using namespace difrec;

namespace {

const char* kCelebANames =
    "5_o_Clock_Shadow Arched_Eyebrows Attractive Bags_Under_Eyes Bald Bangs Big_Lips Big_Nose "
    "Black_Hair Blond_Hair Blurry Brown_Hair Bushy_Eyebrows Chubby Double_Chin Eyeglasses "
    "Goatee Gray_Hair Heavy_Makeup High_Cheekbones Male Mouth_Slightly_Open Mustache "
    "Narrow_Eyes No_Beard Oval_Face Pale_Skin Pointy_Nose Receding_Hairline Rosy_Cheeks "
    "Sideburns Smiling Straight_Hair Wavy_Hair Wearing_Earrings Wearing_Hat Wearing_Lipstick "
    "Wearing_Necklace Wearing_Necktie Young";

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

std::string celeba_fixture() {
    std::string text = "2\n";
    text += kCelebANames;
    text += '\n';
    text += "000001.jpg -1 1 1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 -1 1 1 -1 1 -1 -1 1 -1 "
            "-1 1 -1 -1 -1 1 1 -1 1 -1 1 -1 -1 1\n";
    text += "000002.jpg -1 -1 -1 1 -1 -1 -1 1 -1 -1 -1 1 -1 -1 -1 -1 -1 -1 -1 1 -1 1 -1 -1 1 -1 "
            "-1 -1 -1 -1 -1 1 1 -1 -1 -1 -1 -1 -1 1\n";
    return text;
}

}  // namespace

TEST_CASE("celeba-format attribute files load and round-trip") {
    const std::string path = temp_path("difrec_attr_test.txt");
    write_file(path, celeba_fixture());

    const AttributeTable table = load_attribute_file(path);
    CHECK(table.count_header);
    REQUIRE(table.names.size() == 40);
    CHECK(table.names.front() == "5_o_Clock_Shadow");
    CHECK(table.names.back() == "Young");
    REQUIRE(table.records.size() == 2);
    CHECK(table.records[0].sample_id == "000001.jpg");
    CHECK(table.records[0].flags[0] == -1);
    CHECK(table.records[0].flags[1] == 1);

    const std::string path2 = temp_path("difrec_attr_test2.txt");
    save_attribute_file(table, path2);
    CHECK(read_file(path) == read_file(path2));

    SUBCASE("layout without the count line also round-trips") {
        AttributeTable plain = table;
        plain.count_header = false;
        save_attribute_file(plain, path2);
        const AttributeTable again = load_attribute_file(path2);
        CHECK_FALSE(again.count_header);
        CHECK(again.names == table.names);
        REQUIRE(again.records.size() == table.records.size());
        for (std::size_t i = 0; i < again.records.size(); ++i) {
            CHECK(again.records[i].sample_id == table.records[i].sample_id);
            CHECK(again.records[i].flags == table.records[i].flags);
        }
    }

    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("attribute parse errors carry line numbers") {
    const std::string path = temp_path("difrec_attr_bad.txt");

    SUBCASE("bad flag value") {
        write_file(path, "A B\nid1 1 0\n");
        CHECK_THROWS_WITH_AS(load_attribute_file(path),
                             doctest::Contains("line 2"), ParseError);
    }

    SUBCASE("wrong field count") {
        write_file(path, "A B\nid1 1\n");
        CHECK_THROWS_AS(load_attribute_file(path), ParseError);
    }

    SUBCASE("missing header") {
        write_file(path, "\n\n");
        CHECK_THROWS_AS(load_attribute_file(path), ParseError);
    }

    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_attribute_file(temp_path("difrec_no_such_file.txt")), IoError);
    }

    std::remove(path.c_str());
}

TEST_CASE("mask resolution and prompt selection") {
    AttributeTable table;
    table.names = {"A", "B", "C", "D"};
    AttributeRecord rec;
    rec.sample_id = "x";
    rec.flags = {1, -1, 1, -1};
    table.records.push_back(rec);

    const std::vector<int> idx = resolve_attribute_mask(table, {"C", "A"});
    CHECK(idx == std::vector<int>{2, 0});

    const PromptVector p = select_identity_relevant(table, rec, {"C", "A"});
    CHECK(p.selected == std::vector<int>{1, 1});
    const PromptVector q = select_identity_relevant(table, rec, {"B", "D"});
    CHECK(q.selected == std::vector<int>{-1, -1});

    CHECK_THROWS_AS(resolve_attribute_mask(table, {"Nope"}), ConfigError);
    CHECK_THROWS_AS(resolve_attribute_mask(table, {}), ConfigError);
}

TEST_CASE("default mask is the pinned 18-attribute subset") {
    const std::vector<std::string> want = {
        "Male", "Young", "Big_Nose", "Pointy_Nose", "Big_Lips", "High_Cheekbones",
        "Oval_Face", "Chubby", "Double_Chin", "Narrow_Eyes", "Bags_Under_Eyes",
        "Bushy_Eyebrows", "Arched_Eyebrows", "Pale_Skin", "Rosy_Cheeks",
        "Receding_Hairline", "Bald", "5_o_Clock_Shadow"};
    CHECK(default_attribute_mask() == want);

    // Every default-mask name exists in the CelebA 40-name header.
    AttributeTable table;
    std::istringstream names(kCelebANames);
    std::string n;
    while (names >> n) table.names.push_back(n);
    REQUIRE(table.names.size() == 40);
    CHECK_NOTHROW(resolve_attribute_mask(table, default_attribute_mask()));
}

TEST_CASE("prompt embedder gathers polarity rows and embeds") {
    PromptEmbedder emb(2, 1, 3);
    // table rows: attr0-, attr0+, attr1-, attr1+
    emb.table.value = NumericArray::matrix(4, 1, {10.0, 11.0, 20.0, 21.0});
    emb.projection.weight.value = NumericArray::matrix(2, 3, {1, 0, 0, 0, 1, 0});
    emb.projection.bias.value = NumericArray::from_vector({0, 0, 5});

    PromptVector p;
    p.selected = {1, -1};
    const NumericArray g = emb.gather({p});
    CHECK(g.at(0, 0) == 11.0);
    CHECK(g.at(0, 1) == 20.0);

    const NumericArray e = emb.embed(p);
    REQUIRE(e.cols() == 3);
    CHECK(e.at(0, 0) == 11.0);
    CHECK(e.at(0, 1) == 20.0);
    CHECK(e.at(0, 2) == 5.0);

    SUBCASE("batch rows equal individual embeds") {
        PromptVector q;
        q.selected = {-1, 1};
        const NumericArray batch = emb.embed_batch({p, q});
        const NumericArray eq = emb.embed(q);
        for (int j = 0; j < 3; ++j) {
            CHECK(batch.at(0, j) == e.at(0, j));
            CHECK(batch.at(1, j) == eq.at(0, j));
        }
    }

    SUBCASE("wrong prompt length is rejected") {
        PromptVector bad;
        bad.selected = {1};
        CHECK_THROWS_AS(emb.embed(bad), DimensionError);
    }
}

TEST_CASE("prompt embedder gradients match finite differences") {
    Rng rng(61);
    for (int draw = 0; draw < 10; ++draw) {
        PromptEmbedder emb(3, 2, 4);
        emb.init(rng);
        std::vector<PromptVector> ps(2);
        for (auto& p : ps) {
            p.selected.resize(3);
            for (int& f : p.selected) f = rng.uniform() < 0.5 ? -1 : 1;
        }
        NumericArray w = NumericArray::zeros({2, 4});
        rng.fill_normal(w);

        auto forward = [&] {
            const NumericArray y = emb.embed_batch(ps);
            double s = 0.0;
            for (std::size_t i = 0; i < y.data.size(); ++i) s += y.data[i] * w.data[i];
            return s;
        };
        forward();
        for (Parameter* p : emb.parameters()) p->zero_grad();
        emb.backward(ps, emb.gather(ps), w);
        CHECK(grad_check(forward, emb.parameters()).max_rel_err < 1e-4);
    }
}
