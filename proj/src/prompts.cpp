#include "difrec/prompts.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace difrec {

namespace {

bool blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::vector<std::string> tokenize(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

int parse_flag(const std::string& tok, int line_no) {
    if (tok == "1" || tok == "+1") return 1;
    if (tok == "-1") return -1;
    throw ParseError("attribute file line " + std::to_string(line_no) + ": value '" + tok +
                     "' is not +1 or -1");
}

bool is_plain_integer(const std::vector<std::string>& toks) {
    if (toks.size() != 1) return false;
    for (char c : toks[0]) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return !toks[0].empty();
}

}  // namespace

AttributeTable load_attribute_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open attribute file " + path);
    AttributeTable table;
    std::string line;
    int line_no = 0;
    // Header: either the name row directly, or a CelebA-style count line
    // followed by the name row.
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto toks = tokenize(line);
        if (is_plain_integer(toks) && !table.count_header) {
            table.count_header = true;
            continue;
        }
        header = std::move(toks);
        break;
    }
    if (header.empty()) throw ParseError("attribute file " + path + ": missing header row");
    table.names = header;
    const std::size_t A = table.names.size();

    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) continue;
        auto toks = tokenize(line);
        if (toks.size() != A + 1) {
            throw ParseError("attribute file line " + std::to_string(line_no) + ": expected id + " +
                             std::to_string(A) + " values, got " + std::to_string(toks.size()) +
                             " fields");
        }
        AttributeRecord rec;
        rec.sample_id = toks[0];
        rec.flags.reserve(A);
        for (std::size_t i = 1; i < toks.size(); ++i) rec.flags.push_back(parse_flag(toks[i], line_no));
        table.records.push_back(std::move(rec));
    }
    return table;
}

void save_attribute_file(const AttributeTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write attribute file " + path);
    if (table.count_header) out << table.records.size() << '\n';
    for (std::size_t i = 0; i < table.names.size(); ++i) {
        if (i) out << ' ';
        out << table.names[i];
    }
    out << '\n';
    for (const auto& rec : table.records) {
        out << rec.sample_id;
        for (int f : rec.flags) out << ' ' << f;
        out << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

std::vector<int> resolve_attribute_mask(const AttributeTable& table,
                                        const std::vector<std::string>& mask) {
    if (mask.empty()) throw ConfigError("attribute mask must contain at least one attribute");
    std::vector<int> idx;
    idx.reserve(mask.size());
    for (const auto& name : mask) {
        int found = -1;
        for (std::size_t i = 0; i < table.names.size(); ++i) {
            if (table.names[i] == name) {
                found = static_cast<int>(i);
                break;
            }
        }
        if (found < 0) throw ConfigError("attribute '" + name + "' not present in header");
        idx.push_back(found);
    }
    return idx;
}

PromptVector select_identity_relevant(const AttributeTable& table, const AttributeRecord& record,
                                      const std::vector<std::string>& mask) {
    if (record.flags.size() != table.names.size()) {
        throw DimensionError("record '" + record.sample_id + "' has " +
                             std::to_string(record.flags.size()) + " flags for " +
                             std::to_string(table.names.size()) + " attributes");
    }
    const auto idx = resolve_attribute_mask(table, mask);
    PromptVector p;
    p.selected.reserve(idx.size());
    for (int i : idx) p.selected.push_back(record.flags[static_cast<std::size_t>(i)]);
    return p;
}

const std::vector<std::string>& default_attribute_mask() {
    static const std::vector<std::string> mask = {
        "Male",           "Young",          "Big_Nose",        "Pointy_Nose",
        "Big_Lips",       "High_Cheekbones", "Oval_Face",       "Chubby",
        "Double_Chin",    "Narrow_Eyes",    "Bags_Under_Eyes", "Bushy_Eyebrows",
        "Arched_Eyebrows", "Pale_Skin",      "Rosy_Cheeks",     "Receding_Hairline",
        "Bald",           "5_o_Clock_Shadow"};
    return mask;
}

PromptEmbedder::PromptEmbedder(int K_, int d_p_, int d_c_)
    : K(K_),
      d_p(d_p_),
      d_c(d_c_),
      table("prompt.table", NumericArray::zeros({K_ * 2, d_p_})),
      projection("prompt.proj", K_ * d_p_, d_c_) {
    if (K <= 0 || d_p <= 0 || d_c <= 0) throw ConfigError("prompt embedder dims must be positive");
}

void PromptEmbedder::init(Rng& rng) {
    for (double& v : table.value.data) v = rng.normal();
    table.ema_value = table.value;
    projection.init_he(rng);
}

NumericArray PromptEmbedder::gather(const std::vector<PromptVector>& ps, bool use_ema) const {
    const NumericArray& tab = use_ema ? table.ema_value : table.value;
    const int B = static_cast<int>(ps.size());
    NumericArray out = NumericArray::zeros({B, K * d_p});
    for (int b = 0; b < B; ++b) {
        const PromptVector& p = ps[static_cast<std::size_t>(b)];
        if (p.size() != K) {
            throw DimensionError("prompt length " + std::to_string(p.size()) + " vs K=" +
                                 std::to_string(K));
        }
        double* dst = out.row_ptr(b);
        for (int k = 0; k < K; ++k) {
            const int flag = p.selected[static_cast<std::size_t>(k)];
            const int row = 2 * k + (flag > 0 ? 1 : 0);
            const double* src = tab.row_ptr(row);
            for (int j = 0; j < d_p; ++j) dst[k * d_p + j] = src[j];
        }
    }
    return out;
}

NumericArray PromptEmbedder::embed_batch(const std::vector<PromptVector>& ps, bool use_ema) const {
    return projection.forward(gather(ps, use_ema), use_ema);
}

NumericArray PromptEmbedder::embed(const PromptVector& p, bool use_ema) const {
    return embed_batch({p}, use_ema);
}

void PromptEmbedder::backward(const std::vector<PromptVector>& ps, const NumericArray& gathered,
                              const NumericArray& g) {
    NumericArray dgather = projection.backward(gathered, g);
    const int B = static_cast<int>(ps.size());
    for (int b = 0; b < B; ++b) {
        const PromptVector& p = ps[static_cast<std::size_t>(b)];
        const double* src = dgather.row_ptr(b);
        for (int k = 0; k < K; ++k) {
            const int flag = p.selected[static_cast<std::size_t>(k)];
            const int row = 2 * k + (flag > 0 ? 1 : 0);
            double* dst = table.grad.row_ptr(row);
            for (int j = 0; j < d_p; ++j) dst[j] += src[k * d_p + j];
        }
    }
}

std::vector<Parameter*> PromptEmbedder::parameters() {
    return {&table, &projection.weight, &projection.bias};
}

}  // namespace difrec
