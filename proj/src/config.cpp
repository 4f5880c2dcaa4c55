#include "difrec/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "difrec/array.hpp"
#include "difrec/prompts.hpp"
#include "difrec/synthworld.hpp"

namespace difrec {

namespace {

struct Field {
    const char* key;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t to_u64(const std::string& s, const char* key) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const unsigned long long v = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw ConfigError(std::string("config key ") + key + ": bad unsigned integer '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
}

int to_int(const std::string& s, const char* key) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0') {
        throw ConfigError(std::string("config key ") + key + ": bad integer '" + s + "'");
    }
    return static_cast<int>(v);
}

double to_double(const std::string& s, const char* key) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') {
        throw ConfigError(std::string("config key ") + key + ": bad number '" + s + "'");
    }
    return v;
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty() || !out.empty()) out.push_back(cur);
    return out;
}

std::string join_commas(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += v[i];
    }
    return out;
}

#define SCALAR_FIELD(name, conv)                                                       \
    Field {                                                                            \
        #name,                                                                         \
            [](RunConfig& c, const std::string& s) { c.name = conv(s, #name); },       \
            [](const RunConfig& c) { return std::to_string(c.name); }                  \
    }
#define DOUBLE_FIELD(name)                                                             \
    Field {                                                                            \
        #name, [](RunConfig& c, const std::string& s) { c.name = to_double(s, #name); }, \
            [](const RunConfig& c) { return fmt_double(c.name); }                      \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        SCALAR_FIELD(seed, to_u64),
        SCALAR_FIELD(n_train_ids, to_int),
        SCALAR_FIELD(n_val_ids, to_int),
        SCALAR_FIELD(n_test_ids, to_int),
        SCALAR_FIELD(samples_per_id, to_int),
        SCALAR_FIELD(image_dim, to_int),
        SCALAR_FIELD(attr_count, to_int),
        DOUBLE_FIELD(within_id_noise),
        SCALAR_FIELD(d_z, to_int),
        SCALAR_FIELD(d_f, to_int),
        SCALAR_FIELD(encoder_hidden_z, to_int),
        SCALAR_FIELD(encoder_hidden_f, to_int),
        DOUBLE_FIELD(margin),
        DOUBLE_FIELD(scale),
        SCALAR_FIELD(encoder_epochs, to_int),
        SCALAR_FIELD(encoder_batch, to_int),
        DOUBLE_FIELD(encoder_lr),
        SCALAR_FIELD(T, to_int),
        DOUBLE_FIELD(beta_start),
        DOUBLE_FIELD(beta_end),
        SCALAR_FIELD(T_tilde, to_int),
        SCALAR_FIELD(d_t, to_int),
        SCALAR_FIELD(d_p, to_int),
        SCALAR_FIELD(d_c, to_int),
        SCALAR_FIELD(denoiser_hidden, to_int),
        SCALAR_FIELD(denoiser_depth, to_int),
        DOUBLE_FIELD(diffusion_lr),
        DOUBLE_FIELD(finetune_lr),
        SCALAR_FIELD(diffusion_batch, to_int),
        SCALAR_FIELD(grad_accum_steps, to_int),
        SCALAR_FIELD(diffusion_steps, to_int),
        SCALAR_FIELD(finetune_steps, to_int),
        DOUBLE_FIELD(max_grad_norm),
        DOUBLE_FIELD(ema_decay),
        SCALAR_FIELD(refiner_hidden, to_int),
        SCALAR_FIELD(refiner_batch, to_int),
        SCALAR_FIELD(refiner_steps, to_int),
        DOUBLE_FIELD(refiner_lr),
        Field{"attr_mask",
              [](RunConfig& c, const std::string& s) { c.attr_mask = split_commas(s); },
              [](const RunConfig& c) { return join_commas(c.attr_mask); }},
        SCALAR_FIELD(eval_pairs, to_int),
        SCALAR_FIELD(eval_lists, to_int),
        SCALAR_FIELD(eval_probes, to_int),
        SCALAR_FIELD(eval_prompt_samples, to_int),
        SCALAR_FIELD(finetune_val_pairs, to_int),
    };
    return f;
}

#undef SCALAR_FIELD
#undef DOUBLE_FIELD

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

RunConfig::RunConfig() : attr_mask(default_attribute_mask()) {}

RunConfig parse_run_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    std::set<std::string> seen;
    while (std::getline(is, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + " line " + std::to_string(line_no) +
                              ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) {
            throw ConfigError(origin + " line " + std::to_string(line_no) + ": duplicate key '" +
                              key + "'");
        }
        bool matched = false;
        for (const Field& f : fields()) {
            if (key == f.key) {
                f.set(cfg, value);
                matched = true;
                break;
            }
        }
        if (!matched) {
            throw ConfigError(origin + " line " + std::to_string(line_no) + ": unknown key '" +
                              key + "'");
        }
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config_text(buf.str(), path);
}

void validate_config(const RunConfig& c) {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError("config: " + msg);
    };
    require(c.n_train_ids >= 2, "n_train_ids must be >= 2");
    require(c.n_val_ids >= 2, "n_val_ids must be >= 2");
    require(c.n_test_ids >= 2, "n_test_ids must be >= 2");
    require(c.samples_per_id >= 1, "samples_per_id must be >= 1");
    require(c.attr_count >= 1, "attr_count must be >= 1");
    require(c.image_dim >= c.attr_count, "image_dim must be >= attr_count");
    require(c.within_id_noise >= 0.0, "within_id_noise must be >= 0");
    require(c.d_z >= 1 && c.d_f >= 1, "d_z and d_f must be >= 1");
    require(c.encoder_hidden_z >= 1 && c.encoder_hidden_f >= 1, "encoder widths must be >= 1");
    require(c.margin >= 0.0 && c.margin < 1.5707963267948966, "margin must be in [0, pi/2)");
    require(c.scale > 0.0, "scale must be positive");
    require(c.encoder_epochs >= 1, "encoder_epochs must be >= 1");
    require(c.encoder_batch >= 1, "encoder_batch must be >= 1");
    require(c.encoder_lr > 0.0, "encoder_lr must be positive");
    require(c.T >= 1, "T must be >= 1");
    require(c.beta_start > 0.0 && c.beta_start <= c.beta_end && c.beta_end < 1.0,
            "need 0 < beta_start <= beta_end < 1");
    require(c.T_tilde >= 1 && c.T_tilde <= c.T, "T_tilde must be in 1..T");
    require(c.d_t >= 2 && c.d_t % 2 == 0, "d_t must be even and >= 2");
    require(c.d_p >= 1 && c.d_c >= 1, "d_p and d_c must be >= 1");
    require(c.denoiser_hidden >= 1 && c.denoiser_depth >= 1, "denoiser size must be positive");
    require(c.diffusion_lr > 0.0 && c.finetune_lr > 0.0, "diffusion rates must be positive");
    require(c.diffusion_batch >= 1, "diffusion_batch must be >= 1");
    require(c.grad_accum_steps >= 1, "grad_accum_steps must be >= 1");
    require(c.diffusion_steps >= 0 && c.finetune_steps >= 0, "step counts must be >= 0");
    require(c.max_grad_norm > 0.0, "max_grad_norm must be positive");
    require(c.ema_decay >= 0.0 && c.ema_decay < 1.0, "ema_decay must be in [0,1)");
    require(c.refiner_hidden >= 1 && c.refiner_batch >= 1, "refiner sizes must be positive");
    require(c.refiner_steps >= 0, "refiner_steps must be >= 0");
    require(c.refiner_lr > 0.0, "refiner_lr must be positive");
    require(!c.attr_mask.empty(), "attr_mask must contain at least one attribute");
    {
        const auto names = synthetic_attribute_names(c.attr_count);
        std::set<std::string> seen;
        for (const auto& m : c.attr_mask) {
            if (!seen.insert(m).second) throw ConfigError("config: duplicate mask name '" + m + "'");
            bool found = false;
            for (const auto& n : names) {
                if (n == m) {
                    found = true;
                    break;
                }
            }
            if (!found) {
                throw ConfigError("config: mask attribute '" + m +
                                  "' not among the synthetic attribute names (attr_count=" +
                                  std::to_string(c.attr_count) + ")");
            }
        }
    }
    require(c.eval_pairs >= 2 && c.eval_pairs % 2 == 0, "eval_pairs must be even and >= 2");
    require(c.eval_lists >= 1, "eval_lists must be >= 1");
    require(c.eval_probes >= 2, "eval_probes must be >= 2");
    require(c.eval_probes <= c.n_test_ids * c.samples_per_id,
            "eval_probes cannot exceed the number of test samples");
    require(c.eval_prompt_samples >= 1 && c.eval_prompt_samples <= 1024,
            "eval_prompt_samples must be in [1, 1024]");
    require(c.finetune_val_pairs >= 2 && c.finetune_val_pairs % 2 == 0,
            "finetune_val_pairs must be even and >= 2");
}

std::string canonical_config_text(const RunConfig& cfg) {
    std::string out;
    for (const Field& f : fields()) {
        out += f.key;
        out += '=';
        out += f.get(cfg);
        out += '\n';
    }
    return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
    const std::string text = canonical_config_text(cfg);
    return bytes_checksum(text.data(), text.size());
}

}  // namespace difrec
