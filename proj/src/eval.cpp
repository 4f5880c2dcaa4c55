#include "difrec/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "difrec/rng.hpp"

namespace difrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& ctx) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError(ctx + ": cannot parse number '" + s + "'");
    return v;
}

int parse_int(const std::string& s, const std::string& ctx) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const long v = std::strtol(begin, &end, 10);
    if (end == begin) throw ParseError(ctx + ": cannot parse integer '" + s + "'");
    return static_cast<int>(v);
}

}  // namespace

double score(const NumericArray& f_x, const NumericArray& f_p) {
    return cosine_similarity(f_x, f_p);
}

PairList build_pairs(const std::vector<SplitItem>& items, int n, std::uint64_t seed, Split split) {
    if (n < 2 || n % 2 != 0) throw ConfigError("build_pairs: n must be even and >= 2");
    int max_label = -1;
    for (const auto& it : items) max_label = std::max(max_label, it.label);
    const int n_ids = max_label + 1;
    if (n_ids < 2) throw ConfigError("build_pairs: need at least two identities");
    std::vector<std::vector<int>> by_id(static_cast<std::size_t>(n_ids));
    for (std::size_t i = 0; i < items.size(); ++i) {
        by_id[static_cast<std::size_t>(items[i].label)].push_back(static_cast<int>(i));
    }
    for (int j = 0; j < n_ids; ++j) {
        if (by_id[static_cast<std::size_t>(j)].empty()) {
            throw ConfigError("build_pairs: identity " + std::to_string(j) + " has no samples");
        }
    }

    Rng rng(seed);
    PairList list;
    list.seed = seed;
    list.split = split;
    list.entries.reserve(static_cast<std::size_t>(n));
    const int half = n / 2;
    for (int i = 0; i < half; ++i) {
        const int id = rng.uniform_int(n_ids);
        const auto& pool = by_id[static_cast<std::size_t>(id)];
        const int image = pool[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(pool.size())))];
        const int prompt = pool[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(pool.size())))];
        list.entries.push_back({image, prompt, 1});
    }
    for (int i = 0; i < half; ++i) {
        const int id_img = rng.uniform_int(n_ids);
        int id_prm = rng.uniform_int(n_ids - 1);
        if (id_prm >= id_img) ++id_prm;
        const auto& pool_img = by_id[static_cast<std::size_t>(id_img)];
        const auto& pool_prm = by_id[static_cast<std::size_t>(id_prm)];
        const int image = pool_img[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(pool_img.size())))];
        const int prompt = pool_prm[static_cast<std::size_t>(rng.uniform_int(
            static_cast<int>(pool_prm.size())))];
        list.entries.push_back({image, prompt, 0});
    }
    return list;
}

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw DimensionError("roc: scores vs labels length");
    if (scores.empty()) throw ConfigError("roc: empty input");
    long pos_total = 0, neg_total = 0;
    for (int y : labels) {
        if (y == 1) {
            ++pos_total;
        } else if (y == 0) {
            ++neg_total;
        } else {
            throw ConfigError("roc: labels must be 0 or 1");
        }
    }
    if (pos_total == 0 || neg_total == 0) throw ConfigError("roc: both classes must be present");

    std::vector<std::pair<double, int>> sorted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DegenerateInputError("roc: non-finite score");
        sorted[i] = {scores[i], labels[i]};
    }
    std::sort(sorted.begin(), sorted.end());

    RocCurve curve;
    curve.thresholds.push_back(-kInf);
    curve.tpr.push_back(1.0);
    curve.fpr.push_back(1.0);
    long pos_below = 0, neg_below = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        const double t = sorted[i].first;
        curve.thresholds.push_back(t);
        curve.tpr.push_back(static_cast<double>(pos_total - pos_below) /
                            static_cast<double>(pos_total));
        curve.fpr.push_back(static_cast<double>(neg_total - neg_below) /
                            static_cast<double>(neg_total));
        while (i < sorted.size() && sorted[i].first == t) {
            if (sorted[i].second == 1) {
                ++pos_below;
            } else {
                ++neg_below;
            }
            ++i;
        }
    }
    curve.thresholds.push_back(kInf);
    curve.tpr.push_back(0.0);
    curve.fpr.push_back(0.0);
    return curve;
}

double select_threshold(const RocCurve& curve) {
    if (curve.thresholds.empty()) throw ConfigError("select_threshold: empty curve");
    double best = curve.thresholds[0];
    double best_j = curve.tpr[0] - curve.fpr[0];
    for (std::size_t i = 1; i < curve.thresholds.size(); ++i) {
        const double j = curve.tpr[i] - curve.fpr[i];
        if (j > best_j) {
            best_j = j;
            best = curve.thresholds[i];
        }
    }
    return best;
}

double verification_accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                             double threshold) {
    if (scores.size() != labels.size())
        throw DimensionError("verification_accuracy: scores vs labels length");
    if (scores.empty()) throw ConfigError("verification_accuracy: empty input");
    long correct = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int decision = scores[i] >= threshold ? 1 : 0;
        if (decision == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

RankTable top_k(const NumericArray& probe_feats, const NumericArray& gallery_feats, int k) {
    const int P = probe_feats.rows();
    const int G = gallery_feats.rows();
    const int d = probe_feats.cols();
    if (gallery_feats.cols() != d) throw DimensionError("top_k: feature dims differ");
    if (k < 1 || k > G) throw ConfigError("top_k: k=" + std::to_string(k) + " outside 1.." +
                                          std::to_string(G));

    std::vector<double> probe_norm(static_cast<std::size_t>(P));
    std::vector<double> gallery_norm(static_cast<std::size_t>(G));
    for (int i = 0; i < P; ++i) {
        double sq = 0.0;
        const double* row = probe_feats.row_ptr(i);
        for (int c = 0; c < d; ++c) sq += row[c] * row[c];
        if (sq == 0.0) throw DegenerateInputError("top_k: zero-norm probe " + std::to_string(i));
        probe_norm[static_cast<std::size_t>(i)] = std::sqrt(sq);
    }
    for (int j = 0; j < G; ++j) {
        double sq = 0.0;
        const double* row = gallery_feats.row_ptr(j);
        for (int c = 0; c < d; ++c) sq += row[c] * row[c];
        if (sq == 0.0) throw DegenerateInputError("top_k: zero-norm gallery " + std::to_string(j));
        gallery_norm[static_cast<std::size_t>(j)] = std::sqrt(sq);
    }

    RankTable table;
    table.n_gallery = G;
    table.k = k;
    table.indices.assign(static_cast<std::size_t>(P), {});
    table.scores.assign(static_cast<std::size_t>(P), {});

#pragma omp parallel for schedule(static) if (static_cast<std::int64_t>(P) * G * d >= 16 * 1024)
    for (int i = 0; i < P; ++i) {
        const double* pr = probe_feats.row_ptr(i);
        std::vector<double> s(static_cast<std::size_t>(G));
        for (int j = 0; j < G; ++j) {
            const double* gr = gallery_feats.row_ptr(j);
            double dot = 0.0;
            for (int c = 0; c < d; ++c) dot += pr[c] * gr[c];
            s[static_cast<std::size_t>(j)] =
                dot / (probe_norm[static_cast<std::size_t>(i)] *
                       gallery_norm[static_cast<std::size_t>(j)]);
        }
        std::vector<int> ids(static_cast<std::size_t>(G));
        for (int j = 0; j < G; ++j) ids[static_cast<std::size_t>(j)] = j;
        std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), [&s](int a, int b) {
            const double sa = s[static_cast<std::size_t>(a)];
            const double sb = s[static_cast<std::size_t>(b)];
            return sa > sb || (sa == sb && a < b);
        });
        auto& out_ids = table.indices[static_cast<std::size_t>(i)];
        auto& out_scores = table.scores[static_cast<std::size_t>(i)];
        out_ids.assign(ids.begin(), ids.begin() + k);
        out_scores.reserve(static_cast<std::size_t>(k));
        for (int r = 0; r < k; ++r) {
            out_scores.push_back(s[static_cast<std::size_t>(out_ids[static_cast<std::size_t>(r)])]);
        }
    }
    return table;
}

double identification_accuracy(const RankTable& table, int k) {
    if (k < 1 || k > table.k) {
        throw ConfigError("identification_accuracy: k=" + std::to_string(k) +
                          " outside 1.." + std::to_string(table.k));
    }
    if (table.indices.empty()) throw ConfigError("identification_accuracy: empty table");
    if (static_cast<int>(table.indices.size()) > table.n_gallery) {
        throw ConfigError("identification_accuracy: more probes than gallery entries");
    }
    long hits = 0;
    for (std::size_t i = 0; i < table.indices.size(); ++i) {
        const auto& ids = table.indices[i];
        for (int r = 0; r < k; ++r) {
            if (ids[static_cast<std::size_t>(r)] == static_cast<int>(i)) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(table.indices.size());
}

void export_roc_csv(const RocCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "threshold,fpr,tpr\n";
    for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
        out << fmt_double(curve.thresholds[i]) << ',' << fmt_double(curve.fpr[i]) << ','
            << fmt_double(curve.tpr[i]) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

void export_rank_csv(const RankTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "probe,rank,gallery,score\n";
    for (std::size_t i = 0; i < table.indices.size(); ++i) {
        for (std::size_t r = 0; r < table.indices[i].size(); ++r) {
            out << i << ',' << (r + 1) << ',' << table.indices[i][r] << ','
                << fmt_double(table.scores[i][r]) << '\n';
        }
    }
    if (!out) throw IoError("write failure on " + path);
}

void export_pair_scores_csv(const PairList& pairs, const std::vector<double>& scores,
                            const std::string& path) {
    if (pairs.entries.size() != scores.size())
        throw DimensionError("export_pair_scores_csv: pairs vs scores length");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << "image,prompt,label,score\n";
    for (std::size_t i = 0; i < pairs.entries.size(); ++i) {
        const auto& e = pairs.entries[i];
        out << e.image_item << ',' << e.prompt_item << ',' << e.label << ','
            << fmt_double(scores[i]) << '\n';
    }
    if (!out) throw IoError("write failure on " + path);
}

RocCurve load_roc_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) !=
                                       std::vector<std::string>{"threshold", "fpr", "tpr"}) {
        throw ParseError(path + ": bad ROC header");
    }
    RocCurve curve;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 3) throw ParseError(path + " line " + std::to_string(line_no) +
                                            ": expected 3 fields");
        const std::string ctx = path + " line " + std::to_string(line_no);
        curve.thresholds.push_back(parse_double(f[0], ctx));
        curve.fpr.push_back(parse_double(f[1], ctx));
        curve.tpr.push_back(parse_double(f[2], ctx));
    }
    return curve;
}

RankTable load_rank_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) ||
        split_csv_line(line) != std::vector<std::string>{"probe", "rank", "gallery", "score"}) {
        throw ParseError(path + ": bad rank header");
    }
    RankTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4) throw ParseError(path + " line " + std::to_string(line_no) +
                                            ": expected 4 fields");
        const std::string ctx = path + " line " + std::to_string(line_no);
        const int probe = parse_int(f[0], ctx);
        const int gallery = parse_int(f[2], ctx);
        const double s = parse_double(f[3], ctx);
        if (probe < 0) throw ParseError(ctx + ": negative probe");
        if (probe >= static_cast<int>(table.indices.size())) {
            table.indices.resize(static_cast<std::size_t>(probe) + 1);
            table.scores.resize(static_cast<std::size_t>(probe) + 1);
        }
        table.indices[static_cast<std::size_t>(probe)].push_back(gallery);
        table.scores[static_cast<std::size_t>(probe)].push_back(s);
        table.n_gallery = std::max(table.n_gallery, gallery + 1);
    }
    for (const auto& row : table.indices) {
        table.k = std::max(table.k, static_cast<int>(row.size()));
    }
    return table;
}

}  // namespace difrec
