#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "difrec/array.hpp"
#include "difrec/synthworld.hpp"

namespace difrec {

// Cosine similarity between a feature and a prompt-derived feature; the
// verification score.
double score(const NumericArray& f_x, const NumericArray& f_p);

struct PairEntry {
    int image_item;   // index into the split's item list
    int prompt_item;  // index into the split's item list (its identity's prompt)
    int label;        // 1 same identity, 0 different
};

struct PairList {
    std::vector<PairEntry> entries;
    std::uint64_t seed = 0;
    Split split = Split::test;
};

// n/2 positive and n/2 negative pairs drawn uniformly under the seed.
PairList build_pairs(const std::vector<SplitItem>& items, int n, std::uint64_t seed,
                     Split split = Split::test);

struct RocCurve {
    std::vector<double> thresholds;  // ascending; -inf and +inf sentinels included
    std::vector<double> tpr;
    std::vector<double> fpr;
};

// Decision convention: accept iff score >= threshold. Thresholds are the
// distinct scores plus the two infinite sentinels.
RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

// argmax of tpr - fpr, ties resolved to the smallest threshold.
double select_threshold(const RocCurve& curve);

double verification_accuracy(const std::vector<double>& scores, const std::vector<int>& labels,
                             double threshold);

struct RankTable {
    int n_gallery = 0;
    int k = 0;
    std::vector<std::vector<int>> indices;    // per probe, k gallery ids by descending score
    std::vector<std::vector<double>> scores;  // matching scores
};

// Scores every probe row against every gallery row by cosine; keeps the top
// k per probe, ties by ascending gallery index. Parallel over probes.
RankTable top_k(const NumericArray& probe_feats, const NumericArray& gallery_feats, int k);

// Fraction of probes whose own index appears in their top-k prefix
// (probe i's ground-truth gallery entry is row i).
double identification_accuracy(const RankTable& table, int k);

void export_roc_csv(const RocCurve& curve, const std::string& path);
void export_rank_csv(const RankTable& table, const std::string& path);
void export_pair_scores_csv(const PairList& pairs, const std::vector<double>& scores,
                            const std::string& path);

RocCurve load_roc_csv(const std::string& path);
RankTable load_rank_csv(const std::string& path);

}  // namespace difrec
