#pragma once

#include <string>
#include <vector>

#include "difrec/layers.hpp"

namespace difrec {

/// One row of an attribute file: a sample id plus ±1 flags, one per
/// attribute name in the owning table's header.
struct AttributeRecord {
    std::string sample_id;
    std::vector<int> flags;
};

/// Parsed attribute file: header names plus records. count_header records
/// whether the source file carried a CelebA-style leading row-count line, so
/// re-serialization round-trips either layout.
struct AttributeTable {
    std::vector<std::string> names;
    std::vector<AttributeRecord> records;
    bool count_header = false;
};

/// Identity-relevant ±1 flags in mask order; the conditioning input p.
struct PromptVector {
    std::vector<int> selected;

    int size() const { return static_cast<int>(selected.size()); }
    bool operator==(const PromptVector& o) const { return selected == o.selected; }
};

AttributeTable load_attribute_file(const std::string& path);
void save_attribute_file(const AttributeTable& table, const std::string& path);

// Indices of mask names within table.names, in mask order.
std::vector<int> resolve_attribute_mask(const AttributeTable& table,
                                        const std::vector<std::string>& mask);
PromptVector select_identity_relevant(const AttributeTable& table, const AttributeRecord& record,
                                      const std::vector<std::string>& mask);

// The default identity-relevant attribute subset (18 CelebA names).
const std::vector<std::string>& default_attribute_mask();

/// Learned stand-in for the tokenizer: one d_p-dim table row per
/// (attribute, polarity), concatenated and linearly projected to d_c.
struct PromptEmbedder {
    int K = 0;
    int d_p = 0;
    int d_c = 0;
    Parameter table;    // [K*2 x d_p]; row 2k is attribute k negative, 2k+1 positive
    Linear projection;  // K*d_p -> d_c

    PromptEmbedder(int K_, int d_p_, int d_c_);

    void init(Rng& rng);

    // Concatenated table rows for a batch of prompts: [B x K*d_p].
    NumericArray gather(const std::vector<PromptVector>& ps, bool use_ema = false) const;
    NumericArray embed_batch(const std::vector<PromptVector>& ps, bool use_ema = false) const;
    NumericArray embed(const PromptVector& p, bool use_ema = false) const;  // [1 x d_c]

    // Backward through projection and table for the batch that produced
    // `gathered`; accumulates grads.
    void backward(const std::vector<PromptVector>& ps, const NumericArray& gathered,
                  const NumericArray& g);

    std::vector<Parameter*> parameters();
};

}  // namespace difrec
