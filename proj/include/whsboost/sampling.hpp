#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "whsboost/dataset.hpp"
#include "whsboost/distance.hpp"

namespace whsboost {

struct SynthesisPlan {
    std::vector<std::size_t> counts;  // one per minority row
    std::size_t total = 0;
};

// Per-row synthetic sample counts: round(n_syn * w_i) half away from zero,
// then repaired so the total is exactly n_syn. Repair walks the rows in
// descending-weight order (stable, ties keep row order): a deficit
// increments entries from the front of that order, a surplus decrements
// nonzero entries from the back.
SynthesisPlan allocate_synthesis_counts(const WeightVector& weights, std::size_t n_syn);

struct WsmoteOptions {
    // The sampler interpolates s = x + r (e - x). Setting literal_formula
    // flips the sign to s = x + r (x - e), extrapolating away from the
    // neighbor; kept selectable because both conventions appear in the
    // literature.
    bool literal_formula = false;
};

// Weighted SMOTE: grows `minority` to exactly n_target rows. Synthesis
// counts come from allocate_synthesis_counts over the weights; each
// synthetic row blends its anchor with a drawn k-neighbor (continuous
// features), while categorical features take the majority vote over the
// anchor's drawn neighbors, anchor value breaking ties. Synthetic labels
// are +1. Deterministic per seed.
Dataset wsmote(const Dataset& minority, const WeightVector& weights, std::size_t n_target,
               std::size_t k, const VdmTable& vdm, std::uint64_t seed,
               WsmoteOptions options = {});

// Weighted under-sampling: keeps exactly n_keep of the majority rows.
// The elimination pool is the round((1+c) * n_elim) lowest-weight rows
// (ascending weight, ties by row index); n_elim rows are then removed from
// the pool uniformly without replacement. Survivors keep input order.
Dataset wusample(const Dataset& majority, const WeightVector& weights, std::size_t n_keep,
                 double c, std::uint64_t seed);

// Classic SMOTE == wsmote with uniform weights.
Dataset smote_baseline(const Dataset& minority, std::size_t n_target, std::size_t k,
                       const VdmTable& vdm, std::uint64_t seed);

// Uniform without-replacement retention of n_keep rows.
Dataset random_undersample(const Dataset& majority, std::size_t n_keep, std::uint64_t seed);

// The ascending row indices random_undersample(seed) keeps, for callers
// that must map retained rows back to the source (e.g. weight bookkeeping).
std::vector<std::size_t> random_undersample_indices(std::size_t n, std::size_t n_keep,
                                                    std::uint64_t seed);

// SMOTE the minority up and random-undersample the majority down to
// n_per_class each; returns the balanced union (minority block first).
Dataset hybrid_sample_baseline(const Dataset& data, std::size_t n_per_class, std::size_t k,
                               const VdmTable& vdm, std::uint64_t seed);

// SMOTE the minority up to the majority size and keep the majority as is
// (minority block first). The full-rebalance step shared by SMOTE-style
// pipelines and grid-search tuning.
Dataset smote_rebalance(const Dataset& data, std::size_t k, const VdmTable& vdm,
                        std::uint64_t seed);

}  // namespace whsboost
