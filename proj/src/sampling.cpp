#include "whsboost/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "whsboost/rng.hpp"

namespace whsboost {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<std::size_t> descending_weight_order(const WeightVector& w) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    return order;
}
}  // namespace

SynthesisPlan allocate_synthesis_counts(const WeightVector& weights, std::size_t n_syn) {
    const std::size_t n = weights.size();
    SynthesisPlan plan;
    plan.counts.resize(n);
    long long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto c = std::llround(static_cast<double>(n_syn) * weights[i]);
        plan.counts[i] = static_cast<std::size_t>(c);
        total += c;
    }
    auto order = descending_weight_order(weights);
    long long target = static_cast<long long>(n_syn);
    if (total < target) {
        // Deficit: top up the highest-weight rows first.
        std::size_t at = 0;
        while (total < target) {
            ++plan.counts[order[at % n]];
            ++at;
            ++total;
        }
    } else if (total > target) {
        // Surplus: strip the lowest-weight rows first, skipping empty ones.
        std::size_t at = 0;
        while (total > target) {
            std::size_t row = order[n - 1 - (at % n)];
            ++at;
            if (plan.counts[row] == 0) continue;
            --plan.counts[row];
            --total;
        }
    }
    plan.total = n_syn;
    return plan;
}

Dataset wsmote(const Dataset& minority, const WeightVector& weights, std::size_t n_target,
               std::size_t k, const VdmTable& vdm, std::uint64_t seed,
               WsmoteOptions options) {
    const std::size_t n = minority.n_rows();
    if (weights.size() != n) fail("wsmote: weight/row count mismatch");
    if (n_target < n) fail("wsmote: n_target below current minority size");
    if (n_target == n) return minority;
    if (n < 2) fail("wsmote: need at least 2 minority rows to synthesize");
    if (k < 1) fail("wsmote: k must be >= 1");

    SynthesisPlan plan = allocate_synthesis_counts(weights, n_target - n);
    auto neighbor_lists = all_k_nearest_neighbors(minority, k, vdm);

    Dataset out = minority;
    out.values.reserve(n_target * minority.n_features());
    out.labels.reserve(n_target);

    Rng rng(seed);
    const std::size_t m = minority.n_features();
    std::vector<double> synth(m);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cnt = plan.counts[i];
        if (cnt == 0) continue;
        const auto& ne = neighbor_lists[i].neighbors;

        // Draw the anchor's neighbor multiset up front: distinct picks while
        // they fit in the k-list, with replacement once cnt exceeds it.
        std::vector<std::size_t> chosen(cnt);
        if (cnt <= ne.size()) {
            auto picks = rng.sample_without_replacement(ne.size(), cnt);
            for (std::size_t s = 0; s < cnt; ++s) chosen[s] = ne[picks[s]].index;
        } else {
            for (std::size_t s = 0; s < cnt; ++s) chosen[s] = ne[rng.below(ne.size())].index;
        }

        // Categorical cells are voted once per anchor over the drawn
        // neighbors; a tied vote falls back to the anchor's value.
        std::vector<double> voted(m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            if (minority.schema.features[j].kind != FeatureKind::categorical) continue;
            std::vector<std::size_t> tally(minority.schema.features[j].vocabulary.size(), 0);
            for (std::size_t e : chosen) ++tally[static_cast<std::size_t>(minority.at(e, j))];
            std::size_t best = 0;
            bool tie = false;
            for (std::size_t v = 1; v < tally.size(); ++v) {
                if (tally[v] > tally[best]) {
                    best = v;
                    tie = false;
                } else if (tally[v] == tally[best]) {
                    tie = true;
                }
            }
            voted[j] = tie ? minority.at(i, j) : static_cast<double>(best);
        }

        auto anchor = minority.row(i);
        for (std::size_t s = 0; s < cnt; ++s) {
            auto e = minority.row(chosen[s]);
            double r = rng.uniform();
            for (std::size_t j = 0; j < m; ++j) {
                if (minority.schema.features[j].kind == FeatureKind::categorical) {
                    synth[j] = voted[j];
                } else if (options.literal_formula) {
                    synth[j] = anchor[j] + r * (anchor[j] - e[j]);
                } else {
                    synth[j] = anchor[j] + r * (e[j] - anchor[j]);
                }
            }
            out.append_row(synth, +1);
        }
    }
    return out;
}

Dataset wusample(const Dataset& majority, const WeightVector& weights, std::size_t n_keep,
                 double c, std::uint64_t seed) {
    const std::size_t n = majority.n_rows();
    if (weights.size() != n) fail("wusample: weight/row count mismatch");
    if (n_keep == 0 || n_keep > n) fail("wusample: n_keep out of range");
    if (!(c >= 0 && c <= 1)) fail("wusample: c must lie in [0,1]");
    if (n_keep == n) return majority;

    const std::size_t n_elim = n - n_keep;
    auto pool_size = static_cast<std::size_t>(
        std::llround((1.0 + c) * static_cast<double>(n_elim)));
    pool_size = std::min(pool_size, n);

    // Ascending-weight candidate pool, ties by row index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return weights[a] < weights[b]; });

    Rng rng(seed);
    std::vector<bool> eliminated(n, false);
    for (std::size_t pick : rng.sample_without_replacement(pool_size, n_elim))
        eliminated[order[pick]] = true;

    std::vector<std::size_t> survivors;
    survivors.reserve(n_keep);
    for (std::size_t i = 0; i < n; ++i)
        if (!eliminated[i]) survivors.push_back(i);
    return subset_rows(majority, survivors);
}

Dataset smote_baseline(const Dataset& minority, std::size_t n_target, std::size_t k,
                       const VdmTable& vdm, std::uint64_t seed) {
    return wsmote(minority, WeightVector::uniform(minority.n_rows()), n_target, k, vdm, seed);
}

std::vector<std::size_t> random_undersample_indices(std::size_t n, std::size_t n_keep,
                                                    std::uint64_t seed) {
    if (n_keep == 0 || n_keep > n) fail("random_undersample: n_keep out of range");
    if (n_keep == n) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        return all;
    }
    Rng rng(seed);
    auto kept = rng.sample_without_replacement(n, n_keep);
    std::sort(kept.begin(), kept.end());
    return kept;
}

Dataset random_undersample(const Dataset& majority, std::size_t n_keep, std::uint64_t seed) {
    return subset_rows(majority, random_undersample_indices(majority.n_rows(), n_keep, seed));
}

Dataset hybrid_sample_baseline(const Dataset& data, std::size_t n_per_class, std::size_t k,
                               const VdmTable& vdm, std::uint64_t seed) {
    ClassPartition part = partition_by_class(data);
    const std::size_t n_min = part.minority.n_rows();
    const std::size_t n_maj = part.majority.n_rows();
    if (n_per_class < n_min || n_per_class > n_maj)
        fail("hybrid_sample_baseline: n_per_class outside [minority size, majority size]");

    Dataset up = smote_baseline(part.minority, n_per_class, k, vdm, derive_seed(seed, 1));
    Dataset down = random_undersample(part.majority, n_per_class, derive_seed(seed, 2));
    Dataset out = up;
    for (std::size_t i = 0; i < down.n_rows(); ++i) out.append_row(down.row(i), down.labels[i]);
    return out;
}

Dataset smote_rebalance(const Dataset& data, std::size_t k, const VdmTable& vdm,
                        std::uint64_t seed) {
    ClassPartition part = partition_by_class(data);
    Dataset out = smote_baseline(part.minority, part.majority.n_rows(), k, vdm, seed);
    for (std::size_t i = 0; i < part.majority.n_rows(); ++i)
        out.append_row(part.majority.row(i), part.majority.labels[i]);
    return out;
}

}  // namespace whsboost
