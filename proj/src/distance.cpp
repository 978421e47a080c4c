#include "whsboost/distance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "whsboost/parallel.hpp"

namespace whsboost {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double profile_distance(double pu, double pv) {
    // Two classes: (p_u - p_v)^2 + ((1-p_u) - (1-p_v))^2 = 2 (p_u - p_v)^2.
    double d = pu - pv;
    return 2.0 * d * d;
}
}  // namespace

VdmTable build_vdm_table(const Dataset& data, VdmOptions options) {
    if (data.n_rows() == 0) fail("build_vdm_table: empty dataset");
    if (data.count_label(+1) == 0 || data.count_label(-1) == 0)
        fail("build_vdm_table: single-class dataset");

    VdmTable table;
    table.entry_index_.assign(data.n_features(), -1);
    for (std::size_t j = 0; j < data.n_features(); ++j) {
        const auto& f = data.schema.features[j];
        if (f.kind != FeatureKind::categorical) continue;
        if (f.vocabulary.empty()) fail("build_vdm_table: empty vocabulary in feature " + f.name);

        VdmTable::FeatureEntry entry;
        entry.feature = j;
        entry.cardinality = f.vocabulary.size();
        std::vector<std::size_t> pos(entry.cardinality, 0), total(entry.cardinality, 0);
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            auto v = static_cast<std::size_t>(data.at(i, j));
            ++total[v];
            if (data.labels[i] > 0) ++pos[v];
        }
        entry.pos_prob.resize(entry.cardinality);
        for (std::size_t v = 0; v < entry.cardinality; ++v) {
            if (options.laplace_smoothing)
                entry.pos_prob[v] = (static_cast<double>(pos[v]) + 1.0) /
                                    (static_cast<double>(total[v]) + 2.0);
            else
                entry.pos_prob[v] = total[v] == 0
                                        ? 0.5
                                        : static_cast<double>(pos[v]) /
                                              static_cast<double>(total[v]);
        }
        entry.dist.resize(entry.cardinality * entry.cardinality);
        for (std::size_t u = 0; u < entry.cardinality; ++u)
            for (std::size_t v = 0; v < entry.cardinality; ++v)
                entry.dist[u * entry.cardinality + v] =
                    profile_distance(entry.pos_prob[u], entry.pos_prob[v]);

        table.entry_index_[j] = static_cast<int>(table.entries_.size());
        table.entries_.push_back(std::move(entry));
    }
    return table;
}

VdmTable VdmTable::from_entries(const FeatureSchema& schema,
                                std::vector<FeatureEntry> entries) {
    VdmTable table;
    table.entry_index_.assign(schema.feature_count(), -1);
    for (std::size_t e = 0; e < entries.size(); ++e) {
        const auto& entry = entries[e];
        if (entry.feature >= schema.feature_count() ||
            entry.pos_prob.size() != entry.cardinality ||
            entry.dist.size() != entry.cardinality * entry.cardinality)
            fail("from_entries: malformed VDM entry");
        table.entry_index_[entry.feature] = static_cast<int>(e);
    }
    table.entries_ = std::move(entries);
    return table;
}

double VdmTable::value_distance(std::size_t feature, double u, double v) const {
    int e = entry_index_.at(feature);
    if (e < 0) fail("value_distance on a continuous feature");
    const auto& entry = entries_[static_cast<std::size_t>(e)];
    auto in_range = [&](double x) {
        return x >= 0 && x < static_cast<double>(entry.cardinality) &&
               x == std::floor(x);
    };
    double pu = in_range(u) ? entry.pos_prob[static_cast<std::size_t>(u)] : 0.5;
    double pv = in_range(v) ? entry.pos_prob[static_cast<std::size_t>(v)] : 0.5;
    if (in_range(u) && in_range(v))
        return entry.dist[static_cast<std::size_t>(u) * entry.cardinality +
                          static_cast<std::size_t>(v)];
    return profile_distance(pu, pv);
}

double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema, const VdmTable& vdm) {
    if (a.size() != b.size() || a.size() != schema.feature_count())
        fail("mixed_distance: record width mismatch");
    double acc = 0;
    const auto& idx = vdm.entry_index();
    for (std::size_t j = 0; j < a.size(); ++j) {
        if (idx[j] < 0) {
            double d = a[j] - b[j];
            acc += d * d;
        } else {
            acc += vdm.value_distance(j, a[j], b[j]);
        }
    }
    return std::sqrt(acc);
}

NeighborList k_nearest_neighbors(const Dataset& pool, std::size_t anchor, std::size_t k,
                                 const VdmTable& vdm) {
    const std::size_t n = pool.n_rows();
    if (n < 2) fail("k_nearest_neighbors: pool needs at least 2 rows");
    if (k < 1) fail("k_nearest_neighbors: k must be >= 1");

    NeighborList list;
    list.anchor = anchor;
    list.neighbors.reserve(n - 1);
    auto a = pool.row(anchor);
    for (std::size_t i = 0; i < n; ++i) {
        if (i == anchor) continue;
        list.neighbors.push_back({i, mixed_distance(a, pool.row(i), pool.schema, vdm)});
    }
    auto cmp = [](const Neighbor& x, const Neighbor& y) {
        return x.distance != y.distance ? x.distance < y.distance : x.index < y.index;
    };
    std::size_t keep = std::min(k, list.neighbors.size());
    std::partial_sort(list.neighbors.begin(),
                      list.neighbors.begin() + static_cast<std::ptrdiff_t>(keep),
                      list.neighbors.end(), cmp);
    list.neighbors.resize(keep);
    return list;
}

std::vector<NeighborList> all_k_nearest_neighbors(const Dataset& pool, std::size_t k,
                                                  const VdmTable& vdm) {
    const auto n = static_cast<std::ptrdiff_t>(pool.n_rows());
    std::vector<NeighborList> out(pool.n_rows());
    if (parallel::use_parallel()) {
#ifdef WHSBOOST_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel::worker_count())
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] =
                k_nearest_neighbors(pool, static_cast<std::size_t>(i), k, vdm);
#endif
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            out[static_cast<std::size_t>(i)] =
                k_nearest_neighbors(pool, static_cast<std::size_t>(i), k, vdm);
    }
    return out;
}

}  // namespace whsboost
