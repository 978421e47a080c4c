#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "whsboost/dataset.hpp"

namespace whsboost {

struct VdmOptions {
    // Laplace smoothing of the class-conditional frequencies
    // (count+1)/(total+2). Disabled only by test fixtures that hand-count
    // raw frequencies.
    bool laplace_smoothing = true;
};

// Precomputed two-class value-difference distances for every categorical
// feature of a schema. Built once on the full training set and shared
// read-only afterwards.
class VdmTable {
public:
    struct FeatureEntry {
        std::size_t feature = 0;     // column index in the schema
        std::size_t cardinality = 0;
        std::vector<double> pos_prob;  // smoothed P(+1 | value)
        std::vector<double> dist;      // cardinality x cardinality, row-major
    };

    // -1 for continuous features, else index into entries().
    const std::vector<int>& entry_index() const { return entry_index_; }
    const std::vector<FeatureEntry>& entries() const { return entries_; }

    // Distance between two raw cell values of a categorical feature. Values
    // outside the trained vocabulary act as a virtual value with uniform
    // class profile (0.5, 0.5).
    double value_distance(std::size_t feature, double u, double v) const;

    // Reassembles a table from persisted entries (model deserialization).
    static VdmTable from_entries(const FeatureSchema& schema,
                                 std::vector<FeatureEntry> entries);

    friend VdmTable build_vdm_table(const Dataset& full_training_data, VdmOptions options);

private:
    std::vector<int> entry_index_;
    std::vector<FeatureEntry> entries_;
};

// VDM(u,v) = sum over classes c of (P(c|u) - P(c|v))^2, frequencies taken
// from the full training data (both classes).
VdmTable build_vdm_table(const Dataset& full_training_data, VdmOptions options = {});

// sqrt( sum of squared continuous gaps + sum of raw VDM terms ).
// Symmetric with zero self-distance; the triangle inequality is NOT
// guaranteed (the VDM terms enter unsquared).
double mixed_distance(std::span<const double> a, std::span<const double> b,
                      const FeatureSchema& schema, const VdmTable& vdm);

struct Neighbor {
    std::size_t index = 0;
    double distance = 0;
};

struct NeighborList {
    std::size_t anchor = 0;
    std::vector<Neighbor> neighbors;  // ascending (distance, index)
};

// The min(k, n-1) nearest pool rows to pool[anchor], excluding the anchor
// itself; ties broken by lower row index.
NeighborList k_nearest_neighbors(const Dataset& pool, std::size_t anchor, std::size_t k,
                                 const VdmTable& vdm);

// Neighbor lists for every pool row. Runs the per-anchor queries across
// OpenMP workers when parallel dispatch is enabled; results are identical
// to the serial path either way.
std::vector<NeighborList> all_k_nearest_neighbors(const Dataset& pool, std::size_t k,
                                                  const VdmTable& vdm);

}  // namespace whsboost
