#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace whsboost {

enum class FeatureKind { continuous, categorical };

struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::continuous;
    // Categorical only. Order defines the value indices stored in Dataset.
    std::vector<std::string> vocabulary;
    // Closed vocabularies reject values outside `vocabulary` at load time;
    // open ones grow it in first-appearance order.
    bool closed_vocabulary = false;
};

struct FeatureSchema {
    std::vector<FeatureSpec> features;
    std::string label_column = "label";

    std::size_t feature_count() const { return features.size(); }
    const FeatureSpec& feature(std::size_t j) const { return features[j]; }
    void validate() const;
};

// Row-major flat storage; categorical cells hold the vocabulary index as a
// double. Labels are strictly +1 / -1, with +1 the minority ("positive")
// class under the loader's relabeling rule.
struct Dataset {
    FeatureSchema schema;
    std::vector<double> values;  // n_rows() * n_features()
    std::vector<int> labels;

    std::size_t n_rows() const { return labels.size(); }
    std::size_t n_features() const { return schema.features.size(); }

    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * n_features(), n_features()};
    }
    double at(std::size_t i, std::size_t j) const { return values[i * n_features() + j]; }

    void append_row(std::span<const double> x, int label);
    std::size_t count_label(int label) const;
    void validate() const;
};

// New dataset holding the given rows in the given order (indices may repeat).
Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows);

// Per-row nonnegative weights summing to 1 (absolute tolerance 1e-9).
// Construction validates; instances are immutable.
class WeightVector {
public:
    explicit WeightVector(std::vector<double> values);
    static WeightVector uniform(std::size_t n);
    // Rescales a nonnegative vector with positive sum to sum 1.
    static WeightVector renormalized(std::vector<double> raw);

    std::size_t size() const { return v_.size(); }
    double operator[](std::size_t i) const { return v_[i]; }
    const std::vector<double>& values() const { return v_; }

private:
    std::vector<double> v_;
};

struct Split {
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
};

struct ClassPartition {
    Dataset minority;  // the +1 rows
    Dataset majority;  // the -1 rows
    // Positions of those rows in the source dataset, in source order.
    std::vector<std::size_t> minority_rows;
    std::vector<std::size_t> majority_rows;
};

FeatureSchema load_schema(const std::string& path);
void save_schema(const FeatureSchema& schema, const std::string& path);

// JSON forms shared by the schema sidecar files and model serialization.
nlohmann::json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const nlohmann::json& j);

// CSV ingestion: header row must match schema column names (features in
// schema order plus the label column, any position). Empty cell = missing.
// Features with >30% missing cells are dropped; remaining missing cells are
// imputed (continuous: median; categorical: mode, ties to the lowest
// vocabulary index). The rarer label becomes +1 unless the file's labels are
// literally the two values +1/-1, which are kept as written.
Dataset load_csv_dataset(const std::string& csv_path, const std::string& schema_path);
void save_csv_dataset(const Dataset& data, const std::string& csv_path);

struct NormalizeOutput {
    Dataset train;
    std::vector<Dataset> others;
    // Names of train features with max == min (mapped to 0 everywhere).
    std::vector<std::string> constant_features;
};

// Rescales continuous features to [0,1] with min/max fitted on `train` only;
// the same affine map is applied to `others` (values there may leave [0,1]).
NormalizeOutput minmax_normalize(const Dataset& train, const std::vector<Dataset>& others);

// Per-class shuffle + cut: train gets round(train_fraction * class_size)
// rows of each class. Index lists come back sorted ascending.
Split stratified_split(const Dataset& data, double train_fraction, std::uint64_t seed);

ClassPartition partition_by_class(const Dataset& data);

// Shortest-round-trip decimal formatting used by every writer in the
// artifact, so outputs are byte-stable across runs.
std::string format_double(double x);

}  // namespace whsboost
