#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "whsboost/classifiers.hpp"
#include "whsboost/dataset.hpp"
#include "whsboost/ensemble.hpp"

namespace whsboost {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
};

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& truths);

struct MetricReport {
    double accuracy = 0;
    double recall = 0;
    double precision = 0;
    double f_beta = 0;
    double beta = 3;
    double auc = 0;  // filled by the caller from roc_auc when scores exist
};

// Both classes must appear in the truths behind `cm`.
MetricReport compute_metrics(const ConfusionMatrix& cm, double beta);

// Rank-based (Mann-Whitney) AUC with midranks for tied scores.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& truths);

enum class RankBasis { negative, positive };

struct WilcoxonResult {
    std::size_t n_effective = 0;  // pairs left after dropping zero differences
    double w_plus = 0;
    double w_minus = 0;
    double z = 0;           // tie-corrected normal statistic on min(W+, W-)
    double p_two_sided = 1;  // exact enumeration when n_effective <= 12
    double p_normal = 1;     // the normal-approximation p, always filled
    bool exact = false;
    RankBasis rank_basis = RankBasis::positive;  // negative <=> W- < W+
};

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

struct SimulationSpec {
    std::size_t n_total = 1000;
    std::size_t p = 25;   // feature count
    std::size_t p0 = 8;   // features with nonzero coefficients
    double minority_fraction = 0.1;
    std::size_t oversample_pool = 5000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimulationOutput {
    Dataset data;
    // Length p; zero outside the effective set. Oriented so that every
    // emitted label equals sgn(beta . x).
    std::vector<double> beta;
    std::vector<std::size_t> effective;  // ascending feature indices
    std::size_t pool_positive = 0;       // pool-side label counts pre-subsampling
    std::size_t pool_negative = 0;
    std::vector<double> pool_feature_means;
};

SimulationOutput simulate_dataset(const SimulationSpec& spec);

// 80/20 stratified tuning split; the tuning-train side is SMOTE-rebalanced
// before fitting; grid points are scored by verification accuracy, ties
// going to the earlier entry.
ClassifierSpec grid_search_tune(const Dataset& tuning_data,
                                const std::vector<ClassifierSpec>& grid, std::uint64_t seed);

enum class PipelineMethod {
    nothing,      // base classifier on the raw training split
    smote,        // SMOTE-rebalanced training split, single classifier
    undersample,  // majority cut down to the minority size, single classifier
    hybrid,       // hybrid resample to N per class, single classifier
    adaboost,
    smoteboost,
    hsboost,
    whsboost
};

std::string pipeline_method_name(PipelineMethod method);
PipelineMethod pipeline_method_from_name(const std::string& name);

struct PipelineSpec {
    std::string name;  // column label in outputs
    PipelineMethod method = PipelineMethod::whsboost;
    BoostConfig config;
};

struct RepetitionResult {
    int repetition = 0;
    double recall = 0;
    double precision = 0;
    double f_beta = 0;
    double auc = 0;
    double wallclock_ms = 0;
};

struct MetricSummary {
    double mean = 0;
    double stddev = 0;  // sample stddev; 0 when a single repetition
};

struct PipelineColumn {
    PipelineSpec spec;
    std::vector<RepetitionResult> rows;  // empty when failed
    bool failed = false;
    std::string error;  // message from the lowest-index failing repetition
    MetricSummary recall, precision, f_beta, auc;
};

struct ExperimentResult {
    std::vector<PipelineColumn> columns;
    int repetitions = 0;
    double beta = 3;
};

// Paired protocol: repetition r uses one stratified split shared by every
// pipeline; normalization is fitted on the train side and the VDM table is
// built on the (normalized) train side. Repetitions may run concurrently;
// assembly is ordered by repetition index.
ExperimentResult run_experiment(const Dataset& data, const std::vector<PipelineSpec>& pipelines,
                                int repetitions, double train_fraction, double beta,
                                std::uint64_t seed);

}  // namespace whsboost
