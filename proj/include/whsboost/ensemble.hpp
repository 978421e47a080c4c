#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "whsboost/classifiers.hpp"
#include "whsboost/dataset.hpp"
#include "whsboost/distance.hpp"
#include "whsboost/sampling.hpp"

namespace whsboost {

enum class BoostMethod { whsboost, adaboost, smoteboost, hsboost };

std::string boost_method_name(BoostMethod method);
BoostMethod boost_method_from_name(const std::string& name);

struct BoostConfig {
    int iterations = 20;
    // Per-class size of the balanced temporary set. 0 means automatic:
    // round((n_min + n_maj) / 2). Must land in [n_min, n_maj].
    std::size_t balanced_size = 0;
    std::size_t smote_k = 5;
    double pool_constant = 0.5;  // elimination-pool slack for wusample
    ClassifierSpec base;
    // Boosting stops once an iteration's error is <= this. The default 0
    // only fires on a perfect round.
    double error_threshold = 0.0;
    int max_retries = 5;  // redraws allowed when a round's error is >= 0.5
    std::uint64_t seed = 1;
    WsmoteOptions wsmote;

    void validate() const;
    nlohmann::json to_json() const;
    static BoostConfig from_json(const nlohmann::json& j);
};

// Per-retained-member training diagnostics, in training order.
struct BoostIteration {
    int iteration = 0;  // 0-based
    int retries = 0;    // sampling redraws burned before acceptance
    double epsilon = 0;
    double alpha = 0;
    std::size_t temp_positive = 0;  // class sizes of the temporary set
    std::size_t temp_negative = 0;
    double weight_sum_after = 0;  // diagnostics on D_{t+1}
    double weight_min_after = 0;
};

struct TrainedEnsemble {
    FeatureSchema schema;
    BoostMethod method = BoostMethod::whsboost;
    BoostConfig config;
    std::vector<double> alphas;
    std::vector<std::unique_ptr<Classifier>> members;
    std::vector<BoostIteration> history;

    // Weighted vote: sum of alpha_t * h_t(x) with h_t(x) in {+1,-1}.
    double score(std::span<const double> x) const;
    int predict(std::span<const double> x) const;  // sign(score), 0 -> +1

    nlohmann::json to_json() const;
    static TrainedEnsemble from_json(const nlohmann::json& j);
};

void save_ensemble(const TrainedEnsemble& ensemble, const std::string& path);
TrainedEnsemble load_ensemble(const std::string& path);

// Scores every row of `queries`; parallel across rows when workers allow.
std::vector<double> ensemble_score_batch(const TrainedEnsemble& ensemble, const Dataset& queries);
std::vector<int> ensemble_predict_batch(const TrainedEnsemble& ensemble, const Dataset& queries);

// Resolves config.balanced_size: 0 means round((n_min + n_maj) / 2); the
// result must land in [n_min, n_maj].
std::size_t balanced_per_class_size(const BoostConfig& config, std::size_t n_min,
                                    std::size_t n_maj);

// Weighted misclassification rate of `predictions` against `labels`.
double pseudo_loss(const WeightVector& weights, const std::vector<int>& predictions,
                   const std::vector<int>& labels);

// alpha = 0.5 * ln((1 - eps) / eps), eps clamped to [1e-10, 1 - 1e-10].
double classifier_weight_alpha(double epsilon);

// Misclassified weights grow by e^alpha, the rest stay put; renormalized.
WeightVector update_sample_weights(const WeightVector& weights, double alpha,
                                   const std::vector<bool>& misclassified);

// n i.i.d. draws from data with row probabilities `weights` (replacement).
Dataset weight_based_resample(const Dataset& data, const WeightVector& weights,
                              std::uint64_t seed);

TrainedEnsemble whsboost_train(const Dataset& data, const BoostConfig& config,
                               const VdmTable& vdm);
TrainedEnsemble adaboost_resample_train(const Dataset& data, const BoostConfig& config,
                                        const VdmTable& vdm);
TrainedEnsemble smoteboost_train(const Dataset& data, const BoostConfig& config,
                                 const VdmTable& vdm);
TrainedEnsemble hsboost_train(const Dataset& data, const BoostConfig& config,
                              const VdmTable& vdm);

TrainedEnsemble boost_train(const Dataset& data, BoostMethod method, const BoostConfig& config,
                            const VdmTable& vdm);

}  // namespace whsboost
