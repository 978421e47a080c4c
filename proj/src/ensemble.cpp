#include "whsboost/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>

#include "whsboost/rng.hpp"

namespace whsboost {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Renormalized slice of the global weight vector at the given row positions.
WeightVector slice_weights(const WeightVector& weights, const std::vector<std::size_t>& rows) {
    std::vector<double> raw(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) raw[i] = weights[rows[i]];
    return WeightVector::renormalized(raw);
}

void require_two_classes(const Dataset& data, const char* who) {
    if (data.count_label(+1) == 0 || data.count_label(-1) == 0)
        fail(std::string(who) + ": both classes must be present");
}

// Builds one attempt's temporary training set; attempt_seed is already
// unique per (iteration, retry).
using TempSetBuilder = std::function<Dataset(const WeightVector&, std::uint64_t)>;

TrainedEnsemble run_boost(const Dataset& data, BoostMethod method, const BoostConfig& config,
                          const VdmTable& vdm, const TempSetBuilder& build_temp) {
    config.validate();
    data.validate();

    TrainedEnsemble ensemble;
    ensemble.schema = data.schema;
    ensemble.method = method;
    ensemble.config = config;

    WeightVector weights = WeightVector::uniform(data.n_rows());
    for (int t = 0; t < config.iterations; ++t) {
        bool accepted = false;
        for (int retry = 0; retry <= config.max_retries; ++retry) {
            std::uint64_t attempt_seed =
                derive_seed(config.seed, static_cast<std::uint64_t>(t),
                            static_cast<std::uint64_t>(retry));
            Dataset temp = build_temp(weights, attempt_seed);

            ClassifierSpec spec = config.base;
            if (spec.kind == ClassifierKind::bpnn)
                spec.bpnn_init_seed = derive_seed(attempt_seed, 3);
            auto model = train_classifier(temp, spec, vdm);

            // Loss is always taken on the full original data with the
            // current global weights, never on the temporary set.
            auto predictions = predict_batch(*model, data);
            double epsilon = pseudo_loss(weights, predictions, data.labels);
            if (epsilon >= 0.5) continue;  // would earn alpha <= 0: redraw

            double alpha = classifier_weight_alpha(epsilon);
            std::vector<bool> wrong(data.n_rows());
            for (std::size_t i = 0; i < wrong.size(); ++i)
                wrong[i] = predictions[i] != data.labels[i];
            weights = update_sample_weights(weights, alpha, wrong);

            BoostIteration info;
            info.iteration = static_cast<int>(ensemble.members.size());
            info.retries = retry;
            info.epsilon = epsilon;
            info.alpha = alpha;
            info.temp_positive = temp.count_label(+1);
            info.temp_negative = temp.count_label(-1);
            info.weight_sum_after = 0;
            info.weight_min_after = weights[0];
            for (std::size_t i = 0; i < weights.size(); ++i) {
                info.weight_sum_after += weights[i];
                info.weight_min_after = std::min(info.weight_min_after, weights[i]);
            }

            ensemble.members.push_back(std::move(model));
            ensemble.alphas.push_back(alpha);
            ensemble.history.push_back(info);
            accepted = true;
            break;
        }
        if (!accepted) break;  // retries exhausted: keep what we have
        if (ensemble.history.back().epsilon <= config.error_threshold) break;
    }
    if (ensemble.members.empty())
        fail("boost: every round was rejected (weighted error stayed >= 0.5)");
    return ensemble;
}

double minority_weight_mass(const WeightVector& weights, const std::vector<std::size_t>& rows) {
    double mass = 0;
    for (std::size_t idx : rows) mass += weights[idx];
    return mass;
}

}  // namespace

std::string boost_method_name(BoostMethod method) {
    switch (method) {
        case BoostMethod::whsboost: return "whsboost";
        case BoostMethod::adaboost: return "adaboost";
        case BoostMethod::smoteboost: return "smoteboost";
        case BoostMethod::hsboost: return "hsboost";
    }
    fail("unknown boost method");
}

BoostMethod boost_method_from_name(const std::string& name) {
    if (name == "whsboost") return BoostMethod::whsboost;
    if (name == "adaboost") return BoostMethod::adaboost;
    if (name == "smoteboost") return BoostMethod::smoteboost;
    if (name == "hsboost") return BoostMethod::hsboost;
    fail("unknown boost method: " + name);
}

std::size_t balanced_per_class_size(const BoostConfig& config, std::size_t n_min,
                                    std::size_t n_maj) {
    std::size_t n = config.balanced_size;
    if (n == 0) n = static_cast<std::size_t>(std::llround((n_min + n_maj) / 2.0));
    if (n < n_min || n > n_maj)
        fail("boost: balanced per-class size outside [minority size, majority size]");
    return n;
}

void BoostConfig::validate() const {
    if (iterations < 1) fail("boost config: iterations must be >= 1");
    if (error_threshold < 0 || error_threshold >= 0.5)
        fail("boost config: error_threshold outside [0, 0.5)");
    if (max_retries < 0) fail("boost config: max_retries must be >= 0");
    if (smote_k < 1) fail("boost config: smote_k must be >= 1");
    if (pool_constant < 0 || pool_constant > 1)
        fail("boost config: pool_constant outside [0, 1]");
    base.validate();
}

nlohmann::json BoostConfig::to_json() const {
    return {{"iterations", iterations},
            {"balanced_size", balanced_size},
            {"smote_k", smote_k},
            {"pool_constant", pool_constant},
            {"base", base.to_json()},
            {"error_threshold", error_threshold},
            {"max_retries", max_retries},
            {"seed", seed},
            {"wsmote_literal_formula", wsmote.literal_formula}};
}

BoostConfig BoostConfig::from_json(const nlohmann::json& j) {
    BoostConfig config;
    config.iterations = j.value("iterations", config.iterations);
    config.balanced_size = j.value("balanced_size", config.balanced_size);
    config.smote_k = j.value("smote_k", config.smote_k);
    config.pool_constant = j.value("pool_constant", config.pool_constant);
    if (j.contains("base")) config.base = ClassifierSpec::from_json(j.at("base"));
    config.error_threshold = j.value("error_threshold", config.error_threshold);
    config.max_retries = j.value("max_retries", config.max_retries);
    config.seed = j.value("seed", config.seed);
    config.wsmote.literal_formula =
        j.value("wsmote_literal_formula", config.wsmote.literal_formula);
    return config;
}

double TrainedEnsemble::score(std::span<const double> x) const {
    if (members.empty()) fail("ensemble is empty");
    double s = 0;
    for (std::size_t t = 0; t < members.size(); ++t)
        s += alphas[t] * members[t]->predict(x);
    return s;
}

int TrainedEnsemble::predict(std::span<const double> x) const {
    return score(x) >= 0 ? +1 : -1;
}

nlohmann::json TrainedEnsemble::to_json() const {
    nlohmann::json member_list = nlohmann::json::array();
    for (const auto& m : members) member_list.push_back(m->to_json());
    nlohmann::json history_list = nlohmann::json::array();
    for (const auto& h : history)
        history_list.push_back({{"iteration", h.iteration},
                                {"retries", h.retries},
                                {"epsilon", h.epsilon},
                                {"alpha", h.alpha},
                                {"temp_positive", h.temp_positive},
                                {"temp_negative", h.temp_negative},
                                {"weight_sum_after", h.weight_sum_after},
                                {"weight_min_after", h.weight_min_after}});
    return {{"format", "whsboost-ensemble"},
            {"version", 1},
            {"method", boost_method_name(method)},
            {"config", config.to_json()},
            {"schema", schema_to_json(schema)},
            {"alphas", alphas},
            {"members", member_list},
            {"history", history_list}};
}

TrainedEnsemble TrainedEnsemble::from_json(const nlohmann::json& j) {
    if (j.value("format", "") != "whsboost-ensemble")
        fail("ensemble file: unrecognized format tag");
    if (j.value("version", 0) != 1) fail("ensemble file: unsupported version");
    TrainedEnsemble ensemble;
    ensemble.schema = schema_from_json(j.at("schema"));
    ensemble.method = boost_method_from_name(j.at("method").get<std::string>());
    ensemble.config = BoostConfig::from_json(j.at("config"));
    ensemble.alphas = j.at("alphas").get<std::vector<double>>();
    for (const auto& jm : j.at("members"))
        ensemble.members.push_back(classifier_from_json(jm));
    if (ensemble.members.size() != ensemble.alphas.size())
        fail("ensemble file: alpha/member count mismatch");
    for (const auto& jh : j.value("history", nlohmann::json::array())) {
        BoostIteration h;
        h.iteration = jh.value("iteration", 0);
        h.retries = jh.value("retries", 0);
        h.epsilon = jh.value("epsilon", 0.0);
        h.alpha = jh.value("alpha", 0.0);
        h.temp_positive = jh.value("temp_positive", std::size_t{0});
        h.temp_negative = jh.value("temp_negative", std::size_t{0});
        h.weight_sum_after = jh.value("weight_sum_after", 0.0);
        h.weight_min_after = jh.value("weight_min_after", 0.0);
        ensemble.history.push_back(h);
    }
    return ensemble;
}

void save_ensemble(const TrainedEnsemble& ensemble, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write ensemble file: " + path);
    out << ensemble.to_json().dump(2) << '\n';
}

TrainedEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot read ensemble file: " + path);
    return TrainedEnsemble::from_json(nlohmann::json::parse(in));
}

std::vector<double> ensemble_score_batch(const TrainedEnsemble& ensemble, const Dataset& queries) {
    if (ensemble.members.empty()) fail("ensemble is empty");
    std::vector<double> out(queries.n_rows(), 0.0);
    for (std::size_t t = 0; t < ensemble.members.size(); ++t) {
        auto votes = predict_batch(*ensemble.members[t], queries);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += ensemble.alphas[t] * votes[i];
    }
    return out;
}

std::vector<int> ensemble_predict_batch(const TrainedEnsemble& ensemble, const Dataset& queries) {
    auto scores = ensemble_score_batch(ensemble, queries);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= 0 ? +1 : -1;
    return labels;
}

double pseudo_loss(const WeightVector& weights, const std::vector<int>& predictions,
                   const std::vector<int>& labels) {
    if (predictions.size() != weights.size() || labels.size() != weights.size())
        fail("pseudo_loss: length mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        den += weights[i];
        if (predictions[i] != labels[i]) num += weights[i];
    }
    return num / den;
}

double classifier_weight_alpha(double epsilon) {
    double e = std::clamp(epsilon, 1e-10, 1.0 - 1e-10);
    return 0.5 * std::log((1.0 - e) / e);
}

WeightVector update_sample_weights(const WeightVector& weights, double alpha,
                                   const std::vector<bool>& misclassified) {
    if (misclassified.size() != weights.size()) fail("update_sample_weights: length mismatch");
    const double grow = std::exp(alpha);
    std::vector<double> raw(weights.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = misclassified[i] ? weights[i] * grow : weights[i];
    return WeightVector::renormalized(raw);
}

Dataset weight_based_resample(const Dataset& data, const WeightVector& weights,
                              std::uint64_t seed) {
    if (weights.size() != data.n_rows()) fail("weight_based_resample: weight/row mismatch");
    std::vector<double> cumulative(weights.size());
    double acc = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        cumulative[i] = acc;
    }
    cumulative.back() = 1.0;  // close the float shortfall so every u < 1 lands

    Rng rng(seed);
    std::vector<std::size_t> draws(data.n_rows());
    for (std::size_t d = 0; d < draws.size(); ++d) {
        double u = rng.uniform();
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        draws[d] = static_cast<std::size_t>(it - cumulative.begin());
    }
    return subset_rows(data, draws);
}

TrainedEnsemble whsboost_train(const Dataset& data, const BoostConfig& config,
                               const VdmTable& vdm) {
    require_two_classes(data, "whsboost");
    ClassPartition part = partition_by_class(data);
    if (part.minority.n_rows() < 2) fail("whsboost: minority class needs at least 2 rows");
    const std::size_t n =
        balanced_per_class_size(config, part.minority.n_rows(), part.majority.n_rows());

    auto build = [&](const WeightVector& weights, std::uint64_t attempt_seed) {
        WeightVector minority_w = slice_weights(weights, part.minority_rows);
        WeightVector majority_w = slice_weights(weights, part.majority_rows);
        Dataset temp = wsmote(part.minority, minority_w, n, config.smote_k, vdm,
                              derive_seed(attempt_seed, 1), config.wsmote);
        Dataset down = wusample(part.majority, majority_w, n, config.pool_constant,
                                derive_seed(attempt_seed, 2));
        for (std::size_t i = 0; i < down.n_rows(); ++i)
            temp.append_row(down.row(i), down.labels[i]);
        return temp;
    };
    return run_boost(data, BoostMethod::whsboost, config, vdm, build);
}

TrainedEnsemble adaboost_resample_train(const Dataset& data, const BoostConfig& config,
                                        const VdmTable& vdm) {
    require_two_classes(data, "adaboost");
    auto build = [&](const WeightVector& weights, std::uint64_t attempt_seed) {
        return weight_based_resample(data, weights, derive_seed(attempt_seed, 1));
    };
    return run_boost(data, BoostMethod::adaboost, config, vdm, build);
}

TrainedEnsemble smoteboost_train(const Dataset& data, const BoostConfig& config,
                                 const VdmTable& vdm) {
    require_two_classes(data, "smoteboost");
    ClassPartition part = partition_by_class(data);
    if (part.minority.n_rows() < 2) fail("smoteboost: minority class needs at least 2 rows");
    const std::size_t n_min = part.minority.n_rows();
    const std::size_t n_maj = part.majority.n_rows();

    auto build = [&](const WeightVector& weights, std::uint64_t attempt_seed) {
        Dataset rebalanced = smote_baseline(part.minority, n_maj, config.smote_k, vdm,
                                            derive_seed(attempt_seed, 1));
        const std::size_t smoted = rebalanced.n_rows();
        for (std::size_t i = 0; i < part.majority.n_rows(); ++i)
            rebalanced.append_row(part.majority.row(i), part.majority.labels[i]);

        // Original rows keep their boosting weight; synthetic rows get the
        // mean minority weight.
        const double synth_w = minority_weight_mass(weights, part.minority_rows) / n_min;
        std::vector<double> raw;
        raw.reserve(rebalanced.n_rows());
        for (std::size_t idx : part.minority_rows) raw.push_back(weights[idx]);
        for (std::size_t i = n_min; i < smoted; ++i) raw.push_back(synth_w);
        for (std::size_t idx : part.majority_rows) raw.push_back(weights[idx]);
        return weight_based_resample(rebalanced, WeightVector::renormalized(raw),
                                     derive_seed(attempt_seed, 2));
    };
    return run_boost(data, BoostMethod::smoteboost, config, vdm, build);
}

TrainedEnsemble hsboost_train(const Dataset& data, const BoostConfig& config,
                              const VdmTable& vdm) {
    require_two_classes(data, "hsboost");
    ClassPartition part = partition_by_class(data);
    if (part.minority.n_rows() < 2) fail("hsboost: minority class needs at least 2 rows");
    const std::size_t n_min = part.minority.n_rows();
    const std::size_t n =
        balanced_per_class_size(config, n_min, part.majority.n_rows());

    auto build = [&](const WeightVector& weights, std::uint64_t attempt_seed) {
        // Composed exactly like hybrid_sample_baseline (same derived seeds)
        // so the retained majority rows stay attributable to their source
        // indices for weight bookkeeping.
        std::uint64_t hybrid_seed = derive_seed(attempt_seed, 1);
        Dataset rebalanced = smote_baseline(part.minority, n, config.smote_k, vdm,
                                            derive_seed(hybrid_seed, 1));
        const std::size_t smoted = rebalanced.n_rows();
        auto kept = random_undersample_indices(part.majority.n_rows(), n,
                                               derive_seed(hybrid_seed, 2));
        for (std::size_t idx : kept)
            rebalanced.append_row(part.majority.row(idx), part.majority.labels[idx]);

        const double synth_w = minority_weight_mass(weights, part.minority_rows) / n_min;
        std::vector<double> raw;
        raw.reserve(rebalanced.n_rows());
        for (std::size_t idx : part.minority_rows) raw.push_back(weights[idx]);
        for (std::size_t i = n_min; i < smoted; ++i) raw.push_back(synth_w);
        for (std::size_t idx : kept) raw.push_back(weights[part.majority_rows[idx]]);
        return weight_based_resample(rebalanced, WeightVector::renormalized(raw),
                                     derive_seed(attempt_seed, 2));
    };
    return run_boost(data, BoostMethod::hsboost, config, vdm, build);
}

TrainedEnsemble boost_train(const Dataset& data, BoostMethod method, const BoostConfig& config,
                            const VdmTable& vdm) {
    switch (method) {
        case BoostMethod::whsboost: return whsboost_train(data, config, vdm);
        case BoostMethod::adaboost: return adaboost_resample_train(data, config, vdm);
        case BoostMethod::smoteboost: return smoteboost_train(data, config, vdm);
        case BoostMethod::hsboost: return hsboost_train(data, config, vdm);
    }
    fail("unknown boost method");
}

}  // namespace whsboost
