#include "whsboost/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "whsboost/parallel.hpp"
#include "whsboost/rng.hpp"
#include "whsboost/sampling.hpp"

namespace whsboost {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// 1-based ranks with ties averaged (midranks).
std::vector<double> midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double mid = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = mid;
        i = j;
    }
    return ranks;
}

// Exact two-sided p over all 2^n sign assignments: the fraction whose
// W+ deviates from the null mean at least as far as the observed W+.
double exact_two_sided_p(const std::vector<double>& ranks, double observed_dev, double mu) {
    const std::size_t n = ranks.size();
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
        double w_plus = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (std::uint64_t{1} << i)) w_plus += ranks[i];
        if (std::abs(w_plus - mu) >= observed_dev - 1e-9) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

ConfusionMatrix confusion_matrix(const std::vector<int>& predictions,
                                 const std::vector<int>& truths) {
    if (predictions.size() != truths.size() || truths.empty())
        fail("confusion_matrix: prediction/truth length mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] == +1)
            ++(predictions[i] == +1 ? cm.tp : cm.fn);
        else
            ++(predictions[i] == -1 ? cm.tn : cm.fp);
    }
    return cm;
}

MetricReport compute_metrics(const ConfusionMatrix& cm, double beta) {
    if (beta <= 0) fail("compute_metrics: beta must be positive");
    const std::size_t positives = cm.tp + cm.fn;
    const std::size_t negatives = cm.fp + cm.tn;
    if (positives == 0 || negatives == 0)
        fail("compute_metrics: a class is absent from the truths");

    MetricReport m;
    m.beta = beta;
    m.accuracy = static_cast<double>(cm.tp + cm.tn) / (positives + negatives);
    m.recall = static_cast<double>(cm.tp) / positives;
    m.precision = cm.tp + cm.fp == 0 ? 0.0 : static_cast<double>(cm.tp) / (cm.tp + cm.fp);
    const double denom = beta * beta * m.precision + m.recall;
    m.f_beta = denom == 0 ? 0.0 : (1 + beta * beta) * m.recall * m.precision / denom;
    return m;
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
    if (scores.size() != truths.size() || truths.empty())
        fail("roc_auc: score/truth length mismatch");
    std::size_t n_pos = 0;
    for (int y : truths) n_pos += y == +1;
    const std::size_t n_neg = truths.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) fail("roc_auc: both classes must be present");

    const auto ranks = midranks(scores);
    double pos_rank_sum = 0;
    for (std::size_t i = 0; i < truths.size(); ++i)
        if (truths[i] == +1) pos_rank_sum += ranks[i];
    const double np = static_cast<double>(n_pos);
    return (pos_rank_sum - np * (np + 1) / 2.0) / (np * static_cast<double>(n_neg));
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) fail("wilcoxon: length mismatch");
    std::vector<double> diffs;
    diffs.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diffs.push_back(a[i] - b[i]);
    if (diffs.empty()) fail("wilcoxon: all differences are zero");

    const std::size_t n = diffs.size();
    std::vector<double> abs_diffs(n);
    for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::abs(diffs[i]);
    const auto ranks = midranks(abs_diffs);

    WilcoxonResult r;
    r.n_effective = n;
    for (std::size_t i = 0; i < n; ++i)
        (diffs[i] > 0 ? r.w_plus : r.w_minus) += ranks[i];
    r.rank_basis = r.w_minus < r.w_plus ? RankBasis::negative : RankBasis::positive;

    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1) / 4.0;

    // tie correction over groups of equal |d|
    std::vector<double> sorted_abs = abs_diffs;
    std::sort(sorted_abs.begin(), sorted_abs.end());
    double tie_term = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sorted_abs[j] == sorted_abs[i]) ++j;
        const double t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }
    const double variance = nd * (nd + 1) * (2 * nd + 1) / 24.0 - tie_term / 48.0;
    const double w_min = std::min(r.w_plus, r.w_minus);
    if (variance > 0) {
        // continuity-corrected toward zero; without the 0.5 the normal p
        // drifts past 0.03 from the exact enumeration at n = 12
        r.z = std::min(0.0, w_min - mu + 0.5) / std::sqrt(variance);
        r.p_normal = std::min(1.0, std::erfc(-r.z / std::sqrt(2.0)));  // 2 * Phi(z), z <= 0
    } else {
        r.z = 0;
        r.p_normal = 1.0;
    }

    if (n <= 12) {
        r.exact = true;
        r.p_two_sided = exact_two_sided_p(ranks, std::abs(r.w_plus - mu), mu);
    } else {
        r.p_two_sided = r.p_normal;
    }
    return r;
}

void SimulationSpec::validate() const {
    if (n_total < 2) fail("simulation: n_total must be >= 2");
    if (p < 1) fail("simulation: p must be >= 1");
    if (p0 < 1 || p0 > p) fail("simulation: p0 must be in [1, p]");
    if (!(minority_fraction > 0 && minority_fraction <= 0.5))
        fail("simulation: minority_fraction outside (0, 0.5]");
    if (oversample_pool < n_total) fail("simulation: pool smaller than n_total");
}

SimulationOutput simulate_dataset(const SimulationSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Stream order is pinned: effective indices, coefficients (ascending
    // feature index), then pool rows row-major.
    auto effective = rng.sample_without_replacement(spec.p, spec.p0);
    std::sort(effective.begin(), effective.end());
    std::vector<double> beta(spec.p, 0.0);
    for (std::size_t idx : effective) beta[idx] = rng.normal();

    const std::size_t pool_n = spec.oversample_pool;
    std::vector<double> pool(pool_n * spec.p);
    for (double& v : pool) v = rng.normal();

    auto label_of = [&](std::size_t row) {
        double g = 0;
        for (std::size_t j = 0; j < spec.p; ++j) g += beta[j] * pool[row * spec.p + j];
        return g >= 0 ? +1 : -1;  // g = 0 resolved to +1
    };
    std::vector<int> pool_labels(pool_n);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < pool_n; ++i) {
        pool_labels[i] = label_of(i);
        pos += pool_labels[i] == +1;
    }

    // The rarer pool side becomes the +1 minority. When that side is the
    // negative one, flip the coefficient signs so emitted labels always
    // equal sgn(beta . x); a tie keeps the positive side.
    if (pool_n - pos < pos) {
        for (double& bj : beta) bj = -bj;
        pos = 0;
        for (std::size_t i = 0; i < pool_n; ++i) {
            pool_labels[i] = label_of(i);
            pos += pool_labels[i] == +1;
        }
    }
    const std::size_t neg = pool_n - pos;

    const auto n_min = static_cast<std::size_t>(
        std::llround(spec.minority_fraction * static_cast<double>(spec.n_total)));
    if (n_min < 1) fail("simulation: minority target rounds to zero");
    const std::size_t n_maj = spec.n_total - n_min;
    if (pos < n_min || neg < n_maj)
        fail("simulation: pool lacks enough rows of one label; increase oversample_pool");

    std::vector<std::size_t> pos_rows, neg_rows;
    pos_rows.reserve(pos);
    neg_rows.reserve(neg);
    for (std::size_t i = 0; i < pool_n; ++i)
        (pool_labels[i] == +1 ? pos_rows : neg_rows).push_back(i);

    std::vector<char> selected(pool_n, 0);
    for (std::size_t d : rng.sample_without_replacement(pos, n_min)) selected[pos_rows[d]] = 1;
    for (std::size_t d : rng.sample_without_replacement(neg, n_maj)) selected[neg_rows[d]] = 1;

    SimulationOutput out;
    out.beta = beta;
    out.effective = std::move(effective);
    out.pool_positive = pos;
    out.pool_negative = neg;
    out.pool_feature_means.assign(spec.p, 0.0);
    for (std::size_t i = 0; i < pool_n; ++i)
        for (std::size_t j = 0; j < spec.p; ++j)
            out.pool_feature_means[j] += pool[i * spec.p + j];
    for (double& m : out.pool_feature_means) m /= static_cast<double>(pool_n);

    for (std::size_t j = 0; j < spec.p; ++j)
        out.data.schema.features.push_back(
            {"x" + std::to_string(j + 1), FeatureKind::continuous, {}, false});
    for (std::size_t i = 0; i < pool_n; ++i) {
        if (!selected[i]) continue;
        out.data.values.insert(out.data.values.end(), pool.begin() + i * spec.p,
                               pool.begin() + (i + 1) * spec.p);
        out.data.labels.push_back(pool_labels[i]);
    }
    return out;
}

ClassifierSpec grid_search_tune(const Dataset& tuning_data,
                                const std::vector<ClassifierSpec>& grid, std::uint64_t seed) {
    if (grid.empty()) fail("grid_search_tune: empty grid");
    tuning_data.validate();

    Split split = stratified_split(tuning_data, 0.8, derive_seed(seed, 1));
    Dataset train = subset_rows(tuning_data, split.train_indices);
    Dataset verify = subset_rows(tuning_data, split.test_indices);
    if (verify.n_rows() == 0) fail("grid_search_tune: verification slice is empty");

    VdmTable vdm = build_vdm_table(train);
    Dataset rebalanced = smote_rebalance(train, 5, vdm, derive_seed(seed, 2));

    double best_accuracy = -1;
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        grid[g].validate();
        auto model = train_classifier(rebalanced, grid[g], vdm);
        auto predictions = predict_batch(*model, verify);
        std::size_t correct = 0;
        for (std::size_t i = 0; i < predictions.size(); ++i)
            correct += predictions[i] == verify.labels[i];
        const double accuracy = static_cast<double>(correct) / predictions.size();
        if (accuracy > best_accuracy) {  // ties keep the earlier entry
            best_accuracy = accuracy;
            best = g;
        }
    }
    return grid[best];
}

std::string pipeline_method_name(PipelineMethod method) {
    switch (method) {
        case PipelineMethod::nothing: return "nothing";
        case PipelineMethod::smote: return "smote";
        case PipelineMethod::undersample: return "undersample";
        case PipelineMethod::hybrid: return "hybrid";
        case PipelineMethod::adaboost: return "adaboost";
        case PipelineMethod::smoteboost: return "smoteboost";
        case PipelineMethod::hsboost: return "hsboost";
        case PipelineMethod::whsboost: return "whsboost";
    }
    fail("unknown pipeline method");
}

PipelineMethod pipeline_method_from_name(const std::string& name) {
    if (name == "nothing") return PipelineMethod::nothing;
    if (name == "smote") return PipelineMethod::smote;
    if (name == "undersample") return PipelineMethod::undersample;
    if (name == "hybrid") return PipelineMethod::hybrid;
    if (name == "adaboost") return PipelineMethod::adaboost;
    if (name == "smoteboost") return PipelineMethod::smoteboost;
    if (name == "hsboost") return PipelineMethod::hsboost;
    if (name == "whsboost") return PipelineMethod::whsboost;
    fail("unknown pipeline method: " + name);
}

namespace {

std::vector<double> fit_and_score(const Dataset& train, const Dataset& test,
                                  const PipelineSpec& pipeline, std::uint64_t seed,
                                  const VdmTable& vdm) {
    const BoostConfig& config = pipeline.config;
    switch (pipeline.method) {
        case PipelineMethod::nothing: {
            auto model = train_classifier(train, config.base, vdm);
            return score_batch(*model, test);
        }
        case PipelineMethod::smote: {
            Dataset balanced = smote_rebalance(train, config.smote_k, vdm, derive_seed(seed, 1));
            auto model = train_classifier(balanced, config.base, vdm);
            return score_batch(*model, test);
        }
        case PipelineMethod::undersample: {
            ClassPartition part = partition_by_class(train);
            Dataset balanced = part.minority;
            Dataset down = random_undersample(part.majority, part.minority.n_rows(),
                                              derive_seed(seed, 1));
            for (std::size_t i = 0; i < down.n_rows(); ++i)
                balanced.append_row(down.row(i), down.labels[i]);
            auto model = train_classifier(balanced, config.base, vdm);
            return score_batch(*model, test);
        }
        case PipelineMethod::hybrid: {
            ClassPartition part = partition_by_class(train);
            const std::size_t n = balanced_per_class_size(config, part.minority.n_rows(),
                                                          part.majority.n_rows());
            Dataset balanced =
                hybrid_sample_baseline(train, n, config.smote_k, vdm, derive_seed(seed, 1));
            auto model = train_classifier(balanced, config.base, vdm);
            return score_batch(*model, test);
        }
        case PipelineMethod::adaboost:
        case PipelineMethod::smoteboost:
        case PipelineMethod::hsboost:
        case PipelineMethod::whsboost: {
            BoostConfig rep_config = config;
            rep_config.seed = seed;
            BoostMethod method = BoostMethod::whsboost;
            if (pipeline.method == PipelineMethod::adaboost) method = BoostMethod::adaboost;
            if (pipeline.method == PipelineMethod::smoteboost) method = BoostMethod::smoteboost;
            if (pipeline.method == PipelineMethod::hsboost) method = BoostMethod::hsboost;
            TrainedEnsemble ens = boost_train(train, method, rep_config, vdm);
            return ensemble_score_batch(ens, test);
        }
    }
    fail("unknown pipeline method");
}

MetricSummary summarize(const std::vector<RepetitionResult>& rows,
                        double RepetitionResult::* field) {
    MetricSummary s;
    const std::size_t n = rows.size();
    if (n == 0) return s;
    for (const auto& r : rows) s.mean += r.*field;
    s.mean /= static_cast<double>(n);
    if (n > 1) {
        double acc = 0;
        for (const auto& r : rows) {
            const double d = r.*field - s.mean;
            acc += d * d;
        }
        s.stddev = std::sqrt(acc / static_cast<double>(n - 1));
    }
    return s;
}

}  // namespace

ExperimentResult run_experiment(const Dataset& data, const std::vector<PipelineSpec>& pipelines,
                                int repetitions, double train_fraction, double beta,
                                std::uint64_t seed) {
    if (repetitions < 1) fail("run_experiment: repetitions must be >= 1");
    if (pipelines.empty()) fail("run_experiment: no pipelines given");
    if (!(train_fraction > 0 && train_fraction < 1))
        fail("run_experiment: train_fraction outside (0, 1)");
    if (beta <= 0) fail("run_experiment: beta must be positive");
    data.validate();
    for (const auto& p : pipelines) p.config.validate();

    const std::size_t n_pipes = pipelines.size();
    std::vector<std::vector<RepetitionResult>> rows(
        n_pipes, std::vector<RepetitionResult>(static_cast<std::size_t>(repetitions)));
    std::vector<std::vector<std::string>> errors(
        n_pipes, std::vector<std::string>(static_cast<std::size_t>(repetitions)));

    auto run_rep = [&](int r) {
        const auto ri = static_cast<std::size_t>(r);
        try {
            Split split = stratified_split(data, train_fraction,
                                           derive_seed(seed, 1, static_cast<std::uint64_t>(r)));
            Dataset train = subset_rows(data, split.train_indices);
            Dataset test = subset_rows(data, split.test_indices);
            NormalizeOutput norm = minmax_normalize(train, {test});
            VdmTable vdm = build_vdm_table(norm.train);
            for (std::size_t pi = 0; pi < n_pipes; ++pi) {
                try {
                    const auto t0 = std::chrono::steady_clock::now();
                    auto scores =
                        fit_and_score(norm.train, norm.others[0], pipelines[pi],
                                      derive_seed(seed, 2, static_cast<std::uint64_t>(r), pi),
                                      vdm);
                    const auto t1 = std::chrono::steady_clock::now();

                    std::vector<int> predictions(scores.size());
                    for (std::size_t i = 0; i < scores.size(); ++i)
                        predictions[i] = scores[i] >= 0 ? +1 : -1;
                    ConfusionMatrix cm = confusion_matrix(predictions, norm.others[0].labels);
                    MetricReport m = compute_metrics(cm, beta);

                    RepetitionResult& row = rows[pi][ri];
                    row.repetition = r;
                    row.recall = m.recall;
                    row.precision = m.precision;
                    row.f_beta = m.f_beta;
                    row.auc = roc_auc(scores, norm.others[0].labels);
                    row.wallclock_ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                } catch (const std::exception& e) {
                    errors[pi][ri] = e.what()[0] ? e.what() : "pipeline failed";
                }
            }
        } catch (const std::exception& e) {
            // split/normalize/VDM failures take down the whole repetition
            for (std::size_t pi = 0; pi < n_pipes; ++pi)
                errors[pi][ri] = e.what()[0] ? e.what() : "repetition failed";
        }
    };

    if (parallel::use_parallel()) {
#ifdef WHSBOOST_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel::worker_count())
        for (int r = 0; r < repetitions; ++r) run_rep(r);
#endif
    } else {
        for (int r = 0; r < repetitions; ++r) run_rep(r);
    }

    ExperimentResult result;
    result.repetitions = repetitions;
    result.beta = beta;
    for (std::size_t pi = 0; pi < n_pipes; ++pi) {
        PipelineColumn col;
        col.spec = pipelines[pi];
        for (std::size_t ri = 0; ri < errors[pi].size(); ++ri) {
            if (!errors[pi][ri].empty()) {
                col.failed = true;
                col.error = errors[pi][ri];
                break;
            }
        }
        if (!col.failed) {
            col.rows = std::move(rows[pi]);
            col.recall = summarize(col.rows, &RepetitionResult::recall);
            col.precision = summarize(col.rows, &RepetitionResult::precision);
            col.f_beta = summarize(col.rows, &RepetitionResult::f_beta);
            col.auc = summarize(col.rows, &RepetitionResult::auc);
        }
        result.columns.push_back(std::move(col));
    }
    return result;
}

}  // namespace whsboost
