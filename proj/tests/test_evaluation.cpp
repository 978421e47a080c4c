#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "whsboost/evaluation.hpp"
#include "whsboost/parallel.hpp"
#include "whsboost/rng.hpp"

using namespace whsboost;

namespace {

Dataset mixed_fixture(std::size_t n_pos, std::size_t n_neg, double gap, std::uint64_t seed) {
    Dataset d;
    d.schema.features = {{"x1", FeatureKind::continuous, {}, false},
                         {"x2", FeatureKind::continuous, {}, false},
                         {"c", FeatureKind::categorical, {"p", "q"}, true}};
    Rng rng(seed);
    for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
        bool pos = i < n_pos;
        d.values.push_back((pos ? gap / 2 : -gap / 2) + rng.normal());
        d.values.push_back(rng.normal());
        d.values.push_back(static_cast<double>(rng.below(2)));
        d.labels.push_back(pos ? +1 : -1);
    }
    return d;
}

double auc_brute_force(const std::vector<double>& scores, const std::vector<int>& truths) {
    double wins = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (truths[i] != +1) continue;
        for (std::size_t j = 0; j < truths.size(); ++j) {
            if (truths[j] != -1) continue;
            ++pairs;
            if (scores[i] > scores[j])
                wins += 1;
            else if (scores[i] == scores[j])
                wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

}  // namespace

TEST_CASE("confusion matrix tallies the four cells") {
    auto all_right = confusion_matrix({+1, +1, -1, -1, -1}, {+1, +1, -1, -1, -1});
    CHECK(all_right.tp == 2);
    CHECK(all_right.tn == 3);
    CHECK(all_right.fp == 0);
    CHECK(all_right.fn == 0);

    auto all_pos = confusion_matrix({+1, +1, +1, +1, +1}, {+1, +1, -1, -1, -1});
    CHECK(all_pos.tp == 2);
    CHECK(all_pos.fp == 3);
    CHECK(all_pos.fn == 0);
    CHECK(all_pos.tn == 0);

    auto mixed = confusion_matrix({+1, -1, +1}, {+1, +1, -1});
    CHECK(mixed.tp == 1);
    CHECK(mixed.fn == 1);
    CHECK(mixed.fp == 1);
    CHECK(mixed.tn == 0);

    CHECK_THROWS(confusion_matrix({+1}, {+1, -1}));
}

TEST_CASE("metric formulas on the hand computed fixture") {
    ConfusionMatrix cm{50, 50, 0, 100};
    MetricReport m = compute_metrics(cm, 3.0);
    CHECK(m.recall == doctest::Approx(0.5));
    CHECK(m.precision == doctest::Approx(1.0));
    CHECK(m.f_beta == doctest::Approx(0.52632).epsilon(1e-5));
    CHECK(m.accuracy == doctest::Approx(0.75));
}

TEST_CASE("metric conventions and bounds") {
    ConfusionMatrix perfect{10, 0, 0, 20};
    MetricReport m = compute_metrics(perfect, 3.0);
    CHECK(m.recall == doctest::Approx(1.0));
    CHECK(m.precision == doctest::Approx(1.0));
    CHECK(m.f_beta == doctest::Approx(1.0));
    CHECK(m.accuracy == doctest::Approx(1.0));

    // beta = 1 with recall == precision collapses to that value
    ConfusionMatrix even{30, 10, 10, 50};
    MetricReport f1 = compute_metrics(even, 1.0);
    CHECK(f1.recall == doctest::Approx(0.75));
    CHECK(f1.precision == doctest::Approx(0.75));
    CHECK(f1.f_beta == doctest::Approx(0.75));

    // all-negative predictions: recall 0 forces f to 0
    ConfusionMatrix none{0, 10, 0, 20};
    CHECK(compute_metrics(none, 3.0).f_beta == doctest::Approx(0.0));

    // absent class rejected
    ConfusionMatrix no_neg{5, 5, 0, 0};
    CHECK_THROWS(compute_metrics(no_neg, 3.0));
    CHECK_THROWS(compute_metrics(even, 0.0));
}

TEST_CASE("f beta stays between recall and precision") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionMatrix cm;
        cm.tp = 1 + rng.below(50);
        cm.fn = rng.below(50);
        cm.fp = 1 + rng.below(50);
        cm.tn = 1 + rng.below(50);
        double beta = 0.25 + rng.uniform() * 5;
        MetricReport m = compute_metrics(cm, beta);
        if (m.recall > 0 && m.precision > 0) {
            CHECK(m.f_beta >= std::min(m.recall, m.precision) - 1e-12);
            CHECK(m.f_beta <= std::max(m.recall, m.precision) + 1e-12);
        }
    }
}

TEST_CASE("auc basics") {
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {+1, +1, -1, -1}) == doctest::Approx(1.0));
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {+1, +1, -1, -1}) == doctest::Approx(0.5));
    CHECK(roc_auc({0.8, 0.5, 0.5}, {+1, +1, -1}) == doctest::Approx(0.75));
    CHECK(roc_auc({0.1, 0.2, 0.9}, {+1, +1, -1}) == doctest::Approx(0.0));
    CHECK_THROWS(roc_auc({0.5, 0.6}, {+1, +1}));
}

TEST_CASE("auc equals the brute force pair count on random fixtures") {
    Rng rng(505);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t n_pos = 1 + rng.below(20);
        std::size_t n_neg = 1 + rng.below(20);
        std::vector<double> scores;
        std::vector<int> truths;
        for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
            // quantized scores so ties actually occur
            scores.push_back(rng.below(2) ? rng.uniform() : rng.below(5) * 0.25);
            truths.push_back(i < n_pos ? +1 : -1);
        }
        CHECK(std::abs(roc_auc(scores, truths) - auc_brute_force(scores, truths)) <= 1e-12);
    }
}

TEST_CASE("wilcoxon exact enumeration on tiny samples") {
    auto r = wilcoxon_signed_rank({2, 3, 4}, {1, 1, 1});  // d = (1, 2, 3)
    CHECK(r.n_effective == 3);
    CHECK(r.w_plus == doctest::Approx(6.0));
    CHECK(r.w_minus == doctest::Approx(0.0));
    CHECK(r.exact);
    CHECK(r.p_two_sided == doctest::Approx(0.25));
    CHECK(r.rank_basis == RankBasis::negative);

    auto single = wilcoxon_signed_rank({5, 1, 1}, {4, 1, 1});
    CHECK(single.n_effective == 1);
    CHECK(single.p_two_sided == doctest::Approx(1.0));
}

TEST_CASE("wilcoxon is antisymmetric in its arguments") {
    std::vector<double> a = {3.0, 1.5, 4.0, 2.2, 5.1};
    std::vector<double> b = {1.0, 2.5, 1.0, 2.0, 4.9};
    auto ab = wilcoxon_signed_rank(a, b);
    auto ba = wilcoxon_signed_rank(b, a);
    CHECK(ab.p_two_sided == doctest::Approx(ba.p_two_sided));
    CHECK(ab.w_plus == doctest::Approx(ba.w_minus));
    CHECK(ab.w_minus == doctest::Approx(ba.w_plus));
    CHECK(ab.rank_basis != ba.rank_basis);
}

TEST_CASE("wilcoxon rank sums always split the triangular total") {
    Rng rng(606);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng.below(20);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) {
            a.push_back(rng.below(8) * 0.5);  // ties likely
            b.push_back(rng.below(8) * 0.5);
        }
        bool all_zero = true;
        for (std::size_t i = 0; i < n; ++i) all_zero = all_zero && a[i] == b[i];
        if (all_zero) continue;
        auto r = wilcoxon_signed_rank(a, b);
        double total = r.n_effective * (r.n_effective + 1) / 2.0;
        CHECK(r.w_plus + r.w_minus == doctest::Approx(total));
        CHECK(r.p_two_sided >= 0.0);
        CHECK(r.p_two_sided <= 1.0);
    }
}

TEST_CASE("wilcoxon exact and normal paths agree closely at the cutoff") {
    Rng rng(707);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> a(12), b(12, 0.0);
        for (double& v : a) {
            v = rng.uniform(-1, 1);
            if (v == 0) v = 0.5;
        }
        auto r = wilcoxon_signed_rank(a, b);
        REQUIRE(r.n_effective == 12);
        REQUIRE(r.exact);
        CHECK(std::abs(r.p_two_sided - r.p_normal) <= 0.03);
    }
}

TEST_CASE("wilcoxon rejects degenerate input") {
    CHECK_THROWS(wilcoxon_signed_rank({1, 2}, {1, 2}));
    CHECK_THROWS(wilcoxon_signed_rank({1, 2}, {1}));
    CHECK_THROWS(wilcoxon_signed_rank({}, {}));
}

TEST_CASE("simulation hits exact class counts") {
    SimulationSpec spec;
    spec.n_total = 1000;
    spec.p = 25;
    spec.p0 = 8;
    spec.minority_fraction = 0.10;
    spec.oversample_pool = 5000;
    spec.seed = 12;
    SimulationOutput out = simulate_dataset(spec);

    CHECK(out.data.n_rows() == 1000);
    CHECK(out.data.count_label(+1) == 100);
    CHECK(out.data.count_label(-1) == 900);

    std::size_t zero_coeffs = 0;
    for (double bj : out.beta) zero_coeffs += bj == 0.0;
    CHECK(zero_coeffs == 17);
    CHECK(out.effective.size() == 8);

    spec.minority_fraction = 0.45;
    SimulationOutput out45 = simulate_dataset(spec);
    CHECK(out45.data.count_label(+1) == 450);
}

TEST_CASE("simulated labels recompute from the stored coefficients") {
    SimulationSpec spec;
    spec.n_total = 400;
    spec.p = 10;
    spec.p0 = 4;
    spec.minority_fraction = 0.2;
    spec.oversample_pool = 2000;
    spec.seed = 33;
    SimulationOutput out = simulate_dataset(spec);
    for (std::size_t i = 0; i < out.data.n_rows(); ++i) {
        double g = 0;
        for (std::size_t j = 0; j < spec.p; ++j) g += out.beta[j] * out.data.at(i, j);
        CHECK(out.data.labels[i] == (g >= 0 ? +1 : -1));
    }
}

TEST_CASE("simulation pool features are standard normal ish") {
    SimulationSpec spec;
    spec.n_total = 200;
    spec.p = 6;
    spec.p0 = 3;
    spec.minority_fraction = 0.3;
    spec.oversample_pool = 4000;
    spec.seed = 44;
    SimulationOutput out = simulate_dataset(spec);
    const double bound = 4.0 / std::sqrt(static_cast<double>(spec.oversample_pool));
    for (double mean : out.pool_feature_means) CHECK(std::abs(mean) <= bound);
}

TEST_CASE("simulation is deterministic and validates its spec") {
    SimulationSpec spec;
    spec.n_total = 100;
    spec.p = 5;
    spec.p0 = 2;
    spec.minority_fraction = 0.2;
    spec.oversample_pool = 600;
    spec.seed = 55;
    SimulationOutput a = simulate_dataset(spec);
    SimulationOutput b = simulate_dataset(spec);
    CHECK(a.data.values == b.data.values);
    CHECK(a.data.labels == b.data.labels);
    CHECK(a.beta == b.beta);

    SimulationSpec bad = spec;
    bad.p0 = 6;
    CHECK_THROWS(bad.validate());
    bad = spec;
    bad.minority_fraction = 0.0;
    CHECK_THROWS(bad.validate());
    bad = spec;
    bad.minority_fraction = 0.6;
    CHECK_THROWS(bad.validate());
    bad = spec;
    bad.oversample_pool = 50;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("simulation raises when the pool cannot cover a side") {
    SimulationSpec spec;
    spec.n_total = 100;
    spec.p = 4;
    spec.p0 = 2;
    spec.minority_fraction = 0.45;
    spec.oversample_pool = 100;  // needs 55 of the majority side from ~50/50
    spec.seed = 7;
    CHECK_THROWS(simulate_dataset(spec));
}

TEST_CASE("grid search returns the singleton and breaks ties by order") {
    Dataset d = mixed_fixture(20, 40, 2.0, 66);
    ClassifierSpec knn1;
    knn1.kind = ClassifierKind::knn;
    knn1.knn_k = 1;

    CHECK(grid_search_tune(d, {knn1}, 9).knn_k == 1);

    // identical entries tie; the first must win
    ClassifierSpec knn1_dup = knn1;
    auto picked = grid_search_tune(d, {knn1, knn1_dup}, 9);
    CHECK(picked.knn_k == 1);
    CHECK_THROWS(grid_search_tune(d, {}, 9));
}

TEST_CASE("grid search prefers the smoother neighborhood on noisy data") {
    // boundary plus 15% label noise: 1-NN memorizes the noise, 3-NN smooths
    Dataset d = mixed_fixture(45, 90, 1.2, 77);
    Rng noise(78);
    for (std::size_t i = 0; i < d.n_rows(); ++i)
        if (noise.uniform() < 0.15) d.labels[i] = -d.labels[i];
    if (d.count_label(+1) < 2) d.labels[0] = d.labels[1] = +1;

    ClassifierSpec knn1, knn3;
    knn1.kind = knn3.kind = ClassifierKind::knn;
    knn1.knn_k = 1;
    knn3.knn_k = 3;
    auto picked = grid_search_tune(d, {knn1, knn3}, 13);
    CHECK(picked.knn_k == 3);
}

TEST_CASE("single repetition experiment is a plain train test evaluation") {
    Dataset d = mixed_fixture(15, 45, 1.5, 88);
    PipelineSpec pipeline;
    pipeline.name = "plain_knn";
    pipeline.method = PipelineMethod::nothing;
    pipeline.config.base.kind = ClassifierKind::knn;
    pipeline.config.base.knn_k = 3;

    ExperimentResult res = run_experiment(d, {pipeline}, 1, 0.7, 3.0, 99);
    REQUIRE(res.columns.size() == 1);
    REQUIRE(!res.columns[0].failed);
    REQUIRE(res.columns[0].rows.size() == 1);

    // replicate by hand with the same derived seed
    Split split = stratified_split(d, 0.7, derive_seed(99, 1, 0));
    Dataset train = subset_rows(d, split.train_indices);
    Dataset test = subset_rows(d, split.test_indices);
    NormalizeOutput norm = minmax_normalize(train, {test});
    VdmTable vdm = build_vdm_table(norm.train);
    auto model = train_knn(norm.train, 3, vdm);
    auto scores = score_batch(*model, norm.others[0]);
    std::vector<int> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= 0 ? +1 : -1;
    MetricReport m = compute_metrics(confusion_matrix(preds, norm.others[0].labels), 3.0);

    const auto& row = res.columns[0].rows[0];
    CHECK(row.recall == m.recall);
    CHECK(row.precision == m.precision);
    CHECK(row.f_beta == m.f_beta);
    CHECK(row.auc == roc_auc(scores, norm.others[0].labels));
    CHECK(res.columns[0].recall.mean == row.recall);
    CHECK(res.columns[0].recall.stddev == 0.0);
}

TEST_CASE("pipelines share splits so identical configs give identical columns") {
    Dataset d = mixed_fixture(20, 60, 1.0, 111);
    PipelineSpec a;
    a.name = "knn_a";
    a.method = PipelineMethod::nothing;
    a.config.base.knn_k = 3;
    PipelineSpec b = a;
    b.name = "knn_b";

    ExperimentResult res = run_experiment(d, {a, b}, 5, 0.7, 3.0, 123);
    REQUIRE(res.columns.size() == 2);
    REQUIRE(!res.columns[0].failed);
    REQUIRE(!res.columns[1].failed);
    for (int r = 0; r < 5; ++r) {
        CHECK(res.columns[0].rows[r].recall == res.columns[1].rows[r].recall);
        CHECK(res.columns[0].rows[r].auc == res.columns[1].rows[r].auc);
    }
}

TEST_CASE("experiment reruns are identical apart from wallclock") {
    Dataset d = mixed_fixture(15, 45, 1.0, 222);
    PipelineSpec whs;
    whs.name = "whsboost_knn";
    whs.method = PipelineMethod::whsboost;
    whs.config.iterations = 3;
    whs.config.smote_k = 3;
    whs.config.base.knn_k = 3;

    ExperimentResult x = run_experiment(d, {whs}, 4, 0.7, 3.0, 321);
    ExperimentResult y = run_experiment(d, {whs}, 4, 0.7, 3.0, 321);
    REQUIRE(!x.columns[0].failed);
    for (int r = 0; r < 4; ++r) {
        CHECK(x.columns[0].rows[r].recall == y.columns[0].rows[r].recall);
        CHECK(x.columns[0].rows[r].precision == y.columns[0].rows[r].precision);
        CHECK(x.columns[0].rows[r].f_beta == y.columns[0].rows[r].f_beta);
        CHECK(x.columns[0].rows[r].auc == y.columns[0].rows[r].auc);
    }
}

TEST_CASE("parallel repetitions produce the same table as serial") {
    Dataset d = mixed_fixture(12, 36, 1.0, 333);
    PipelineSpec hs;
    hs.name = "hsboost_dt";
    hs.method = PipelineMethod::hsboost;
    hs.config.iterations = 2;
    hs.config.smote_k = 3;
    hs.config.base.kind = ClassifierKind::dtree;
    hs.config.base.dtree_max_depth = 4;

    parallel::set_worker_count(1);
    ExperimentResult serial = run_experiment(d, {hs}, 6, 0.7, 3.0, 444);
    parallel::set_worker_count(4);
    ExperimentResult par = run_experiment(d, {hs}, 6, 0.7, 3.0, 444);
    parallel::set_worker_count(1);

    REQUIRE(!serial.columns[0].failed);
    REQUIRE(!par.columns[0].failed);
    for (int r = 0; r < 6; ++r) {
        CHECK(serial.columns[0].rows[r].f_beta == par.columns[0].rows[r].f_beta);
        CHECK(serial.columns[0].rows[r].auc == par.columns[0].rows[r].auc);
    }
}

TEST_CASE("a failing pipeline only takes down its own column") {
    Dataset d = mixed_fixture(10, 40, 1.5, 555);
    PipelineSpec good;
    good.name = "plain";
    good.method = PipelineMethod::nothing;
    PipelineSpec bad;
    bad.name = "impossible";
    bad.method = PipelineMethod::whsboost;
    bad.config.balanced_size = 9999;  // outside [n_min, n_maj] at train time

    ExperimentResult res = run_experiment(d, {good, bad}, 2, 0.7, 3.0, 666);
    REQUIRE(res.columns.size() == 2);
    CHECK(!res.columns[0].failed);
    CHECK(res.columns[0].rows.size() == 2);
    CHECK(res.columns[1].failed);
    CHECK(res.columns[1].rows.empty());
    CHECK(!res.columns[1].error.empty());
}

TEST_CASE("experiment runs every pipeline method end to end") {
    Dataset d = mixed_fixture(14, 42, 1.5, 777);
    std::vector<PipelineSpec> pipelines;
    for (PipelineMethod m :
         {PipelineMethod::nothing, PipelineMethod::smote, PipelineMethod::undersample,
          PipelineMethod::hybrid, PipelineMethod::adaboost, PipelineMethod::smoteboost,
          PipelineMethod::hsboost, PipelineMethod::whsboost}) {
        PipelineSpec p;
        p.name = pipeline_method_name(m);
        p.method = m;
        p.config.iterations = 2;
        p.config.smote_k = 3;
        pipelines.push_back(p);
    }
    ExperimentResult res = run_experiment(d, pipelines, 2, 0.7, 3.0, 888);
    REQUIRE(res.columns.size() == pipelines.size());
    for (const auto& col : res.columns) {
        INFO(col.spec.name, ": ", col.error);
        CHECK(!col.failed);
        CHECK(col.rows.size() == 2);
        for (const auto& row : col.rows) {
            CHECK(row.recall >= 0.0);
            CHECK(row.recall <= 1.0);
            CHECK(row.auc >= 0.0);
            CHECK(row.auc <= 1.0);
        }
    }
}

TEST_CASE("pipeline method names round trip") {
    for (PipelineMethod m :
         {PipelineMethod::nothing, PipelineMethod::smote, PipelineMethod::undersample,
          PipelineMethod::hybrid, PipelineMethod::adaboost, PipelineMethod::smoteboost,
          PipelineMethod::hsboost, PipelineMethod::whsboost})
        CHECK(pipeline_method_from_name(pipeline_method_name(m)) == m);
    CHECK_THROWS(pipeline_method_from_name("bogus"));
}
