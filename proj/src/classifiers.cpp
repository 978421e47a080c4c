#include "whsboost/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "whsboost/parallel.hpp"

namespace whsboost {

namespace {
[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

const char* classifier_kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::knn: return "knn";
        case ClassifierKind::dtree: return "dtree";
        case ClassifierKind::bpnn: return "bpnn";
        case ClassifierKind::svm: return "svm";
    }
    fail("unknown classifier kind");
}

ClassifierKind classifier_kind_from_name(const std::string& name) {
    if (name == "knn") return ClassifierKind::knn;
    if (name == "dtree") return ClassifierKind::dtree;
    if (name == "bpnn") return ClassifierKind::bpnn;
    if (name == "svm") return ClassifierKind::svm;
    fail("unknown classifier kind: " + name);
}

void ClassifierSpec::validate() const {
    if (knn_k < 1) fail("knn_k must be >= 1");
    if (dtree_max_depth < 1) fail("dtree_max_depth must be >= 1");
    if (dtree_min_leaf < 1) fail("dtree_min_leaf must be >= 1");
    if (bpnn_hidden < 1) fail("bpnn_hidden must be >= 1");
    if (bpnn_epochs < 1) fail("bpnn_epochs must be >= 1");
    if (!(bpnn_learning_rate > 0)) fail("bpnn_learning_rate must be > 0");
    if (!(svm_c > 0)) fail("svm_c must be > 0");
    if (!(svm_gamma > 0)) fail("svm_gamma must be > 0");
    if (!(svm_tolerance > 0)) fail("svm_tolerance must be > 0");
    if (svm_max_passes < 1) fail("svm_max_passes must be >= 1");
}

nlohmann::json ClassifierSpec::to_json() const {
    return {{"kind", classifier_kind_name(kind)},
            {"knn_k", knn_k},
            {"dtree_max_depth", dtree_max_depth},
            {"dtree_min_leaf", dtree_min_leaf},
            {"bpnn_hidden", bpnn_hidden},
            {"bpnn_epochs", bpnn_epochs},
            {"bpnn_learning_rate", bpnn_learning_rate},
            {"bpnn_init_seed", bpnn_init_seed},
            {"svm_kernel", svm_kernel == SvmKernel::linear ? "linear" : "rbf"},
            {"svm_c", svm_c},
            {"svm_gamma", svm_gamma},
            {"svm_tolerance", svm_tolerance},
            {"svm_max_passes", svm_max_passes}};
}

ClassifierSpec ClassifierSpec::from_json(const nlohmann::json& j) {
    ClassifierSpec s;
    s.kind = classifier_kind_from_name(j.at("kind").get<std::string>());
    s.knn_k = j.value("knn_k", s.knn_k);
    s.dtree_max_depth = j.value("dtree_max_depth", s.dtree_max_depth);
    s.dtree_min_leaf = j.value("dtree_min_leaf", s.dtree_min_leaf);
    s.bpnn_hidden = j.value("bpnn_hidden", s.bpnn_hidden);
    s.bpnn_epochs = j.value("bpnn_epochs", s.bpnn_epochs);
    s.bpnn_learning_rate = j.value("bpnn_learning_rate", s.bpnn_learning_rate);
    s.bpnn_init_seed = j.value("bpnn_init_seed", s.bpnn_init_seed);
    std::string kernel = j.value("svm_kernel", std::string("rbf"));
    s.svm_kernel = kernel == "linear" ? SvmKernel::linear : SvmKernel::rbf;
    s.svm_c = j.value("svm_c", s.svm_c);
    s.svm_gamma = j.value("svm_gamma", s.svm_gamma);
    s.svm_tolerance = j.value("svm_tolerance", s.svm_tolerance);
    s.svm_max_passes = j.value("svm_max_passes", s.svm_max_passes);
    s.validate();
    return s;
}

// ---------------------------------------------------------------- one-hot

OneHotEncoder::OneHotEncoder(const FeatureSchema& schema) {
    for (const auto& f : schema.features) {
        Block b;
        b.offset = width_;
        b.categorical = f.kind == FeatureKind::categorical;
        b.size = b.categorical ? f.vocabulary.size() : 1;
        width_ += b.size;
        blocks_.push_back(b);
    }
}

void OneHotEncoder::encode(std::span<const double> row, std::span<double> out) const {
    if (row.size() != blocks_.size() || out.size() != width_)
        fail("one-hot encode: width mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const Block& b = blocks_[j];
        if (!b.categorical) {
            out[b.offset] = row[j];
        } else {
            auto v = static_cast<long long>(row[j]);
            if (v >= 0 && v < static_cast<long long>(b.size))
                out[b.offset + static_cast<std::size_t>(v)] = 1.0;
        }
    }
}

std::vector<double> OneHotEncoder::encode(std::span<const double> row) const {
    std::vector<double> out(width_);
    encode(row, out);
    return out;
}

// ------------------------------------------------------------------- knn

KnnClassifier::KnnClassifier(Dataset train, std::size_t k, VdmTable vdm)
    : train_(std::move(train)), k_(k), vdm_(std::move(vdm)) {
    if (train_.n_rows() == 0) fail("knn: empty training set");
    if (k_ < 1 || k_ > train_.n_rows()) fail("knn: k out of range");
}

double KnnClassifier::decision_score(std::span<const double> x) const {
    const std::size_t n = train_.n_rows();
    std::vector<Neighbor> all(n);
    for (std::size_t i = 0; i < n; ++i)
        all[i] = {i, mixed_distance(x, train_.row(i), train_.schema, vdm_)};
    auto cmp = [](const Neighbor& a, const Neighbor& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k_), all.end(), cmp);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < k_; ++i)
        if (train_.labels[all[i].index] > 0) ++pos;
    return static_cast<double>(pos) / static_cast<double>(k_) - 0.5;
}

nlohmann::json KnnClassifier::to_json() const {
    nlohmann::json j;
    j["type"] = "knn";
    j["k"] = k_;
    j["schema"] = schema_to_json(train_.schema);
    j["values"] = train_.values;
    j["labels"] = train_.labels;
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : vdm_.entries())
        entries.push_back({{"feature", e.feature},
                           {"cardinality", e.cardinality},
                           {"pos_prob", e.pos_prob},
                           {"dist", e.dist}});
    j["vdm"] = std::move(entries);
    return j;
}

std::unique_ptr<KnnClassifier> KnnClassifier::from_json(const nlohmann::json& j) {
    Dataset train;
    train.schema = schema_from_json(j.at("schema"));
    train.values = j.at("values").get<std::vector<double>>();
    train.labels = j.at("labels").get<std::vector<int>>();
    // The VDM table cannot be reconstituted from the training slice alone
    // (it was built on the full training data), so it is persisted verbatim.
    std::vector<VdmTable::FeatureEntry> entries;
    for (const auto& je : j.at("vdm")) {
        VdmTable::FeatureEntry e;
        e.feature = je.at("feature").get<std::size_t>();
        e.cardinality = je.at("cardinality").get<std::size_t>();
        e.pos_prob = je.at("pos_prob").get<std::vector<double>>();
        e.dist = je.at("dist").get<std::vector<double>>();
        entries.push_back(std::move(e));
    }
    VdmTable vdm = VdmTable::from_entries(train.schema, std::move(entries));
    return std::make_unique<KnnClassifier>(std::move(train), j.at("k").get<std::size_t>(),
                                           std::move(vdm));
}

std::unique_ptr<Classifier> train_knn(const Dataset& train, std::size_t k, const VdmTable& vdm) {
    return std::make_unique<KnnClassifier>(train, k, vdm);
}

// ----------------------------------------------------------------- dtree

namespace {

double entropy(std::size_t pos, std::size_t n) {
    if (n == 0 || pos == 0 || pos == n) return 0.0;
    double p = static_cast<double>(pos) / static_cast<double>(n);
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

struct SplitChoice {
    bool found = false;
    double gain_ratio = 0;
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0;
};

struct TreeBuilder {
    const Dataset& data;
    std::size_t max_depth;
    std::size_t min_leaf;
    std::vector<TreeNode> nodes;

    std::size_t build(const std::vector<std::size_t>& rows, std::size_t depth) {
        std::size_t id = nodes.size();
        nodes.emplace_back();
        TreeNode node;
        node.depth = depth;
        node.n_rows = rows.size();
        std::size_t pos = 0;
        for (auto r : rows)
            if (data.labels[r] > 0) ++pos;
        node.positive_fraction =
            static_cast<double>(pos) / static_cast<double>(rows.size());
        node.majority = node.positive_fraction >= 0.5 ? +1 : -1;

        bool pure = pos == 0 || pos == rows.size();
        SplitChoice split;
        if (!pure && depth < max_depth) split = best_split(rows, pos);
        if (!split.found) {
            nodes[id] = node;
            return id;
        }

        node.leaf = false;
        node.feature = split.feature;
        node.categorical = split.categorical;
        node.threshold = split.threshold;
        if (!split.categorical) {
            std::vector<std::size_t> left, right;
            for (auto r : rows)
                (data.at(r, split.feature) <= split.threshold ? left : right).push_back(r);
            node.children = {-1, -1};
            nodes[id] = node;
            int l = static_cast<int>(build(left, depth + 1));
            int r = static_cast<int>(build(right, depth + 1));
            nodes[id].children = {l, r};
        } else {
            std::size_t card = data.schema.features[split.feature].vocabulary.size();
            std::vector<std::vector<std::size_t>> buckets(card);
            for (auto r : rows)
                buckets[static_cast<std::size_t>(data.at(r, split.feature))].push_back(r);
            node.children.assign(card, -1);
            nodes[id] = node;
            for (std::size_t v = 0; v < card; ++v)
                if (!buckets[v].empty())
                    nodes[id].children[v] = static_cast<int>(build(buckets[v], depth + 1));
        }
        return id;
    }

    SplitChoice best_split(const std::vector<std::size_t>& rows, std::size_t pos) {
        const std::size_t n = rows.size();
        const double parent = entropy(pos, n);
        SplitChoice best;
        for (std::size_t f = 0; f < data.n_features(); ++f) {
            const auto& feat = data.schema.features[f];
            if (feat.kind == FeatureKind::continuous) {
                std::vector<std::pair<double, int>> vals(n);
                for (std::size_t i = 0; i < n; ++i)
                    vals[i] = {data.at(rows[i], f), data.labels[rows[i]]};
                std::sort(vals.begin(), vals.end());
                std::size_t left_n = 0, left_pos = 0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    ++left_n;
                    if (vals[i].second > 0) ++left_pos;
                    if (vals[i].first == vals[i + 1].first) continue;
                    std::size_t right_n = n - left_n;
                    if (left_n < min_leaf || right_n < min_leaf) continue;
                    double info = (static_cast<double>(left_n) / n) * entropy(left_pos, left_n) +
                                  (static_cast<double>(right_n) / n) *
                                      entropy(pos - left_pos, right_n);
                    double gain = parent - info;
                    if (gain <= 1e-12) continue;
                    double pl = static_cast<double>(left_n) / n;
                    double si = -pl * std::log2(pl) - (1 - pl) * std::log2(1 - pl);
                    if (si <= 0) continue;
                    double gr = gain / si;
                    if (!best.found || gr > best.gain_ratio) {
                        best = {true, gr, f, false,
                                0.5 * (vals[i].first + vals[i + 1].first)};
                    }
                }
            } else {
                std::size_t card = feat.vocabulary.size();
                std::vector<std::size_t> cnt(card, 0), cnt_pos(card, 0);
                for (auto r : rows) {
                    auto v = static_cast<std::size_t>(data.at(r, f));
                    ++cnt[v];
                    if (data.labels[r] > 0) ++cnt_pos[v];
                }
                std::size_t branches = 0;
                bool admissible = true;
                double info = 0, si = 0;
                for (std::size_t v = 0; v < card; ++v) {
                    if (cnt[v] == 0) continue;
                    ++branches;
                    if (cnt[v] < min_leaf) admissible = false;
                    double frac = static_cast<double>(cnt[v]) / n;
                    info += frac * entropy(cnt_pos[v], cnt[v]);
                    si -= frac * std::log2(frac);
                }
                if (branches < 2 || !admissible || si <= 0) continue;
                double gain = parent - info;
                if (gain <= 1e-12) continue;
                double gr = gain / si;
                if (!best.found || gr > best.gain_ratio) best = {true, gr, f, true, 0};
            }
        }
        return best;
    }
};

}  // namespace

DecisionTreeClassifier::DecisionTreeClassifier(FeatureSchema schema, std::vector<TreeNode> nodes)
    : schema_(std::move(schema)), nodes_(std::move(nodes)) {
    if (nodes_.empty()) fail("decision tree: no nodes");
}

double DecisionTreeClassifier::decision_score(std::span<const double> x) const {
    const TreeNode* node = &nodes_[0];
    while (!node->leaf) {
        int next = -1;
        if (!node->categorical) {
            next = x[node->feature] <= node->threshold ? node->children[0] : node->children[1];
        } else {
            auto v = static_cast<long long>(x[node->feature]);
            if (v >= 0 && v < static_cast<long long>(node->children.size()))
                next = node->children[static_cast<std::size_t>(v)];
        }
        if (next < 0) break;  // unseen/empty branch: answer from this node
        node = &nodes_[static_cast<std::size_t>(next)];
    }
    return node->positive_fraction - 0.5;
}

nlohmann::json DecisionTreeClassifier::to_json() const {
    nlohmann::json j;
    j["type"] = "dtree";
    j["schema"] = schema_to_json(schema_);
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_)
        nodes.push_back({{"leaf", n.leaf},
                         {"depth", n.depth},
                         {"feature", n.feature},
                         {"categorical", n.categorical},
                         {"threshold", n.threshold},
                         {"children", n.children},
                         {"majority", n.majority},
                         {"positive_fraction", n.positive_fraction},
                         {"n_rows", n.n_rows}});
    j["nodes"] = std::move(nodes);
    return j;
}

std::unique_ptr<DecisionTreeClassifier> DecisionTreeClassifier::from_json(
    const nlohmann::json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& jn : j.at("nodes")) {
        TreeNode n;
        n.leaf = jn.at("leaf").get<bool>();
        n.depth = jn.at("depth").get<std::size_t>();
        n.feature = jn.at("feature").get<std::size_t>();
        n.categorical = jn.at("categorical").get<bool>();
        n.threshold = jn.at("threshold").get<double>();
        n.children = jn.at("children").get<std::vector<int>>();
        n.majority = jn.at("majority").get<int>();
        n.positive_fraction = jn.at("positive_fraction").get<double>();
        n.n_rows = jn.at("n_rows").get<std::size_t>();
        nodes.push_back(std::move(n));
    }
    return std::make_unique<DecisionTreeClassifier>(schema_from_json(j.at("schema")),
                                                    std::move(nodes));
}

std::unique_ptr<Classifier> train_decision_tree(const Dataset& train, std::size_t max_depth,
                                                std::size_t min_leaf) {
    if (train.n_rows() == 0) fail("decision tree: empty training set");
    TreeBuilder builder{train, max_depth, min_leaf, {}};
    std::vector<std::size_t> rows(train.n_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    builder.build(rows, 0);
    return std::make_unique<DecisionTreeClassifier>(train.schema, std::move(builder.nodes));
}

// ------------------------------------------------------------------ bpnn

BpnnNetwork BpnnNetwork::random_init(std::size_t inputs, std::size_t hidden, Rng& rng) {
    BpnnNetwork net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.w1.resize(hidden * inputs);
    net.b1.resize(hidden);
    net.w2.resize(hidden);
    for (auto& w : net.w1) w = rng.uniform(-0.5, 0.5);
    for (auto& w : net.b1) w = rng.uniform(-0.5, 0.5);
    for (auto& w : net.w2) w = rng.uniform(-0.5, 0.5);
    net.b2 = rng.uniform(-0.5, 0.5);
    return net;
}

double BpnnNetwork::forward(std::span<const double> x) const {
    double z2 = b2;
    for (std::size_t j = 0; j < hidden; ++j) {
        double z = b1[j];
        const double* row = w1.data() + j * inputs;
        for (std::size_t i = 0; i < inputs; ++i) z += row[i] * x[i];
        z2 += w2[j] * logistic(z);
    }
    return logistic(z2);
}

double BpnnNetwork::sample_loss(std::span<const double> x, double target) const {
    double d = forward(x) - target;
    return 0.5 * d * d;
}

void BpnnNetwork::accumulate_gradient(std::span<const double> x, double target,
                                      std::span<double> grad) const {
    if (grad.size() != parameter_count()) fail("bpnn gradient: size mismatch");
    std::vector<double> h(hidden);
    double z2 = b2;
    for (std::size_t j = 0; j < hidden; ++j) {
        double z = b1[j];
        const double* row = w1.data() + j * inputs;
        for (std::size_t i = 0; i < inputs; ++i) z += row[i] * x[i];
        h[j] = logistic(z);
        z2 += w2[j] * h[j];
    }
    double o = logistic(z2);
    double delta_out = (o - target) * o * (1 - o);

    double* gw1 = grad.data();
    double* gb1 = gw1 + w1.size();
    double* gw2 = gb1 + b1.size();
    double* gb2 = gw2 + w2.size();
    for (std::size_t j = 0; j < hidden; ++j) {
        double delta_h = delta_out * w2[j] * h[j] * (1 - h[j]);
        double* row = gw1 + j * inputs;
        for (std::size_t i = 0; i < inputs; ++i) row[i] += delta_h * x[i];
        gb1[j] += delta_h;
        gw2[j] += delta_out * h[j];
    }
    *gb2 += delta_out;
}

void BpnnNetwork::sgd_step(std::span<const double> x, double target, double learning_rate) {
    std::vector<double> grad(parameter_count(), 0.0);
    accumulate_gradient(x, target, grad);
    double* gw1 = grad.data();
    double* gb1 = gw1 + w1.size();
    double* gw2 = gb1 + b1.size();
    double* gb2 = gw2 + w2.size();
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] -= learning_rate * gw1[i];
    for (std::size_t j = 0; j < hidden; ++j) {
        b1[j] -= learning_rate * gb1[j];
        w2[j] -= learning_rate * gw2[j];
    }
    b2 -= learning_rate * *gb2;
}

std::vector<double> BpnnNetwork::parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    p.insert(p.end(), w1.begin(), w1.end());
    p.insert(p.end(), b1.begin(), b1.end());
    p.insert(p.end(), w2.begin(), w2.end());
    p.push_back(b2);
    return p;
}

void BpnnNetwork::set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) fail("bpnn set_parameters: size mismatch");
    std::size_t at = 0;
    for (auto& w : w1) w = p[at++];
    for (auto& w : b1) w = p[at++];
    for (auto& w : w2) w = p[at++];
    b2 = p[at];
}

BpnnClassifier::BpnnClassifier(FeatureSchema schema, BpnnNetwork network)
    : schema_(std::move(schema)), encoder_(schema_), network_(std::move(network)) {
    if (encoder_.width() != network_.inputs) fail("bpnn: encoder/network width mismatch");
}

double BpnnClassifier::decision_score(std::span<const double> x) const {
    return network_.forward(encoder_.encode(x)) - 0.5;
}

nlohmann::json BpnnClassifier::to_json() const {
    return {{"type", "bpnn"},
            {"schema", schema_to_json(schema_)},
            {"inputs", network_.inputs},
            {"hidden", network_.hidden},
            {"w1", network_.w1},
            {"b1", network_.b1},
            {"w2", network_.w2},
            {"b2", network_.b2}};
}

std::unique_ptr<BpnnClassifier> BpnnClassifier::from_json(const nlohmann::json& j) {
    BpnnNetwork net;
    net.inputs = j.at("inputs").get<std::size_t>();
    net.hidden = j.at("hidden").get<std::size_t>();
    net.w1 = j.at("w1").get<std::vector<double>>();
    net.b1 = j.at("b1").get<std::vector<double>>();
    net.w2 = j.at("w2").get<std::vector<double>>();
    net.b2 = j.at("b2").get<double>();
    return std::make_unique<BpnnClassifier>(schema_from_json(j.at("schema")), std::move(net));
}

std::unique_ptr<Classifier> train_bpnn(const Dataset& train, std::size_t hidden_units,
                                       std::size_t epochs, double learning_rate,
                                       std::uint64_t seed) {
    if (train.n_rows() == 0) fail("bpnn: empty training set");
    OneHotEncoder encoder(train.schema);
    const std::size_t n = train.n_rows();
    std::vector<double> X(n * encoder.width());
    std::vector<double> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        encoder.encode(train.row(i), {X.data() + i * encoder.width(), encoder.width()});
        targets[i] = train.labels[i] > 0 ? 1.0 : 0.0;
    }

    Rng rng(seed);
    BpnnNetwork net = BpnnNetwork::random_init(encoder.width(), hidden_units, rng);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t i : order)
            net.sgd_step({X.data() + i * encoder.width(), encoder.width()}, targets[i],
                         learning_rate);
    }
    return std::make_unique<BpnnClassifier>(train.schema, std::move(net));
}

// ------------------------------------------------------------------- svm

namespace {

double kernel_value(SvmKernel kernel, double gamma, std::span<const double> a,
                    std::span<const double> b) {
    if (kernel == SvmKernel::linear) {
        double dot = 0;
        for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
        return dot;
    }
    double d2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

// Sequential minimal optimization with Platt's |E1 - E2| second-choice
// heuristic made deterministic (ties and fallbacks scan by index).
struct SmoSolver {
    std::size_t n;
    double C, tol;
    const std::vector<double>& K;  // n x n
    const std::vector<int>& y;
    std::vector<double> alpha, f;  // f_i = sum_j alpha_j y_j K_ij + b
    double b = 0;

    SmoSolver(std::size_t n_, double c_, double tol_, const std::vector<double>& K_,
              const std::vector<int>& y_)
        : n(n_), C(c_), tol(tol_), K(K_), y(y_), alpha(n_, 0.0), f(n_, 0.0) {}

    bool take_step(std::size_t i1, std::size_t i2) {
        if (i1 == i2) return false;
        double a1o = alpha[i1], a2o = alpha[i2];
        int y1 = y[i1], y2 = y[i2];
        double E1 = f[i1] - y1, E2 = f[i2] - y2;
        double s = y1 * y2;
        double L = s < 0 ? std::max(0.0, a2o - a1o) : std::max(0.0, a1o + a2o - C);
        double H = s < 0 ? std::min(C, C + a2o - a1o) : std::min(C, a1o + a2o);
        if (L >= H) return false;
        double k11 = K[i1 * n + i1], k22 = K[i2 * n + i2], k12 = K[i1 * n + i2];
        double eta = k11 + k22 - 2 * k12;
        if (eta <= 0) return false;
        double a2 = a2o + y2 * (E1 - E2) / eta;
        a2 = std::clamp(a2, L, H);
        if (std::abs(a2 - a2o) < 1e-3 * (a2 + a2o + 1e-3)) return false;
        double a1 = a1o + s * (a2o - a2);
        a1 = std::clamp(a1, 0.0, C);  // shave float dust off the box

        double d1 = y1 * (a1 - a1o), d2 = y2 * (a2 - a2o);
        double b1 = b - E1 - d1 * k11 - d2 * k12;
        double b2 = b - E2 - d1 * k12 - d2 * k22;
        double b_new = (a1 > 0 && a1 < C) ? b1 : (a2 > 0 && a2 < C) ? b2 : 0.5 * (b1 + b2);
        double db = b_new - b;
        for (std::size_t k = 0; k < n; ++k) f[k] += d1 * K[i1 * n + k] + d2 * K[i2 * n + k] + db;
        alpha[i1] = a1;
        alpha[i2] = a2;
        b = b_new;
        return true;
    }

    bool examine(std::size_t i2) {
        double E2 = f[i2] - y[i2];
        double r2 = E2 * y[i2];
        bool violates = (r2 < -tol && alpha[i2] < C) || (r2 > tol && alpha[i2] > 0);
        if (!violates) return false;
        std::size_t best = i2;
        double best_gap = -1;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i2) continue;
            double gap = std::abs((f[j] - y[j]) - E2);
            if (gap > best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best != i2 && take_step(best, i2)) return true;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i2 && j != best && take_step(j, i2)) return true;
        return false;
    }

    void solve(std::size_t max_sweeps) {
        for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (examine(i)) ++changed;
            if (changed == 0) break;  // every point satisfies KKT within tol
        }
    }
};

}  // namespace

SvmClassifier::SvmClassifier(FeatureSchema schema, SvmKernel kernel, double gamma, double bias,
                             std::vector<double> alphas, std::vector<int> targets,
                             std::vector<double> support, std::size_t width)
    : schema_(std::move(schema)),
      encoder_(schema_),
      kernel_(kernel),
      gamma_(gamma),
      bias_(bias),
      alphas_(std::move(alphas)),
      targets_(std::move(targets)),
      support_(std::move(support)),
      width_(width) {
    if (encoder_.width() != width_) fail("svm: encoder width mismatch");
    if (alphas_.size() != targets_.size() || support_.size() != alphas_.size() * width_)
        fail("svm: inconsistent model arrays");
}

double SvmClassifier::decision_score(std::span<const double> x) const {
    std::vector<double> q = encoder_.encode(x);
    double score = bias_;
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
        if (alphas_[i] == 0) continue;
        score += alphas_[i] * targets_[i] *
                 kernel_value(kernel_, gamma_, {support_.data() + i * width_, width_}, q);
    }
    return score;
}

nlohmann::json SvmClassifier::to_json() const {
    return {{"type", "svm"},
            {"schema", schema_to_json(schema_)},
            {"kernel", kernel_ == SvmKernel::linear ? "linear" : "rbf"},
            {"gamma", gamma_},
            {"bias", bias_},
            {"alphas", alphas_},
            {"targets", targets_},
            {"support", support_},
            {"width", width_}};
}

std::unique_ptr<SvmClassifier> SvmClassifier::from_json(const nlohmann::json& j) {
    return std::make_unique<SvmClassifier>(
        schema_from_json(j.at("schema")),
        j.at("kernel").get<std::string>() == "linear" ? SvmKernel::linear : SvmKernel::rbf,
        j.at("gamma").get<double>(), j.at("bias").get<double>(),
        j.at("alphas").get<std::vector<double>>(), j.at("targets").get<std::vector<int>>(),
        j.at("support").get<std::vector<double>>(), j.at("width").get<std::size_t>());
}

std::unique_ptr<Classifier> train_svm(const Dataset& train, const ClassifierSpec& spec) {
    if (train.n_rows() == 0) fail("svm: empty training set");
    if (!(spec.svm_c > 0)) fail("svm: C must be > 0");
    OneHotEncoder encoder(train.schema);
    const std::size_t n = train.n_rows();
    const std::size_t w = encoder.width();
    std::vector<double> X(n * w);
    for (std::size_t i = 0; i < n; ++i)
        encoder.encode(train.row(i), {X.data() + i * w, w});

    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double v = kernel_value(spec.svm_kernel, spec.svm_gamma, {X.data() + i * w, w},
                                    {X.data() + j * w, w});
            if (!std::isfinite(v)) fail("svm: non-finite kernel value");
            K[i * n + j] = v;
            K[j * n + i] = v;
        }
    }

    SmoSolver solver(n, spec.svm_c, spec.svm_tolerance, K, train.labels);
    // max_passes bounds the optimization sweeps; the solver stops earlier as
    // soon as a full sweep changes nothing.
    solver.solve(spec.svm_max_passes * 10);
    return std::make_unique<SvmClassifier>(train.schema, spec.svm_kernel, spec.svm_gamma,
                                           solver.b, std::move(solver.alpha), train.labels,
                                           std::move(X), w);
}

// -------------------------------------------------------------- dispatch

std::unique_ptr<Classifier> train_classifier(const Dataset& train, const ClassifierSpec& spec,
                                             const VdmTable& vdm) {
    spec.validate();
    switch (spec.kind) {
        case ClassifierKind::knn: return train_knn(train, spec.knn_k, vdm);
        case ClassifierKind::dtree:
            return train_decision_tree(train, spec.dtree_max_depth, spec.dtree_min_leaf);
        case ClassifierKind::bpnn:
            return train_bpnn(train, spec.bpnn_hidden, spec.bpnn_epochs,
                              spec.bpnn_learning_rate, spec.bpnn_init_seed);
        case ClassifierKind::svm: return train_svm(train, spec);
    }
    fail("unknown classifier kind");
}

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "knn") return KnnClassifier::from_json(j);
    if (type == "dtree") return DecisionTreeClassifier::from_json(j);
    if (type == "bpnn") return BpnnClassifier::from_json(j);
    if (type == "svm") return SvmClassifier::from_json(j);
    fail("unknown serialized classifier type: " + type);
}

std::vector<double> score_batch(const Classifier& model, const Dataset& data) {
    const auto n = static_cast<std::ptrdiff_t>(data.n_rows());
    std::vector<double> scores(data.n_rows());
    if (parallel::use_parallel()) {
#ifdef WHSBOOST_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(parallel::worker_count())
        for (std::ptrdiff_t i = 0; i < n; ++i)
            scores[static_cast<std::size_t>(i)] =
                model.decision_score(data.row(static_cast<std::size_t>(i)));
#endif
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            scores[static_cast<std::size_t>(i)] =
                model.decision_score(data.row(static_cast<std::size_t>(i)));
    }
    return scores;
}

std::vector<int> predict_batch(const Classifier& model, const Dataset& data) {
    auto scores = score_batch(model, data);
    std::vector<int> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) labels[i] = scores[i] >= 0 ? +1 : -1;
    return labels;
}

}  // namespace whsboost
