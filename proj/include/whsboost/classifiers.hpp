#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "whsboost/dataset.hpp"
#include "whsboost/distance.hpp"
#include "whsboost/rng.hpp"

namespace whsboost {

enum class ClassifierKind { knn, dtree, bpnn, svm };
enum class SvmKernel { linear, rbf };

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;

    std::size_t knn_k = 3;

    std::size_t dtree_max_depth = 10;
    std::size_t dtree_min_leaf = 1;

    std::size_t bpnn_hidden = 10;
    std::size_t bpnn_epochs = 20;
    double bpnn_learning_rate = 0.1;
    std::uint64_t bpnn_init_seed = 1;

    SvmKernel svm_kernel = SvmKernel::rbf;
    double svm_c = 1.0;
    double svm_gamma = 1.0;
    double svm_tolerance = 1e-3;
    std::size_t svm_max_passes = 10;  // optimization budget: up to 10x this many sweeps

    void validate() const;
    nlohmann::json to_json() const;
    static ClassifierSpec from_json(const nlohmann::json& j);
};

const char* classifier_kind_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_name(const std::string& name);

// Uniform contract for the base learners: a real-valued decision score
// (larger = more positive) with predict = sign(score), score 0 -> +1.
// All training is unweighted; boosting handles weights by sampling.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual double decision_score(std::span<const double> x) const = 0;
    virtual nlohmann::json to_json() const = 0;

    int predict(std::span<const double> x) const {
        return decision_score(x) >= 0 ? +1 : -1;
    }
};

// Expands categorical features to one-hot blocks for the models that need a
// purely numeric geometry (BPNN, SVM). Continuous features pass through.
// An out-of-vocabulary index encodes as an all-zero block.
class OneHotEncoder {
public:
    OneHotEncoder() = default;
    explicit OneHotEncoder(const FeatureSchema& schema);

    std::size_t width() const { return width_; }
    void encode(std::span<const double> row, std::span<double> out) const;
    std::vector<double> encode(std::span<const double> row) const;

private:
    struct Block {
        std::size_t offset = 0;
        std::size_t size = 1;       // 1 for continuous, cardinality otherwise
        bool categorical = false;
    };
    std::vector<Block> blocks_;
    std::size_t width_ = 0;
};

// One hidden layer, logistic activations everywhere, squared-error loss on
// {0,1} targets. Exposed so tests can finite-difference the gradient.
struct BpnnNetwork {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::vector<double> w1;  // hidden x inputs, row-major
    std::vector<double> b1;  // hidden
    std::vector<double> w2;  // hidden
    double b2 = 0;

    static BpnnNetwork random_init(std::size_t inputs, std::size_t hidden, Rng& rng);

    double forward(std::span<const double> x) const;
    // L = 0.5 (forward(x) - target)^2
    double sample_loss(std::span<const double> x, double target) const;
    // Adds dL/dtheta to grad, laid out as parameters(): w1, b1, w2, b2.
    void accumulate_gradient(std::span<const double> x, double target,
                             std::span<double> grad) const;
    void sgd_step(std::span<const double> x, double target, double learning_rate);

    std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + 1; }
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> p);
};

struct TreeNode {
    bool leaf = true;
    std::size_t depth = 0;
    std::size_t feature = 0;
    bool categorical = false;
    double threshold = 0;        // continuous split: x <= threshold goes left
    std::vector<int> children;   // continuous: {left, right}; categorical: per value, -1 = empty branch
    int majority = +1;
    double positive_fraction = 0;
    std::size_t n_rows = 0;
};

class KnnClassifier : public Classifier {
public:
    KnnClassifier(Dataset train, std::size_t k, VdmTable vdm);
    double decision_score(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<KnnClassifier> from_json(const nlohmann::json& j);
    std::size_t k() const { return k_; }

private:
    Dataset train_;
    std::size_t k_;
    VdmTable vdm_;
};

class DecisionTreeClassifier : public Classifier {
public:
    DecisionTreeClassifier(FeatureSchema schema, std::vector<TreeNode> nodes);
    double decision_score(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<DecisionTreeClassifier> from_json(const nlohmann::json& j);
    const std::vector<TreeNode>& nodes() const { return nodes_; }

private:
    FeatureSchema schema_;
    std::vector<TreeNode> nodes_;  // nodes_[0] is the root
};

class BpnnClassifier : public Classifier {
public:
    BpnnClassifier(FeatureSchema schema, BpnnNetwork network);
    double decision_score(std::span<const double> x) const override;  // output - 0.5
    nlohmann::json to_json() const override;
    static std::unique_ptr<BpnnClassifier> from_json(const nlohmann::json& j);
    const BpnnNetwork& network() const { return network_; }

private:
    FeatureSchema schema_;
    OneHotEncoder encoder_;
    BpnnNetwork network_;
};

class SvmClassifier : public Classifier {
public:
    SvmClassifier(FeatureSchema schema, SvmKernel kernel, double gamma, double bias,
                  std::vector<double> alphas, std::vector<int> targets,
                  std::vector<double> support, std::size_t width);
    double decision_score(std::span<const double> x) const override;
    nlohmann::json to_json() const override;
    static std::unique_ptr<SvmClassifier> from_json(const nlohmann::json& j);

    const std::vector<double>& alphas() const { return alphas_; }
    const std::vector<int>& targets() const { return targets_; }
    double bias() const { return bias_; }

private:
    FeatureSchema schema_;
    OneHotEncoder encoder_;
    SvmKernel kernel_;
    double gamma_;
    double bias_;
    std::vector<double> alphas_;   // every training alpha, including zeros
    std::vector<int> targets_;
    std::vector<double> support_;  // encoded training rows, row-major
    std::size_t width_;
};

std::unique_ptr<Classifier> train_knn(const Dataset& train, std::size_t k, const VdmTable& vdm);
std::unique_ptr<Classifier> train_decision_tree(const Dataset& train, std::size_t max_depth,
                                                std::size_t min_leaf);
std::unique_ptr<Classifier> train_bpnn(const Dataset& train, std::size_t hidden_units,
                                       std::size_t epochs, double learning_rate,
                                       std::uint64_t seed);
std::unique_ptr<Classifier> train_svm(const Dataset& train, const ClassifierSpec& spec);

// Dispatch on spec.kind; vdm is consumed by KNN only.
std::unique_ptr<Classifier> train_classifier(const Dataset& train, const ClassifierSpec& spec,
                                             const VdmTable& vdm);

std::unique_ptr<Classifier> classifier_from_json(const nlohmann::json& j);

// Batch prediction kernels: OpenMP across rows when parallel dispatch is
// enabled, identical output either way.
std::vector<double> score_batch(const Classifier& model, const Dataset& data);
std::vector<int> predict_batch(const Classifier& model, const Dataset& data);

}  // namespace whsboost
