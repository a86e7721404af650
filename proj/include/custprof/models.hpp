#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "custprof/table.hpp"

#include <nlohmann/json_fwd.hpp>

namespace custprof {

enum class ModelFamily { Rbf, LogReg, LinearSvm, Gbt };

ModelFamily parseFamily(const std::string& name);
std::string familyName(ModelFamily f);

struct RbfParams {
    int centers = 10;
    bool fixedWidth = false;
    double width = 1.0;        // fixed rule
    int widthNeighbors = 2;    // mean_knn rule
    double ridge = 1e-6;
    bool sigmoidLink = false;  // default stays literal to the linear-adder output
};

struct LogRegParams {
    double l2 = 0.0;
    double learningRate = 0.1;
    int epochs = 500;
};

struct SvmParams {
    double lambda = 1e-3;
    int epochs = 2000;
};

struct GbtParams {
    int nTrees = 100;
    int depth = 3;
    double learningRate = 0.1;
    int minLeaf = 5;
};

struct PredictorSpec {
    ModelFamily family = ModelFamily::Gbt;
    std::uint64_t seed = 0;
    std::variant<RbfParams, LogRegParams, SvmParams, GbtParams> params = GbtParams{};
    std::string label;  // report name; defaults to the family name

    std::string name() const { return label.empty() ? familyName(family) : label; }

    static PredictorSpec rbf(RbfParams p = {}, std::uint64_t seed = 0);
    static PredictorSpec logreg(LogRegParams p = {}, std::uint64_t seed = 0);
    static PredictorSpec linearSvm(SvmParams p = {}, std::uint64_t seed = 0);
    static PredictorSpec gbt(GbtParams p = {}, std::uint64_t seed = 0);

    nlohmann::json toJson() const;
    static PredictorSpec fromJson(const nlohmann::json& j);
};

// Gaussian hidden layer phi_k(x) = exp(-r_k^2 / a_k^2) with r_k = |x - C_k|,
// combined by a linear output layer u = w_0 + sum_k w_k phi_k(x).
struct RbfModel {
    std::vector<std::vector<double>> centers;  // N x d
    std::vector<double> widths;                // a_k > 0
    std::vector<double> weights;               // w_1..w_N
    double bias = 0.0;                         // w_0
    bool sigmoidLink = false;
};

double rbfActivation(const RbfModel& model, std::size_t k, std::span<const double> x);

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;
    bool hinge = false;      // trained as SVM; probability via calibrated logistic link
    double calibScale = 1.0;
    double calibOffset = 0.0;
    std::vector<double> lossTrace;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> row) const;
};

struct GbtModel {
    std::vector<RegressionTree> trees;
    double learningRate = 0.1;
    double baseScore = 0.0;  // log-odds
    bool degenerate = false; // single-class training labels
    std::vector<double> lossTrace;
};

// One fitted classifier behind the common predict contract.
class Predictor {
public:
    Predictor() = default;

    static Predictor fit(const PredictorSpec& spec, const FeatureMatrix& train,
                         const std::vector<int>& labels);

    std::vector<double> predictProba(const FeatureMatrix& m) const;

    struct Prediction {
        double probability = 0.0;
        int label = 0;  // 1 iff probability >= threshold
    };
    std::vector<Prediction> predict(const FeatureMatrix& m, double threshold = 0.5) const;

    ModelFamily family() const { return spec_.family; }
    const PredictorSpec& spec() const { return spec_; }
    const RbfModel& rbf() const;
    const LinearModel& linear() const;
    const GbtModel& gbt() const;
    const std::vector<double>& lossTrace() const;

    // Versioned JSON document (family tag + parameters).
    nlohmann::json toJson() const;
    static Predictor fromJson(const nlohmann::json& j);

private:
    PredictorSpec spec_;
    std::variant<std::monostate, RbfModel, LinearModel, GbtModel> model_;
};

RbfModel rbfFit(const FeatureMatrix& train, const std::vector<int>& labels, const RbfParams& p,
                std::uint64_t seed);
std::vector<double> rbfPredict(const RbfModel& model, const FeatureMatrix& m);

LinearModel logregFit(const FeatureMatrix& train, const std::vector<int>& labels,
                      const LogRegParams& p, std::uint64_t seed);
LinearModel svmFit(const FeatureMatrix& train, const std::vector<int>& labels, const SvmParams& p,
                   std::uint64_t seed);
std::vector<double> linearPredict(const LinearModel& model, const FeatureMatrix& m);

GbtModel gbtFit(const FeatureMatrix& train, const std::vector<int>& labels, const GbtParams& p,
                std::uint64_t seed);
std::vector<double> gbtPredict(const GbtModel& model, const FeatureMatrix& m);

// Mean L2-regularized logistic loss and its gradient wrt (weights, bias);
// exposed for the finite-difference checks.
double logisticLoss(const FeatureMatrix& m, const std::vector<int>& labels,
                    const std::vector<double>& weights, double bias, double l2);
void logisticGradient(const FeatureMatrix& m, const std::vector<int>& labels,
                      const std::vector<double>& weights, double bias, double l2,
                      std::vector<double>& gradW, double& gradB);

}  // namespace custprof
