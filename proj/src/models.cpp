#include "custprof/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "custprof/clustering.hpp"
#include "custprof/errors.hpp"
#include "custprof/rng.hpp"

namespace custprof {

namespace {

double sigmoid(double z) {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(t)) without overflow.
double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

void requireScaledInputs(const FeatureMatrix& m) {
    constexpr double slack = 1e-9;
    for (std::size_t c = 0; c < m.columnCount(); ++c) {
        for (std::size_t r = 0; r < m.rowCount(); ++r) {
            const double v = m.at(r, c);
            if (v < -1.0 - slack || v > 1.0 + slack) {
                throw ConfigError("rbf: inputs must be scaled to [0,1] or [-1,1]; column '" +
                                  m.columnNames()[c] + "' has value " + formatReal(v));
            }
        }
    }
}

void requireSameWidth(const FeatureMatrix& m, std::size_t d, const char* who) {
    if (m.columnCount() != d) {
        throw ConfigError(std::string(who) + ": matrix has " + std::to_string(m.columnCount()) +
                          " columns, model expects " + std::to_string(d));
    }
}

void requireLabels(const FeatureMatrix& m, const std::vector<int>& labels) {
    if (labels.size() != m.rowCount()) {
        throw ConfigError("labels length " + std::to_string(labels.size()) + " != row count " +
                          std::to_string(m.rowCount()));
    }
    for (int y : labels) {
        if (y != 0 && y != 1) throw ConfigError("labels must be 0/1");
    }
}

}  // namespace

ModelFamily parseFamily(const std::string& name) {
    if (name == "rbf") return ModelFamily::Rbf;
    if (name == "logreg") return ModelFamily::LogReg;
    if (name == "linear_svm") return ModelFamily::LinearSvm;
    if (name == "gbt") return ModelFamily::Gbt;
    throw ConfigError("unknown model family: " + name);
}

std::string familyName(ModelFamily f) {
    switch (f) {
        case ModelFamily::Rbf: return "rbf";
        case ModelFamily::LogReg: return "logreg";
        case ModelFamily::LinearSvm: return "linear_svm";
        case ModelFamily::Gbt: return "gbt";
    }
    return "gbt";
}

PredictorSpec PredictorSpec::rbf(RbfParams p, std::uint64_t seed) {
    return PredictorSpec{ModelFamily::Rbf, seed, p, ""};
}
PredictorSpec PredictorSpec::logreg(LogRegParams p, std::uint64_t seed) {
    return PredictorSpec{ModelFamily::LogReg, seed, p, ""};
}
PredictorSpec PredictorSpec::linearSvm(SvmParams p, std::uint64_t seed) {
    return PredictorSpec{ModelFamily::LinearSvm, seed, p, ""};
}
PredictorSpec PredictorSpec::gbt(GbtParams p, std::uint64_t seed) {
    return PredictorSpec{ModelFamily::Gbt, seed, p, ""};
}

nlohmann::json PredictorSpec::toJson() const {
    nlohmann::json j{{"family", familyName(family)}, {"seed", seed}};
    if (!label.empty()) j["label"] = label;
    switch (family) {
        case ModelFamily::Rbf: {
            const auto& p = std::get<RbfParams>(params);
            j["centers"] = p.centers;
            j["width_rule"] = p.fixedWidth ? "fixed" : "mean_knn";
            j["width"] = p.width;
            j["width_neighbors"] = p.widthNeighbors;
            j["ridge"] = p.ridge;
            j["sigmoid_link"] = p.sigmoidLink;
            break;
        }
        case ModelFamily::LogReg: {
            const auto& p = std::get<LogRegParams>(params);
            j["l2"] = p.l2;
            j["learning_rate"] = p.learningRate;
            j["epochs"] = p.epochs;
            break;
        }
        case ModelFamily::LinearSvm: {
            const auto& p = std::get<SvmParams>(params);
            j["lambda"] = p.lambda;
            j["epochs"] = p.epochs;
            break;
        }
        case ModelFamily::Gbt: {
            const auto& p = std::get<GbtParams>(params);
            j["n_trees"] = p.nTrees;
            j["depth"] = p.depth;
            j["learning_rate"] = p.learningRate;
            j["min_leaf"] = p.minLeaf;
            break;
        }
    }
    return j;
}

PredictorSpec PredictorSpec::fromJson(const nlohmann::json& j) {
    PredictorSpec spec;
    spec.family = parseFamily(j.at("family").get<std::string>());
    spec.seed = j.value("seed", 0ULL);
    spec.label = j.value("label", std::string());
    switch (spec.family) {
        case ModelFamily::Rbf: {
            RbfParams p;
            p.centers = j.value("centers", p.centers);
            p.fixedWidth = j.value("width_rule", std::string("mean_knn")) == "fixed";
            p.width = j.value("width", p.width);
            p.widthNeighbors = j.value("width_neighbors", p.widthNeighbors);
            p.ridge = j.value("ridge", p.ridge);
            p.sigmoidLink = j.value("sigmoid_link", p.sigmoidLink);
            spec.params = p;
            break;
        }
        case ModelFamily::LogReg: {
            LogRegParams p;
            p.l2 = j.value("l2", p.l2);
            p.learningRate = j.value("learning_rate", p.learningRate);
            p.epochs = j.value("epochs", p.epochs);
            spec.params = p;
            break;
        }
        case ModelFamily::LinearSvm: {
            SvmParams p;
            p.lambda = j.value("lambda", p.lambda);
            p.epochs = j.value("epochs", p.epochs);
            spec.params = p;
            break;
        }
        case ModelFamily::Gbt: {
            GbtParams p;
            p.nTrees = j.value("n_trees", p.nTrees);
            p.depth = j.value("depth", p.depth);
            p.learningRate = j.value("learning_rate", p.learningRate);
            p.minLeaf = j.value("min_leaf", p.minLeaf);
            spec.params = p;
            break;
        }
    }
    return spec;
}

double rbfActivation(const RbfModel& model, std::size_t k, std::span<const double> x) {
    const double r = euclidean(x, model.centers[k]);
    const double a = model.widths[k];
    return std::exp(-(r * r) / (a * a));
}

RbfModel rbfFit(const FeatureMatrix& train, const std::vector<int>& labels, const RbfParams& p,
                std::uint64_t seed) {
    requireLabels(train, labels);
    requireScaledInputs(train);
    if (p.centers < 1) throw ConfigError("rbf: centers must be >= 1");
    const std::size_t N = static_cast<std::size_t>(p.centers);
    if (N > train.rowCount()) {
        throw ConfigError("rbf: centers = " + std::to_string(N) + " exceeds row count " +
                          std::to_string(train.rowCount()));
    }
    if (p.ridge < 0.0) throw ConfigError("rbf: ridge must be >= 0");

    RbfModel model;
    model.sigmoidLink = p.sigmoidLink;
    model.centers = kmeansFit(train, N, Measure::Euclidean, seed).centroids;

    // Widths: fixed value, or mean distance to the j nearest centers.
    model.widths.assign(N, 0.0);
    if (p.fixedWidth) {
        if (p.width <= 0.0) throw ConfigError("rbf: fixed width must be > 0");
        std::fill(model.widths.begin(), model.widths.end(), p.width);
    } else {
        double globalSum = 0.0;
        std::size_t globalCount = 0;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = i + 1; j < N; ++j) {
                globalSum += euclidean(model.centers[i], model.centers[j]);
                ++globalCount;
            }
        }
        const double globalMean = globalCount ? globalSum / static_cast<double>(globalCount) : 0.0;
        const std::size_t j = std::min<std::size_t>(
            std::max(1, p.widthNeighbors), N > 1 ? N - 1 : 1);
        for (std::size_t k = 0; k < N; ++k) {
            double width = 0.0;
            if (N > 1) {
                std::vector<double> dists;
                dists.reserve(N - 1);
                for (std::size_t o = 0; o < N; ++o) {
                    if (o != k) dists.push_back(euclidean(model.centers[k], model.centers[o]));
                }
                std::sort(dists.begin(), dists.end());
                for (std::size_t t = 0; t < j; ++t) width += dists[t];
                width /= static_cast<double>(j);
            }
            if (width <= 0.0) width = globalMean;
            if (width <= 0.0) width = 1.0;
            model.widths[k] = width;
        }
    }

    // Ridge-regularized least squares on the n x (N+1) design (bias column
    // first, unpenalized). Column-pivoted QR hands back a basic solution when
    // the system is rank deficient.
    const std::size_t n = train.rowCount();
    const std::size_t cols = N + 1;
    const std::size_t ridgeRows = p.ridge > 0.0 ? N : 0;
    Eigen::MatrixXd design(n + ridgeRows, cols);
    Eigen::VectorXd target = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n + ridgeRows));
    for (std::size_t r = 0; r < n; ++r) {
        design(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (std::size_t k = 0; k < N; ++k) {
            design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k + 1)) =
                rbfActivation(model, k, train.row(r));
        }
        target(static_cast<Eigen::Index>(r)) = static_cast<double>(labels[r]);
    }
    if (ridgeRows > 0) {
        const double s = std::sqrt(p.ridge);
        design.bottomRows(static_cast<Eigen::Index>(ridgeRows)).setZero();
        for (std::size_t k = 0; k < N; ++k) {
            design(static_cast<Eigen::Index>(n + k), static_cast<Eigen::Index>(k + 1)) = s;
        }
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() == 0) {
        throw NumericError("rbf: singular design; increase ridge above 0");
    }
    Eigen::VectorXd solution = qr.solve(target);
    if (!solution.allFinite()) {
        throw NumericError("rbf: singular normal system with ridge = " + formatReal(p.ridge) +
                           "; use ridge > 0");
    }
    model.bias = solution(0);
    model.weights.assign(N, 0.0);
    for (std::size_t k = 0; k < N; ++k) model.weights[k] = solution(static_cast<Eigen::Index>(k + 1));
    return model;
}

std::vector<double> rbfPredict(const RbfModel& model, const FeatureMatrix& m) {
    requireSameWidth(m, model.centers.empty() ? m.columnCount() : model.centers[0].size(), "rbf");
    std::vector<double> out(m.rowCount());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        double u = model.bias;
        for (std::size_t k = 0; k < model.centers.size(); ++k) {
            u += model.weights[k] * rbfActivation(model, k, m.row(r));
        }
        out[r] = model.sigmoidLink ? sigmoid(u) : std::clamp(u, 0.0, 1.0);
    }
    return out;
}

double logisticLoss(const FeatureMatrix& m, const std::vector<int>& labels,
                    const std::vector<double>& weights, double bias, double l2) {
    const std::size_t n = m.rowCount();
    double loss = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double z = bias;
        const auto row = m.row(r);
        for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * row[c];
        const double s = labels[r] == 1 ? 1.0 : -1.0;
        loss += softplus(-s * z);
    }
    loss /= static_cast<double>(n);
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

void logisticGradient(const FeatureMatrix& m, const std::vector<int>& labels,
                      const std::vector<double>& weights, double bias, double l2,
                      std::vector<double>& gradW, double& gradB) {
    const std::size_t n = m.rowCount();
    gradW.assign(weights.size(), 0.0);
    gradB = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double z = bias;
        const auto row = m.row(r);
        for (std::size_t c = 0; c < weights.size(); ++c) z += weights[c] * row[c];
        const double err = sigmoid(z) - static_cast<double>(labels[r]);
        for (std::size_t c = 0; c < weights.size(); ++c) gradW[c] += err * row[c];
        gradB += err;
    }
    for (std::size_t c = 0; c < weights.size(); ++c) {
        gradW[c] = gradW[c] / static_cast<double>(n) + l2 * weights[c];
    }
    gradB /= static_cast<double>(n);
}

LinearModel logregFit(const FeatureMatrix& train, const std::vector<int>& labels,
                      const LogRegParams& p, std::uint64_t /*seed*/) {
    requireLabels(train, labels);
    if (p.epochs < 1) throw ConfigError("logreg: epochs must be >= 1");
    if (p.learningRate <= 0.0) throw ConfigError("logreg: learning_rate must be > 0");
    if (p.l2 < 0.0) throw ConfigError("logreg: l2 must be >= 0");

    LinearModel model;
    model.weights.assign(train.columnCount(), 0.0);
    model.bias = 0.0;

    std::vector<double> gradW;
    double gradB = 0.0;
    for (int epoch = 0; epoch < p.epochs; ++epoch) {
        logisticGradient(train, labels, model.weights, model.bias, p.l2, gradW, gradB);
        for (std::size_t c = 0; c < model.weights.size(); ++c) {
            model.weights[c] -= p.learningRate * gradW[c];
        }
        model.bias -= p.learningRate * gradB;
        const double loss = logisticLoss(train, labels, model.weights, model.bias, p.l2);
        if (!std::isfinite(loss)) {
            throw NumericError("logreg: loss diverged; use a smaller learning_rate");
        }
        model.lossTrace.push_back(loss);
    }
    return model;
}

namespace {

// Deterministic logistic link sigma(scale * score + offset) fitted on the
// training decision scores, so an SVM margin reads as a probability.
void calibrateScores(LinearModel& model, const std::vector<double>& scores,
                     const std::vector<int>& labels) {
    double a = 0.0, b = 0.0;
    const double lr = 0.1;
    const std::size_t n = scores.size();
    for (int epoch = 0; epoch < 500; ++epoch) {
        double ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double err = sigmoid(a * scores[i] + b) - static_cast<double>(labels[i]);
            ga += err * scores[i];
            gb += err;
        }
        a -= lr * ga / static_cast<double>(n);
        b -= lr * gb / static_cast<double>(n);
    }
    model.calibScale = a;
    model.calibOffset = b;
}

}  // namespace

LinearModel svmFit(const FeatureMatrix& train, const std::vector<int>& labels, const SvmParams& p,
                   std::uint64_t seed) {
    requireLabels(train, labels);
    if (p.lambda <= 0.0) throw ConfigError("svm: lambda must be > 0");
    if (p.epochs < 1) throw ConfigError("svm: epochs must be >= 1");
    const std::size_t n = train.rowCount();
    if (n == 0) throw ConfigError("svm: empty training set");

    LinearModel model;
    model.hinge = true;
    model.weights.assign(train.columnCount(), 0.0);
    model.bias = 0.0;

    // Pegasos: stochastic subgradient on the hinge-loss primal, step 1/(lambda t).
    auto rng = makeRng(seed);
    const std::size_t steps = static_cast<std::size_t>(p.epochs) * n;
    for (std::size_t t = 1; t <= steps; ++t) {
        const std::size_t i = pickIndex(rng, n);
        const double y = labels[i] == 1 ? 1.0 : -1.0;
        const double eta = 1.0 / (p.lambda * static_cast<double>(t));
        const auto row = train.row(i);
        double margin = model.bias;
        for (std::size_t c = 0; c < model.weights.size(); ++c) margin += model.weights[c] * row[c];
        margin *= y;
        const double shrink = 1.0 - eta * p.lambda;
        for (auto& w : model.weights) w *= shrink;
        if (margin < 1.0) {
            for (std::size_t c = 0; c < model.weights.size(); ++c) {
                model.weights[c] += eta * y * row[c];
            }
            model.bias += eta * y;
        }
        for (double w : model.weights) {
            if (!std::isfinite(w)) throw NumericError("svm: weights diverged");
        }
    }

    std::vector<double> scores(n);
    for (std::size_t r = 0; r < n; ++r) {
        double s = model.bias;
        const auto row = train.row(r);
        for (std::size_t c = 0; c < model.weights.size(); ++c) s += model.weights[c] * row[c];
        scores[r] = s;
    }
    calibrateScores(model, scores, labels);
    return model;
}

std::vector<double> linearPredict(const LinearModel& model, const FeatureMatrix& m) {
    requireSameWidth(m, model.weights.size(), "linear model");
    std::vector<double> out(m.rowCount());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        double z = model.bias;
        const auto row = m.row(r);
        for (std::size_t c = 0; c < model.weights.size(); ++c) z += model.weights[c] * row[c];
        out[r] = model.hinge ? sigmoid(model.calibScale * z + model.calibOffset) : sigmoid(z);
    }
    return out;
}

double RegressionTree::predict(std::span<const double> row) const {
    int node = 0;
    while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
        const TreeNode& t = nodes[static_cast<std::size_t>(node)];
        node = row[static_cast<std::size_t>(t.feature)] <= t.threshold ? t.left : t.right;
    }
    return nodes[static_cast<std::size_t>(node)].value;
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& x;
    const std::vector<double>& gradient;  // residuals y - p
    const std::vector<double>& hessian;   // p (1 - p)
    int maxDepth;
    int minLeaf;
    RegressionTree tree;

    int build(std::vector<std::size_t>& items, int depth) {
        double gSum = 0.0, hSum = 0.0;
        for (std::size_t i : items) {
            gSum += gradient[i];
            hSum += hessian[i];
        }

        int bestFeature = -1;
        double bestThreshold = 0.0;
        double bestGain = 0.0;
        if (depth < maxDepth && items.size() >= 2 * static_cast<std::size_t>(minLeaf)) {
            double rSum = 0.0;
            for (std::size_t i : items) rSum += gradient[i];
            const double total = static_cast<double>(items.size());
            const double baseScore = rSum * rSum / total;

            std::vector<std::size_t> order(items);
            for (std::size_t f = 0; f < x.columnCount(); ++f) {
                std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                    const double va = x.at(a, f), vb = x.at(b, f);
                    if (va != vb) return va < vb;
                    return a < b;
                });
                double leftSum = 0.0;
                for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
                    leftSum += gradient[order[pos]];
                    const std::size_t nl = pos + 1;
                    const std::size_t nr = order.size() - nl;
                    if (nl < static_cast<std::size_t>(minLeaf) ||
                        nr < static_cast<std::size_t>(minLeaf)) {
                        continue;
                    }
                    const double va = x.at(order[pos], f);
                    const double vb = x.at(order[pos + 1], f);
                    if (va == vb) continue;  // no valid threshold between equal values
                    const double rightSum = rSum - leftSum;
                    const double gain = leftSum * leftSum / static_cast<double>(nl) +
                                        rightSum * rightSum / static_cast<double>(nr) - baseScore;
                    if (gain > bestGain + 1e-12) {
                        bestGain = gain;
                        bestFeature = static_cast<int>(f);
                        bestThreshold = 0.5 * (va + vb);
                    }
                }
            }
        }

        if (bestFeature < 0) {
            TreeNode leaf;
            leaf.feature = -1;
            // Newton step on the logistic loss restricted to this leaf.
            leaf.value = hSum > 1e-12 ? gSum / hSum : 0.0;
            tree.nodes.push_back(leaf);
            return static_cast<int>(tree.nodes.size()) - 1;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t i : items) {
            (x.at(i, static_cast<std::size_t>(bestFeature)) <= bestThreshold ? left : right)
                .push_back(i);
        }
        const int self = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(TreeNode{bestFeature, bestThreshold, -1, -1, 0.0});
        const int leftChild = build(left, depth + 1);
        const int rightChild = build(right, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = leftChild;
        tree.nodes[static_cast<std::size_t>(self)].right = rightChild;
        return self;
    }
};

double meanLogisticLossFromScores(const std::vector<double>& scores,
                                  const std::vector<int>& labels) {
    double loss = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double s = labels[i] == 1 ? 1.0 : -1.0;
        loss += softplus(-s * scores[i]);
    }
    return loss / static_cast<double>(scores.size());
}

}  // namespace

GbtModel gbtFit(const FeatureMatrix& train, const std::vector<int>& labels, const GbtParams& p,
                std::uint64_t /*seed*/) {
    requireLabels(train, labels);
    if (p.nTrees < 0) throw ConfigError("gbt: n_trees must be >= 0");
    if (p.depth < 1) throw ConfigError("gbt: depth must be >= 1");
    if (p.minLeaf < 1) throw ConfigError("gbt: min_leaf must be >= 1");
    const std::size_t n = train.rowCount();
    if (n < 2 * static_cast<std::size_t>(p.minLeaf)) {
        throw ConfigError("gbt: needs at least 2 * min_leaf = " + std::to_string(2 * p.minLeaf) +
                          " rows, got " + std::to_string(n));
    }

    GbtModel model;
    model.learningRate = p.learningRate;

    double mean = 0.0;
    for (int y : labels) mean += y;
    mean /= static_cast<double>(n);
    const double eps = 1e-6;
    const double clamped = std::clamp(mean, eps, 1.0 - eps);
    model.baseScore = std::log(clamped / (1.0 - clamped));
    if (mean == 0.0 || mean == 1.0) {
        model.degenerate = true;  // single-class labels: constant predictor
        return model;
    }

    std::vector<double> scores(n, model.baseScore);
    model.lossTrace.push_back(meanLogisticLossFromScores(scores, labels));

    std::vector<double> gradient(n), hessian(n);
    for (int stage = 0; stage < p.nTrees; ++stage) {
        for (std::size_t i = 0; i < n; ++i) {
            const double prob = sigmoid(scores[i]);
            gradient[i] = static_cast<double>(labels[i]) - prob;
            hessian[i] = prob * (1.0 - prob);
        }
        TreeBuilder builder{train, gradient, hessian, p.depth, p.minLeaf, {}};
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        builder.build(all, 0);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] += p.learningRate * builder.tree.predict(train.row(i));
        }
        model.trees.push_back(std::move(builder.tree));
        model.lossTrace.push_back(meanLogisticLossFromScores(scores, labels));
    }
    return model;
}

std::vector<double> gbtPredict(const GbtModel& model, const FeatureMatrix& m) {
    std::vector<double> out(m.rowCount());
    for (std::size_t r = 0; r < m.rowCount(); ++r) {
        double score = model.baseScore;
        for (const auto& tree : model.trees) {
            score += model.learningRate * tree.predict(m.row(r));
        }
        out[r] = sigmoid(score);
    }
    return out;
}

Predictor Predictor::fit(const PredictorSpec& spec, const FeatureMatrix& train,
                         const std::vector<int>& labels) {
    Predictor out;
    out.spec_ = spec;
    switch (spec.family) {
        case ModelFamily::Rbf:
            out.model_ = rbfFit(train, labels, std::get<RbfParams>(spec.params), spec.seed);
            break;
        case ModelFamily::LogReg:
            out.model_ = logregFit(train, labels, std::get<LogRegParams>(spec.params), spec.seed);
            break;
        case ModelFamily::LinearSvm:
            out.model_ = svmFit(train, labels, std::get<SvmParams>(spec.params), spec.seed);
            break;
        case ModelFamily::Gbt:
            out.model_ = gbtFit(train, labels, std::get<GbtParams>(spec.params), spec.seed);
            break;
    }
    return out;
}

std::vector<double> Predictor::predictProba(const FeatureMatrix& m) const {
    if (std::holds_alternative<RbfModel>(model_)) return rbfPredict(std::get<RbfModel>(model_), m);
    if (std::holds_alternative<LinearModel>(model_)) {
        return linearPredict(std::get<LinearModel>(model_), m);
    }
    if (std::holds_alternative<GbtModel>(model_)) return gbtPredict(std::get<GbtModel>(model_), m);
    throw ConfigError("predict: model not fitted");
}

std::vector<Predictor::Prediction> Predictor::predict(const FeatureMatrix& m,
                                                      double threshold) const {
    const auto probs = predictProba(m);
    std::vector<Prediction> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        out[i].probability = probs[i];
        out[i].label = probs[i] >= threshold ? 1 : 0;
    }
    return out;
}

const RbfModel& Predictor::rbf() const { return std::get<RbfModel>(model_); }
const LinearModel& Predictor::linear() const { return std::get<LinearModel>(model_); }
const GbtModel& Predictor::gbt() const { return std::get<GbtModel>(model_); }

const std::vector<double>& Predictor::lossTrace() const {
    if (std::holds_alternative<LinearModel>(model_)) {
        return std::get<LinearModel>(model_).lossTrace;
    }
    if (std::holds_alternative<GbtModel>(model_)) return std::get<GbtModel>(model_).lossTrace;
    static const std::vector<double> empty;
    return empty;
}

nlohmann::json Predictor::toJson() const {
    nlohmann::json j{{"version", 1}, {"spec", spec_.toJson()}};
    if (std::holds_alternative<RbfModel>(model_)) {
        const auto& m = std::get<RbfModel>(model_);
        j["model"] = {{"kind", "rbf"},
                      {"centers", m.centers},
                      {"widths", m.widths},
                      {"weights", m.weights},
                      {"bias", m.bias},
                      {"sigmoid_link", m.sigmoidLink}};
    } else if (std::holds_alternative<LinearModel>(model_)) {
        const auto& m = std::get<LinearModel>(model_);
        j["model"] = {{"kind", "linear"},
                      {"weights", m.weights},
                      {"bias", m.bias},
                      {"hinge", m.hinge},
                      {"calib_scale", m.calibScale},
                      {"calib_offset", m.calibOffset}};
    } else if (std::holds_alternative<GbtModel>(model_)) {
        const auto& m = std::get<GbtModel>(model_);
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& tree : m.trees) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& node : tree.nodes) {
                nodes.push_back({{"feature", node.feature},
                                 {"threshold", node.threshold},
                                 {"left", node.left},
                                 {"right", node.right},
                                 {"value", node.value}});
            }
            trees.push_back(std::move(nodes));
        }
        j["model"] = {{"kind", "gbt"},
                      {"trees", std::move(trees)},
                      {"learning_rate", m.learningRate},
                      {"base_score", m.baseScore},
                      {"degenerate", m.degenerate}};
    } else {
        throw ConfigError("serialize: model not fitted");
    }
    return j;
}

Predictor Predictor::fromJson(const nlohmann::json& j) {
    if (j.value("version", 0) != 1) {
        throw DataError("model document has unsupported version");
    }
    Predictor out;
    out.spec_ = PredictorSpec::fromJson(j.at("spec"));
    const auto& mj = j.at("model");
    const std::string kind = mj.at("kind").get<std::string>();
    if (kind == "rbf") {
        RbfModel m;
        m.centers = mj.at("centers").get<std::vector<std::vector<double>>>();
        m.widths = mj.at("widths").get<std::vector<double>>();
        m.weights = mj.at("weights").get<std::vector<double>>();
        m.bias = mj.at("bias").get<double>();
        m.sigmoidLink = mj.value("sigmoid_link", false);
        out.model_ = std::move(m);
    } else if (kind == "linear") {
        LinearModel m;
        m.weights = mj.at("weights").get<std::vector<double>>();
        m.bias = mj.at("bias").get<double>();
        m.hinge = mj.value("hinge", false);
        m.calibScale = mj.value("calib_scale", 1.0);
        m.calibOffset = mj.value("calib_offset", 0.0);
        out.model_ = std::move(m);
    } else if (kind == "gbt") {
        GbtModel m;
        for (const auto& treeJson : mj.at("trees")) {
            RegressionTree tree;
            for (const auto& nodeJson : treeJson) {
                tree.nodes.push_back(TreeNode{nodeJson.at("feature").get<int>(),
                                              nodeJson.at("threshold").get<double>(),
                                              nodeJson.at("left").get<int>(),
                                              nodeJson.at("right").get<int>(),
                                              nodeJson.at("value").get<double>()});
            }
            m.trees.push_back(std::move(tree));
        }
        m.learningRate = mj.at("learning_rate").get<double>();
        m.baseScore = mj.at("base_score").get<double>();
        m.degenerate = mj.value("degenerate", false);
        out.model_ = std::move(m);
    } else {
        throw DataError("model document has unknown kind '" + kind + "'");
    }
    return out;
}

}  // namespace custprof
