#include "fairlens/tree.hpp"

#include "fairlens/errors.hpp"
#include "fairlens/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairlens {

namespace {

// W * gini for a node with total weight w and positive weight w1.
double mass_gini(double w1, double w) { return w > 0.0 ? 2.0 * w1 * (w - w1) / w : 0.0; }

class TreeGrower {
public:
    TreeGrower(const Eigen::MatrixXd& X, const std::vector<int>& y, std::vector<double> weights,
               const TreeOptions& opts, Rng& rng)
        : X_(X), y_(y), w_(std::move(weights)), opts_(opts), rng_(rng), features_(static_cast<Index>(X.cols())) {
        std::iota(features_.begin(), features_.end(), Index{0});
    }

    std::vector<TreeModel::Node> grow(IndexList rows) {
        rows_ = std::move(rows);
        scratch_.resize(rows_.size());
        build(0, rows_.size(), 0);
        return std::move(nodes_);
    }

private:
    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double impurity = 0.0;
    };

    int build(Index begin, Index end, int depth) {
        double w = 0.0, w1 = 0.0;
        for (Index p = begin; p < end; ++p) {
            const Index r = rows_[p];
            w += w_[r];
            if (y_[r] == 1) w1 += w_[r];
        }
        const Index n = end - begin;
        TreeModel::Node node;
        node.n_samples = n;
        if (w > 0.0) {
            node.prob_positive = w1 / w;
        } else {
            Index pos = 0;
            for (Index p = begin; p < end; ++p) pos += static_cast<Index>(y_[rows_[p]]);
            node.prob_positive = static_cast<double>(pos) / static_cast<double>(n);
        }
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);

        const bool pure = w1 <= 0.0 || w1 >= w;
        const bool depth_reached = opts_.max_depth >= 0 && depth >= opts_.max_depth;
        if (pure || depth_reached || n < 2 * std::max<Index>(opts_.min_samples_leaf, 1)) return id;

        const Split split = best_split(begin, end, w, w1);
        if (split.feature < 0) return id;

        const auto mid = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(begin),
                                        rows_.begin() + static_cast<std::ptrdiff_t>(end), [&](Index r) {
                                            return X_(static_cast<Eigen::Index>(r), split.feature) <= split.threshold;
                                        });
        const Index split_at = static_cast<Index>(mid - rows_.begin());
        // Keep child order independent of partition's internal permutation.
        std::sort(rows_.begin() + static_cast<std::ptrdiff_t>(begin), mid);
        std::sort(mid, rows_.begin() + static_cast<std::ptrdiff_t>(end));

        const int left = build(begin, split_at, depth + 1);
        const int right = build(split_at, end, depth + 1);
        auto& stored = nodes_[static_cast<Index>(id)];
        stored.feature = split.feature;
        stored.threshold = split.threshold;
        stored.left = left;
        stored.right = right;
        return id;
    }

    Split best_split(Index begin, Index end, double w, double w1) {
        const Index m = features_.size();
        Index n_try = m;
        if (opts_.max_features > 0 && opts_.max_features < m) {
            n_try = opts_.max_features;
            for (Index i = 0; i < n_try; ++i) {
                const auto j = i + static_cast<Index>(rng_.uniform_index(m - i));
                std::swap(features_[i], features_[j]);
            }
        }
        const Index msl = std::max<Index>(opts_.min_samples_leaf, 1);
        const Index n = end - begin;

        // Checked in ascending feature order so ties resolve the same way regardless of sampling order.
        std::vector<Index> candidates(features_.begin(), features_.begin() + static_cast<std::ptrdiff_t>(n_try));
        std::sort(candidates.begin(), candidates.end());

        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        for (Index f : candidates) {
            for (Index p = 0; p < n; ++p) {
                const Index r = rows_[begin + p];
                scratch_[p] = {X_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(f)), r};
            }
            std::sort(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(n));
            if (scratch_[0].first == scratch_[n - 1].first) continue;

            double wl = 0.0, wl1 = 0.0;
            for (Index p = 0; p + 1 < n; ++p) {
                const Index r = scratch_[p].second;
                wl += w_[r];
                if (y_[r] == 1) wl1 += w_[r];
                const Index n_left = p + 1;
                if (n_left < msl) continue;
                if (n - n_left < msl) break;
                const double a = scratch_[p].first;
                const double b = scratch_[p + 1].first;
                if (a == b) continue;
                const double impurity = (mass_gini(wl1, wl) + mass_gini(w1 - wl1, w - wl)) / w;
                if (impurity < best.impurity) {
                    double threshold = a + (b - a) / 2.0;
                    if (!(threshold < b)) threshold = a;
                    best = {static_cast<int>(f), threshold, impurity};
                }
            }
        }
        return best;
    }

    const Eigen::MatrixXd& X_;
    const std::vector<int>& y_;
    std::vector<double> w_;
    TreeOptions opts_;
    Rng& rng_;
    std::vector<Index> features_;
    IndexList rows_;
    std::vector<std::pair<double, Index>> scratch_;
    std::vector<TreeModel::Node> nodes_;
};

void check_inputs(const FeatureMatrix& X, const BinaryLabels& y, const SampleWeights* weights) {
    if (X.rows() != y.size()) throw ValidationError("tree fit: X and y differ in length");
    if (weights != nullptr && weights->size() != y.size()) {
        throw ValidationError("tree fit: weights length does not match y");
    }
}

}  // namespace

double weighted_gini_split(std::span<const double> x, std::span<const int> y, std::span<const double> w,
                           double threshold) {
    if (x.size() != y.size() || x.size() != w.size()) throw ValidationError("weighted_gini_split: length mismatch");
    double wl = 0, wl1 = 0, wr = 0, wr1 = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] <= threshold) {
            wl += w[i];
            wl1 += y[i] * w[i];
        } else {
            wr += w[i];
            wr1 += y[i] * w[i];
        }
    }
    const double total = wl + wr;
    if (total <= 0.0) return 0.0;
    return (mass_gini(wl1, wl) + mass_gini(wr1, wr)) / total;
}

TreeModel::TreeModel(std::vector<Node> nodes, Index n_features) : nodes_(std::move(nodes)), n_features_(n_features) {
    if (nodes_.empty()) throw ModelFormatError("tree has no nodes");
    const auto count = static_cast<int>(nodes_.size());
    for (int i = 0; i < count; ++i) {
        const auto& node = nodes_[static_cast<std::size_t>(i)];
        if (node.feature >= 0) {
            // Children always follow their parent, which also rules out cycles.
            if (node.feature >= static_cast<int>(n_features_) || node.left <= i || node.right <= i ||
                node.left >= count || node.right >= count) {
                throw ModelFormatError("tree node references an invalid child or feature");
            }
        } else if (!(node.prob_positive >= 0.0 && node.prob_positive <= 1.0)) {
            throw ModelFormatError("tree leaf probability outside [0, 1]");
        }
    }
}

int TreeModel::depth() const {
    std::vector<int> d(nodes_.size(), 0);
    int deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, d[i]);
        if (nodes_[i].feature >= 0) {
            d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
            d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
        }
    }
    return deepest;
}

double TreeModel::predict_row(const double* row, Eigen::Index stride) const {
    const Node* node = &nodes_[0];
    while (node->feature >= 0) {
        const double v = row[static_cast<Eigen::Index>(node->feature) * stride];
        node = &nodes_[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return node->prob_positive;
}

Eigen::VectorXd TreeModel::predict_proba(const Eigen::MatrixXd& X) const {
    check_shape(X);
    Eigen::VectorXd out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = predict_row(X.data() + i, X.rows());
    return out;
}

nlohmann::json TreeModel::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : nodes_) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.prob_positive, n.n_samples});
    }
    return {{"kind", kind()}, {"n_features", n_features_}, {"nodes", std::move(nodes)}};
}

std::shared_ptr<const TreeModel> TreeModel::from_json(const nlohmann::json& j) {
    std::vector<Node> nodes;
    for (const auto& n : j.at("nodes")) {
        nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                         n.at(4).get<double>(), n.at(5).get<Index>()});
    }
    return std::make_shared<const TreeModel>(std::move(nodes), j.at("n_features").get<Index>());
}

ForestModel::ForestModel(std::vector<std::shared_ptr<const TreeModel>> trees, std::vector<std::uint64_t> seeds,
                         Index max_features, Index n_features)
    : trees_(std::move(trees)), seeds_(std::move(seeds)), max_features_(max_features), n_features_(n_features) {
    if (trees_.empty()) throw ModelFormatError("forest has no trees");
}

Eigen::VectorXd ForestModel::predict_proba(const Eigen::MatrixXd& X) const {
    check_shape(X);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(X.rows());
    for (const auto& tree : trees_) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) += tree->predict_row(X.data() + i, X.rows());
    }
    return out / static_cast<double>(trees_.size());
}

nlohmann::json ForestModel::to_json() const {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(t->to_json());
    return {{"kind", kind()},
            {"n_features", n_features_},
            {"max_features", max_features_},
            {"seeds", seeds_},
            {"trees", std::move(trees)}};
}

std::shared_ptr<const ForestModel> ForestModel::from_json(const nlohmann::json& j) {
    std::vector<std::shared_ptr<const TreeModel>> trees;
    for (const auto& t : j.at("trees")) trees.push_back(TreeModel::from_json(t));
    return std::make_shared<const ForestModel>(std::move(trees), j.at("seeds").get<std::vector<std::uint64_t>>(),
                                               j.at("max_features").get<Index>(), j.at("n_features").get<Index>());
}

std::shared_ptr<const TreeModel> fit_tree(const FeatureMatrix& X, const BinaryLabels& y,
                                          const SampleWeights* weights, const TreeOptions& opts,
                                          std::uint64_t seed) {
    check_inputs(X, y, weights);
    std::vector<double> w = weights != nullptr ? weights->values() : std::vector<double>(y.size(), 1.0);
    IndexList rows(y.size());
    std::iota(rows.begin(), rows.end(), Index{0});
    Rng rng(seed);
    TreeGrower grower(X.values(), y.values(), std::move(w), opts, rng);
    return std::make_shared<const TreeModel>(grower.grow(std::move(rows)), X.cols());
}

std::shared_ptr<const ForestModel> fit_forest(const FeatureMatrix& X, const BinaryLabels& y,
                                              const SampleWeights* weights, const ForestOptions& opts,
                                              std::uint64_t seed) {
    check_inputs(X, y, weights);
    if (opts.n_trees == 0) throw ParameterError("forest needs at least one tree");
    const Index n = y.size();
    const Index m = X.cols();
    TreeOptions tree_opts = opts.tree;
    if (tree_opts.max_features == 0) {
        tree_opts.max_features = std::max<Index>(1, static_cast<Index>(std::floor(std::sqrt(static_cast<double>(m)))));
    }

    std::vector<std::shared_ptr<const TreeModel>> trees;
    std::vector<std::uint64_t> seeds;
    trees.reserve(opts.n_trees);
    for (Index t = 0; t < opts.n_trees; ++t) {
        const std::uint64_t tree_seed = mix_seed(seed, t);
        Rng rng(tree_seed);
        std::vector<double> counts(n, 0.0);
        for (Index i = 0; i < n; ++i) counts[rng.uniform_index(n)] += 1.0;
        IndexList rows;
        std::vector<double> w(n, 0.0);
        for (Index i = 0; i < n; ++i) {
            if (counts[i] == 0.0) continue;
            rows.push_back(i);
            w[i] = counts[i] * (weights != nullptr ? (*weights)[i] : 1.0);
        }
        TreeGrower grower(X.values(), y.values(), std::move(w), tree_opts, rng);
        trees.push_back(std::make_shared<const TreeModel>(grower.grow(std::move(rows)), m));
        seeds.push_back(tree_seed);
    }
    return std::make_shared<const ForestModel>(std::move(trees), std::move(seeds), tree_opts.max_features, m);
}

}  // namespace fairlens
