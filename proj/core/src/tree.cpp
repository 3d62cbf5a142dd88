#include "ecgemd/tree.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "ecgemd/error.hpp"
#include "json.hpp"

namespace ecgemd {
namespace {

__extension__ using uint128 = unsigned __int128;

// Split quality as the exact rational sum_c L_c^2 / n_L + sum_c R_c^2 / n_R.
// Maximizing it is equivalent to maximizing the Gini decrease, and keeping it
// in integers makes tie detection exact.
struct SplitScore {
    uint128 num = 0;
    uint128 den = 1;

    bool operator>(const SplitScore& o) const { return num * o.den > o.num * den; }
};

std::uint64_t sum_squares(const ClassCounts& c) {
    std::uint64_t s = 0;
    for (const auto v : c) s += static_cast<std::uint64_t>(v) * v;
    return s;
}

SplitScore score(const ClassCounts& left, const ClassCounts& right, std::size_t n_left, std::size_t n_right) {
    return {static_cast<uint128>(sum_squares(left)) * n_right + static_cast<uint128>(sum_squares(right)) * n_left,
            static_cast<uint128>(n_left) * n_right};
}

double midpoint(double a, double b) {
    double mid = a + (b - a) / 2.0;
    if (!std::isfinite(mid)) mid = a / 2.0 + b / 2.0;
    if (!(mid < b)) mid = a;
    return mid;
}

ClassCounts count_classes(const TrainingSet& data, std::span<const std::size_t> rows) {
    ClassCounts c{};
    for (const auto r : rows) ++c[class_index(data.label(r))];
    return c;
}

struct Candidate {
    Split split;
    SplitScore score;
};

// With allow_zero_gain an impure node may still be split when no candidate
// improves on it (XOR-like layouts); the best candidate is kept either way.
std::optional<Split> search_split(const TrainingSet& data, std::span<const std::size_t> rows,
                                  const TreeConfig& config, bool allow_zero_gain = false) {
    const std::size_t n = rows.size();
    if (n < config.min_samples_split || n < 2 * config.min_samples_leaf) return std::nullopt;
    const ClassCounts parent = count_classes(data, rows);
    // Parent score sum_c n_c^2 / n; a useful split must beat it.
    const SplitScore baseline{sum_squares(parent), n};

    std::optional<Candidate> best;
    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f = 0; f < data.num_features(); ++f) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return data.at(a, f) < data.at(b, f); });
        ClassCounts left{};
        for (std::size_t p = 1; p < n; ++p) {
            ++left[class_index(data.label(order[p - 1]))];
            const double lo = data.at(order[p - 1], f);
            const double hi = data.at(order[p], f);
            if (!(lo < hi)) continue;
            if (p < config.min_samples_leaf || n - p < config.min_samples_leaf) continue;
            ClassCounts right{};
            for (std::size_t c = 0; c < kNumClasses; ++c) right[c] = parent[c] - left[c];
            const auto s = score(left, right, p, n - p);
            if (allow_zero_gain ? baseline > s : !(s > baseline)) continue;
            if (!best || s > best->score) {
                best = Candidate{{f, midpoint(lo, hi), 0.0}, s};
            }
        }
        // restore row order so each feature's stable sort starts from the same permutation
        std::copy(rows.begin(), rows.end(), order.begin());
    }
    if (!best) return std::nullopt;
    const double s = static_cast<double>(best->score.num) / static_cast<double>(best->score.den);
    const double base = static_cast<double>(sum_squares(parent)) / static_cast<double>(n);
    best->split.impurity_decrease = (s - base) / static_cast<double>(n);
    return best->split;
}

TreeModel::Leaf make_leaf(const ClassCounts& counts) {
    TreeModel::Leaf leaf;
    const auto total = static_cast<double>(counts[0] + counts[1]);
    leaf.label = counts[class_index(ClassLabel::kNormal)] > counts[class_index(ClassLabel::kHpt)] ? ClassLabel::kNormal
                                                                                                 : ClassLabel::kHpt;
    for (std::size_t c = 0; c < kNumClasses; ++c) leaf.probability[c] = static_cast<double>(counts[c]) / total;
    return leaf;
}

}  // namespace

void TrainingSet::add_row(std::span<const double> values, ClassLabel label) {
    if (values.size() != num_features_) {
        throw DataError("training row has " + std::to_string(values.size()) + " features, expected " +
                        std::to_string(num_features_));
    }
    values_.insert(values_.end(), values.begin(), values.end());
    labels_.push_back(label);
}

void validate(const TreeConfig& config) {
    if (config.max_depth && *config.max_depth < 0) throw ConfigError("tree max_depth must be >= 0");
    if (config.min_samples_split < 2) throw ConfigError("tree min_samples_split must be >= 2");
    if (config.min_samples_leaf < 1) throw ConfigError("tree min_samples_leaf must be >= 1");
}

double gini(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (const auto c : counts) total += c;
    if (total == 0) throw DataError("gini impurity of an empty node");
    double sum = 0.0;
    for (const auto c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum += p * p;
    }
    return 1.0 - sum;
}

std::optional<Split> best_split(const TrainingSet& data, const TreeConfig& config) {
    validate(config);
    std::vector<std::size_t> rows(data.num_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return search_split(data, rows, config);
}

TreeModel::TreeModel(std::vector<Node> nodes, std::size_t num_features)
    : nodes_(std::move(nodes)), num_features_(num_features) {
    if (nodes_.empty()) throw DataError("tree has no nodes");
    std::vector<int> parents(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (const auto* in = std::get_if<Internal>(&nodes_[i])) {
            if (in->feature >= num_features_) throw DataError("tree node " + std::to_string(i) + ": feature out of range");
            for (const auto child : {in->left, in->right}) {
                if (child == 0 || child >= nodes_.size() || child == i) {
                    throw DataError("tree node " + std::to_string(i) + ": invalid child reference");
                }
                ++parents[child];
            }
        } else {
            const auto& leaf = std::get<Leaf>(nodes_[i]);
            double sum = 0.0;
            for (const double p : leaf.probability) {
                if (!(p >= 0.0)) throw DataError("tree node " + std::to_string(i) + ": negative probability");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-12) throw DataError("tree node " + std::to_string(i) + ": probabilities do not sum to 1");
        }
    }
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (parents[i] != 1) throw DataError("tree node " + std::to_string(i) + " is not reachable exactly once");
    }
    depth();  // rejects cycles
}

Prediction TreeModel::predict(std::span<const double> features) const {
    if (features.size() != num_features_) {
        throw DataError("predict: got " + std::to_string(features.size()) + " features, model expects " +
                        std::to_string(num_features_));
    }
    std::size_t i = 0;
    while (const auto* in = std::get_if<Internal>(&nodes_[i])) {
        i = features[in->feature] <= in->threshold ? in->left : in->right;
    }
    const auto& leaf = std::get<Leaf>(nodes_[i]);
    return {leaf.label, leaf.probability};
}

std::size_t TreeModel::depth() const {
    if (nodes_.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t visited = 0;
    while (!stack.empty()) {
        const auto [i, d] = stack.back();
        stack.pop_back();
        if (++visited > nodes_.size()) throw DataError("tree contains a cycle");
        deepest = std::max(deepest, d);
        if (const auto* in = std::get_if<Internal>(&nodes_[i])) {
            stack.emplace_back(in->left, d + 1);
            stack.emplace_back(in->right, d + 1);
        }
    }
    return deepest;
}

std::size_t TreeModel::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return std::holds_alternative<Leaf>(n); }));
}

TreeModel fit_tree(const TrainingSet& data, const TreeConfig& config) {
    validate(config);
    if (data.num_rows() == 0) throw DataError("cannot fit a tree to an empty training set");
    for (std::size_t r = 0; r < data.num_rows(); ++r) {
        for (const double v : data.row(r)) {
            if (!std::isfinite(v)) throw DataError("training row " + std::to_string(r) + " has a non-finite feature");
        }
    }

    std::vector<std::size_t> rows(data.num_rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});

    struct Work {
        std::size_t node;
        std::size_t begin;
        std::size_t end;
        int depth;
    };
    std::vector<TreeModel::Node> nodes(1);
    std::vector<Work> stack{{0, 0, rows.size(), 0}};
    while (!stack.empty()) {
        const Work w = stack.back();
        stack.pop_back();
        const std::span<std::size_t> span(rows.data() + w.begin, w.end - w.begin);
        const auto counts = count_classes(data, span);
        const bool pure = counts[0] == 0 || counts[1] == 0;
        const bool depth_hit = config.max_depth && w.depth >= *config.max_depth;
        std::optional<Split> split;
        if (!pure && !depth_hit) split = search_split(data, span, config, true);
        if (!split) {
            nodes[w.node] = make_leaf(counts);
            continue;
        }
        const auto mid = std::stable_partition(span.begin(), span.end(), [&](std::size_t r) {
            return data.at(r, split->feature) <= split->threshold;
        });
        const std::size_t cut = w.begin + static_cast<std::size_t>(mid - span.begin());
        const auto left = static_cast<std::uint32_t>(nodes.size());
        const auto right = left + 1;
        nodes[w.node] = TreeModel::Internal{split->feature, split->threshold, left, right};
        nodes.resize(nodes.size() + 2);
        stack.push_back({right, cut, w.end, w.depth + 1});
        stack.push_back({left, w.begin, cut, w.depth + 1});
    }
    return TreeModel(std::move(nodes), data.num_features());
}

void save_tree(std::ostream& out, const TreeModel& model) {
    nlohmann::json doc;
    doc["format"] = "ecgemd-tree";
    doc["version"] = 1;
    doc["num_features"] = model.num_features();
    doc["classes"] = {to_string(ClassLabel::kHpt), to_string(ClassLabel::kNormal)};
    auto& nodes = doc["nodes"] = nlohmann::json::array();
    std::size_t id = 0;
    for (const auto& node : model.nodes()) {
        nlohmann::json j;
        j["id"] = id++;
        if (const auto* in = std::get_if<TreeModel::Internal>(&node)) {
            j["kind"] = "internal";
            j["feature"] = in->feature;
            j["threshold"] = in->threshold;
            j["left"] = in->left;
            j["right"] = in->right;
        } else {
            const auto& leaf = std::get<TreeModel::Leaf>(node);
            j["kind"] = "leaf";
            j["label"] = to_string(leaf.label);
            j["probability"] = leaf.probability;
        }
        nodes.push_back(std::move(j));
    }
    out << doc.dump(1) << '\n';
}

TreeModel load_tree(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        if (doc.at("format") != "ecgemd-tree" || doc.at("version") != 1) {
            throw DataError("unsupported tree document format/version");
        }
        std::vector<TreeModel::Node> nodes;
        const auto& list = doc.at("nodes");
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto& j = list[i];
            if (j.at("id").get<std::size_t>() != i) throw DataError("tree node ids must be 0..n-1 in order");
            if (j.at("kind") == "internal") {
                nodes.emplace_back(TreeModel::Internal{j.at("feature").get<std::size_t>(), j.at("threshold").get<double>(),
                                                       j.at("left").get<std::uint32_t>(),
                                                       j.at("right").get<std::uint32_t>()});
            } else if (j.at("kind") == "leaf") {
                nodes.emplace_back(TreeModel::Leaf{parse_label(j.at("label").get<std::string>()),
                                                   j.at("probability").get<std::array<double, kNumClasses>>()});
            } else {
                throw DataError("tree node " + std::to_string(i) + ": unknown kind");
            }
        }
        return TreeModel(std::move(nodes), doc.at("num_features").get<std::size_t>());
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed tree document: ") + e.what());
    }
}

}  // namespace ecgemd
