#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ecgemd/dataset.hpp"

namespace ecgemd {

/// Row-major feature matrix with one label per row.
class TrainingSet {
public:
    explicit TrainingSet(std::size_t num_features) : num_features_(num_features) {}

    void add_row(std::span<const double> values, ClassLabel label);

    std::size_t num_rows() const noexcept { return labels_.size(); }
    std::size_t num_features() const noexcept { return num_features_; }
    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * num_features_, num_features_};
    }
    double at(std::size_t row, std::size_t feature) const { return values_[row * num_features_ + feature]; }
    ClassLabel label(std::size_t i) const { return labels_[i]; }
    std::span<const ClassLabel> labels() const noexcept { return labels_; }

private:
    std::size_t num_features_;
    std::vector<double> values_;
    std::vector<ClassLabel> labels_;
};

enum class Impurity { kGini };

struct TreeConfig {
    std::optional<int> max_depth;  ///< unset = unlimited
    std::size_t min_samples_split = 2;
    std::size_t min_samples_leaf = 1;
    Impurity impurity = Impurity::kGini;
};

void validate(const TreeConfig& config);

using ClassCounts = std::array<std::size_t, kNumClasses>;

/// 1 - sum_c (n_c / n)^2. Throws DataError when all counts are zero.
double gini(std::span<const std::size_t> counts);

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    /// gini(parent) - weighted gini(children).
    double impurity_decrease = 0.0;
};

/// Exhaustive axis-aligned split search over midpoints of consecutive
/// distinct values. Ties go to the lowest feature index, then the lowest
/// threshold. Returns nullopt if no admissible split has a positive decrease.
std::optional<Split> best_split(const TrainingSet& data, const TreeConfig& config);

struct Prediction {
    ClassLabel label = ClassLabel::kHpt;
    std::array<double, kNumClasses> probability{};
};

class TreeModel {
public:
    struct Internal {
        std::size_t feature = 0;
        double threshold = 0.0;
        std::uint32_t left = 0;
        std::uint32_t right = 0;
        bool operator==(const Internal&) const = default;
    };
    struct Leaf {
        ClassLabel label = ClassLabel::kHpt;
        std::array<double, kNumClasses> probability{};
        bool operator==(const Leaf&) const = default;
    };
    using Node = std::variant<Internal, Leaf>;

    TreeModel() = default;
    /// Validates tree shape. Node 0 is the root.
    TreeModel(std::vector<Node> nodes, std::size_t num_features);

    /// Root-to-leaf descent; a value equal to the threshold goes left.
    Prediction predict(std::span<const double> features) const;

    std::span<const Node> nodes() const noexcept { return nodes_; }
    std::size_t num_features() const noexcept { return num_features_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    bool operator==(const TreeModel&) const = default;

private:
    std::vector<Node> nodes_;
    std::size_t num_features_ = 0;
};

/// CART induction with Gini impurity, no pruning. Leaf label is the
/// majority class; ties go to HPT. An impure node is split even when the best
/// candidate has zero Gini decrease, so distinct rows always end up separated.
TreeModel fit_tree(const TrainingSet& data, const TreeConfig& config);

/// JSON tree document.
void save_tree(std::ostream& out, const TreeModel& model);
TreeModel load_tree(std::istream& in);

}  // namespace ecgemd
