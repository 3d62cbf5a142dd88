#include "ecgemd/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <random>

#include "ecgemd/error.hpp"
#include "ecgemd/parallel.hpp"

namespace ecgemd {
namespace {

// Unbiased draw in [0, bound) by rejection.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

void shuffle_with(std::span<std::size_t> values, std::mt19937_64& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(bounded(rng, i));
        std::swap(values[i - 1], values[j]);
    }
}

std::optional<double> ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) noexcept {
    tp += o.tp;
    fn += o.fn;
    tn += o.tn;
    fp += o.fp;
    return *this;
}

void seeded_shuffle(std::span<std::size_t> values, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    shuffle_with(values, rng);
}

std::vector<std::vector<std::size_t>> make_folds(std::span<const ClassLabel> labels, const EvalConfig& config) {
    const std::size_t k = config.k_folds;
    if (k < 2) throw ConfigError("k_folds must be >= 2");
    if (k > labels.size()) {
        throw ConfigError("k_folds = " + std::to_string(k) + " exceeds the number of samples (" +
                          std::to_string(labels.size()) + ")");
    }

    std::vector<std::vector<std::size_t>> groups;
    if (config.stratified) {
        groups.resize(kNumClasses);
        for (std::size_t i = 0; i < labels.size(); ++i) groups[class_index(labels[i])].push_back(i);
        for (std::size_t c = 0; c < kNumClasses; ++c) {
            if (!groups[c].empty() && groups[c].size() < k) {
                throw ConfigError("stratified k_folds = " + std::to_string(k) + " exceeds the " +
                                  std::string(to_string(static_cast<ClassLabel>(c))) + " population (" +
                                  std::to_string(groups[c].size()) + ")");
            }
        }
    } else {
        groups.emplace_back(labels.size());
        for (std::size_t i = 0; i < labels.size(); ++i) groups[0][i] = i;
    }

    std::mt19937_64 rng(config.shuffle_seed);
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t rotation = 0;
    for (auto& group : groups) {
        shuffle_with(group, rng);
        for (std::size_t t = 0; t < group.size(); ++t) folds[(rotation + t) % k].push_back(group[t]);
        rotation = (rotation + group.size()) % k;
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

ConfusionMatrix confusion(std::span<const ClassLabel> predictions, std::span<const ClassLabel> truths) {
    if (predictions.size() != truths.size()) {
        throw DataError("confusion: " + std::to_string(predictions.size()) + " predictions vs " +
                        std::to_string(truths.size()) + " truths");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const bool actual_hpt = truths[i] == ClassLabel::kHpt;
        const bool predicted_hpt = predictions[i] == ClassLabel::kHpt;
        if (actual_hpt) {
            ++(predicted_hpt ? cm.tp : cm.fn);
        } else {
            ++(predicted_hpt ? cm.fp : cm.tn);
        }
    }
    return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    MetricsReport m;
    m.acc = ratio(cm.tp + cm.tn, cm.total());
    m.rec = ratio(cm.tp, cm.tp + cm.fn);
    m.spe = ratio(cm.tn, cm.tn + cm.fp);
    m.pre = ratio(cm.tp, cm.tp + cm.fp);
    if (m.pre && m.rec && *m.pre + *m.rec > 0.0) m.f1 = 2.0 * *m.pre * *m.rec / (*m.pre + *m.rec);
    return m;
}

std::string format_percent(const std::optional<double>& fraction, int decimals) {
    if (!fraction) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f%%", decimals, 100.0 * *fraction);
    return buf;
}

CrossValidationResult cross_validate(const TrainingSet& data, const TreeConfig& tree_config,
                                     const EvalConfig& eval_config) {
    validate(tree_config);
    CrossValidationResult result;
    result.folds = make_folds(data.labels(), eval_config);
    const std::size_t k = result.folds.size();
    result.per_fold.resize(k);
    result.predictions.assign(data.num_rows(), ClassLabel::kHpt);

    std::vector<std::size_t> fold_of(data.num_rows());
    for (std::size_t f = 0; f < k; ++f) {
        for (const auto i : result.folds[f]) fold_of[i] = f;
    }

    parallel_for(k, eval_config.workers, [&](std::size_t f) {
        TrainingSet train(data.num_features());
        for (std::size_t i = 0; i < data.num_rows(); ++i) {
            if (fold_of[i] != f) train.add_row(data.row(i), data.label(i));
        }
        const auto model = fit_tree(train, tree_config);
        std::vector<ClassLabel> predicted;
        std::vector<ClassLabel> truth;
        for (const auto i : result.folds[f]) {
            const auto label = model.predict(data.row(i)).label;
            result.predictions[i] = label;
            predicted.push_back(label);
            truth.push_back(data.label(i));
        }
        result.per_fold[f] = confusion(predicted, truth);
    });

    for (const auto& cm : result.per_fold) result.pooled += cm;
    ensure(result.pooled.total() == data.num_rows(), "pooled confusion total equals dataset size");
    result.metrics = metrics(result.pooled);
    return result;
}

}  // namespace ecgemd
