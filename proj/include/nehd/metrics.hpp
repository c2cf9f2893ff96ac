#pragma once

#include <cstdint>
#include <vector>

namespace nehd {

/// counts[pred][true]: predicted classes along rows, true labels along
/// columns, so column sums are the per-class sample counts.
struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::uint64_t> counts;  // row-major [classes x classes]

    std::uint64_t at(std::size_t pred, std::size_t label) const {
        return counts[pred * classes + label];
    }
    std::uint64_t& at(std::size_t pred, std::size_t label) {
        return counts[pred * classes + label];
    }

    std::uint64_t total() const;
    /// trace/sum; 0 when empty.
    double accuracy() const;
    /// diagonal over column sums; a class with no samples reports 0.
    std::vector<double> per_class_accuracy() const;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          std::size_t classes);

struct Aggregate {
    double mean = 0.0;
    double std_dev = 0.0;  // sample standard deviation (n-1); 0 for n=1
};

/// Throws on an empty list.
Aggregate aggregate(const std::vector<double>& values);

}  // namespace nehd
