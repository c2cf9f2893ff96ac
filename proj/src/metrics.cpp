#include "nehd/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nehd {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t sum = 0;
    for (std::uint64_t c : counts) sum += c;
    return sum;
}

double ConfusionMatrix::accuracy() const {
    const std::uint64_t sum = total();
    if (sum == 0) return 0.0;
    std::uint64_t trace = 0;
    for (std::size_t i = 0; i < classes; ++i) trace += at(i, i);
    return static_cast<double>(trace) / static_cast<double>(sum);
}

std::vector<double> ConfusionMatrix::per_class_accuracy() const {
    std::vector<double> acc(classes, 0.0);
    for (std::size_t t = 0; t < classes; ++t) {
        std::uint64_t col_sum = 0;
        for (std::size_t p = 0; p < classes; ++p) col_sum += at(p, t);
        if (col_sum > 0) acc[t] = static_cast<double>(at(t, t)) / static_cast<double>(col_sum);
    }
    return acc;
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& labels,
                          std::size_t classes) {
    if (preds.size() != labels.size()) {
        throw std::invalid_argument("confusion: " + std::to_string(preds.size()) +
                                    " predictions for " + std::to_string(labels.size()) +
                                    " labels");
    }
    if (classes == 0) throw std::invalid_argument("confusion: classes must be >= 1");
    ConfusionMatrix m;
    m.classes = classes;
    m.counts.assign(classes * classes, 0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int p = preds[i];
        const int t = labels[i];
        if (p < 0 || static_cast<std::size_t>(p) >= classes || t < 0 ||
            static_cast<std::size_t>(t) >= classes) {
            throw std::invalid_argument("confusion: sample " + std::to_string(i) +
                                        " out of range (pred " + std::to_string(p) + ", label " +
                                        std::to_string(t) + ")");
        }
        m.at(static_cast<std::size_t>(p), static_cast<std::size_t>(t)) += 1;
    }
    return m;
}

Aggregate aggregate(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("aggregate: empty value list");
    Aggregate a;
    for (double v : values) a.mean += v;
    a.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return a;
}

}  // namespace nehd
