#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cyberchar {

/// k x k counts, rows = actual class, columns = predicted class.
struct ConfusionMatrix {
    std::size_t k = 2;
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(4, 0);

    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::size_t classes) : k(classes), counts(classes * classes, 0) {}

    std::uint64_t& at(std::size_t actual, std::size_t predicted) { return counts[actual * k + predicted]; }
    std::uint64_t at(std::size_t actual, std::size_t predicted) const { return counts[actual * k + predicted]; }
    std::uint64_t total() const noexcept;
    std::uint64_t row_total(std::size_t actual) const;
    std::uint64_t trace() const;

    /// Binary matrix from cell counts (positive class = 1).
    static ConfusionMatrix binary(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn);
    std::uint64_t tp() const { return at(1, 1); }
    std::uint64_t fn() const { return at(1, 0); }
    std::uint64_t fp() const { return at(0, 1); }
    std::uint64_t tn() const { return at(0, 0); }

    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k);
ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

struct MetricsReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Binary metrics with positive class 1. Precision is 0 without positive
/// predictions, recall 0 without actual positives, F1 0 when P + R = 0.
MetricsReport metrics(const ConfusionMatrix& cm);

/// Fraction of the diagonal, any k.
double accuracy(const ConfusionMatrix& cm);

struct RocPoint {
    double threshold = 0.0;  // predict positive when score >= threshold
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points;  // from (0,0) to (1,1)
    double auc = 0.0;
};

/// Thresholds at every distinct score; equal scores move together. AUC by trapezoid.
/// Throws UndefinedAuc when y_true holds a single class.
RocCurve roc(std::span<const std::uint8_t> y_true, std::span<const double> scores);

}  // namespace cyberchar
