#include "cyberchar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cyberchar/error.hpp"

namespace cyberchar {

std::uint64_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::row_total(std::size_t actual) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < k; ++p) s += at(actual, p);
    return s;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t s = 0;
    for (std::size_t c = 0; c < k; ++c) s += at(c, c);
    return s;
}

ConfusionMatrix ConfusionMatrix::binary(std::uint64_t tp, std::uint64_t fn, std::uint64_t fp,
                                        std::uint64_t tn) {
    ConfusionMatrix cm(2);
    cm.at(1, 1) = tp;
    cm.at(1, 0) = fn;
    cm.at(0, 1) = fp;
    cm.at(0, 0) = tn;
    return cm;
}

ConfusionMatrix confusion(std::span<const int> y_true, std::span<const int> y_pred, std::size_t k) {
    require(y_true.size() == y_pred.size(), ErrorCode::DimensionMismatch,
            "label vectors differ in length");
    require(k >= 1, ErrorCode::InvalidArgument, "confusion matrix needs at least one class");
    ConfusionMatrix cm(k);
    const auto K = static_cast<int>(k);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const int a = y_true[i];
        const int p = y_pred[i];
        if (a < 0 || a >= K || p < 0 || p >= K) {
            fail(ErrorCode::LabelOutOfRange, "label out of range at index " + std::to_string(i) + ": actual " +
                                                 std::to_string(a) + ", predicted " + std::to_string(p));
        }
        ++cm.at(static_cast<std::size_t>(a), static_cast<std::size_t>(p));
    }
    return cm;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred) {
    std::vector<int> a(y_true.begin(), y_true.end());
    std::vector<int> p(y_pred.begin(), y_pred.end());
    return confusion(a, p, 2);
}

MetricsReport metrics(const ConfusionMatrix& cm) {
    require(cm.k == 2, ErrorCode::InvalidArgument, "binary metrics need a 2x2 confusion matrix");
    const auto tp = static_cast<double>(cm.tp());
    const auto fn = static_cast<double>(cm.fn());
    const auto fp = static_cast<double>(cm.fp());
    const auto tn = static_cast<double>(cm.tn());
    MetricsReport m;
    const double total = tp + fn + fp + tn;
    m.accuracy = total > 0 ? (tp + tn) / total : 0.0;
    m.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    return total ? static_cast<double>(cm.trace()) / static_cast<double>(total) : 0.0;
}

RocCurve roc(std::span<const std::uint8_t> y_true, std::span<const double> scores) {
    require(y_true.size() == scores.size(), ErrorCode::DimensionMismatch, "labels and scores differ in length");
    std::size_t P = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        require(std::isfinite(scores[i]), ErrorCode::InvalidArgument, "ROC scores must be finite");
        P += y_true[i] ? 1 : 0;
    }
    const std::size_t N = y_true.size() - P;
    if (P == 0 || N == 0) fail(ErrorCode::UndefinedAuc, "ROC needs both classes in y_true");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve c;
    c.points.push_back({INFINITY, 0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            (y_true[order[i]] ? tp : fp) += 1;
            ++i;
        }
        c.points.push_back({s, static_cast<double>(fp) / static_cast<double>(N),
                            static_cast<double>(tp) / static_cast<double>(P)});
    }
    for (std::size_t k = 1; k < c.points.size(); ++k) {
        const auto& a = c.points[k - 1];
        const auto& b = c.points[k];
        c.auc += (b.fpr - a.fpr) * 0.5 * (a.tpr + b.tpr);
    }
    return c;
}

}  // namespace cyberchar
