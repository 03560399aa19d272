#include "brifca/aggregation.hpp"

#include <algorithm>
#include <cmath>

namespace brifca {

namespace {

Eigen::Index checked_dim(const std::vector<ParamVector>& batch) {
    if (batch.empty()) throw EmptyAggregate("aggregate over empty batch");
    Eigen::Index dim = batch.front().size();
    for (const auto& v : batch)
        if (v.size() != dim) throw InvalidInput("aggregate: dimension mismatch in batch");
    return dim;
}

}  // namespace

ParamVector coordinate_median(const std::vector<ParamVector>& batch) {
    Eigen::Index dim = checked_dim(batch);
    const std::size_t count = batch.size();
    ParamVector out(dim);
    std::vector<double> column(count);
    for (Eigen::Index h = 0; h < dim; ++h) {
        for (std::size_t i = 0; i < count; ++i) column[i] = batch[i][h];
        auto mid = column.begin() + static_cast<std::ptrdiff_t>(count / 2);
        std::nth_element(column.begin(), mid, column.end());
        if (count % 2 == 1) {
            out[h] = *mid;
        } else {
            double upper = *mid;
            double lower = *std::max_element(column.begin(), mid);
            out[h] = lower + (upper - lower) / 2.0;
        }
    }
    return out;
}

ParamVector coordinate_trimmed_mean(const std::vector<ParamVector>& batch, double beta,
                                    TrimDivisor divisor) {
    Eigen::Index dim = checked_dim(batch);
    if (!(beta >= 0.0 && beta < 0.5)) throw InvalidInput("trimmed mean: beta must lie in [0, 1/2)");
    const std::size_t count = batch.size();
    const std::size_t cut = static_cast<std::size_t>(std::floor(beta * static_cast<double>(count)));
    if (2 * cut >= count)
        throw OverTrim("trimmed mean: trimming leaves no elements (batch " +
                       std::to_string(count) + ", beta " + std::to_string(beta) + ")");
    const double denom = divisor == TrimDivisor::remaining
                             ? static_cast<double>(count - 2 * cut)
                             : (1.0 - 2.0 * beta) * static_cast<double>(count);
    ParamVector out(dim);
    std::vector<double> column(count);
    for (Eigen::Index h = 0; h < dim; ++h) {
        for (std::size_t i = 0; i < count; ++i) column[i] = batch[i][h];
        std::sort(column.begin(), column.end());
        double sum = 0.0;
        for (std::size_t i = cut; i < count - cut; ++i) sum += column[i];
        out[h] = sum / denom;
    }
    return out;
}

ParamVector fedavg_mean(const std::vector<ParamVector>& batch, const std::vector<double>* weights) {
    Eigen::Index dim = checked_dim(batch);
    ParamVector out = ParamVector::Zero(dim);
    if (weights == nullptr) {
        for (const auto& v : batch) out += v;
        return out / static_cast<double>(batch.size());
    }
    if (weights->size() != batch.size())
        throw InvalidInput("fedavg_mean: weight count differs from batch size");
    double total = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        double w = (*weights)[i];
        if (w < 0.0 || !std::isfinite(w)) throw InvalidInput("fedavg_mean: weights must be finite and >= 0");
        out += w * batch[i];
        total += w;
    }
    if (!(total > 0.0)) throw InvalidInput("fedavg_mean: weights must sum to a positive value");
    return out / total;
}

ParamVector aggregate(const AggregationRule& rule, const std::vector<ParamVector>& batch) {
    switch (rule.kind) {
        case AggregationKind::median: return coordinate_median(batch);
        case AggregationKind::trimmed_mean:
            return coordinate_trimmed_mean(batch, rule.beta, rule.divisor);
        case AggregationKind::mean: return fedavg_mean(batch);
    }
    throw InvalidInput("aggregate: unknown rule");
}

}  // namespace brifca
