#ifndef BRIFCA_AGGREGATION_HPP
#define BRIFCA_AGGREGATION_HPP

#include <vector>

#include "brifca/core.hpp"

namespace brifca {

enum class AggregationKind { median, trimmed_mean, mean };

struct AggregationRule {
    AggregationKind kind = AggregationKind::mean;
    double beta = 0.0;  // trimmed_mean only, in [0, 1/2)
    TrimDivisor divisor = TrimDivisor::remaining;

    static AggregationRule median() { return {AggregationKind::median, 0.0, TrimDivisor::remaining}; }
    static AggregationRule trimmed(double beta, TrimDivisor divisor = TrimDivisor::remaining) {
        return {AggregationKind::trimmed_mean, beta, divisor};
    }
    static AggregationRule mean() { return {AggregationKind::mean, 0.0, TrimDivisor::remaining}; }
};

/// Coordinate h of the result is the one-dimensional median of coordinate h
/// across the batch; for even batch sizes, the midpoint of the two central
/// order statistics.
ParamVector coordinate_median(const std::vector<ParamVector>& batch);

/// Per coordinate, drops the floor(beta*m) largest and smallest values and
/// averages the rest. With TrimDivisor::nominal the sum is divided by
/// (1-2*beta)*m instead of the retained count.
ParamVector coordinate_trimmed_mean(const std::vector<ParamVector>& batch, double beta,
                                    TrimDivisor divisor = TrimDivisor::remaining);

/// Weighted arithmetic mean; null weights means uniform.
ParamVector fedavg_mean(const std::vector<ParamVector>& batch,
                        const std::vector<double>* weights = nullptr);

ParamVector aggregate(const AggregationRule& rule, const std::vector<ParamVector>& batch);

}  // namespace brifca

#endif
