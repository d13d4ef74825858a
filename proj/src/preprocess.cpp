#include "battbayes/preprocess.hpp"

#include <cmath>
#include <string>

#include "battbayes/errors.hpp"

namespace battbayes {

double mean_of(std::span<const double> xs) {
    if (xs.empty()) {
        throw DegenerateSeries("mean of an empty series");
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

double variance_of(std::span<const double> xs) {
    double mu = mean_of(xs);
    double sum = 0.0;
    for (double x : xs) {
        sum += (x - mu) * (x - mu);
    }
    return sum / static_cast<double>(xs.size());
}

double autocorrelation(const TimeSeries& series, std::size_t lag) {
    const auto& y = series.values;
    const std::size_t n = y.size();
    if (n < 2) {
        throw DegenerateSeries("autocorrelation needs at least 2 samples");
    }
    if (lag >= n) {
        throw LagOutOfRange("lag " + std::to_string(lag) + " >= series length " +
                            std::to_string(n));
    }
    const double mu = mean_of(y);
    const double var = variance_of(y);
    if (var == 0.0) {
        throw DegenerateSeries("autocorrelation of a constant series");
    }
    double acc = 0.0;
    for (std::size_t s = 0; s + lag < n; ++s) {
        acc += (y[s] - mu) * (y[s + lag] - mu);
    }
    acc /= static_cast<double>(n - lag);
    return acc / var;
}

std::size_t decorrelation_lag(const TimeSeries& series, double threshold) {
    const std::size_t n = series.values.size();
    if (n < 2) {
        throw DegenerateSeries("decorrelation lag needs at least 2 samples");
    }
    for (std::size_t lag = 1; lag < n; ++lag) {
        if (autocorrelation(series, lag) < threshold) {
            return lag;
        }
    }
    return n;
}

TimeSeries block_average(const TimeSeries& series, std::size_t factor) {
    if (factor == 0) {
        throw DomainError("block averaging factor must be >= 1");
    }
    TimeSeries out;
    out.sample_period_s = series.sample_period_s * static_cast<double>(factor);
    const auto& y = series.values;
    out.values.reserve((y.size() + factor - 1) / factor);
    for (std::size_t start = 0; start < y.size(); start += factor) {
        std::size_t stop = std::min(y.size(), start + factor);
        double sum = 0.0;
        for (std::size_t i = start; i < stop; ++i) {
            sum += y[i];
        }
        out.values.push_back(sum / static_cast<double>(stop - start));
    }
    return out;
}

}  // namespace battbayes
