#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace battbayes {

// Uniformly sampled signal; `sample_period_s` is the spacing between values.
struct TimeSeries {
    std::vector<double> values;
    double sample_period_s = 1.0;
};

double mean_of(std::span<const double> xs);
double variance_of(std::span<const double> xs);  // population (divide by n)

// Normalized autocorrelation A(lag) = E[(y_s - mu)(y_{s+lag} - mu)] / var,
// averaging over the n - lag available pairs. A(0) == 1 by construction.
// Throws LagOutOfRange unless lag < n, DegenerateSeries if var == 0 or n < 2.
double autocorrelation(const TimeSeries& series, std::size_t lag);

// Smallest lag L >= 1 with A(L) below `threshold`; the block size used to
// thin correlated telemetry before the network sees it. Returns the series
// length when no lag qualifies.
std::size_t decorrelation_lag(const TimeSeries& series, double threshold = 0.2);

// Non-overlapping block means of length `factor`; a trailing partial block
// is averaged over its actual length. The sample period scales by `factor`.
TimeSeries block_average(const TimeSeries& series, std::size_t factor);

}  // namespace battbayes
