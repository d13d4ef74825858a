#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "battbayes/dist.hpp"
#include "battbayes/sampler.hpp"

namespace battbayes {

struct PosteriorSummary {
    std::string variable;
    DistSpec fitted;
    double mean = 0.0;
    double sd = 0.0;
    double ci_low = 0.0;   // empirical 2.5th percentile
    double ci_high = 0.0;  // empirical 97.5th percentile
    std::size_t n_effective_samples = 0;
};

// Method-of-moments fit of the family to the post-burn-in samples. Throws
// TooFewSamples (< 10 retained), SupportViolation (sample outside the family
// support), InvalidMoments (degenerate moments, e.g. zero spread).
DistSpec fit_family(const Chain& chain, Family family);

// Moments, empirical central 95% interval and fitted spec for the chain's
// declared family. Effective sample count discounts autocorrelation.
PosteriorSummary summarize(const Chain& chain);

// r_squared = 1 - SS_res/SS_tot against the measured values; rmsd_percent =
// RMS deviation over the mean measured value, times 100. Throws DomainError
// on length mismatch or empty input, DegenerateData when the measured values
// carry no variance or have zero mean.
struct FitMetrics {
    double r_squared = 0.0;
    double rmsd_percent = 0.0;
};
FitMetrics metrics(const std::vector<double>& estimated_means,
                   const std::vector<double>& measured_means);

// Density table over mean +/- 4 sd clipped to the family support; n_points
// evenly spaced x values. Throws InvalidMoments / TooFewPoints.
std::vector<std::pair<double, double>> pdf_curve(const DistSpec& spec, std::size_t n_points);

}  // namespace battbayes
