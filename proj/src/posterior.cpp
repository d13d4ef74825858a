#include "battbayes/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "battbayes/errors.hpp"
#include "battbayes/preprocess.hpp"

namespace battbayes {

namespace {

std::vector<double> retained_samples(const Chain& chain) {
    if (chain.burn_in_index >= chain.samples.size()) {
        throw TooFewSamples("chain has no samples left after burn-in");
    }
    return {chain.samples.begin() + static_cast<std::ptrdiff_t>(chain.burn_in_index),
            chain.samples.end()};
}

// Sample mean and (n-1)-normalized standard deviation.
std::pair<double, double> moments_of(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0))};
}

// Linear-interpolated empirical quantile on a sorted copy.
double quantile(std::vector<double> sorted, double p) {
    const double h = p * (static_cast<double>(sorted.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

// Integrated autocorrelation time, truncated at the first lag that drops
// below 0.05 (or turns negative); effective count = n / tau.
std::size_t effective_count(const std::vector<double>& xs) {
    const std::size_t n = xs.size();
    TimeSeries series{xs, 1.0};
    double tau = 1.0;
    const std::size_t max_lag = n / 2;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double rho;
        try {
            rho = autocorrelation(series, lag);
        } catch (const Error&) {
            break;  // degenerate variance: treat the chain as uncorrelated
        }
        if (rho < 0.05) {
            break;
        }
        tau += 2.0 * rho;
    }
    auto eff = static_cast<std::size_t>(static_cast<double>(n) / tau);
    return std::clamp<std::size_t>(eff, 1, n);
}

}  // namespace

DistSpec fit_family(const Chain& chain, Family family) {
    std::vector<double> xs = retained_samples(chain);
    if (xs.size() < 10) {
        throw TooFewSamples("need at least 10 post-burn-in samples to fit");
    }
    for (double x : xs) {
        if (!in_support(family, x)) {
            throw SupportViolation("sample outside the " + std::string(family_name(family)) +
                                   " support");
        }
    }
    auto [mean, sd] = moments_of(xs);
    DistSpec fitted{family, mean, sd};
    validate_spec(fitted);
    return fitted;
}

PosteriorSummary summarize(const Chain& chain) {
    PosteriorSummary out;
    out.variable = chain.variable;
    out.fitted = fit_family(chain, chain.family);
    std::vector<double> xs = retained_samples(chain);
    auto [mean, sd] = moments_of(xs);
    out.mean = mean;
    out.sd = sd;
    std::sort(xs.begin(), xs.end());
    out.ci_low = quantile(xs, 0.025);
    out.ci_high = quantile(xs, 0.975);
    out.n_effective_samples = effective_count(retained_samples(chain));
    return out;
}

FitMetrics metrics(const std::vector<double>& estimated_means,
                   const std::vector<double>& measured_means) {
    if (estimated_means.empty() || estimated_means.size() != measured_means.size()) {
        throw DomainError("metrics need equal-length nonempty sequences");
    }
    const double n = static_cast<double>(measured_means.size());
    const double measured_mean =
        std::accumulate(measured_means.begin(), measured_means.end(), 0.0) / n;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < measured_means.size(); ++i) {
        const double r = estimated_means[i] - measured_means[i];
        ss_res += r * r;
        const double d = measured_means[i] - measured_mean;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0) {
        throw DegenerateData("measured values carry no variance");
    }
    if (measured_mean == 0.0) {
        throw DegenerateData("measured values average to zero; RMSD% undefined");
    }
    FitMetrics out;
    out.r_squared = 1.0 - ss_res / ss_tot;
    out.rmsd_percent = std::sqrt(ss_res / n) / measured_mean * 100.0;
    return out;
}

std::vector<std::pair<double, double>> pdf_curve(const DistSpec& spec, std::size_t n_points) {
    validate_spec(spec);
    if (n_points < 2) {
        throw TooFewPoints("density curve needs at least 2 points");
    }
    double lo = spec.mean - 4.0 * spec.sd;
    double hi = spec.mean + 4.0 * spec.sd;
    const double floor = support_lo(spec.family);
    const double ceil = support_hi(spec.family);
    if (lo < floor) {
        // Keep strictly inside open-boundary supports.
        lo = floor + (hi - floor) * 1e-9;
    }
    if (hi > ceil) {
        hi = ceil - (ceil - lo) * 1e-9;
    }
    std::vector<std::pair<double, double>> out;
    out.reserve(n_points);
    const double step = (hi - lo) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double x = (i + 1 == n_points) ? hi : lo + step * static_cast<double>(i);
        out.emplace_back(x, std::exp(log_pdf(spec, x)));
    }
    return out;
}

}  // namespace battbayes
