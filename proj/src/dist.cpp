#include "battbayes/dist.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "battbayes/errors.hpp"

namespace battbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))
constexpr double kSqrtHalfPi = 1.2533141373155003;  // sqrt(pi/2), Rayleigh mean/scale ratio

// Gamma(shape, rate=1) by Marsaglia-Tsang squeeze; shape < 1 handled by the
// boosting identity G(k) = G(k + 1) * U^(1/k).
double draw_std_gamma(double shape, RandomStream& rng) {
    if (shape < 1.0) {
        double u = rng.u01_open();
        return draw_std_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = rng.normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) {
            continue;
        }
        double v = t * t * t;
        double u = rng.u01_open();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v;
        }
    }
}

}  // namespace

bool spec_valid(const DistSpec& spec) noexcept {
    if (!std::isfinite(spec.mean) || !std::isfinite(spec.sd) || spec.sd <= 0.0) {
        return false;
    }
    switch (spec.family) {
        case Family::Normal:
            return true;
        case Family::Gamma:
        case Family::Rayleigh:
            return spec.mean > 0.0;
        case Family::Beta:
            return spec.mean > 0.0 && spec.mean < 1.0 &&
                   spec.sd * spec.sd < spec.mean * (1.0 - spec.mean);
    }
    return false;
}

void validate_spec(const DistSpec& spec) {
    if (!spec_valid(spec)) {
        throw InvalidMoments("moments (mean=" + std::to_string(spec.mean) +
                             ", sd=" + std::to_string(spec.sd) + ") invalid for family " +
                             family_name(spec.family));
    }
}

NativeParams native_params(const DistSpec& spec) {
    validate_spec(spec);
    const double m = spec.mean;
    const double var = spec.sd * spec.sd;
    switch (spec.family) {
        case Family::Normal:
            return {m, spec.sd};
        case Family::Gamma:
            // shape = mean^2 / var, rate = mean / var
            return {m * m / var, m / var};
        case Family::Beta: {
            // nu = mean(1-mean)/var - 1; a = mean*nu, b = (1-mean)*nu
            double nu = m * (1.0 - m) / var - 1.0;
            return {m * nu, (1.0 - m) * nu};
        }
        case Family::Rayleigh:
            // scale = mean / sqrt(pi/2); the sd moment is carried but unused
            return {m / kSqrtHalfPi, 0.0};
    }
    throw InvalidMoments("unknown family");
}

double log_pdf(const DistSpec& spec, double x) {
    const NativeParams p = native_params(spec);
    if (!std::isfinite(x)) {
        return -kInf;
    }
    switch (spec.family) {
        case Family::Normal: {
            double z = (x - p.a) / p.b;
            return -0.5 * z * z - std::log(p.b) - kLogSqrt2Pi;
        }
        case Family::Gamma: {
            if (x <= 0.0) {
                return -kInf;
            }
            return p.a * std::log(p.b) - std::lgamma(p.a) + (p.a - 1.0) * std::log(x) - p.b * x;
        }
        case Family::Beta: {
            if (x <= 0.0 || x >= 1.0) {
                return -kInf;
            }
            double log_norm = std::lgamma(p.a + p.b) - std::lgamma(p.a) - std::lgamma(p.b);
            return log_norm + (p.a - 1.0) * std::log(x) + (p.b - 1.0) * std::log1p(-x);
        }
        case Family::Rayleigh: {
            if (x <= 0.0) {
                return -kInf;
            }
            double s2 = p.a * p.a;
            return std::log(x) - std::log(s2) - 0.5 * x * x / s2;
        }
    }
    return -kInf;
}

double draw(const DistSpec& spec, RandomStream& rng) {
    const NativeParams p = native_params(spec);
    switch (spec.family) {
        case Family::Normal:
            return p.a + p.b * rng.normal();
        case Family::Gamma: {
            double x = 0.0;
            while (x <= 0.0) {
                x = draw_std_gamma(p.a, rng) / p.b;
            }
            return x;
        }
        case Family::Beta: {
            double x = 0.0;
            while (x <= 0.0 || x >= 1.0) {
                double g1 = draw_std_gamma(p.a, rng);
                double g2 = draw_std_gamma(p.b, rng);
                if (g1 + g2 <= 0.0) {
                    continue;
                }
                x = g1 / (g1 + g2);
            }
            return x;
        }
        case Family::Rayleigh: {
            double x = 0.0;
            while (x <= 0.0) {
                x = p.a * std::sqrt(-2.0 * std::log(rng.u01_open()));
            }
            return x;
        }
    }
    throw InvalidMoments("unknown family");
}

bool in_support(Family family, double x) noexcept {
    switch (family) {
        case Family::Normal:
            return std::isfinite(x);
        case Family::Gamma:
        case Family::Rayleigh:
            return x > 0.0;
        case Family::Beta:
            return x > 0.0 && x < 1.0;
    }
    return false;
}

double support_lo(Family family) noexcept {
    return family == Family::Normal ? -kInf : 0.0;
}

double support_hi(Family family) noexcept {
    return family == Family::Beta ? 1.0 : kInf;
}

const char* family_name(Family family) noexcept {
    switch (family) {
        case Family::Normal:
            return "normal";
        case Family::Gamma:
            return "gamma";
        case Family::Beta:
            return "beta";
        case Family::Rayleigh:
            return "rayleigh";
    }
    return "unknown";
}

Family family_from_name(std::string_view name) {
    if (name == "normal") return Family::Normal;
    if (name == "gamma") return Family::Gamma;
    if (name == "beta") return Family::Beta;
    if (name == "rayleigh") return Family::Rayleigh;
    throw ParseError("unknown distribution family: " + std::string(name));
}

}  // namespace battbayes
