#pragma once

#include <string_view>

#include "battbayes/rng.hpp"

namespace battbayes {

enum class Family { Normal, Gamma, Beta, Rayleigh };

// Moment-parameterized density: (family, mean, sd) is the single currency
// passed between the network, the sampler and posterior fitting. Native
// parameters are recovered by method of moments on demand and never stored.
struct DistSpec {
    Family family = Family::Normal;
    double mean = 0.0;
    double sd = 1.0;
};

// Native parameters recovered from moments. Meaning depends on the family:
//   Normal:   a = mean,  b = sd
//   Gamma:    a = shape, b = rate
//   Beta:     a, b      = shape pair
//   Rayleigh: a = scale, b = 0 (unused; one-parameter family)
struct NativeParams {
    double a = 0.0;
    double b = 0.0;
};

// Moment constraints per family:
//   all:      sd > 0 and both moments finite
//   Gamma:    mean > 0
//   Rayleigh: mean > 0 (sd is carried along but the density ignores it)
//   Beta:     0 < mean < 1 and sd*sd < mean*(1 - mean)
bool spec_valid(const DistSpec& spec) noexcept;
void validate_spec(const DistSpec& spec);  // throws InvalidMoments

NativeParams native_params(const DistSpec& spec);

// Log density at x. Returns -infinity outside the support (x <= 0 for Gamma
// and Rayleigh, x outside (0, 1) for Beta); never NaN for finite x.
double log_pdf(const DistSpec& spec, double x);

// One draw, always inside the open support of the family.
double draw(const DistSpec& spec, RandomStream& rng);

bool in_support(Family family, double x) noexcept;
double support_lo(Family family) noexcept;  // -inf for Normal, 0 otherwise
double support_hi(Family family) noexcept;  // 1 for Beta, +inf otherwise

const char* family_name(Family family) noexcept;
Family family_from_name(std::string_view name);  // throws ParseError

}  // namespace battbayes
