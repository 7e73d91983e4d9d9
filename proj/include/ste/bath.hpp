// bath.hpp: kinetic coefficients for an Ohmic boson bath

#pragma once

#include "ste/errors.hpp"
#include "ste/su2.hpp"

#include <cmath>
#include <string>

namespace ste {

// Default rate prefactor G (a.u.), with k_up = G alpha N(alpha) and
// k_down = G alpha (N(alpha) + 1).
inline constexpr double kDefaultRatePrefactor = 0.1;
inline constexpr double kDefaultBathTemperature = 5.0;

struct BathSpec {
    double temperature{kDefaultBathTemperature};
    double prefactor{kDefaultRatePrefactor};

    void validate() const {
        if (!(temperature > 0.0)) throw InvalidConfig("bath temperature must be positive");
        if (!(prefactor > 0.0)) throw InvalidConfig("rate prefactor must be positive");
    }
};

struct RatePair {
    double k_up{0.0};
    double k_down{0.0};
};

/// Bose-Einstein occupation 1/(exp(alpha/T) - 1).
inline double bose_occupation(double alpha, double temperature) {
    if (!(alpha > 0.0)) throw NonPositiveFrequency("bose_occupation: alpha must be positive, got " + std::to_string(alpha));
    if (!(temperature > 0.0)) throw InvalidConfig("bose_occupation: temperature must be positive");
    return 1.0 / std::expm1(alpha / temperature);
}

// Written as G alpha / expm1(x) and G alpha / (-expm1(-x)) so that
// k_up / k_down = exp(-x) holds to round-off and the T -> 0 limit is finite.
inline RatePair rates(double alpha, const BathSpec& bath) {
    if (!(alpha > 0.0)) throw NonPositiveFrequency("rates: alpha must be positive, got " + std::to_string(alpha));
    const double x = alpha / bath.temperature;
    const double scale = bath.prefactor * alpha;
    return {scale / std::expm1(x), scale / -std::expm1(-x)};
}

/// alpha = kappa(mu) * rabi.
inline double effective_frequency(double mu, double rabi) { return kappa(mu) * rabi; }

}  // namespace ste
