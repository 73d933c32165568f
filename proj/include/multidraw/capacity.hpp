#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "multidraw/sampling.hpp"

namespace multidraw {

// Closed-form analysis of the BEC multi-draw shuffling-sampling channel.
// Logarithms are base 2 throughout: rates are in bits and L = beta log2 M.

// Average residual erasure probability of a consensus strand, given the
// strand was drawn at least once: E[p^Q | Q >= 1].
inline double p_eff(const SamplingDistribution& dist, double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p_eff: p must be in [0,1]");
    const auto& q = dist.pmf();
    double sum = 0.0;
    for (std::size_t n = 1; n < q.size(); ++n) sum += q[n] * std::pow(p, static_cast<double>(n));
    return sum / (1.0 - q[0]);
}

// E[C_BEC,Q | Q >= 1] with C_BEC,n = 1 - p^n, summed directly over the pmf.
inline double conditional_bec_capacity(const SamplingDistribution& dist, double p) {
    const auto& q = dist.pmf();
    double sum = 0.0;
    for (std::size_t n = 1; n < q.size(); ++n) sum += q[n] * (1.0 - std::pow(p, static_cast<double>(n)));
    return sum / (1.0 - q[0]);
}

// The two algebraic routes to the capacity expression. Both are exposed
// unclamped so their equivalence can be checked; capacity() clamps at zero
// since negative rates are meaningless.
inline double capacity_via_conditional_expectation(const SamplingDistribution& dist, double p, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("capacity: beta must be positive");
    return (1.0 - dist.q0()) * (conditional_bec_capacity(dist, p) - 1.0 / beta);
}

inline double capacity_via_p_eff(const SamplingDistribution& dist, double p, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("capacity: beta must be positive");
    return (1.0 - dist.q0()) * (1.0 - p_eff(dist, p) - 1.0 / beta);
}

inline double capacity(const SamplingDistribution& dist, double p, double beta) {
    return std::max(0.0, capacity_via_p_eff(dist, p, beta));
}

// gamma = -beta log2(1 - (1-p)^2 / 2); the exponent governing spurious
// consistency between reads of distinct origins. Positive for p in (0,1).
inline double gamma_exponent(double p, double beta) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("gamma_exponent: p must be in [0,1)");
    if (!(beta > 0.0)) throw std::invalid_argument("gamma_exponent: beta must be positive");
    return -beta * std::log2(1.0 - 0.5 * (1.0 - p) * (1.0 - p));
}

// Smallest beta for which the converse side is known to hold: 2/(1-p)^2.
inline double beta_blue_boundary(double p) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("beta_blue_boundary: p must be in [0,1)");
    return 2.0 / ((1.0 - p) * (1.0 - p));
}

// Smallest beta for which the linear-scheme achievability holds (gamma > 1).
inline double beta_green_boundary(double p) {
    if (p < 0.0 || p >= 1.0) throw std::invalid_argument("beta_green_boundary: p must be in [0,1)");
    return -1.0 / std::log2(1.0 - 0.5 * (1.0 - p) * (1.0 - p));
}

enum class Regime {
    CapacityKnownBlue,  // converse and achievability meet; capacity known
    AchievableGreen,    // linear-scheme lower bound holds
    ZeroRed,            // beta < 1: capacity is zero
    OpenGray,           // unresolved
};

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::CapacityKnownBlue: return "capacity_known_blue";
        case Regime::AchievableGreen: return "achievable_green";
        case Regime::ZeroRed: return "zero_red";
        case Regime::OpenGray: return "open_gray";
    }
    return "unknown";
}

inline Regime regime(double p, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("regime: beta must be positive");
    if (beta > beta_blue_boundary(p)) return Regime::CapacityKnownBlue;
    if (gamma_exponent(p, beta) > 1.0) return Regime::AchievableGreen;
    if (beta < 1.0) return Regime::ZeroRed;
    return Regime::OpenGray;
}

struct BoundaryPoint {
    double p = 0.0;
    double beta_blue = 0.0;
    double beta_green = 0.0;
};

inline std::vector<BoundaryPoint> boundary_curves(const std::vector<double>& p_grid) {
    std::vector<BoundaryPoint> out;
    out.reserve(p_grid.size());
    for (double p : p_grid) {
        if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("boundary_curves: every p must be in (0,1)");
        out.push_back({p, beta_blue_boundary(p), beta_green_boundary(p)});
    }
    return out;
}

}  // namespace multidraw
