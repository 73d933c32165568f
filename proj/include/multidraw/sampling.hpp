#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "multidraw/rng.hpp"

namespace multidraw {

// Finite pmf {q_0, ..., q_nmax} of the per-strand draw count Q. Named
// families with unbounded support are truncated to a finite tail and
// renormalized. q_0 = 1 is rejected: no strand is ever observed and all
// capacity quantities degenerate.
class SamplingDistribution {
  public:
    explicit SamplingDistribution(std::vector<double> pmf, std::string name = "pmf")
        : pmf_(std::move(pmf)), name_(std::move(name)) {
        validate_();
        cdf_.resize(pmf_.size());
        double acc = 0.0;
        for (std::size_t n = 0; n < pmf_.size(); ++n) {
            acc += pmf_[n];
            cdf_[n] = acc;
        }
        cdf_.back() = 1.0;
    }

    // Q = 0 with probability q0, else exactly one draw.
    static SamplingDistribution bernoulli_draw(double q0) {
        return SamplingDistribution({q0, 1.0 - q0}, "bernoulli");
    }

    static SamplingDistribution constant(std::size_t n) {
        std::vector<double> pmf(n + 1, 0.0);
        pmf[n] = 1.0;
        return SamplingDistribution(std::move(pmf), "constant");
    }

    static SamplingDistribution truncated_poisson(double lambda, std::size_t nmax) {
        if (lambda <= 0.0) throw std::invalid_argument("truncated_poisson: lambda must be > 0");
        std::vector<double> pmf(nmax + 1);
        double term = std::exp(-lambda);
        for (std::size_t n = 0; n <= nmax; ++n) {
            pmf[n] = term;
            term *= lambda / static_cast<double>(n + 1);
        }
        return renormalized_(std::move(pmf), "poisson");
    }

    // q_n proportional to (1-r) r^n on {0,...,nmax}.
    static SamplingDistribution truncated_geometric(double r, std::size_t nmax) {
        if (r <= 0.0 || r >= 1.0) throw std::invalid_argument("truncated_geometric: r must be in (0,1)");
        std::vector<double> pmf(nmax + 1);
        double term = 1.0 - r;
        for (std::size_t n = 0; n <= nmax; ++n) {
            pmf[n] = term;
            term *= r;
        }
        return renormalized_(std::move(pmf), "geometric");
    }

    const std::vector<double>& pmf() const { return pmf_; }
    const std::string& name() const { return name_; }
    std::size_t max_draws() const { return pmf_.size() - 1; }

    double q0() const { return pmf_[0]; }

    double mean() const {
        double m = 0.0;
        for (std::size_t n = 1; n < pmf_.size(); ++n) m += pmf_[n] * static_cast<double>(n);
        return m;
    }

    double second_moment() const {
        double m = 0.0;
        for (std::size_t n = 1; n < pmf_.size(); ++n) m += pmf_[n] * static_cast<double>(n) * static_cast<double>(n);
        return m;
    }

    std::size_t sample(Rng& rng) const {
        double u = rng.real01();
        for (std::size_t n = 0; n + 1 < cdf_.size(); ++n) {
            if (u < cdf_[n]) return n;
        }
        return cdf_.size() - 1;
    }

  private:
    static SamplingDistribution renormalized_(std::vector<double> pmf, std::string name) {
        double sum = 0.0;
        for (double q : pmf) sum += q;
        if (sum <= 0.0) throw std::invalid_argument("SamplingDistribution: pmf mass is zero");
        for (double& q : pmf) q /= sum;
        return SamplingDistribution(std::move(pmf), std::move(name));
    }

    void validate_() const {
        if (pmf_.empty()) throw std::invalid_argument("SamplingDistribution: empty pmf");
        double sum = 0.0;
        for (double q : pmf_) {
            if (!(q >= 0.0)) throw std::invalid_argument("SamplingDistribution: negative probability");
            sum += q;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("SamplingDistribution: pmf must sum to 1");
        if (pmf_[0] >= 1.0 - 1e-12) throw std::invalid_argument("SamplingDistribution: q0 = 1 leaves no information");
    }

    std::vector<double> pmf_;
    std::string name_;
    std::vector<double> cdf_;
};

// Per-strand draw counts N_1..N_M, i.i.d. from the pmf.
inline std::vector<std::size_t> sample_draw_counts(const SamplingDistribution& dist, std::size_t m, Rng& rng) {
    std::vector<std::size_t> counts(m);
    for (auto& n : counts) n = dist.sample(rng);
    return counts;
}

}  // namespace multidraw
