#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "multidraw/capacity.hpp"
#include "multidraw/channel.hpp"
#include "multidraw/config.hpp"
#include "multidraw/sampling.hpp"
#include "oracles.hpp"

using namespace multidraw;

TEST_CASE("sampling distribution validation") {
    CHECK_THROWS_AS(SamplingDistribution({1.0}), std::invalid_argument);          // q0 = 1
    CHECK_THROWS_AS(SamplingDistribution({0.5, 0.4}), std::invalid_argument);     // mass != 1
    CHECK_THROWS_AS(SamplingDistribution({-0.1, 1.1}), std::invalid_argument);    // negative
    CHECK_THROWS_AS(SamplingDistribution({}), std::invalid_argument);
    CHECK_NOTHROW(SamplingDistribution({0.5, 0.25, 0.25}));
}

TEST_CASE("named families") {
    auto bern = SamplingDistribution::bernoulli_draw(0.3);
    CHECK(bern.q0() == 0.3);
    CHECK(bern.mean() == Catch::Approx(0.7));

    auto fixed = SamplingDistribution::constant(2);
    CHECK(fixed.q0() == 0.0);
    CHECK(fixed.mean() == 2.0);
    CHECK(fixed.second_moment() == 4.0);

    auto pois = SamplingDistribution::truncated_poisson(1.5, 8);
    double mass = 0.0;
    for (double q : pois.pmf()) mass += q;
    CHECK(mass == Catch::Approx(1.0).margin(1e-12));
    CHECK(pois.q0() == Catch::Approx(std::exp(-1.5)).epsilon(1e-3));

    auto geo = SamplingDistribution::truncated_geometric(0.5, 8);
    CHECK(geo.q0() == Catch::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("draw counts follow the pmf") {
    auto single = SamplingDistribution::constant(1);
    Rng rng(1);
    auto counts = sample_draw_counts(single, 50, rng);
    CHECK(std::all_of(counts.begin(), counts.end(), [](std::size_t n) { return n == 1; }));

    auto dist = SamplingDistribution({0.2, 0.3, 0.5});
    double expected = dist.mean();
    double var = dist.second_moment() - expected * expected;
    const std::size_t draws = 100000;
    Rng rng2(2);
    double sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) sum += static_cast<double>(dist.sample(rng2));
    double mean = sum / static_cast<double>(draws);
    double sigma = std::sqrt(var / static_cast<double>(draws));
    CHECK(std::abs(mean - expected) < 3.0 * sigma);
}

TEST_CASE("channel params") {
    auto cp = ChannelParams::from_lengths(16, 32, 0.1);
    CHECK(cp.beta == Catch::Approx(8.0));
    auto cp2 = ChannelParams::from_beta(6, 9.0, 0.1);
    CHECK(std::abs(static_cast<double>(cp2.strand_bits) - 9.0 * std::log2(6.0)) <= 1.0);
    CHECK_THROWS_AS(ChannelParams::from_lengths(1, 8, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams::from_beta(8, -1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams::from_lengths(8, 8, 1.5), std::invalid_argument);
}

TEST_CASE("strand representation") {
    Strand s = Strand::from_string("01e");
    CHECK(s.symbol(0) == Symbol::Zero);
    CHECK(s.symbol(1) == Symbol::One);
    CHECK(s.symbol(2) == Symbol::Erased);
    CHECK(s.to_string() == "01e");
    CHECK(s.erasure_count() == 1);
    CHECK_FALSE(s.all_erased());
    CHECK(Strand::from_string("ee").all_erased());

    // A value bit under an erased position violates the invariant.
    BitVector vals = BitVector::from_string("100");
    BitVector known = BitVector::from_string("011");
    CHECK_THROWS_AS(Strand(vals, known), std::invalid_argument);
}

TEST_CASE("transmit with no noise and one draw permutes the input") {
    auto params = ChannelParams::from_lengths(8, 16, 0.0);
    auto dist = SamplingDistribution::constant(1);
    Rng rng(3);
    std::vector<Strand> input;
    for (std::size_t i = 0; i < 8; ++i) input.push_back(Strand::random(16, rng));
    ReadPool pool = transmit(input, params, dist, rng);
    REQUIRE(pool.reads.size() == 8);
    std::multiset<std::string> sent;
    std::multiset<std::string> got;
    for (const auto& s : input) sent.insert(s.to_string());
    for (const auto& s : pool.reads) got.insert(s.to_string());
    CHECK(sent == got);
}

TEST_CASE("transmit with p=1 erases everything") {
    auto params = ChannelParams::from_lengths(4, 8, 1.0);
    auto dist = SamplingDistribution::constant(2);
    Rng rng(4);
    std::vector<Strand> input;
    for (std::size_t i = 0; i < 4; ++i) input.push_back(Strand::random(8, rng));
    ReadPool pool = transmit(input, params, dist, rng);
    REQUIRE(pool.reads.size() == 8);
    for (const auto& s : pool.reads) CHECK(s.all_erased());
}

TEST_CASE("transmit erasure rate and origin agreement") {
    auto params = ChannelParams::from_lengths(64, 64, 0.3);
    auto dist = SamplingDistribution::truncated_poisson(1.5, 6);
    Rng rng(5);
    std::vector<Strand> input;
    for (std::size_t i = 0; i < 64; ++i) input.push_back(Strand::random(64, rng));
    ReadPool pool = transmit(input, params, dist, rng);
    REQUIRE(pool.reads.size() == pool.origins.size());

    std::size_t erased = 0;
    std::size_t total = 0;
    for (std::size_t i = 0; i < pool.reads.size(); ++i) {
        erased += pool.reads[i].erasure_count();
        total += pool.reads[i].len();
        // Every read agrees with its origin at all non-erased positions.
        CHECK(oracle::naive_consistent(pool.reads[i], input[pool.origins[i]]));
    }
    double rate = static_cast<double>(erased) / static_cast<double>(total);
    double sigma = std::sqrt(0.3 * 0.7 / static_cast<double>(total));
    CHECK(std::abs(rate - 0.3) < 3.0 * sigma);
}

TEST_CASE("p_eff examples") {
    CHECK(p_eff(SamplingDistribution::constant(1), 0.2) == Catch::Approx(0.2));
    CHECK(p_eff(SamplingDistribution::truncated_poisson(2.0, 8), 0.0) == 0.0);

    // Direct series oracle: (0.25 * 0.5 + 0.25 * 0.25) / 0.5.
    SamplingDistribution dist({0.5, 0.25, 0.25});
    double by_series = (0.25 * 0.5 + 0.25 * 0.25) / 0.5;
    CHECK(p_eff(dist, 0.5) == Catch::Approx(by_series).margin(1e-15));
    CHECK(by_series == 0.375);
}

TEST_CASE("p_eff never exceeds p") {
    Rng rng(6);
    for (int i = 0; i < 200; ++i) {
        std::size_t support = 2 + rng.below(6);
        std::vector<double> pmf(support);
        double sum = 0.0;
        for (auto& q : pmf) {
            q = rng.real01();
            sum += q;
        }
        for (auto& q : pmf) q /= sum;
        if (pmf[0] >= 1.0 - 1e-9) continue;
        SamplingDistribution dist(pmf);
        double p = rng.real01();
        double pe = p_eff(dist, p);
        CHECK(pe >= 0.0);
        CHECK(pe <= p + 1e-12);
    }
}

TEST_CASE("capacity examples") {
    auto single = SamplingDistribution::constant(1);
    CHECK(capacity(single, 0.0, 2.0) == Catch::Approx(0.5));
    CHECK(capacity(single, 0.0, 1.0) == 0.0);  // beta = 1 sits on the zero boundary

    SamplingDistribution dist({0.5, 0.25, 0.25});
    CHECK(capacity(dist, 0.5, 10.0) == Catch::Approx(0.2625).margin(1e-12));
    CHECK(conditional_bec_capacity(dist, 0.5) == Catch::Approx(1.0 - 0.375).margin(1e-12));

    // Negative raw value clamps to zero.
    CHECK(capacity(single, 0.5, 1.2) == 0.0);
    CHECK(capacity_via_p_eff(single, 0.5, 1.2) < 0.0);
}

TEST_CASE("capacity monotonicity") {
    auto dist = SamplingDistribution::truncated_poisson(1.2, 6);
    double prev = 2.0;
    for (double p : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8}) {
        double c = capacity(dist, p, 6.0);
        CHECK(c <= prev + 1e-12);
        prev = c;
    }
    prev = -1.0;
    for (double beta : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        double c = capacity(dist, 0.2, beta);
        CHECK(c >= prev - 1e-12);
        prev = c;
    }
    prev = 2.0;
    for (double q0 : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        double c = capacity(SamplingDistribution::bernoulli_draw(q0), 0.2, 6.0);
        CHECK(c <= prev + 1e-12);
        prev = c;
    }
}

TEST_CASE("gamma examples") {
    CHECK(gamma_exponent(0.0, 3.5) == Catch::Approx(3.5).margin(1e-12));
    CHECK(gamma_exponent(0.999999, 5.0) == Catch::Approx(0.0).margin(1e-4));
    // Independent numeric oracle: -10 ln(0.875) / ln 2.
    double by_oracle = -10.0 * std::log(0.875) / std::log(2.0);
    CHECK(gamma_exponent(0.5, 10.0) == Catch::Approx(by_oracle).margin(1e-12));
    CHECK(by_oracle == Catch::Approx(1.9264507794239587).margin(1e-12));
    for (double p : {0.1, 0.5, 0.9}) CHECK(gamma_exponent(p, 1.0) > 0.0);
}

TEST_CASE("regime classification") {
    CHECK(regime(0.0, 3.0) == Regime::CapacityKnownBlue);
    CHECK(regime(0.0, 0.5) == Regime::ZeroRed);
    CHECK(regime(0.0, 1.5) == Regime::AchievableGreen);
    CHECK(regime(0.5, 6.0) == Regime::AchievableGreen);  // gamma = 1.156 > 1, below blue boundary 8
    CHECK(regime(0.5, 3.0) == Regime::OpenGray);         // gamma < 1, beta >= 1
    CHECK(std::string(to_string(Regime::ZeroRed)) == "zero_red");
}

TEST_CASE("blue region implies gamma above one") {
    Rng rng(8);
    for (int i = 0; i < 500; ++i) {
        double p = rng.real01() * 0.98;
        double beta = 0.1 + rng.real01() * 30.0;
        if (beta > beta_blue_boundary(p)) CHECK(gamma_exponent(p, beta) > 1.0);
    }
}

TEST_CASE("boundary curves") {
    CHECK(beta_blue_boundary(0.5) == Catch::Approx(8.0));
    CHECK(beta_green_boundary(0.5) == Catch::Approx(5.1908930696844315).margin(1e-12));
    auto points = boundary_curves({1e-4, 0.3, 0.5});
    CHECK(points.size() == 3);
    CHECK(points[0].beta_blue == Catch::Approx(2.0).margin(1e-3));
    CHECK(points[0].beta_green == Catch::Approx(1.0).margin(1e-3));
    for (const auto& pt : points) CHECK(pt.beta_blue > pt.beta_green);
    CHECK_THROWS_AS(boundary_curves({1.0}), std::invalid_argument);
}

TEST_CASE("sampling distribution from JSON") {
    auto pmf = parse_sampling_distribution(std::string(R"({"pmf":[0.5,0.25,0.25]})"));
    CHECK(pmf.q0() == 0.5);
    auto pois = parse_sampling_distribution(std::string(R"({"family":"poisson","lambda":1.5,"nmax":6})"));
    CHECK(pois.max_draws() == 6);
    auto geo = parse_sampling_distribution(std::string(R"({"family":"geometric","r":0.5,"nmax":4})"));
    CHECK(geo.max_draws() == 4);
    auto fixed = parse_sampling_distribution(std::string(R"({"family":"constant","n":2})"));
    CHECK(fixed.mean() == 2.0);

    CHECK_THROWS_AS(parse_sampling_distribution(std::string("{broken")), ConfigError);
    CHECK_THROWS_AS(parse_sampling_distribution(std::string(R"({"family":"zipf","s":1.2})")), ConfigError);
    try {
        parse_sampling_distribution(std::string(R"({"family":"zipf"})"), "cfg.dist");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK_FALSE(e.where().empty());
    }
}
