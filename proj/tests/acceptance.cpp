// Acceptance suite: one line per criterion, nonzero exit code when any
// criterion fails. Every tolerance is pinned in code; seeds are fixed so the
// outcome is reproducible.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "multidraw/config.hpp"
#include "multidraw/experiments.hpp"
#include "oracles.hpp"

using namespace multidraw;

namespace {

int g_failures = 0;

class Timer {
  public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

void report(int index, const std::string& name, bool pass, const std::string& detail, double secs) {
    if (!pass) ++g_failures;
    std::printf("[%s] criterion %2d: %-28s %s (%.1fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- criterion 1: full-rank constant ---------------------------------------
void criterion_full_rank() {
    Timer timer;
    Lemma1Config cfg;
    cfg.b_values = {200};
    cfg.deltas = {0.0};
    cfg.trials = 10000;
    cfg.seed = 101;
    auto square = run_lemma1(cfg)[0];

    cfg.deltas = {0.1};
    cfg.trials = 1000;
    auto trimmed = run_lemma1(cfg)[0];

    double secs = timer.seconds();
    bool pass = std::abs(square.empirical - 0.28879) <= 0.03 && trimmed.empirical >= 0.99 && secs < 60.0;
    report(1, "full-rank constant", pass,
           "empirical=" + fmt(square.empirical) + " target=0.28879+-0.03, delta=0.1: " + fmt(trimmed.empirical) +
               " >= 0.99",
           secs);
}

// --- criterion 2: pairwise consistency -------------------------------------
void criterion_pair_consistency() {
    Timer timer;
    struct Cell {
        double p;
        std::size_t l;
    };
    std::vector<Cell> cells{{0.1, 8}, {0.3, 16}, {0.5, 16}};
    bool pass = true;
    std::string detail;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        PairConsistencyConfig cfg;
        cfg.p_values = {cells[i].p};
        cfg.l_values = {cells[i].l};
        cfg.pairs = 100000;
        cfg.seed = 404 + i;
        auto cell = run_pair_consistency(cfg)[0];
        double dev = std::abs(cell.empirical - cell.predicted);
        pass = pass && dev <= 3.0 * cell.std_error;
        if (!detail.empty()) detail += ", ";
        detail += "(" + fmt(cells[i].p) + "," + std::to_string(cells[i].l) + "): " + fmt(dev / cell.std_error) +
                  " sigma";
    }
    double secs = timer.seconds();
    pass = pass && secs < 60.0;
    report(2, "pairwise consistency", pass, detail, secs);
}

// --- criterion 3: capacity identities --------------------------------------
void criterion_capacity_identities() {
    Timer timer;
    bool pass = true;
    double worst = 0.0;
    Rng rng(303);
    int points = 0;
    while (points < 100) {
        std::size_t support = 2 + rng.below(7);
        std::vector<double> pmf(support);
        double sum = 0.0;
        for (auto& q : pmf) {
            q = rng.real01();
            sum += q;
        }
        for (auto& q : pmf) q /= sum;
        if (pmf[0] >= 1.0 - 1e-6) continue;
        ++points;
        SamplingDistribution dist(pmf);
        double p = rng.real01() * 0.95;
        double beta = 0.2 + rng.real01() * 20.0;
        double a = capacity_via_conditional_expectation(dist, p, beta);
        double b = capacity_via_p_eff(dist, p, beta);
        worst = std::max(worst, std::abs(a - b));
    }
    pass = pass && worst <= 1e-12;

    bool exact = true;
    for (double q0 : {0.0, 0.25, 0.5, 0.75}) {
        for (double p : {0.125, 0.25, 0.5}) {
            for (double beta : {2.0, 4.0, 8.0}) {
                SamplingDistribution dist = SamplingDistribution::bernoulli_draw(q0);
                double expected = (1.0 - q0) * (1.0 - p - 1.0 / beta);
                exact = exact && capacity_via_p_eff(dist, p, beta) == expected &&
                        capacity_via_conditional_expectation(dist, p, beta) == expected;
            }
        }
    }
    pass = pass && exact;
    report(3, "capacity identities", pass,
           "max form gap=" + fmt(worst) + " <= 1e-12, single-draw exact=" + (exact ? "yes" : "no"),
           timer.seconds());
}

// --- criterion 4: regime curves ---------------------------------------------
void criterion_regime_curves() {
    Timer timer;
    RegimeCurvesConfig cfg;
    cfg.p_min = 1e-4;
    cfg.p_max = 0.9;
    cfg.n_points = 200;
    std::string path = "acceptance_curves.csv";
    run_regime_curves(cfg, path);

    std::ifstream in(path, std::ios::binary);
    std::string line;
    std::getline(in, line);  // header
    bool pass = line == "p,beta_blue,beta_green" || line == "p,beta_blue,beta_green\r";
    double worst = 0.0;
    std::size_t rows = 0;
    bool order_ok = true;
    double first_blue = 0.0;
    double first_green = 0.0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double p = 0.0;
        double blue = 0.0;
        double green = 0.0;
        std::sscanf(line.c_str(), "%lf,%lf,%lf", &p, &blue, &green);
        if (rows == 0) {
            first_blue = blue;
            first_green = green;
        }
        worst = std::max(worst, std::abs(blue - 2.0 / ((1.0 - p) * (1.0 - p))));
        worst = std::max(worst,
                         std::abs(green - (-1.0 / std::log2(1.0 - 0.5 * (1.0 - p) * (1.0 - p)))));
        order_ok = order_ok && blue > green && green >= 1.0;
        ++rows;
    }
    in.close();
    std::remove(path.c_str());
    pass = pass && rows == cfg.n_points && worst <= 1e-9 && order_ok &&
           std::abs(first_blue - 2.0) <= 1e-3 && std::abs(first_green - 1.0) <= 1e-3;
    report(4, "regime curves", pass,
           "pointwise gap=" + fmt(worst) + ", limits at p=1e-4: blue=" + fmt(first_blue) +
               " green=" + fmt(first_green),
           timer.seconds());
}

// --- criterion 5: Hoeffding cluster count -----------------------------------
void criterion_cluster_count() {
    Timer timer;
    double bound = cluster_count_bound(50, 0.2);
    bool pass = true;
    std::string detail = "bound=" + fmt(bound);
    std::vector<std::pair<std::string, SamplingDistribution>> dists;
    dists.emplace_back("geometric", SamplingDistribution::truncated_geometric(0.5, 8));
    dists.emplace_back("poisson", SamplingDistribution::truncated_poisson(1.5, 8));
    for (std::size_t i = 0; i < dists.size(); ++i) {
        ClusterCountConfig cfg{.m = 50,
                               .epsilon = 0.2,
                               .dist = dists[i].second,
                               .trials = 10000,
                               .seed = 505 + i,
                               .threads = 0};
        auto res = run_cluster_count(cfg);
        pass = pass && res.violation_freq <= bound;
        detail += ", " + dists[i].first + "=" + fmt(res.violation_freq);
    }
    report(5, "Hoeffding cluster count", pass, detail, timer.seconds());
}

// --- criterion 6: incorrect-edge scaling ------------------------------------
void criterion_edge_scaling() {
    Timer timer;
    Lemma2Config cfg{.m_values = {8, 16, 32, 64},
                     .p = 0.1,
                     .beta = 2.0,  // gamma ~ 1.498
                     .dist = SamplingDistribution::truncated_poisson(0.9, 6),
                     .trials = 500,
                     .seed = 606,
                     .threads = 0};
    auto rows = run_lemma2(cfg);
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        pass = pass && r.p95_incorrect < r.p95_bound && r.mean_correct <= r.correct_bound;
        if (!detail.empty()) detail += ", ";
        detail += "M=" + std::to_string(r.m) + ": p95(Z)=" + fmt(r.p95_incorrect) + "<" + fmt(r.p95_bound);
    }
    report(6, "incorrect-edge scaling", pass, detail, timer.seconds());
}

// --- criterion 7: clustering enumeration bound ------------------------------
std::string clustering_key(const Clustering& c) {
    Clustering canon = c.canonical();
    std::ostringstream os;
    for (const auto& g : canon.groups) {
        for (std::size_t i : g) os << i << ',';
        os << '|';
    }
    return os.str();
}

void criterion_clustering_bound() {
    Timer timer;
    bool pass = true;
    int instances_checked = 0;
    int membership_checked = 0;
    for (int instance = 0; instance < 200; ++instance) {
        std::size_t m = 4 + instance % 3;
        double p = (instance % 2 == 0) ? 0.2 : 0.3;
        auto params = ChannelParams::from_lengths(m, 16, p);
        auto dist = SamplingDistribution::truncated_poisson(1.2, 4);
        Rng rng(derive_seed(707, static_cast<std::uint64_t>(instance)));
        std::vector<Strand> input;
        for (std::size_t i = 0; i < m; ++i) input.push_back(Strand::random(16, rng));
        ReadPool pool = transmit(input, params, dist, rng);
        ConsistencyGraph g = build_graph(pool.view());
        if (g.edge_count > 20) continue;
        ++instances_checked;

        double eps = 0.35;
        auto k_min = static_cast<std::size_t>(std::max(1.0, std::ceil((1.0 - dist.q0() - eps) * m - 1e-9)));
        auto k_max = std::min(m, static_cast<std::size_t>(std::floor((1.0 - dist.q0() + eps) * m + 1e-9)));
        if (k_max < k_min) continue;
        auto all = collect_clusterings(g, k_min, k_max);
        pass = pass && all.size() <= (std::size_t{1} << g.edge_count);

        std::set<std::string> keys;
        for (const auto& c : all) {
            pass = pass && is_valid_clustering(g, c);
            keys.insert(clustering_key(c));
        }
        pass = pass && keys.size() == all.size();

        if (pool.reads.empty()) continue;
        Clustering truth = true_clustering(pool);
        if (truth.group_count() >= k_min && truth.group_count() <= k_max) {
            pass = pass && keys.count(clustering_key(truth)) == 1;
            ++membership_checked;
        }
    }
    pass = pass && instances_checked >= 150 && membership_checked >= 100;
    report(7, "clustering enumeration bound", pass,
           "instances=" + std::to_string(instances_checked) +
               " truth-membership checks=" + std::to_string(membership_checked),
           timer.seconds());
}

// --- criterion 8: F2 kernel vs enumeration ----------------------------------
void criterion_gf2_oracle() {
    Timer timer;
    bool pass = true;
    for (std::size_t rows = 1; rows <= 3 && pass; ++rows) {
        for (std::size_t cols = 1; cols <= 3 && pass; ++cols) {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (rows * cols)) && pass; ++mask) {
                BitMatrix a = oracle::matrix_from_mask(mask, rows, cols);
                pass = pass && rank(a) == oracle::rank_by_span(a);
                for (std::uint32_t ymask = 0; ymask < (1u << rows) && pass; ++ymask) {
                    BitVector y = oracle::vector_from_mask(ymask, rows);
                    SolveReport rep = solve(a, y);
                    oracle::EnumSolve ref = oracle::solve_by_enumeration(a, y);
                    if (ref.solutions == 0) {
                        pass = rep.status == SolveStatus::Inconsistent;
                    } else if (ref.solutions == 1) {
                        pass = rep.status == SolveStatus::Unique && *rep.witness == *ref.first;
                    } else {
                        pass = rep.status == SolveStatus::Multiple &&
                               oracle::naive_mat_vec(a, *rep.witness) == y;
                    }
                }
            }
        }
    }
    Rng rng(808);
    for (int i = 0; i < 1000 && pass; ++i) {
        BitMatrix a = random_matrix(4, 4, rng);
        pass = pass && rank(a) == oracle::rank_by_span(a);
        BitVector y = random_vector(4, rng);
        SolveReport rep = solve(a, y);
        oracle::EnumSolve ref = oracle::solve_by_enumeration(a, y);
        if (ref.solutions == 0) {
            pass = pass && rep.status == SolveStatus::Inconsistent;
        } else if (ref.solutions == 1) {
            pass = pass && rep.status == SolveStatus::Unique && *rep.witness == *ref.first;
        } else {
            pass = pass && rep.status == SolveStatus::Multiple && oracle::naive_mat_vec(a, *rep.witness) == y;
        }
    }
    report(8, "F2 kernel vs enumeration", pass, "all matrices to 3x3 plus 1000 random 4x4", timer.seconds());
}

// --- criterion 9: end-to-end decoding ---------------------------------------
void criterion_end_to_end() {
    Timer timer;
    double beta = 24.0 / std::log2(6.0);
    double cap = 1.0 - 0.1 - 1.0 / beta;  // q1 = 1, so capacity = 1 - p - 1/beta
    E2eSweepConfig cfg{.m = 6,
                       .l = 24,
                       .p = 0.1,
                       .dist = SamplingDistribution::constant(1),
                       .rates = {0.6 * cap, 1.2 * cap},
                       .num_messages = 16,
                       .trials = 200,
                       .seed = 909,
                       .epsilon = 0.05,
                       .budget = 1000000};
    auto result = run_e2e_sweep(cfg);
    const auto& below = result.summaries[0];
    const auto& above = result.summaries[1];
    double secs = timer.seconds();
    bool pass = below.genie_error_rate <= 0.05 && below.error_rate <= 0.10 &&
                below.exhaustive_trials == cfg.trials && below.budget_exhausted == 0 &&
                below.agreement_violations == 0 && above.agreement_violations == 0 &&
                above.error_rate > below.error_rate && above.genie_error_rate > below.genie_error_rate &&
                secs < 600.0;
    report(9, "end-to-end decoding", pass,
           "below: genie=" + fmt(below.genie_error_rate) + " exhaustive=" + fmt(below.error_rate) +
               "; above: genie=" + fmt(above.genie_error_rate) + " exhaustive=" + fmt(above.error_rate),
           secs);
}

// --- criterion 10: consensus gain -------------------------------------------
void criterion_consensus_gain() {
    Timer timer;
    const double p = 0.3;
    auto params = ChannelParams::from_lengths(64, 32, p);
    auto dist = SamplingDistribution::constant(2);
    std::size_t erased = 0;
    std::size_t total = 0;
    Rng rng(1010);
    while (total < 100000) {
        std::vector<Strand> input;
        for (std::size_t i = 0; i < 64; ++i) input.push_back(Strand::random(32, rng));
        ReadPool pool = transmit(input, params, dist, rng);
        Clustering truth = true_clustering(pool);
        for (const auto& group : truth.groups) {
            Strand merged = consensus(pool.view(), group);
            erased += merged.erasure_count();
            total += merged.len();
        }
    }
    double rate = static_cast<double>(erased) / static_cast<double>(total);
    double expect = p * p;
    double sigma = std::sqrt(expect * (1.0 - expect) / static_cast<double>(total));
    bool pass = std::abs(rate - expect) <= 3.0 * sigma;
    report(10, "consensus gain", pass,
           "residual=" + fmt(rate) + " target=" + fmt(expect) + " (" + fmt(std::abs(rate - expect) / sigma) +
               " sigma over " + std::to_string(total) + " symbols)",
           timer.seconds());
}

}  // namespace

int main() {
    Timer total;
    criterion_full_rank();
    criterion_pair_consistency();
    criterion_capacity_identities();
    criterion_regime_curves();
    criterion_cluster_count();
    criterion_edge_scaling();
    criterion_clustering_bound();
    criterion_gf2_oracle();
    criterion_end_to_end();
    criterion_consensus_gain();
    std::printf("%d/10 criteria passed (%.1fs total)\n", 10 - g_failures, total.seconds());
    return g_failures == 0 ? 0 : 1;
}
