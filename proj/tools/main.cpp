// Command-line driver for the multi-draw BEC shuffling-sampling channel lab:
// closed-form capacity queries, boundary-curve export, and seeded Monte Carlo
// campaigns for the full-rank, edge-count, cluster-count and end-to-end
// decoding experiments. Tabular results go to CSV, single reports to JSON.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multidraw/config.hpp"
#include "multidraw/experiments.hpp"

namespace {

using nlohmann::json;

multidraw::SamplingDistribution dist_from_arg(const std::string& arg, const std::string& where) {
    if (!arg.empty() && arg.front() == '{') return multidraw::parse_sampling_distribution(arg, where);
    return multidraw::parse_sampling_distribution(multidraw::load_json_file(arg), where);
}

json report_to_json(const multidraw::CapacityReport& r) {
    return json{{"p", r.p},
                {"beta", r.beta},
                {"q0", r.q0},
                {"p_eff", r.p_eff},
                {"conditional_bec_capacity", r.conditional_bec_capacity},
                {"capacity_conditional_form", r.capacity_conditional_form},
                {"capacity_p_eff_form", r.capacity_p_eff_form},
                {"capacity", r.capacity},
                {"gamma", r.gamma},
                {"regime", multidraw::to_string(r.regime_label)}};
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path);
    out << j.dump(2) << "\n";
}

// Fetch a config-file value unless the flag was given on the command line.
template <typename T>
void maybe_from_config(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (opt != nullptr && opt->count() > 0) return;
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation lab for the BEC multi-draw shuffling-sampling channel"};
    app.require_subcommand(1);

    // ---- capacity ----------------------------------------------------------
    auto* cap = app.add_subcommand("capacity", "Closed-form capacity, p_eff, gamma and regime for one point");
    struct {
        double p = 0.0;
        double beta = 2.0;
        std::string dist = R"({"family":"bernoulli","q0":0.0})";
        std::string config;
        std::string out;
    } cap_args;
    auto* cap_p = cap->add_option("--p", cap_args.p, "Erasure probability in [0,1)");
    auto* cap_beta = cap->add_option("--beta", cap_args.beta, "Normalized strand length L/log2(M)");
    auto* cap_dist = cap->add_option("--dist", cap_args.dist, "Sampling distribution (JSON object or file path)");
    cap->add_option("--config", cap_args.config, "JSON config file with p, beta, dist");
    cap->add_option("--out", cap_args.out, "Write the JSON report here instead of stdout");

    // ---- regime-curves -----------------------------------------------------
    auto* curves = app.add_subcommand("regime-curves", "Export the blue/green boundary curves as CSV");
    struct {
        multidraw::RegimeCurvesConfig cfg;
        std::string config;
        std::string out = "regime_curves.csv";
    } curve_args;
    auto* cu_pmin = curves->add_option("--p-min", curve_args.cfg.p_min, "Smallest p on the log-spaced grid");
    auto* cu_pmax = curves->add_option("--p-max", curve_args.cfg.p_max, "Largest p on the log-spaced grid");
    auto* cu_n = curves->add_option("--points", curve_args.cfg.n_points, "Number of grid points");
    curves->add_option("--config", curve_args.config, "JSON config file");
    curves->add_option("--out", curve_args.out, "Output CSV path");

    // ---- lemma1 ------------------------------------------------------------
    auto* lem1 = app.add_subcommand("lemma1", "Monte Carlo full-rank probability of random F2 matrices vs exact");
    struct {
        multidraw::Lemma1Config cfg;
        std::string config;
        std::string out = "lemma1.csv";
    } l1_args;
    auto* l1_b = lem1->add_option("--B", l1_args.cfg.b_values, "Matrix widths B")->delimiter(',');
    auto* l1_d = lem1->add_option("--delta", l1_args.cfg.deltas, "Row-removal fractions delta")->delimiter(',');
    auto* l1_t = lem1->add_option("--trials", l1_args.cfg.trials, "Trials per (B, delta) cell");
    auto* l1_s = lem1->add_option("--seed", l1_args.cfg.seed, "Root seed");
    auto* l1_th = lem1->add_option("--threads", l1_args.cfg.threads, "Worker threads (0 = auto)");
    lem1->add_option("--config", l1_args.config, "JSON config file");
    lem1->add_option("--out", l1_args.out, "Output CSV path");

    // ---- lemma2 ------------------------------------------------------------
    auto* lem2 = app.add_subcommand("lemma2", "Consistency-graph edge statistics across strand counts");
    struct {
        std::vector<std::size_t> m_values{8, 16, 32, 64};
        double p = 0.1;
        double beta = 2.0;
        std::string dist = R"({"family":"poisson","lambda":0.9,"nmax":6})";
        std::size_t trials = 500;
        std::uint64_t seed = 1;
        unsigned threads = 0;
        std::string config;
        std::string out = "lemma2.csv";
    } l2_args;
    auto* l2_m = lem2->add_option("--M", l2_args.m_values, "Strand counts M")->delimiter(',');
    auto* l2_p = lem2->add_option("--p", l2_args.p, "Erasure probability");
    auto* l2_beta = lem2->add_option("--beta", l2_args.beta, "Normalized strand length");
    auto* l2_dist = lem2->add_option("--dist", l2_args.dist, "Sampling distribution (JSON object or file path)");
    auto* l2_t = lem2->add_option("--trials", l2_args.trials, "Trials per M");
    auto* l2_s = lem2->add_option("--seed", l2_args.seed, "Root seed");
    auto* l2_th = lem2->add_option("--threads", l2_args.threads, "Worker threads (0 = auto)");
    lem2->add_option("--config", l2_args.config, "JSON config file");
    lem2->add_option("--out", l2_args.out, "Output CSV path");

    // ---- pair-consistency --------------------------------------------------
    auto* pair = app.add_subcommand("pair-consistency", "Empirical pairwise consistency vs (1-(1-p)^2/2)^L");
    struct {
        multidraw::PairConsistencyConfig cfg;
        std::string config;
        std::string out = "pair_consistency.csv";
    } pc_args;
    auto* pc_p = pair->add_option("--p", pc_args.cfg.p_values, "Erasure probabilities")->delimiter(',');
    auto* pc_l = pair->add_option("--L", pc_args.cfg.l_values, "Strand lengths")->delimiter(',');
    auto* pc_t = pair->add_option("--trials", pc_args.cfg.pairs, "Strand pairs per cell");
    auto* pc_s = pair->add_option("--seed", pc_args.cfg.seed, "Root seed");
    auto* pc_th = pair->add_option("--threads", pc_args.cfg.threads, "Worker threads (0 = auto)");
    pair->add_option("--config", pc_args.config, "JSON config file");
    pair->add_option("--out", pc_args.out, "Output CSV path");

    // ---- cluster-count -----------------------------------------------------
    auto* ccount = app.add_subcommand("cluster-count", "Hoeffding check on the nonempty-cluster count");
    struct {
        std::size_t m = 50;
        double epsilon = 0.2;
        std::string dist = R"({"family":"geometric","r":0.5,"nmax":8})";
        std::size_t trials = 10000;
        std::uint64_t seed = 1;
        unsigned threads = 0;
        std::string config;
        std::string out = "cluster_count.csv";
    } cc_args;
    auto* cc_m = ccount->add_option("--M", cc_args.m, "Strand count M");
    auto* cc_e = ccount->add_option("--epsilon", cc_args.epsilon, "Deviation fraction epsilon");
    auto* cc_dist = ccount->add_option("--dist", cc_args.dist, "Sampling distribution (JSON object or file path)");
    auto* cc_t = ccount->add_option("--trials", cc_args.trials, "Trials");
    auto* cc_s = ccount->add_option("--seed", cc_args.seed, "Root seed");
    auto* cc_th = ccount->add_option("--threads", cc_args.threads, "Worker threads (0 = auto)");
    ccount->add_option("--config", cc_args.config, "JSON config file");
    ccount->add_option("--out", cc_args.out, "Output CSV path");

    // ---- simulate ----------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "End-to-end rate sweep with genie and exhaustive decoders");
    struct {
        std::string config;
        std::string out;
        std::string trials_out;
        std::optional<std::size_t> trials;
        std::optional<std::uint64_t> seed;
        std::optional<std::uint64_t> budget;
        bool first_hit = false;
        std::optional<unsigned> threads;
    } sim_args;
    sim->add_option("--config", sim_args.config, "JSON config file (required)")->required();
    sim->add_option("--out", sim_args.out, "Summary CSV path (overrides config)");
    sim->add_option("--trials-out", sim_args.trials_out, "Per-trial CSV path (overrides config)");
    sim->add_option("--trials", sim_args.trials, "Trials per rate point (overrides config)");
    sim->add_option("--seed", sim_args.seed, "Root seed (overrides config)");
    sim->add_option("--budget", sim_args.budget, "Max systems tried per exhaustive decode (overrides config)");
    sim->add_flag("--first-hit", sim_args.first_hit, "Stop each exhaustive decode at the first decoded message");
    sim->add_option("--threads", sim_args.threads, "Worker threads (0 = auto, overrides config)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cap->parsed()) {
            json cfg = json::object();
            if (!cap_args.config.empty()) cfg = multidraw::load_json_file(cap_args.config);
            maybe_from_config(cfg, "p", cap_p, cap_args.p);
            maybe_from_config(cfg, "beta", cap_beta, cap_args.beta);
            multidraw::SamplingDistribution dist =
                (cap_dist->count() == 0 && cfg.contains("dist"))
                    ? multidraw::parse_sampling_distribution(cfg.at("dist"))
                    : dist_from_arg(cap_args.dist, "dist");
            auto report = multidraw::run_capacity_query(cap_args.p, cap_args.beta, dist);
            emit(report_to_json(report), cap_args.out);
        } else if (curves->parsed()) {
            json cfg = json::object();
            if (!curve_args.config.empty()) cfg = multidraw::load_json_file(curve_args.config);
            maybe_from_config(cfg, "p_min", cu_pmin, curve_args.cfg.p_min);
            maybe_from_config(cfg, "p_max", cu_pmax, curve_args.cfg.p_max);
            maybe_from_config(cfg, "points", cu_n, curve_args.cfg.n_points);
            if (cfg.contains("out") && curve_args.out == "regime_curves.csv") curve_args.out = cfg.at("out");
            multidraw::run_regime_curves(curve_args.cfg, curve_args.out);
        } else if (lem1->parsed()) {
            json cfg = json::object();
            if (!l1_args.config.empty()) cfg = multidraw::load_json_file(l1_args.config);
            maybe_from_config(cfg, "B", l1_b, l1_args.cfg.b_values);
            maybe_from_config(cfg, "delta", l1_d, l1_args.cfg.deltas);
            maybe_from_config(cfg, "trials", l1_t, l1_args.cfg.trials);
            maybe_from_config(cfg, "seed", l1_s, l1_args.cfg.seed);
            maybe_from_config(cfg, "threads", l1_th, l1_args.cfg.threads);
            multidraw::write_lemma1_csv(multidraw::run_lemma1(l1_args.cfg), l1_args.out);
        } else if (lem2->parsed()) {
            json cfg = json::object();
            if (!l2_args.config.empty()) cfg = multidraw::load_json_file(l2_args.config);
            maybe_from_config(cfg, "M", l2_m, l2_args.m_values);
            maybe_from_config(cfg, "p", l2_p, l2_args.p);
            maybe_from_config(cfg, "beta", l2_beta, l2_args.beta);
            maybe_from_config(cfg, "trials", l2_t, l2_args.trials);
            maybe_from_config(cfg, "seed", l2_s, l2_args.seed);
            maybe_from_config(cfg, "threads", l2_th, l2_args.threads);
            multidraw::SamplingDistribution dist =
                (l2_dist->count() == 0 && cfg.contains("dist"))
                    ? multidraw::parse_sampling_distribution(cfg.at("dist"))
                    : dist_from_arg(l2_args.dist, "dist");
            multidraw::Lemma2Config lcfg{l2_args.m_values, l2_args.p,     l2_args.beta,   dist,
                                         l2_args.trials,   l2_args.seed,  l2_args.threads};
            multidraw::write_lemma2_csv(multidraw::run_lemma2(lcfg), l2_args.out);
        } else if (pair->parsed()) {
            json cfg = json::object();
            if (!pc_args.config.empty()) cfg = multidraw::load_json_file(pc_args.config);
            maybe_from_config(cfg, "p", pc_p, pc_args.cfg.p_values);
            maybe_from_config(cfg, "L", pc_l, pc_args.cfg.l_values);
            maybe_from_config(cfg, "trials", pc_t, pc_args.cfg.pairs);
            maybe_from_config(cfg, "seed", pc_s, pc_args.cfg.seed);
            maybe_from_config(cfg, "threads", pc_th, pc_args.cfg.threads);
            multidraw::write_pair_consistency_csv(multidraw::run_pair_consistency(pc_args.cfg), pc_args.out);
        } else if (ccount->parsed()) {
            json cfg = json::object();
            if (!cc_args.config.empty()) cfg = multidraw::load_json_file(cc_args.config);
            maybe_from_config(cfg, "M", cc_m, cc_args.m);
            maybe_from_config(cfg, "epsilon", cc_e, cc_args.epsilon);
            maybe_from_config(cfg, "trials", cc_t, cc_args.trials);
            maybe_from_config(cfg, "seed", cc_s, cc_args.seed);
            maybe_from_config(cfg, "threads", cc_th, cc_args.threads);
            multidraw::SamplingDistribution dist =
                (cc_dist->count() == 0 && cfg.contains("dist"))
                    ? multidraw::parse_sampling_distribution(cfg.at("dist"))
                    : dist_from_arg(cc_args.dist, "dist");
            multidraw::ClusterCountConfig ccfg{cc_args.m, cc_args.epsilon, dist, cc_args.trials, cc_args.seed,
                                               cc_args.threads};
            multidraw::write_cluster_count_csv({multidraw::run_cluster_count(ccfg)}, cc_args.out);
        } else if (sim->parsed()) {
            json cfg = multidraw::load_json_file(sim_args.config);
            if (!cfg.contains("dist")) throw multidraw::ConfigError(sim_args.config + ":dist", "missing \"dist\"");
            if (!cfg.contains("rates")) throw multidraw::ConfigError(sim_args.config + ":rates", "missing \"rates\"");
            if (!cfg.contains("M")) throw multidraw::ConfigError(sim_args.config + ":M", "missing \"M\"");
            auto m = cfg.at("M").get<std::size_t>();
            std::size_t l = 0;
            if (cfg.contains("L")) {
                l = cfg.at("L").get<std::size_t>();
            } else if (cfg.contains("beta")) {
                l = static_cast<std::size_t>(
                    std::llround(cfg.at("beta").get<double>() * std::log2(static_cast<double>(m))));
            } else {
                throw multidraw::ConfigError(sim_args.config + ":L", "need \"L\" or \"beta\"");
            }
            multidraw::E2eSweepConfig ecfg{
                m,
                l,
                cfg.value("p", 0.0),
                multidraw::parse_sampling_distribution(cfg.at("dist")),
                cfg.at("rates").get<std::vector<double>>(),
                cfg.value("num_messages", std::size_t{16}),
                sim_args.trials.value_or(cfg.value("trials", std::size_t{100})),
                sim_args.seed.value_or(cfg.value("seed", std::uint64_t{1})),
                cfg.value("epsilon", 0.05),
                sim_args.budget.value_or(cfg.value("budget", std::uint64_t{0})),
                sim_args.first_hit || cfg.value("first_hit", false),
                cfg.value("max_exhaustive_m", std::size_t{8}),
                cfg.value("max_exhaustive_pool", std::size_t{16}),
                sim_args.threads.value_or(cfg.value("threads", 0u)),
            };
            std::string out = !sim_args.out.empty() ? sim_args.out : cfg.value("out", std::string("e2e_sweep.csv"));
            std::string trials_out =
                !sim_args.trials_out.empty() ? sim_args.trials_out : cfg.value("trials_out", out + ".trials.csv");
            auto result = multidraw::run_e2e_sweep(ecfg);
            multidraw::write_e2e_summary_csv(result, out);
            multidraw::write_e2e_trials_csv(result, trials_out);
        }
    } catch (const multidraw::ConfigError& e) {
        std::cerr << json{{"error", e.what()}, {"where", e.where()}}.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
