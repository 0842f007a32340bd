// gfldpc command-line driver: reproducible experiments on coset GF(q) LDPC
// codes. Every command reads a JSON config, derives all randomness from the
// seed, and writes machine-readable CSV/JSON outputs stamped with the config
// hash.

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "gfldpc/decoder.hpp"
#include "gfldpc/density_evolution.hpp"
#include "gfldpc/ensemble.hpp"
#include "gfldpc/exit_chart.hpp"
#include "gfldpc/gf.hpp"
#include "gfldpc/modulation.hpp"
#include "gfldpc/serialize.hpp"
#include "gfldpc/simplex.hpp"

namespace fs = std::filesystem;
using namespace gfldpc;

namespace {

struct Experiment {
    json config;
    std::uint64_t seed = 0;
    int q = 0;
    int workers = 1;
    std::string out_dir = ".";
    std::string meta;

    std::optional<std::vector<std::pair<int, double>>> lambda_pairs, rho_pairs;
    std::optional<Mapping> mapping;
    std::optional<ChannelModel> channel;
    double snr_db = 0.0;
    bool snr_given = false;
    json run = json::object();
};

std::vector<std::pair<int, double>> parse_pairs(const json& j, const std::string& what) {
    if (!j.is_array()) throw ConfigError(what + ": expected an array of [degree, fraction] pairs");
    std::vector<std::pair<int, double>> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(what + ": entries are [degree, fraction]");
        out.emplace_back(e[0].get<int>(), e[1].get<double>());
    }
    return out;
}

Mapping parse_mapping(const json& j, int q) {
    require_keys(j, {"kind", "counts", "points"}, "mapping");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "nonuniform") return nonuniform_constellation(q);
    if (kind == "pam") return pam_constellation(q);
    if (kind == "quantization") {
        std::vector<std::pair<int, int>> counts;
        for (const auto& e : j.at("counts")) {
            if (!e.is_array() || e.size() != 2) throw ConfigError("mapping: counts entries are [symbol, count]");
            counts.emplace_back(e[0].get<int>(), e[1].get<int>());
        }
        return quantization_mapping(q, counts);
    }
    if (kind == "explicit") {
        auto pts = j.at("points").get<std::vector<double>>();
        if (static_cast<int>(pts.size()) != q) throw ConfigError("mapping: explicit points must have q entries");
        return explicit_mapping(std::move(pts));
    }
    throw ConfigError("mapping: unknown kind '" + kind + "'");
}

ChannelModel parse_channel(const json& j, const Mapping* map, double* snr_db_out, bool* snr_given) {
    require_keys(j, {"kind", "sigma_z", "snr_db", "file", "transition"}, "channel");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "awgn") {
        if (j.contains("sigma_z")) return ChannelModel::awgn(j.at("sigma_z").get<double>());
        if (!j.contains("snr_db")) throw ConfigError("channel: awgn needs sigma_z or snr_db");
        if (map == nullptr || !map->is_signal()) throw ConfigError("channel: snr_db needs a signal mapping");
        const double snr = j.at("snr_db").get<double>();
        if (snr_db_out) *snr_db_out = snr;
        if (snr_given) *snr_given = true;
        return ChannelModel::awgn(sigma_for_snr_db(*map, snr));
    }
    if (kind == "dmc") {
        if (j.contains("file")) return dmc_from_json(load_json_file(j.at("file").get<std::string>()));
        if (j.contains("transition")) return ChannelModel::dmc(j.at("transition").get<std::vector<std::vector<double>>>());
        throw ConfigError("channel: dmc needs file or transition");
    }
    throw ConfigError("channel: unknown kind '" + kind + "'");
}

Experiment load_experiment(const std::string& path, std::optional<std::uint64_t> seed_override, int workers,
                           const std::string& out_override, std::optional<int> method_override,
                           const std::string& command) {
    Experiment ex;
    ex.config = load_json_file(path);
    require_keys(ex.config, {"seed", "q", "lambda", "rho", "mapping", "channel", "run", "out"}, "config");
    if (seed_override)
        ex.seed = *seed_override;
    else if (ex.config.contains("seed"))
        ex.seed = ex.config.at("seed").get<std::uint64_t>();
    else
        throw ConfigError("config: seed is required (config key or --seed)");
    ex.workers = workers > 0 ? workers : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (ex.config.contains("q")) {
        ex.q = ex.config.at("q").get<int>();
        FieldSpec::make(ex.q);  // reject non-prime-power orders up front
    }
    if (ex.config.contains("lambda")) ex.lambda_pairs = parse_pairs(ex.config.at("lambda"), "lambda");
    if (ex.config.contains("rho")) ex.rho_pairs = parse_pairs(ex.config.at("rho"), "rho");
    if (ex.config.contains("mapping")) {
        if (ex.q <= 0) throw ConfigError("config: mapping needs q");
        ex.mapping = parse_mapping(ex.config.at("mapping"), ex.q);
    }
    if (ex.config.contains("channel"))
        ex.channel = parse_channel(ex.config.at("channel"), ex.mapping ? &*ex.mapping : nullptr, &ex.snr_db,
                                   &ex.snr_given);
    if (ex.config.contains("run")) ex.run = ex.config.at("run");
    if (!out_override.empty())
        ex.out_dir = out_override;
    else if (ex.config.contains("out"))
        ex.out_dir = ex.config.at("out").get<std::string>();
    // --method only means something to commands with an EXIT-method choice
    if (method_override && command != "capacity") ex.run["method"] = *method_override;
    fs::create_directories(ex.out_dir);

    char buf[128];
    std::snprintf(buf, sizeof buf, "gfldpc %s seed=%llu config=%016llx workers=%d", command.c_str(),
                  static_cast<unsigned long long>(ex.seed),
                  static_cast<unsigned long long>(fnv1a64(ex.config.dump())), ex.workers);
    ex.meta = buf;
    return ex;
}

DegreeDist degree_dist(const Experiment& ex) {
    if (!ex.lambda_pairs || !ex.rho_pairs) throw ConfigError("config: lambda and rho are required");
    return DegreeDist(*ex.lambda_pairs, *ex.rho_pairs);
}

double run_get(const json& run, const std::string& key, double dflt) {
    return run.contains(key) ? run.at(key).get<double>() : dflt;
}

int run_get_int(const json& run, const std::string& key, int dflt) {
    return run.contains(key) ? run.at(key).get<int>() : dflt;
}

ExitParams exit_params_from_run(const json& run) {
    ExitParams p;
    p.j.grid_points = run_get_int(run, "j_grid_points", p.j.grid_points);
    p.j.samples = run_get_int(run, "j_samples", p.j.samples);
    p.jr = p.j;
    p.jr.samples = run_get_int(run, "jr_samples", p.j.samples);
    p.cnd_grid_points = run_get_int(run, "cnd_grid_points", p.cnd_grid_points);
    p.cnd_samples = run_get_int(run, "cnd_samples", p.cnd_samples);
    p.design_grid_step = run_get(run, "design_grid_step", p.design_grid_step);
    p.tunnel_grid_step = run_get(run, "tunnel_grid_step", p.tunnel_grid_step);
    return p;
}

EpsProfile eps_from_run(const json& run) {
    if (!run.contains("eps_profile")) return EpsProfile::reference();
    EpsProfile p;
    p.steps.clear();
    for (const auto& e : run.at("eps_profile")) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("run: eps_profile entries are [upper_bound, eps]");
        p.steps.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
    return p;
}

// ---------------------------------------------------------------------------

int cmd_capacity(const Experiment& ex) {
    if (!ex.mapping) throw ConfigError("capacity: mapping required");
    require_keys(ex.run, {"snr_grid_db", "targets_bits", "unconstrained_bits"}, "run");
    const Mapping& map = *ex.mapping;

    CsvWriter csv(ex.out_dir + "/capacity.csv", ex.meta);
    csv.header({"snr_db", "c_bits"});
    if (ex.run.contains("snr_grid_db")) {
        const auto grid = ex.run.at("snr_grid_db").get<std::vector<double>>();
        for (double snr : grid)
            csv.row(snr, equiprobable_capacity(ChannelModel::awgn(sigma_for_snr_db(map, snr)), map));
    }

    CsvWriter lim(ex.out_dir + "/limits.csv", ex.meta);
    lim.header({"kind", "bits_per_use", "snr_db"});
    if (ex.run.contains("targets_bits"))
        for (double bits : ex.run.at("targets_bits").get<std::vector<double>>())
            lim.row("equiprobable", bits, snr_for_capacity(map, bits));
    if (ex.run.contains("unconstrained_bits"))
        for (double bits : ex.run.at("unconstrained_bits").get<std::vector<double>>())
            lim.row("unconstrained", bits, unconstrained_limit(bits));

    json mj = mapping_to_json(map);
    mj["_meta"] = ex.meta;
    std::ofstream(ex.out_dir + "/mapping.json") << mj.dump(2) << "\n";
    return 0;
}

struct TrialStats {
    long long symbol_errors = 0;
    long long iterations = 0;
    bool decoded = false;
};

int cmd_simulate(const Experiment& ex) {
    if (!ex.mapping || !ex.channel) throw ConfigError("simulate: mapping and channel required");
    require_keys(ex.run,
                 {"n_symbols", "trials", "max_iters", "early_stop", "mode", "check_method", "snr_grid_db", "method"},
                 "run");
    const FieldSpec fsq = FieldSpec::make(ex.q);
    const DegreeDist dd = degree_dist(ex);
    const int n_symbols = run_get_int(ex.run, "n_symbols", 1000);
    const int trials = run_get_int(ex.run, "trials", 10);
    const std::string mode = ex.run.contains("mode") ? ex.run.at("mode").get<std::string>() : "all_zero";
    if (mode != "all_zero" && mode != "encoded") throw ConfigError("simulate: mode is all_zero or encoded");

    BpOptions opt;
    opt.max_iters = run_get_int(ex.run, "max_iters", 200);
    opt.early_stop = ex.run.contains("early_stop") ? ex.run.at("early_stop").get<bool>() : true;
    if (ex.run.contains("check_method"))
        opt.method = ex.run.at("check_method").get<std::string>() == "naive" ? CheckMethod::naive : CheckMethod::dft;

    std::vector<double> snrs;
    if (ex.run.contains("snr_grid_db"))
        snrs = ex.run.at("snr_grid_db").get<std::vector<double>>();
    else
        snrs.push_back(ex.snr_given ? ex.snr_db : snr_db_for_sigma(*ex.mapping, ex.channel->sigma_z));

    const long long E = static_cast<long long>(std::llround(n_symbols / dd.lambda_inv_moment()));

    CsvWriter csv(ex.out_dir + "/simulate.csv", ex.meta);
    csv.header({"snr_db", "trials", "n_symbols", "symbol_errors", "ser", "avg_iterations", "decoded_trials"});

    for (double snr : snrs) {
        const ChannelModel chan = ex.channel->kind == ChannelModel::Kind::awgn
                                      ? ChannelModel::awgn(sigma_for_snr_db(*ex.mapping, snr))
                                      : *ex.channel;
        std::vector<TrialStats> stats(static_cast<std::size_t>(trials));
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (;;) {
                const int t = next.fetch_add(1);
                if (t >= trials) return;
                Rng rng = substream(ex.seed, 100000ULL * static_cast<std::uint64_t>(t) +
                                                 static_cast<std::uint64_t>(std::llround(snr * 100.0)));
                CosetCode code = sample_coset_code(fsq, dd, E, *ex.mapping, rng);
                const int n = code.graph.num_vars;
                std::vector<int> reference(static_cast<std::size_t>(n), 0);
                if (mode == "encoded") {
                    GfEncoder enc(fsq, code.graph);
                    std::vector<int> msg(static_cast<std::size_t>(enc.message_length()));
                    for (int& s : msg) s = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(ex.q)));
                    reference = enc.encode(msg);
                }
                std::vector<double> obs(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    obs[static_cast<std::size_t>(i)] = sample_channel_output(
                        chan, code.mapping,
                        fsq.add(reference[static_cast<std::size_t>(i)], code.coset[static_cast<std::size_t>(i)]), rng);
                const DecodeResult res = run_bp(fsq, code, obs, chan, opt, reference, rng);
                TrialStats& ts = stats[static_cast<std::size_t>(t)];
                ts.symbol_errors = res.errors_per_iter.back();
                ts.iterations = res.iterations;
                ts.decoded = res.syndrome_zero && res.errors_per_iter.back() == 0;
            }
        };
        std::vector<std::thread> pool;
        const int nw = std::min(ex.workers, trials);
        for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();

        long long errors = 0, iters = 0;
        int decoded = 0;
        for (const TrialStats& ts : stats) {
            errors += ts.symbol_errors;
            iters += ts.iterations;
            decoded += ts.decoded ? 1 : 0;
        }
        const long long total = static_cast<long long>(trials) * n_symbols;
        csv.row(snr, trials, n_symbols, errors, static_cast<double>(errors) / static_cast<double>(total),
                static_cast<double>(iters) / trials, decoded);
    }
    return 0;
}

int cmd_de(const Experiment& ex) {
    if (!ex.mapping || !ex.channel) throw ConfigError("de: mapping and channel required");
    require_keys(ex.run, {"samples", "iterations", "method"}, "run");
    const FieldSpec fsq = FieldSpec::make(ex.q);
    const DegreeDist dd = degree_dist(ex);
    DeParams params;
    params.n_samples = run_get_int(ex.run, "samples", 100000);
    params.iterations = run_get_int(ex.run, "iterations", 50);
    params.workers = ex.workers;
    const DeTrace trace = mc_density_evolution(fsq, dd, *ex.mapping, *ex.channel, params, ex.seed);

    CsvWriter csv(ex.out_dir + "/de.csv", ex.meta);
    csv.header({"iteration", "pe", "pe_stderr", "d", "i"});
    for (const DeTraceRow& r : trace.rows) csv.row(r.iteration, r.pe, r.pe_stderr, r.d, r.mi);
    return 0;
}

int cmd_exit(const Experiment& ex) {
    if (!ex.mapping || !ex.channel) throw ConfigError("exit: mapping and channel required");
    if (ex.channel->kind != ChannelModel::Kind::awgn) throw ConfigError("exit: AWGN channel required");
    require_keys(ex.run,
                 {"method", "curve_grid_step", "j_grid_points", "j_samples", "jr_samples", "cnd_grid_points",
                  "cnd_samples", "design_grid_step", "tunnel_grid_step"},
                 "run");
    const FieldSpec fsq = FieldSpec::make(ex.q);
    const DegreeDist dd = degree_dist(ex);
    const ExitMethod method = run_get_int(ex.run, "method", 2) == 1 ? ExitMethod::gaussian : ExitMethod::rightbound_model;
    ExitChart chart(fsq, *ex.mapping, ex.channel->sigma_z, method, exit_params_from_run(ex.run), ex.seed);

    const double step = run_get(ex.run, "curve_grid_step", 0.01);
    std::vector<int> left_degrees, right_degrees;
    for (std::size_t d = 2; d < dd.lambda.size(); ++d)
        if (dd.lambda[d] > 0.0) left_degrees.push_back(static_cast<int>(d));
    for (std::size_t d = 2; d < dd.rho.size(); ++d)
        if (dd.rho[d] > 0.0) right_degrees.push_back(static_cast<int>(d));

    {
        CsvWriter csv(ex.out_dir + "/exit_vnd.csv", ex.meta);
        std::vector<std::string> cols{"ia"};
        for (int d : left_degrees) cols.push_back("degree_" + std::to_string(d));
        cols.push_back("mixed");
        csv.header(cols);
        for (double ia = 0.0; ia <= 1.0 + 1e-12; ia += step) {
            std::ostringstream line;
            line.precision(12);
            line << ia;
            for (int d : left_degrees) line << "," << chart.vnd(ia, d);
            line << "," << chart.vnd_mixed(ia, dd);
            csv.row(line.str());
        }
    }
    {
        CsvWriter csv(ex.out_dir + "/exit_cnd.csv", ex.meta);
        std::vector<std::string> cols{"ia"};
        for (int d : right_degrees) cols.push_back("degree_" + std::to_string(d));
        cols.push_back("mixed");
        csv.header(cols);
        const double lo = method == ExitMethod::gaussian ? 0.0 : chart.i0();
        for (double ia = lo; ia <= 1.0 + 1e-12; ia += step) {
            std::ostringstream line;
            line.precision(12);
            line << ia;
            for (int d : right_degrees) line << "," << chart.cnd(ia, d);
            line << "," << chart.cnd_mixed(ia, dd);
            csv.row(line.str());
        }
    }

    const TunnelReport rep = chart.tunnel_open(dd);
    json fits{{"_meta", ex.meta},
              {"i0", chart.i0()},
              {"sigma_z", ex.channel->sigma_z},
              {"method", method == ExitMethod::gaussian ? 1 : 2},
              {"j_coefficients", chart.j_fit().coefficients()},
              {"tunnel_open", rep.open},
              {"tunnel_min_gap", rep.min_gap},
              {"tunnel_argmin", rep.argmin}};
    if (method == ExitMethod::rightbound_model) fits["jr_coefficients"] = chart.jr_fit().coefficients();
    std::ofstream(ex.out_dir + "/exit_fits.json") << fits.dump(2) << "\n";
    std::cout << (rep.open ? "tunnel open" : "tunnel closed") << " (min gap " << rep.min_gap << " at I=" << rep.argmin
              << ")\n";
    return 0;
}

int cmd_design(const Experiment& ex) {
    if (!ex.mapping || !ex.channel) throw ConfigError("design: mapping and channel required");
    if (ex.channel->kind != ChannelModel::Kind::awgn) throw ConfigError("design: AWGN channel required");
    require_keys(ex.run,
                 {"method", "design", "max_degree", "lp_iterations", "eps_profile", "j_grid_points", "j_samples",
                  "jr_samples", "cnd_grid_points", "cnd_samples", "design_grid_step", "tunnel_grid_step"},
                 "run");
    const FieldSpec fsq = FieldSpec::make(ex.q);
    const ExitMethod method = run_get_int(ex.run, "method", 2) == 1 ? ExitMethod::gaussian : ExitMethod::rightbound_model;
    ExitChart chart(fsq, *ex.mapping, ex.channel->sigma_z, method, exit_params_from_run(ex.run), ex.seed);
    const EpsProfile eps = eps_from_run(ex.run);
    const int max_degree = run_get_int(ex.run, "max_degree", 30);
    const int rounds = run_get_int(ex.run, "lp_iterations", 1);
    const std::string target = ex.run.contains("design") ? ex.run.at("design").get<std::string>() : "lambda";
    if (target != "lambda" && target != "rho" && target != "alternate")
        throw ConfigError("design: target is lambda, rho or alternate");

    std::vector<std::pair<int, double>> lam =
        ex.lambda_pairs ? *ex.lambda_pairs : std::vector<std::pair<int, double>>{};
    std::vector<std::pair<int, double>> rho = ex.rho_pairs ? *ex.rho_pairs : std::vector<std::pair<int, double>>{};

    auto to_dd_side = [](const std::vector<std::pair<int, double>>& pairs, bool left) {
        return left ? DegreeDist(pairs, {{2, 1.0}}) : DegreeDist({{2, 1.0}}, pairs);
    };

    json out;
    for (int round = 0; round < rounds; ++round) {
        if (target == "lambda" || target == "alternate") {
            if (rho.empty()) throw ConfigError("design: rho required to design lambda");
            const DesignResult r = chart.design_lambda(to_dd_side(rho, false), max_degree, eps);
            if (!r.feasible) {
                out = {{"_meta", ex.meta}, {"feasible", false}, {"most_violated_i", r.most_violated}};
                std::ofstream(ex.out_dir + "/design.json") << out.dump(2) << "\n";
                std::cerr << "design infeasible near I=" << r.most_violated << "\n";
                return 4;
            }
            lam = r.fractions;
        }
        if (target == "rho" || (target == "alternate" && round + 1 < rounds)) {
            if (lam.empty()) throw ConfigError("design: lambda required to design rho");
            const DesignResult r = chart.design_rho(to_dd_side(lam, true), max_degree, eps);
            if (!r.feasible) {
                out = {{"_meta", ex.meta}, {"feasible", false}, {"most_violated_i", r.most_violated}};
                std::ofstream(ex.out_dir + "/design.json") << out.dump(2) << "\n";
                std::cerr << "design infeasible near I=" << r.most_violated << "\n";
                return 4;
            }
            rho = r.fractions;
        }
    }

    out["_meta"] = ex.meta;
    out["feasible"] = true;
    json jl = json::array(), jr = json::array();
    for (const auto& [d, f] : lam) jl.push_back({d, f});
    for (const auto& [d, f] : rho) jr.push_back({d, f});
    out["lambda"] = jl;
    out["rho"] = jr;
    if (!lam.empty() && !rho.empty()) {
        const DegreeDist dd(lam, rho);
        out["design_rate"] = design_rate(dd);
        const TunnelReport rep = chart.tunnel_open(dd);
        out["tunnel_open"] = rep.open;
        out["tunnel_min_gap"] = rep.min_gap;
    }
    std::ofstream(ex.out_dir + "/design.json") << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_stability(const Experiment& ex) {
    if (!ex.mapping || !ex.channel) throw ConfigError("stability: mapping and channel required");
    require_keys(ex.run, {"method"}, "run");
    const DegreeDist dd = degree_dist(ex);
    const double delta = delta_param(*ex.channel, *ex.mapping);
    const double margin = stability_margin(dd, delta);
    json out{{"_meta", ex.meta},
             {"delta", delta},
             {"lambda_prime_0", dd.lambda_prime_at_0()},
             {"rho_prime_1", dd.rho_prime_at_1()},
             {"margin", margin},
             {"verdict", margin < 1.0 ? "stable" : "unstable"}};
    std::ofstream(ex.out_dir + "/stability.json") << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_field_check(int q) {
    const FieldSpec fsq = FieldSpec::make(q);
    const bool exhaustive = q <= 64;
    for (int a = 0; a < q; ++a) {
        if (fsq.add(a, fsq.neg(a)) != 0) throw std::runtime_error("field-check: additive inverse failed");
        if (a != 0 && fsq.mul(a, fsq.inv(a)) != 1) throw std::runtime_error("field-check: multiplicative inverse failed");
        if (fsq.from_digits(fsq.digits(a)) != a) throw std::runtime_error("field-check: digit round trip failed");
        for (int b = 0; b < q; ++b) {
            if (fsq.add(a, b) != fsq.add(b, a)) throw std::runtime_error("field-check: addition not commutative");
            if (fsq.mul(a, b) != fsq.mul(b, a)) throw std::runtime_error("field-check: multiplication not commutative");
            if (!exhaustive) continue;
            for (int c = 0; c < q; ++c) {
                if (fsq.mul(a, fsq.add(b, c)) != fsq.add(fsq.mul(a, b), fsq.mul(a, c)))
                    throw std::runtime_error("field-check: distributivity failed");
                if (fsq.mul(fsq.mul(a, b), c) != fsq.mul(a, fsq.mul(b, c)))
                    throw std::runtime_error("field-check: associativity failed");
            }
        }
    }
    std::cout << "GF(" << q << ") ok (p=" << fsq.p() << ", m=" << fsq.m() << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coset GF(q) LDPC toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> method;
    int workers = 0;
    int field_q = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config path")->required();
        cmd->add_option("--seed", seed, "seed override");
        cmd->add_option("--workers", workers, "worker thread count (default: cores)");
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--method", method, "EXIT method override (1 or 2)")->check(CLI::Range(1, 2));
    };

    CLI::App* capacity = app.add_subcommand("capacity", "equiprobable capacities and SNR limits");
    CLI::App* simulate = app.add_subcommand("simulate", "all-zero or encoded BP simulation");
    CLI::App* de = app.add_subcommand("de", "Monte-Carlo density evolution");
    CLI::App* exitc = app.add_subcommand("exit", "EXIT curves and tunnel check");
    CLI::App* design = app.add_subcommand("design", "LP design of edge distributions");
    CLI::App* stability = app.add_subcommand("stability", "stability margin report");
    CLI::App* fieldchk = app.add_subcommand("field-check", "exhaustive field axiom check");
    for (CLI::App* c : {capacity, simulate, de, exitc, design, stability}) add_common(c);
    fieldchk->add_option("--q", field_q, "field order")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (fieldchk->parsed()) return cmd_field_check(field_q);
        const std::string command = app.get_subcommands().front()->get_name();
        const Experiment ex = load_experiment(config_path, seed, workers, out_dir, method, command);
        if (capacity->parsed()) return cmd_capacity(ex);
        if (simulate->parsed()) return cmd_simulate(ex);
        if (de->parsed()) return cmd_de(ex);
        if (exitc->parsed()) return cmd_exit(ex);
        if (design->parsed()) return cmd_design(ex);
        if (stability->parsed()) return cmd_stability(ex);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
