#include <bgl/experiments.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>

using namespace bgl;

namespace {

void print_record(const RunRecord& r, double seconds) {
    std::cout << r.experiment << " (" << r.draws << " draws, " << std::fixed << std::setprecision(1) << seconds << " s)\n";
    std::cout.unsetf(std::ios::floatfield);
    for (const auto& c : r.output.criteria)
        std::cout << "  [" << (c.pass ? "PASS" : "FAIL") << (c.hard ? "" : ", monitor") << "] " << c.id << ": " << c.detail << '\n';
}

RunRecord timed(const Experiment& e, const Params& p, std::uint64_t seed, std::size_t draws, std::size_t workers) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rec = execute(e, p, seed, draws, workers);
    print_record(rec, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return rec;
}

bool any_hard_failure(const std::vector<RunRecord>& rs) {
    for (const auto& r : rs)
        if (r.output.hard_failure()) return true;
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    const Registry reg = make_registry();
    CLI::App app{"Brownian Gibbs line ensembles: simulation and verification"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list registered experiments");

    auto* run = app.add_subcommand("run", "run one experiment");
    std::string exp_name, config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> draws, workers;
    std::optional<std::string> out;
    std::vector<std::string> sets;
    run->add_option("experiment", exp_name, "experiment name (or 'experiment' in the config)");
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--seed", seed, "master seed");
    run->add_option("--draws", draws, "replications");
    run->add_option("--workers", workers, "worker threads");
    run->add_option("--out", out, "output directory");
    run->add_option("--set", sets, "parameter override key=value")->take_all();

    auto* verify = app.add_subcommand("verify-all", "run every experiment at a tier");
    std::string tier = "fast";
    verify->add_option("--tier", tier, "fast | full")->check(CLI::IsMember({"fast", "full"}));
    verify->add_option("--seed", seed, "master seed");
    verify->add_option("--workers", workers, "worker threads");
    verify->add_option("--out", out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& e : reg.all()) {
                std::cout << e.name << (e.monitoring ? " [monitoring]" : "") << "  " << e.description << '\n';
                for (const auto& p : e.params) std::cout << "    " << p.name << " = " << p.default_value << "  # " << p.help << '\n';
            }
            return 0;
        }

        RunSettings s;
        std::optional<std::string> cfg_exp;
        if (!config_path.empty()) cfg_exp = apply_config(s, read_config_file(config_path));
        apply_env(s);
        if (seed) s.seed = *seed;
        if (draws) s.draws = *draws;
        if (workers) s.workers = std::max<std::size_t>(1, *workers);
        if (out) s.out_dir = *out;

        if (*run) {
            for (const auto& kv : sets) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
                s.overrides[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            if (exp_name.empty()) exp_name = cfg_exp.value_or("");
            if (exp_name.empty()) throw ConfigError("no experiment named");
            const Experiment* e = reg.find(exp_name);
            if (!e) throw ConfigError("unknown experiment '" + exp_name + "' (see 'bgl list')");
            const Params p = resolve_params(*e, s.overrides);
            const std::size_t n = s.draws.value_or(e->full_draws);
            auto rec = timed(*e, p, s.seed, n, s.workers);
            write_outputs(s.out_dir, {rec});
            std::cout << "wrote " << s.out_dir << '\n';
            return rec.output.hard_failure() ? 1 : 0;
        }

        std::vector<RunRecord> recs;
        for (const auto& e : reg.all()) {
            const Params p = resolve_params(e, {});
            recs.push_back(timed(e, p, s.seed, tier == "fast" ? e.fast_draws : e.full_draws, s.workers));
        }
        write_outputs(s.out_dir, recs);
        const bool bad = any_hard_failure(recs);
        std::cout << (bad ? "hard criteria failed" : "all hard criteria passed") << "; wrote " << s.out_dir << '\n';
        return bad ? 1 : 0;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
}
