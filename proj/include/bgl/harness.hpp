#pragma once

#include <bgl/errors.hpp>
#include <bgl/random.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#ifndef BGL_VERSION
#define BGL_VERSION "0.0.0"
#endif

namespace bgl {

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

struct ParamSpec {
    std::string name;
    std::string default_value;
    std::string help;
};

// Typed view over string-valued parameters.
class Params {
public:
    Params() = default;
    explicit Params(std::map<std::string, std::string> v) : values_(std::move(v)) {}

    bool has(const std::string& k) const { return values_.count(k) > 0; }
    const std::string& str(const std::string& k) const {
        auto it = values_.find(k);
        if (it == values_.end()) throw ConfigError("missing parameter '" + k + "'");
        return it->second;
    }
    double real(const std::string& k) const {
        try {
            std::size_t pos = 0;
            const double v = std::stod(str(k), &pos);
            if (pos != str(k).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError("parameter '" + k + "' is not a number: " + str(k));
        }
    }
    long long integer(const std::string& k) const {
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(str(k), &pos);
            if (pos != str(k).size()) throw std::invalid_argument("");
            return v;
        } catch (const std::logic_error&) {
            throw ConfigError("parameter '" + k + "' is not an integer: " + str(k));
        }
    }
    std::size_t count(const std::string& k) const {
        const long long v = integer(k);
        if (v < 0) throw ConfigError("parameter '" + k + "' must be nonnegative");
        return static_cast<std::size_t>(v);
    }
    std::vector<double> reals(const std::string& k) const {
        std::vector<double> out;
        std::stringstream ss(str(k));
        std::string item;
        while (std::getline(ss, item, ',')) {
            Params one(std::map<std::string, std::string>{{k, item}});
            out.push_back(one.real(k));
        }
        return out;
    }
    void set(const std::string& k, const std::string& v) { values_[k] = v; }
    const std::map<std::string, std::string>& all() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Flat key = value text; '#' starts a comment.
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string k = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (k.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (out.count(k)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + k + "'");
        out[k] = v;
    }
    return out;
}

inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

struct Criterion {
    std::string id;
    std::string description;
    bool pass;
    bool hard;  // monitoring criteria never fail a run
    std::string detail;
};

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> r) {
        if (r.size() != columns.size()) throw std::logic_error("table row width mismatch");
        rows.push_back(std::move(r));
    }
    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        }
    }
};

struct ExperimentOutput {
    Table table;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<Criterion> criteria;

    void check(std::string id, std::string description, bool pass, std::string detail, bool hard = true) {
        criteria.push_back({std::move(id), std::move(description), pass, hard, std::move(detail)});
    }
    bool hard_failure() const {
        return std::any_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.hard && !c.pass; });
    }
};

// Runs f(0..n-1) on a pool; result i depends only on i, so the output is independent
// of the worker count and of scheduling.
template <class F>
auto parallel_map(std::size_t n, std::size_t workers, F f) -> std::vector<decltype(f(std::size_t{0}))> {
    using R = decltype(f(std::size_t{0}));
    std::vector<std::optional<R>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                slots[i].emplace(f(i));
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!err) err = std::current_exception();
                next = n;
                return;
            }
        }
    };
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

struct RunContext {
    std::string experiment;
    Params params;
    std::uint64_t seed;
    std::size_t draws;
    std::size_t workers;

    RandomStream stream(std::uint64_t rep) const { return derive_stream(seed, experiment, rep); }
    RandomStream stream(std::uint64_t rep, const std::string& part) const {
        return derive_stream(seed, experiment + "/" + part, rep);
    }
    std::uint64_t substream_key() const { return stream(0).key(); }

    template <class F>
    auto map(std::size_t n, F f) const {
        return parallel_map(n, workers, f);
    }
};

struct Experiment {
    std::string name;
    std::string description;
    bool monitoring = false;  // never gates the exit status
    std::vector<std::string> columns;
    std::vector<ParamSpec> params;
    std::size_t fast_draws = 0;
    std::size_t full_draws = 0;
    std::function<ExperimentOutput(const RunContext&)> run;
};

class Registry {
public:
    void add(Experiment e) {
        if (find(e.name)) throw std::logic_error("duplicate experiment " + e.name);
        list_.push_back(std::move(e));
    }
    const Experiment* find(const std::string& name) const {
        for (const auto& e : list_)
            if (e.name == name) return &e;
        return nullptr;
    }
    const Experiment& at(const std::string& name) const {
        if (const auto* e = find(name)) return *e;
        throw ConfigError("unknown experiment '" + name + "'");
    }
    const std::vector<Experiment>& all() const { return list_; }

private:
    std::vector<Experiment> list_;
};

inline constexpr std::uint64_t kDefaultSeed = 20240611;

// Settings resolved from defaults, a config file, BGL_OUT_DIR and command-line flags,
// in increasing order of precedence.
struct RunSettings {
    std::uint64_t seed = kDefaultSeed;
    std::optional<std::size_t> draws;
    std::size_t workers = 1;
    std::string out_dir = "bgl_out";
    std::map<std::string, std::string> overrides;  // experiment parameters
};

inline const std::vector<std::string>& reserved_keys() {
    static const std::vector<std::string> k{"experiment", "seed", "draws", "workers", "out"};
    return k;
}

// Validates parameter keys against the experiment schema and fills defaults.
inline Params resolve_params(const Experiment& e, const std::map<std::string, std::string>& given) {
    std::map<std::string, std::string> v;
    for (const auto& p : e.params) v[p.name] = p.default_value;
    for (const auto& [k, val] : given) {
        if (!v.count(k)) throw ConfigError("unknown parameter '" + k + "' for experiment " + e.name);
        v[k] = val;
    }
    return Params(std::move(v));
}

// Apply a parsed config file onto settings; returns the experiment named in it, if any.
inline std::optional<std::string> apply_config(RunSettings& s, const std::map<std::string, std::string>& cfg) {
    std::optional<std::string> exp;
    for (const auto& [k, v] : cfg) {
        Params one(std::map<std::string, std::string>{{k, v}});
        if (k == "experiment") exp = v;
        else if (k == "seed") s.seed = static_cast<std::uint64_t>(std::stoull(v));
        else if (k == "draws") s.draws = one.count(k);
        else if (k == "workers") s.workers = std::max<std::size_t>(1, one.count(k));
        else if (k == "out") s.out_dir = v;
        else s.overrides[k] = v;
    }
    return exp;
}

inline void apply_env(RunSettings& s) {
    if (const char* d = std::getenv("BGL_OUT_DIR"); d && *d) s.out_dir = d;
}

inline std::uint64_t config_hash(const std::string& experiment, const Params& p, std::uint64_t seed, std::size_t draws) {
    std::ostringstream os;
    os << "experiment=" << experiment << "\nseed=" << seed << "\ndraws=" << draws << '\n';
    for (const auto& [k, v] : p.all()) os << k << '=' << v << '\n';
    return fnv1a64(os.str());
}

struct RunRecord {
    std::string experiment;
    Params params;
    std::size_t draws;
    std::uint64_t seed;
    std::uint64_t substream_key;
    ExperimentOutput output;
    bool monitoring;
};

inline nlohmann::json record_json(const RunRecord& r) {
    nlohmann::json j;
    j["experiment"] = r.experiment;
    j["config_hash"] = hex64(config_hash(r.experiment, r.params, r.seed, r.draws));
    j["substream_key"] = hex64(r.substream_key);
    j["draws"] = r.draws;
    j["monitoring"] = r.monitoring;
    j["parameters"] = r.params.all();
    j["summary"] = r.output.summary;
    nlohmann::json crit = nlohmann::json::array();
    for (const auto& c : r.output.criteria)
        crit.push_back({{"id", c.id}, {"description", c.description}, {"pass", c.pass}, {"hard", c.hard}, {"detail", c.detail}});
    j["criteria"] = crit;
    j["csv"] = r.experiment + ".csv";
    return j;
}

inline RunRecord execute(const Experiment& e, const Params& p, std::uint64_t seed, std::size_t draws, std::size_t workers) {
    RunContext ctx{e.name, p, seed, draws, workers};
    RunRecord rec{e.name, p, draws, seed, ctx.substream_key(), {}, e.monitoring};
    if (draws == 0) {
        rec.output.table.columns = e.columns;  // vacuous run: header only
    } else {
        rec.output = e.run(ctx);
        if (rec.output.table.columns.empty()) rec.output.table.columns = e.columns;
    }
    if (e.monitoring)
        for (auto& c : rec.output.criteria) c.hard = false;
    return rec;
}

inline void write_outputs(const std::string& dir, const std::vector<RunRecord>& records) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["artifact_version"] = BGL_VERSION;
    manifest["master_seed"] = records.empty() ? kDefaultSeed : records.front().seed;
    nlohmann::json runs = nlohmann::json::array();
    std::ostringstream all;
    for (const auto& r : records) {
        std::ofstream csv(std::filesystem::path(dir) / (r.experiment + ".csv"));
        r.output.table.write_csv(csv);
        runs.push_back(record_json(r));
        all << runs.back()["config_hash"].get<std::string>();
    }
    manifest["config_hash"] = hex64(fnv1a64(all.str()));
    manifest["runs"] = runs;
    bool ok = true;
    for (const auto& r : records) ok = ok && !r.output.hard_failure();
    manifest["hard_criteria_pass"] = ok;
    std::ofstream(std::filesystem::path(dir) / "manifest.json") << manifest.dump(2) << '\n';
}

}  // namespace bgl
