#include <bgl/experiments.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bgl;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string csv_of(const RunRecord& r) {
    std::ostringstream os;
    r.output.table.write_csv(os);
    return os.str();
}

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("bgl_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Config, ParsesKeyValueWithComments) {
    const auto m = parse_config_text("# header\nseed = 7\n\n draws=100  # trailing\nsteps = 64\n");
    EXPECT_EQ(m.at("seed"), "7");
    EXPECT_EQ(m.at("draws"), "100");
    EXPECT_EQ(m.at("steps"), "64");
}

TEST(Config, RejectsMalformedAndDuplicates) {
    EXPECT_THROW(parse_config_text("seed 7\n"), ConfigError);
    EXPECT_THROW(parse_config_text("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(parse_config_text(" = 2\n"), ConfigError);
    EXPECT_THROW(read_config_file("/nonexistent/bgl.cfg"), ConfigError);
}

TEST(Config, ReservedKeysAndOverrides) {
    RunSettings s;
    const auto exp = apply_config(s, parse_config_text("experiment = bridge-sup\nseed = 9\ndraws = 12\nworkers = 3\nout = x\nsteps = 8\n"));
    EXPECT_EQ(exp.value(), "bridge-sup");
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.draws.value(), 12u);
    EXPECT_EQ(s.workers, 3u);
    EXPECT_EQ(s.out_dir, "x");
    EXPECT_EQ(s.overrides.at("steps"), "8");
    ::setenv("BGL_OUT_DIR", "from_env", 1);
    apply_env(s);
    ::unsetenv("BGL_OUT_DIR");
    EXPECT_EQ(s.out_dir, "from_env");
}

TEST(Params, TypedAccessAndErrors) {
    Params p(std::map<std::string, std::string>{{"a", "1.5"}, {"n", "-2"}, {"list", "1, 2,3"}, {"bad", "x1"}});
    EXPECT_EQ(p.real("a"), 1.5);
    EXPECT_EQ(p.integer("n"), -2);
    EXPECT_THROW(p.count("n"), ConfigError);
    EXPECT_EQ(p.reals("list"), (std::vector<double>{1, 2, 3}));
    EXPECT_THROW(p.real("bad"), ConfigError);
    EXPECT_THROW(p.str("missing"), ConfigError);
}

TEST(Registry, ContainsEveryExperiment) {
    const auto reg = make_registry();
    for (const char* n : {"meander-densities", "meander-bounds", "nz-tails", "nt-arcsine", "numnt-tail", "bridge-sup",
                          "arcsine-argmax", "lpp-gue", "gibbs-invariance", "jump-structure", "jump-pass-rate",
                          "jump-density-monitor", "costs-tables", "corner-oracle", "pole-oracle", "polymer-ordering",
                          "quilt-continuity", "increment-moment", "analytic-lemmas"})
        EXPECT_NE(reg.find(n), nullptr) << n;
    EXPECT_EQ(reg.all().size(), 19u);
    EXPECT_EQ(reg.find("nope"), nullptr);
}

TEST(Registry, UnknownParameterRejected) {
    const auto reg = make_registry();
    EXPECT_THROW(resolve_params(reg.at("bridge-sup"), {{"stepz", "3"}}), ConfigError);
    EXPECT_EQ(resolve_params(reg.at("bridge-sup"), {{"steps", "3"}}).str("steps"), "3");
}

TEST(Registry, JumpWindowViolationEchoed) {
    const auto reg = make_registry();
    const auto& e = reg.at("jump-structure");
    const auto p = resolve_params(e, {{"ck_source", "explicit"}});
    try {
        execute(e, p, 1, 1, 1);
        FAIL() << "expected a window violation";
    } catch (const ParameterError& ex) {
        EXPECT_NE(std::string(ex.what()).find("window"), std::string::npos);
    }
}

TEST(Execute, ZeroDrawsWritesHeaderOnly) {
    const auto reg = make_registry();
    const auto& e = reg.at("nt-arcsine");
    const auto rec = execute(e, resolve_params(e, {}), kDefaultSeed, 0, 1);
    EXPECT_FALSE(rec.output.hard_failure());
    const auto dir = scratch("zero");
    write_outputs(dir.string(), {rec});
    EXPECT_EQ(slurp(dir / "nt-arcsine.csv"), "eta,a,hits,trials,estimate,ci_low,ci_high,arcsin,bound\n");
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    EXPECT_EQ(manifest["master_seed"], kDefaultSeed);
    EXPECT_TRUE(manifest["hard_criteria_pass"].get<bool>());
    EXPECT_EQ(manifest["runs"][0]["csv"], "nt-arcsine.csv");
}

TEST(Execute, NtArcsineReportsBoundAndWilson) {
    const auto reg = make_registry();
    const auto& e = reg.at("nt-arcsine");
    const auto rec = execute(e, resolve_params(e, {{"as", "0.1"}, {"etas", "0.05"}, {"steps", "256"}}), 3, 200, 1);
    const auto& t = rec.output.table;
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.columns[7], "arcsin");
    EXPECT_NEAR(std::stod(t.rows[0][8]), 4 * 0.1 * 0.5, 1e-12);
    EXPECT_LE(std::stod(t.rows[0][5]), std::stod(t.rows[0][4]));
    EXPECT_GE(std::stod(t.rows[0][6]), std::stod(t.rows[0][4]));
}

TEST(Execute, SameSeedSameOutputAnyWorkers) {
    const auto reg = make_registry();
    for (const char* name : {"bridge-sup", "gibbs-invariance", "costs-tables"}) {
        const auto& e = reg.at(name);
        const auto p = resolve_params(e, {});
        const auto a = execute(e, p, 11, 150, 1), b = execute(e, p, 11, 150, 1), c = execute(e, p, 11, 150, 4);
        EXPECT_EQ(csv_of(a), csv_of(b)) << name;
        EXPECT_EQ(csv_of(a), csv_of(c)) << name;
        EXPECT_EQ(record_json(a).dump(), record_json(c).dump()) << name;
        EXPECT_NE(csv_of(a), csv_of(execute(e, p, 12, 150, 1))) << name;
    }
}

TEST(Execute, MonitoringNeverGates) {
    Experiment e{"mon", "", true, {"x"}, {}, 1, 1, [](const RunContext&) {
                     ExperimentOutput o;
                     o.check("19.x", "always fails", false, "");
                     return o;
                 }};
    const auto rec = execute(e, Params(), 1, 1, 1);
    EXPECT_FALSE(rec.output.hard_failure());
    EXPECT_FALSE(rec.output.criteria[0].hard);
}

TEST(Execute, ConfigHashExcludesWorkers) {
    const auto reg = make_registry();
    const auto& e = reg.at("quilt-continuity");
    const auto p = resolve_params(e, {});
    EXPECT_EQ(record_json(execute(e, p, 5, 3, 1))["config_hash"], record_json(execute(e, p, 5, 3, 2))["config_hash"]);
    EXPECT_NE(config_hash("quilt-continuity", p, 5, 3), config_hash("quilt-continuity", p, 6, 3));
}

TEST(ParallelMap, OrderIndependentOfWorkers) {
    auto f = [](std::size_t i) {
        RandomStream r(derive_stream(1, "pm", i));
        return r.normal();
    };
    EXPECT_EQ(parallel_map(1000, 1, f), parallel_map(1000, 7, f));
    EXPECT_THROW(parallel_map(10, 3, [](std::size_t i) -> int { if (i == 5) throw std::runtime_error("x"); return 0; }),
                 std::runtime_error);
}
