#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "shadowlab/experiments.hpp"

using namespace shadowlab;

namespace {

// Defaults scaled down so the whole registry runs in a few seconds.
ExperimentConfig small_config(const std::string& name) {
    auto c = default_config(name);
    if (name == "lemma-equivalence") c.samples = 500;
    if (name == "isometry-no-mes") c.samples = 501;
    if (name == "doubling-mes" || name == "shift-mes" || name == "product-mes") c.samples = 3;
    if (name == "power-interleave" || name == "isometry-distal") c.samples = 100;
    return c;
}

}  // namespace

TEST(Registry, NamesAreUniqueAndDocumented) {
    const auto& reg = experiment_registry();
    EXPECT_GE(reg.size(), 10u);
    std::set<std::string> names;
    for (const auto& e : reg) {
        EXPECT_TRUE(names.insert(e.name).second) << e.name;
        EXPECT_FALSE(e.citation.empty()) << e.name;
        EXPECT_FALSE(e.columns.empty()) << e.name;
        EXPECT_EQ(e.defaults.experiment, e.name);
        EXPECT_NO_THROW(e.defaults.validate()) << e.name;
        EXPECT_NE(std::find(e.systems.begin(), e.systems.end(), e.defaults.system), e.systems.end()) << e.name;
    }
    EXPECT_THROW(find_experiment("no-such-experiment"), ConfigError);
}

TEST(Config, JsonOverridesAndErrors) {
    auto c = apply_config_json(default_config("doubling-mes"),
                               Json{{"horizon", 256}, {"seed", 5}, {"tail_fraction", "1/2"}, {"samples", 2}});
    EXPECT_EQ(c.horizon, 256u);
    EXPECT_EQ(c.seed, 5u);
    EXPECT_EQ(c.tail_fraction, Rational(1, 2));
    EXPECT_EQ(c.samples, 2u);
    EXPECT_EQ(c.system, "doubling-circle");

    EXPECT_THROW(apply_config_json(c, Json{{"horizn", 5}}), ConfigError);
    EXPECT_THROW(apply_config_json(c, Json{{"horizon", "many"}}), ConfigError);
    EXPECT_THROW(apply_config_json(c, Json::array()), ConfigError);
    EXPECT_THROW(apply_config_json(c, Json{{"tail_fraction", "a/b"}}), ConfigError);

    const auto round = apply_config_json(ExperimentConfig{}, c.to_json());
    EXPECT_EQ(round.to_json(), c.to_json());
}

TEST(Config, Validation) {
    auto c = default_config("shift-mes");
    c.delta = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = default_config("shift-mes");
    c.horizon = 0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = default_config("shift-mes");
    c.tail_fraction = Rational(3, 2);
    EXPECT_THROW(c.validate(), ConfigError);
    c = default_config("shift-mes");
    c.system = "doubling-circle";
    EXPECT_THROW(run_experiment(c), ConfigError);
}

TEST(Experiments, SmallConfigsPassAndCsvAgrees) {
    for (const auto& e : experiment_registry()) {
        const auto rep = run_experiment(small_config(e.name));
        EXPECT_TRUE(rep.pass) << e.name << "\n" << rep.results.dump(2);
        EXPECT_EQ(recheck_from_csv(rep), rep.pass) << e.name;
        EXPECT_FALSE(rep.tables.empty()) << e.name;
        for (const auto& [name, t] : rep.tables) EXPECT_FALSE(t.rows.empty()) << e.name << "." << name;
    }
}

TEST(Experiments, TamperedCsvIsDetected) {
    auto rep = run_experiment(small_config("doubling-mes"));
    ASSERT_TRUE(recheck_from_csv(rep));
    auto& t = rep.tables.at("orbits");
    t.rows[0][t.column("bad_upper")] = "1/1";
    EXPECT_FALSE(recheck_from_csv(rep));
}

TEST(Experiments, FailingAssertionIsReported) {
    auto c = default_config("two-circles");
    c.delta = 1.5;
    const auto rep = run_experiment(c);
    EXPECT_FALSE(rep.pass);
    EXPECT_FALSE(recheck_from_csv(rep));
}

TEST(Experiments, Deterministic) {
    for (const char* name : {"doubling-mes", "proximality", "lemma-equivalence"}) {
        const auto a = run_experiment(small_config(name));
        const auto b = run_experiment(small_config(name));
        EXPECT_EQ(a.payload().dump(), b.payload().dump()) << name;
        for (const auto& [tn, t] : a.tables) EXPECT_EQ(t.str(), b.tables.at(tn).str()) << name;
    }
    auto c = small_config("doubling-mes");
    const auto a = run_experiment(c);
    c.seed += 1;
    EXPECT_NE(a.payload().dump(), run_experiment(c).payload().dump());
}

TEST(Reports, WriteAndReadBack) {
    const auto dir = std::filesystem::temp_directory_path() / "shadowlab-test-reports";
    std::filesystem::remove_all(dir);
    auto c = small_config("constant-map-mes");
    c.output_path = (dir / "constant.json").string();
    const auto rep = run_experiment(c);
    const auto path = write_report(rep);
    EXPECT_EQ(path, dir / "constant.json");
    std::ifstream is(path);
    const auto j = Json::parse(is);
    EXPECT_EQ(j["pass"], true);
    EXPECT_EQ(j["provenance"]["library_version"], kVersion);
    const auto csv_name = j["csv"]["trace"].get<std::string>();
    std::ifstream cs(dir / csv_name);
    std::stringstream buf;
    buf << cs.rdbuf();
    EXPECT_EQ(buf.str(), rep.tables.at("trace").str());
    std::filesystem::remove_all(dir);
}

TEST(Reports, UnwritablePathIsIoError) {
    auto c = small_config("two-circles");
    c.output_path = "/proc/shadowlab/none.json";
    const auto rep = run_experiment(c);
    EXPECT_THROW(write_report(rep), IoError);
}
