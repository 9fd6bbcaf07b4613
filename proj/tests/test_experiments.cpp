#include "doctest.h"

#include "magschro/experiments.hpp"

#include <filesystem>
#include <fstream>
#include <set>

using namespace magschro;
using nlohmann::json;

namespace {

json minimal() {
    return json{{"schema_version", 1}, {"grid", {{"n", 2}, {"N", 32}, {"L", 16.0}, {"dt", 1.0 / 32}, {"T", 0.25}}}};
}

bool has_path(const std::vector<ConfigDiagnostic>& d, const std::string& path) {
    for (const auto& e : d)
        if (e.path == path) return true;
    return false;
}

}  // namespace

TEST_CASE("catalog covers every criterion") {
    const auto& c = list_checks();
    REQUIRE(!c.empty());
    std::set<int> crit;
    std::set<std::string> ids;
    for (const auto& s : c) {
        crit.insert(s.criterion);
        CHECK(ids.insert(s.id).second);
        CHECK(std::find(experiment_ids().begin(), experiment_ids().end(), s.experiment) != experiment_ids().end());
    }
    for (int k = 1; k <= 12; ++k) CHECK(crit.count(k) == 1);
    CHECK(find_check("phase-identity").threshold == 1e-6);
    CHECK(find_check("dual-path").threshold == 1e-3);
    CHECK_THROWS_AS(find_check("nope"), InvalidArgument);
}

TEST_CASE("schema validation names the offending key") {
    CHECK(validate(minimal()).empty());

    auto j = minimal();
    j.erase("grid");
    CHECK(has_path(validate(j), "grid"));
    CHECK_THROWS_AS(parse_config(j), InvalidArgument);

    j = minimal();
    j["colour"] = "blue";
    CHECK(has_path(validate(j), "colour"));

    j = minimal();
    j["experiments"] = {"norms", "nets", "norms"};
    auto d = validate(j);
    REQUIRE(d.size() == 1);
    CHECK(d[0].message.find("duplicate") != std::string::npos);

    j = minimal();
    j["experiments"] = {"plots"};
    CHECK(has_path(validate(j), "experiments"));

    j = minimal();
    j["schema_version"] = 2;
    CHECK(has_path(validate(j), "schema_version"));

    j = minimal();
    j["grid"].erase("dt");
    CHECK(has_path(validate(j), "grid.dt"));
    j = minimal();
    j["grid"]["N"] = 30;  // not a power of two
    CHECK(has_path(validate(j), "grid"));

    j = minimal();
    j["presets"] = json::array({{{"kind", "bump"}, {"widht", 3}}});
    CHECK(has_path(validate(j), "presets[0].widht"));
    j["presets"] = json::array({{{"kind", "spiral"}}});
    CHECK(has_path(validate(j), "presets[0].kind"));

    j = minimal();
    j["tolerances"] = {{"phase-identity", 1e-7}, {"made-up", 1}};
    d = validate(j);
    CHECK(has_path(d, "tolerances.made-up"));
    CHECK(!has_path(d, "tolerances.phase-identity"));

    j = minimal();
    j["seed"] = -3;
    CHECK(has_path(validate(j), "seed"));
}

TEST_CASE("config round trip and shipped configs") {
    for (const auto& id : experiment_ids()) {
        auto c = default_config(id);
        auto back = parse_config(to_json(c));
        CHECK(to_json(back) == to_json(c));
        auto path = std::filesystem::path(MAGSCHRO_SOURCE_DIR) / "configs" / (id + ".json");
        REQUIRE(std::filesystem::exists(path));
        auto shipped = load_config(path.string());
        shipped.output_dir = c.output_dir;
        CHECK(to_json(shipped) == to_json(c));
    }
    CHECK_THROWS_AS(default_config("plots"), InvalidArgument);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InvalidArgument);
}

TEST_CASE("seed splitting") {
    CHECK(split_seed(1, 0) == split_seed(1, 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t s : {0ULL, 1ULL, 2ULL})
        for (std::uint64_t k = 0; k < 64; ++k) seen.insert(split_seed(s, k));
    CHECK(seen.size() == 3 * 64);
}

TEST_CASE("norms on the zero potential pass and reproduce bit for bit") {
    auto c = parse_config(minimal());
    c.seed = 5;
    auto r = run(c, "norms");
    CHECK(r.all_pass());
    bool zero = false;
    for (const auto& row : r.rows)
        if (row.check_id == "ynorm-zero") {
            zero = true;
            CHECK(row.value == 0.0);
        }
    CHECK(zero);
    auto again = run(c, "norms");
    CHECK(again.csv() == r.csv());
    c.threads = 2;
    CHECK(run(c, "norms").csv() == r.csv());
    c.seed = 6;
    CHECK(run(c, "norms").csv() != r.csv());

    auto s = r.summary();
    CHECK(s["pass"] == true);
    CHECK(s["checks"].contains("fft-roundtrip"));
    CHECK(r.csv().rfind("check_id,param_json,value,threshold,pass\n", 0) == 0);
}

TEST_CASE("strichartz sweep with A = 0 equals the baseline") {
    auto j = minimal();
    j["grid"]["L"] = 32.0;
    j["presets"] = json::array({{{"kind", "bump"}, {"eps", 0.0}, {"width", 3.0}}});
    j["eps"] = {0.0};
    auto c = parse_config(j);
    auto r = run(c, "strichartz-sweep");
    CHECK(r.all_pass());
    for (const auto& row : r.rows)
        if (row.check_id == "strichartz-ratio") CHECK(row.value == doctest::Approx(1.0).epsilon(1e-14));

    c.tolerances["strichartz-baseline"] = -1;  // impossible threshold
    auto f = run(c, "strichartz-sweep");
    CHECK(!f.all_pass());
}

TEST_CASE("run rejects experiments the config does not enable") {
    auto j = minimal();
    j["experiments"] = {"nets"};
    auto c = parse_config(j);
    CHECK_THROWS_AS(run(c, "norms"), InvalidArgument);
    CHECK_THROWS_AS(run(c, "plots"), InvalidArgument);
    c.experiments.clear();
    CHECK_THROWS_AS(run(c, "parametrix"), InvalidArgument);  // no preset
}

TEST_CASE("reports land on disk") {
    auto dir = std::filesystem::temp_directory_path() / "magschro-report-test";
    std::filesystem::remove_all(dir);
    RunReport r;
    r.experiment = "nets";
    CheckRow row;
    row.check_id = "partition-sum";
    row.params = {{"note", "a \"quoted\", comma"}};
    row.value = 1e-16;
    row.threshold = 1e-10;
    row.pass = true;
    r.rows.push_back(row);
    write_report(r, dir.string());
    std::ifstream csv(dir / "nets.csv");
    std::string header, line;
    std::getline(csv, header);
    std::getline(csv, line);
    CHECK(header == "check_id,param_json,value,threshold,pass");
    CHECK(line.find("\"{\"\"note\"\":\"\"a \\\"\"quoted\\\"\", comma\"\"}\"") != std::string::npos);
    auto js = json::parse(std::ifstream(dir / "nets.json"));
    CHECK(js["checks"]["partition-sum"]["pass"] == true);
    std::filesystem::remove_all(dir);
}
