#include "magschro/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace magschro;

namespace {

const char* sense_name(Sense s) {
    switch (s) {
        case Sense::at_most: return "<=";
        case Sense::at_least: return ">=";
        default: return "report";
    }
}

int list_catalog() {
    for (const auto& c : list_checks())
        std::cout << c.id << '\t' << c.experiment << '\t' << (c.criterion ? std::to_string(c.criterion) : "-") << '\t'
                  << sense_name(c.sense) << ' ' << c.threshold << '\t' << c.description << '\n';
    return 0;
}

int validate_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open " << path << '\n';
        return 2;
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        std::cerr << path << ": " << e.what() << '\n';
        return 2;
    }
    auto d = validate(j);
    for (const auto& e : d) std::cerr << path << ": " << (e.path.empty() ? "<root>" : e.path) << ": " << e.message << '\n';
    if (d.empty()) std::cout << path << ": ok\n";
    return d.empty() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic Schrodinger numerical experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int threads = 0;

    app.add_subcommand("list-checks", "print the check catalog");
    auto* val = app.add_subcommand("validate", "check a config against the schema");
    val->add_option("--config", config_path, "config file")->required();

    std::vector<CLI::App*> runs;
    for (const auto& id : experiment_ids()) {
        auto* s = app.add_subcommand(id, "run the " + id + " experiment");
        s->add_option("--config", config_path, "config file")->required();
        s->add_option("--out", out_dir, "report directory (overrides MAGSCHRO_OUT and the config)");
        s->add_option("--seed", seed, "master seed");
        s->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        runs.push_back(s);
    }

    CLI11_PARSE(app, argc, argv);

    if (app.got_subcommand("list-checks")) return list_catalog();
    if (val->parsed()) return validate_file(config_path);

    CLI::App* chosen = nullptr;
    for (auto* s : runs)
        if (s->parsed()) chosen = s;
    const std::string id = chosen->get_name();

    try {
        auto cfg = load_config(config_path);
        if (chosen->count("--seed")) cfg.seed = seed;
        if (threads > 0) cfg.threads = threads;
        if (const char* env = std::getenv("MAGSCHRO_OUT"); env && *env) cfg.output_dir = env;
        if (!out_dir.empty()) cfg.output_dir = out_dir;

        auto rep = run(cfg, id);
        write_report(rep, cfg.output_dir);
        std::size_t failed = 0;
        for (const auto& r : rep.rows)
            if (!r.pass) {
                ++failed;
                std::cerr << "FAIL " << r.check_id << " value " << r.value << ' ' << sense_name(r.sense) << ' '
                          << r.threshold << ' ' << r.params.dump() << '\n';
            }
        std::cout << id << ": " << rep.rows.size() - failed << '/' << rep.rows.size() << " rows pass, report in "
                  << cfg.output_dir << " (" << rep.wall_seconds << " s)\n";
        return failed == 0 ? 0 : 1;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
