// Command-line runner for the verification pipeline.

#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "ismut/pipeline.hpp"

namespace fs = std::filesystem;
using namespace ismut;
using pipeline::Config;
using pipeline::Report;

namespace {

void print_table(const std::string& command, const Report& rep) {
    std::cout << command << '\n';
    const auto& doc = rep.doc();
    if (doc.contains("checks"))
        for (const auto& [name, c] : doc["checks"].items())
            std::cout << "  " << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << std::left << std::setw(28) << name
                      << std::scientific << std::setprecision(3) << c["value"].get<double>() << "  < "
                      << c["tolerance"].get<double>() << '\n';
    if (doc.contains("error"))
        std::cout << "  ERROR stage " << doc["error"]["stage"] << ": " << doc["error"]["message"].get<std::string>()
                  << '\n';
    std::cout << "exit " << rep.exit_code() << '\n';
}

int finish(const std::string& command, const Report& rep, const fs::path& out, const std::string& stem,
           const io::json& data = nullptr) {
    io::json doc = rep.doc();
    doc["exit_code"] = rep.exit_code();
    if (!data.is_null()) doc["data"] = data;
    io::write_json((out / (stem + ".json")).string(), doc);
    print_table(command, rep);
    return rep.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unified transform / inverse scattering verification runner"};
    app.require_subcommand(1);
    std::string config_path, out_dir = ".";
    unsigned seed = 0;
    bool seed_given = false;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option_function<unsigned>("--seed", [&](unsigned s) { seed = s, seed_given = true; }, "seed for random profiles");

    const std::vector<std::string> commands{"scatter", "ut-halfline", "equivalence", "reduction-audit", "classify", "oracle"};
    for (const auto& c : commands) app.add_subcommand(c)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : pipeline::kUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    Config cfg;
    try {
        if (!config_path.empty()) cfg = Config::from_json(io::read_json(config_path));
        if (!cfg.out_dir.empty() && out_dir == ".") out_dir = cfg.out_dir;
        if (seed_given) cfg.seed = seed;
        cfg.scenario = command;
        cfg.out_dir = out_dir;
        if (!cfg.potential_file.empty() && !fs::exists(cfg.potential_file)) {
            std::cerr << "potential file not found: " << cfg.potential_file << '\n';
            return pipeline::kUsage;
        }
        fs::create_directories(out_dir);
    } catch (const io::json::exception& e) {
        std::cerr << "config: " << e.what() << '\n';
        return pipeline::kConfig;
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return pipeline::kConfig;
    }
    const fs::path out(out_dir);

    try {
        if (command == "scatter") {
            io::json data;
            const Report rep = pipeline::run_scatter(cfg, &data);
            return finish(command, rep, out, "scatter", data);
        }
        if (command == "oracle") {
            oracle::Trajectory traj;
            const Report rep = pipeline::run_oracle(cfg, &traj);
            if (!traj.snapshots.empty()) {
                io::CsvWriter w({"t", "x", "re_q", "im_q", "re_r", "im_r"});
                for (const auto& s : traj.snapshots)
                    for (std::size_t j = 0; j < s.field.N(); ++j)
                        w.row({s.t, s.field.x(j), s.field.q[j].real(), s.field.q[j].imag(), s.field.r[j].real(),
                               s.field.r[j].imag()});
                w.save((out / "oracle_fields.csv").string());
            }
            return finish(command, rep, out, "oracle");
        }
        if (command == "equivalence" || command == "ut-halfline") {
            std::vector<pipeline::SweepPoint> pts;
            const bool eq = command == "equivalence";
            const Report rep = eq ? pipeline::run_equivalence(cfg, &pts) : pipeline::run_ut_halfline(cfg, &pts);
            const std::string stem = eq ? "equivalence" : "ut_halfline";
            if (!pts.empty()) pipeline::sweep_csv(pts).save((out / (stem + ".csv")).string());
            return finish(command, rep, out, stem);
        }
        if (command == "reduction-audit") {
            if (cfg.kind == "general") {
                std::cerr << "reduction-audit needs potential.kind nls or nonlocal\n";
                return pipeline::kUsage;
            }
            return finish(command, pipeline::run_reduction_audit(cfg), out, "reduction_audit");
        }
        io::json data;
        const Report rep = pipeline::run_classify(cfg, &data);
        for (const auto& f : data["families"])
            std::cout << "gamma = " << f["gamma"] << ": " << f["block_shape"].get<std::string>() << " blocks, "
                      << f["cases"].size() << " mu case(s)\n";
        return finish(command, rep, out, "classify", data);
    } catch (const std::exception& e) {
        std::cerr << "output: " << e.what() << '\n';
        return pipeline::kConfig;
    }
}
