// scf — process-aware conflict middleware and its simulation harness.
//
//   scf validate <model.yaml>...       validate process model files
//   scf run [flags]                    execute the experiment grid
//   scf report <results.csv>           render the aggregate tables
//   scf audit-verify <path>...         verify audit log hash chains

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "scf/audit.hpp"
#include "scf/process_model.hpp"
#include "scf/report.hpp"
#include "scf/sim/grid.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scf::IoError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int cmd_validate(const std::vector<std::string>& paths) {
    int failures = 0;
    for (const auto& path : paths) {
        try {
            const auto model = scf::parse_model(read_file(path));
            std::cout << path << ": ok (" << model.entity_types.size() << " entity type(s), "
                      << model.roles.size() << " role(s))\n";
        } catch (const scf::ValidationError& e) {
            ++failures;
            std::cout << path << ": invalid\n";
            for (const auto& v : e.violations)
                std::cout << "  " << v.path << ": " << v.message << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cout << path << ": error: " << e.what() << "\n";
        }
    }
    return failures == 0 ? 0 : 1;
}

struct RunFlags {
    std::uint64_t seed = 42;
    int runs = 50;
    std::string out_dir = "out";
    std::string models_dir = "models";
    double theta = 0.7;
    std::vector<std::string> scenarios;
    std::vector<std::string> frameworks;
    std::vector<std::string> approaches;
    bool no_audit_files = false;
    scf::sim::CalibrationConfig calib;
};

int cmd_run(const RunFlags& flags) {
    using namespace scf::sim;
    GridOptions opt;
    opt.seed = flags.seed;
    opt.runs_per_cell = flags.runs;
    opt.calib = flags.calib;
    opt.calib.theta = flags.theta;
    opt.scenarios = indexed_scenarios(flags.scenarios);
    if (opt.scenarios.empty()) {
        std::cerr << "no scenarios match the filter\n";
        return 2;
    }
    if (!flags.frameworks.empty()) {
        std::vector<FrameworkProfile> keep;
        for (const auto& p : default_profiles())
            if (std::find(flags.frameworks.begin(), flags.frameworks.end(), p.name) !=
                flags.frameworks.end())
                keep.push_back(p);
        if (keep.empty()) {
            std::cerr << "no frameworks match the filter\n";
            return 2;
        }
        opt.profiles = keep;
    }
    if (!flags.approaches.empty()) {
        std::vector<Approach> keep;
        for (const auto a : all_approaches())
            if (std::find(flags.approaches.begin(), flags.approaches.end(),
                          std::string(to_string(a))) != flags.approaches.end())
                keep.push_back(a);
        if (keep.empty()) {
            std::cerr << "no approaches match the filter\n";
            return 2;
        }
        opt.approaches = keep;
    }
    if (!flags.no_audit_files) opt.audit_dir = (fs::path(flags.out_dir) / "audit").string();

    std::map<std::string, scf::ProcessModel> models;
    for (const auto& [idx, sc] : opt.scenarios) {
        const auto path = fs::path(flags.models_dir) / sc.model_file;
        models[sc.name] = scf::parse_model(read_file(path.string()));
    }

    std::vector<RunOutput> outputs;
    try {
        outputs = run_grid(opt, models);
    } catch (const scf::InvariantBreach& e) {
        std::cerr << "invariant breach: " << e.what() << "\n";
        return 3;
    }

    fs::create_directories(flags.out_dir);
    const auto csv_path = fs::path(flags.out_dir) / "results.csv";
    {
        std::ofstream out(csv_path, std::ios::trunc);
        out << results_csv(outputs);
    }

    const auto table = aggregate_outputs(outputs);
    std::cout << "wrote " << outputs.size() << " run results to " << csv_path.string()
              << "\n\n";
    std::cout << render_comparison_table(table) << "\n";
    std::cout << render_scenario_table(table) << "\n";
    std::cout << render_framework_table(table);

    // Aggregate governance view across the governed runs.
    scf::GovernanceSummary total;
    for (const auto& o : outputs) {
        if (!o.audit_ok) {
            std::cerr << "audit chain failed verification for a run log\n";
            return 3;
        }
    }
    if (!flags.no_audit_files) {
        const auto dir = fs::path(opt.audit_dir) / "scf-full";
        if (fs::exists(dir)) {
            for (const auto& entry : fs::directory_iterator(dir)) {
                const auto s = scf::summarize_records(scf::load_audit_file(entry.path().string()));
                total.conflicts_total += s.conflicts_total;
                for (const auto& [k, v] : s.conflicts_by_type) total.conflicts_by_type[k] += v;
                for (const auto& [k, v] : s.resolutions_by_tier)
                    total.resolutions_by_tier[k] += v;
                total.escalations += s.escalations;
                total.drift_events += s.drift_events;
            }
            const int tier1 = total.resolutions_by_tier.count("policy")
                                  ? total.resolutions_by_tier.at("policy")
                                  : 0;
            total.policy_coverage = total.conflicts_total == 0
                                        ? 0.0
                                        : double(tier1) / total.conflicts_total;
            std::ofstream gs(fs::path(flags.out_dir) / "governance_summary.md");
            gs << scf::render_governance_summary(total);
        }
    }
    return 0;
}

int cmd_report(const std::string& csv_path) {
    const auto rows = scf::sim::parse_results_csv(read_file(csv_path));
    const auto table = scf::sim::aggregate(rows);
    std::cout << render_comparison_table(table) << "\n";
    std::cout << render_scenario_table(table) << "\n";
    std::cout << render_framework_table(table);
    return 0;
}

int cmd_audit_verify(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& entry : fs::recursive_directory_iterator(p))
                if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
                    files.push_back(entry.path().string());
        } else {
            files.push_back(p);
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
        std::cout << "warning: no audit logs found\n";
        return 0;
    }
    int failures = 0;
    for (const auto& f : files) {
        try {
            const auto v = scf::verify_file(f);
            if (v.ok) {
                std::cout << f << ": ok\n";
            } else {
                ++failures;
                std::cout << f << ": chain broken at seq " << v.broken_seq << "\n";
            }
        } catch (const std::exception& e) {
            ++failures;
            std::cout << f << ": error: " << e.what() << "\n";
        }
    }
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"process-aware conflict middleware simulation harness"};
    app.require_subcommand(1);

    std::vector<std::string> validate_paths;
    auto* validate = app.add_subcommand("validate", "validate process model files");
    validate->add_option("paths", validate_paths, "model YAML files")->required();

    RunFlags flags;
    auto* run = app.add_subcommand("run", "execute the experiment grid");
    run->add_option("--seed", flags.seed, "base seed (default 42)");
    run->add_option("--runs", flags.runs, "runs per cell (default 50)");
    run->add_option("--out", flags.out_dir, "output directory (default out)");
    run->add_option("--models-dir", flags.models_dir, "directory with scenario models");
    run->add_option("--theta", flags.theta, "drift resync threshold (default 0.7)");
    run->add_option("--scenarios", flags.scenarios, "scenario name filter")->delimiter(',');
    run->add_option("--frameworks", flags.frameworks, "framework name filter")->delimiter(',');
    run->add_option("--approaches", flags.approaches, "approach name filter")->delimiter(',');
    run->add_flag("--no-audit-files", flags.no_audit_files, "skip writing audit logs");
    run->add_option("--conflict-intensity", flags.calib.conflict_intensity,
                    "conflict episodes per interaction");
    run->add_option("--latent-fraction", flags.calib.latent_fraction,
                    "share of conflicts invisible to rule detection");
    run->add_option("--schema-visible-fraction", flags.calib.schema_visible_fraction,
                    "share of conflicts a schema check catches");
    run->add_option("--benign-per-conflict", flags.calib.benign_per_conflict,
                    "benign contention pairs per conflict episode");
    run->add_option("--judge-recall", flags.calib.judge_recall, "judge baseline recall");
    run->add_option("--judge-precision", flags.calib.judge_precision,
                    "judge baseline precision");
    run->add_option("--judge-repair-prob", flags.calib.judge_repair_prob,
                    "judge baseline repair probability");
    run->add_option("--belief-noise-rate", flags.calib.belief_noise_rate,
                    "per-step context drift probability");

    std::string report_csv;
    auto* report = app.add_subcommand("report", "render aggregate tables from a results CSV");
    report->add_option("csv", report_csv, "results.csv path")->required();

    std::vector<std::string> verify_paths;
    auto* verify = app.add_subcommand("audit-verify", "verify audit log hash chains");
    verify->add_option("paths", verify_paths, "audit files or directories")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_paths);
        if (app.got_subcommand(run)) return cmd_run(flags);
        if (app.got_subcommand(report)) return cmd_report(report_csv);
        if (app.got_subcommand(verify)) return cmd_audit_verify(verify_paths);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
