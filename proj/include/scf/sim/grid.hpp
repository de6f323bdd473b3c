#pragma once

// Full experiment grid: every (approach x framework x scenario x run) cell,
// deterministic order, per-cell derived seeds. The generated workflow for a
// given (framework, scenario, run) is identical across approaches, which
// makes the conflict rate approach-invariant by construction.

#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/process_model.hpp"
#include "scf/sim/config.hpp"
#include "scf/sim/generator.hpp"
#include "scf/sim/pipeline.hpp"

namespace scf::sim {

struct GridOptions {
    std::uint64_t seed = 42;
    std::vector<Approach> approaches = all_approaches();
    std::vector<FrameworkProfile> profiles = default_profiles();
    std::vector<std::pair<int, ScenarioSpec>> scenarios;  // (canonical index, spec)
    int runs_per_cell = 50;
    CalibrationConfig calib;
    std::string audit_dir;  // empty: in-memory audit only
};

inline std::vector<std::pair<int, ScenarioSpec>> indexed_scenarios(
    const std::vector<std::string>& filter = {}) {
    std::vector<std::pair<int, ScenarioSpec>> out;
    auto all = default_scenarios();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!filter.empty() &&
            std::find(filter.begin(), filter.end(), all[i].name) == filter.end())
            continue;
        out.emplace_back(static_cast<int>(i), all[i]);
    }
    return out;
}

inline std::vector<RunOutput> run_grid(const GridOptions& opt,
                                       const std::map<std::string, ProcessModel>& models) {
    if (opt.runs_per_cell < 1) throw Error("runs_per_cell must be >= 1");
    std::vector<RunOutput> out;
    for (const auto approach : opt.approaches) {
        for (const auto& profile : opt.profiles) {
            for (const auto& [scenario_index, scenario] : opt.scenarios) {
                const auto& model = models.at(scenario.name);
                for (int run = 0; run < opt.runs_per_cell; ++run) {
                    const std::uint64_t cell_seed =
                        derive_cell_seed(opt.seed, profile, scenario_index, run);
                    Rng rng(cell_seed);
                    const GeneratedWorkflow wf =
                        generate_workflow(profile, scenario, opt.calib, rng, run);
                    std::string audit_path;
                    if (!opt.audit_dir.empty()) {
                        audit_path = (std::filesystem::path(opt.audit_dir) /
                                      to_string(approach) / (wf.workflow_id + ".jsonl"))
                                         .string();
                    }
                    out.push_back(
                        run_pipeline(wf, approach, model, opt.calib, cell_seed, audit_path));
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation (per approach, plus the governed per-scenario / per-framework
// breakdowns)
// ---------------------------------------------------------------------------

struct ApproachMetrics {
    std::string approach;
    long tp = 0, fp = 0, fn = 0;
    long conflicts = 0, interactions = 0;
    int completed = 0, total = 0;
    int drift_events = 0, escalations = 0;

    std::optional<double> precision() const {
        return tp + fp == 0 ? std::nullopt
                            : std::optional<double>(double(tp) / double(tp + fp));
    }
    std::optional<double> recall() const {
        return tp + fn == 0 ? std::nullopt
                            : std::optional<double>(double(tp) / double(tp + fn));
    }
    std::optional<double> f1() const {
        auto p = precision();
        auto r = recall();
        if (!p || !r || *p + *r == 0.0) return std::nullopt;
        return 2.0 * *p * *r / (*p + *r);
    }
    double conflict_rate() const {
        return interactions == 0 ? 0.0 : double(conflicts) / double(interactions);
    }
    double completion() const { return total == 0 ? 0.0 : double(completed) / double(total); }

    void add(const RunResult& r) {
        tp += r.tp;
        fp += r.fp;
        fn += r.fn;
        conflicts += r.conflicts_true;
        interactions += r.interactions;
        completed += r.completed ? 1 : 0;
        total += 1;
        drift_events += r.drift_events;
        escalations += r.escalations;
    }
};

struct MetricsTable {
    std::vector<ApproachMetrics> by_approach;                 // table 2 layout
    std::map<std::string, ApproachMetrics> scf_by_scenario;   // table 3 layout (scf-full)
    std::map<std::string, ApproachMetrics> scf_by_framework;  // table 4 layout (scf-full)
};

inline MetricsTable aggregate(const std::vector<RunResult>& results) {
    if (results.empty()) throw EmptyInput("no run results to aggregate");
    MetricsTable t;
    std::map<std::string, std::size_t> slot;
    for (const auto& r : results) {
        auto it = slot.find(r.approach);
        if (it == slot.end()) {
            slot[r.approach] = t.by_approach.size();
            t.by_approach.push_back({});
            t.by_approach.back().approach = r.approach;
        }
        t.by_approach[slot[r.approach]].add(r);
        if (r.approach == "scf-full") {
            t.scf_by_scenario[r.scenario].add(r);
            t.scf_by_framework[r.framework].add(r);
        }
    }
    return t;
}

inline MetricsTable aggregate_outputs(const std::vector<RunOutput>& outputs) {
    std::vector<RunResult> rs;
    rs.reserve(outputs.size());
    for (const auto& o : outputs) rs.push_back(o.result);
    return aggregate(rs);
}

// ---------------------------------------------------------------------------
// Results CSV
// ---------------------------------------------------------------------------

inline std::string results_csv(const std::vector<RunOutput>& outputs) {
    std::ostringstream os;
    os << "approach,framework,scenario,run,completed,tp,fp,fn,interactions,"
          "conflicts_true,drift_events,escalations\n";
    for (const auto& o : outputs) {
        const auto& r = o.result;
        os << r.approach << ',' << r.framework << ',' << r.scenario << ',' << r.run_index
           << ',' << (r.completed ? 1 : 0) << ',' << r.tp << ',' << r.fp << ',' << r.fn << ','
           << r.interactions << ',' << r.conflicts_true << ',' << r.drift_events << ','
           << r.escalations << '\n';
    }
    return os.str();
}

inline std::vector<RunResult> parse_results_csv(const std::string& text) {
    std::vector<RunResult> out;
    std::istringstream is(text);
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 12) throw Error("bad results row: " + line);
        RunResult r;
        r.approach = fields[0];
        r.framework = fields[1];
        r.scenario = fields[2];
        r.run_index = std::stoi(fields[3]);
        r.completed = fields[4] == "1";
        r.tp = std::stol(fields[5]);
        r.fp = std::stol(fields[6]);
        r.fn = std::stol(fields[7]);
        r.interactions = std::stoi(fields[8]);
        r.conflicts_true = std::stoi(fields[9]);
        r.drift_events = std::stoi(fields[10]);
        r.escalations = std::stoi(fields[11]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace scf::sim
