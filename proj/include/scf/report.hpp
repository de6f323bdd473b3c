#pragma once

// Markdown rendering of the aggregate tables (overall comparison, governed
// per-scenario drift activity, governed per-framework breakdown).

#include <iomanip>
#include <sstream>
#include <string>

#include "scf/sim/grid.hpp"

namespace scf {

namespace detail {

inline std::string pct(std::optional<double> v) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(1) << (*v * 100.0) << "%";
    return os.str();
}
inline std::string pct(double v) { return pct(std::optional<double>(v)); }

}  // namespace detail

inline std::string render_comparison_table(const sim::MetricsTable& t) {
    std::ostringstream os;
    os << "| Approach | Precision | Recall | F1 Score | Conflict Rate | Completion Rate |\n";
    os << "|---|---|---|---|---|---|\n";
    for (const auto& m : t.by_approach) {
        os << "| " << m.approach << " | " << detail::pct(m.precision()) << " | "
           << detail::pct(m.recall()) << " | " << detail::pct(m.f1()) << " | "
           << detail::pct(m.conflict_rate()) << " | " << detail::pct(m.completion())
           << " |\n";
    }
    return os.str();
}

inline std::string render_scenario_table(const sim::MetricsTable& t) {
    std::ostringstream os;
    os << "| Scenario | Drift Events | Avg Interactions | Completion Rate |\n";
    os << "|---|---|---|---|\n";
    for (const auto& [name, m] : t.scf_by_scenario) {
        const double avg =
            m.total == 0 ? 0.0 : static_cast<double>(m.interactions) / m.total;
        os << "| " << name << " | " << m.drift_events << " | " << std::fixed
           << std::setprecision(1) << avg << " | " << detail::pct(m.completion()) << " |\n";
    }
    return os.str();
}

inline std::string render_framework_table(const sim::MetricsTable& t) {
    std::ostringstream os;
    os << "| Framework | Precision | Recall | F1 | Completion |\n";
    os << "|---|---|---|---|---|\n";
    for (const auto& [name, m] : t.scf_by_framework) {
        os << "| " << name << " | " << detail::pct(m.precision()) << " | "
           << detail::pct(m.recall()) << " | " << detail::pct(m.f1()) << " | "
           << detail::pct(m.completion()) << " |\n";
    }
    return os.str();
}

inline std::string render_governance_summary(const GovernanceSummary& s) {
    std::ostringstream os;
    os << "# Governance summary\n\n";
    os << "- conflicts: " << s.conflicts_total;
    for (const auto& [type, count] : s.conflicts_by_type)
        os << " (type " << type << ": " << count << ")";
    os << "\n- resolutions by tier:";
    if (s.resolutions_by_tier.empty()) os << " none";
    for (const auto& [tier, count] : s.resolutions_by_tier)
        os << " " << tier << "=" << count;
    os << "\n- escalations: " << s.escalations;
    os << "\n- drift events: " << s.drift_events;
    os << "\n- policy coverage: " << detail::pct(s.policy_coverage) << "\n";
    return os.str();
}

}  // namespace scf
