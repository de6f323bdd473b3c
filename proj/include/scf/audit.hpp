#pragma once

// Hash-chained append-only audit log.
//
// Invariants:
//   - seq is gapless from 1 within a log; records are never mutated.
//   - hash = SHA-256 over the canonical JSON of the record without its
//     `hash` field; prev_hash = previous record's hash (genesis: 64 zeros).
//   - format is JSON Lines, one record per line, UTF-8.

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "scf/errors.hpp"
#include "scf/hash.hpp"

namespace scf {

enum class AuditKind {
    IntentRegistered,
    ConflictDetected,
    Resolution,
    Escalation,
    DriftEvent,
    Resync,
    Commit,
    Abort,
};

inline const char* to_string(AuditKind k) {
    switch (k) {
        case AuditKind::IntentRegistered: return "intent-registered";
        case AuditKind::ConflictDetected: return "conflict-detected";
        case AuditKind::Resolution: return "resolution";
        case AuditKind::Escalation: return "escalation";
        case AuditKind::DriftEvent: return "drift-event";
        case AuditKind::Resync: return "resync";
        case AuditKind::Commit: return "commit";
        case AuditKind::Abort: return "abort";
    }
    return "?";
}

struct AuditRecord {
    std::uint64_t seq = 0;
    std::string workflow_id;
    std::string kind;
    nlohmann::json payload;
    std::string prev_hash;
    std::string hash;

    // Canonical bytes hashed into `hash` (the record without it). nlohmann
    // serializes object keys sorted, so dump() is stable.
    std::string canonical_bytes() const {
        nlohmann::json j{{"seq", seq},
                         {"workflow_id", workflow_id},
                         {"kind", kind},
                         {"payload", payload},
                         {"prev_hash", prev_hash}};
        return j.dump();
    }

    nlohmann::json to_json() const {
        return {{"seq", seq},     {"workflow_id", workflow_id}, {"kind", kind},
                {"payload", payload}, {"prev_hash", prev_hash},     {"hash", hash}};
    }

    static AuditRecord from_json(const nlohmann::json& j) {
        AuditRecord r;
        r.seq = j.at("seq").get<std::uint64_t>();
        r.workflow_id = j.at("workflow_id").get<std::string>();
        r.kind = j.at("kind").get<std::string>();
        r.payload = j.at("payload");
        r.prev_hash = j.at("prev_hash").get<std::string>();
        r.hash = j.at("hash").get<std::string>();
        return r;
    }
};

struct VerifyResult {
    bool ok = true;
    std::uint64_t broken_seq = 0;  // first breached seq when !ok
};

inline VerifyResult verify_records(const std::vector<AuditRecord>& records) {
    std::string prev = zero_digest();
    std::uint64_t expect_seq = 1;
    for (const auto& r : records) {
        if (r.seq != expect_seq || r.prev_hash != prev ||
            r.hash != sha256_hex(r.canonical_bytes()))
            return {false, r.seq};
        prev = r.hash;
        ++expect_seq;
    }
    return {true, 0};
}

struct GovernanceSummary {
    std::map<int, int> conflicts_by_type;
    std::map<std::string, int> resolutions_by_tier;  // escalations excluded
    int conflicts_total = 0;
    int escalations = 0;
    int drift_events = 0;  // triggered resyncs only
    double policy_coverage = 0.0;  // fraction of conflicts resolved at tier 1
};

inline GovernanceSummary summarize_records(const std::vector<AuditRecord>& records) {
    const auto v = verify_records(records);
    if (!v.ok) throw ChainBrokenError(v.broken_seq);
    GovernanceSummary s;
    for (const auto& r : records) {
        if (r.kind == "conflict-detected") {
            ++s.conflicts_total;
            ++s.conflicts_by_type[r.payload.value("type", 0)];
        } else if (r.kind == "resolution") {
            ++s.resolutions_by_tier[r.payload.value("tier", std::string("unknown"))];
        } else if (r.kind == "escalation") {
            ++s.escalations;
        } else if (r.kind == "drift-event") {
            if (r.payload.value("triggered_resync", false)) ++s.drift_events;
        }
    }
    const int tier1 = s.resolutions_by_tier.count("policy") ? s.resolutions_by_tier.at("policy") : 0;
    s.policy_coverage =
        s.conflicts_total == 0 ? 0.0 : static_cast<double>(tier1) / s.conflicts_total;
    return s;
}

// Append-only writer. Keeps records in memory; optionally mirrors each record
// to a JSONL file, flushed per append.
class AuditLog {
public:
    explicit AuditLog(std::string workflow_id = "", std::string file_path = "")
        : workflow_id_(std::move(workflow_id)) {
        if (!file_path.empty()) {
            std::filesystem::path p(file_path);
            if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
            out_.open(file_path, std::ios::trunc);
            if (!out_) throw IoError("cannot open audit log file: " + file_path);
            to_file_ = true;
        }
    }

    const AuditRecord& append(AuditKind kind, nlohmann::json payload) {
        AuditRecord r;
        r.seq = records_.size() + 1;
        r.workflow_id = workflow_id_;
        r.kind = to_string(kind);
        r.payload = std::move(payload);
        r.prev_hash = records_.empty() ? zero_digest() : records_.back().hash;
        r.hash = sha256_hex(r.canonical_bytes());
        if (to_file_) {
            out_ << r.to_json().dump() << '\n';
            out_.flush();
            if (!out_) throw IoError("audit log write failed");
        }
        records_.push_back(std::move(r));
        return records_.back();
    }

    const std::vector<AuditRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    std::string head_hash() const { return records_.empty() ? zero_digest() : records_.back().hash; }

    VerifyResult verify() const { return verify_records(records_); }
    GovernanceSummary summarize() const { return summarize_records(records_); }

private:
    std::string workflow_id_;
    std::vector<AuditRecord> records_;
    std::ofstream out_;
    bool to_file_ = false;
};

inline std::vector<AuditRecord> load_audit_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open audit log file: " + path);
    std::vector<AuditRecord> records;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            // Unparseable line: report the breach at the seq this line should hold.
            AuditRecord bad;
            bad.seq = lineno;
            bad.hash = "unparseable";
            records.push_back(std::move(bad));
            continue;
        }
        records.push_back(AuditRecord::from_json(j));
    }
    return records;
}

inline VerifyResult verify_file(const std::string& path) {
    return verify_records(load_audit_file(path));
}

// Every conflict-detected record must pair with exactly one later resolution
// or escalation record carrying the same conflict id.
inline bool audit_complete(const std::vector<AuditRecord>& records, std::string* why = nullptr) {
    std::map<std::string, int> outcomes;
    std::vector<std::string> detected_order;
    std::map<std::string, bool> seen;
    for (const auto& r : records) {
        if (r.kind == "conflict-detected") {
            const std::string id = r.payload.value("id", std::string());
            if (seen.count(id)) {
                if (why) *why = "duplicate conflict-detected id " + id;
                return false;
            }
            seen[id] = true;
            detected_order.push_back(id);
            outcomes[id] = 0;
        } else if (r.kind == "resolution" || r.kind == "escalation") {
            const std::string id = r.payload.value("conflict_id", std::string());
            if (!seen.count(id)) {
                if (why) *why = "outcome for unknown conflict " + id;
                return false;
            }
            ++outcomes[id];
        }
    }
    for (const auto& id : detected_order) {
        if (outcomes[id] != 1) {
            if (why)
                *why = "conflict " + id + " has " + std::to_string(outcomes[id]) + " outcomes";
            return false;
        }
    }
    // Commits and aborts must reference an earlier intent registration.
    std::map<std::string, bool> registered;
    for (const auto& r : records) {
        if (r.kind == "intent-registered") {
            registered[r.payload.value("id", std::string())] = true;
        } else if (r.kind == "commit" || r.kind == "abort") {
            const std::string id = r.payload.value("intent_id", std::string());
            if (!registered.count(id)) {
                if (why) *why = r.kind + " references unregistered intent " + id;
                return false;
            }
        }
    }
    return true;
}

}  // namespace scf
