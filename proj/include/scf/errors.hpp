#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace scf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SyntaxError : Error {
    using Error::Error;
};

// One schema violation with a path into the source document,
// e.g. "entity_types[0].transitions[3].to".
struct Violation {
    std::string path;
    std::string message;
};

struct ValidationError : Error {
    std::vector<Violation> violations;

    explicit ValidationError(std::vector<Violation> v)
        : Error(join(v)), violations(std::move(v)) {}

private:
    static std::string join(const std::vector<Violation>& v) {
        std::string out = "validation failed (" + std::to_string(v.size()) + " violation(s))";
        for (const auto& x : v) out += "\n  " + x.path + ": " + x.message;
        return out;
    }
};

struct UnknownEntityType : Error {
    using Error::Error;
};
struct UnknownRole : Error {
    using Error::Error;
};
struct UnknownNode : Error {
    using Error::Error;
};
struct DuplicateId : Error {
    using Error::Error;
};
struct NonMonotonicTimestamp : Error {
    using Error::Error;
};
struct IllegalStatusTransition : Error {
    using Error::Error;
};
struct MissingCapacity : Error {
    using Error::Error;
};
struct StaleConflict : Error {
    using Error::Error;
};
struct WinnerNotCommitted : Error {
    using Error::Error;
};
struct ChainBrokenError : Error {
    std::uint64_t seq;
    explicit ChainBrokenError(std::uint64_t s)
        : Error("audit chain broken at seq " + std::to_string(s)), seq(s) {}
};
struct IoError : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};
struct InvariantBreach : Error {
    using Error::Error;
};

}  // namespace scf
