#pragma once

// Check records and the top-level report. Field elements are emitted as
// strings; nothing time-dependent is recorded, so equal runs give equal bytes.

#include <string>
#include <vector>

#include <json.hpp>

#include "bipoly.hpp"

namespace bijac {

using Json = nlohmann::ordered_json;

enum class Verdict { pass, fail, undecided, vacuous_pass };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        case Verdict::undecided: return "undecided";
        case Verdict::vacuous_pass: return "vacuous-pass";
    }
    return "?";
}

inline bool passing(Verdict v) { return v == Verdict::pass || v == Verdict::vacuous_pass; }

struct CheckRecord {
    std::string name;
    Json inputs = Json::object();
    Json outputs = Json::object();
    Verdict verdict = Verdict::undecided;

    Json to_json() const {
        Json j;
        j["name"] = name;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["verdict"] = to_string(verdict);
        return j;
    }
};

/// fail dominates undecided, which dominates pass; all-vacuous stays vacuous.
inline Verdict combine(const std::vector<CheckRecord>& checks) {
    bool any_fail = false, any_undecided = false, any_pass = false;
    for (const auto& c : checks) {
        any_fail |= c.verdict == Verdict::fail;
        any_undecided |= c.verdict == Verdict::undecided;
        any_pass |= c.verdict == Verdict::pass;
    }
    if (any_fail) return Verdict::fail;
    if (any_undecided) return Verdict::undecided;
    if (!any_pass && !checks.empty()) return Verdict::vacuous_pass;
    return Verdict::pass;
}

inline int exit_code(Verdict v) {
    switch (v) {
        case Verdict::fail: return 1;
        case Verdict::undecided: return 3;
        default: return 0;
    }
}

struct CertReport {
    Json config = Json::object();
    Json curve = Json::object();
    std::vector<CheckRecord> checks;
    Verdict verdict = Verdict::pass;

    Json to_json() const {
        Json j;
        j["config"] = config;
        j["curve"] = curve;
        j["checks"] = Json::array();
        for (const auto& c : checks) j["checks"].push_back(c.to_json());
        j["verdict"] = to_string(verdict);
        return j;
    }
};

inline Json to_json(BiDegree d) { return Json::array({d.a, d.b}); }

}  // namespace bijac
