// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace hjhom {

enum class CheckStatus { Pass, Fail, Inconclusive };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}

// Machine-readable record of one executable property check.
struct VerificationReport {
    std::string check_name;
    CheckStatus status = CheckStatus::Pass;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    // (location description, measured value) for the worst offenders.
    std::vector<std::pair<std::string, double>> witnesses;
    std::string config_hash;

    bool passed() const { return status == CheckStatus::Pass; }

    // Set status from the measured violation; Inconclusive must be set
    // explicitly by checks whose error bars straddle the threshold.
    void finalize() {
        if (status == CheckStatus::Inconclusive) return;
        status = worst_violation <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    }

    nlohmann::json to_json() const {
        nlohmann::json w = nlohmann::json::array();
        for (const auto& [loc, val] : witnesses) w.push_back({{"location", loc}, {"value", val}});
        return {{"check", check_name},
                {"status", to_string(status)},
                {"worst_violation", worst_violation},
                {"tolerance", tolerance},
                {"witnesses", w},
                {"config_hash", config_hash}};
    }
};

// FNV-1a over a string; stable across platforms, used for config hashes.
inline std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace hjhom
