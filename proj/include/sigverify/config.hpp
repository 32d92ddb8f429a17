#pragma once

#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sigverify/eval.hpp"
#include "sigverify/verifier.hpp"

namespace sigverify {

/// Effective batch configuration: verifier parameters plus the method,
/// normalization and decision threshold used by the CLI.
struct Config {
    VerifierConfig verifier;
    Method method = Method::smdtw;
    Normalization normalization = Normalization::s2;
    double decision_threshold = 0.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Applies one "key = value" setting; unknown keys are errors so that a
/// typoed threshold name cannot silently fall back to a default.
inline void apply_config_entry(Config& cfg, const std::string& key, const std::string& value) {
    if (key == "feature_set") {
        const auto fs = feature_set_from_string(value);
        if (!fs) throw std::invalid_argument("unknown feature set '" + value + "'");
        cfg.verifier.feature_set = *fs;
    } else if (key == "th_lcs") {
        cfg.verifier.thresholds.th_lcs = std::stod(value);
    } else if (key == "th_len") {
        cfg.verifier.thresholds.th_len = std::stoi(value);
    } else if (key == "th_gs") {
        cfg.verifier.thresholds.th_gs = std::stod(value);
    } else if (key == "b0") {
        cfg.verifier.weights.b0 = std::stod(value);
    } else if (key == "b_min") {
        cfg.verifier.weights.b_min = std::stod(value);
    } else if (key == "b_max") {
        cfg.verifier.weights.b_max = std::stod(value);
    } else if (key == "c0") {
        cfg.verifier.weights.c0 = std::stod(value);
    } else if (key == "c_min") {
        cfg.verifier.weights.c_min = std::stod(value);
    } else if (key == "c_max") {
        cfg.verifier.weights.c_max = std::stod(value);
    } else if (key == "n_references") {
        cfg.verifier.n_references = std::stoi(value);
        if (cfg.verifier.n_references < 2)
            throw std::invalid_argument("n_references must be >= 2");
    } else if (key == "unit_weight") {
        cfg.verifier.unit_weight = value == "1" || value == "true";
    } else if (key == "method") {
        if (value == "dtw")
            cfg.method = Method::dtw;
        else if (value == "smdtw")
            cfg.method = Method::smdtw;
        else
            throw std::invalid_argument("unknown method '" + value + "'");
    } else if (key == "normalization") {
        if (value == "s1")
            cfg.normalization = Normalization::s1;
        else if (value == "s2")
            cfg.normalization = Normalization::s2;
        else
            throw std::invalid_argument("unknown normalization '" + value + "'");
    } else if (key == "threshold") {
        cfg.decision_threshold = std::stod(value);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

/// Line-oriented "key = value" file; '#' starts a comment.
inline void parse_config_file(Config& cfg, std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        try {
            apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                               detail::trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
}

/// The effective configuration, echoed as comment lines into output files.
inline std::string config_header(const Config& cfg) {
    std::ostringstream oss;
    oss << "# feature_set=" << to_string(cfg.verifier.feature_set)
        << " method=" << to_string(cfg.method)
        << " normalization=" << to_string(cfg.normalization)
        << " n_references=" << cfg.verifier.n_references << "\n";
    oss << "# th_lcs=" << cfg.verifier.thresholds.th_lcs
        << " th_len=" << cfg.verifier.thresholds.th_len
        << " th_gs=" << cfg.verifier.thresholds.th_gs << "\n";
    oss << "# b0=" << cfg.verifier.weights.b0 << " b_min=" << cfg.verifier.weights.b_min
        << " b_max=" << cfg.verifier.weights.b_max << " c0=" << cfg.verifier.weights.c0
        << " c_min=" << cfg.verifier.weights.c_min << " c_max=" << cfg.verifier.weights.c_max
        << "\n";
    oss << "# threshold=" << cfg.decision_threshold << "\n";
    return oss.str();
}

}  // namespace sigverify
