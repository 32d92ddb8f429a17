#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sigverify/verifier.hpp"

namespace sigverify {

enum class Protocol { rf, sf };

inline std::string to_string(Protocol p) { return p == Protocol::rf ? "rf" : "sf"; }

struct ExperimentSpec {
    Protocol protocol = Protocol::rf;
    Method method = Method::smdtw;
    Normalization normalization = Normalization::s2;
    VerifierConfig config;
};

struct ScoreRow {
    std::string writer_id;
    std::string specimen_id;
    Label label = Label::unknown;
    double score = 0.0;
};

struct ScorePool {
    std::vector<double> genuine_scores;
    std::vector<double> impostor_scores;
    std::vector<ScoreRow> rows;  // per-score metadata, deterministic order
};

/// Runs the RF/SF protocol: per writer, enroll the first n_references
/// genuines (lexicographic specimen order), score the remaining genuines,
/// and score as impostors either the writer's skilled forgeries (SF) or the
/// first genuine of every other writer (RF).
inline ScorePool run_experiment(const std::vector<Signature>& dataset,
                                const ExperimentSpec& spec) {
    const int n_ref = spec.config.n_references;
    if (n_ref < 2) throw std::invalid_argument("n_references must be >= 2");

    std::map<std::string, std::vector<const Signature*>> genuines, forgeries;
    for (const auto& sig : dataset) {
        if (sig.label == Label::genuine)
            genuines[sig.writer_id].push_back(&sig);
        else if (sig.label == Label::skilled_forgery)
            forgeries[sig.writer_id].push_back(&sig);
    }
    auto by_specimen = [](const Signature* a, const Signature* b) {
        return a->specimen_id < b->specimen_id;
    };
    for (auto& [w, v] : genuines) std::sort(v.begin(), v.end(), by_specimen);
    for (auto& [w, v] : forgeries) std::sort(v.begin(), v.end(), by_specimen);

    for (const auto& [writer, v] : genuines)
        if (static_cast<int>(v.size()) < n_ref)
            throw std::invalid_argument("writer " + writer + " has fewer than " +
                                        std::to_string(n_ref) + " genuine signatures");
    if (spec.protocol == Protocol::sf && forgeries.empty())
        throw std::invalid_argument("SF protocol requires skilled-forgery specimens");

    ScorePool pool;
    for (const auto& [writer, gens] : genuines) {
        std::vector<Signature> refs;
        for (int i = 0; i < n_ref; ++i) refs.push_back(*gens[static_cast<std::size_t>(i)]);
        const auto rs = enroll(refs, spec.config);

        auto push = [&](const Signature& q, bool genuine) {
            const double s = score(q, rs, spec.method, spec.normalization).score;
            (genuine ? pool.genuine_scores : pool.impostor_scores).push_back(s);
            pool.rows.push_back({writer, q.specimen_id, q.label, s});
        };

        for (std::size_t i = static_cast<std::size_t>(n_ref); i < gens.size(); ++i)
            push(*gens[i], true);

        if (spec.protocol == Protocol::sf) {
            for (const auto* f : forgeries[writer]) push(*f, false);
        } else {
            for (const auto& [other, ogens] : genuines)
                if (other != writer) push(*ogens.front(), false);
        }
    }
    return pool;
}

namespace detail {

// FAR(t) = fraction of impostor scores <= t (accepted);
// FRR(t) = fraction of genuine scores > t (rejected).
inline std::pair<double, double> far_frr(const ScorePool& pool, double threshold) {
    double fa = 0.0, fr = 0.0;
    for (double s : pool.impostor_scores)
        if (s <= threshold) fa += 1.0;
    for (double s : pool.genuine_scores)
        if (s > threshold) fr += 1.0;
    return {fa / static_cast<double>(pool.impostor_scores.size()),
            fr / static_cast<double>(pool.genuine_scores.size())};
}

}  // namespace detail

/// Equal error rate: thresholds sweep the sorted union of scores; the
/// FAR/FRR crossing is linearly interpolated between bracketing thresholds.
inline double eer(const ScorePool& pool) {
    if (pool.genuine_scores.empty() || pool.impostor_scores.empty())
        throw std::invalid_argument("both score lists must be nonempty");

    std::vector<double> thresholds = pool.genuine_scores;
    thresholds.insert(thresholds.end(), pool.impostor_scores.begin(),
                      pool.impostor_scores.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    double prev_far = 0.0, prev_frr = 1.0;  // below every threshold
    bool have_prev = false;
    for (double t : thresholds) {
        const auto [far, frr] = detail::far_frr(pool, t);
        if (far == frr) return far;
        if (far > frr) {
            if (!have_prev) return (far + frr) / 2.0;
            // linear interpolation of the crossing between the two samples
            const double denom = (far - frr) - (prev_far - prev_frr);
            const double f = denom != 0.0 ? (0.0 - (prev_far - prev_frr)) / denom : 0.5;
            return prev_far + f * (far - prev_far);
        }
        prev_far = far;
        prev_frr = frr;
        have_prev = true;
    }
    // FAR never reached FRR within the sampled range
    return (prev_far + prev_frr) / 2.0;
}

/// One (FAR, FRR) point per distinct threshold, ordered so FAR is
/// nonincreasing while FRR is nondecreasing.
inline std::vector<std::pair<double, double>> det_points(const ScorePool& pool) {
    if (pool.genuine_scores.empty() || pool.impostor_scores.empty())
        throw std::invalid_argument("both score lists must be nonempty");
    std::vector<double> thresholds = pool.genuine_scores;
    thresholds.insert(thresholds.end(), pool.impostor_scores.begin(),
                      pool.impostor_scores.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    std::vector<std::pair<double, double>> out;
    for (double t : thresholds) out.push_back(detail::far_frr(pool, t));
    return out;
}

/// Relative EER improvement of SM over the baseline, as a percentage;
/// nullopt when the baseline is zero.
inline std::optional<double> improvement_percent(double eer_baseline, double eer_sm) {
    if (eer_baseline == 0.0) return std::nullopt;
    return (eer_baseline - eer_sm) / eer_baseline * 100.0;
}

struct EerPair {
    double baseline = 0.0;
    double sm = 0.0;
};

struct ReportRow {
    std::string feature_set;
    std::optional<EerPair> rf;
    std::optional<EerPair> sf;
};

/// Result table shaped like the per-feature-set EER tables: baseline, SM and
/// improvement columns for RF and SF.
inline std::string report_table(const std::vector<ReportRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("no rows");
    std::ostringstream oss;
    oss << std::fixed << std::setprecision(2);
    auto delta = [&](const std::optional<EerPair>& p) -> std::string {
        if (!p) return "-";
        const auto d = improvement_percent(p->baseline, p->sm);
        if (!d) return "n/a";
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << *d << "%";
        return cell.str();
    };
    auto num = [&](const std::optional<EerPair>& p, bool baseline) -> std::string {
        if (!p) return "-";
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << (baseline ? p->baseline : p->sm);
        return cell.str();
    };
    oss << "features,rf_baseline,rf_sm,rf_improvement,sf_baseline,sf_sm,sf_improvement\n";
    for (const auto& r : rows) {
        oss << r.feature_set << "," << num(r.rf, true) << "," << num(r.rf, false) << ","
            << delta(r.rf) << "," << num(r.sf, true) << "," << num(r.sf, false) << ","
            << delta(r.sf) << "\n";
    }
    return oss.str();
}

}  // namespace sigverify
