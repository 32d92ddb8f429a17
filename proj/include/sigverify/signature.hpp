#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sigverify {

/// Error raised by the text parsers; the message carries a 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class Label { genuine, skilled_forgery, random_forgery, unknown };

inline std::string to_string(Label l) {
    switch (l) {
        case Label::genuine: return "genuine";
        case Label::skilled_forgery: return "skilled_forgery";
        case Label::random_forgery: return "random_forgery";
        default: return "unknown";
    }
}

inline std::optional<Label> label_from_string(const std::string& s) {
    if (s == "genuine") return Label::genuine;
    if (s == "skilled_forgery") return Label::skilled_forgery;
    if (s == "random_forgery") return Label::random_forgery;
    if (s == "unknown") return Label::unknown;
    return std::nullopt;
}

/// One pen sample: time in milliseconds, position and pressure in device units.
/// Pressure 0 means pen up.
struct SamplePoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double p = 0.0;

    bool operator==(const SamplePoint&) const = default;
};

/// A time-ordered pen trajectory with identity metadata.
/// Invariants: at least 2 samples, strictly increasing timestamps, p >= 0.
struct Signature {
    std::string writer_id;
    std::string specimen_id;
    Label label = Label::unknown;
    std::vector<SamplePoint> samples;

    bool operator==(const Signature&) const = default;
};

namespace detail {

inline void check_invariants(const Signature& sig) {
    if (sig.samples.size() < 2)
        throw std::invalid_argument("signature needs at least 2 samples");
    for (std::size_t i = 0; i < sig.samples.size(); ++i) {
        const auto& s = sig.samples[i];
        if (!(s.p >= 0.0)) throw std::invalid_argument("negative pressure");
        if (!std::isfinite(s.t)) throw std::invalid_argument("non-finite timestamp");
        if (i > 0 && !(s.t > sig.samples[i - 1].t))
            throw std::invalid_argument("timestamps not strictly increasing");
    }
}

inline std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

inline double parse_number(const std::string& tok, std::size_t line) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(line, "non-numeric field '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(line, "non-numeric field '" + tok + "'");
    return v;
}

}  // namespace detail

/// Canonical signature format.
///
/// Line 1:  writer=<id> specimen=<id> label=<...> count=<k> [rate=<hz>]
/// Then k lines "t x y p", or "x y p" when a sampling rate is declared
/// (timestamps are synthesized as i * 1000 / rate milliseconds).
inline Signature parse_canonical(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ParseError(1, "missing header");

    Signature sig;
    std::size_t count = 0;
    bool have_count = false;
    std::optional<double> rate;
    for (const auto& tok : detail::split_ws(header)) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError(1, "malformed header field '" + tok + "'");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "writer") {
            sig.writer_id = val;
        } else if (key == "specimen") {
            sig.specimen_id = val;
        } else if (key == "label") {
            auto l = label_from_string(val);
            if (!l) throw ParseError(1, "unknown label '" + val + "'");
            sig.label = *l;
        } else if (key == "count") {
            count = static_cast<std::size_t>(detail::parse_number(val, 1));
            have_count = true;
        } else if (key == "rate") {
            rate = detail::parse_number(val, 1);
            if (*rate <= 0.0) throw ParseError(1, "rate must be positive");
        } else {
            throw ParseError(1, "unknown header key '" + key + "'");
        }
    }
    if (sig.writer_id.empty() || sig.specimen_id.empty() || !have_count)
        throw ParseError(1, "header must declare writer, specimen, label and count");

    std::string line;
    std::size_t lineno = 1;
    while (sig.samples.size() < count && std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        const std::size_t want = rate ? 3 : 4;
        if (toks.size() != want)
            throw ParseError(lineno, "expected " + std::to_string(want) + " fields, got " +
                                         std::to_string(toks.size()));
        SamplePoint s;
        std::size_t k = 0;
        if (rate) {
            s.t = static_cast<double>(sig.samples.size()) * 1000.0 / *rate;
        } else {
            s.t = detail::parse_number(toks[k++], lineno);
        }
        s.x = detail::parse_number(toks[k++], lineno);
        s.y = detail::parse_number(toks[k++], lineno);
        s.p = detail::parse_number(toks[k++], lineno);
        if (s.p < 0.0) throw ParseError(lineno, "negative pressure");
        if (!sig.samples.empty() && !(s.t > sig.samples.back().t))
            throw ParseError(lineno, "non-monotone timestamp");
        sig.samples.push_back(s);
    }
    if (sig.samples.size() != count) throw ParseError(lineno, "sample count mismatch");
    if (count < 2) throw ParseError(1, "fewer than 2 samples");
    detail::check_invariants(sig);
    return sig;
}

inline Signature parse_canonical(const std::string& text) {
    std::istringstream iss(text);
    return parse_canonical(iss);
}

/// Writes the canonical "t x y p" form with full double precision, so that
/// parse(serialize(sig)) == sig.
inline void serialize_canonical(const Signature& sig, std::ostream& out) {
    out.precision(17);
    out << "writer=" << sig.writer_id << " specimen=" << sig.specimen_id
        << " label=" << to_string(sig.label) << " count=" << sig.samples.size() << "\n";
    for (const auto& s : sig.samples) out << s.t << " " << s.x << " " << s.y << " " << s.p << "\n";
}

inline std::string serialize_canonical(const Signature& sig) {
    std::ostringstream oss;
    serialize_canonical(sig, oss);
    return oss.str();
}

/// SVC2004 layout: first line is the point count, then "x y t pen-status"
/// per line with pen-status in {0, 1}.
inline Signature parse_svc2004(std::istream& in, const std::string& writer_id = "svc",
                               const std::string& specimen_id = "0") {
    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "missing point count");
    auto head = detail::split_ws(line);
    if (head.size() != 1) throw ParseError(1, "expected a single point count");
    const auto count = static_cast<std::size_t>(detail::parse_number(head[0], 1));

    Signature sig;
    sig.writer_id = writer_id;
    sig.specimen_id = specimen_id;
    std::size_t lineno = 1;
    while (sig.samples.size() < count && std::getline(in, line)) {
        ++lineno;
        auto toks = detail::split_ws(line);
        if (toks.empty()) continue;
        if (toks.size() != 4) throw ParseError(lineno, "expected 4 fields");
        SamplePoint s;
        s.x = detail::parse_number(toks[0], lineno);
        s.y = detail::parse_number(toks[1], lineno);
        s.t = detail::parse_number(toks[2], lineno);
        const double pen = detail::parse_number(toks[3], lineno);
        if (pen != 0.0 && pen != 1.0) throw ParseError(lineno, "invalid pen status");
        s.p = pen;
        if (!sig.samples.empty() && !(s.t > sig.samples.back().t))
            throw ParseError(lineno, "non-monotone timestamp");
        sig.samples.push_back(s);
    }
    if (sig.samples.size() != count) throw ParseError(lineno, "sample count mismatch");
    if (count < 2) throw ParseError(1, "fewer than 2 samples");
    detail::check_invariants(sig);
    return sig;
}

inline Signature parse_svc2004(const std::string& text, const std::string& writer_id = "svc",
                               const std::string& specimen_id = "0") {
    std::istringstream iss(text);
    return parse_svc2004(iss, writer_id, specimen_id);
}

/// Deterministic synthetic signature: n_strokes smooth arcs (alternating
/// circular arcs and straight segments) joined by short pen-up hops, with
/// Gaussian positional jitter of the given standard deviation.
///
/// The arc layout depends only on the seed, so the same seed with a
/// different jitter perturbs the same template.
inline Signature synth_signature(std::uint64_t seed, int n_strokes, double jitter) {
    if (n_strokes < 1) throw std::invalid_argument("n_strokes must be >= 1");
    if (jitter < 0.0) throw std::invalid_argument("jitter must be non-negative");

    std::mt19937_64 shape_rng(seed * 0x9e3779b97f4a7c15ULL + 1);
    std::mt19937_64 noise_rng(seed * 0xc2b2ae3d27d4eb4fULL + 2);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Signature sig;
    sig.writer_id = "synthetic";
    sig.specimen_id = "seed" + std::to_string(seed);

    const double dt = 10.0;  // ms between samples
    double t = 0.0;
    double px = 0.0, py = 0.0;
    auto push = [&](double x, double y, double pressure) {
        sig.samples.push_back({t, x, y, pressure});
        t += dt;
        px = x;
        py = y;
    };

    push(0.0, 0.0, 400.0);
    for (int k = 0; k < n_strokes; ++k) {
        const int pts = 20 + static_cast<int>(uni(shape_rng) * 12);
        const double pressure = 300.0 + 400.0 * uni(shape_rng);
        const double sx = px, sy = py;
        if (k % 2 == 0) {
            // circular arc
            const double radius = 30.0 + 50.0 * uni(shape_rng);
            const double a0 = 2.0 * M_PI * uni(shape_rng);
            const double sweep = (uni(shape_rng) < 0.5 ? -1.0 : 1.0) *
                                 (0.8 * M_PI + 0.9 * M_PI * uni(shape_rng));
            const double cx = sx - radius * std::cos(a0);
            const double cy = sy - radius * std::sin(a0);
            for (int i = 1; i <= pts; ++i) {
                const double a = a0 + sweep * i / pts;
                push(cx + radius * std::cos(a), cy + radius * std::sin(a), pressure);
            }
        } else {
            // straight segment
            const double ang = 2.0 * M_PI * uni(shape_rng);
            const double len = 40.0 + 60.0 * uni(shape_rng);
            for (int i = 1; i <= pts; ++i)
                push(sx + len * std::cos(ang) * i / pts, sy + len * std::sin(ang) * i / pts,
                     pressure);
        }
        if (k + 1 < n_strokes) {
            // pen-up hop towards the next stroke start; kept long enough that
            // the hop never collapses to a single raster cell
            const double hx = px + (uni(shape_rng) < 0.5 ? -1.0 : 1.0) * (8.0 + 12.0 * uni(shape_rng));
            const double hy = py + (uni(shape_rng) < 0.5 ? -1.0 : 1.0) * (8.0 + 12.0 * uni(shape_rng));
            const double ex = px, ey = py;
            for (int i = 1; i <= 3; ++i) {
                const double f = static_cast<double>(i) / 3.0;
                push(ex + (hx - ex) * f, ey + (hy - ey) * f, 0.0);
            }
        }
    }

    // Jitter is drawn unconditionally so the noise stream is shared between
    // jitter levels; jitter = 0 leaves the template untouched.
    for (auto& s : sig.samples) {
        const double nx = gauss(noise_rng), ny = gauss(noise_rng);
        s.x += jitter * nx;
        s.y += jitter * ny;
    }
    detail::check_invariants(sig);
    return sig;
}

/// Adds independent Gaussian positional noise, for building corpora where
/// many distinct specimens share one template.
inline Signature perturb(const Signature& sig, double sigma, std::uint64_t seed) {
    if (sigma < 0.0) throw std::invalid_argument("sigma must be non-negative");
    std::mt19937_64 rng(seed * 0xd6e8feb86659fd93ULL + 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Signature out = sig;
    for (auto& s : out.samples) {
        s.x += sigma * gauss(rng);
        s.y += sigma * gauss(rng);
    }
    return out;
}

}  // namespace sigverify
