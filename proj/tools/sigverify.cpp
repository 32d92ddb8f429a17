// Command-line front end: enrollment, single-signature verification, the
// RF/SF evaluation protocol, debug dumps and synthetic corpus generation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigverify/config.hpp"
#include "sigverify/dtw.hpp"
#include "sigverify/eval.hpp"
#include "sigverify/segmentation.hpp"
#include "sigverify/signature.hpp"
#include "sigverify/stability.hpp"
#include "sigverify/verifier.hpp"

namespace fs = std::filesystem;
using namespace sigverify;

namespace {

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitError = 2;

std::vector<fs::path> list_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    return files;
}

Signature read_signature(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return parse_canonical(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

// write-to-temp then rename, so partial output never lands at the target
void write_atomically(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> kv;
    std::string feature_set, method, normalization;
    int references = 0;
    double threshold = 0.0;
    CLI::App* cmd = nullptr;

    bool any() const {
        return !config_path.empty() || !kv.empty() || cmd->count("--feature-set") ||
               cmd->count("--method") || cmd->count("--normalization") ||
               cmd->count("--references") || cmd->count("--threshold");
    }
};

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    f.cmd = cmd;
    cmd->add_option("--config", f.config_path, "key = value configuration file");
    cmd->add_option("--set", f.kv, "override a single config entry as key=value");
    cmd->add_option("--feature-set", f.feature_set, "feature set F1..F15");
    cmd->add_option("--method", f.method, "dtw or smdtw");
    cmd->add_option("--normalization", f.normalization, "s1 or s2");
    cmd->add_option("--references", f.references, "number of reference signatures");
    cmd->add_option("--threshold", f.threshold, "decision threshold");
}

// config file first, then flag overrides
Config make_config(const ConfigFlags& f) {
    Config cfg;
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) throw std::runtime_error("cannot open config " + f.config_path);
        parse_config_file(cfg, in);
    }
    for (const auto& entry : f.kv) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw std::runtime_error("--set expects key=value");
        apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (f.cmd->count("--feature-set")) apply_config_entry(cfg, "feature_set", f.feature_set);
    if (f.cmd->count("--method")) apply_config_entry(cfg, "method", f.method);
    if (f.cmd->count("--normalization"))
        apply_config_entry(cfg, "normalization", f.normalization);
    if (f.cmd->count("--references"))
        apply_config_entry(cfg, "n_references", std::to_string(f.references));
    if (f.cmd->count("--threshold")) cfg.decision_threshold = f.threshold;
    return cfg;
}

int cmd_enroll(const std::string& ref_dir, const std::string& out_path, const Config& cfg) {
    const auto files = list_files(ref_dir);
    if (static_cast<int>(files.size()) < cfg.verifier.n_references)
        throw std::runtime_error("need at least " + std::to_string(cfg.verifier.n_references) +
                                 " reference files, found " + std::to_string(files.size()));
    std::vector<Signature> refs;
    for (const auto& f : files) refs.push_back(read_signature(f));
    for (const auto& r : refs)
        if (r.writer_id != refs.front().writer_id)
            throw std::runtime_error("mixed writers in " + ref_dir);
    refs.resize(static_cast<std::size_t>(cfg.verifier.n_references));
    const auto rs = enroll(refs, cfg.verifier);
    std::ostringstream oss;
    save_reference_set(rs, oss);
    write_atomically(out_path, oss.str());
    std::cout << "enrolled writer " << rs.writer_id << " with " << refs.size()
              << " references -> " << out_path << "\n";
    return kExitAccept;
}

ReferenceSet load_refset(const std::string& path, const Config& cfg, bool apply_cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open refset " + path);
    auto rs = load_reference_set(in);
    if (apply_cfg && (rs.config.feature_set != cfg.verifier.feature_set ||
                      rs.config.unit_weight != cfg.verifier.unit_weight)) {
        // config overrides invalidate the cached statistics; re-enroll
        rs = enroll(rs.references, cfg.verifier);
    }
    return rs;
}

int cmd_verify(const std::string& refset_path, const std::string& questioned_path,
               const Config& cfg, bool has_overrides) {
    const auto rs = load_refset(refset_path, cfg, has_overrides);
    const auto q = read_signature(questioned_path);
    const auto rep = score(q, rs, cfg.method, cfg.normalization);
    std::cout << csv_row(rep, cfg.decision_threshold) << "\n";
    return decide(rep, cfg.decision_threshold) ? kExitAccept : kExitReject;
}

int cmd_evaluate(const std::string& dataset_dir, const std::string& out_dir,
                 Protocol protocol, const Config& cfg) {
    std::vector<Signature> dataset;
    for (const auto& f : list_files(dataset_dir)) dataset.push_back(read_signature(f));

    ExperimentSpec spec;
    spec.protocol = protocol;
    spec.method = cfg.method;
    spec.normalization = cfg.normalization;
    spec.config = cfg.verifier;

    const auto pool = run_experiment(dataset, spec);
    const double selected_eer = eer(pool);

    // the other method, for the baseline/SM improvement table
    ExperimentSpec other = spec;
    other.method = spec.method == Method::dtw ? Method::smdtw : Method::dtw;
    const double other_eer = eer(run_experiment(dataset, other));
    const double eer_bl = spec.method == Method::dtw ? selected_eer : other_eer;
    const double eer_sm = spec.method == Method::dtw ? other_eer : selected_eer;

    fs::create_directories(out_dir);
    const std::string header = config_header(cfg) + "# protocol=" + to_string(protocol) + "\n";

    {
        std::ostringstream oss;
        oss << header << "writer,specimen,label,score\n";
        oss.precision(12);
        for (const auto& r : pool.rows)
            oss << r.writer_id << "," << r.specimen_id << "," << to_string(r.label) << ","
                << r.score << "\n";
        write_atomically(fs::path(out_dir) / "scores.csv", oss.str());
    }
    {
        std::ostringstream oss;
        oss << header << "far,frr\n";
        oss.precision(12);
        for (const auto& [far, frr] : det_points(pool)) oss << far << "," << frr << "\n";
        write_atomically(fs::path(out_dir) / "det.csv", oss.str());
    }
    {
        ReportRow row;
        row.feature_set = to_string(cfg.verifier.feature_set);
        EerPair pair{eer_bl * 100.0, eer_sm * 100.0};
        if (protocol == Protocol::rf)
            row.rf = pair;
        else
            row.sf = pair;
        write_atomically(fs::path(out_dir) / "table.csv", header + report_table({row}));
    }

    std::cout << "protocol=" << to_string(protocol) << " method=" << to_string(cfg.method)
              << " feature_set=" << to_string(cfg.verifier.feature_set)
              << " genuine=" << pool.genuine_scores.size()
              << " impostor=" << pool.impostor_scores.size() << " EER=" << selected_eer
              << "\n";
    return kExitAccept;
}

int cmd_debug(const std::string& sig_path, const std::string& refset_path, bool matrices,
              const Config& cfg) {
    const auto q = read_signature(sig_path);
    const auto seg = segment(q);

    std::cout << "# segmentation boundaries (" << seg.stroke_count() << " strokes)\n";
    for (auto b : seg.boundaries) std::cout << b << "\n";

    if (refset_path.empty()) return kExitAccept;
    const auto rs = load_refset(refset_path, cfg, false);

    std::cout << "# stability regions\n";
    for (std::size_t i = 0; i < rs.references.size(); ++i) {
        const auto regions =
            stability_regions(rs.references[i], q, seg, rs.config.thresholds);
        for (const auto& r : regions)
            std::cout << "ref=" << rs.references[i].specimen_id << " " << r.r_start << " "
                      << r.q_start << " " << r.ns << " " << r.gs << "\n";
    }

    const auto rel = relevance_profile(q, seg, rs.references, rs.config.thresholds);
    std::cout << "# relevance counters\n";
    for (auto c : rel.counters) std::cout << c << "\n";

    if (matrices) {
        const auto qf = build_features(q, rs.config.feature_set);
        auto dump = [](const Grid& g, const std::string& name) {
            std::cout << "# " << name << " (" << g.rows << "x" << g.cols << ")\n";
            for (std::size_t r = 0; r < g.rows; ++r) {
                for (std::size_t c = 0; c < g.cols; ++c)
                    std::cout << (c ? " " : "") << g.at(r, c);
                std::cout << "\n";
            }
        };
        const auto bl = dtw(qf, rs.features[0], true);
        dump(*bl.cost_matrix, "dtw cost matrix vs reference 0");
        const auto sm = smdtw(qf, rs.features[0], rel, seg, rs.config.weights,
                              rs.config.weight_fn(), true);
        dump(*sm.cost_matrix, "smdtw cost matrix vs reference 0");
    }
    return kExitAccept;
}

int cmd_synth(const std::string& out_dir, int writers, int genuine, int forgeries, int strokes,
              double jitter_genuine, double jitter_forgery, std::uint64_t seed) {
    fs::create_directories(out_dir);
    char buf[64];
    for (int w = 0; w < writers; ++w) {
        const auto tpl = synth_signature(seed + static_cast<std::uint64_t>(w), strokes, 0.0);
        auto emit = [&](int idx, Label label, double sigma, std::uint64_t noise_seed) {
            Signature s = perturb(tpl, sigma, noise_seed);
            std::snprintf(buf, sizeof buf, "w%03d", w);
            s.writer_id = buf;
            std::snprintf(buf, sizeof buf, "%s%03d", label == Label::genuine ? "g" : "f", idx);
            s.specimen_id = buf;
            s.label = label;
            std::snprintf(buf, sizeof buf, "w%03d_%s.sig", w, s.specimen_id.c_str());
            write_atomically(fs::path(out_dir) / buf, serialize_canonical(s));
        };
        for (int g = 0; g < genuine; ++g)
            emit(g, Label::genuine, jitter_genuine,
                 seed + 1000003ULL * static_cast<std::uint64_t>(w) + static_cast<std::uint64_t>(g));
        for (int f = 0; f < forgeries; ++f)
            emit(f, Label::skilled_forgery, jitter_forgery,
                 seed + 2000003ULL * static_cast<std::uint64_t>(w) +
                     static_cast<std::uint64_t>(f) + 500000ULL);
    }
    std::cout << "wrote " << writers * (genuine + forgeries) << " signatures to " << out_dir
              << "\n";
    return kExitAccept;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online signature verification with stability-modulated DTW"};
    app.require_subcommand(1);

    auto* enroll_cmd = app.add_subcommand("enroll", "enroll a writer's reference signatures");
    std::string ref_dir, out_path;
    ConfigFlags enroll_flags;
    enroll_cmd->add_option("--refs", ref_dir, "directory of canonical files, one writer")
        ->required();
    enroll_cmd->add_option("--out", out_path, "output reference-set file")->required();
    add_config_flags(enroll_cmd, enroll_flags);

    auto* verify_cmd = app.add_subcommand("verify", "score one questioned signature");
    std::string refset_path, questioned_path;
    ConfigFlags verify_flags;
    verify_cmd->add_option("--refset", refset_path, "persisted reference set")->required();
    verify_cmd->add_option("questioned", questioned_path, "questioned signature file")
        ->required();
    add_config_flags(verify_cmd, verify_flags);

    auto* eval_cmd = app.add_subcommand("evaluate", "run the RF/SF protocol over a dataset");
    std::string dataset_dir, eval_out;
    std::string protocol_name = "rf";
    ConfigFlags eval_flags;
    eval_cmd->add_option("--dataset", dataset_dir, "directory of labeled canonical files")
        ->required();
    eval_cmd->add_option("--out", eval_out, "output directory")->required();
    eval_cmd->add_option("--protocol", protocol_name, "rf or sf");
    add_config_flags(eval_cmd, eval_flags);

    auto* debug_cmd = app.add_subcommand("debug", "dump segmentation / stability / matrices");
    std::string debug_sig, debug_refset;
    bool matrices = false;
    ConfigFlags debug_flags;
    debug_cmd->add_option("signature", debug_sig, "signature file")->required();
    debug_cmd->add_option("--refset", debug_refset, "persisted reference set");
    debug_cmd->add_flag("--matrices", matrices, "dump DTW and SM-DTW cost matrices");
    add_config_flags(debug_cmd, debug_flags);

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic labeled corpus");
    std::string synth_out;
    int writers = 10, genuine = 25, forgeries = 25, strokes = 6;
    double jitter_genuine = 0.1, jitter_forgery = 2.0;
    std::uint64_t seed = 1;
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--writers", writers);
    synth_cmd->add_option("--genuine", genuine);
    synth_cmd->add_option("--forgeries", forgeries);
    synth_cmd->add_option("--strokes", strokes);
    synth_cmd->add_option("--jitter-genuine", jitter_genuine);
    synth_cmd->add_option("--jitter-forgery", jitter_forgery);
    synth_cmd->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (*enroll_cmd) return cmd_enroll(ref_dir, out_path, make_config(enroll_flags));
        if (*verify_cmd)
            return cmd_verify(refset_path, questioned_path, make_config(verify_flags),
                              verify_flags.any());
        if (*eval_cmd) {
            Protocol protocol;
            if (protocol_name == "rf")
                protocol = Protocol::rf;
            else if (protocol_name == "sf")
                protocol = Protocol::sf;
            else
                throw std::runtime_error("unknown protocol '" + protocol_name + "'");
            return cmd_evaluate(dataset_dir, eval_out, protocol, make_config(eval_flags));
        }
        if (*debug_cmd) return cmd_debug(debug_sig, debug_refset, matrices, make_config(debug_flags));
        if (*synth_cmd) return cmd_synth(synth_out, writers, genuine, forgeries, strokes,
                                         jitter_genuine, jitter_forgery, seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
