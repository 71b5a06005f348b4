#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ladder/bd_metrics.hpp"
#include "ladder/crf_rate_model.hpp"
#include "ladder/error.hpp"
#include "ladder/evaluation.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/io.hpp"
#include "ladder/ladder_predictor.hpp"
#include "ladder/orchestrator.hpp"
#include "ladder/report.hpp"
#include "ladder/synthetic.hpp"

namespace ladder::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kSweepSuffix = ".sweep.csv";

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

bool wanted(const std::vector<std::string>& scenes, const std::string& id) {
    return scenes.empty() || std::find(scenes.begin(), scenes.end(), id) != scenes.end();
}

/// Sweeps from files and directories (every *.sweep.csv inside), keyed by scene id.
std::map<std::string, RQSweep> load_sweeps(const std::vector<fs::path>& paths, const std::vector<std::string>& scenes) {
    std::vector<fs::path> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            for (const auto& e : fs::directory_iterator(p)) {
                const std::string name = e.path().filename().string();
                if (e.is_regular_file() && name.size() > kSweepSuffix.size() && name.ends_with(kSweepSuffix)) {
                    files.push_back(e.path());
                }
            }
        } else if (fs::exists(p)) {
            files.push_back(p);
        } else {
            throw ValidationError("no such sweep file or directory: " + p.string());
        }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, RQSweep> out;
    for (const auto& f : files) {
        RQSweep sweep = io::sweep_from_csv(io::read_text(f));
        if (!wanted(scenes, sweep.scene_id())) continue;
        const std::string id = sweep.scene_id();
        if (!out.emplace(id, std::move(sweep)).second) throw ValidationError("duplicate sweep for scene " + id);
    }
    return out;
}

int report_missing(const std::vector<std::string>& scenes, const std::set<std::string>& found, std::string_view what,
                   std::ostream& err) {
    int missing = 0;
    for (const auto& id : scenes) {
        if (!found.count(id)) {
            err << id << ": no " << what << "\n";
            ++missing;
        }
    }
    return missing;
}

void print_warnings(const std::string& id, const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << id << ": warning: " << w << "\n";
}

struct SweepArgs {
    fs::path config;
    std::vector<std::string> scenes;
    fs::path out = "sweeps";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
    const OrchestratorConfig cfg = load_config(a.config);
    EncodeOrchestrator orch(cfg);
    std::set<std::string> found;
    int failed = 0;
    for (const auto& m : cfg.scenes) {
        if (!wanted(a.scenes, m.scene_id)) continue;
        found.insert(m.scene_id);
        const SweepResult result = orch.exhaustive_sweep(m);
        const fs::path csv = orch.persist_sweep(result, a.out);
        out << m.scene_id << ": " << result.sweep.points().size() << " points -> " << csv.string() << "\n";
        for (const auto& f : result.failures) {
            err << m.scene_id << ": " << label(f.resolution) << " crf " << f.crf << " failed: " << f.message << "\n";
        }
        if (!result.failures.empty()) ++failed;
    }
    out << "encodes invoked " << orch.encodes_invoked() << ", cache hits " << orch.cache_hits() << ", cache misses "
        << orch.cache_misses() << "\n";
    if (report_missing(a.scenes, found, "scene in config", err)) return kValidation;
    return failed ? kTool : kOk;
}

struct ReferenceArgs {
    std::vector<fs::path> sweeps;
    std::vector<std::string> scenes;
    double k = kDefaultK;
    double r_min = kDefaultRMinKbps;
    fs::path out = "run";
};

int cmd_reference(const ReferenceArgs& a, std::ostream& out, std::ostream& err) {
    validate_ladder_params(a.k, a.r_min);
    const auto sweeps = load_sweeps(a.sweeps, a.scenes);
    std::set<std::string> found;
    for (const auto& [id, sweep] : sweeps) {
        found.insert(id);
        const ReferenceResult ref = build_reference(sweep, a.k, a.r_min);
        io::write_text(a.out / reference_ladder_file(id), io::ladder_to_csv(id, ref.ladder));
        io::write_text(a.out / pareto_front_file(id), io::front_to_csv(id, ref.front));
        if (!ref.hq.reachable) err << id << ": warning: no 1080p encode reaches vmaf 92; using the best one\n";
        print_warnings(id, ref.ladder.warnings, err);
        const RQPoint& top = ref.ladder.rows.front();
        out << id << ": " << ref.ladder.rows.size() << " rungs, front " << ref.front.size() << " points, top "
            << label(top.resolution) << " crf " << top.crf << " " << fmt("%.1f", top.bitrate_kbps) << " kbps vmaf "
            << fmt("%.2f", top.vmaf) << "\n";
    }
    return report_missing(a.scenes, found, "sweep", err) ? kValidation : kOk;
}

struct CalibrateArgs {
    std::vector<fs::path> sweeps;
    std::vector<std::string> scenes;
    fs::path out = "calibration.json";
    bool per_scene = false;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out, std::ostream& err) {
    const auto sweeps = load_sweeps(a.sweeps, a.scenes);
    std::vector<TrainingScene> training;
    for (const auto& [id, sweep] : sweeps) training.push_back(training_scene_from_sweep(sweep));

    if (a.per_scene) {
        for (const auto& t : training) {
            const fs::path path = a.out / (t.scene_id + ".calibration.json");
            io::write_text(path, io::calibration_to_json(oracle_calibration(t)).dump(2) + "\n");
            out << t.scene_id << ": " << path.string() << "\n";
        }
        return kOk;
    }

    const Calibration cal = fit_calibration(training);
    io::write_text(a.out, io::calibration_to_json(cal).dump(2) + "\n");
    for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
        const auto& pair = kAdjacentPairs[i];
        const auto& m = cal.crossover(i);
        out << "crossover " << label(pair.lower) << " -> " << label(pair.upper) << ": ";
        if (m) {
            out << "slope " << fmt("%.4f", m->slope) << " intercept " << fmt("%.4f", m->intercept) << " plcc "
                << (m->plcc ? fmt("%.3f", *m->plcc) : "n/a") << "\n";
        } else {
            out << "unavailable\n";
            err << "warning: not enough samples for " << label(pair.lower) << " -> " << label(pair.upper) << "\n";
        }
    }
    if (const LinearMap* z = cal.zeta_map()) {
        out << "zeta 480p -> 360p: slope " << fmt("%.4f", z->slope) << " intercept " << fmt("%.4f", z->intercept)
            << "\n";
    } else {
        err << "warning: zeta map 480p -> 360p unavailable\n";
    }
    out << "scenes " << training.size() << " -> " << a.out.string() << "\n";
    return kOk;
}

struct PredictArgs {
    fs::path predictions;
    fs::path calibration;
    std::optional<fs::path> config;
    std::vector<fs::path> sweeps;
    std::vector<std::string> scenes;
    std::optional<double> k;
    std::optional<double> r_min;
    bool no_hq = false;
    int j = kDefaultFallbackJ;
    fs::path out = "run";
};

Calibration calibration_for(const fs::path& path, const std::string& scene_id) {
    const fs::path file = fs::is_directory(path) ? path / (scene_id + ".calibration.json") : path;
    return io::calibration_from_json(json::parse(io::read_text(file)));
}

int cmd_predict(const PredictArgs& a, std::ostream& out, std::ostream& err) {
    if (!a.config && a.sweeps.empty()) throw ValidationError("predict needs --config or --sweeps");
    std::optional<OrchestratorConfig> cfg;
    if (a.config) cfg = load_config(*a.config);

    PredictOptions opt;
    opt.k = a.k.value_or(cfg ? cfg->k : kDefaultK);
    opt.r_min_kbps = a.r_min.value_or(cfg ? cfg->r_min_kbps : kDefaultRMinKbps);
    opt.no_hq = a.no_hq;
    opt.j = a.j;
    validate_ladder_params(opt.k, opt.r_min_kbps);
    if (opt.j < 0) throw ValidationError("--j must be non-negative");

    const auto preds = io::predicted_crfs_file(a.predictions);
    const auto sweeps = a.sweeps.empty() ? std::map<std::string, RQSweep>{} : load_sweeps(a.sweeps, a.scenes);
    std::optional<EncodeOrchestrator> orch;
    if (cfg) orch.emplace(*cfg);

    const Variant variant = a.no_hq ? Variant::kWithoutHq : Variant::kWithHq;
    std::set<std::string> found;
    std::vector<SceneComplexity> complexity;
    bool tool_failed = false;
    for (const auto& pred : preds) {
        const std::string& id = pred.scene_id;
        if (!wanted(a.scenes, id)) continue;
        if (!io::valid_scene_id(id)) throw ValidationError("invalid scene id '" + id + "'");
        found.insert(id);

        EncodeFn encode;
        BatchEncodeFn batch;
        const RQSweep* sweep = nullptr;
        if (auto it = sweeps.find(id); it != sweeps.end()) sweep = &it->second;
        if (orch) {
            const SceneManifest& m = cfg->scene(id);
            encode = orch->encoder_for(m);
            batch = orch->batch_encoder_for(m);
        } else if (sweep) {
            encode = sweep_encoder(*sweep);
        } else {
            err << id << ": no sweep to serve encodes\n";
            tool_failed = true;
            continue;
        }

        const Calibration cal = calibration_for(a.calibration, id);
        const PredictedLadder pl = predict_ladder(pred, cal, opt, encode, batch);

        VariantReport v;
        v.rows = pl.ladder.rows;
        v.counts = pl.counts;
        v.error = pl.error;
        v.warnings = pl.warnings;
        std::optional<double> rate92;
        if (sweep) rate92 = rate_at_vmaf(*sweep, Resolution::k1080p, kHqTargetVmaf);
        if (!rate92) v.warnings.push_back("rate at vmaf 92 unavailable: delta rate omitted");
        if (!v.rows.empty()) v.hq_delta = hq_delta_report(pl.ladder, rate92);

        json sidecar = variant_sidecar(id, v);
        sidecar["mode"] = to_string(variant);
        sidecar["k"] = opt.k;
        sidecar["r_min"] = opt.r_min_kbps;
        if (opt.no_hq) sidecar["j"] = opt.j;
        sidecar["predictions"] = io::predicted_crfs_to_json(pred);
        io::write_text(a.out / predicted_ladder_file(id, variant), io::ladder_to_csv(id, pl.ladder));
        io::write_text(a.out / predicted_sidecar_file(id, variant), sidecar.dump(2) + "\n");

        print_warnings(id, v.warnings, err);
        if (pl.error) {
            err << id << ": " << *pl.error << "\n";
            tool_failed = true;
        }
        const SceneComplexity c{id, pl.counts.pre, pl.counts.rung};
        complexity.push_back(c);
        out << id << ": " << pl.ladder.rows.size() << " rungs, encodes pre " << c.pre_encodes << " rung "
            << c.rung_encodes << " total " << c.total() << ", reduction " << format_percent(c.reduction_percent())
            << "\n";
    }
    if (!complexity.empty()) {
        const ComplexityReport rep = complexity_report(complexity);
        out << "mean encodes " << fmt("%.2f", rep.mean_total) << " of " << rep.exhaustive_baseline
            << ", mean reduction " << format_percent(rep.mean_reduction_percent) << "\n";
    }
    if (report_missing(a.scenes, found, "prediction", err)) return kValidation;
    return tool_failed ? kTool : kOk;
}

struct BdArgs {
    fs::path test;
    fs::path reference;
    std::optional<fs::path> out;
};

int cmd_bd(const BdArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::string> warnings;
    const auto test = RQAnchorSet::from_rows(io::ladder_from_csv(io::read_text(a.test)).rows, &warnings);
    const auto ref = RQAnchorSet::from_rows(io::ladder_from_csv(io::read_text(a.reference)).rows, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << "\n";
    const BDResult bd = bd_metrics(test, ref);

    const bool ok = bd.status == BDStatus::kOk;
    if (ok) {
        out << "bd_rate " << fmt("%.4f", *bd.bd_rate_percent) << "%\nbd_vmaf " << fmt("%.4f", *bd.bd_vmaf) << "\n";
    } else {
        out << "status no-overlap\n";
    }
    if (a.out) {
        std::string csv = "test,reference,status,bd_rate_percent,bd_vmaf\n";
        csv += a.test.filename().string() + "," + a.reference.filename().string() + "," + (ok ? "ok" : "no-overlap") +
               "," + (bd.bd_rate_percent ? io::format_double(*bd.bd_rate_percent) : "") + "," +
               (bd.bd_vmaf ? io::format_double(*bd.bd_vmaf) : "") + "\n";
        io::write_text(*a.out, csv);
    }
    return ok ? kOk : kNoOverlap;
}

struct ReportArgs {
    fs::path run;
    std::optional<fs::path> out;
};

std::string stat_text(const Stat& s, double scale = 1.0) {
    if (!s.mean) return "n/a";
    std::string t = fmt("%.2f", *s.mean * scale);
    t += s.sd ? "(+/- " + fmt("%.2f", *s.sd * scale) + ")" : "(+/- n/a)";
    return t;
}

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream&) {
    const RunReport report = load_run_directory(a.run);
    const fs::path dir = a.out.value_or(a.run / "report");
    write_report(report, dir);

    out << "scenes " << report.scenes.size() << "\n";
    for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
        const ComplexityReport cx = complexity_of(report, v);
        if (cx.scenes.empty()) continue;
        out << to_string(v) << ": mean encodes " << fmt("%.2f", cx.mean_total) << ", mean reduction "
            << format_percent(cx.mean_reduction_percent) << "\n";
    }
    out << "first row vs vmaf 92       delta rate (Mbps)    delta vmaf\n";
    for (const auto& row : hq_effect(report)) {
        out << to_string(row.variant) << (row.above ? " >=92" : " <92 ") << " n=" << row.delta_vmaf.n << "  "
            << stat_text(row.delta_rate_mbps) << "  " << stat_text(row.delta_vmaf) << "\n";
    }
    out << "report -> " << dir.string() << "\n";
    return kOk;
}

struct SynthArgs {
    int count = 20;
    std::uint64_t seed = 7;
    std::string prefix = "synthetic";
    fs::path out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream& err) {
    if (a.count < 1) throw ValidationError("--count must be positive");
    json preds = json::array();
    json truth = json::array();
    for (const auto& scene : make_synthetic_scenes(a.count, a.seed, a.prefix)) {
        const RQSweep sweep = scene.sweep();
        io::write_text(a.out / (scene.scene_id() + std::string(kSweepSuffix)), io::sweep_to_csv(sweep));
        truth.push_back({{"scene_id", scene.scene_id()},
                         {"crf_at_vmaf92", scene.crf_at_vmaf(Resolution::k1080p, kHqTargetVmaf)}});
        try {
            preds.push_back(io::predicted_crfs_to_json(ground_truth_predictions(sweep)));
        } catch (const ValidationError& e) {
            err << "warning: " << e.what() << "; no ground-truth prediction\n";
        }
    }
    io::write_text(a.out / "predictions.json", preds.dump(2) + "\n");
    io::write_text(a.out / "truth.json", truth.dump(2) + "\n");
    out << a.count << " sweeps, " << preds.size() << " ground-truth predictions -> " << a.out.string() << "\n";
    return kOk;
}

}  // namespace

std::string format_percent(double value) { return fmt("%.2f", value) + "%"; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Per-scene bitrate ladder construction", "ladderctl"};
    app.require_subcommand(1);

    SweepArgs sweep;
    auto* s = app.add_subcommand("sweep", "Exhaustive 4 x 42 encode sweep per scene");
    s->add_option("--config", sweep.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    s->add_option("--scenes", sweep.scenes, "Scene ids (default: all in the config)")->delimiter(',');
    s->add_option("--out", sweep.out, "Directory for sweep CSVs")->capture_default_str();

    ReferenceArgs ref;
    auto* r = app.add_subcommand("reference", "Reference ladders and Pareto fronts from sweeps");
    r->add_option("--sweeps", ref.sweeps, "Sweep CSVs or directories")->required();
    r->add_option("--scenes", ref.scenes)->delimiter(',');
    r->add_option("--k", ref.k, "Rate ratio between rungs, 1.5 to 2")->capture_default_str();
    r->add_option("--r-min", ref.r_min, "Minimum rung bitrate in kbps")->capture_default_str();
    r->add_option("--out", ref.out, "Run directory")->capture_default_str();

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "Fit crossover and slope maps from training sweeps");
    c->add_option("--sweeps", cal.sweeps)->required();
    c->add_option("--scenes", cal.scenes)->delimiter(',');
    c->add_option("--out", cal.out, "Calibration JSON, or a directory with --per-scene")->capture_default_str();
    c->add_flag("--per-scene", cal.per_scene, "Write each scene's exact calibration instead of a fitted one");

    PredictArgs pred;
    std::optional<double> pk, pr;
    auto* p = app.add_subcommand("predict", "Predicted ladder from four CRFs and a calibration");
    p->add_option("--predictions", pred.predictions, "Predicted CRF JSON")->required()->check(CLI::ExistingFile);
    p->add_option("--calibration", pred.calibration, "Calibration JSON or per-scene directory")
        ->required()
        ->check(CLI::ExistingPath);
    p->add_option("--config", pred.config, "Encode through the configured tools")->check(CLI::ExistingFile);
    p->add_option("--sweeps", pred.sweeps, "Serve encodes from sweeps instead of tools");
    p->add_option("--scenes", pred.scenes)->delimiter(',');
    p->add_option("--k", pk);
    p->add_option("--r-min", pr);
    p->add_flag("--no-hq", pred.no_hq, "Start from crf_low - J instead of the HQ prediction");
    p->add_option("--j", pred.j, "CRF offset for --no-hq")->capture_default_str();
    p->add_option("--out", pred.out, "Run directory")->capture_default_str();

    BdArgs bd;
    auto* b = app.add_subcommand("bd", "BD-rate and BD-VMAF between two ladder CSVs");
    b->add_option("--test", bd.test)->required()->check(CLI::ExistingFile);
    b->add_option("--reference", bd.reference)->required()->check(CLI::ExistingFile);
    b->add_option("--out", bd.out, "CSV result file");

    ReportArgs rep;
    auto* rp = app.add_subcommand("report", "Aggregate a run directory into JSON and CSV tables");
    rp->add_option("--run", rep.run)->required()->check(CLI::ExistingDirectory);
    rp->add_option("--out", rep.out, "Output directory (default: <run>/report)");

    SynthArgs syn;
    auto* sy = app.add_subcommand("synth", "Synthetic sweeps with ground-truth predictions");
    sy->add_option("--count", syn.count, "")->capture_default_str();
    sy->add_option("--seed", syn.seed, "")->capture_default_str();
    sy->add_option("--prefix", syn.prefix, "")->capture_default_str();
    sy->add_option("--out", syn.out)->required();

    std::vector<const char*> argv{"ladderctl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*s) return cmd_sweep(sweep, out, err);
        if (*r) return cmd_reference(ref, out, err);
        if (*c) return cmd_calibrate(cal, out, err);
        if (*p) {
            pred.k = pk;
            pred.r_min = pr;
            return cmd_predict(pred, out, err);
        }
        if (*b) return cmd_bd(bd, out, err);
        if (*rp) return cmd_report(rep, out, err);
        if (*sy) return cmd_synth(syn, out, err);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const ToolError& e) {
        err << "tool error: " << e.what() << "\n";
        if (!e.diagnostics().empty()) err << e.diagnostics() << "\n";
        return kTool;
    } catch (const nlohmann::json::exception& e) {
        err << "error: malformed JSON: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace ladder::cli
