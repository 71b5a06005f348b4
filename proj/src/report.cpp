#include "ladder/report.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladder/error.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/io.hpp"

namespace ladder {
namespace {

using nlohmann::json;

constexpr std::string_view kScenesHeader =
    "scene_id,variant,reference_available,pre_encodes,rung_encodes,total_encodes,reduction_percent,bd_status,"
    "bd_rate_percent,mean_log2_rate_gap,bd_vmaf,vmaf_overlap_low,vmaf_overlap_high,log2rate_overlap_low,"
    "log2rate_overlap_high,delta_rate_kbps,delta_vmaf,error";
constexpr std::string_view kLaddersHeader = "scene_id,ladder,rung,resolution,crf,bitrate_kbps,vmaf";
constexpr std::string_view kWarningsHeader = "scene_id,source,message";

constexpr std::string_view kReferenceSuffix = ".reference_ladder.csv";
constexpr std::string_view kFrontSuffix = ".pareto_front.csv";

std::string csv_field(std::string_view v) {
    if (v.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(v);
    std::string out = "\"";
    for (char c : v) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (quoted) throw ValidationError("unterminated quoted CSV field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::vector<std::string>> parse_table(std::string_view text, std::string_view header) {
    auto rows = parse_csv(text);
    if (rows.empty()) throw ValidationError("empty CSV, want header '" + std::string(header) + "'");
    std::string got;
    for (std::size_t i = 0; i < rows.front().size(); ++i) got += (i ? "," : "") + rows.front()[i];
    if (got != header) throw ValidationError("unexpected CSV header '" + got + "'");
    const std::size_t width = rows.front().size();
    rows.erase(rows.begin());
    for (const auto& r : rows) {
        if (r.size() != width) throw ValidationError("CSV row has " + std::to_string(r.size()) + " fields");
    }
    return rows;
}

std::string opt_num(const std::optional<double>& v) { return v ? io::format_double(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return io::parse_double(s);
}

int parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError("bad integer '" + s + "'");
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

json interval_json(const std::optional<Interval>& i) {
    if (!i) return nullptr;
    return json::array({i->low, i->high});
}

std::optional<Interval> interval_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return Interval{j.at(0).get<double>(), j.at(1).get<double>()};
}

json rows_json(const std::vector<RQPoint>& rows) {
    json out = json::array();
    for (const auto& p : rows) {
        out.push_back({{"resolution", label(p.resolution)},
                       {"crf", p.crf},
                       {"bitrate_kbps", p.bitrate_kbps},
                       {"vmaf", p.vmaf}});
    }
    return out;
}

std::vector<RQPoint> rows_from(const json& j) {
    std::vector<RQPoint> out;
    for (const auto& r : j) {
        auto res = parse_resolution(r.at("resolution").get<std::string>());
        if (!res) throw ValidationError("unknown resolution in report");
        out.push_back({*res, r.at("crf").get<int>(), r.at("bitrate_kbps").get<double>(), r.at("vmaf").get<double>()});
    }
    return out;
}

json bd_json(const BDResult& bd) {
    return {{"status", bd.status == BDStatus::kOk ? "ok" : "no-overlap"},
            {"bd_rate_percent", opt_json(bd.bd_rate_percent)},
            {"mean_log2_rate_gap", opt_json(bd.mean_log2_rate_gap)},
            {"bd_vmaf", opt_json(bd.bd_vmaf)},
            {"vmaf_overlap", interval_json(bd.vmaf_overlap)},
            {"log2rate_overlap", interval_json(bd.log2rate_overlap)}};
}

BDStatus parse_status(const std::string& s) {
    if (s == "ok") return BDStatus::kOk;
    if (s == "no-overlap") return BDStatus::kNoOverlap;
    throw ValidationError("unknown BD status '" + s + "'");
}

BDResult bd_from(const json& j) {
    BDResult bd;
    bd.status = parse_status(j.at("status").get<std::string>());
    bd.bd_rate_percent = opt_from(j, "bd_rate_percent");
    bd.mean_log2_rate_gap = opt_from(j, "mean_log2_rate_gap");
    bd.bd_vmaf = opt_from(j, "bd_vmaf");
    bd.vmaf_overlap = interval_from(j.at("vmaf_overlap"));
    bd.log2rate_overlap = interval_from(j.at("log2rate_overlap"));
    return bd;
}

json variant_json(const VariantReport& v) {
    json j{{"rows", rows_json(v.rows)},
           {"pre_encodes", v.counts.pre},
           {"rung_encodes", v.counts.rung},
           {"total_encodes", v.counts.total()},
           {"bd", v.bd ? bd_json(*v.bd) : json(nullptr)},
           {"delta_rate_kbps", opt_json(v.hq_delta.delta_rate_kbps)},
           {"delta_vmaf", v.hq_delta.delta_vmaf},
           {"error", v.error ? json(*v.error) : json(nullptr)},
           {"warnings", v.warnings}};
    return j;
}

VariantReport variant_from(const json& j) {
    VariantReport v;
    v.rows = rows_from(j.at("rows"));
    v.counts = {j.at("pre_encodes").get<int>(), j.at("rung_encodes").get<int>()};
    if (!j.at("bd").is_null()) v.bd = bd_from(j.at("bd"));
    v.hq_delta.delta_rate_kbps = opt_from(j, "delta_rate_kbps");
    v.hq_delta.delta_vmaf = j.at("delta_vmaf").get<double>();
    if (!j.at("error").is_null()) v.error = j.at("error").get<std::string>();
    v.warnings = j.at("warnings").get<std::vector<std::string>>();
    return v;
}

bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

SceneReport& scene_entry(std::map<std::string, SceneReport>& scenes, const std::string& id) {
    auto& s = scenes[id];
    s.scene_id = id;
    return s;
}

void append_rows(std::string& out, const std::string& scene_id, std::string_view ladder,
                 const std::vector<RQPoint>& rows) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = rows[i];
        out += scene_id + ',' + std::string(ladder) + ',' + std::to_string(i + 1) + ',' + std::string(label(p.resolution)) +
               ',' + std::to_string(p.crf) + ',' + io::format_double(p.bitrate_kbps) + ',' + io::format_double(p.vmaf) +
               '\n';
    }
}

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::kWithHq ? "with_hq" : "without_hq"; }

std::optional<Variant> parse_variant(std::string_view text) {
    if (text == "with_hq") return Variant::kWithHq;
    if (text == "without_hq") return Variant::kWithoutHq;
    return std::nullopt;
}

namespace {
bool same_interval(const std::optional<Interval>& a, const std::optional<Interval>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->low == b->low && a->high == b->high);
}
}  // namespace

bool operator==(const BDResult& a, const BDResult& b) {
    return a.status == b.status && a.bd_rate_percent == b.bd_rate_percent &&
           a.mean_log2_rate_gap == b.mean_log2_rate_gap && a.bd_vmaf == b.bd_vmaf &&
           same_interval(a.vmaf_overlap, b.vmaf_overlap) && same_interval(a.log2rate_overlap, b.log2rate_overlap);
}

bool operator==(const VariantReport& a, const VariantReport& b) {
    return a.rows == b.rows && a.counts.pre == b.counts.pre && a.counts.rung == b.counts.rung && a.bd == b.bd &&
           a.hq_delta.delta_rate_kbps == b.hq_delta.delta_rate_kbps && a.hq_delta.delta_vmaf == b.hq_delta.delta_vmaf &&
           a.error == b.error && a.warnings == b.warnings;
}

bool operator==(const SceneReport& a, const SceneReport& b) {
    return a.scene_id == b.scene_id && a.reference == b.reference && a.with_hq == b.with_hq &&
           a.without_hq == b.without_hq && a.warnings == b.warnings;
}

bool operator==(const RunReport& a, const RunReport& b) { return a.scenes == b.scenes; }

void compute_bd(SceneReport& scene) {
    for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
        auto& var = scene.variant(v);
        if (!var) continue;
        var->bd.reset();
        if (!scene.reference) {
            var->warnings.push_back("reference unavailable: BD metrics undefined");
            continue;
        }
        if (var->rows.size() < 2 || scene.reference->size() < 2) {
            var->warnings.push_back("single-row ladder: BD metrics undefined");
            continue;
        }
        try {
            const auto test = RQAnchorSet::from_rows(var->rows, &var->warnings);
            const auto ref = RQAnchorSet::from_rows(*scene.reference, &var->warnings);
            var->bd = bd_metrics(test, ref);
        } catch (const ValidationError& e) {
            var->warnings.push_back(std::string("BD metrics undefined: ") + e.what());
        }
    }
}

Stat summarize(const std::vector<double>& values) {
    Stat s;
    s.n = static_cast<int>(values.size());
    if (values.empty()) return s;
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / s.n;
    s.mean = mean;
    if (s.n >= 2) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        s.sd = std::sqrt(ss / (s.n - 1));
    }
    return s;
}

std::vector<HqEffectRow> hq_effect(const RunReport& report) {
    std::vector<HqEffectRow> out;
    for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
        for (bool above : {true, false}) {
            std::vector<double> rates, vmafs;
            for (const auto& scene : report.scenes) {
                const auto& var = scene.variant(v);
                if (!var || var->rows.empty()) continue;
                if ((var->hq_delta.delta_vmaf >= 0.0) != above) continue;
                vmafs.push_back(var->hq_delta.delta_vmaf);
                if (var->hq_delta.delta_rate_kbps) rates.push_back(*var->hq_delta.delta_rate_kbps / 1000.0);
            }
            out.push_back({v, above, summarize(rates), summarize(vmafs)});
        }
    }
    return out;
}

std::vector<HistogramBin> histogram(const RunReport& report, double bin_width, bool bd_rate) {
    if (!(bin_width > 0.0)) throw ValidationError("histogram bin width must be positive");
    std::array<std::vector<double>, 2> values;
    for (const auto& scene : report.scenes) {
        for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
            const auto& var = scene.variant(v);
            if (!var) continue;
            if (bd_rate) {
                if (var->bd && var->bd->bd_rate_percent) values[static_cast<int>(v)].push_back(*var->bd->bd_rate_percent);
            } else if (!var->rows.empty()) {
                values[static_cast<int>(v)].push_back(var->hq_delta.delta_vmaf);
            }
        }
    }
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& vs : values) {
        for (double x : vs) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
    }
    std::vector<HistogramBin> bins;
    if (!std::isfinite(lo)) return bins;
    const long first = static_cast<long>(std::floor(lo / bin_width));
    const long last = static_cast<long>(std::floor(hi / bin_width));
    for (long b = first; b <= last; ++b) bins.push_back({b * bin_width, (b + 1) * bin_width, {0, 0}});
    for (int v = 0; v < 2; ++v) {
        for (double x : values[v]) {
            const long b = static_cast<long>(std::floor(x / bin_width)) - first;
            ++bins[static_cast<std::size_t>(b)].counts[v];
        }
    }
    return bins;
}

ComplexityReport complexity_of(const RunReport& report, Variant variant) {
    std::vector<SceneComplexity> scenes;
    for (const auto& scene : report.scenes) {
        const auto& var = scene.variant(variant);
        if (var) scenes.push_back({scene.scene_id, var->counts.pre, var->counts.rung});
    }
    return complexity_report(scenes);
}

json report_to_json(const RunReport& report) {
    json scenes = json::array();
    for (const auto& s : report.scenes) {
        json j{{"scene_id", s.scene_id},
               {"reference_available", s.reference.has_value()},
               {"reference", s.reference ? rows_json(*s.reference) : json(nullptr)},
               {"with_hq", s.with_hq ? variant_json(*s.with_hq) : json(nullptr)},
               {"without_hq", s.without_hq ? variant_json(*s.without_hq) : json(nullptr)},
               {"warnings", s.warnings}};
        scenes.push_back(std::move(j));
    }
    const auto cx = complexity_of(report);
    json table = json::array();
    for (const auto& row : hq_effect(report)) {
        auto stat = [](const Stat& s) { return json{{"n", s.n}, {"mean", opt_json(s.mean)}, {"sd", opt_json(s.sd)}}; };
        table.push_back({{"variant", to_string(row.variant)},
                         {"first_row", row.above ? "vmaf>=92" : "vmaf<92"},
                         {"delta_rate_mbps", stat(row.delta_rate_mbps)},
                         {"delta_vmaf", stat(row.delta_vmaf)}});
    }
    return {{"scenes", scenes},
            {"summary",
             {{"scene_count", report.scenes.size()},
              {"mean_total_encodes", cx.mean_total},
              {"mean_reduction_percent", cx.mean_reduction_percent},
              {"hq_effect", table}}}};
}

RunReport report_from_json(const json& doc) {
    RunReport report;
    for (const auto& j : doc.at("scenes")) {
        SceneReport s;
        s.scene_id = j.at("scene_id").get<std::string>();
        if (!j.at("reference").is_null()) s.reference = rows_from(j.at("reference"));
        if (!j.at("with_hq").is_null()) s.with_hq = variant_from(j.at("with_hq"));
        if (!j.at("without_hq").is_null()) s.without_hq = variant_from(j.at("without_hq"));
        s.warnings = j.at("warnings").get<std::vector<std::string>>();
        report.scenes.push_back(std::move(s));
    }
    return report;
}

ReportCsvs report_to_csvs(const RunReport& report) {
    ReportCsvs out;
    out.scenes = std::string(kScenesHeader) + '\n';
    out.ladders = std::string(kLaddersHeader) + '\n';
    out.warnings = std::string(kWarningsHeader) + '\n';
    for (const auto& s : report.scenes) {
        const std::string ref = s.reference ? "1" : "0";
        bool any = false;
        for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
            const auto& var = s.variant(v);
            if (!var) continue;
            any = true;
            const BDResult* bd = var->bd ? &*var->bd : nullptr;
            auto lo = [](const std::optional<Interval>& i) { return i ? io::format_double(i->low) : std::string(); };
            auto hi = [](const std::optional<Interval>& i) { return i ? io::format_double(i->high) : std::string(); };
            std::vector<std::string> cells{
                s.scene_id,
                std::string(to_string(v)),
                ref,
                std::to_string(var->counts.pre),
                std::to_string(var->counts.rung),
                std::to_string(var->counts.total()),
                io::format_double(reduction_percent(var->counts.total())),
                bd ? (bd->status == BDStatus::kOk ? "ok" : "no-overlap") : "",
                bd ? opt_num(bd->bd_rate_percent) : "",
                bd ? opt_num(bd->mean_log2_rate_gap) : "",
                bd ? opt_num(bd->bd_vmaf) : "",
                bd ? lo(bd->vmaf_overlap) : "",
                bd ? hi(bd->vmaf_overlap) : "",
                bd ? lo(bd->log2rate_overlap) : "",
                bd ? hi(bd->log2rate_overlap) : "",
                opt_num(var->hq_delta.delta_rate_kbps),
                io::format_double(var->hq_delta.delta_vmaf),
                var->error ? csv_field(*var->error) : ""};
            for (std::size_t i = 0; i < cells.size(); ++i) out.scenes += (i ? "," : "") + cells[i];
            out.scenes += '\n';
            append_rows(out.ladders, s.scene_id, to_string(v), var->rows);
            for (const auto& w : var->warnings) out.warnings += s.scene_id + ',' + std::string(to_string(v)) + ',' + csv_field(w) + '\n';
        }
        if (!any) out.scenes += s.scene_id + ",none," + ref + ",,,,,,,,,,,,,,,\n";
        if (s.reference) append_rows(out.ladders, s.scene_id, "reference", *s.reference);
        for (const auto& w : s.warnings) out.warnings += s.scene_id + ",scene," + csv_field(w) + '\n';
    }
    return out;
}

RunReport report_from_csvs(const ReportCsvs& csvs) {
    std::map<std::string, SceneReport> scenes;
    for (const auto& r : parse_table(csvs.scenes, kScenesHeader)) {
        auto& s = scene_entry(scenes, r[0]);
        if (r[2] == "1") s.reference.emplace();
        if (r[1] == "none") continue;
        auto v = parse_variant(r[1]);
        if (!v) throw ValidationError("unknown variant '" + r[1] + "'");
        VariantReport var;
        var.counts = {parse_int(r[3]), parse_int(r[4])};
        if (!r[7].empty()) {
            BDResult bd;
            bd.status = parse_status(r[7]);
            bd.bd_rate_percent = parse_opt(r[8]);
            bd.mean_log2_rate_gap = parse_opt(r[9]);
            bd.bd_vmaf = parse_opt(r[10]);
            if (!r[11].empty()) bd.vmaf_overlap = Interval{io::parse_double(r[11]), io::parse_double(r[12])};
            if (!r[13].empty()) bd.log2rate_overlap = Interval{io::parse_double(r[13]), io::parse_double(r[14])};
            var.bd = bd;
        }
        var.hq_delta.delta_rate_kbps = parse_opt(r[15]);
        var.hq_delta.delta_vmaf = io::parse_double(r[16]);
        if (!r[17].empty()) var.error = r[17];
        s.variant(*v) = std::move(var);
    }
    for (const auto& r : parse_table(csvs.ladders, kLaddersHeader)) {
        auto it = scenes.find(r[0]);
        if (it == scenes.end()) throw ValidationError("ladder rows for unknown scene '" + r[0] + "'");
        auto res = parse_resolution(r[3]);
        if (!res) throw ValidationError("unknown resolution '" + r[3] + "'");
        const RQPoint p{*res, parse_int(r[4]), io::parse_double(r[5]), io::parse_double(r[6])};
        std::vector<RQPoint>* rows = nullptr;
        if (r[1] == "reference") {
            if (!it->second.reference) throw ValidationError(r[0] + ": reference rows but reference unavailable");
            rows = &*it->second.reference;
        } else if (auto v = parse_variant(r[1]); v && it->second.variant(*v)) {
            rows = &it->second.variant(*v)->rows;
        } else {
            throw ValidationError(r[0] + ": rows for unknown ladder '" + r[1] + "'");
        }
        if (parse_int(r[2]) != static_cast<int>(rows->size()) + 1) throw ValidationError(r[0] + ": rung numbers out of order");
        rows->push_back(p);
    }
    for (const auto& r : parse_table(csvs.warnings, kWarningsHeader)) {
        auto it = scenes.find(r[0]);
        if (it == scenes.end()) throw ValidationError("warning for unknown scene '" + r[0] + "'");
        if (r[1] == "scene") {
            it->second.warnings.push_back(r[2]);
        } else if (auto v = parse_variant(r[1]); v && it->second.variant(*v)) {
            it->second.variant(*v)->warnings.push_back(r[2]);
        } else {
            throw ValidationError(r[0] + ": warning for unknown source '" + r[1] + "'");
        }
    }
    RunReport report;
    for (auto& [id, s] : scenes) report.scenes.push_back(std::move(s));
    return report;
}

std::string hq_effect_csv(const std::vector<HqEffectRow>& rows) {
    std::string out =
        "variant,first_row,n,delta_rate_n,delta_rate_mbps_mean,delta_rate_mbps_sd,delta_vmaf_mean,delta_vmaf_sd\n";
    for (const auto& r : rows) {
        out += std::string(to_string(r.variant)) + ',' + (r.above ? "vmaf>=92" : "vmaf<92") + ',' +
               std::to_string(r.delta_vmaf.n) + ',' + std::to_string(r.delta_rate_mbps.n) + ',' +
               opt_num(r.delta_rate_mbps.mean) + ',' + opt_num(r.delta_rate_mbps.sd) + ',' +
               opt_num(r.delta_vmaf.mean) + ',' + opt_num(r.delta_vmaf.sd) + '\n';
    }
    return out;
}

std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::string out = "bin_low,bin_high,with_hq,without_hq\n";
    for (const auto& b : bins) {
        out += io::format_double(b.low) + ',' + io::format_double(b.high) + ',' + std::to_string(b.counts[0]) + ',' +
               std::to_string(b.counts[1]) + '\n';
    }
    return out;
}

std::string reference_ladder_file(std::string_view scene_id) { return std::string(scene_id) + std::string(kReferenceSuffix); }

std::string pareto_front_file(std::string_view scene_id) { return std::string(scene_id) + std::string(kFrontSuffix); }

std::string predicted_ladder_file(std::string_view scene_id, Variant v) {
    return std::string(scene_id) + (v == Variant::kWithHq ? ".predicted_ladder.csv" : ".predicted_ladder.nohq.csv");
}

std::string predicted_sidecar_file(std::string_view scene_id, Variant v) {
    return std::string(scene_id) + (v == Variant::kWithHq ? ".predicted.json" : ".predicted.nohq.json");
}

json variant_sidecar(const std::string& scene_id, const VariantReport& v) {
    return {{"scene_id", scene_id},
            {"pre_encodes", v.counts.pre},
            {"rung_encodes", v.counts.rung},
            {"total_encodes", v.counts.total()},
            {"reduction_percent", reduction_percent(v.counts.total())},
            {"delta_rate_kbps", opt_json(v.hq_delta.delta_rate_kbps)},
            {"delta_vmaf", v.hq_delta.delta_vmaf},
            {"error", v.error ? json(*v.error) : json(nullptr)},
            {"warnings", v.warnings}};
}

void apply_sidecar(const json& doc, VariantReport& v) {
    v.counts = {doc.at("pre_encodes").get<int>(), doc.at("rung_encodes").get<int>()};
    v.hq_delta.delta_rate_kbps = opt_from(doc, "delta_rate_kbps");
    v.hq_delta.delta_vmaf = doc.at("delta_vmaf").get<double>();
    if (!doc.at("error").is_null()) v.error = doc.at("error").get<std::string>();
    v.warnings = doc.at("warnings").get<std::vector<std::string>>();
}

RunReport load_run_directory(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw ValidationError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::map<std::string, SceneReport> scenes;
    for (const auto& path : files) {
        const std::string name = path.filename().string();
        if (ends_with(name, kReferenceSuffix)) {
            std::string id = name.substr(0, name.size() - kReferenceSuffix.size());
            scene_entry(scenes, id).reference = io::ladder_from_csv(io::read_text(path)).rows;
            continue;
        }
        for (Variant v : {Variant::kWithHq, Variant::kWithoutHq}) {
            const std::string suffix = predicted_ladder_file("", v);
            if (!ends_with(name, suffix)) continue;
            const std::string id = name.substr(0, name.size() - suffix.size());
            auto& scene = scene_entry(scenes, id);
            VariantReport var;
            var.rows = io::ladder_from_csv(io::read_text(path)).rows;
            const auto sidecar = dir / predicted_sidecar_file(id, v);
            if (std::filesystem::exists(sidecar)) {
                apply_sidecar(json::parse(io::read_text(sidecar)), var);
            } else {
                BitrateLadder ladder;
                ladder.rows = var.rows;
                var.hq_delta = hq_delta_report(ladder, std::nullopt);
                var.warnings.push_back("no sidecar: encode counts unknown");
            }
            scene.variant(v) = std::move(var);
        }
    }

    RunReport report;
    for (auto& [id, s] : scenes) {
        if (!s.reference && (s.with_hq || s.without_hq)) s.warnings.push_back("reference unavailable");
        compute_bd(s);
        report.scenes.push_back(std::move(s));
    }
    return report;
}

void write_report(const RunReport& report, const std::filesystem::path& out_dir) {
    const auto csvs = report_to_csvs(report);
    io::write_text(out_dir / "report.json", report_to_json(report).dump(2) + '\n');
    io::write_text(out_dir / "scenes.csv", csvs.scenes);
    io::write_text(out_dir / "ladders.csv", csvs.ladders);
    io::write_text(out_dir / "warnings.csv", csvs.warnings);
    io::write_text(out_dir / "hq_effect.csv", hq_effect_csv(hq_effect(report)));
    io::write_text(out_dir / "bd_histogram.csv", histogram_csv(histogram(report, 0.5, true)));
    io::write_text(out_dir / "delta_vmaf_histogram.csv", histogram_csv(histogram(report, 1.0, false)));
}

}  // namespace ladder
