#include "ladder/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "ladder/error.hpp"

namespace ladder::io {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines(std::string_view text) {
    std::vector<std::string_view> out;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

int parse_int(std::string_view text) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ValidationError("bad integer '" + std::string(text) + "'");
    }
    return v;
}

Resolution parse_res(std::string_view text) {
    auto r = parse_resolution(text);
    if (!r) throw ValidationError("unknown resolution '" + std::string(text) + "'");
    return *r;
}

void expect_header(std::string_view got, std::string_view want) {
    if (got != want) {
        throw ValidationError("unexpected CSV header '" + std::string(got) + "', want '" + std::string(want) + "'");
    }
}

void append_point(std::string& out, std::string_view scene_id, const RQPoint& p) {
    out += scene_id;
    out += ',';
    out += label(p.resolution);
    out += ',';
    out += std::to_string(p.crf);
    out += ',';
    out += format_double(p.bitrate_kbps);
    out += ',';
    out += format_double(p.vmaf);
    out += '\n';
}

json map_to_json(const LinearMap& m) {
    json j{{"slope", m.slope}, {"intercept", m.intercept}, {"samples", m.samples}};
    j["plcc"] = m.plcc ? json(*m.plcc) : json(nullptr);
    return j;
}

LinearMap map_from_json(const json& j) {
    LinearMap m;
    m.slope = j.at("slope").get<double>();
    m.intercept = j.at("intercept").get<double>();
    m.samples = j.at("samples").get<std::size_t>();
    if (j.contains("plcc") && !j.at("plcc").is_null()) m.plcc = j.at("plcc").get<double>();
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format double");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw ValidationError("bad number '" + std::string(text) + "'");
    }
    return v;
}

bool valid_scene_id(std::string_view id) {
    if (id.empty()) return false;
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '.' || c == '_' || c == '-';
        if (!ok) return false;
    }
    return id != "." && id != "..";
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot write " + tmp.string());
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string sweep_to_csv(const RQSweep& sweep) {
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& p : sweep.points()) append_point(out, sweep.scene_id(), p);
    return out;
}

std::vector<RQPoint> points_from_csv(std::string_view text, std::string* scene_id) {
    auto rows = lines(text);
    if (rows.empty()) throw ValidationError("empty CSV");
    expect_header(rows.front(), kSweepHeader);
    std::vector<RQPoint> points;
    std::string id;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto cells = split(rows[i], ',');
        if (cells.size() != 5) throw ValidationError("CSV row " + std::to_string(i) + " has wrong column count");
        if (id.empty()) {
            id = std::string(cells[0]);
        } else if (cells[0] != id) {
            throw ValidationError("CSV mixes scene ids '" + id + "' and '" + std::string(cells[0]) + "'");
        }
        RQPoint p{parse_res(cells[1]), parse_int(cells[2]), parse_double(cells[3]), parse_double(cells[4])};
        validate(p);
        points.push_back(p);
    }
    if (scene_id) *scene_id = id;
    return points;
}

RQSweep sweep_from_csv(std::string_view text) {
    std::string id;
    auto points = points_from_csv(text, &id);
    return RQSweep(id, std::move(points));
}

std::string front_to_csv(std::string_view scene_id, const ParetoFront& front) {
    std::string out(kSweepHeader);
    out += '\n';
    for (const auto& p : front.points()) append_point(out, scene_id, p);
    return out;
}

std::string ladder_to_csv(std::string_view scene_id, const BitrateLadder& ladder) {
    std::string out(kLadderHeader);
    out += '\n';
    for (std::size_t i = 0; i < ladder.rows.size(); ++i) {
        out += scene_id;
        out += ',';
        out += std::to_string(i + 1);
        out += ',';
        const auto& p = ladder.rows[i];
        out += label(p.resolution);
        out += ',' + std::to_string(p.crf) + ',' + format_double(p.bitrate_kbps) + ',' + format_double(p.vmaf) + '\n';
    }
    return out;
}

BitrateLadder ladder_from_csv(std::string_view text, std::string* scene_id) {
    auto rows = lines(text);
    if (rows.empty()) throw ValidationError("empty ladder CSV");
    expect_header(rows.front(), kLadderHeader);
    BitrateLadder ladder;
    std::string id;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        auto cells = split(rows[i], ',');
        if (cells.size() != 6) throw ValidationError("ladder row " + std::to_string(i) + " has wrong column count");
        if (id.empty()) id = std::string(cells[0]);
        if (parse_int(cells[1]) != static_cast<int>(i)) throw ValidationError("ladder rungs out of order");
        RQPoint p{parse_res(cells[2]), parse_int(cells[3]), parse_double(cells[4]), parse_double(cells[5])};
        validate(p);
        ladder.rows.push_back(p);
    }
    if (scene_id) *scene_id = id;
    return ladder;
}

json calibration_to_json(const Calibration& cal) {
    json maps = json::array();
    for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
        json m{{"from", label(kAdjacentPairs[i].lower)}, {"to", label(kAdjacentPairs[i].upper)}};
        if (const auto& map = cal.crossover(i)) {
            m["available"] = true;
            m.update(map_to_json(*map));
        } else {
            m["available"] = false;
        }
        maps.push_back(std::move(m));
    }
    json zetas = json::array();
    for (const auto& [key, map] : cal.zeta_maps) {
        json z{{"from", label(key.first)}, {"to", label(key.second)}, {"available", true}};
        z.update(map_to_json(map));
        zetas.push_back(std::move(z));
    }
    return json{{"format", kCalibrationFormat},
                {"version", kCalibrationVersion},
                {"crossover_maps", std::move(maps)},
                {"zeta_maps", std::move(zetas)}};
}

Calibration calibration_from_json(const json& doc) {
    try {
        if (doc.at("format").get<std::string>() != kCalibrationFormat) {
            throw ValidationError("not a calibration document");
        }
        if (doc.at("version").get<int>() != kCalibrationVersion) {
            throw ValidationError("unsupported calibration version " + doc.at("version").dump());
        }
        Calibration cal;
        for (const auto& m : doc.at("crossover_maps")) {
            const Resolution from = parse_res(m.at("from").get<std::string>());
            const Resolution to = parse_res(m.at("to").get<std::string>());
            std::size_t idx = kAdjacentPairs.size();
            for (std::size_t i = 0; i < kAdjacentPairs.size(); ++i) {
                if (kAdjacentPairs[i].lower == from && kAdjacentPairs[i].upper == to) idx = i;
            }
            if (idx == kAdjacentPairs.size()) throw ValidationError("crossover map for non-adjacent pair");
            if (m.at("available").get<bool>()) cal.crossover_maps[idx] = map_from_json(m);
        }
        for (const auto& z : doc.at("zeta_maps")) {
            if (!z.value("available", true)) continue;
            ZetaKey key{parse_res(z.at("from").get<std::string>()), parse_res(z.at("to").get<std::string>())};
            cal.zeta_maps.emplace(key, map_from_json(z));
        }
        return cal;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed calibration: ") + e.what());
    }
}

json predicted_crfs_to_json(const PredictedCrfs& pred) {
    return json{{"scene_id", pred.scene_id},     {"crf_hq_s1", pred.crf_hq_s1},
                {"crf_low_s2", pred.crf_low_s2}, {"crf_low_s3", pred.crf_low_s3},
                {"crf_low_s4", pred.crf_low_s4}, {"provenance", to_string(pred.provenance)}};
}

PredictedCrfs predicted_crfs_from_json(const json& doc) {
    if (!doc.is_object()) throw ValidationError("prediction must be a JSON object");
    static const std::array<const char*, 6> kFields{"scene_id",   "crf_hq_s1",  "crf_low_s2",
                                                    "crf_low_s3", "crf_low_s4", "provenance"};
    for (const char* f : kFields) {
        if (!doc.contains(f)) throw ValidationError(std::string("prediction missing field '") + f + "'");
    }
    for (const auto& [key, _] : doc.items()) {
        if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
            throw ValidationError("prediction has unknown field '" + key + "'");
        }
    }
    auto crf = [&](const char* f) {
        const json& v = doc.at(f);
        if (!v.is_number_integer()) throw ValidationError(std::string("prediction field '") + f + "' must be an integer");
        return v.get<int>();
    };
    if (!doc.at("scene_id").is_string()) throw ValidationError("prediction field 'scene_id' must be a string");
    if (!doc.at("provenance").is_string()) throw ValidationError("prediction field 'provenance' must be a string");

    PredictedCrfs p;
    p.scene_id = doc.at("scene_id").get<std::string>();
    if (!valid_scene_id(p.scene_id)) throw ValidationError("invalid scene_id '" + p.scene_id + "'");
    p.crf_hq_s1 = crf("crf_hq_s1");
    p.crf_low_s2 = crf("crf_low_s2");
    p.crf_low_s3 = crf("crf_low_s3");
    p.crf_low_s4 = crf("crf_low_s4");
    auto prov = parse_provenance(doc.at("provenance").get<std::string>());
    if (!prov) throw ValidationError("prediction field 'provenance' must be model, file or fallback");
    p.provenance = *prov;
    p.validate();
    return p;
}

std::vector<PredictedCrfs> predicted_crfs_file(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("malformed prediction JSON " + path.string() + ": " + e.what());
    }
    std::vector<PredictedCrfs> out;
    if (doc.is_array()) {
        for (const auto& item : doc) out.push_back(predicted_crfs_from_json(item));
    } else {
        out.push_back(predicted_crfs_from_json(doc));
    }
    return out;
}

}  // namespace ladder::io
