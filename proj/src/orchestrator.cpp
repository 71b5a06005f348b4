#include "ladder/orchestrator.hpp"

#include <openssl/evp.h>
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <regex>
#include <thread>

#include "ladder/error.hpp"
#include "ladder/ground_truth.hpp"
#include "ladder/io.hpp"

namespace ladder {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string path_safe(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')) c = '_';
    }
    return out;
}

std::string job_stem(Resolution r, int crf) {
    return std::string(label(r)) + "_crf" + std::to_string(crf);
}

fs::path resolve(const fs::path& p, const fs::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ValidationError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}

}  // namespace

void SceneManifest::validate() const {
    if (!io::valid_scene_id(scene_id)) throw ValidationError("invalid scene id '" + scene_id + "'");
    if (frame_rate != 24 && frame_rate != 30 && frame_rate != 60) {
        throw ValidationError(scene_id + ": frame rate must be 24, 30 or 60");
    }
    if (frame_count < 30) throw ValidationError(scene_id + ": scenes need at least 30 frames");
    if (pixel_format.find("420") == std::string::npos) {
        throw ValidationError(scene_id + ": source must be 4:2:0, got " + pixel_format);
    }
    if (source_width != 1920 || source_height != 1080) {
        throw ValidationError(scene_id + ": source must be 1920x1080");
    }
}

const SceneManifest& OrchestratorConfig::scene(std::string_view id) const {
    for (const auto& s : scenes) {
        if (s.scene_id == id) return s;
    }
    throw ValidationError("scene '" + std::string(id) + "' not in config");
}

OrchestratorConfig config_from_json(const json& doc, const fs::path& base_dir) {
    try {
        if (!doc.is_object()) throw ValidationError("config must be a JSON object");
        reject_unknown_keys(doc,
                            {"tools", "parallelism", "cache_dir", "work_dir", "encoder_version", "container",
                             "keep_intermediate", "k", "r_min", "resolutions", "scenes"},
                            "config");
        OrchestratorConfig cfg;
        const json& tools = doc.at("tools");
        reject_unknown_keys(tools, {"encode", "decode", "measure"}, "tools");
        cfg.tools.encode = tools.at("encode").get<std::string>();
        cfg.tools.decode = tools.value("decode", std::string{});
        cfg.tools.measure = tools.at("measure").get<std::string>();
        cfg.parallelism = doc.value("parallelism", 1);
        cfg.cache_dir = resolve(doc.value("cache_dir", std::string(".ladder-cache")), base_dir);
        cfg.work_dir = resolve(doc.value("work_dir", std::string(".ladder-work")), base_dir);
        cfg.encoder_version = doc.value("encoder_version", std::string("unknown"));
        cfg.container = doc.value("container", std::string("mp4"));
        cfg.keep_intermediate = doc.value("keep_intermediate", false);
        cfg.k = doc.value("k", kDefaultK);
        cfg.r_min_kbps = doc.value("r_min", kDefaultRMinKbps);
        if (doc.contains("resolutions")) {
            cfg.resolutions.clear();
            for (const auto& r : doc.at("resolutions")) {
                auto res = parse_resolution(r.get<std::string>());
                if (!res) throw ValidationError("unknown resolution " + r.dump());
                cfg.resolutions.push_back(*res);
            }
        }
        for (const auto& s : doc.value("scenes", json::array())) {
            reject_unknown_keys(s, {"scene_id", "source", "frame_rate", "frame_count", "pixel_format"}, "scene");
            SceneManifest m;
            m.scene_id = s.at("scene_id").get<std::string>();
            m.source_path = resolve(s.at("source").get<std::string>(), base_dir);
            m.frame_rate = s.at("frame_rate").get<int>();
            m.frame_count = s.at("frame_count").get<int>();
            m.pixel_format = s.value("pixel_format", std::string("yuv420p"));
            m.validate();
            cfg.scenes.push_back(std::move(m));
        }
        if (cfg.parallelism < 1) throw ValidationError("parallelism must be at least 1");
        if (cfg.tools.encode.empty() || cfg.tools.measure.empty()) {
            throw ValidationError("encode and measure templates are required");
        }
        validate_ladder_params(cfg.k, cfg.r_min_kbps);
        if (const char* env = std::getenv(kCacheDirEnv); env && *env) cfg.cache_dir = env;
        return cfg;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed config: ") + e.what());
    }
}

OrchestratorConfig load_config(const fs::path& path) {
    json doc;
    try {
        doc = json::parse(io::read_text(path));
    } catch (const json::parse_error& e) {
        throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(doc, path.parent_path());
}

ProcessResult run_shell(const std::string& command) {
    const std::string full = "{ " + command + "\n} 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) throw ToolError("cannot start shell for: " + command);
    ProcessResult result;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) result.output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    if (status == -1) {
        result.exit_code = -1;
    } else if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else {
        result.exit_code = 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    }
    return result;
}

std::string shell_quote(std::string_view value) {
    std::string out = "'";
    for (char c : value) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    out += '\'';
    return out;
}

std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t i = 0;
    while (i < tmpl.size()) {
        if (tmpl[i] != '{') {
            out += tmpl[i++];
            continue;
        }
        const std::size_t close = tmpl.find('}', i);
        if (close == std::string_view::npos) throw ValidationError("unterminated placeholder in template");
        const std::string name(tmpl.substr(i + 1, close - i - 1));
        auto it = values.find(name);
        if (it == values.end()) throw ValidationError("unknown placeholder {" + name + "} in template");
        out += it->second;
        i = close + 1;
    }
    return out;
}

double parse_quality_output(std::string_view text) {
    // libvmaf JSON log: pooled_metrics.vmaf.mean
    const auto brace = text.find('{');
    if (brace != std::string_view::npos) {
        json doc = json::parse(text.substr(brace), nullptr, false);
        if (!doc.is_discarded() && doc.is_object()) {
            if (doc.contains("pooled_metrics") && doc["pooled_metrics"].contains("vmaf")) {
                return doc["pooled_metrics"]["vmaf"].at("mean").get<double>();
            }
            if (doc.contains("vmaf") && doc["vmaf"].is_number()) return doc["vmaf"].get<double>();
        }
    }
    static const std::regex kScore(R"(VMAF score[^0-9+\-.]*([+\-]?[0-9]*\.?[0-9]+(?:[eE][+\-]?[0-9]+)?))");
    std::match_results<std::string_view::const_iterator> m;
    std::optional<double> last;
    auto begin = text.begin();
    while (std::regex_search(begin, text.end(), m, kScore)) {
        last = std::stod(m[1].str());
        begin = m[0].second;
    }
    if (last) return *last;
    throw ToolError("unparsable quality output", std::string(text.substr(0, 2000)));
}

std::string sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* kHex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

json record_to_json(const EncodeRecord& r) {
    return json{{"scene_id", r.scene_id},         {"resolution", label(r.resolution)},
                {"crf", r.crf},                   {"bitrate_kbps", r.bitrate_kbps},
                {"vmaf", r.vmaf},                 {"encoder_version", r.encoder_version},
                {"timestamp", r.timestamp}};
}

EncodeRecord record_from_json(const json& j) {
    EncodeRecord r;
    r.scene_id = j.at("scene_id").get<std::string>();
    auto res = parse_resolution(j.at("resolution").get<std::string>());
    if (!res) throw ValidationError("bad resolution in cache record");
    r.resolution = *res;
    r.crf = j.at("crf").get<int>();
    r.bitrate_kbps = j.at("bitrate_kbps").get<double>();
    r.vmaf = j.at("vmaf").get<double>();
    r.encoder_version = j.at("encoder_version").get<std::string>();
    r.timestamp = j.value("timestamp", std::string{});
    return r;
}

EncodeOrchestrator::EncodeOrchestrator(OrchestratorConfig config, ProcessRunner runner)
    : config_(std::move(config)), runner_(std::move(runner)) {
    if (config_.parallelism < 1) throw ValidationError("parallelism must be at least 1");
}

fs::path EncodeOrchestrator::cache_path(const Key& key) const {
    const auto& [scene, res, crf] = key;
    return config_.cache_dir / path_safe(scene) / path_safe(config_.encoder_version) /
           (job_stem(res, crf) + ".json");
}

std::optional<EncodeRecord> EncodeOrchestrator::load_cached(const Key& key) const {
    const fs::path p = cache_path(key);
    std::error_code ec;
    if (!fs::exists(p, ec)) return std::nullopt;
    try {
        EncodeRecord r = record_from_json(json::parse(io::read_text(p)));
        if (r.encoder_version != config_.encoder_version) return std::nullopt;
        return r;
    } catch (const std::exception&) {
        return std::nullopt;  // unreadable entries are recomputed
    }
}

void EncodeOrchestrator::run_tool(const std::string& name, const std::string& command) {
    ProcessResult res = runner_(command);
    if (res.exit_code != 0) {
        throw ToolError(name + " tool exited with status " + std::to_string(res.exit_code), res.output);
    }
}

EncodeRecord EncodeOrchestrator::compute(const SceneManifest& manifest, Resolution resolution, int crf) {
    const fs::path dir = config_.work_dir / path_safe(manifest.scene_id);
    fs::create_directories(dir);
    const std::string stem = job_stem(resolution, crf);
    const fs::path encoded = dir / (stem + "." + config_.container);
    const fs::path decoded = dir / (stem + "_decoded.yuv");
    const fs::path log = dir / (stem + "_quality.json");

    std::map<std::string, std::string> v{
        {"input", shell_quote(manifest.source_path.string())},
        {"output", shell_quote(encoded.string())},
        {"width", std::to_string(width(resolution))},
        {"height", std::to_string(height(resolution))},
        {"crf", std::to_string(crf)},
        {"fps", std::to_string(manifest.frame_rate)},
        {"frames", std::to_string(manifest.frame_count)},
        {"source_width", std::to_string(manifest.source_width)},
        {"source_height", std::to_string(manifest.source_height)},
        {"reference", shell_quote(manifest.source_path.string())},
        {"distorted", shell_quote(encoded.string())},
        {"log", shell_quote(log.string())},
    };

    ++encodes_invoked_;
    run_tool("encode", expand_template(config_.tools.encode, v));
    std::error_code ec;
    const auto bytes = fs::file_size(encoded, ec);
    if (ec) throw ToolError("encode produced no output file " + encoded.string());

    if (!config_.tools.decode.empty()) {
        auto dv = v;
        dv["input"] = shell_quote(encoded.string());
        dv["output"] = shell_quote(decoded.string());
        dv["width"] = std::to_string(manifest.source_width);
        dv["height"] = std::to_string(manifest.source_height);
        run_tool("decode", expand_template(config_.tools.decode, dv));
        v["distorted"] = shell_quote(decoded.string());
    }

    auto mv = v;
    mv["width"] = std::to_string(manifest.source_width);
    mv["height"] = std::to_string(manifest.source_height);
    ProcessResult measured = runner_(expand_template(config_.tools.measure, mv));
    if (measured.exit_code != 0) {
        throw ToolError("measure tool exited with status " + std::to_string(measured.exit_code), measured.output);
    }
    const bool uses_log = config_.tools.measure.find("{log}") != std::string::npos;
    const std::string quality_text = uses_log ? io::read_text(log) : measured.output;
    const double vmaf = parse_quality_output(quality_text);
    if (!(vmaf >= 0.0 && vmaf <= 100.0)) throw ToolError("quality score out of range", quality_text);

    if (!config_.keep_intermediate) {
        fs::remove(encoded, ec);
        fs::remove(decoded, ec);
        fs::remove(log, ec);
    }

    EncodeRecord r;
    r.scene_id = manifest.scene_id;
    r.resolution = resolution;
    r.crf = crf;
    r.bitrate_kbps = 8.0 * static_cast<double>(bytes) / manifest.duration_seconds() / 1000.0;
    r.vmaf = vmaf;
    r.encoder_version = config_.encoder_version;
    r.timestamp = utc_timestamp();
    if (!(r.bitrate_kbps > 0.0)) throw ToolError("encode produced an empty file " + encoded.string());
    return r;
}

EncodeRecord EncodeOrchestrator::run_encode(const SceneManifest& manifest, Resolution resolution, int crf) {
    if (crf < kMinCrf || crf > kMaxCrf) {
        throw ValidationError("crf " + std::to_string(crf) + " outside [10, 51]");
    }
    const Key key{manifest.scene_id, resolution, crf};
    {
        std::shared_lock lock(mutex_);
        if (auto it = memory_.find(key); it != memory_.end()) {
            ++cache_hits_;
            return it->second;
        }
    }

    std::promise<EncodeRecord> promise;
    {
        std::unique_lock lock(mutex_);
        if (auto it = memory_.find(key); it != memory_.end()) {
            ++cache_hits_;
            return it->second;
        }
        if (auto it = in_flight_.find(key); it != in_flight_.end()) {
            auto fut = it->second;
            lock.unlock();
            ++cache_hits_;
            return fut.get();
        }
        if (auto disk = load_cached(key)) {
            memory_.emplace(key, *disk);
            ++cache_hits_;
            return *disk;
        }
        in_flight_.emplace(key, promise.get_future().share());
    }

    ++cache_misses_;
    try {
        EncodeRecord rec = compute(manifest, resolution, crf);
        io::write_text(cache_path(key), record_to_json(rec).dump(2) + "\n");
        {
            std::unique_lock lock(mutex_);
            memory_.emplace(key, rec);
            in_flight_.erase(key);
        }
        promise.set_value(rec);
        return rec;
    } catch (...) {
        {
            std::unique_lock lock(mutex_);
            in_flight_.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w + 1 < workers; ++w) pool.emplace_back(body);
        body();
    }
    if (first_error) std::rethrow_exception(first_error);
}

SweepResult EncodeOrchestrator::exhaustive_sweep(const SceneManifest& manifest) {
    manifest.validate();
    std::vector<std::pair<Resolution, int>> jobs;
    for (Resolution r : config_.resolutions) {
        for (int crf = kMinCrf; crf <= kMaxCrf; ++crf) jobs.emplace_back(r, crf);
    }
    std::vector<std::optional<RQPoint>> points(jobs.size());
    std::vector<std::optional<std::string>> errors(jobs.size());
    parallel_for(jobs.size(), config_.parallelism, [&](std::size_t i) {
        try {
            points[i] = run_encode(manifest, jobs[i].first, jobs[i].second).point();
        } catch (const ToolError& e) {
            errors[i] = std::string(e.what()) + (e.diagnostics().empty() ? "" : ": " + e.diagnostics());
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    SweepResult result;
    std::vector<RQPoint> ok;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (points[i]) {
            ok.push_back(*points[i]);
        } else {
            result.failures.push_back({jobs[i].first, jobs[i].second, errors[i].value_or("unknown failure")});
        }
    }
    result.sweep = RQSweep(manifest.scene_id, std::move(ok));
    return result;
}

std::vector<RQPoint> EncodeOrchestrator::run_batch(const SceneManifest& manifest, std::span<const PreEncodeJob> jobs) {
    std::vector<RQPoint> out(jobs.size());
    parallel_for(jobs.size(), config_.parallelism, [&](std::size_t i) {
        out[i] = run_encode(manifest, jobs[i].resolution, jobs[i].crf).point();
    });
    return out;
}

EncodeFn EncodeOrchestrator::encoder_for(const SceneManifest& manifest) {
    return [this, manifest](Resolution r, int crf) { return run_encode(manifest, r, crf).point(); };
}

BatchEncodeFn EncodeOrchestrator::batch_encoder_for(const SceneManifest& manifest) {
    return [this, manifest](std::span<const PreEncodeJob> jobs) { return run_batch(manifest, jobs); };
}

fs::path EncodeOrchestrator::persist_sweep(const SweepResult& result, const fs::path& out_dir) const {
    const std::string& id = result.sweep.scene_id();
    const fs::path csv = out_dir / (id + ".sweep.csv");
    io::write_text(csv, io::sweep_to_csv(result.sweep));

    json failures = json::array();
    for (const auto& f : result.failures) {
        failures.push_back({{"resolution", label(f.resolution)}, {"crf", f.crf}, {"error", f.message}});
    }
    json sidecar{
        {"scene_id", id},
        {"encoder_version", config_.encoder_version},
        {"quality_reference", "decoded output upscaled to the 1920x1080 source"},
        {"command_hashes",
         {{"encode", sha256_hex(config_.tools.encode)},
          {"decode", sha256_hex(config_.tools.decode)},
          {"measure", sha256_hex(config_.tools.measure)}}},
        {"points", result.sweep.points().size()},
        {"complete", result.sweep.is_complete()},
        {"failures", std::move(failures)},
    };
    io::write_text(out_dir / (id + ".sweep.json"), sidecar.dump(2) + "\n");
    return csv;
}

double reduction_percent(int total_encodes) {
    return 100.0 * (1.0 - static_cast<double>(total_encodes) / kExhaustiveEncodes);
}

double SceneComplexity::reduction_percent() const { return ladder::reduction_percent(total()); }

ComplexityReport complexity_report(std::span<const SceneComplexity> scenes) {
    ComplexityReport rep;
    rep.scenes.assign(scenes.begin(), scenes.end());
    if (scenes.empty()) return rep;
    double total = 0.0, reduction = 0.0;
    for (const auto& s : scenes) {
        total += s.total();
        reduction += s.reduction_percent();
    }
    rep.mean_total = total / static_cast<double>(scenes.size());
    rep.mean_reduction_percent = reduction / static_cast<double>(scenes.size());
    return rep;
}

void EncodeLedger::add(const std::string& scene_id, int pre, int rung) {
    std::lock_guard lock(mutex_);
    auto& s = scenes_[scene_id];
    s.scene_id = scene_id;
    s.pre_encodes += pre;
    s.rung_encodes += rung;
}

SceneComplexity EncodeLedger::scene(const std::string& scene_id) const {
    std::lock_guard lock(mutex_);
    auto it = scenes_.find(scene_id);
    return it == scenes_.end() ? SceneComplexity{scene_id} : it->second;
}

ComplexityReport EncodeLedger::report(std::span<const std::string> scene_ids) const {
    std::vector<SceneComplexity> rows;
    for (const auto& id : scene_ids) rows.push_back(scene(id));
    return complexity_report(rows);
}

}  // namespace ladder
