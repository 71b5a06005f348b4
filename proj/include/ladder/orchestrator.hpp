#pragma once

// Drives the external encode / decode / quality tools through command
// templates, caches every (scene, resolution, crf, encoder version) result,
// runs exhaustive sweeps on a bounded worker pool and tallies encode counts.

#include <atomic>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ladder/ladder_predictor.hpp"
#include "ladder/rq_model.hpp"

namespace ladder {

struct SceneManifest {
    std::string scene_id;
    std::filesystem::path source_path;
    int frame_rate = 30;
    int frame_count = 0;
    std::string pixel_format = "yuv420p";
    int source_width = 1920;
    int source_height = 1080;

    double duration_seconds() const { return static_cast<double>(frame_count) / frame_rate; }
    /// Throws ValidationError on fps outside {24, 30, 60}, fewer than 30
    /// frames, a non-4:2:0 format or a source that is not 1920x1080.
    void validate() const;
};

/// Placeholders: {input} {output} {width} {height} {crf} {fps} {frames}
/// {source_width} {source_height} {distorted} {reference} {log}.
struct ToolTemplates {
    std::string encode;
    std::string decode;   // optional; upscales the encode to source resolution
    std::string measure;  // prints or logs the quality score
};

struct OrchestratorConfig {
    ToolTemplates tools;
    int parallelism = 1;
    std::filesystem::path cache_dir = ".ladder-cache";
    std::filesystem::path work_dir = ".ladder-work";
    std::string encoder_version = "unknown";
    std::string container = "mp4";
    bool keep_intermediate = false;
    double k = kDefaultK;
    double r_min_kbps = kDefaultRMinKbps;
    std::vector<Resolution> resolutions{kResolutions.begin(), kResolutions.end()};
    std::vector<SceneManifest> scenes;

    const SceneManifest& scene(std::string_view id) const;
};

inline constexpr const char* kCacheDirEnv = "LADDER_CACHE_DIR";

/// Reads the JSON config; LADDER_CACHE_DIR overrides cache_dir. Relative
/// paths resolve against the config file's directory.
OrchestratorConfig load_config(const std::filesystem::path& path);
OrchestratorConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

struct ProcessResult {
    int exit_code = 0;
    std::string output;  // stdout and stderr interleaved
};

using ProcessRunner = std::function<ProcessResult(const std::string& command)>;

/// Runs the command through /bin/sh.
ProcessResult run_shell(const std::string& command);

/// Single-quotes a value for /bin/sh.
std::string shell_quote(std::string_view value);

/// Replaces every {name} in the template. Unknown placeholders are an error.
std::string expand_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

/// Extracts the pooled VMAF score from libvmaf JSON or a "VMAF score: x" line.
double parse_quality_output(std::string_view text);

std::string sha256_hex(std::string_view data);

struct EncodeRecord {
    std::string scene_id;
    Resolution resolution = Resolution::k1080p;
    int crf = 0;
    double bitrate_kbps = 0.0;
    double vmaf = 0.0;
    std::string encoder_version;
    std::string timestamp;

    RQPoint point() const { return {resolution, crf, bitrate_kbps, vmaf}; }
};

nlohmann::json record_to_json(const EncodeRecord& r);
EncodeRecord record_from_json(const nlohmann::json& j);

struct SweepFailure {
    Resolution resolution;
    int crf;
    std::string message;
};

struct SweepResult {
    RQSweep sweep;
    std::vector<SweepFailure> failures;
};

class EncodeOrchestrator {
public:
    explicit EncodeOrchestrator(OrchestratorConfig config, ProcessRunner runner = run_shell);

    const OrchestratorConfig& config() const { return config_; }

    /// Cached result or a fresh encode + decode + measure. CRFs outside
    /// [10, 51] are rejected before any tool runs. Concurrent requests for
    /// one key share a single tool run.
    EncodeRecord run_encode(const SceneManifest& manifest, Resolution resolution, int crf);

    /// All configured resolutions x CRF 10..51 on the worker pool. Failed
    /// jobs leave holes and are listed.
    SweepResult exhaustive_sweep(const SceneManifest& manifest);

    /// Runs independent jobs on the pool and returns points in job order.
    std::vector<RQPoint> run_batch(const SceneManifest& manifest, std::span<const PreEncodeJob> jobs);

    EncodeFn encoder_for(const SceneManifest& manifest);
    BatchEncodeFn batch_encoder_for(const SceneManifest& manifest);

    /// Sweep CSV plus JSON sidecar (encoder version, tool command hashes,
    /// failures). Returns the CSV path.
    std::filesystem::path persist_sweep(const SweepResult& result, const std::filesystem::path& out_dir) const;

    long encodes_invoked() const { return encodes_invoked_.load(); }
    long cache_hits() const { return cache_hits_.load(); }
    long cache_misses() const { return cache_misses_.load(); }

private:
    using Key = std::tuple<std::string, Resolution, int>;

    std::filesystem::path cache_path(const Key& key) const;
    std::optional<EncodeRecord> load_cached(const Key& key) const;
    EncodeRecord compute(const SceneManifest& manifest, Resolution resolution, int crf);
    void run_tool(const std::string& name, const std::string& command);

    OrchestratorConfig config_;
    ProcessRunner runner_;

    std::shared_mutex mutex_;
    std::map<Key, EncodeRecord> memory_;
    std::map<Key, std::shared_future<EncodeRecord>> in_flight_;

    std::atomic<long> encodes_invoked_{0};
    std::atomic<long> cache_hits_{0};
    std::atomic<long> cache_misses_{0};
};

/// Runs fn(i) for i in [0, n) on at most `parallelism` threads.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

struct SceneComplexity {
    std::string scene_id;
    int pre_encodes = 0;
    int rung_encodes = 0;

    int total() const { return pre_encodes + rung_encodes; }
    double reduction_percent() const;
};

struct ComplexityReport {
    std::vector<SceneComplexity> scenes;
    int exhaustive_baseline = kExhaustiveEncodes;
    double mean_total = 0.0;
    double mean_reduction_percent = 0.0;
};

/// 100 * (1 - total / 168).
double reduction_percent(int total_encodes);

ComplexityReport complexity_report(std::span<const SceneComplexity> scenes);

/// Thread-safe per-scene, per-phase encode tally.
class EncodeLedger {
public:
    void add(const std::string& scene_id, int pre, int rung);
    SceneComplexity scene(const std::string& scene_id) const;
    ComplexityReport report(std::span<const std::string> scene_ids) const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, SceneComplexity> scenes_;
};

}  // namespace ladder
