#pragma once

// Shared test helpers: scratch directories, a brute-force hull oracle and
// in-process stand-ins for the encode, decode and quality tools.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "ladder/orchestrator.hpp"
#include "ladder/rq_model.hpp"
#include "ladder/synthetic.hpp"

namespace ladder::testing {

namespace fs = std::filesystem;

class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("ladder-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

inline std::tuple<int, int> key_of(const RQPoint& p) { return {rank(p.resolution), p.crf}; }

/// Hull by definition rather than construction. Coordinates should be exact
/// in double arithmetic (small integers) so the orientation test is exact.
/// Among identical (bitrate, vmaf) points the smallest (resolution, crf) wins.
inline std::vector<RQPoint> brute_force_hull(const std::vector<RQPoint>& input) {
    std::vector<RQPoint> pts;
    for (const auto& p : input) {
        auto same = std::find_if(pts.begin(), pts.end(), [&](const RQPoint& q) {
            return q.bitrate_kbps == p.bitrate_kbps && q.vmaf == p.vmaf;
        });
        if (same == pts.end()) {
            pts.push_back(p);
        } else if (key_of(p) < key_of(*same)) {
            *same = p;
        }
    }
    auto dominated = [&](const RQPoint& p) {
        return std::any_of(pts.begin(), pts.end(), [&](const RQPoint& q) {
            const bool distinct = q.bitrate_kbps != p.bitrate_kbps || q.vmaf != p.vmaf;
            return distinct && q.bitrate_kbps <= p.bitrate_kbps && q.vmaf >= p.vmaf;
        });
    };
    std::vector<RQPoint> candidates;
    std::copy_if(pts.begin(), pts.end(), std::back_inserter(candidates), [&](const RQPoint& p) { return !dominated(p); });

    std::vector<RQPoint> hull;
    for (const auto& p : candidates) {
        bool below_chord = false;
        for (const auto& a : candidates) {
            for (const auto& b : candidates) {
                if (!(a.bitrate_kbps < p.bitrate_kbps && p.bitrate_kbps < b.bitrate_kbps)) continue;
                const double cross = (b.bitrate_kbps - a.bitrate_kbps) * (p.vmaf - a.vmaf) -
                                     (b.vmaf - a.vmaf) * (p.bitrate_kbps - a.bitrate_kbps);
                if (cross < 0) below_chord = true;
            }
        }
        if (!below_chord) hull.push_back(p);
    }
    std::sort(hull.begin(), hull.end(),
              [](const RQPoint& a, const RQPoint& b) { return a.bitrate_kbps < b.bitrate_kbps; });
    return hull;
}

/// Random points on a small integer grid, many ties and collinear runs.
inline std::vector<RQPoint> random_grid_points(std::mt19937_64& rng, int max_points = 40) {
    std::uniform_int_distribution<int> count(1, max_points);
    std::uniform_int_distribution<int> rate(1, 60);
    std::uniform_int_distribution<int> quality(0, 40);
    std::uniform_int_distribution<int> res(0, 3);
    std::uniform_int_distribution<int> crf(kMinCrf, kMaxCrf);
    std::set<std::pair<int, int>> keys;
    std::vector<RQPoint> pts;
    const int n = count(rng);
    while (static_cast<int>(pts.size()) < n) {
        const int r = res(rng), c = crf(rng);
        if (!keys.insert({r, c}).second) continue;
        pts.push_back({kResolutions[r], c, 100.0 * rate(rng), 2.5 * quality(rng)});
    }
    return pts;
}

/// Stand-ins for external tools. Commands look like
///   mockenc <output> <width> <crf>
///   mockdec <input> <output> <width> <height>
///   mockvmaf <distorted> <reference> <width> <height> [log]
/// Encodes write a file whose size follows a synthetic scene; measures report
/// the scene's vmaf for the resolution and crf encoded in the file name.
class MockTools {
public:
    explicit MockTools(SyntheticScene scene, double duration_seconds)
        : scene_(std::move(scene)), duration_(duration_seconds) {}

    static ToolTemplates templates(bool with_decode = true, bool with_log = false) {
        ToolTemplates t;
        t.encode = "mockenc {output} {width} {crf}";
        if (with_decode) t.decode = "mockdec {input} {output} {width} {height}";
        t.measure = with_log ? "mockvmaf {distorted} {reference} {width} {height} {log}"
                             : "mockvmaf {distorted} {reference} {width} {height}";
        return t;
    }

    void fail_on(Resolution r, int crf) { failing_.insert({rank(r), crf}); }

    ProcessRunner runner() {
        return [this](const std::string& cmd) { return handle(cmd); };
    }

    int encode_calls() const { return encode_calls_.load(); }

    std::vector<std::vector<std::string>> commands(const std::string& tool) const {
        std::lock_guard lock(mutex_);
        std::vector<std::vector<std::string>> out;
        for (const auto& c : commands_) {
            if (!c.empty() && c[0] == tool) out.push_back(c);
        }
        return out;
    }

    std::size_t expected_bytes(Resolution r, int crf) const {
        return static_cast<std::size_t>(std::llround(scene_.bitrate(r, crf) * 1000.0 * duration_ / 8.0));
    }

    double vmaf(Resolution r, int crf) const {
        return std::round(scene_.encode(r, crf).vmaf * 1e6) / 1e6;
    }

private:
    static std::vector<std::string> split(const std::string& cmd) {
        std::vector<std::string> out;
        std::istringstream in(cmd);
        std::string tok;
        while (in >> tok) {
            if (tok.size() >= 2 && tok.front() == '\'' && tok.back() == '\'') tok = tok.substr(1, tok.size() - 2);
            out.push_back(tok);
        }
        return out;
    }

    static std::pair<Resolution, int> parse_stem(const fs::path& p) {
        std::string stem = p.stem().string();
        if (auto pos = stem.find("_decoded"); pos != std::string::npos) stem.resize(pos);
        const auto us = stem.find("_crf");
        return {*parse_resolution(stem.substr(0, us)), std::stoi(stem.substr(us + 4))};
    }

    static Resolution from_width(int w) {
        for (Resolution r : kResolutions) {
            if (width(r) == w) return r;
        }
        throw std::runtime_error("mock: unknown width");
    }

    ProcessResult handle(const std::string& cmd) {
        const auto argv = split(cmd);
        {
            std::lock_guard lock(mutex_);
            commands_.push_back(argv);
        }
        if (argv.empty()) return {127, "empty command"};
        if (argv[0] == "mockenc") {
            ++encode_calls_;
            const Resolution r = from_width(std::stoi(argv[2]));
            const int crf = std::stoi(argv[3]);
            if (failing_.count({rank(r), crf})) return {1, "mockenc: simulated failure"};
            spit(argv[1], std::string(expected_bytes(r, crf), 'x'));
            return {0, ""};
        }
        if (argv[0] == "mockdec") {
            spit(argv[2], "decoded");
            return {0, ""};
        }
        if (argv[0] == "mockvmaf") {
            const auto [r, crf] = parse_stem(argv[1]);
            std::ostringstream score;
            score.precision(17);
            score << vmaf(r, crf);
            if (argv.size() > 5) {
                spit(argv[5], R"({"pooled_metrics": {"vmaf": {"mean": )" + score.str() + "}}}");
                return {0, "done"};
            }
            return {0, "VMAF score: " + score.str() + "\n"};
        }
        return {127, "unknown tool " + argv[0]};
    }

    SyntheticScene scene_;
    double duration_;
    std::set<std::pair<int, int>> failing_;
    std::atomic<int> encode_calls_{0};
    mutable std::mutex mutex_;
    std::vector<std::vector<std::string>> commands_;
};

inline SceneManifest mock_manifest(const std::string& id, const fs::path& source) {
    SceneManifest m;
    m.scene_id = id;
    m.source_path = source;
    m.frame_rate = 30;
    m.frame_count = 60;
    return m;
}

}  // namespace ladder::testing
