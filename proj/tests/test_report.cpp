#include <doctest.h>

#include "ladder/error.hpp"
#include "ladder/io.hpp"
#include "ladder/report.hpp"
#include "support.hpp"

using namespace ladder;
using ladder::testing::TempDir;
using nlohmann::json;

namespace {

std::vector<RQPoint> ladder_rows(double top, double vmaf) {
    std::vector<RQPoint> rows;
    for (int i = 0; i < 5; ++i) {
        rows.push_back({i < 2 ? Resolution::k1080p : Resolution::k720p, 22 + 4 * i, top / (1 << i), vmaf - 6.5 * i});
    }
    return rows;
}

VariantReport variant(double top, double vmaf, std::optional<double> delta_rate) {
    VariantReport v;
    v.rows = ladder_rows(top, vmaf);
    v.counts = {7, 4};
    v.hq_delta = {delta_rate, vmaf - 92.0};
    return v;
}

RunReport sample_report() {
    RunReport r;
    SceneReport a;
    a.scene_id = "alpha";
    a.reference = ladder_rows(6000, 94);
    a.with_hq = variant(6100, 94.2, 310.0);
    a.without_hq = variant(9000, 97.5, 3100.25);
    a.without_hq->warnings.push_back("note, with \"quotes\" and a comma");
    compute_bd(a);

    SceneReport b;
    b.scene_id = "beta";
    b.with_hq = variant(2500, 90.5, -420.0);
    b.with_hq->error = "encode 720p crf 30 failed: disk full";
    b.warnings.push_back("reference unavailable");
    compute_bd(b);

    SceneReport c;
    c.scene_id = "gamma";
    c.reference = ladder_rows(3000, 93);
    r.scenes = {a, b, c};
    return r;
}

}  // namespace

TEST_CASE("variant names") {
    CHECK(to_string(Variant::kWithHq) == "with_hq");
    CHECK(parse_variant("without_hq") == Variant::kWithoutHq);
    CHECK_FALSE(parse_variant("maybe"));
}

TEST_CASE("compute_bd explains missing metrics") {
    const RunReport r = sample_report();
    const SceneReport& a = r.scenes[0];
    REQUIRE(a.with_hq->bd);
    CHECK(a.with_hq->bd->status == BDStatus::kOk);
    const SceneReport& b = r.scenes[1];
    CHECK_FALSE(b.with_hq->bd);
    CHECK(b.with_hq->warnings.back().find("reference unavailable") != std::string::npos);

    SceneReport single;
    single.reference = ladder_rows(5000, 94);
    single.with_hq = VariantReport{};
    single.with_hq->rows = {ladder_rows(5000, 94).front()};
    compute_bd(single);
    CHECK_FALSE(single.with_hq->bd);
    CHECK(single.with_hq->warnings.back().find("single-row") != std::string::npos);
}

TEST_CASE("summary statistics") {
    const Stat s = summarize({1.0, 2.0, 3.0});
    CHECK(s.n == 3);
    CHECK(*s.mean == 2.0);
    CHECK(*s.sd == doctest::Approx(1.0));
    const Stat one = summarize({4.0});
    CHECK(*one.mean == 4.0);
    CHECK_FALSE(one.sd);
    CHECK_FALSE(summarize({}).mean);
}

TEST_CASE("HQ effect groups first rows by the vmaf target") {
    const auto rows = hq_effect(sample_report());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].variant == Variant::kWithHq);
    CHECK(rows[0].above);
    CHECK(rows[0].delta_vmaf.n == 1);
    CHECK(*rows[0].delta_vmaf.mean == doctest::Approx(2.2));
    CHECK(*rows[0].delta_rate_mbps.mean == doctest::Approx(0.31));
    CHECK_FALSE(rows[1].above);
    CHECK(*rows[1].delta_vmaf.mean == doctest::Approx(-1.5));
    CHECK(*rows[1].delta_rate_mbps.mean == doctest::Approx(-0.42));
    CHECK(rows[2].variant == Variant::kWithoutHq);
    CHECK(*rows[2].delta_rate_mbps.mean == doctest::Approx(3.10025));
    CHECK(rows[3].delta_vmaf.n == 0);
    CHECK_FALSE(rows[3].delta_vmaf.mean);

    const std::string csv = hq_effect_csv(rows);
    CHECK(csv.find("with_hq") != std::string::npos);
    CHECK(csv.find("without_hq") != std::string::npos);
}

TEST_CASE("histograms cover every value") {
    const RunReport r = sample_report();
    const auto bins = histogram(r, 1.0, false);
    int total = 0;
    for (const auto& b : bins) {
        CHECK(b.high - b.low == doctest::Approx(1.0));
        total += b.counts[0] + b.counts[1];
    }
    CHECK(total == 3);
    CHECK(bins.front().low == -2.0);
    CHECK(bins.back().high == 6.0);
    CHECK(histogram(RunReport{}, 0.5, true).empty());
    CHECK_THROWS_AS(histogram(r, 0.0, true), ValidationError);
}

TEST_CASE("complexity per variant") {
    const RunReport r = sample_report();
    const ComplexityReport with = complexity_of(r, Variant::kWithHq);
    CHECK(with.scenes.size() == 2);
    CHECK(with.mean_total == 11.0);
    CHECK(complexity_of(r, Variant::kWithoutHq).scenes.size() == 1);
}

TEST_CASE("JSON round-trip") {
    const RunReport r = sample_report();
    const json doc = report_to_json(r);
    CHECK(report_from_json(json::parse(doc.dump())) == r);
    CHECK(report_from_json(report_to_json(RunReport{})) == RunReport{});
}

TEST_CASE("CSV round-trip") {
    const RunReport r = sample_report();
    const ReportCsvs csvs = report_to_csvs(r);
    CHECK(csvs.scenes.rfind("scene_id,variant,", 0) == 0);
    CHECK(csvs.ladders.rfind("scene_id,ladder,rung,", 0) == 0);
    CHECK(csvs.warnings.rfind("scene_id,source,message", 0) == 0);
    CHECK(report_from_csvs(csvs) == r);
    CHECK(report_from_csvs(report_to_csvs(RunReport{})) == RunReport{});
}

TEST_CASE("sidecars carry counts, deltas and warnings") {
    VariantReport v = variant(5000, 93.0, 250.0);
    v.warnings = {"a", "b"};
    v.error = "boom";
    VariantReport back;
    back.rows = v.rows;
    apply_sidecar(variant_sidecar("s", v), back);
    CHECK(back == v);
}

TEST_CASE("empty run directory gives an empty report") {
    TempDir dir;
    const RunReport r = load_run_directory(dir.path());
    CHECK(r.scenes.empty());
    write_report(r, dir / "report");
    const std::string scenes = io::read_text(dir / "report" / "scenes.csv");
    CHECK(std::count(scenes.begin(), scenes.end(), '\n') == 1);
    CHECK_THROWS_AS(load_run_directory(dir / "missing"), ValidationError);
}

TEST_CASE("run directory with one scene") {
    TempDir dir;
    BitrateLadder ref;
    ref.rows = ladder_rows(6000, 94);
    BitrateLadder pred;
    pred.rows = ladder_rows(6300, 94);
    io::write_text(dir / reference_ladder_file("solo"), io::ladder_to_csv("solo", ref));
    io::write_text(dir / predicted_ladder_file("solo", Variant::kWithHq), io::ladder_to_csv("solo", pred));
    VariantReport v;
    v.rows = pred.rows;
    v.counts = {7, 3};
    v.hq_delta = {400.0, 2.4};
    io::write_text(dir / predicted_sidecar_file("solo", Variant::kWithHq), variant_sidecar("solo", v).dump());
    io::write_text(dir / "unrelated.txt", "ignored");

    const RunReport r = load_run_directory(dir.path());
    REQUIRE(r.scenes.size() == 1);
    const SceneReport& s = r.scenes[0];
    CHECK(s.scene_id == "solo");
    REQUIRE(s.with_hq);
    CHECK_FALSE(s.without_hq);
    CHECK(s.with_hq->counts.total() == 10);
    REQUIRE(s.with_hq->bd);
    CHECK(*s.with_hq->bd->bd_rate_percent == doctest::Approx(5.0));

    write_report(r, dir / "out");
    for (const char* f : {"report.json", "scenes.csv", "ladders.csv", "warnings.csv", "hq_effect.csv",
                          "bd_histogram.csv", "delta_vmaf_histogram.csv"}) {
        CHECK(std::filesystem::exists(dir / "out" / f));
    }
    const std::string scenes = io::read_text(dir / "out" / "scenes.csv");
    CHECK(std::count(scenes.begin(), scenes.end(), '\n') == 2);
    CHECK(report_from_json(json::parse(io::read_text(dir / "out" / "report.json"))) == r);
}

TEST_CASE("ladder without a sidecar or reference") {
    TempDir dir;
    BitrateLadder pred;
    pred.rows = ladder_rows(6300, 94.4);
    io::write_text(dir / predicted_ladder_file("lone", Variant::kWithoutHq), io::ladder_to_csv("lone", pred));
    const RunReport r = load_run_directory(dir.path());
    REQUIRE(r.scenes.size() == 1);
    const SceneReport& s = r.scenes[0];
    CHECK_FALSE(s.reference);
    CHECK(s.warnings == std::vector<std::string>{"reference unavailable"});
    REQUIRE(s.without_hq);
    CHECK(s.without_hq->hq_delta.delta_vmaf == doctest::Approx(2.4));
    CHECK(s.without_hq->warnings.front() == "no sidecar: encode counts unknown");
}
