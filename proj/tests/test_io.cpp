#include <doctest.h>

#include <limits>
#include <random>

#include "ladder/error.hpp"
#include "ladder/io.hpp"
#include "ladder/synthetic.hpp"
#include "support.hpp"

using namespace ladder;
using nlohmann::json;

namespace {

json valid_prediction() {
    return json{{"scene_id", "scene_01"}, {"crf_hq_s1", 24},  {"crf_low_s2", 29},
                {"crf_low_s3", 34},       {"crf_low_s4", 39}, {"provenance", "model"}};
}

}  // namespace

TEST_CASE("doubles round-trip exactly") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 10000; ++i) {
        const double v = u(rng);
        CHECK(io::parse_double(io::format_double(v)) == v);
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(1500.0) == "1500");
    CHECK_THROWS_AS(io::parse_double("12x"), ValidationError);
    CHECK_THROWS_AS(io::parse_double(""), ValidationError);
}

TEST_CASE("scene id rules") {
    CHECK(io::valid_scene_id("abc_01-x.y"));
    CHECK_FALSE(io::valid_scene_id(""));
    CHECK_FALSE(io::valid_scene_id("a b"));
    CHECK_FALSE(io::valid_scene_id("a,b"));
    CHECK_FALSE(io::valid_scene_id("../x"));
    CHECK_FALSE(io::valid_scene_id(".."));
}

TEST_CASE("sweep CSV round-trip") {
    const RQSweep sweep = make_synthetic_scene("rt", 3).sweep();
    const std::string csv = io::sweep_to_csv(sweep);
    CHECK(csv.rfind(std::string(io::kSweepHeader) + "\n", 0) == 0);
    const RQSweep back = io::sweep_from_csv(csv);
    CHECK(back.scene_id() == "rt");
    CHECK(back.points() == sweep.points());
    CHECK(back.is_complete());
    CHECK(io::sweep_to_csv(back) == csv);
}

TEST_CASE("sweep CSV accepts CRLF line endings") {
    const std::string csv = "scene_id,resolution,crf,bitrate_kbps,vmaf\r\ns,720p,30,1200.5,81.25\r\n";
    const RQSweep s = io::sweep_from_csv(csv);
    REQUIRE(s.points().size() == 1);
    CHECK(s.points()[0].bitrate_kbps == 1200.5);
}

TEST_CASE("malformed sweep CSVs are rejected") {
    const std::string header = std::string(io::kSweepHeader) + "\n";
    CHECK_THROWS_AS(io::sweep_from_csv(""), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv("a,b,c\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,720p,30,1200\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,900p,30,1200,80\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,720p,9,1200,80\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,720p,30,abc,80\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,720p,30,1200,80\nt,720p,31,1100,79\n"), ValidationError);
    CHECK_THROWS_AS(io::sweep_from_csv(header + "s,720p,30,1200,80\ns,720p,30,1100,79\n"), ValidationError);
}

TEST_CASE("front and ladder CSV round-trip") {
    const RQSweep sweep = make_synthetic_scene("rt", 5).sweep();
    const ParetoFront front = build_pareto_front(sweep.points());
    std::string id;
    CHECK(io::points_from_csv(io::front_to_csv("rt", front), &id) == front.points());
    CHECK(id == "rt");

    BitrateLadder ladder;
    ladder.rows = {front.points().back(), front.points()[front.size() / 2], front.points().front()};
    const std::string csv = io::ladder_to_csv("rt", ladder);
    const BitrateLadder back = io::ladder_from_csv(csv, &id);
    CHECK(back.rows == ladder.rows);
    CHECK(id == "rt");
    CHECK_THROWS_AS(io::ladder_from_csv(std::string(io::kLadderHeader) + "\nrt,2,720p,30,1000,80\n"),
                    ValidationError);
}

TEST_CASE("calibration JSON round-trip") {
    Calibration cal;
    cal.crossover_maps[0] = LinearMap{0.93, 2.5, 0.97, 40};
    cal.crossover_maps[2] = LinearMap{1.01, -0.25, std::nullopt, 2};
    cal.zeta_maps.emplace(kDefaultZetaKey, LinearMap{0.95, -0.3, 0.99, 40});
    const json doc = io::calibration_to_json(cal);
    CHECK(doc.at("format") == io::kCalibrationFormat);
    CHECK(doc.at("version") == io::kCalibrationVersion);
    CHECK(io::calibration_from_json(json::parse(doc.dump())) == cal);
}

TEST_CASE("bad calibration documents") {
    CHECK_THROWS_AS(io::calibration_from_json(json::object()), ValidationError);
    json doc = io::calibration_to_json(Calibration{});
    doc["version"] = 99;
    CHECK_THROWS_WITH_AS(io::calibration_from_json(doc), doctest::Contains("version"), ValidationError);
    doc = io::calibration_to_json(Calibration{});
    doc["crossover_maps"][0]["from"] = "360p";
    CHECK_THROWS_AS(io::calibration_from_json(doc), ValidationError);
}

TEST_CASE("prediction schema accepts the contract document") {
    const PredictedCrfs p = io::predicted_crfs_from_json(valid_prediction());
    CHECK(p == PredictedCrfs{"scene_01", 24, 29, 34, 39, Provenance::kModel});
    CHECK(io::predicted_crfs_to_json(p) == valid_prediction());
}

TEST_CASE("prediction schema rejects each kind of violation") {
    for (const char* field : {"scene_id", "crf_hq_s1", "crf_low_s2", "crf_low_s3", "crf_low_s4", "provenance"}) {
        json doc = valid_prediction();
        doc.erase(field);
        CHECK_THROWS_WITH_AS(io::predicted_crfs_from_json(doc), doctest::Contains(field), ValidationError);
    }
    json doc = valid_prediction();
    doc["confidence"] = 0.9;
    CHECK_THROWS_WITH_AS(io::predicted_crfs_from_json(doc), doctest::Contains("confidence"), ValidationError);

    doc = valid_prediction();
    doc["crf_low_s2"] = 29.5;
    CHECK_THROWS_WITH_AS(io::predicted_crfs_from_json(doc), doctest::Contains("integer"), ValidationError);
    doc["crf_low_s2"] = "29";
    CHECK_THROWS_AS(io::predicted_crfs_from_json(doc), ValidationError);

    doc = valid_prediction();
    doc["crf_low_s4"] = 52;
    CHECK_THROWS_WITH_AS(io::predicted_crfs_from_json(doc), doctest::Contains("crf_low_s4"), ValidationError);
    doc["crf_low_s4"] = 9;
    CHECK_THROWS_AS(io::predicted_crfs_from_json(doc), ValidationError);

    doc = valid_prediction();
    doc["provenance"] = "oracle";
    CHECK_THROWS_WITH_AS(io::predicted_crfs_from_json(doc), doctest::Contains("provenance"), ValidationError);

    doc = valid_prediction();
    doc["scene_id"] = "a/b";
    CHECK_THROWS_AS(io::predicted_crfs_from_json(doc), ValidationError);
    doc["scene_id"] = 7;
    CHECK_THROWS_AS(io::predicted_crfs_from_json(doc), ValidationError);

    CHECK_THROWS_AS(io::predicted_crfs_from_json(json::array()), ValidationError);
}

TEST_CASE("prediction files hold one object or a list") {
    ladder::testing::TempDir dir;
    io::write_text(dir / "one.json", valid_prediction().dump());
    CHECK(io::predicted_crfs_file(dir / "one.json").size() == 1);

    json second = valid_prediction();
    second["scene_id"] = "scene_02";
    second["provenance"] = "fallback";
    io::write_text(dir / "many.json", json::array({valid_prediction(), second}).dump());
    const auto many = io::predicted_crfs_file(dir / "many.json");
    REQUIRE(many.size() == 2);
    CHECK(many[1].provenance == Provenance::kFallback);

    io::write_text(dir / "bad.json", "{not json");
    CHECK_THROWS_AS(io::predicted_crfs_file(dir / "bad.json"), ValidationError);
    CHECK_THROWS_AS(io::predicted_crfs_file(dir / "missing.json"), ValidationError);
}

TEST_CASE("write_text replaces files atomically") {
    ladder::testing::TempDir dir;
    const auto p = dir / "nested" / "out.txt";
    io::write_text(p, "first");
    io::write_text(p, "second");
    CHECK(io::read_text(p) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(p.parent_path())) ++entries;
    CHECK(entries == 1);
}
