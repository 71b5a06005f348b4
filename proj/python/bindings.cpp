#include <pybind11/pybind11.h>
#include <pybind11/operators.h>
#include <pybind11/stl.h>

#include "ladder/bd_metrics.hpp"
#include "ladder/crf_rate_model.hpp"
#include "ladder/error.hpp"
#include "ladder/evaluation.hpp"
#include "ladder/io.hpp"
#include "ladder/ladder_predictor.hpp"
#include "ladder/pchip.hpp"
#include "ladder/rq_model.hpp"
#include "ladder/synthetic.hpp"

namespace py = pybind11;
using namespace ladder;

namespace {

std::vector<RateQuality> to_anchors(const std::vector<std::pair<double, double>>& pts) {
    std::vector<RateQuality> out;
    for (auto [r, q] : pts) out.push_back({r, q});
    return out;
}

py::object optional_float(const std::optional<double>& v) { return v ? py::cast(*v) : py::none(); }

PredictedCrfs parse_prediction(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return io::predicted_crfs_from_json(doc);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Per-scene bitrate ladder construction";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ToolError>(m, "ToolError", PyExc_RuntimeError);

    py::enum_<Resolution>(m, "Resolution")
        .value("R1080P", Resolution::k1080p)
        .value("R720P", Resolution::k720p)
        .value("R480P", Resolution::k480p)
        .value("R360P", Resolution::k360p);
    m.def("label", [](Resolution r) { return std::string(label(r)); });

    py::class_<RQPoint>(m, "RQPoint")
        .def(py::init<Resolution, int, double, double>(), py::arg("resolution"), py::arg("crf"),
             py::arg("bitrate_kbps"), py::arg("vmaf"))
        .def_readwrite("resolution", &RQPoint::resolution)
        .def_readwrite("crf", &RQPoint::crf)
        .def_readwrite("bitrate_kbps", &RQPoint::bitrate_kbps)
        .def_readwrite("vmaf", &RQPoint::vmaf)
        .def(py::self == py::self)
        .def("__repr__", [](const RQPoint& p) {
            return "RQPoint(" + std::string(label(p.resolution)) + ", crf=" + std::to_string(p.crf) +
                   ", bitrate_kbps=" + io::format_double(p.bitrate_kbps) + ", vmaf=" + io::format_double(p.vmaf) +
                   ")";
        });

    m.def("pareto_front", [](const std::vector<RQPoint>& pts) { return build_pareto_front(pts).points(); },
          "Upper-left convex hull of (bitrate, vmaf), ascending bitrate.");
    m.def("nearest_by_bitrate",
          [](const std::vector<RQPoint>& pts, double target) {
              return nearest_by_bitrate(build_pareto_front(pts), target);
          });

    py::class_<CrfRateModel>(m, "CrfRateModel")
        .def_readonly("resolution", &CrfRateModel::resolution)
        .def_readonly("zeta", &CrfRateModel::zeta)
        .def_readonly("delta", &CrfRateModel::delta)
        .def_readonly("r_squared", &CrfRateModel::r_squared)
        .def("raw_crf", &CrfRateModel::raw_crf)
        .def("bitrate_for_crf", &CrfRateModel::bitrate_for_crf)
        .def("crf_for_bitrate", [](const CrfRateModel& model, double kbps) { return crf_for_bitrate(model, kbps).crf; });
    m.def(
        "fit_crf_rate",
        [](const std::vector<std::pair<int, double>>& samples, Resolution r) {
            std::vector<CrfRateSample> s;
            for (auto [crf, kbps] : samples) s.push_back({crf, kbps});
            return fit_crf_rate(s, r);
        },
        py::arg("samples"), py::arg("resolution") = Resolution::k1080p,
        "Fit CRF = zeta * log2(kbps) + delta from (crf, kbps) pairs.");
    m.def("round_and_clamp_crf", [](double raw) { return round_and_clamp_crf(raw).crf; });

    py::class_<MonotoneCubic>(m, "MonotoneCubic")
        .def(py::init([](const std::vector<double>& x, const std::vector<double>& y) {
            if (x.size() != y.size()) throw ValidationError("x and y differ in length");
            return MonotoneCubic(x, y);
        }))
        .def("__call__", &MonotoneCubic::operator())
        .def("integral", &MonotoneCubic::integral)
        .def_property_readonly("slopes", &MonotoneCubic::slopes);

    m.def(
        "bd_metrics",
        [](const std::vector<std::pair<double, double>>& test, const std::vector<std::pair<double, double>>& ref) {
            const auto t = to_anchors(test), r = to_anchors(ref);
            const BDResult bd = bd_metrics(RQAnchorSet::from_points(t), RQAnchorSet::from_points(r));
            py::dict out;
            out["status"] = bd.status == BDStatus::kOk ? "ok" : "no-overlap";
            out["bd_rate_percent"] = optional_float(bd.bd_rate_percent);
            out["bd_vmaf"] = optional_float(bd.bd_vmaf);
            out["mean_log2_rate_gap"] = optional_float(bd.mean_log2_rate_gap);
            return out;
        },
        py::arg("test"), py::arg("reference"), "BD-rate and BD-VMAF from (kbps, vmaf) anchors.");

    m.def(
        "validate_predictions",
        [](const std::string& text) { return io::predicted_crfs_to_json(parse_prediction(text)).dump(); },
        "Check one PredictedCrfs JSON document and return it normalised.");
    m.def(
        "plan_pre_encodes",
        [](const std::string& prediction, const std::string& calibration) {
            const Calibration cal = io::calibration_from_json(nlohmann::json::parse(calibration));
            std::vector<std::tuple<Resolution, int, std::string>> out;
            for (const auto& j : plan_pre_encodes(parse_prediction(prediction), cal).jobs) {
                out.emplace_back(j.resolution, j.crf, std::string(to_string(j.purpose)));
            }
            return out;
        },
        py::arg("prediction"), py::arg("calibration"));

    m.def("synthetic_sweep", [](const std::string& id, std::uint64_t seed) {
        return make_synthetic_scene(id, seed).sweep().points();
    });
    m.def(
        "reference_ladder",
        [](const std::string& id, const std::vector<RQPoint>& pts, double k, double r_min) {
            return build_reference(RQSweep(id, pts), k, r_min).ladder.rows;
        },
        py::arg("scene_id"), py::arg("points"), py::arg("k") = kDefaultK, py::arg("r_min") = kDefaultRMinKbps);
    m.def("ground_truth_predictions", [](const std::string& id, const std::vector<RQPoint>& pts) {
        return io::predicted_crfs_to_json(ground_truth_predictions(RQSweep(id, pts))).dump();
    });
}
