#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "cyberchar/cli.hpp"
#include "cyberchar/config.hpp"
#include "cyberchar/error.hpp"
#include "cyberchar/eval.hpp"
#include "cyberchar/io.hpp"

namespace py = pybind11;
using namespace cyberchar;

namespace {

py::array_t<double> to_numpy(const Matrix& m) {
    py::array_t<double> a({m.rows(), m.cols()});
    if (m.rows() * m.cols()) std::memcpy(a.mutable_data(), m.data().data(), m.rows() * m.cols() * sizeof(double));
    return a;
}

Matrix from_numpy(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    require(a.ndim() == 2, ErrorCode::DimensionMismatch, "expected a 2-D array");
    Matrix m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    if (a.size()) std::memcpy(m.data().data(), a.data(), static_cast<std::size_t>(a.size()) * sizeof(double));
    return m;
}

std::vector<std::uint8_t> labels_from(const py::array_t<int, py::array::c_style | py::array::forcecast>& a) {
    std::vector<std::uint8_t> y(static_cast<std::size_t>(a.size()));
    for (py::ssize_t i = 0; i < a.size(); ++i) {
        const int v = a.data()[i];
        require(v == 0 || v == 1, ErrorCode::LabelOutOfRange, "binary labels must be 0 or 1");
        y[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    }
    return y;
}

ExperimentConfig config_from(const std::string& text) { return parse_config(text, "config"); }

py::dict metrics_dict(const MetricsReport& m) {
    py::dict d;
    d["accuracy"] = m.accuracy;
    d["precision"] = m.precision;
    d["recall"] = m.recall;
    d["f1"] = m.f1;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Reactor telemetry synthesis, attack injection and three-level event characterization";

    static py::exception<Error> exc(m, "CyberCharError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(exc.ptr(), (std::string(error_code_name(e.code())) + ": " + e.what()).c_str());
        }
    });

    py::enum_<TripCause>(m, "TripCause")
        .value("none", TripCause::None)
        .value("cyber", TripCause::Cyber)
        .value("malfunction", TripCause::Malfunction);
    py::enum_<DosLevel>(m, "DosLevel").value("none", DosLevel::None).value("low", DosLevel::Low).value("high", DosLevel::High);
    py::enum_<FusedClass>(m, "FusedClass")
        .value("Normal", FusedClass::Normal)
        .value("Other", FusedClass::Other)
        .value("FDI", FusedClass::Fdi)
        .value("DoS", FusedClass::Dos)
        .value("OtherDoS", FusedClass::OtherDos)
        .value("FDIDoS", FusedClass::FdiDos);

    py::class_<ScenarioState>(m, "ScenarioState")
        .def_readonly("trip_available", &ScenarioState::trip_available)
        .def_readonly("trip_cause", &ScenarioState::trip_cause)
        .def_readonly("fdi_level", &ScenarioState::fdi_level)
        .def_readonly("dos_level", &ScenarioState::dos_level)
        .def("key", &ScenarioState::key)
        .def("is_normal", &ScenarioState::is_normal)
        .def("__repr__", [](const ScenarioState& s) { return "ScenarioState(" + s.key() + ")"; });

    m.def("make_state", &make_state, py::arg("cause"), py::arg("fdi_level"), py::arg("dos"));
    m.def("enumerate_states", &enumerate_states);
    m.def("fuse", [](int l1, int l2, int l3) { return fuse_bits(l1, l2, l3); }, py::arg("l1"), py::arg("l2"),
          py::arg("l3") = 0);
    m.def("class_name", [](FusedClass c) { return std::string(class_name(c)); });
    m.def("true_class", &true_class);

    py::class_<DatasetRecord>(m, "Dataset")
        .def_readonly("id", &DatasetRecord::id)
        .def_readonly("state", &DatasetRecord::state)
        .def_readonly("seed", &DatasetRecord::seed)
        .def_property_readonly("ot", [](const DatasetRecord& d) { return to_numpy(d.frame.ot); })
        .def_property_readonly("it", [](const DatasetRecord& d) { return to_numpy(d.frame.it); })
        .def_property_readonly("ot_times", [](const DatasetRecord& d) { return d.frame.ot_times; })
        .def_property_readonly("it_times", [](const DatasetRecord& d) { return d.frame.it_times; })
        .def_property_readonly("mask_size", [](const DatasetRecord& d) { return d.frame.mask.size(); });

    py::class_<UseCaseBundle>(m, "Bundle")
        .def_readonly("seed", &UseCaseBundle::seed)
        .def_property_readonly("ids",
                               [](const UseCaseBundle& b) {
                                   std::vector<std::string> ids;
                                   for (const auto& d : b.datasets) ids.push_back(d.id);
                                   return ids;
                               })
        .def("__len__", [](const UseCaseBundle& b) { return b.datasets.size(); })
        .def("__getitem__", [](const UseCaseBundle& b, const std::string& id) { return b.get(id); })
        .def("fingerprint", &bundle_fingerprint)
        .def_property_readonly("ot_signals",
                               [](const UseCaseBundle& b) {
                                   std::vector<std::string> n;
                                   for (const auto& s : b.catalog.ot()) n.push_back(s.name);
                                   return n;
                               })
        .def_property_readonly("it_signals", [](const UseCaseBundle& b) {
            std::vector<std::string> n;
            for (const auto& s : b.catalog.it()) n.push_back(s.name);
            return n;
        });

    m.def(
        "build_use_case",
        [](std::uint64_t seed, const std::string& config) { return build_use_case(config_from(config).use_case, seed); },
        py::arg("seed") = 42, py::arg("config") = "", "All 14 use-case datasets; `config` is key = value text.");
    m.def("save_bundle", [](const std::string& dir, const UseCaseBundle& b) { save_bundle(dir, b, "1970-01-01T00:00:00Z"); });
    m.def("load_bundle", [](const std::string& dir) { return load_bundle(dir); });

    m.def("window_count", &window_count, py::arg("T"), py::arg("window_len"), py::arg("step") = 1);
    m.def(
        "windowize",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values, std::size_t window_len,
           std::size_t step) {
            const Matrix v = from_numpy(values);
            std::vector<ScenarioState> states(v.rows());
            std::vector<double> times(v.rows());
            for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
            return to_numpy(windowize(v, states, times, window_len, step, Target::Abnormal).features);
        },
        py::arg("values"), py::arg("window_len"), py::arg("step") = 1);

    m.def(
        "confusion",
        [](const std::vector<int>& y_true, const std::vector<int>& y_pred, std::size_t k) {
            const ConfusionMatrix cm = confusion(y_true, y_pred, k);
            py::array_t<std::uint64_t> a({cm.k, cm.k});
            std::memcpy(a.mutable_data(), cm.counts.data(), cm.counts.size() * sizeof(std::uint64_t));
            return a;
        },
        py::arg("y_true"), py::arg("y_pred"), py::arg("k") = 2);
    m.def(
        "metrics",
        [](std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn) {
            return metrics_dict(metrics(ConfusionMatrix::binary(tp, fn, fp, tn)));
        },
        py::arg("tp"), py::arg("fn"), py::arg("fp"), py::arg("tn"));
    m.def(
        "roc",
        [](const py::array_t<int, py::array::c_style | py::array::forcecast>& y, const std::vector<double>& scores) {
            const RocCurve c = roc(labels_from(y), scores);
            std::vector<double> fpr, tpr;
            for (const auto& p : c.points) {
                fpr.push_back(p.fpr);
                tpr.push_back(p.tpr);
            }
            return py::make_tuple(fpr, tpr, c.auc);
        },
        py::arg("y_true"), py::arg("scores"));

    py::class_<TrainedModel>(m, "Model")
        .def_property_readonly("algorithm", [](const TrainedModel& t) { return std::string(to_string(t.algorithm())); })
        .def_property_readonly("n_features", &TrainedModel::n_features)
        .def("predict_score",
             [](const TrainedModel& t, const py::array_t<double, py::array::c_style | py::array::forcecast>& X) {
                 return t.predict_score(from_numpy(X));
             })
        .def("predict",
             [](const TrainedModel& t, const py::array_t<double, py::array::c_style | py::array::forcecast>& X) {
                 const auto p = t.predict(from_numpy(X));
                 return std::vector<int>(p.begin(), p.end());
             })
        .def("serialize", &serialize_model);
    m.def(
        "fit",
        [](const std::string& algorithm, const py::array_t<double, py::array::c_style | py::array::forcecast>& X,
           const py::array_t<int, py::array::c_style | py::array::forcecast>& y, std::uint64_t seed,
           std::size_t n_trees) {
            Hyperparams hp;
            hp.algorithm = parse_algorithm(algorithm);
            hp.seed = seed;
            hp.forest.n_trees = n_trees;
            return fit(hp, from_numpy(X), labels_from(y));
        },
        py::arg("algorithm"), py::arg("X"), py::arg("y"), py::arg("seed") = 0, py::arg("n_trees") = 100);

    py::class_<ThreeLevelClassifier>(m, "Classifier")
        .def_property_readonly("ot_window", [](const ThreeLevelClassifier& c) { return c.level1.geometry.window_len; })
        .def_property_readonly("it_window", [](const ThreeLevelClassifier& c) { return c.level2.geometry.window_len; })
        .def(
            "classify_window",
            [](const ThreeLevelClassifier& c, const std::vector<double>& ot, const std::vector<double>& it) {
                const ClassifiedWindow w = c.classify_window(ot, it);
                return py::make_tuple(w.levels.l1, w.levels.l2, w.levels.l3, w.levels.l3_evaluated, w.fused);
            },
            py::arg("ot_window"), py::arg("it_window"))
        .def(
            "classify_dataset",
            [](const ThreeLevelClassifier& c, const DatasetRecord& d) {
                const FrameDecisions fd = classify_frame(c, d.frame);
                std::vector<int> truth = fd.truth, fused;
                for (const auto& w : fd.decisions) fused.push_back(static_cast<int>(w.fused));
                return py::make_tuple(fd.end_time, truth, fused);
            },
            "End times, true classes and fused classes of every window of a dataset.")
        .def("save", [](const ThreeLevelClassifier& c, const std::string& dir) { save_classifier(dir, c, ""); });
    m.def(
        "train_architecture",
        [](const UseCaseBundle& b, std::uint64_t seed, const std::string& config) {
            py::gil_scoped_release release;
            return train_architecture(b, config_from(config).architecture, seed);
        },
        py::arg("bundle"), py::arg("seed") = 42, py::arg("config") = "");
    m.def("load_classifier", [](const std::string& dir) { return load_classifier(dir); });

    m.def(
        "evaluate",
        [](const ThreeLevelClassifier& c, const UseCaseBundle& b, std::uint64_t seed, const std::string& config) {
            const ExperimentConfig cfg = config_from(config);
            auto overall = dos_probes(b, cfg.use_case, seed);
            overall.insert(overall.end(), b.datasets.begin(), b.datasets.end());
            const EvaluationReport r = evaluate(c, level_test_sets(b, c.params, seed), overall);
            py::dict d;
            for (const auto& l : r.levels) d[("level" + std::to_string(l.level)).c_str()] = metrics_dict(l.metrics);
            d["overall_accuracy"] = r.overall_accuracy;
            py::array_t<std::uint64_t> a({r.overall.k, r.overall.k});
            std::memcpy(a.mutable_data(), r.overall.counts.data(), r.overall.counts.size() * sizeof(std::uint64_t));
            d["overall_cm"] = a;
            return d;
        },
        py::arg("classifier"), py::arg("bundle"), py::arg("seed") = 43, py::arg("config") = "",
        "Per-level metrics on rebalanced pools of `bundle` and the 6-class matrix over all its windows.");

    m.def("default_config", [] { return to_text(parse_config("")); });
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> owned{"cyberchar"};
            owned.insert(owned.end(), args.begin(), args.end());
            std::vector<char*> argv;
            for (auto& s : owned) argv.push_back(s.data());
            return cli::run(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "Runs a command-line invocation in-process and returns its exit code.");
}
