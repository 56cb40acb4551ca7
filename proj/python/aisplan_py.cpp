#include "aisplan/ais.hpp"
#include "aisplan/ais_io.hpp"
#include "aisplan/envs.hpp"
#include "aisplan/error.hpp"
#include "aisplan/metrics.hpp"
#include "aisplan/model_io.hpp"
#include "aisplan/planning.hpp"
#include "aisplan/porl.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace aisplan;

namespace {

History to_history(const std::vector<std::pair<std::size_t, std::size_t>>& steps) {
    History h;
    for (auto [a, y] : steps) h.steps.push_back({a, y});
    return h;
}

BeliefKernel parse_kernel(const std::string& s) {
    if (s == "exact") return BeliefKernel::ExactUpdate;
    if (s == "quantized") return BeliefKernel::QuantizedUpdate;
    throw ModelError("kernel must be exact or quantized");
}

} // namespace

PYBIND11_MODULE(_aisplan, m) {
    m.doc() = "tabular planning with compressed histories";

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ImpossibleObservation>(m, "ImpossibleObservation", PyExc_ValueError);
    py::register_exception<Unsupported>(m, "Unsupported", PyExc_NotImplementedError);

    py::class_<PomdpModel>(m, "Model")
        .def_readonly("n_states", &PomdpModel::n_states)
        .def_readonly("n_actions", &PomdpModel::n_actions)
        .def_readonly("n_observations", &PomdpModel::n_observations)
        .def_readonly("discount", &PomdpModel::discount)
        .def_property_readonly("initial_belief",
                               [](const PomdpModel& x) { return std::vector<double>(x.initial_belief.begin(), x.initial_belief.end()); })
        .def("T", [](const PomdpModel& x, std::size_t a, std::size_t s, std::size_t s2) { return x.T(a, s, s2); })
        .def("O", [](const PomdpModel& x, std::size_t a, std::size_t s, std::size_t y) { return x.O(a, s, y); })
        .def("R", [](const PomdpModel& x, std::size_t s, std::size_t a) { return x.R(s, a); })
        .def("to_json", [](const PomdpModel& x) { return serialize_model(x); });

    m.def("env", [](const std::string& name) { return env_by_name(name).model; }, py::arg("name"));
    m.def("env_names", &env_names);
    m.def("parse_model", &parse_model, py::arg("text"));
    m.def("load_model", &load_model, py::arg("path"));

    m.def(
        "belief",
        [](const PomdpModel& x, const std::vector<std::pair<std::size_t, std::size_t>>& steps) {
            auto b = belief_of(x, to_history(steps));
            return std::vector<double>(b.begin(), b.end());
        },
        py::arg("model"), py::arg("history") = std::vector<std::pair<std::size_t, std::size_t>>{});

    m.def("tv", [](const std::vector<double>& p, const std::vector<double>& q) { return tv_distance(p, q); });
    m.def("lattice_quantize",
          [](const std::vector<double>& b, std::size_t n) {
              auto r = lattice_quantize(ProbVector(b), n);
              return std::vector<double>(r.begin(), r.end());
          },
          py::arg("belief"), py::arg("n"));

    py::class_<AisCertificate>(m, "Certificate")
        .def_readonly("eps", &AisCertificate::eps)
        .def_readonly("delta", &AisCertificate::delta)
        .def_readonly("measured", &AisCertificate::measured)
        .def_property_readonly("fclass", [](const AisCertificate& c) { return to_string(c.kind); })
        .def("to_json", [](const AisCertificate& c) { return serialize_certificate(c); });

    py::class_<AisGenerator>(m, "Generator")
        .def_readonly("stationary", &AisGenerator::stationary)
        .def_readonly("declared", &AisGenerator::declared)
        .def("sizes",
             [](const AisGenerator& g) {
                 std::vector<std::size_t> s;
                 for (auto& st : g.stages) s.push_back(st.space.size);
                 return s;
             })
        .def("to_json", [](const AisGenerator& g) { return serialize_generator(g); });

    m.def(
        "belief_quantization",
        [](const PomdpModel& x, std::size_t horizon, std::size_t n, const std::string& fclass,
           const std::string& kernel) {
            BeliefQuantOptions o;
            o.kernel = parse_kernel(kernel);
            return build_belief_quant_ais(x, horizon, n, parse_ipm_kind(fclass), o);
        },
        py::arg("model"), py::arg("horizon"), py::arg("n"), py::arg("fclass") = "bl", py::arg("kernel") = "exact");

    m.def(
        "measure",
        [](const PomdpModel& x, const AisGenerator& g, std::size_t horizon, const std::string& fclass) {
            return measure_ais(x, g, horizon, parse_ipm_kind(fclass));
        },
        py::arg("model"), py::arg("generator"), py::arg("horizon"), py::arg("fclass") = "tv");

    py::class_<StageTable>(m, "StageTable")
        .def_readonly("keys", &StageTable::keys)
        .def_readonly("value", &StageTable::value)
        .def_readonly("q", &StageTable::q)
        .def_readonly("greedy", &StageTable::greedy);
    py::class_<ValueTables>(m, "ValueTables")
        .def_readonly("stages", &ValueTables::stages)
        .def("stage", &ValueTables::stage, py::arg("t"));

    m.def("history_dp", [](const PomdpModel& x, std::size_t T) { return history_dp(x, T); }, py::arg("model"),
          py::arg("horizon"));
    m.def("ais_dp", &ais_dp, py::arg("generator"), py::arg("horizon"));

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("alpha", &BoundReport::alpha)
        .def_readonly("policy_bound", &BoundReport::policy_bound)
        .def_readonly("rho", &BoundReport::rho);
    m.def(
        "alpha_bounds",
        [](const AisCertificate& c, const std::vector<double>& rho, double discount) {
            return alpha_bounds(c, rho, discount);
        },
        py::arg("certificate"), py::arg("rho"), py::arg("discount"));
    m.def("stationary_alpha", &stationary_alpha, py::arg("eps"), py::arg("delta"), py::arg("rho"),
          py::arg("discount"));

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("k", &TrainConfig::k)
        .def_readwrite("lam", &TrainConfig::lambda)
        .def_readwrite("rollout", &TrainConfig::rollout)
        .def_readwrite("episodes", &TrainConfig::episodes)
        .def_readwrite("a0", &TrainConfig::a0)
        .def_readwrite("b0", &TrainConfig::b0)
        .def_readwrite("c0", &TrainConfig::c0)
        .def_readwrite("critic", &TrainConfig::critic)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("eval_every", &TrainConfig::eval_every)
        .def_readwrite("eval_episodes", &TrainConfig::eval_episodes)
        .def_readwrite("init_scale", &TrainConfig::init_scale)
        .def("validate", &TrainConfig::validate);

    m.def(
        "learn",
        [](const PomdpModel& x, const TrainConfig& c) {
            TrainResult r;
            {
                py::gil_scoped_release nogil;
                r = train(x, c);
            }
            py::list curve;
            for (auto& p : r.curve)
                curve.append(py::dict(py::arg("iteration") = p.iteration, py::arg("mean_return") = p.mean_return,
                                      py::arg("stderr") = p.stderr_return, py::arg("ais_loss") = p.ais_loss));
            return curve;
        },
        py::arg("model"), py::arg("config"));
}
