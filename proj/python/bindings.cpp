#include "anchoring/experiment.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

namespace py = pybind11;
using namespace anchoring;

namespace {

/// Lets Python objects act as scorers.
class PyScorer : public Scorer {
public:
    using Scorer::Scorer;

    double score(const ScoreRequest& request) override {
        PYBIND11_OVERRIDE_PURE(double, Scorer, score, request);
    }
    std::string fingerprint() const override { PYBIND11_OVERRIDE_PURE(std::string, Scorer, fingerprint); }
    void flush() override { PYBIND11_OVERRIDE(void, Scorer, flush); }
};

py::dict test_dict(const TestResult& t) {
    py::dict d;
    d["statistic"] = t.statistic;
    d["p_value"] = t.p_value;
    d["method"] = std::string(method_name(t.method));
    d["n_effective"] = t.n_effective;
    d["degenerate"] = t.degenerate;
    d["exact"] = t.exact;
    return d;
}

py::dict breakdown_dict(const AbssBreakdown& b) {
    py::dict d;
    d["s_b"] = b.s_b;
    d["s_a"] = b.s_a;
    d["w_log"] = b.w_log;
    d["w_shap"] = b.w_shap;
    d["w_wil"] = b.w_wil;
    d["w_perm"] = b.w_perm;
    d["rho"] = b.rho;
    d["agreement"] = b.agreement;
    d["c"] = b.c;
    d["abss"] = b.abss;
    return d;
}

LogProbVector to_grid(const std::vector<double>& v) {
    if (v.size() != kTargetCount) throw std::invalid_argument("expected 101 values");
    LogProbVector out{};
    std::copy(v.begin(), v.end(), out.begin());
    return out;
}

PayoffTable to_table(const std::vector<double>& v) {
    if (v.size() != kSubsetCount) throw std::invalid_argument("expected 16 payoffs indexed by subset mask");
    PayoffTable t;
    for (int m = 0; m < kSubsetCount; ++m) t.set(FieldSubset(static_cast<std::uint8_t>(m)), v[m]);
    return t;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return ExperimentConfig::from_json(doc, base_dir);
}

}  // namespace

PYBIND11_MODULE(_anchoring, m) {
    m.doc() = "Anchoring-bias evaluation core";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    auto scorer_error = py::register_exception<ScorerError>(m, "ScorerError", PyExc_RuntimeError);
    py::register_exception<TransportError>(m, "TransportError", scorer_error.ptr());
    py::register_exception<TokenizationMismatch>(m, "TokenizationMismatch", scorer_error.ptr());
    py::register_exception<NonFiniteScore>(m, "NonFiniteScore", scorer_error.ptr());

    m.attr("TARGET_COUNT") = kTargetCount;
    m.attr("SUBSET_COUNT") = kSubsetCount;

    m.def(
        "render_prompt",
        [](const std::string& scene, const std::string& comparative, const std::string& absolute, int anchor,
           int mask, const std::string& policy) {
            return render_prompt({scene, comparative, absolute, anchor}, FieldSubset(static_cast<std::uint8_t>(mask)),
                                 ablation_from_name(policy));
        },
        py::arg("scene"), py::arg("comparative"), py::arg("absolute"), py::arg("anchor"), py::arg("mask") = 15,
        py::arg("policy") = "drop-empty");
    m.def("render_target", &render_target, py::arg("i"));
    m.def("subset_label", [](int mask) { return FieldSubset(static_cast<std::uint8_t>(mask)).label(); });

    m.def(
        "normalize",
        [](const std::vector<double>& logs) {
            const auto p = normalize(to_grid(logs)).probs();
            return std::vector<double>(p.begin(), p.end());
        },
        py::arg("logprobs"));
    m.def(
        "soft_ev", [](const std::vector<double>& probs) { return soft_ev(CategoricalDistribution::from_probs(probs)); },
        py::arg("probs"));
    m.def(
        "predictive_band",
        [](const std::vector<double>& probs, int draws, int resamples, std::uint64_t seed) {
            const auto b = predictive_band(CategoricalDistribution::from_probs(probs), draws, resamples, seed);
            return py::make_tuple(b.lo, b.hi);
        },
        py::arg("probs"), py::arg("draws") = kDefaultBandDraws, py::arg("resamples") = kDefaultBandResamples,
        py::arg("seed") = 0);

    m.def(
        "paired_t_test", [](const std::vector<double>& d) { return test_dict(paired_t_test(d)); }, py::arg("d"));
    m.def(
        "wilcoxon_pratt", [](const std::vector<double>& d) { return test_dict(wilcoxon_pratt(d)); }, py::arg("d"));
    m.def(
        "permutation_sign_test",
        [](const std::vector<double>& d, int resamples, std::uint64_t seed) {
            return test_dict(permutation_sign_test(d, resamples, seed));
        },
        py::arg("d"), py::arg("resamples") = kDefaultPermutations, py::arg("seed") = 0);

    m.def(
        "shapley_value",
        [](const std::vector<double>& payoffs, const std::string& field, const std::string& mode) {
            return shapley_value(to_table(payoffs), field_from_name(field), shapley_mode_from_name(mode));
        },
        py::arg("payoffs"), py::arg("field") = "anchor", py::arg("mode") = "subset-mean");
    m.def("odds_multiplier", &odds_multiplier, py::arg("delta_phi"));

    m.def(
        "abss_variation",
        [](double delta_ev, double delta_phi, double p_log, double p_shap, double p_wil, double p_perm) {
            return breakdown_dict(abss_variation({delta_ev, delta_phi, p_log, p_shap, p_wil, p_perm, false}));
        },
        py::arg("delta_ev"), py::arg("delta_phi"), py::arg("p_log"), py::arg("p_shap"), py::arg("p_wil"),
        py::arg("p_perm"));

    py::class_<PromptContext>(m, "PromptContext")
        .def_property_readonly("mask", [](const PromptContext& c) { return static_cast<int>(c.subset.mask()); })
        .def_readonly("anchor", &PromptContext::anchor);

    py::class_<ScoreRequest>(m, "ScoreRequest")
        .def(py::init([](std::string prompt, std::string target) {
                 return ScoreRequest{std::move(prompt), std::move(target), std::nullopt};
             }),
             py::arg("prompt"), py::arg("target"))
        .def_readonly("prompt", &ScoreRequest::prompt)
        .def_readonly("target", &ScoreRequest::target)
        .def_readonly("context", &ScoreRequest::context)
        .def("continuation", &ScoreRequest::continuation)
        .def("scored_text", &ScoreRequest::scored_text);

    py::class_<Scorer, PyScorer>(m, "Scorer")
        .def(py::init<>())
        .def("score", &Scorer::score)
        .def("fingerprint", &Scorer::fingerprint)
        .def("flush", &Scorer::flush);

    py::class_<SyntheticOracle, Scorer>(m, "SyntheticOracle")
        .def(py::init([](const std::string& spec_json) {
                 return std::make_unique<SyntheticOracle>(oracle_spec_from_json(nlohmann::json::parse(spec_json)));
             }),
             py::arg("spec_json") = "{}")
        .def("value", [](const SyntheticOracle& o, int mask, int anchor, int target) {
            return o.value(FieldSubset(static_cast<std::uint8_t>(mask)), anchor, target);
        });

    m.def(
        "config_hash",
        [](const std::string& text, const std::string& base_dir) { return parse_config(text, base_dir).hash(); },
        py::arg("config_json"), py::arg("base_dir") = "");

    m.def(
        "run_experiment_json",
        [](const std::string& text, Scorer* scorer, const std::string& base_dir) {
            const auto config = parse_config(text, base_dir);
            std::unique_ptr<Scorer> owned;
            if (scorer == nullptr) {
                owned = make_scorer(config.scorer, config.model);
                scorer = owned.get();
            }
            RunResult run;
            {
                py::gil_scoped_release release;
                run = run_experiment(config, *scorer);
            }
            return run_result_to_json(run).dump();
        },
        py::arg("config_json"), py::arg("scorer") = nullptr, py::arg("base_dir") = "");

    m.def(
        "write_run_json",
        [](const std::string& results_json, const std::string& out_dir) {
            const auto run = run_result_from_json(nlohmann::json::parse(results_json));
            return write_run(run, out_dir, utc_timestamp()).artifacts;
        },
        py::arg("results_json"), py::arg("out_dir"));

    m.def("selftest", [] {
        std::vector<py::tuple> out;
        std::vector<SelftestCase> cases;
        {
            py::gil_scoped_release release;
            cases = selftest();
        }
        for (const auto& c : cases) out.push_back(py::make_tuple(c.name, c.passed, c.detail));
        return out;
    });
}
