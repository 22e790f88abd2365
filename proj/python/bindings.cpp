#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "concede/cli.hpp"
#include "concede/corpus.hpp"
#include "concede/eval.hpp"
#include "concede/features.hpp"
#include "concede/patterns.hpp"
#include "concede/svm.hpp"
#include "concede/textproc.hpp"

namespace py = pybind11;
using namespace concede;

namespace {

FeatureVector dense(const std::vector<double>& values) {
  FeatureVector f;
  f.vocabulary_version = "python";
  for (std::uint32_t i = 0; i < values.size(); ++i) {
    if (values[i] == 0.0) continue;
    f.indices.push_back(i);
    f.values.push_back(values[i]);
  }
  return f;
}

std::vector<Label> labels_of(const std::vector<std::string>& names) {
  std::vector<Label> out;
  for (const auto& n : names) {
    auto l = parse_label(n);
    if (!l) throw std::invalid_argument("unknown label '" + n + "' (expected arg_c or other)");
    out.push_back(*l);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Argumentative concession detection: corpus, patterns, features, SVM and statistics.";

  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<VersionMismatchError>(m, "VersionMismatchError", PyExc_ValueError);
  py::register_exception<NonConvergenceError>(m, "NonConvergenceError", PyExc_RuntimeError);
  py::register_exception<BootstrapNonConvergence>(m, "BootstrapNonConvergence", PyExc_RuntimeError);

  py::class_<Comment>(m, "Comment")
      .def(py::init<>())
      .def(py::init([](std::string id, std::string thread_id, std::string text, bool is_original_post,
                       bool delta_awarded, std::optional<std::string> parent_id, std::string author_id) {
             return Comment{std::move(id), std::move(thread_id), std::move(parent_id),
                            std::move(author_id), std::move(text), is_original_post, delta_awarded};
           }),
           py::arg("id"), py::arg("thread_id"), py::arg("text"), py::arg("is_original_post") = false,
           py::arg("delta_awarded") = false, py::arg("parent_id") = py::none(), py::arg("author_id") = "")
      .def_readwrite("id", &Comment::id)
      .def_readwrite("thread_id", &Comment::thread_id)
      .def_readwrite("parent_id", &Comment::parent_id)
      .def_readwrite("author_id", &Comment::author_id)
      .def_readwrite("text", &Comment::text)
      .def_readwrite("is_original_post", &Comment::is_original_post)
      .def_readwrite("delta_awarded", &Comment::delta_awarded)
      .def("__repr__", [](const Comment& c) { return "<Comment " + c.id + ">"; });

  py::class_<MarkerInstance>(m, "MarkerInstance")
      .def_readonly("id", &MarkerInstance::id)
      .def_readonly("comment_id", &MarkerInstance::comment_id)
      .def_readonly("thread_id", &MarkerInstance::thread_id)
      .def_property_readonly("marker", [](const MarkerInstance& i) { return std::string(to_string(i.marker)); })
      .def_readonly("sentence", &MarkerInstance::sentence)
      .def_readonly("prev_sentence", &MarkerInstance::prev_sentence)
      .def_readonly("next_sentence", &MarkerInstance::next_sentence)
      .def_readonly("marker_token_index", &MarkerInstance::marker_token_index)
      .def_readonly("delta_awarded", &MarkerInstance::delta_awarded)
      .def("conceding_span", [](const MarkerInstance& i) { return conceding_span(i).tokens.tokens; })
      .def("feature_span", [](const MarkerInstance& i) { return feature_span(i).tokens; })
      .def("__repr__", [](const MarkerInstance& i) { return "<MarkerInstance " + i.id + ">"; });

  m.def("tokenize", [](const std::string& text) { return tokenize(text).tokens; }, py::arg("text"));
  m.def("segment_sentences", &segment_sentences, py::arg("text"));
  m.def(
      "jaccard",
      [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
        return jaccard(a, b, default_stopwords());
      },
      py::arg("a"), py::arg("b"), "Stopword-filtered Jaccard similarity of two token lists.");

  m.def("ingest", [](const std::string& path) { return ingest(path); }, py::arg("path"));
  m.def(
      "extract_marker_instances",
      [](const std::vector<Comment>& comments, std::optional<std::vector<std::string>> markers) {
        std::vector<Marker> ms(std::begin(kAllMarkers), std::end(kAllMarkers));
        if (markers) {
          ms.clear();
          for (const auto& s : *markers) {
            auto mk = parse_marker(s);
            if (!mk) throw std::invalid_argument("unknown marker '" + s + "'");
            ms.push_back(*mk);
          }
        }
        return extract_marker_instances(comments, ms);
      },
      py::arg("comments"), py::arg("markers") = py::none());
  m.def(
      "marker_census",
      [](const std::vector<Comment>& comments) {
        std::vector<std::tuple<std::string, long, long>> rows;
        for (const auto& r : marker_census(comments)) rows.emplace_back(r.marker, r.count_delta, r.count_no_delta);
        return rows;
      },
      py::arg("comments"), "Rows of (marker, delta count, no-delta count).");

  m.def(
      "bootstrap_patterns",
      [](const std::vector<std::vector<std::string>> spans, std::optional<std::vector<std::string>> seeds,
         int max_iterations) {
        std::vector<ConcedingSpan> cs;
        for (const auto& s : spans) {
          ConcedingSpan span;
          span.tokens.tokens = s;
          cs.push_back(std::move(span));
        }
        std::vector<LexicalPattern> sp = default_seeds();
        if (seeds) {
          sp.clear();
          for (const auto& s : *seeds) sp.push_back(LexicalPattern::parse(s, Provenance::Seed));
        }
        LexiconSet lex;
        auto r = bootstrap(cs, sp, lex, BootstrapOptions{max_iterations});
        py::list out;
        for (std::size_t i = 0; i < r.patterns.size(); ++i) {
          py::dict d;
          d["pattern"] = r.patterns[i].text();
          d["provenance"] = std::string(to_string(r.patterns[i].provenance));
          d["generation"] = r.patterns[i].generation;
          d["generalized"] = static_cast<bool>(r.generalized[i]);
          out.append(d);
        }
        return py::make_tuple(out, r.iterations);
      },
      py::arg("spans"), py::arg("seeds") = py::none(), py::arg("max_iterations") = 20,
      "Bootstraps patterns from token spans. Returns (patterns, iterations).");
  m.def(
      "match_pattern",
      [](const std::string& pattern, const std::vector<std::string>& tokens) {
        LexiconSet lex;
        return match(LexicalPattern::parse(pattern), tokens, lex.negation);
      },
      py::arg("pattern"), py::arg("tokens"));

  py::class_<SvmModel>(m, "SvmModel")
      .def_readonly("bias", &SvmModel::bias)
      .def_readonly("dual_coeffs", &SvmModel::dual_coeffs)
      .def_readonly("full_sweeps", &SvmModel::full_sweeps)
      .def_property_readonly("num_support_vectors", [](const SvmModel& s) { return s.support_vectors.size(); })
      .def("decision", [](const SvmModel& s, const std::vector<double>& x) { return decision(s, dense(x)); },
           py::arg("x"))
      .def("predict", [](const SvmModel& s, const std::vector<double>& x) {
        return std::string(to_string(label_from_decision(decision(s, dense(x)))));
      });

  m.def(
      "train_svm",
      [](const std::vector<std::vector<double>>& x, const std::vector<std::string>& y, double c, double gamma,
         const std::string& class_weight_mode, double tolerance, int max_passes) {
        SvmConfig cfg;
        cfg.c = c;
        cfg.gamma = gamma;
        auto mode = parse_class_weight_mode(class_weight_mode);
        if (!mode) throw std::invalid_argument("unknown class_weight_mode '" + class_weight_mode + "'");
        cfg.class_weight_mode = *mode;
        cfg.tolerance = tolerance;
        cfg.max_passes = max_passes;
        std::vector<FeatureVector> fx;
        for (const auto& row : x) fx.push_back(dense(row));
        if (cfg.gamma == 0.0) cfg = resolve_gamma(cfg, x.empty() ? 1 : x.front().size());
        const auto labels = labels_of(y);
        py::gil_scoped_release release;
        return train(fx, labels, cfg);
      },
      py::arg("x"), py::arg("y"), py::arg("c") = 1.0, py::arg("gamma") = 0.0,
      py::arg("class_weight_mode") = "inverse_frequency", py::arg("tolerance") = 1e-3, py::arg("max_passes") = 10,
      "RBF SVM trained with SMO on dense rows; labels are 'arg_c' / 'other'.");

  m.def("chi2_sf", &chi2_sf, py::arg("x"), py::arg("df"));
  m.def(
      "chi2_independence",
      [](const std::vector<std::vector<double>>& table) {
        auto r = chi2_independence(table);
        return py::make_tuple(r.stat, r.p_value, r.df);
      },
      py::arg("table"), "Returns (statistic, p_value, df).");
  m.def("fleiss_kappa", py::overload_cast<const std::vector<std::vector<int>>&>(&fleiss_kappa), py::arg("counts"));
  m.def(
      "majority_vote",
      [](int arg_c, int other, std::optional<std::string> expert) {
        std::optional<Label> e;
        if (expert) e = labels_of({*expert}).front();
        auto r = majority_vote(VoteRow{arg_c, other}, e);
        return py::make_tuple(std::string(to_string(r.label)), r.margin, r.adjudicated);
      },
      py::arg("arg_c"), py::arg("other"), py::arg("expert") = py::none());
  m.def(
      "prf",
      [](const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
        auto r = prf(labels_of(predicted), labels_of(gold));
        return py::make_tuple(r.precision, r.recall, r.f1);
      },
      py::arg("predicted"), py::arg("gold"), "Precision, recall and F1 of arg_c.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full = {"concede"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const auto& a : full) argv.push_back(a.c_str());
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in-process. Returns (exit_code, stdout, stderr).");

}
