#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "credaug/bootstrap.hpp"
#include "credaug/cli.hpp"
#include "credaug/error.hpp"
#include "credaug/gbdt.hpp"
#include "credaug/metrics.hpp"
#include "credaug/neighbors.hpp"
#include "credaug/oversample.hpp"
#include "credaug/parallel.hpp"
#include "credaug/quality.hpp"

namespace py = pybind11;
using namespace credaug;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Matrix::from_flat(rows, cols, std::vector<double>(a.data(), a.data() + a.size()));
}

DoubleArray to_array(const Matrix& m) {
  DoubleArray out({m.rows(), m.cols()});
  std::copy(m.flat().begin(), m.flat().end(), out.mutable_data());
  return out;
}

std::span<const double> as_span(const DoubleArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

std::span<const int> as_span(const IntArray& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array");
  return {a.data(), static_cast<std::size_t>(a.size())};
}

OversampleConfig make_config(Technique t, double multiplier, std::size_t k,
                             std::size_t m, std::uint64_t seed) {
  OversampleConfig cfg;
  cfg.technique = t;
  cfg.multiplier = multiplier;
  cfg.k_neighbors = k;
  cfg.m_neighbors = m;
  cfg.seed = seed;
  return cfg;
}

py::dict batch_dict(const SyntheticBatch& b) {
  std::vector<std::size_t> pi, pj;
  std::vector<double> lambda;
  for (const auto& o : b.origins) {
    pi.push_back(o.parent_i);
    pj.push_back(o.parent_j);
    lambda.push_back(o.lambda);
  }
  py::dict d;
  d["X"] = to_array(b.X);
  d["parent_i"] = py::array(py::cast(pi));
  d["parent_j"] = py::array(py::cast(pj));
  d["lambda"] = py::array(py::cast(lambda));
  return d;
}

}  // namespace

PYBIND11_MODULE(_credaug, m) {
  m.doc() = "Minority oversampling, gradient boosting and evaluation metrics";

  py::register_exception<Error>(m, "CredaugError", PyExc_RuntimeError);

  m.def("set_num_threads", &set_num_threads, py::arg("n"));

  m.def(
      "knn",
      [](const DoubleArray& queries, const DoubleArray& refs, std::size_t k,
         bool exclude_self) {
        const auto t = knn(to_matrix(queries), to_matrix(refs), k, exclude_self);
        const std::size_t q = t.queries();
        py::array_t<std::size_t> idx({q, k});
        DoubleArray dist({q, k});
        std::copy(t.indices.begin(), t.indices.end(), idx.mutable_data());
        std::copy(t.distances.begin(), t.distances.end(), dist.mutable_data());
        return py::make_tuple(idx, dist);
      },
      py::arg("queries"), py::arg("references"), py::arg("k"),
      py::arg("exclude_self") = false,
      "Exact Euclidean k nearest neighbors. Returns (indices, distances).");

  m.def(
      "smote",
      [](const DoubleArray& minority, double multiplier, std::size_t k,
         std::uint64_t seed) {
        return batch_dict(
            smote(to_matrix(minority), make_config(Technique::kSmote, multiplier, k, 10, seed)));
      },
      py::arg("minority"), py::arg("multiplier") = 1.0, py::arg("k_neighbors") = 5,
      py::arg("seed") = 42);

  m.def(
      "borderline_smote",
      [](const DoubleArray& minority, const DoubleArray& majority, double multiplier,
         std::size_t k, std::size_t mn, std::uint64_t seed) {
        return batch_dict(borderline_smote(
            to_matrix(minority), to_matrix(majority),
            make_config(Technique::kBorderlineSmote, multiplier, k, mn, seed)));
      },
      py::arg("minority"), py::arg("majority"), py::arg("multiplier") = 1.0,
      py::arg("k_neighbors") = 5, py::arg("m_neighbors") = 10, py::arg("seed") = 42);

  m.def(
      "adasyn",
      [](const DoubleArray& minority, const DoubleArray& majority, double multiplier,
         std::size_t k, std::uint64_t seed) {
        const auto r = adasyn(to_matrix(minority), to_matrix(majority),
                              make_config(Technique::kAdasyn, multiplier, k, 10, seed));
        py::dict d = batch_dict(r.batch);
        d["counts"] = py::array(py::cast(r.allocation.counts));
        d["ratios"] = py::array(py::cast(r.allocation.ratios));
        d["uniform_fallback"] = r.allocation.uniform_fallback;
        return d;
      },
      py::arg("minority"), py::arg("majority"), py::arg("multiplier") = 1.0,
      py::arg("k_neighbors") = 5, py::arg("seed") = 42);

  m.def("auc_roc", [](const DoubleArray& s, const IntArray& y) {
    return auc_roc({as_span(s), as_span(y)});
  }, py::arg("scores"), py::arg("labels"));
  m.def("gini", &gini, py::arg("auc"));
  m.def("ks_statistic", [](const DoubleArray& s, const IntArray& y) {
    return ks_statistic({as_span(s), as_span(y)});
  }, py::arg("scores"), py::arg("labels"));

  m.def(
      "bootstrap_compare",
      [](const DoubleArray& model, const DoubleArray& baseline, const IntArray& y,
         std::size_t n_iter, std::uint64_t seed, bool stratified) {
        BootstrapOptions o;
        o.n_iterations = n_iter;
        o.seed = seed;
        o.stratified = stratified;
        const auto r = bootstrap_compare(as_span(model), as_span(baseline), as_span(y), o);
        py::dict d;
        d["auc_model"] = r.auc_model;
        d["auc_baseline"] = r.auc_baseline;
        d["delta_auc"] = r.delta_auc_point;
        d["delta_gini"] = r.delta_gini_point;
        d["p_value"] = r.p_value;
        d["ci95_auc"] = py::make_tuple(r.ci95_auc.low, r.ci95_auc.high);
        d["ci95_gini"] = py::make_tuple(r.ci95_gini.low, r.ci95_gini.high);
        d["significant"] = significance_flag(r);
        return d;
      },
      py::arg("model_scores"), py::arg("baseline_scores"), py::arg("labels"),
      py::arg("n_iterations") = 1000, py::arg("seed") = 42,
      py::arg("stratified") = false);

  m.def("ks_two_sample", [](const DoubleArray& a, const DoubleArray& b) {
    const auto r = ks_two_sample(as_span(a), as_span(b));
    return py::make_tuple(r.statistic, r.p_value);
  }, py::arg("a"), py::arg("b"), "Returns (statistic, asymptotic p-value).");
  m.def("wasserstein_1d", [](const DoubleArray& a, const DoubleArray& b) {
    return wasserstein_1d(as_span(a), as_span(b));
  }, py::arg("a"), py::arg("b"));
  m.def("js_divergence", [](const DoubleArray& a, const DoubleArray& b, std::size_t bins) {
    return js_divergence(as_span(a), as_span(b), bins);
  }, py::arg("a"), py::arg("b"), py::arg("n_bins") = 50);

  py::class_<GBDTModel>(m, "GBDTModel")
      .def_readonly("base_score", &GBDTModel::base_score)
      .def_property_readonly("n_trees", [](const GBDTModel& g) { return g.trees.size(); })
      .def_property_readonly("train_loss",
                             [](const GBDTModel& g) {
                               std::vector<double> l;
                               for (const auto& h : g.history) l.push_back(h.train_loss);
                               return l;
                             })
      .def("predict_proba",
           [](const GBDTModel& g, const DoubleArray& X) {
             return py::array(py::cast(predict_proba(g, to_matrix(X))));
           })
      .def("to_json", &model_to_json)
      .def_static("from_json", &model_from_json);

  m.def(
      "train_gbdt",
      [](const DoubleArray& X, const IntArray& y, int max_depth, double lr,
         int n_estimators, std::optional<double> spw, std::uint64_t seed) {
        GBDTConfig cfg;
        cfg.max_depth = max_depth;
        cfg.learning_rate = lr;
        cfg.n_estimators = n_estimators;
        cfg.seed = seed;
        const Matrix m = to_matrix(X);
        const auto labels = as_span(y);
        if (spw) {
          cfg.scale_pos_weight = *spw;
        } else {
          Dataset d;
          d.y.assign(labels.begin(), labels.end());
          cfg.scale_pos_weight = compute_scale_pos_weight(d);
        }
        py::gil_scoped_release release;
        return train(m, labels, cfg);
      },
      py::arg("X"), py::arg("y"), py::arg("max_depth") = 6,
      py::arg("learning_rate") = 0.1, py::arg("n_estimators") = 100,
      py::arg("scale_pos_weight") = py::none(), py::arg("seed") = 42,
      "Class-weighted boosting; scale_pos_weight defaults to n_neg / n_pos.");

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs a CLI subcommand in-process. Returns (code, stdout, stderr).");
}
