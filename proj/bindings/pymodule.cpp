#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coopeig/acceptance.hpp"
#include "coopeig/analysis.hpp"
#include "coopeig/config.hpp"
#include "coopeig/optimize.hpp"
#include "coopeig/version.hpp"

namespace py = pybind11;
using namespace coopeig;

namespace {

py::object json_to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(json_to_py(v));
      return out;
    }
    case json::value_t::object: {
      py::dict out;
      for (auto& [k, v] : j.items()) out[py::str(k)] = json_to_py(v);
      return out;
    }
    default:
      return py::none();
  }
}

SystemSpec spec_from_text(const std::string& text) { return parse_config_text(text).spec; }

py::dict eigen_dict(const EigenResult& r) {
  py::dict d;
  d["z"] = r.z;
  d["lambda"] = r.lambda;
  d["residual"] = r.residual;
  d["iterations"] = r.iterations;
  d["extrapolated"] = r.extrapolated;
  d["multiplier"] = r.multiplier;
  d["M"] = r.substeps_used;
  d["exact_in_time"] = r.exact_in_time;
  return d;
}

py::dict scan_dict(const ScanTable& t) {
  py::list rows;
  for (const auto& r : t.rows) {
    py::dict row;
    row["param"] = r.param;
    row["lambda"] = r.lambda;
    if (r.predicted) row["predicted"] = *r.predicted;
    row["abs_err"] = r.abs_err;
    row["verdict"] = r.verdict;
    rows.append(row);
  }
  py::dict d;
  d["parameter"] = t.parameter;
  if (t.predicted_limit) d["predicted_limit"] = *t.predicted_limit;
  d["rows"] = rows;
  d["summary"] = t.summary;
  return d;
}

EigenOptions eigen_opts(int substeps, bool extrapolate) {
  EigenOptions eo;
  eo.substeps = substeps;
  eo.extrapolate = extrapolate;
  return eo;
}

}  // namespace

PYBIND11_MODULE(coopeig, m) {
  m.doc() = "generalized principal eigenvalues of space-time periodic cooperative systems";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "CoopeigError");

  py::class_<SystemSpec>(m, "SystemSpec")
      .def_property_readonly("species", [](const SystemSpec& s) { return s.N; })
      .def_property_readonly("nx", [](const SystemSpec& s) { return s.cell.nx; })
      .def_property_readonly("nt", [](const SystemSpec& s) { return s.cell.nt; })
      .def("to_json", [](const SystemSpec& s) { return json_to_py(spec_to_json(s)); });

  m.def("load_config", [](const std::string& path) { return parse_config(path).spec; },
        py::arg("path"), "Read an operator description from a JSON file.");
  m.def("load_config_text", &spec_from_text, py::arg("text"),
        "Read an operator description from a JSON string.");

  m.def("validate", [](const SystemSpec& spec) {
    ValidationReport r = validate_system(spec);
    py::dict d;
    d["valid"] = r.valid;
    d["ellipticity_margin"] = r.ellipticity_margin;
    d["min_offdiagonal"] = r.min_offdiagonal;
    d["irreducible"] = r.irreducible;
    return d;
  });

  m.def(
      "eigen",
      [](const SystemSpec& spec, double z, int substeps, bool extrapolate) {
        return eigen_dict(principal_eigenpair(spec, z, eigen_opts(substeps, extrapolate)));
      },
      py::arg("spec"), py::arg("z") = 0.0, py::arg("substeps") = 512,
      py::arg("extrapolate") = true, "Principal periodic eigenpair of the tilted operator.");

  m.def(
      "adjoint_eigen",
      [](const SystemSpec& spec, double z, int substeps, bool extrapolate) {
        return eigen_dict(adjoint_eigenpair(spec, z, eigen_opts(substeps, extrapolate)));
      },
      py::arg("spec"), py::arg("z") = 0.0, py::arg("substeps") = 512,
      py::arg("extrapolate") = true);

  m.def(
      "lambda_prime",
      [](const SystemSpec& spec, int substeps) {
        return lambda_prime(spec, eigen_opts(substeps, true)).lambda;
      },
      py::arg("spec"), py::arg("substeps") = 512);

  m.def(
      "lambda_one",
      [](const SystemSpec& spec, double z_tol, int substeps) {
        ZSearchOptions zo;
        zo.z_tol = z_tol;
        zo.eigen = eigen_opts(substeps, true);
        ZMaximum zm = lambda_one(spec, zo);
        py::dict d;
        d["z_star"] = zm.z_star;
        d["lambda_1"] = zm.lambda_1;
        d["bracket"] = py::make_tuple(zm.bracket.first, zm.bracket.second);
        d["evaluations"] = zm.evaluations;
        return d;
      },
      py::arg("spec"), py::arg("z_tol") = 1e-4, py::arg("substeps") = 512);

  m.def(
      "dirichlet",
      [](const SystemSpec& spec, int radius, int substeps) {
        return dirichlet_eigenvalue(spec, radius, eigen_opts(substeps, true)).lambda;
      },
      py::arg("spec"), py::arg("radius"), py::arg("substeps") = 512);

  m.def("blocks", [](const SystemSpec& spec) {
    BlockStructure b = block_decompose(spec);
    py::list out;
    for (int i = 0; i < b.block_count(); ++i) out.append(b.block_species(i));
    return out;
  });

  m.def(
      "diffusion_scan",
      [](const SystemSpec& spec, const std::vector<double>& values) {
        return scan_dict(diffusion_scan(spec, values));
      },
      py::arg("spec"), py::arg("values"));
  m.def(
      "vanishing_scan",
      [](const SystemSpec& spec, const std::vector<double>& values) {
        return scan_dict(vanishing_scan(spec, values));
      },
      py::arg("spec"), py::arg("values"));
  m.def(
      "frequency_scan",
      [](const SystemSpec& spec, const std::vector<double>& values, const std::string& direction) {
        return scan_dict(frequency_scan(spec, values,
                                        direction == "to_zero" ? FrequencyDirection::to_zero
                                                               : FrequencyDirection::to_infinity));
      },
      py::arg("spec"), py::arg("values"), py::arg("direction") = "to_infinity");

  m.def("variational_rayleigh", &variational_rayleigh, py::arg("spec"));

  m.def(
      "rearrange",
      [](const SystemSpec& spec) {
        RearrangedField r = rearrange(spec);
        py::dict d;
        d["lambda_original"] = r.lambda_original;
        d["lambda_rearranged"] = r.lambda_rearranged;
        return d;
      },
      py::arg("spec"));

  m.def(
      "verify_all",
      [](const std::string& config_dir, const std::vector<std::string>& only) {
        AcceptanceOptions ao;
        ao.config_dir = config_dir;
        ao.only = only;
        py::list out;
        for (const auto& r : run_acceptance(ao)) {
          py::dict d;
          d["id"] = r.id;
          d["title"] = r.title;
          d["passed"] = r.passed;
          py::list checks;
          for (const auto& ch : r.checks) {
            py::dict cd;
            cd["name"] = ch.name;
            cd["passed"] = ch.passed;
            cd["detail"] = ch.detail;
            checks.append(cd);
          }
          d["checks"] = checks;
          out.append(d);
        }
        return out;
      },
      py::arg("config_dir") = "configs", py::arg("only") = std::vector<std::string>{});
}
