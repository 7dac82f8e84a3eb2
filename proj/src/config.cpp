#include "coopeig/config.hpp"

#include <fstream>

#include "coopeig/discretize.hpp"

namespace coopeig {

namespace {

[[noreturn]] void schema_fail(const std::string& key, const std::string& what) {
  fail(ErrorCode::schema_error, "config key '" + key + "': " + what);
}

double require_number(const json& j, const std::string& key_path, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    schema_fail(key_path + "." + field, "missing or non-numeric");
  return j[field].get<double>();
}

int require_int(const json& j, const std::string& key_path, const char* field) {
  if (!j.contains(field) || !j[field].is_number_integer())
    schema_fail(key_path + "." + field, "missing or non-integer");
  return j[field].get<int>();
}

}  // namespace

CoefficientDescriptor descriptor_from_json(const json& j, const std::string& key_path) {
  if (j.is_number()) return CoefficientDescriptor::constant(j.get<double>());
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    schema_fail(key_path, "descriptor needs a 'kind' discriminator");
  const std::string kind = j["kind"].get<std::string>();

  if (kind == "constant") {
    return CoefficientDescriptor::constant(require_number(j, key_path, "value"));
  }
  if (kind == "fourier") {
    if (!j.contains("terms") || !j["terms"].is_array())
      schema_fail(key_path + ".terms", "missing term list");
    std::vector<FourierTerm> terms;
    int idx = 0;
    for (const auto& tj : j["terms"]) {
      const std::string tp = key_path + ".terms[" + std::to_string(idx++) + "]";
      FourierTerm t;
      t.kt = require_int(tj, tp, "kt");
      t.kx = require_int(tj, tp, "kx");
      t.amplitude = require_number(tj, tp, "amplitude");
      if (tj.contains("tform")) {
        const std::string f = tj["tform"].get<std::string>();
        if (f != "cos" && f != "sin") schema_fail(tp + ".tform", "must be cos or sin");
        t.t_sin = f == "sin";
      }
      if (tj.contains("xform")) {
        const std::string f = tj["xform"].get<std::string>();
        if (f != "cos" && f != "sin") schema_fail(tp + ".xform", "must be cos or sin");
        t.x_sin = f == "sin";
      }
      terms.push_back(t);
    }
    return CoefficientDescriptor::fourier(std::move(terms));
  }
  if (kind == "grid") {
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
      schema_fail(key_path + ".values", "missing sample rows");
    const auto& rows = j["values"];
    const int nt = static_cast<int>(rows.size());
    if (!rows[0].is_array()) schema_fail(key_path + ".values", "rows must be arrays");
    const int nx = static_cast<int>(rows[0].size());
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(nt) * nx);
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != nx)
        schema_fail(key_path + ".values", "ragged sample rows");
      for (const auto& v : row) {
        if (!v.is_number()) schema_fail(key_path + ".values", "non-numeric sample");
        vals.push_back(v.get<double>());
      }
    }
    return CoefficientDescriptor::grid(nt, nx, std::move(vals));
  }
  if (kind == "piecewise") {
    std::vector<PiecewisePatch> pieces;
    double fallback = 0.0;
    if (j.contains("default")) fallback = j["default"].get<double>();
    if (!j.contains("pieces") || !j["pieces"].is_array())
      schema_fail(key_path + ".pieces", "missing piece list");
    int idx = 0;
    for (const auto& pj : j["pieces"]) {
      const std::string pp = key_path + ".pieces[" + std::to_string(idx++) + "]";
      PiecewisePatch p;
      if (!pj.contains("t") || !pj["t"].is_array() || pj["t"].size() != 2)
        schema_fail(pp + ".t", "needs [lo, hi]");
      if (!pj.contains("x") || !pj["x"].is_array() || pj["x"].size() != 2)
        schema_fail(pp + ".x", "needs [lo, hi]");
      p.t_lo = pj["t"][0].get<double>();
      p.t_hi = pj["t"][1].get<double>();
      p.x_lo = pj["x"][0].get<double>();
      p.x_hi = pj["x"][1].get<double>();
      p.value = require_number(pj, pp, "value");
      pieces.push_back(p);
    }
    return CoefficientDescriptor::piecewise(std::move(pieces), fallback);
  }
  schema_fail(key_path + ".kind", "unknown kind '" + kind + "'");
}

json descriptor_to_json(const CoefficientDescriptor& d) {
  json j;
  switch (d.kind) {
    case CoefficientDescriptor::Kind::constant:
      j["kind"] = "constant";
      j["value"] = d.constant_value;
      break;
    case CoefficientDescriptor::Kind::fourier: {
      j["kind"] = "fourier";
      json terms = json::array();
      for (const auto& t : d.terms) {
        json tj;
        tj["kt"] = t.kt;
        tj["kx"] = t.kx;
        tj["tform"] = t.t_sin ? "sin" : "cos";
        tj["xform"] = t.x_sin ? "sin" : "cos";
        tj["amplitude"] = t.amplitude;
        terms.push_back(tj);
      }
      j["terms"] = terms;
      break;
    }
    case CoefficientDescriptor::Kind::grid: {
      j["kind"] = "grid";
      json rows = json::array();
      for (int jt = 0; jt < d.grid_nt; ++jt) {
        json row = json::array();
        for (int k = 0; k < d.grid_nx; ++k)
          row.push_back(d.grid_values[static_cast<size_t>(jt) * d.grid_nx + k]);
        rows.push_back(row);
      }
      j["values"] = rows;
      break;
    }
    case CoefficientDescriptor::Kind::piecewise: {
      j["kind"] = "piecewise";
      j["default"] = d.piecewise_default;
      json pieces = json::array();
      for (const auto& p : d.pieces) {
        json pj;
        pj["t"] = {p.t_lo, p.t_hi};
        pj["x"] = {p.x_lo, p.x_hi};
        pj["value"] = p.value;
        pieces.push_back(pj);
      }
      j["pieces"] = pieces;
      break;
    }
  }
  return j;
}

SystemSpec spec_from_json(const json& j) {
  SystemSpec spec;
  if (!j.contains("cell") || !j["cell"].is_object()) schema_fail("cell", "missing object");
  const json& cell = j["cell"];
  spec.cell.period_T = require_number(cell, "cell", "T");
  spec.cell.period_L = require_number(cell, "cell", "L");
  spec.cell.nt = require_int(cell, "cell", "nt");
  spec.cell.nx = require_int(cell, "cell", "nx");
  if (!j.contains("species")) schema_fail("species", "missing");
  spec.N = j["species"].get<int>();
  if (spec.N < 1 || spec.N > 64) schema_fail("species", "must be in [1, 64]");

  auto read_list = [&](const char* field, int expected) {
    if (!j.contains(field) || !j[field].is_array() ||
        static_cast<int>(j[field].size()) != expected)
      schema_fail(field, "needs exactly " + std::to_string(expected) + " descriptors");
    std::vector<CoefficientDescriptor> out;
    for (int i = 0; i < expected; ++i)
      out.push_back(descriptor_from_json(j[field][i], std::string(field) + "[" + std::to_string(i) + "]"));
    return out;
  };
  spec.diffusion = read_list("diffusion", spec.N);
  spec.advection = read_list("advection", spec.N);

  if (!j.contains("coupling") || !j["coupling"].is_array() ||
      static_cast<int>(j["coupling"].size()) != spec.N)
    schema_fail("coupling", "needs an N x N descriptor array");
  for (int i = 0; i < spec.N; ++i) {
    const auto& row = j["coupling"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != spec.N)
      schema_fail("coupling[" + std::to_string(i) + "]", "needs N descriptors");
    for (int c = 0; c < spec.N; ++c)
      spec.coupling.push_back(descriptor_from_json(
          row[c], "coupling[" + std::to_string(i) + "][" + std::to_string(c) + "]"));
  }

  if (j.contains("reducible")) spec.reducible_flag = j["reducible"].get<bool>();
  return spec;
}

json spec_to_json(const SystemSpec& spec) {
  json j;
  j["cell"] = {{"T", spec.cell.period_T},
               {"L", spec.cell.period_L},
               {"nt", spec.cell.nt},
               {"nx", spec.cell.nx}};
  j["species"] = spec.N;
  json diff = json::array(), adv = json::array(), coup = json::array();
  for (int i = 0; i < spec.N; ++i) diff.push_back(descriptor_to_json(spec.diffusion[i]));
  for (int i = 0; i < spec.N; ++i) adv.push_back(descriptor_to_json(spec.advection[i]));
  for (int i = 0; i < spec.N; ++i) {
    json row = json::array();
    for (int c = 0; c < spec.N; ++c) row.push_back(descriptor_to_json(spec.coupling_at(i, c)));
    coup.push_back(row);
  }
  j["diffusion"] = diff;
  j["advection"] = adv;
  j["coupling"] = coup;
  if (spec.reducible_flag) j["reducible"] = true;
  return j;
}

namespace {

MutationDecomposition decomposition_from_json(const json& j, const SystemSpec& spec) {
  MutationDecomposition dec;
  dec.N = spec.N;
  dec.nt = spec.cell.nt;
  dec.nx = spec.cell.nx;
  dec.r.resize(static_cast<size_t>(dec.nt) * dec.nx * dec.N);
  dec.mu.resize(static_cast<size_t>(dec.nt) * dec.nx * dec.N);
  dec.S = MatrixField::zeros(dec.N, dec.nt, dec.nx);

  auto fill_vector = [&](const char* field, std::vector<double>& out) {
    if (!j.contains(field) || !j[field].is_array() ||
        static_cast<int>(j[field].size()) != spec.N)
      schema_fail(std::string("decomposition.") + field, "needs one descriptor per species");
    for (int i = 0; i < spec.N; ++i) {
      CoefficientDescriptor d = descriptor_from_json(
          j[field][i], std::string("decomposition.") + field + "[" + std::to_string(i) + "]");
      ScalarFieldSamples s = sample(d, spec.cell);
      for (int jt = 0; jt < dec.nt; ++jt)
        for (int k = 0; k < dec.nx; ++k)
          out[(static_cast<size_t>(jt) * dec.nx + k) * dec.N + i] = s.at(jt, k);
    }
  };
  fill_vector("r", dec.r);
  fill_vector("mu", dec.mu);

  if (!j.contains("S") || !j["S"].is_array() || static_cast<int>(j["S"].size()) != spec.N)
    schema_fail("decomposition.S", "needs an N x N descriptor array");
  for (int i = 0; i < spec.N; ++i) {
    const auto& row = j["S"][i];
    if (!row.is_array() || static_cast<int>(row.size()) != spec.N)
      schema_fail("decomposition.S[" + std::to_string(i) + "]", "needs N descriptors");
    for (int c = 0; c < spec.N; ++c) {
      CoefficientDescriptor d = descriptor_from_json(
          row[c], "decomposition.S[" + std::to_string(i) + "][" + std::to_string(c) + "]");
      ScalarFieldSamples s = sample(d, spec.cell);
      for (int jt = 0; jt < dec.nt; ++jt)
        for (int k = 0; k < dec.nx; ++k) dec.S.at(jt, k, i, c) = s.at(jt, k);
    }
  }
  return dec;
}

}  // namespace

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::schema_error, origin + ": " + e.what());
  }
  ParsedConfig out;
  out.raw = doc;
  out.spec = spec_from_json(doc);
  validate_system(out.spec);  // surfaces structural violations early
  if (doc.contains("decomposition"))
    out.decomposition = decomposition_from_json(doc["decomposition"], out.spec);
  return out;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::schema_error, "cannot open config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text, path);
}

json state_to_json(const StateVector& u) {
  json rows = json::array();
  for (int i = 0; i < u.N; ++i) {
    json row = json::array();
    for (int k = 0; k < u.nx; ++k) row.push_back(u.at(i, k));
    rows.push_back(row);
  }
  return rows;
}

json matrix_to_json(const SquareMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.N; ++i) {
    json row = json::array();
    for (int j = 0; j < m.N; ++j) row.push_back(m.at(i, j));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace coopeig
