#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coopeig/acceptance.hpp"
#include "coopeig/analysis.hpp"
#include "coopeig/config.hpp"
#include "coopeig/corpus.hpp"
#include "coopeig/optimize.hpp"
#include "coopeig/version.hpp"

namespace fs = std::filesystem;
using namespace coopeig;

namespace {

struct GlobalOpts {
  std::string config;
  std::string out_dir = "out";
  int nx = 0;       // 0 = keep config value
  int nt = 0;
  int substeps = 512;
  double tol = 1e-8;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool no_extrapolate = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema_error:
    case ErrorCode::validation_error:
    case ErrorCode::ellipticity_violation:
    case ErrorCode::cooperativity_violation:
    case ErrorCode::shape_mismatch:
    case ErrorCode::invalid_decomposition:
    case ErrorCode::reducible_spec:
    case ErrorCode::hypothesis_not_met:
    case ErrorCode::not_self_adjoint:
    case ErrorCode::enumeration_too_large:
      return 2;
    default:
      return 3;
  }
}

json error_record(const Error& e) {
  json j;
  j["schema_version"] = "1";
  j["error"] = error_code_name(e.code());
  j["message"] = e.what();
  return j;
}

class Emitter {
public:
  Emitter(const GlobalOpts& g, const std::string& command) : g_(g), command_(command) {
    fs::create_directories(g.out_dir);
    start_ = std::chrono::steady_clock::now();
  }

  void write_json(const std::string& name, json payload) const {
    payload["manifest"] = "manifest.json";
    json doc;
    doc["schema_version"] = "1";
    for (auto& [k, v] : payload.items()) doc[k] = v;
    std::ofstream out(g_.out_dir + "/" + name);
    out << doc.dump(2) << "\n";
  }

  void write_scan_csv(const std::string& name, const ScanTable& t) const {
    std::ofstream out(g_.out_dir + "/" + name);
    out << "param,lambda,predicted,abs_err,verdict\n";
    for (const auto& row : t.rows) {
      out << format_double(row.param) << "," << format_double(row.lambda) << ",";
      if (row.predicted) out << format_double(*row.predicted);
      out << "," << format_double(row.abs_err) << "," << row.verdict << "\n";
    }
  }

  void write_manifest() const {
    json m;
    m["schema_version"] = "1";
    m["command"] = command_;
    m["config"] = g_.config;
    m["options"] = {{"nx", g_.nx},       {"nt", g_.nt},   {"substeps", g_.substeps},
                    {"tol", g_.tol},     {"seed", g_.seed}, {"jobs", g_.jobs},
                    {"out", g_.out_dir}, {"no_extrapolate", g_.no_extrapolate}};
    m["tool_version"] = kVersion;
    m["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    std::ofstream out(g_.out_dir + "/manifest.json");
    out << m.dump(2) << "\n";
  }

private:
  const GlobalOpts& g_;
  std::string command_;
  std::chrono::steady_clock::time_point start_;
};

json scan_to_json(const ScanTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json row;
    row["param"] = r.param;
    row["lambda"] = r.lambda;
    if (r.predicted) row["predicted"] = *r.predicted;
    row["abs_err"] = r.abs_err;
    row["verdict"] = r.verdict;
    rows.push_back(row);
  }
  json j;
  j["parameter"] = t.parameter;
  if (t.predicted_limit) j["predicted_limit"] = *t.predicted_limit;
  j["rows"] = rows;
  j["summary"] = t.summary;
  return j;
}

json eigen_to_json(const EigenResult& r) {
  json j;
  j["z"] = r.z;
  j["lambda"] = r.lambda;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  j["nx"] = r.eigenfunction.nx;
  j["M"] = r.substeps_used;
  j["extrapolated"] = r.extrapolated;
  j["multiplier"] = r.multiplier;
  j["exact_in_time"] = r.exact_in_time;
  j["eigenfunction"] = state_to_json(r.eigenfunction);
  return j;
}

SystemSpec load_spec(const GlobalOpts& g, ParsedConfig& cfg) {
  cfg = parse_config(g.config);
  if (g.nx > 0) cfg.spec.cell.nx = g.nx;
  if (g.nt > 0) cfg.spec.cell.nt = g.nt;
  validate_system(cfg.spec);
  return cfg.spec;
}

EigenOptions eigen_opts(const GlobalOpts& g) {
  EigenOptions eo;
  eo.substeps = g.substeps;
  eo.extrapolate = !g.no_extrapolate;
  eo.residual_tol = g.tol;
  return eo;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized principal eigenvalues of space-time periodic cooperative systems"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  GlobalOpts g;
  app.add_option("--config", g.config, "operator description (JSON)");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--nx", g.nx, "override space nodes");
  app.add_option("--nt", g.nt, "override time nodes");
  app.add_option("--substeps", g.substeps, "monodromy substeps per period");
  app.add_option("--tol", g.tol, "eigen residual tolerance");
  app.add_option("--seed", g.seed, "seed for randomized commands");
  app.add_option("--jobs", g.jobs, "parallel jobs for scans (reserved)");
  app.add_flag("--no-extrapolate", g.no_extrapolate, "disable Richardson extrapolation");

  double z = 0.0;
  double z_min = -2.0, z_max = 2.0;
  int z_count = 11;
  std::vector<int> radii{2, 4, 8, 16};
  std::string config2;
  int s_count = 9;
  std::string limit_mode = "diffusion";
  std::vector<double> limit_values;
  std::string objective = "min";
  int partition_cells = 1;
  int directions = 1;

  CLI::App* cmd_eigen = app.add_subcommand("eigen", "principal eigenpair at a tilt");
  cmd_eigen->add_option("--z", z, "tilt");
  CLI::App* cmd_adjoint = app.add_subcommand("adjoint", "adjoint eigenpair at a tilt");
  cmd_adjoint->add_option("--z", z, "tilt");
  CLI::App* cmd_zscan = app.add_subcommand("zscan", "eigenvalues on a tilt grid");
  cmd_zscan->add_option("--z-min", z_min);
  cmd_zscan->add_option("--z-max", z_max);
  cmd_zscan->add_option("--z-count", z_count);
  CLI::App* cmd_max = app.add_subcommand("maximize", "lambda_1 = max_z lambda_{1,z}");
  CLI::App* cmd_dir = app.add_subcommand("dirichlet", "Dirichlet eigenvalues on [-R, R] periods");
  cmd_dir->add_option("--radius", radii, "half-widths in periods");
  CLI::App* cmd_blocks = app.add_subcommand("blocks", "validation report and block structure");
  CLI::App* cmd_conc = app.add_subcommand("concavity", "eigenvalue along a coupling path");
  cmd_conc->add_option("--config2", config2, "path endpoint operator")->required();
  cmd_conc->add_option("--s-count", s_count, "grid points on [0,1]");
  CLI::App* cmd_limits = app.add_subcommand("limits", "asymptotic parameter scans");
  cmd_limits->add_option("--mode", limit_mode,
                         "diffusion | vanishing | frequency-zero | frequency-infinity");
  cmd_limits->add_option("--values", limit_values, "parameter values");
  CLI::App* cmd_bounds = app.add_subcommand("bounds", "mean-matrix upper bounds at a tilt");
  cmd_bounds->add_option("--z", z, "tilt");
  CLI::App* cmd_ray = app.add_subcommand("rayleigh", "self-adjoint variational eigenvalue");
  CLI::App* cmd_karlin = app.add_subcommand("karlin", "mixing monotonicity scan");
  cmd_karlin->add_option("--s-count", s_count, "grid points on (0,1]");
  CLI::App* cmd_deriv = app.add_subcommand("derivative", "adjoint-formula eigenvalue derivative");
  cmd_deriv->add_option("--directions", directions, "random directions to test");
  CLI::App* cmd_opt = app.add_subcommand("optimize-mutation", "optimal mutation structure");
  cmd_opt->add_option("--objective", objective, "min | max");
  cmd_opt->add_option("--cells", partition_cells, "time partition cells");
  CLI::App* cmd_rear = app.add_subcommand("rearrange", "periodic rearrangement comparison");
  CLI::App* cmd_verify = app.add_subcommand("verify-all", "run the bundled verification table");
  std::string configs_dir = "configs";
  cmd_verify->add_option("--configs", configs_dir, "bundled config directory");

  CLI11_PARSE(app, argc, argv);

  try {
    ParsedConfig cfg;
    if (cmd_eigen->parsed()) {
      Emitter em(g, "eigen");
      SystemSpec spec = load_spec(g, cfg);
      EigenResult r = principal_eigenpair(spec, z, eigen_opts(g));
      em.write_json("eigen.json", eigen_to_json(r));
      em.write_manifest();
      std::cout << "lambda = " << format_double(r.lambda) << "\n";
    } else if (cmd_adjoint->parsed()) {
      Emitter em(g, "adjoint");
      SystemSpec spec = load_spec(g, cfg);
      EigenResult r = adjoint_eigenpair(spec, z, eigen_opts(g));
      em.write_json("adjoint.json", eigen_to_json(r));
      em.write_manifest();
      std::cout << "lambda = " << format_double(r.lambda) << "\n";
    } else if (cmd_zscan->parsed()) {
      Emitter em(g, "zscan");
      SystemSpec spec = load_spec(g, cfg);
      json rows = json::array();
      ScanTable table;
      table.parameter = "z";
      StateVector warm;
      bool have = false;
      for (int i = 0; i < z_count; ++i) {
        const double zi = z_count == 1 ? z_min : z_min + (z_max - z_min) * i / (z_count - 1);
        EigenOptions eo = eigen_opts(g);
        if (have) eo.warm_start = &warm;
        EigenResult r = principal_eigenpair(spec, zi, eo);
        warm = r.eigenfunction;
        have = true;
        json rec = eigen_to_json(r);
        rec.erase("eigenfunction");
        rows.push_back(rec);
        table.rows.push_back({zi, r.lambda, std::nullopt, 0.0, ""});
      }
      em.write_json("zscan.json", json{{"rows", rows}});
      em.write_scan_csv("zscan.csv", table);
      em.write_manifest();
      std::cout << "wrote " << z_count << " tilt rows\n";
    } else if (cmd_max->parsed()) {
      Emitter em(g, "maximize");
      SystemSpec spec = load_spec(g, cfg);
      ZSearchOptions zo;
      zo.eigen = eigen_opts(g);
      ZMaximum m = lambda_one(spec, zo);
      em.write_json("maximize.json", json{{"z_star", m.z_star},
                                          {"lambda_1", m.lambda_1},
                                          {"bracket", {m.bracket.first, m.bracket.second}},
                                          {"evaluations", m.evaluations}});
      em.write_manifest();
      std::cout << "z_star = " << format_double(m.z_star)
                << ", lambda_1 = " << format_double(m.lambda_1) << "\n";
    } else if (cmd_dir->parsed()) {
      Emitter em(g, "dirichlet");
      SystemSpec spec = load_spec(g, cfg);
      json rows = json::array();
      double prev = std::numeric_limits<double>::infinity();
      bool monotone = true;
      for (int R : radii) {
        EigenResult r = dirichlet_eigenvalue(spec, R, eigen_opts(g));
        if (r.lambda > prev + 1e-10) monotone = false;
        prev = r.lambda;
        rows.push_back(json{{"radius", R},
                            {"lambda", r.lambda},
                            {"residual", r.residual},
                            {"iterations", r.iterations}});
      }
      em.write_json("dirichlet.json", json{{"rows", rows}, {"monotone_decreasing", monotone}});
      em.write_manifest();
      std::cout << "lambda(R=" << radii.back() << ") = " << format_double(prev) << "\n";
    } else if (cmd_blocks->parsed()) {
      Emitter em(g, "blocks");
      SystemSpec spec = load_spec(g, cfg);
      ValidationReport rep = validate_system(spec);
      BlockStructure blocks = block_decompose(spec);
      json bj = json::array();
      for (int b = 0; b < blocks.block_count(); ++b) bj.push_back(blocks.block_species(b));
      em.write_json("blocks.json",
                    json{{"valid", rep.valid},
                         {"ellipticity_margin", rep.ellipticity_margin},
                         {"min_offdiagonal", rep.min_offdiagonal},
                         {"irreducible", rep.irreducible},
                         {"reducible_flagged", rep.reducible_flagged},
                         {"blocks", bj}});
      em.write_manifest();
      std::cout << "blocks = " << blocks.block_count() << "\n";
    } else if (cmd_conc->parsed()) {
      Emitter em(g, "concavity");
      SystemSpec spec = load_spec(g, cfg);
      ParsedConfig cfg2 = parse_config(config2);
      if (g.nx > 0) cfg2.spec.cell.nx = g.nx;
      if (g.nt > 0) cfg2.spec.cell.nt = g.nt;
      std::vector<double> grid;
      for (int i = 0; i < s_count; ++i) grid.push_back(i / double(s_count - 1));
      ScanOptions so;
      so.eigen = eigen_opts(g);
      ScanTable t = concavity_in_L(spec, cfg2.spec, grid, so);
      em.write_json("concavity.json", scan_to_json(t));
      em.write_scan_csv("concavity.csv", t);
      em.write_manifest();
      std::cout << t.summary << "\n";
    } else if (cmd_limits->parsed()) {
      Emitter em(g, "limits");
      SystemSpec spec = load_spec(g, cfg);
      ScanOptions so;
      so.eigen = eigen_opts(g);
      ScanTable t;
      if (limit_mode == "diffusion") {
        if (limit_values.empty()) limit_values = {1, 10, 100, 1000};
        t = diffusion_scan(spec, limit_values, so);
      } else if (limit_mode == "vanishing") {
        if (limit_values.empty()) limit_values = {1, 0.1, 0.01};
        t = vanishing_scan(spec, limit_values, so);
      } else if (limit_mode == "frequency-zero") {
        if (limit_values.empty()) limit_values = {1, 0.1, 0.01};
        t = frequency_scan(spec, limit_values, FrequencyDirection::to_zero, so);
      } else if (limit_mode == "frequency-infinity") {
        if (limit_values.empty()) limit_values = {1, 10, 100};
        t = frequency_scan(spec, limit_values, FrequencyDirection::to_infinity, so);
      } else {
        fail(ErrorCode::schema_error, "unknown limits mode '" + limit_mode + "'");
      }
      em.write_json("limits.json", scan_to_json(t));
      em.write_scan_csv("limits.csv", t);
      em.write_manifest();
      std::cout << t.summary << "\n";
    } else if (cmd_bounds->parsed()) {
      Emitter em(g, "bounds");
      SystemSpec spec = load_spec(g, cfg);
      std::vector<BoundVerdict> verdicts = bounds_report(spec, z, eigen_opts(g));
      json rows = json::array();
      for (const auto& v : verdicts) {
        json r;
        r["name"] = v.name;
        r["hypothesis_met"] = v.hypothesis_met;
        if (!v.hypothesis_met) r["hypothesis_note"] = v.hypothesis_note;
        if (v.hypothesis_met) {
          r["bound"] = v.bound;
          r["lambda"] = v.lambda;
          r["satisfied"] = v.satisfied;
          r["equality"] = v.equality;
        }
        rows.push_back(r);
      }
      em.write_json("bounds.json", json{{"z", z}, {"rows", rows}});
      em.write_manifest();
      std::cout << verdicts.size() << " bounds evaluated\n";
    } else if (cmd_ray->parsed()) {
      Emitter em(g, "rayleigh");
      SystemSpec spec = load_spec(g, cfg);
      bool transformed = false;
      SystemSpec working = spec;
      bool has_advection = false;
      for (int i = 0; i < spec.N; ++i) {
        ScalarFieldSamples q = spec.sample_advection(i);
        if (q.min() != 0.0 || q.max() != 0.0) has_advection = true;
      }
      if (has_advection) {
        working = self_adjoint_transform(spec);
        transformed = true;
      }
      const double rayleigh = variational_rayleigh(working);
      EigenResult lp = lambda_prime(spec, eigen_opts(g));
      em.write_json("rayleigh.json", json{{"rayleigh", rayleigh},
                                          {"lambda_prime", lp.lambda},
                                          {"gap", rayleigh - lp.lambda},
                                          {"transformed", transformed}});
      em.write_manifest();
      std::cout << "rayleigh = " << format_double(rayleigh)
                << ", lambda_prime = " << format_double(lp.lambda) << "\n";
    } else if (cmd_karlin->parsed()) {
      Emitter em(g, "karlin");
      SystemSpec spec = load_spec(g, cfg);
      if (!cfg.decomposition)
        fail(ErrorCode::schema_error, "karlin needs a decomposition section in the config");
      std::vector<double> grid;
      for (int i = 1; i <= s_count; ++i) grid.push_back(i / double(s_count));
      ScanOptions so;
      so.eigen = eigen_opts(g);
      ScanTable t = karlin_scan(spec, *cfg.decomposition, grid, so);
      em.write_json("karlin.json", scan_to_json(t));
      em.write_scan_csv("karlin.csv", t);
      em.write_manifest();
      std::cout << t.summary << "\n";
    } else if (cmd_deriv->parsed()) {
      Emitter em(g, "derivative");
      SystemSpec spec = load_spec(g, cfg);
      json rows = json::array();
      for (int d = 0; d < directions; ++d) {
        MatrixField dL =
            random_direction_field(g.seed + static_cast<std::uint64_t>(d), spec.N, spec.cell.nt,
                                   spec.cell.nx);
        DerivativeOptions dopts;
        dopts.eigen = eigen_opts(g);
        dopts.eigen.extrapolate = false;
        const double val = eigen_derivative(spec, z, dL, dopts);
        rows.push_back(json{{"direction_seed", g.seed + static_cast<std::uint64_t>(d)},
                            {"derivative", val}});
      }
      em.write_json("derivative.json", json{{"z", z}, {"rows", rows}});
      em.write_manifest();
      std::cout << directions << " directions evaluated\n";
    } else if (cmd_opt->parsed()) {
      Emitter em(g, "optimize-mutation");
      SystemSpec spec = load_spec(g, cfg);
      if (!cfg.decomposition)
        fail(ErrorCode::schema_error,
             "optimize-mutation needs a decomposition section for (r, mu)");
      MutationTemplate tmpl;
      tmpl.base = spec;
      // rebuild per-species descriptors from the decomposition samples
      for (int i = 0; i < spec.N; ++i) {
        std::vector<double> rv(static_cast<size_t>(spec.cell.nt) * spec.cell.nx);
        std::vector<double> mv(rv.size());
        for (int jt = 0; jt < spec.cell.nt; ++jt)
          for (int k = 0; k < spec.cell.nx; ++k) {
            rv[static_cast<size_t>(jt) * spec.cell.nx + k] = cfg.decomposition->r_at(jt, k, i);
            mv[static_cast<size_t>(jt) * spec.cell.nx + k] = cfg.decomposition->mu_at(jt, k, i);
          }
        tmpl.r.push_back(CoefficientDescriptor::grid(spec.cell.nt, spec.cell.nx, std::move(rv)));
        tmpl.mu.push_back(CoefficientDescriptor::grid(spec.cell.nt, spec.cell.nx, std::move(mv)));
      }
      std::vector<PartitionCell> partition;
      for (int p = 0; p < partition_cells; ++p)
        partition.push_back({spec.cell.period_T * p / partition_cells,
                             spec.cell.period_T * (p + 1) / partition_cells, 0.0,
                             spec.cell.period_L});
      MutationSearchOptions mo;
      mo.objective = objective == "max" ? MutationObjective::maximize : MutationObjective::minimize;
      mo.seed = g.seed;
      mo.eigen = eigen_opts(g);
      MutationOptimum opt = optimize_mutation(tmpl, partition, mo);
      json cells = json::array();
      for (const auto& S : opt.field.S) cells.push_back(matrix_to_json(S));
      json cert = json::array();
      for (const auto& cs : opt.certificate)
        cert.push_back(json{{"index", cs.seed_index},
                            {"lambda", cs.lambda},
                            {"beats_optimum", cs.beats_optimum}});
      em.write_json("optimize_mutation.json",
                    json{{"objective", objective},
                         {"objective_value", opt.objective_value},
                         {"permutation_index", opt.permutation_index},
                         {"cells", cells},
                         {"heuristic", opt.heuristic},
                         {"certificate", cert}});
      em.write_manifest();
      std::cout << "optimum = " << format_double(opt.objective_value) << "\n";
    } else if (cmd_rear->parsed()) {
      Emitter em(g, "rearrange");
      SystemSpec spec = load_spec(g, cfg);
      EigenOptions eo = eigen_opts(g);
      RearrangedField rf = rearrange(spec, eo);
      em.write_json("rearrange.json",
                    json{{"lambda_original", rf.lambda_original},
                         {"lambda_rearranged", rf.lambda_rearranged},
                         {"inequality_satisfied",
                          rf.lambda_original >= rf.lambda_rearranged - 1e-6}});
      em.write_manifest();
      std::cout << "lambda = " << format_double(rf.lambda_original)
                << ", rearranged = " << format_double(rf.lambda_rearranged) << "\n";
    } else if (cmd_verify->parsed()) {
      Emitter em(g, "verify-all");
      AcceptanceOptions ao;
      ao.config_dir = configs_dir;
      std::vector<CriterionResult> results = run_acceptance(ao);
      json rows = json::array();
      for (const auto& r : results) {
        std::cout << format_result_line(r) << "\n";
        json checks = json::array();
        for (const auto& ch : r.checks)
          checks.push_back(json{{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
        rows.push_back(json{{"id", r.id},
                            {"title", r.title},
                            {"passed", r.passed},
                            {"checks", checks},
                            {"note", r.note}});
      }
      em.write_json("verify_all.json", json{{"criteria", rows}, {"passed", all_passed(results)}});
      em.write_manifest();
      if (!all_passed(results)) return 4;
    }
  } catch (const Error& e) {
    std::cerr << error_code_name(e.code()) << ": " << e.what() << "\n";
    fs::create_directories(g.out_dir);
    std::ofstream out(g.out_dir + "/error.json");
    out << error_record(e).dump(2) << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
