#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "popot/cost.hpp"
#include "popot/transport.hpp"
#include "popot_cli/experiments.hpp"

namespace popot::cli {

namespace {

std::string join_numbers(const std::vector<double>& v, const char* sep) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? sep : "") + format_number(v[k]);
  return s;
}

void reject_other_command(Reader& r, const std::string& name) {
  if (r.has("command") && r.text("command") != name)
    throw ConfigError("command: this config is not for '" + name + "'");
}

std::string digest(const EVP_MD* md, const std::string& data) {
  unsigned char out[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out, &len, md, nullptr) != 1)
    throw std::runtime_error("hashing failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int k = 0; k < len; ++k) {
    s += hex[out[k] >> 4];
    s += hex[out[k] & 15];
  }
  return s;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string config_hash(const json& config) { return digest(EVP_sha256(), config.dump()); }

std::string git_blob_hash(const std::string& content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  return digest(EVP_sha1(), blob + content);
}

void write_outputs(const std::string& dir, CommandResult& result, const json& config) {
  std::filesystem::create_directories(dir);
  json hashes = json::object();
  for (const auto& f : result.files) {
    std::ofstream out(std::filesystem::path(dir) / f.name, std::ios::binary);
    out << f.content;
    if (!out) throw std::runtime_error("cannot write " + f.name);
    hashes[f.name] = git_blob_hash(f.content);
  }
  result.summary["config_hash"] = config_hash(config);
  result.summary["outputs"] = hashes;
  std::ofstream out(std::filesystem::path(dir) / "summary.json", std::ios::binary);
  out << result.summary.dump(2) << "\n";
  if (!out) throw std::runtime_error("cannot write summary.json");
}

// validate-a

CommandResult cmd_validate_a(const json& config, const Overrides&) {
  Reader r(config, "");
  reject_other_command(r, "validate-a");
  std::optional<GridSpec> grid;
  if (r.has("grid")) grid = parse_grid(r.raw("grid"), "grid");
  const json& model = r.raw("model");
  r.finish();
  const ModelSpec spec = parse_model(model, "model", grid);
  CommandResult out;
  if (!spec.certificate) throw ConfigError("model: the sexual model has no truncation to validate");
  const AdmissibilityReport& rep = *spec.certificate;
  double suggestion = std::numeric_limits<double>::quiet_NaN();
  try {
    suggestion = suggest_truncation(model, "model", grid);
  } catch (const ConfigError&) {
    // a0 = 0: no positive truncation is admissible on this grid.
  }
  std::string csv = "model,a,valid,min_ratio,pairs_checked,suggested_a,witness_first,witness_second,lhs,rhs\n";
  csv += spec.name + "," + format_number(spec.a) + "," + (rep.valid ? "true" : "false") + "," +
         format_number(rep.min_ratio) + "," + std::to_string(rep.pairs_checked) + "," +
         format_number(suggestion) + ",";
  if (rep.witness) {
    csv += join_numbers(rep.witness->first, " ") + "," + join_numbers(rep.witness->second, " ") + "," +
           format_number(rep.witness->lhs) + "," + format_number(rep.witness->rhs) + "\n";
  } else {
    csv += ",,,\n";
  }
  out.files.push_back({"validate_a.csv", csv});
  out.summary = {{"command", "validate-a"}, {"model", spec.name},     {"a", spec.a},
                 {"a_auto", spec.a_auto},   {"valid", rep.valid},      {"min_ratio", rep.min_ratio},
                 {"pairs_checked", rep.pairs_checked}, {"passed", rep.valid}};
  if (std::isfinite(suggestion)) out.summary["suggested_a"] = suggestion;
  std::ostringstream os;
  os << spec.name << " a=" << spec.a << (rep.valid ? " valid" : " violated") << " (min ratio "
     << rep.min_ratio << ", " << rep.pairs_checked << " pairs)\n";
  if (rep.witness) {
    os << "  witness (" << join_numbers(rep.witness->first, " ") << ") vs ("
       << join_numbers(rep.witness->second, " ") << "): a = " << rep.witness->lhs << " > "
       << rep.witness->rhs << "\n";
    out.summary["witness"] = {{"first", rep.witness->first},
                              {"second", rep.witness->second},
                              {"lhs", rep.witness->lhs},
                              {"rhs", rep.witness->rhs}};
  }
  out.report = os.str();
  out.exit_code = rep.valid ? 0 : 2;
  return out;
}

// sweep

SweepOptions parse_sweep(const json& config, const Overrides& over) {
  Reader r(config, "");
  reject_other_command(r, "sweep");
  SweepOptions o;
  const json& models = r.raw("models");
  if (!models.is_array() || models.empty()) throw ConfigError("models: expected a nonempty array");
  for (const auto& m : models) o.models.push_back(m);
  if (r.has("grid")) o.grid = parse_grid(r.raw("grid"), "grid");
  o.samples = r.count("samples", o.samples);
  o.box_hi = r.number("box_hi", o.box_hi);
  o.seed = r.u64("seed", o.seed);
  r.finish();
  if (over.seed) o.seed = *over.seed;
  if (o.samples == 0) throw ConfigError("samples: must be >= 1");
  if (!(o.box_hi > 0)) throw ConfigError("box_hi: must be > 0");
  return o;
}

std::vector<SweepResult> run_sweep(const SweepOptions& o) {
  std::vector<SweepResult> out;
  for (std::size_t k = 0; k < o.models.size(); ++k) {
    const std::string path = "models[" + std::to_string(k) + "]";
    const ModelSpec spec = parse_model(o.models[k], path, o.grid);
    if (spec.certificate && !spec.certificate->valid)
      throw std::domain_error(path + ": truncation a = " + format_number(spec.a) + " is not admissible");
    Stream rng = stream_for(o.seed, k);
    SweepBox box;
    box.hi = o.box_hi;
    out.push_back(std::visit([&](const auto& m) { return sweep(m, o.samples, box, rng); }, spec.model));
  }
  return out;
}

CommandResult cmd_sweep(const json& config, const Overrides& over) {
  const SweepOptions o = parse_sweep(config, over);
  CommandResult out;
  std::vector<SweepResult> results;
  try {
    results = run_sweep(o);
  } catch (const std::domain_error& e) {
    out.exit_code = 2;
    out.report = std::string("FAIL ") + e.what() + "\n";
    out.summary = {{"command", "sweep"}, {"passed", false}, {"error", e.what()}};
    return out;
  }
  std::string csv = "inequality,evaluations,worst_margin,quadrature,passed,witness\n";
  bool all = true;
  json rows = json::array();
  std::ostringstream os;
  for (const auto& s : results) {
    const bool ok = s.passed();
    all = all && ok;
    csv += s.name + "," + std::to_string(s.evaluations) + "," + format_number(s.worst_margin) + "," +
           (s.quadrature ? "true" : "false") + "," + (ok ? "true" : "false") + "," +
           join_numbers(s.witness, " ") + "\n";
    rows.push_back({{"inequality", s.name},
                    {"evaluations", s.evaluations},
                    {"worst_margin", s.worst_margin},
                    {"quadrature", s.quadrature},
                    {"passed", ok}});
    os << (ok ? "PASS " : "FAIL ") << s.name << " worst margin " << s.worst_margin << " over "
       << s.evaluations << " draws";
    if (!ok) os << " at (" << join_numbers(s.witness, " ") << ")";
    os << "\n";
  }
  out.files.push_back({"sweep.csv", csv});
  out.summary = {{"command", "sweep"}, {"seed", o.seed}, {"samples", o.samples},
                 {"results", rows},    {"passed", all}};
  out.report = os.str();
  out.exit_code = all ? 0 : 2;
  return out;
}

// dual-check

SourceFunction bump_source(double amplitude, double x0, double rx, double t0, double rt) {
  if (!(rx > 0) || !(rt > 0)) throw ConfigError("source: bump radii must be > 0");
  const auto phi = [](double u) {
    const double v = 1 - u * u;
    return v > 0 ? v * v * v * v : 0.0;
  };
  return [=](double x, double t) { return amplitude * phi((x - x0) / rx) * phi((t - t0) / rt); };
}

DualOptions parse_dual(const json& config, const Overrides& over) {
  Reader r(config, "");
  reject_other_command(r, "dual-check");
  DualOptions o;
  o.problem.g = parse_growth(r.raw("g"), "g");
  o.problem.d = parse_rate(r.raw("d"), "d");
  o.problem.horizon = r.number("horizon");
  o.problem.diagnostic_hi = r.number("diagnostic_hi", o.problem.diagnostic_hi);
  Reader s = r.child("source");
  const std::string type = s.text("type");
  if (type == "zero") {
    o.problem.source = [](double, double) { return 0.0; };
    o.problem.source_radius = 0;
  } else if (type == "bump") {
    const double x0 = s.number("x0"), rx = s.number("rx");
    o.problem.source = bump_source(s.number("amplitude"), x0, rx, s.number("t0"), s.number("rt"));
    o.problem.source_radius = x0 + rx;
  } else {
    throw ConfigError("source.type: unknown source '" + type + "'");
  }
  s.finish();
  const Law u0 = parse_law(r.raw("u0"), "u0");
  if (u0.kind() != Law::Kind::atoms) throw ConfigError("u0: expected a dirac or atoms law");
  if (u0.lower() < 0) throw ConfigError("u0: atoms must be >= 0");
  o.u0_atoms = u0.values();
  o.u0_weights = u0.weights();
  o.n_particles = r.count("n_particles", o.n_particles);
  o.h_t = r.number("h_t", o.h_t);
  if (r.has("budget")) {
    const json& b = r.raw("budget");
    if (b.is_string() && b.get<std::string>() == "auto") o.budget = -1;
    else if (b.is_number() && b.get<double>() >= 0) o.budget = b.get<double>();
    else throw ConfigError("budget: expected a nonnegative number or \"auto\"");
  }
  o.workers = static_cast<unsigned>(r.count("workers", o.workers));
  o.seed = r.u64("seed", o.seed);
  r.finish();
  if (over.seed) o.seed = *over.seed;
  if (!(o.problem.horizon > 0)) throw ConfigError("horizon: must be > 0");
  if (!(o.h_t > 0) || o.h_t > o.problem.horizon) throw ConfigError("h_t: must lie in (0, horizon]");
  if (o.workers == 0) throw ConfigError("workers: must be >= 1");
  return o;
}

DualRun run_dual(const DualOptions& o) {
  std::vector<Age> atoms;
  for (double x : o.u0_atoms) atoms.push_back({x});
  const EmpiricalMeasure<Age> u0(atoms, o.u0_weights);
  double budget = o.budget;
  DualRun run;
  run.solution = solve_volterra(o.problem, o.h_t);
  if (budget < 0) {
    const DualSolution fine = solve_volterra(o.problem, o.h_t / 2);
    double coarse_rhs = 0, fine_rhs = 0;
    for (std::size_t k = 0; k < u0.size(); ++k) {
      coarse_rhs += u0.weight(k) * evaluate_psi(o.problem, run.solution, u0.atom(k).x, 0.0);
      fine_rhs += u0.weight(k) * evaluate_psi(o.problem, fine, u0.atom(k).x, 0.0);
    }
    budget = 4 * std::abs(coarse_rhs - fine_rhs);
  }
  run.check = duality_crosscheck(o.problem, u0, o.n_particles, o.seed, o.h_t, budget, o.workers);
  return run;
}

CommandResult cmd_dual_check(const json& config, const Overrides& over) {
  const DualOptions o = parse_dual(config, over);
  const DualRun run = run_dual(o);
  CommandResult out;
  std::string psi = "t,psi0\n";
  for (std::size_t j = 0; j < run.solution.psi0.size(); ++j)
    psi += format_number(run.solution.time(j)) + "," + format_number(run.solution.psi0[j]) + "\n";
  out.files.push_back({"psi0.csv", psi});
  const DualityCheck& c = run.check;
  std::string csv = "lhs,rhs,mc_stderr,budget,tolerance,passed,c_of_t,support_radius\n";
  csv += format_number(c.lhs) + "," + format_number(c.rhs) + "," + format_number(c.mc_stderr) + "," +
         format_number(c.budget) + "," + format_number(c.tolerance) + "," +
         (c.passed ? "true" : "false") + "," + format_number(run.solution.c_of_t) + "," +
         format_number(run.solution.support_radius) + "\n";
  out.files.push_back({"dual.csv", csv});
  out.summary = {{"command", "dual-check"},
                 {"seed", o.seed},
                 {"lhs", c.lhs},
                 {"rhs", c.rhs},
                 {"mc_stderr", c.mc_stderr},
                 {"budget", c.budget},
                 {"tolerance", c.tolerance},
                 {"c_of_t", run.solution.c_of_t},
                 {"support_radius", run.solution.support_radius},
                 {"passed", c.passed}};
  std::ostringstream os;
  os << (c.passed ? "PASS" : "FAIL") << " duality: lhs=" << c.lhs << " rhs=" << c.rhs
     << " |diff|=" << std::abs(c.lhs - c.rhs) << " tolerance=" << c.tolerance << "\n";
  out.report = os.str();
  out.exit_code = c.passed ? 0 : 2;
  return out;
}

// ot

std::vector<std::vector<double>> read_atom_csv(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open " + file);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      double v = 0;
      const char* b = cell.data();
      while (*b == ' ') ++b;
      const auto res = std::from_chars(b, cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw ConfigError(file + ":" + std::to_string(lineno) + ": not a numeric row");
    }
    if (row.size() < 2) throw ConfigError(file + ":" + std::to_string(lineno) + ": need coordinates and a weight");
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(file + ":" + std::to_string(lineno) + ": column count differs");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(file + ": no atoms");
  return rows;
}

namespace {

EmpiricalMeasure<StatePoint> measure_from_rows(const std::vector<std::vector<double>>& rows, Space space,
                                               const std::string& file) {
  std::vector<StatePoint> atoms;
  std::vector<double> weights;
  double total = 0;
  for (const auto& row : rows) {
    const std::vector<double> coords(row.begin(), row.end() - 1);
    try {
      atoms.push_back(state_from_coordinates(space, coords));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(file + ": " + e.what());
    }
    weights.push_back(row.back());
    total += row.back();
  }
  if (std::abs(total - 1.0) > 1e-6) throw ConfigError(file + ": weights must sum to 1");
  for (double& w : weights) w /= total;
  try {
    return EmpiricalMeasure<StatePoint>(std::move(atoms), std::move(weights));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(file + ": " + e.what());
  }
}

}  // namespace

CommandResult cmd_ot(const OtOptions& o) {
  CostKind kind;
  try {
    kind = cost_kind_from_string(o.cost);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto mu_rows = read_atom_csv(o.mu_file);
  const auto nu_rows = read_atom_csv(o.nu_file);
  Space space;
  if (o.space) {
    space = space_from_string(*o.space);
  } else {
    switch (kind) {
      case CostKind::trunc_abs: space = Space::age; break;
      case CostKind::trunc_abs_state: space = Space::age_state; break;
      case CostKind::trunc_sum: space = Space::age_position; break;
      case CostKind::trunc_weighted: space = Space::time_pair; break;
      default: space = mu_rows.front().size() == 2 ? Space::age : Space::trait; break;
    }
  }
  const auto mu = measure_from_rows(mu_rows, space, o.mu_file);
  const auto nu = measure_from_rows(nu_rows, space, o.nu_file);
  CostFunction cost = [&] {
    try {
      switch (kind) {
        case CostKind::trunc_abs: return CostFunction::trunc_abs(o.a);
        case CostKind::trunc_abs_state: return CostFunction::trunc_abs_state(o.a);
        case CostKind::trunc_sum: return CostFunction::trunc_sum(o.a);
        case CostKind::trunc_weighted: return CostFunction::trunc_weighted(o.a);
        default: return CostFunction::power(o.p);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  if (!cost.supports(space))
    throw ConfigError("cost " + o.cost + " is not defined on " + std::string(to_string(space)));
  const TransportPlan plan = transport_cost(mu, nu, cost);
  CommandResult out;
  if (o.plan) {
    std::string csv = "src_index,dst_index,mass\n";
    for (const auto& e : plan.pairs)
      csv += std::to_string(e.source) + "," + std::to_string(e.target) + "," + format_number(e.mass) + "\n";
    out.files.push_back({"plan.csv", csv});
  }
  out.summary = {{"command", "ot"},          {"cost_kind", o.cost}, {"space", to_string(space)},
                 {"cost", plan.cost},        {"backend", plan.backend},
                 {"source_atoms", mu.size()}, {"target_atoms", nu.size()}, {"passed", true}};
  if (kind == CostKind::power) out.summary["p"] = o.p;
  else out.summary["a"] = o.a;
  out.report = format_number(plan.cost) + "\n";
  return out;
}

}  // namespace popot::cli
