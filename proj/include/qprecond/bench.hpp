#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qprecond/diagnostics.hpp"
#include "qprecond/error.hpp"
#include "qprecond/generators.hpp"
#include "qprecond/io.hpp"
#include "qprecond/parallel.hpp"
#include "qprecond/precond.hpp"
#include "qprecond/problem.hpp"
#include "qprecond/random.hpp"
#include "qprecond/solvers/anneal.hpp"
#include "qprecond/solvers/brute_force.hpp"
#include "qprecond/solvers/burer_monteiro.hpp"

namespace qprecond {

/// Raised for campaign failures; the message names the instance, variant and solver.
class CampaignError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------------------
// Angle sources shared by the campaign manifest and the command line.

/// Reads {"gammas": [...], "betas": [...]}.
inline AngleSchedule angles_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("gammas") || !j.contains("betas")) {
    throw FormatError("angle object needs 'gammas' and 'betas' arrays");
  }
  AngleSchedule angles;
  try {
    angles.gammas = j.at("gammas").get<std::vector<double>>();
    angles.betas = j.at("betas").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad angle arrays: ") + e.what());
  }
  angles.validate();
  return angles;
}

inline AngleSchedule read_angles_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open angle file '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("angle file '" + path.string() + "': " + e.what());
  }
  return angles_from_json(j);
}

inline void write_angles_file(const AngleSchedule& angles, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  out << nlohmann::json{{"gammas", angles.gammas}, {"betas", angles.betas}}.dump(2) << '\n';
}

/// "sk-default", "regular3", "optimize:R" or "optimize:R:SEED", "file:PATH".
inline AngleSource parse_angle_source(const std::string& spec, std::size_t p) {
  if (spec == "sk-default") return AngleSource::sk_default();
  if (spec == "regular3") return AngleSource::provided(regular3_angles(p));
  if (spec.starts_with("file:")) {
    auto angles = read_angles_file(spec.substr(5));
    if (angles.p() != p) {
      throw InvalidParameter("angle file '" + spec.substr(5) + "' has depth " + std::to_string(angles.p()) +
                             ", expected p=" + std::to_string(p));
    }
    return AngleSource::provided(std::move(angles));
  }
  if (spec.starts_with("optimize:")) {
    const auto rest = spec.substr(9);
    const auto colon = rest.find(':');
    std::size_t restarts = 0;
    std::uint64_t seed = 0;
    const auto r_text = rest.substr(0, colon);
    if (!detail::parse_number(std::string_view(r_text), restarts) || restarts == 0) {
      throw InvalidParameter("optimize:R needs a positive restart count, got '" + r_text + "'");
    }
    if (colon != std::string::npos && !detail::parse_number(std::string_view(rest).substr(colon + 1), seed)) {
      throw InvalidParameter("optimize:R:SEED needs an integer seed");
    }
    return AngleSource::optimize(restarts, seed);
  }
  throw InvalidParameter("unknown angle spec '" + spec + "' (sk-default, regular3, optimize:R[:SEED], file:PATH)");
}

// ---------------------------------------------------------------------------------------
// Campaign configuration.

struct ProblemSpec {
  std::string kind = "regular";  // regular | sk | files
  std::size_t n = 0;
  std::size_t d = 3;
  std::size_t count = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> paths;  // kind == files
};

struct VariantSpec {
  enum class Type { Original, Precondition, Ideal };
  std::string name;
  Type type = Type::Original;
  PrecondOptions options;  // Precondition only
};

struct SolverSpec {
  std::string name;  // sa | bm
  std::vector<std::size_t> checkpoints;
};

struct ReferenceSpec {
  std::size_t sweeps = 2000;
  std::size_t restarts = 4;
};

struct CampaignConfig {
  ProblemSpec problem;
  std::vector<VariantSpec> variants;
  std::vector<SolverSpec> solvers;
  std::size_t seeds_per_instance = 1;
  std::size_t timing_repeats = 1;
  std::size_t jobs = 1;
  ReferenceSpec reference;
  std::string output;

  void validate() const {
    if (problem.kind != "regular" && problem.kind != "sk" && problem.kind != "files") {
      throw InvalidParameter("problem kind must be regular, sk or files");
    }
    if (problem.kind == "files" ? problem.paths.empty() : (problem.n == 0 || problem.count == 0)) {
      throw InvalidParameter("problem grid is empty");
    }
    if (variants.empty()) throw InvalidParameter("campaign needs at least one variant");
    if (solvers.empty()) throw InvalidParameter("campaign needs at least one solver");
    for (const auto& v : variants) {
      if (v.name.empty() || v.name.find_first_of(",\"\n") != std::string::npos) {
        throw InvalidParameter("variant names must be non-empty and free of commas and quotes");
      }
      if (v.type == VariantSpec::Type::Precondition) v.options.validate();
    }
    for (const auto& s : solvers) {
      if (s.name != "sa" && s.name != "bm") throw InvalidParameter("unknown solver '" + s.name + "' (sa, bm)");
      if (s.checkpoints.empty()) throw InvalidParameter("solver '" + s.name + "' has an empty checkpoint grid");
      for (const auto c : s.checkpoints) {
        if (c == 0) throw InvalidParameter("checkpoints must be positive");
      }
    }
    if (seeds_per_instance == 0) throw InvalidParameter("seeds_per_instance must be positive");
    if (timing_repeats == 0) throw InvalidParameter("timing_repeats must be positive");
    if (reference.sweeps == 0 || reference.restarts == 0) throw InvalidParameter("reference runs must be positive");
  }
};

inline VariantSpec variant_from_json(const nlohmann::json& j) {
  VariantSpec v;
  v.name = j.value("name", std::string());
  const auto type = j.value("type", std::string());
  if (type == "ideal" || (type.empty() && v.name == "ideal")) {
    v.type = VariantSpec::Type::Ideal;
    return v;
  }
  if (type == "original" || (type.empty() && !j.contains("p"))) {
    v.type = VariantSpec::Type::Original;
    return v;
  }
  if (!type.empty() && type != "precondition") throw InvalidParameter("unknown variant type '" + type + "'");
  v.type = VariantSpec::Type::Precondition;
  auto& o = v.options;
  o.p = j.value("p", std::size_t{1});
  o.engine = engine_from_string(j.value("engine", std::string("auto")));
  if (j.contains("angles") && j.at("angles").is_object()) {
    o.angle_source = AngleSource::provided(angles_from_json(j.at("angles")));
  } else {
    o.angle_source = parse_angle_source(j.value("angles", std::string("sk-default")), o.p);
  }
  if (j.contains("samples")) {
    o.sampling = SamplingSpec{j.at("samples").get<std::size_t>(), j.value("sample_seed", std::uint64_t{0})};
  }
  if (j.contains("noise_f")) o.noise_F = j.at("noise_f").get<double>();
  const auto cache = j.value("cache", nlohmann::json(true));
  if (cache.is_string()) {
    const auto c = cache.get<std::string>();
    if (c != "trees" && c != "isomorphism") throw InvalidParameter("cache must be true, false, 'trees' or 'isomorphism'");
    o.cache_trees_only = c == "trees";
  } else {
    o.use_cache = cache.get<bool>();
  }
  return v;
}

/// Parses the JSON manifest. Unknown keys are rejected so typos do not pass silently.
inline CampaignConfig campaign_from_json(const nlohmann::json& j) {
  auto reject_unknown = [](const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        throw InvalidParameter("unknown key '" + key + "' in " + where);
      }
    }
  };
  try {
    reject_unknown(j, {"problem", "variants", "solvers", "seeds_per_instance", "timing_repeats", "jobs", "reference",
                       "output"},
                   "campaign");
    CampaignConfig c;
    const auto& pj = j.at("problem");
    reject_unknown(pj, {"kind", "n", "d", "count", "seed", "paths"}, "problem");
    c.problem.kind = pj.value("kind", std::string("regular"));
    c.problem.n = pj.value("n", std::size_t{0});
    c.problem.d = pj.value("d", std::size_t{3});
    c.problem.count = pj.value("count", std::size_t{1});
    c.problem.seed = pj.value("seed", std::uint64_t{0});
    if (pj.contains("paths")) c.problem.paths = pj.at("paths").get<std::vector<std::string>>();
    for (const auto& vj : j.at("variants")) {
      reject_unknown(vj, {"name", "type", "p", "engine", "angles", "samples", "sample_seed", "noise_f", "cache"},
                     "variant");
      c.variants.push_back(variant_from_json(vj));
    }
    for (const auto& sj : j.at("solvers")) {
      reject_unknown(sj, {"name", "checkpoints"}, "solver");
      c.solvers.push_back({sj.at("name").get<std::string>(), sj.at("checkpoints").get<std::vector<std::size_t>>()});
    }
    c.seeds_per_instance = j.value("seeds_per_instance", std::size_t{1});
    c.timing_repeats = j.value("timing_repeats", std::size_t{1});
    c.jobs = j.value("jobs", std::size_t{1});
    if (j.contains("reference")) {
      reject_unknown(j.at("reference"), {"sweeps", "restarts"}, "reference");
      c.reference.sweeps = j.at("reference").value("sweeps", c.reference.sweeps);
      c.reference.restarts = j.at("reference").value("restarts", c.reference.restarts);
    }
    c.output = j.value("output", std::string());
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("campaign manifest: ") + e.what());
  }
}

inline CampaignConfig read_campaign(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open campaign manifest '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("campaign manifest '" + path.string() + "': " + e.what());
  }
  return campaign_from_json(j);
}

// ---------------------------------------------------------------------------------------
// Records.

/// One (instance, variant, solver, seed, n_iter) measurement. `objective` is the quality on
/// the original problem (cut value for max-cut kinds, Ising objective otherwise) and
/// alpha = objective / c_opt.
struct RunRecord {
  std::string instance_id;
  std::string kind;
  std::size_t n_vars = 0;
  std::size_t n_terms = 0;  // terms of the problem the solver ran on
  std::string variant;
  std::string p;            // "0" original, "inf" ideal
  std::string engine;
  std::string K;            // empty when exact
  std::string F;            // empty when noiseless
  std::string solver;
  std::size_t n_iter = 0;
  double objective = 0.0;
  double alpha = 0.0;
  double elapsed_s = 0.0;
  double precond_s = 0.0;
  std::uint64_t seed = 0;
};

inline const char* kCsvHeader =
    "instance_id,kind,n_vars,n_terms,variant,p,engine,K,F,solver,n_iter,objective,alpha,elapsed_s,precond_s,seed";

inline void write_records_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.instance_id << ',' << r.kind << ',' << r.n_vars << ',' << r.n_terms << ',' << r.variant << ',' << r.p
        << ',' << r.engine << ',' << r.K << ',' << r.F << ',' << r.solver << ',' << r.n_iter << ','
        << detail::format_double(r.objective) << ',' << detail::format_double(r.alpha) << ','
        << detail::format_double(r.elapsed_s) << ',' << detail::format_double(r.precond_s) << ',' << r.seed << '\n';
  }
}

inline void write_records_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  write_records_csv(records, out);
}

inline std::vector<RunRecord> read_records_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw FormatError("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw FormatError("unexpected CSV header", 1);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 16) throw FormatError("expected 16 columns, found " + std::to_string(f.size()), line_no);
    RunRecord r;
    r.instance_id = f[0];
    r.kind = f[1];
    r.variant = f[4];
    r.p = f[5];
    r.engine = f[6];
    r.K = f[7];
    r.F = f[8];
    r.solver = f[9];
    const bool ok = detail::parse_number(std::string_view(f[2]), r.n_vars) &&
                    detail::parse_number(std::string_view(f[3]), r.n_terms) &&
                    detail::parse_number(std::string_view(f[10]), r.n_iter) &&
                    detail::parse_number(std::string_view(f[11]), r.objective) &&
                    detail::parse_number(std::string_view(f[12]), r.alpha) &&
                    detail::parse_number(std::string_view(f[13]), r.elapsed_s) &&
                    detail::parse_number(std::string_view(f[14]), r.precond_s) &&
                    detail::parse_number(std::string_view(f[15]), r.seed);
    if (!ok) throw FormatError("non-numeric field in record", line_no);
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<RunRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  return read_records_csv(in);
}

// ---------------------------------------------------------------------------------------
// Campaign execution.

struct InstanceInfo {
  std::string id;
  std::size_t n_vars = 0;
  double c_opt = 0.0;
  std::string c_opt_source;  // brute-force | best-found
};

struct CampaignResult {
  std::vector<RunRecord> records;
  std::vector<InstanceInfo> instances;
};

namespace detail {

/// Larger is better for cut values, smaller for Ising objectives.
inline bool better_quality(bool maxcut, double a, double b) { return maxcut ? a > b : a < b; }

inline double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

struct PreparedVariant {
  std::optional<Problem> problem;  // empty for the original variant
  double precond_s = 0.0;
  std::string p = "0";
  std::string engine;
  std::string K;
  std::string F;
};

struct PreparedInstance {
  std::optional<Problem> original;
  InstanceInfo info;
  bool exact_optimum = false;
  SpinVector best_z;
  double best_quality = 0.0;
  std::vector<PreparedVariant> variants;
};

}  // namespace detail

/// Runs every (instance, variant, solver, seed) cell. Solver seeds depend on
/// (seed base, instance, solver, seed index, n_iter) but not on the variant, so variants are
/// compared under common random numbers. Record content other than timings is identical at
/// any parallel width.
inline CampaignResult run_campaign(const CampaignConfig& config) {
  config.validate();
  const auto& ps = config.problem;
  const std::size_t n_instances = ps.kind == "files" ? ps.paths.size() : ps.count;
  std::vector<detail::PreparedInstance> prepared(n_instances);

  parallel_for(n_instances, config.jobs, [&](std::size_t k) {
    auto& inst = prepared[k];
    std::string where = "instance " + (ps.kind == "files" ? ps.paths[k] : std::to_string(k));
    try {
      if (ps.kind == "regular") {
        inst.original = gen_random_regular(ps.n, ps.d, derive_seed(ps.seed, {1, k}));
      } else if (ps.kind == "sk") {
        inst.original = gen_sk(ps.n, derive_seed(ps.seed, {2, k}));
      } else {
        inst.original = read_problem(ps.paths[k]);
      }
      const Problem& W = *inst.original;
      const bool maxcut = is_maxcut_kind(W.kind());
      inst.info.id = ps.kind == "files" ? ps.paths[k] : ps.kind + "-" + std::to_string(ps.n) + "-" + std::to_string(k);
      inst.info.n_vars = W.n_vars();
      if (W.n_vars() <= kBruteForceCap) {
        const auto exact = brute_force(W);
        inst.best_z = exact.z;
        inst.best_quality = quality_value(W, exact.z);
        inst.exact_optimum = true;
        inst.info.c_opt_source = "brute-force";
      } else {
        for (std::size_t r = 0; r < config.reference.restarts; ++r) {
          const auto trace = simulated_annealing(W, config.reference.sweeps, derive_seed(ps.seed, {3, k, r}));
          const double q = quality_value(W, trace.best_z);
          if (r == 0 || detail::better_quality(maxcut, q, inst.best_quality)) {
            inst.best_quality = q;
            inst.best_z = trace.best_z;
          }
        }
        inst.info.c_opt_source = "best-found";
      }
      for (const auto& v : config.variants) {
        where = "instance " + inst.info.id + ", variant " + v.name;
        detail::PreparedVariant pv;
        if (v.type == VariantSpec::Type::Precondition) {
          PrecondReport report;
          const auto t0 = std::chrono::steady_clock::now();
          pv.problem = precondition(W, v.options, &report);
          pv.precond_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          pv.p = std::to_string(v.options.p);
          pv.engine = std::string(to_string(report.engine));
          if (v.options.sampling) pv.K = std::to_string(v.options.sampling->K);
          if (v.options.noise_F) pv.F = detail::format_double(*v.options.noise_F);
        } else if (v.type == VariantSpec::Type::Ideal) {
          const auto t0 = std::chrono::steady_clock::now();
          pv.problem = ideal_preconditioner(inst.best_z);
          pv.precond_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          pv.p = "inf";
          pv.engine = "ideal";
        } else {
          pv.engine = "none";
        }
        inst.variants.push_back(std::move(pv));
      }
    } catch (const Error& e) {
      throw CampaignError(where + ": " + e.what());
    }
  });

  struct Cell {
    std::size_t instance;
    std::size_t variant;
    std::size_t solver;
    std::size_t seed_index;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < n_instances; ++k) {
    for (std::size_t v = 0; v < config.variants.size(); ++v) {
      for (std::size_t s = 0; s < config.solvers.size(); ++s) {
        for (std::size_t r = 0; r < config.seeds_per_instance; ++r) cells.push_back({k, v, s, r});
      }
    }
  }
  std::vector<std::vector<RunRecord>> cell_records(cells.size());
  std::vector<std::vector<SpinVector>> cell_solutions(cells.size());

  parallel_for(cells.size(), config.jobs, [&](std::size_t c) {
    const auto& cell = cells[c];
    const auto& inst = prepared[cell.instance];
    const auto& pv = inst.variants[cell.variant];
    const auto& spec = config.solvers[cell.solver];
    const Problem& W = *inst.original;
    const Problem& target = pv.problem ? *pv.problem : W;
    auto grid = spec.checkpoints;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    auto make = [&](std::size_t n_iter, const SpinVector& z, double elapsed, std::uint64_t seed) {
      RunRecord r;
      r.instance_id = inst.info.id;
      r.kind = std::string(to_string(W.kind()));
      r.n_vars = W.n_vars();
      r.n_terms = target.n_terms();
      r.variant = config.variants[cell.variant].name;
      r.p = pv.p;
      r.engine = pv.engine;
      r.K = pv.K;
      r.F = pv.F;
      r.solver = spec.name;
      r.n_iter = n_iter;
      r.objective = quality_value(W, z);
      r.elapsed_s = elapsed;
      r.precond_s = pv.precond_s;
      r.seed = seed;
      return r;
    };
    try {
      if (spec.name == "sa") {
        // One independent anneal per grid point, each with schedule length M = n_iter.
        for (const auto n_iter : grid) {
          const auto seed = derive_seed(ps.seed, {4, cell.instance, cell.solver, cell.seed_index, n_iter});
          std::vector<double> times;
          SolveTrace trace;
          for (std::size_t rep = 0; rep < config.timing_repeats; ++rep) {
            trace = simulated_annealing(target, n_iter, seed);
            times.push_back(trace.checkpoints.back().elapsed_s);
          }
          cell_records[c].push_back(make(n_iter, trace.best_z, detail::median(times), seed));
          cell_solutions[c].push_back(trace.best_z);
        }
      } else {
        const auto seed = derive_seed(ps.seed, {5, cell.instance, cell.solver, cell.seed_index});
        std::vector<std::vector<double>> times(grid.size());
        SolveTrace trace;
        for (std::size_t rep = 0; rep < config.timing_repeats; ++rep) {
          trace = burer_monteiro(target, grid.back(), seed, grid);
          for (std::size_t g = 0; g < grid.size(); ++g) times[g].push_back(trace.checkpoints[g].elapsed_s);
        }
        for (std::size_t g = 0; g < grid.size(); ++g) {
          cell_records[c].push_back(make(grid[g], trace.checkpoints[g].z, detail::median(times[g]), seed));
          cell_solutions[c].push_back(trace.checkpoints[g].z);
        }
      }
    } catch (const Error& e) {
      throw CampaignError("instance " + inst.info.id + ", variant " + config.variants[cell.variant].name +
                          ", solver " + spec.name + ": " + e.what());
    }
  });

  // c_opt: exact when enumerable, otherwise the best quality seen anywhere for the instance.
  for (std::size_t c = 0; c < cells.size(); ++c) {
    auto& inst = prepared[cells[c].instance];
    if (inst.exact_optimum) continue;
    const bool maxcut = is_maxcut_kind(inst.original->kind());
    for (std::size_t k = 0; k < cell_records[c].size(); ++k) {
      if (detail::better_quality(maxcut, cell_records[c][k].objective, inst.best_quality)) {
        inst.best_quality = cell_records[c][k].objective;
        inst.best_z = cell_solutions[c][k];
      }
    }
  }
  CampaignResult result;
  for (auto& inst : prepared) {
    inst.info.c_opt = inst.best_quality;
    result.instances.push_back(inst.info);
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double c_opt = prepared[cells[c].instance].best_quality;
    for (auto& r : cell_records[c]) {
      r.alpha = c_opt == 0.0 ? 0.0 : r.objective / c_opt;
      result.records.push_back(std::move(r));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------------------
// Budget accounting.

struct BudgetRow {
  std::size_t n_vars = 0;
  std::string solver;
  std::string variant;
  double alpha_target = 0.0;
  std::optional<double> t_original;  // mean solver time at the first n_iter reaching the target
  std::optional<double> t_variant;
  std::optional<double> budget;      // t_original - t_variant
  double precond_s = 0.0;            // mean measured preconditioning time
  bool fits = false;
  bool unreachable = false;
};

/// Time to target: over records of one (N, solver, variant), average alpha and elapsed per
/// n_iter; the first n_iter (ascending) whose mean alpha reaches the target gives the time.
inline std::optional<double> time_to_target(const std::vector<RunRecord>& records, std::size_t n_vars,
                                            const std::string& solver, const std::string& variant,
                                            double alpha_target) {
  std::map<std::size_t, std::pair<double, double>> sums;  // n_iter -> (alpha sum, elapsed sum)
  std::map<std::size_t, std::size_t> counts;
  for (const auto& r : records) {
    if (r.n_vars != n_vars || r.solver != solver || r.variant != variant) continue;
    sums[r.n_iter].first += r.alpha;
    sums[r.n_iter].second += r.elapsed_s;
    ++counts[r.n_iter];
  }
  for (const auto& [n_iter, s] : sums) {
    const auto cnt = static_cast<double>(counts[n_iter]);
    if (s.first / cnt >= alpha_target) return s.second / cnt;
  }
  return std::nullopt;
}

/// One row per (N, solver, non-original variant). Budget = t_original - t_variant; the row
/// fits when the mean preconditioning time is within the budget.
inline std::vector<BudgetRow> budget_report(const std::vector<RunRecord>& records, double alpha_target,
                                            const std::string& original_variant = "original") {
  std::map<std::tuple<std::size_t, std::string, std::string>, std::pair<double, std::size_t>> groups;
  for (const auto& r : records) {
    if (r.variant == original_variant) continue;
    auto& g = groups[{r.n_vars, r.solver, r.variant}];
    g.first += r.precond_s;
    ++g.second;
  }
  std::vector<BudgetRow> rows;
  for (const auto& [key, agg] : groups) {
    const auto& [n_vars, solver, variant] = key;
    BudgetRow row;
    row.n_vars = n_vars;
    row.solver = solver;
    row.variant = variant;
    row.alpha_target = alpha_target;
    row.precond_s = agg.first / static_cast<double>(agg.second);
    row.t_original = time_to_target(records, n_vars, solver, original_variant, alpha_target);
    row.t_variant = time_to_target(records, n_vars, solver, variant, alpha_target);
    if (row.t_original && row.t_variant) {
      row.budget = *row.t_original - *row.t_variant;
      row.fits = row.precond_s <= *row.budget;
    } else {
      row.unreachable = true;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_budget_csv(const std::vector<BudgetRow>& rows, std::ostream& out) {
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); };
  out << "n_vars,solver,variant,alpha_target,t_original_s,t_variant_s,budget_s,precond_s,fits,unreachable\n";
  for (const auto& r : rows) {
    out << r.n_vars << ',' << r.solver << ',' << r.variant << ',' << detail::format_double(r.alpha_target) << ','
        << opt(r.t_original) << ',' << opt(r.t_variant) << ',' << opt(r.budget) << ','
        << detail::format_double(r.precond_s) << ',' << (r.fits ? "yes" : "no") << ','
        << (r.unreachable ? "yes" : "no") << '\n';
  }
}

}  // namespace qprecond
