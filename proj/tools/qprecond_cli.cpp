// qprecond command-line front end. Every subcommand is a thin wrapper over library calls.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qprecond/qprecond.hpp"

namespace {

using namespace qprecond;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

/// Opens `path` for writing, or returns stdout for "-" / empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw FormatError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

AngleSource angle_source_arg(const std::string& spec, std::size_t p) {
  if (!spec.starts_with("file:") && spec.find(':') == std::string::npos && std::filesystem::exists(spec)) {
    return AngleSource::provided(read_angles_file(spec));
  }
  return parse_angle_source(spec, p);
}

struct GenerateArgs {
  std::string kind;
  std::size_t n = 0;
  std::size_t d = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  const Problem problem = a.kind == "regular" ? gen_random_regular(a.n, a.d, a.seed) : gen_sk(a.n, a.seed);
  Output out(a.out);
  write_problem(problem, out.stream());
  return 0;
}

struct PrecondArgs {
  std::string in;
  std::string out;
  std::size_t p = 1;
  std::string engine = "auto";
  std::string angles = "sk-default";
  std::optional<std::size_t> samples;
  std::uint64_t sample_seed = 0;
  std::optional<double> noise_f;
  std::size_t qubit_cap = kDefaultQubitCap;
  bool no_cache = false;
  bool cache_trees = false;
  std::size_t jobs = 1;
  std::string angles_out;
};

int run_precondition(const PrecondArgs& a) {
  const Problem problem = read_problem(a.in);
  PrecondOptions opts;
  opts.p = a.p;
  opts.engine = engine_from_string(a.engine);
  opts.angle_source = angle_source_arg(a.angles, a.p);
  if (a.samples) opts.sampling = SamplingSpec{*a.samples, a.sample_seed};
  opts.noise_F = a.noise_f;
  opts.qubit_cap = a.qubit_cap;
  opts.use_cache = !a.no_cache;
  opts.cache_trees_only = a.cache_trees;
  opts.jobs = a.jobs;
  PrecondReport report;
  const Problem Z = precondition(problem, opts, &report);
  Output out(a.out);
  write_problem(Z, out.stream());
  if (!a.angles_out.empty()) write_angles_file(report.angles, a.angles_out);
  std::cerr << "engine " << to_string(report.engine) << ", terms " << Z.n_terms() << '\n';
  if (report.engine == Engine::Lightcone) {
    const auto& s = report.lightcone;
    std::cerr << "pairs " << s.pairs << ", classes " << s.classes << ", emulations " << s.emulations
              << ", max light-cone vertices " << s.max_vertices << '\n';
  }
  return 0;
}

struct SolveArgs {
  std::string in;
  std::string solver = "sa";
  std::size_t iters = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;
  std::string out;
  std::string z_out;
};

int run_solve(const SolveArgs& a) {
  const Problem problem = read_problem(a.in);
  SolveTrace trace;
  if (a.solver == "sa") {
    trace = simulated_annealing(problem, a.iters, a.seed, a.checkpoints);
  } else if (a.solver == "bm") {
    trace = burer_monteiro(problem, a.iters, a.seed, a.checkpoints);
  } else if (a.solver == "greedy") {
    Rng rng(a.seed);
    const auto start = std::chrono::steady_clock::now();
    trace.best_z = greedy_local_descent(problem, random_spins(problem.n_vars(), rng));
    trace.best_objective = evaluate_objective(problem, trace.best_z);
    trace.seed = a.seed;
    trace.checkpoints.push_back({1, trace.best_objective, detail::seconds_since(start), trace.best_z});
  } else {
    const auto start = std::chrono::steady_clock::now();
    const auto exact = brute_force(problem);
    trace.best_z = exact.z;
    trace.best_objective = exact.objective;
    trace.checkpoints.push_back({1, exact.objective, detail::seconds_since(start), exact.z});
  }
  std::cout << "objective " << detail::format_double(trace.best_objective) << '\n';
  std::cout << "cut " << detail::format_double(evaluate_cut(problem, trace.best_z)) << '\n';
  if (!a.out.empty()) {
    Output out(a.out);
    write_trace_csv(trace, out.stream());
  }
  if (!a.z_out.empty()) {
    Output out(a.z_out);
    write_spins(trace.best_z, out.stream());
  }
  return 0;
}

struct DiagnoseArgs {
  std::string in;
  std::string z;
  std::string zopt;
  std::vector<std::string> metrics{"terms"};
  std::string gap_form = "correlation";
};

int run_diagnose(const DiagnoseArgs& a) {
  const Problem problem = read_problem(a.in);
  std::optional<SpinVector> z;
  std::optional<SpinVector> zopt;
  if (!a.z.empty()) z = read_spins(a.z);
  if (!a.zopt.empty()) zopt = read_spins(a.zopt);
  auto need_zopt = [&]() -> const SpinVector& {
    if (!zopt) zopt = brute_force(problem).z;
    return *zopt;
  };
  for (const auto& m : a.metrics) {
    if (m == "terms") {
      std::cout << "terms " << count_nonzero_terms(problem) << '\n';
    } else if (m == "alpha") {
      if (!z) throw InvalidParameter("metric alpha needs --z");
      std::cout << "alpha " << detail::format_double(approximation_ratio(problem, *z, quality_value(problem, need_zopt())))
                << '\n';
    } else if (m == "frustration") {
      std::cout << "frustration " << detail::format_double(frustration_index(problem, need_zopt())) << '\n';
    } else if (m == "gap") {
      const auto form = a.gap_form == "problem" ? GapForm::Problem : GapForm::Correlation;
      std::cout << "gap " << detail::format_double(normalized_gap(problem, form)) << '\n';
    } else if (m == "overlap") {
      if (!z) throw InvalidParameter("metric overlap needs --z");
      std::cout << "overlap " << detail::format_double(overlap(*z, need_zopt())) << '\n';
    } else {
      throw InvalidParameter("unknown metric '" + m + "' (alpha, frustration, gap, overlap, terms)");
    }
  }
  return 0;
}

struct CampaignArgs {
  std::string config;
  std::string out;
  std::optional<std::size_t> jobs;
};

int run_campaign_cmd(const CampaignArgs& a) {
  auto config = read_campaign(a.config);
  if (a.jobs) config.jobs = *a.jobs;
  const auto result = run_campaign(config);
  Output out(a.out.empty() ? config.output : a.out);
  write_records_csv(result.records, out.stream());
  for (const auto& inst : result.instances) {
    std::cerr << inst.id << " c_opt " << detail::format_double(inst.c_opt) << " (" << inst.c_opt_source << ")\n";
  }
  return 0;
}

struct BudgetArgs {
  std::string in;
  double alpha_target = 0.99;
  std::string original = "original";
  std::string out;
};

int run_budget(const BudgetArgs& a) {
  const auto records = read_records_csv(a.in);
  Output out(a.out);
  write_budget_csv(budget_report(records, a.alpha_target, a.original), out.stream());
  return 0;
}

struct MpesArgs {
  std::string in;
  std::string out;
  std::string components;
};

int run_mpes(const MpesArgs& a) {
  const auto inst = load_mpes(std::filesystem::path(a.in));
  Output out(a.out);
  write_problem(inst.raw, out.stream());
  std::cerr << "raw " << inst.raw.n_vars() << " vertices, " << inst.raw.n_terms() << " terms";
  if (inst.parallel_lines > 0) std::cerr << " (" << inst.parallel_lines << " parallel lines merged)";
  std::cerr << '\n';
  if (inst.pruned.core) {
    std::cerr << "pruned " << inst.pruned.core->n_vars() << " vertices, " << inst.pruned.core->n_terms() << " terms\n";
  } else {
    std::cerr << "pruned core is empty\n";
  }
  const auto& comps = inst.pruned.map.components;
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::cerr << "component " << c << ": " << comps[c].problem.n_vars() << " vertices, " << comps[c].problem.n_terms()
              << " terms\n";
    if (!a.components.empty()) write_problem(comps[c].problem, a.components + std::to_string(c) + ".txt");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qprecond: QAOA correlation-matrix preconditioning for Ising and QUBO problems"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a random problem instance");
  generate->add_option("kind", gen.kind, "regular or sk")->required()->check(CLI::IsMember({"regular", "sk"}));
  generate->add_option("--n", gen.n, "Number of variables")->required();
  generate->add_option("--d", gen.d, "Degree for regular graphs")->capture_default_str();
  generate->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  generate->add_option("-o,--output", gen.out, "Output edge list (default stdout)");

  PrecondArgs pre;
  auto* precond = app.add_subcommand("precondition", "Replace a problem by its negated QAOA correlation matrix");
  precond->add_option("-i,--input", pre.in, "Input edge list")->required();
  precond->add_option("-o,--output", pre.out, "Output edge list (default stdout)");
  precond->add_option("--p", pre.p, "QAOA depth")->capture_default_str();
  precond->add_option("--engine", pre.engine, "auto, analytic, lightcone or full")
      ->capture_default_str()
      ->check(CLI::IsMember({"auto", "analytic", "lightcone", "full"}));
  precond->add_option("--angles", pre.angles,
                      "sk-default, regular3, optimize:R[:SEED], file:PATH or a path to an angle JSON file")
      ->capture_default_str();
  precond->add_option("--samples", pre.samples, "Estimate correlations from K bit strings");
  precond->add_option("--sample-seed", pre.sample_seed, "Seed for bit-string sampling")->capture_default_str();
  precond->add_option("--noise-f", pre.noise_f, "Global depolarizing fidelity F in [0, 1]");
  precond->add_option("--qubit-cap", pre.qubit_cap, "Largest circuit emulated")->capture_default_str();
  precond->add_flag("--no-cache", pre.no_cache, "Emulate every light cone instead of reusing isomorphic ones");
  precond->add_flag("--cache-trees-only", pre.cache_trees, "Reuse values only for tree-shaped light cones")
      ->excludes("--no-cache");
  precond->add_option("--jobs", pre.jobs, "Worker threads")->capture_default_str();
  precond->add_option("--angles-out", pre.angles_out, "Write the angles that were used as JSON");

  SolveArgs sol;
  auto* solve = app.add_subcommand("solve", "Run a classical solver");
  solve->add_option("-i,--input", sol.in, "Input edge list")->required();
  solve->add_option("--solver", sol.solver, "sa, bm, greedy or brute")
      ->capture_default_str()
      ->check(CLI::IsMember({"sa", "bm", "greedy", "brute"}));
  solve->add_option("--iters", sol.iters, "Sweeps (sa) or coordinate passes (bm)")->capture_default_str();
  solve->add_option("--seed", sol.seed, "Solver seed")->capture_default_str();
  solve->add_option("--checkpoints", sol.checkpoints, "Comma-separated iteration counts to record")->delimiter(',');
  solve->add_option("-o,--output", sol.out, "Trace CSV (n_iter,objective,elapsed_s)");
  solve->add_option("--z-out", sol.z_out, "Write the best spin vector");

  DiagnoseArgs diag;
  auto* diagnose = app.add_subcommand("diagnose", "Report metrics of a problem and candidate solutions");
  diagnose->add_option("-i,--input", diag.in, "Input edge list")->required();
  diagnose->add_option("--z", diag.z, "Candidate spin vector file");
  diagnose->add_option("--zopt", diag.zopt, "Optimal spin vector file (brute force when omitted)");
  diagnose->add_option("--metrics", diag.metrics, "Comma-separated: alpha, frustration, gap, overlap, terms")
      ->delimiter(',')
      ->capture_default_str();
  diagnose->add_option("--gap-form", diag.gap_form, "correlation (I - W) or problem (I + W)")
      ->capture_default_str()
      ->check(CLI::IsMember({"correlation", "problem"}));

  CampaignArgs camp;
  auto* campaign = app.add_subcommand("campaign", "Run a benchmark campaign from a JSON manifest");
  campaign->add_option("-c,--config", camp.config, "Campaign manifest")->required();
  campaign->add_option("-o,--output", camp.out, "Record CSV (defaults to the manifest's output, else stdout)");
  campaign->add_option("--jobs", camp.jobs, "Worker threads (overrides the manifest)");

  BudgetArgs bud;
  auto* budget = app.add_subcommand("budget", "Preconditioning time budget from campaign records");
  budget->add_option("-i,--input", bud.in, "Record CSV")->required();
  budget->add_option("--alpha-target", bud.alpha_target, "Target approximation ratio")->capture_default_str();
  budget->add_option("--original", bud.original, "Name of the unpreconditioned variant")->capture_default_str();
  budget->add_option("-o,--output", bud.out, "Budget CSV (default stdout)");

  MpesArgs mp;
  auto* mpes = app.add_subcommand("mpes-load", "Load a grid branch table as a max-cut problem");
  mpes->add_option("-i,--input", mp.in, "Branch table (bus_from, bus_to, R, X, ...)")->required();
  mpes->add_option("-o,--output", mp.out, "Raw problem edge list (default stdout)");
  mpes->add_option("--components", mp.components, "Write pruned components to PREFIX<k>.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*generate) return run_generate(gen);
    if (*precond) return run_precondition(pre);
    if (*solve) return run_solve(sol);
    if (*diagnose) return run_diagnose(diag);
    if (*campaign) return run_campaign_cmd(camp);
    if (*budget) return run_budget(bud);
    if (*mpes) return run_mpes(mp);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
