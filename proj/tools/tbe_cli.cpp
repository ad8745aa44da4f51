#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tbe/dcop.hpp"
#include "tbe/errors.hpp"
#include "tbe/generator.hpp"
#include "tbe/io.hpp"
#include "tbe/oracle.hpp"
#include "tbe/report.hpp"
#include "tbe/solver.hpp"

namespace {

using namespace tbe;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitRefused = 3;
constexpr int kExitTimeout = 4;

struct EngineFlags {
  std::string ordering = "paper-degree";
  std::string backend = "seq";
  double budget_gib = 32.0;
  std::optional<double> timeout_sec;
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--ordering", f.ordering, "paper-degree, min-degree, degree-dfs or a permutation file")->capture_default_str();
  cmd->add_option("--backend", f.backend, "seq, par or par:k")->capture_default_str();
  cmd->add_option("--budget-gib", f.budget_gib, "memory budget for cost tables")->capture_default_str();
  cmd->add_option("--timeout-sec", f.timeout_sec, "abort after this many seconds");
}

std::size_t budget_rows(const EngineFlags& f) {
  return static_cast<std::size_t>(f.budget_gib * double(std::size_t{1} << 30) / sizeof(Cost));
}

SolverOptions solver_options(const EngineFlags& f) {
  SolverOptions o;
  o.backend = ExecutionBackend::parse(f.backend);
  o.memory_budget_rows = budget_rows(f);
  if (f.timeout_sec)
    o.deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                        std::chrono::duration<double>(*f.timeout_sec));
  return o;
}

Problem load_problem(const std::string& path) {
  return read_wcsp_file(path);
}

void print(const Json& j) { std::cout << j.dump(2) << '\n'; }

Json lift_assignment(Json record, const ConditionedProblem& cp, const Assignment& reduced) {
  record["assignment"] = cp.lift(reduced).values();
  record["evidence_variables"] = cp.evidence.assigned_count();
  return record;
}

int report_error(const std::exception& e, int code, Json details = Json::object()) {
  details["status"] = "error";
  details["message"] = e.what();
  std::cout << details.dump(2) << '\n';
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bucket elimination and mini-bucket solver for weighted constraint problems"};
  app.require_subcommand(1);

  // solve
  std::string solve_file, solve_algorithm = "be";
  std::optional<std::size_t> solve_z;
  EngineFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Solve a WCSP file with BE or MBE");
  solve->add_option("file", solve_file, "WCSP instance")->required()->check(CLI::ExistingFile);
  solve->add_option("--algorithm", solve_algorithm, "be or mbe")
      ->check(CLI::IsMember({"be", "mbe"}))
      ->capture_default_str();
  solve->add_option("--z", solve_z, "mini-bucket bound (mbe)");
  add_engine_flags(solve, solve_flags);

  // mpe
  std::string mpe_file, mpe_algorithm = "be";
  std::optional<std::string> mpe_evidence;
  std::optional<std::size_t> mpe_z;
  EngineFlags mpe_flags;
  auto* mpe = app.add_subcommand("mpe", "Most probable explanation of a UAI BAYES network");
  mpe->add_option("file", mpe_file, "UAI model")->required()->check(CLI::ExistingFile);
  mpe->add_option("--evidence", mpe_evidence, "evidence file")->check(CLI::ExistingFile);
  mpe->add_option("--algorithm", mpe_algorithm, "be or mbe")
      ->check(CLI::IsMember({"be", "mbe"}))
      ->capture_default_str();
  mpe->add_option("--z", mpe_z, "mini-bucket bound (mbe)");
  add_engine_flags(mpe, mpe_flags);

  // dpop / adpop
  std::string dcop_file;
  std::optional<std::size_t> dcop_z;
  double latency = 0.0;
  std::optional<std::string> log_path;
  EngineFlags dcop_flags;
  auto* dpop = app.add_subcommand("dpop", "Simulate DPOP with one agent per variable");
  auto* adpop = app.add_subcommand("adpop", "Simulate approximate DPOP with mini-buckets of size z");
  for (auto* cmd : {dpop, adpop}) {
    cmd->add_option("file", dcop_file, "WCSP instance")->required()->check(CLI::ExistingFile);
    cmd->add_option("--latency", latency, "message latency in clock units")->capture_default_str();
    cmd->add_option("--log", log_path, "write the message log as JSON lines");
    add_engine_flags(cmd, dcop_flags);
  }
  adpop->add_option("--z", dcop_z, "mini-bucket bound")->required();

  // gen
  std::string topology = "random", out_path, edge_rule = "formula";
  GeneratorConfig gen_config;
  auto* gen = app.add_subcommand("gen", "Generate a random WCSP instance");
  gen->add_option("--topology", topology, "random, scalefree or grid")
      ->check(CLI::IsMember({"random", "scalefree", "scale-free", "grid"}))
      ->capture_default_str();
  gen->add_option("--n", gen_config.n, "variables (grid: nodes per side)")->capture_default_str();
  gen->add_option("--d", gen_config.d, "domain size")->capture_default_str();
  gen->add_option("--p1", gen_config.p1, "edge density (random)")->capture_default_str();
  gen->add_option("--p2", gen_config.p2, "tightness: share of forbidden cells")->capture_default_str();
  gen->add_option("--seed", gen_config.seed, "random seed")->capture_default_str();
  gen->add_option("--edge-rule", edge_rule, "formula or half-density")
      ->check(CLI::IsMember({"formula", "half-density"}))
      ->capture_default_str();
  gen->add_option("--out", out_path, "output file (default stdout)");

  // oracle
  std::string oracle_file;
  std::optional<std::string> oracle_evidence;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive search (WCSP, or UAI when the file ends in .uai)");
  oracle->add_option("file", oracle_file, "instance")->required()->check(CLI::ExistingFile);
  oracle->add_option("--evidence", oracle_evidence, "evidence file (UAI)")->check(CLI::ExistingFile);

  // bench
  std::string suite_path, bench_format = "csv";
  std::optional<std::string> bench_output;
  auto* bench = app.add_subcommand("bench", "Run a benchmark suite");
  bench->add_option("--suite", suite_path, "suite JSON file")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}))->capture_default_str();
  bench->add_option("--output", bench_output, "report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (*solve) {
      const Problem p = load_problem(solve_file);
      const Ordering ord = resolve_ordering(p, solve_flags.ordering);
      const SolverOptions o = solver_options(solve_flags);
      if (solve_algorithm == "be") {
        print(solution_json("be", p, bucket_elimination(p, ord, o)));
      } else {
        if (!solve_z) throw CLI::RequiredError("--z");
        print(bounds_json("mbe", p, mini_bucket_elimination(p, ord, *solve_z, o)));
      }
    } else if (*mpe) {
      const UaiModel model = read_uai_file(mpe_file);
      for (const auto& w : model.warnings) std::cerr << "warning: " << w << '\n';
      Assignment ev(model.network.num_variables());
      if (mpe_evidence) ev = parse_evidence(read_text_file(*mpe_evidence), model.network.domains);
      const ConditionedProblem cp = condition_on_evidence(model.network, ev);
      const Ordering ord = resolve_ordering(cp.problem, mpe_flags.ordering);
      const SolverOptions o = solver_options(mpe_flags);
      if (mpe_algorithm == "be") {
        const Solution s = bucket_elimination(cp.problem, ord, o);
        print(lift_assignment(solution_json("be", cp.problem, s), cp, s.assignment));
      } else {
        if (!mpe_z) throw CLI::RequiredError("--z");
        const Bounds b = mini_bucket_elimination(cp.problem, ord, *mpe_z, o);
        print(lift_assignment(bounds_json("mbe", cp.problem, b), cp, b.assignment));
      }
    } else if (*dpop || *adpop) {
      const Problem p = load_problem(dcop_file);
      const Ordering ord = resolve_ordering(p, dcop_flags.ordering);
      DcopOptions o;
      o.backend = ExecutionBackend::parse(dcop_flags.backend);
      o.memory_budget_rows = budget_rows(dcop_flags);
      o.latency = latency;
      o.keep_log = log_path.has_value();
      Json j;
      DcopRun run;
      if (*dpop) {
        DpopResult r = run_dpop(p, ord, o);
        j = solution_json("dpop", p, r.solution);
        j["metrics"] = metrics_json(r.metrics);
        run = std::move(r.run);
      } else {
        AdpopResult r = run_adpop(p, ord, *dcop_z, o);
        j = bounds_json("adpop", p, r.bounds);
        j["metrics"] = metrics_json(r.metrics);
        run = std::move(r.run);
      }
      if (log_path) {
        std::string text;
        for (const auto& line : run.message_log) text += line + "\n";
        write_text_file(*log_path, text);
      }
      print(j);
    } else if (*gen) {
      gen_config.topology = parse_topology(topology);
      gen_config.edge_rule = edge_rule == "formula" ? EdgeRule::Formula : EdgeRule::HalfDensity;
      for (const auto& w : generate_graph(gen_config).warnings) std::cerr << "warning: " << w << '\n';
      const std::string text = write_wcsp(generate(gen_config));
      if (out_path.empty()) std::cout << text;
      else write_text_file(out_path, text);
    } else if (*oracle) {
      if (std::filesystem::path(oracle_file).extension() == ".uai") {
        const UaiModel model = read_uai_file(oracle_file);
        Assignment ev(model.network.num_variables());
        if (oracle_evidence) ev = parse_evidence(read_text_file(*oracle_evidence), model.network.domains);
        const ConditionedProblem cp = condition_on_evidence(model.network, ev);
        const Solution s = brute_force(cp.problem);
        print(lift_assignment(solution_json("oracle", cp.problem, s), cp, s.assignment));
      } else {
        const Problem p = load_problem(oracle_file);
        print(solution_json("oracle", p, brute_force(p)));
      }
    } else if (*bench) {
      const std::string base = std::filesystem::path(suite_path).parent_path().string();
      const BenchSuite suite = parse_bench_suite(read_text_file(suite_path), base.empty() ? "." : base);
      const auto rows = run_bench(suite);
      const std::string text = bench_format == "csv" ? bench_csv(rows) : bench_jsonl(rows);
      if (bench_output) write_text_file(*bench_output, text);
      else std::cout << text;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "error: missing " << e.what() << '\n';
    return kExitParse;
  } catch (const ParseError& e) {
    Json d;
    d["line"] = e.line();
    return report_error(e, kExitParse, d);
  } catch (const MemoryBudgetError& e) {
    Json d;
    d["reason"] = "oom";
    d["bucket_variable"] = e.bucket_variable();
    d["estimated_rows"] = e.estimated_rows();
    d["budget_rows"] = e.budget_rows();
    return report_error(e, kExitRefused, d);
  } catch (const BoundTooSmallError& e) {
    Json d;
    d["reason"] = "z-below-arity";
    d["z"] = e.z();
    d["arity"] = e.arity();
    return report_error(e, kExitRefused, d);
  } catch (const StateSpaceTooLargeError& e) {
    Json d;
    d["reason"] = "state-space";
    return report_error(e, kExitRefused, d);
  } catch (const TimeoutError& e) {
    Json d;
    d["reason"] = "timeout";
    return report_error(e, kExitTimeout, d);
  } catch (const PreconditionError& e) {
    return report_error(e, kExitParse);
  } catch (const std::exception& e) {
    return report_error(e, kExitFailure);
  }
  return kExitOk;
}
