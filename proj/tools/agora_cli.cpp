// Command-line surface: solve, verify, gen, and trace with stable JSON I/O.
//
// Exit codes: 0 success (solve: verified equilibrium; verify: equilibrium
// holds), 1 verify found violations, 2 parse or validation error, 3 the
// market has no equilibrium, 4 internal or verification failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "agora/errors.hpp"
#include "agora/generator.hpp"
#include "agora/io.hpp"
#include "agora/solver.hpp"
#include "agora/verify.hpp"

namespace {

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw agora::ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw agora::ValidationError("cannot write " + path);
  out << text;
}

struct SolveOptions {
  std::string input;
  std::string out;
  std::string trace_path;
  std::string mode = "fixed";
  std::string profile = "fast";
  long max_iters = -1;
};

int run_solve(const SolveOptions& opt) {
  agora::Instance inst = agora::parse_instance_json(read_input(opt.input));

  agora::SolverConfig config;
  config.mode = opt.mode == "exact" ? agora::SolverMode::kExact : agora::SolverMode::kFixed;
  std::string profile = opt.profile;
  if (const char* env = std::getenv("AD_SOLVER_PROFILE")) profile = env;
  if (profile != "paper" && profile != "fast")
    throw agora::ValidationError("profile must be 'paper' or 'fast'");
  config.profile = profile == "paper" ? agora::Profile::kPaper : agora::Profile::kFast;
  config.max_iterations = opt.max_iters;

  std::ofstream trace_file;
  if (!opt.trace_path.empty()) {
    trace_file.open(opt.trace_path);
    if (!trace_file) throw agora::ValidationError("cannot write " + opt.trace_path);
    config.trace_sink = [&trace_file](const agora::IterationRecord& rec) {
      trace_file << agora::iteration_record_to_json(rec) << "\n";
    };
  }

  agora::Solution sol = agora::solve(inst.market, config);
  write_output(opt.out, agora::solution_to_json(sol));
  return sol.verified ? 0 : 4;
}

int run_verify(const std::string& instance_path, const std::string& solution_path) {
  agora::Instance inst = agora::parse_instance_json(read_input(instance_path));
  agora::ParsedSolution sol = agora::parse_solution_json(read_input(solution_path));
  agora::EquilibriumReport report = agora::check_equilibrium(inst.market, sol.prices);
  std::cout << agora::report_to_json(report);
  return report.ok() ? 0 : 1;
}

struct GenOptions {
  int n = 3;
  long long umax = 10;
  std::uint64_t seed = 0;
  bool irreducible = false;
  std::string out;
};

int run_gen(const GenOptions& opt) {
  agora::Market m = agora::generate_market(opt.n, opt.umax, opt.seed, opt.irreducible);
  write_output(opt.out, agora::instance_to_json(m));
  return 0;
}

int run_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw agora::ValidationError("cannot open " + path);
  long total = 0, xmax = 0, balancing = 0;
  std::map<std::string, long> events;
  std::string last_l1;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw agora::ValidationError("trace: invalid record: " + line);
    ++total;
    if (j.value("kind", "") == "xmax")
      ++xmax;
    else
      ++balancing;
    ++events[j.value("event", "?")];
    last_l1 = j.value("l1_after", "");
  }
  std::cout << "iterations: " << total << "\n"
            << "  xmax:      " << xmax << "\n"
            << "  balancing: " << balancing << "\n";
  for (const auto& [ev, count] : events) std::cout << "  event " << ev << ": " << count << "\n";
  if (!last_l1.empty()) std::cout << "final surplus |r(B)|: " << last_l1 << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact equilibrium prices for linear exchange markets"};
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve = app.add_subcommand("solve", "compute equilibrium prices and allocations");
  solve->add_option("input", solve_opt.input, "instance file (JSON; '-' for stdin)")->required();
  solve->add_option("--out", solve_opt.out, "write the solution here instead of stdout");
  solve->add_option("--trace", solve_opt.trace_path, "write one JSON record per iteration");
  solve->add_option("--mode", solve_opt.mode, "exact|fixed (default fixed)")
      ->check(CLI::IsMember({"exact", "fixed"}));
  solve->add_option("--profile", solve_opt.profile,
                    "paper|fast; fast retries with paper constants on failure")
      ->check(CLI::IsMember({"paper", "fast"}));
  solve->add_option("--max-iters", solve_opt.max_iters, "iteration cap override");

  std::string verify_instance, verify_solution;
  CLI::App* verify = app.add_subcommand("verify", "check a solution against an instance");
  verify->add_option("instance", verify_instance, "instance file")->required();
  verify->add_option("solution", verify_solution, "solution file")->required();

  GenOptions gen_opt;
  CLI::App* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--n", gen_opt.n, "number of agents")->required();
  gen->add_option("--umax", gen_opt.umax, "maximum utility value")->required();
  gen->add_option("--seed", gen_opt.seed, "RNG seed (default 0)");
  gen->add_flag("--irreducible", gen_opt.irreducible, "resample until strongly connected");
  gen->add_option("--out", gen_opt.out, "output file (default stdout)");

  std::string trace_path;
  CLI::App* trace = app.add_subcommand("trace", "summarize an iteration trace");
  trace->add_option("trace", trace_path, "trace file written by solve --trace")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(solve)) return run_solve(solve_opt);
    if (app.got_subcommand(verify)) return run_verify(verify_instance, verify_solution);
    if (app.got_subcommand(gen)) return run_gen(gen_opt);
    if (app.got_subcommand(trace)) return run_trace(trace_path);
  } catch (const agora::NoEquilibriumError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const agora::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const agora::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 2;
}
