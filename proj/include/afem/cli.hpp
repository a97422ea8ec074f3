#pragma once

#include "afem/output.hpp"
#include "afem/mesh_io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <map>

namespace afem {

struct RunConfig {
  AfemConfig afem;
  std::string problem = "kellogg";
  std::string out_dir = "./out";
  bool verbose = false;
};

/// Bad command line; `message` is ready to print.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// --help was requested; what() holds the help text.
class HelpRequested : public Error {
 public:
  using Error::Error;
};

inline std::string valid_pairs_table() {
  return "valid method/recovery pairs:\n"
         "  conforming     rt | bdm\n"
         "  mixed          nd\n"
         "  nonconforming  rt-ne | bdm-nd\n";
}

inline RunConfig parse_cli(const std::vector<std::string>& args) {
  RunConfig cfg;
  CLI::App app{"Adaptive finite elements with recovery-based error estimators", "afem"};
  const std::map<std::string, Method> methods{
      {"conforming", Method::conforming}, {"mixed", Method::mixed}, {"nonconforming", Method::nonconforming}};
  const std::map<std::string, Recovery> recoveries{
      {"rt", Recovery::rt}, {"bdm", Recovery::bdm}, {"nd", Recovery::nd}, {"rt-ne", Recovery::rt_ne}, {"bdm-nd", Recovery::bdm_nd}};
  app.add_option("--problem", cfg.problem, "benchmark problem")
      ->check(CLI::IsMember({"kellogg", "affine", "smooth"}))
      ->capture_default_str();
  app.add_option("--method", cfg.afem.method, "discretization")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case).description(""))
      ->type_name("{conforming,mixed,nonconforming}")
      ->default_str("conforming");
  app.add_option("--recovery", cfg.afem.recovery, "recovered field family")
      ->transform(CLI::CheckedTransformer(recoveries, CLI::ignore_case).description(""))
      ->type_name("{rt,bdm,nd,rt-ne,bdm-nd}")
      ->default_str("rt");
  app.add_option("--theta", cfg.afem.theta, "Dörfler bulk parameter in (0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--max-dof", cfg.afem.max_dofs, "stop before a mesh exceeds this many dofs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--max-iter", cfg.afem.max_iterations, "iteration limit")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--c1", cfg.afem.c1, "flux weight of the nonconforming estimator in (0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--initial-n", cfg.afem.initial_n, "initial grid cells per side")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_flag("--uniform", cfg.afem.uniform, "refine every element (no marking)");
  app.add_flag("--verify", cfg.afem.verify_with_oracle, "check every recovery against the local least-squares oracle");
  app.add_flag("-v,--verbose", cfg.verbose, "print one line per iteration");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help() + "\n" + valid_pairs_table());
  } catch (const CLI::ParseError& e) {
    throw UsageError(std::string(e.what()) + "\nrun with --help for usage");
  }
  // Open intervals: the range validators above are closed.
  if (cfg.afem.theta <= 0.0 || cfg.afem.theta >= 1.0) throw UsageError("--theta must lie in (0,1)");
  if (cfg.afem.c1 <= 0.0 || cfg.afem.c1 >= 1.0) throw UsageError("--c1 must lie in (0,1)");
  if (!valid_pair(cfg.afem.method, cfg.afem.recovery))
    throw UsageError(std::string("recovery '") + to_string(cfg.afem.recovery) + "' is not available for method '" +
                     to_string(cfg.afem.method) + "'\n" + valid_pairs_table());
  return cfg;
}

inline RunConfig parse_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return parse_cli(args);
}

/// Runs the configured AFEM loop and writes history.csv, mesh.svg and mesh.txt
/// into cfg.out_dir. Returns the result for reporting.
inline AfemResult run_and_write(const RunConfig& cfg, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (!fs::is_directory(cfg.out_dir)) throw Error("cannot create output directory " + cfg.out_dir);
  const BenchmarkProblem pb = problem_by_name(cfg.problem);
  auto on_iter = [&](const Mesh&, const IterationRecord& r, const EstimateResult&) {
    if (!log) return;
    *log << "iter " << r.iter << "  dofs " << r.dofs << "  eta " << format_g(r.eta, 6);
    if (r.true_error) *log << "  err " << format_g(*r.true_error, 6) << "  eff " << format_g(r.effectivity.value_or(0.0), 6);
    *log << '\n';
  };
  AfemResult res = run_afem(cfg.afem, pb, on_iter);
  const fs::path dir(cfg.out_dir);
  write_history_csv(res.history, (dir / "history.csv").string());
  write_mesh_svg(res.mesh, (dir / "mesh.svg").string(), res.indicators.element);
  write_mesh_file(res.mesh, (dir / "mesh.txt").string());
  return res;
}

}  // namespace afem
