#include "afem/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  using namespace afem;
  RunConfig cfg;
  try {
    cfg = parse_cli(argc, argv);
  } catch (const HelpRequested& h) {
    std::cout << h.what();
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  try {
    const AfemResult res = run_and_write(cfg, cfg.verbose ? &std::cerr : nullptr);
    const auto& last = res.history.rows.back();
    std::cout << "problem " << cfg.problem << ", method " << to_string(cfg.afem.method) << ", recovery "
              << to_string(cfg.afem.recovery) << '\n'
              << "iterations " << res.history.rows.size() << ", final dofs " << last.dofs << ", eta " << format_g(last.eta, 6);
    if (last.true_error) {
      std::cout << ", error " << format_g(*last.true_error, 6) << ", effectivity " << format_g(last.effectivity.value_or(0.0), 6);
      if (res.history.rows.size() >= 2) std::cout << ", slope " << format_g(history_slope(res.history), 4);
    }
    std::cout << "\noutputs written to " << cfg.out_dir << '\n';
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
