#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using rsavg::cli::RunConfig;
  RunConfig cfg;
  CLI::App app{"Rankin-Selberg central values over ring class and Dirichlet character families"};
  app.set_config("--config");
  app.require_subcommand(1, 1);

  auto common = [&](CLI::App* c) {
    c->add_option("--seeds", cfg.seeds_path, "newform seed file (level, bound, then p a_p lines)");
    c->add_option("--curve", cfg.curve, "semistable curve a1,a2,a3,a4,a6; default 11a1");
    c->add_option("--disc", cfg.disc, "fundamental discriminant D < 0");
    c->add_option("--prime", cfg.prime, "odd prime p");
    c->add_option("--alpha", cfg.alpha, "A or A..B");
    c->add_option("--beta", cfg.beta, "A or A..B");
    c->add_option("--k", cfg.k, "0, 1 or both");
    c->add_option("--tol", cfg.tol, "truncation tolerance per value");
    c->add_option("--depletion", cfg.depletion, "top, own or both");
    c->add_option("--kernel", cfg.kernel, "degree2 (default) or degree4 archimedean weight");
    c->add_option("--out", cfg.out, "output file; stdout by default");
    c->add_option("--format", cfg.format, "csv or json");
    c->add_option("--threads", cfg.threads, "OpenMP threads; RSAVG_THREADS otherwise");
    c->add_option("--n-cap", cfg.n_cap, "largest coefficient table allowed");
    c->fallthrough();
  };

  auto* lvalue = app.add_subcommand("lvalue", "one central value or derivative");
  common(lvalue);
  lvalue->add_option("--rho", cfg.rho, "ring class character index");
  lvalue->add_option("--chi", cfg.chi, "Dirichlet character index");
  auto* havg = app.add_subcommand("havg", "harmonic family averages");
  common(havg);
  havg->add_option("--sym2-x", cfg.sym2_x, "smoothing length for L(1, Sym^2 f)");
  auto* gavg = app.add_subcommand("gavg", "Galois orbit averages");
  common(gavg);
  auto* table = app.add_subcommand("table", "grid of averages and relation residuals");
  common(table);
  auto* diag = app.add_subcommand("diag", "diagnostics");
  common(diag);
  diag->add_option("--kind", cfg.kind, "shortsum or difference");
  diag->add_option("--b", cfg.b, "shortsum shift");
  diag->add_option("--x-max", cfg.x_max, "shortsum range");
  diag->add_option("--eps", cfg.eps_weight, "difference weight epsilon");
  diag->add_option("--gamma", cfg.gamma_weight, "difference weight gamma");
  auto* verify = app.add_subcommand("verify", "self-checks");
  common(verify);
  verify->add_option("suite", cfg.suite, "afe, haf, mobius, cutoff or counting")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.threads == 0)
    if (const char* env = std::getenv("RSAVG_THREADS")) cfg.threads = std::atoi(env);
  if (cfg.format.empty()) cfg.format = cfg.command == "lvalue" ? "json" : "csv";

  if (cfg.out.empty()) return rsavg::cli::run(cfg, std::cout);
  std::ofstream out(cfg.out);
  if (!out) {
    std::cerr << "rsavg: cannot open " << cfg.out << '\n';
    return 2;
  }
  return rsavg::cli::run(cfg, out);
}
