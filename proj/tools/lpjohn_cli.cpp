#include <iostream>

#include "CLI11.hpp"
#include "lpjohn/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"L_p John ellipsoids of log-concave functions (n <= 3)"};
  app.require_subcommand(1);

  lpjohn::SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve for the L_p John ellipsoid of one function");
  s->add_option("--input", solve.input, "function spec file")->required()->check(CLI::ExistingFile);
  s->add_option("--p", solve.p, "p >= 1, or inf")->required();
  s->add_option("--resolution", solve.resolution, "grid points per axis (odd, >= 33)");
  s->add_option("--tol", solve.tol, "solver tolerance");
  s->add_option("--out", solve.out, "result document path");
  s->add_option("--seed", solve.seed, "seed recorded in the provenance");

  lpjohn::SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "solve over a list of p and write a CSV table");
  w->add_option("--input", sweep.input, "function spec file")->required()->check(CLI::ExistingFile);
  w->add_option("--p-list", sweep.p_list, "comma separated p values, inf allowed")->required();
  w->add_option("--resolution", sweep.resolution, "grid points per axis (odd, >= 33)");
  w->add_option("--tol", sweep.tol, "solver tolerance");
  w->add_option("--out", sweep.out, "CSV path (default: stdout)");

  lpjohn::ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "run the inequality suite over a corpus");
  v->add_option("--corpus", validate.corpus, "builtin, gaussian, or a corpus file");
  v->add_option("--p-ladder", validate.p_ladder, "comma separated p values, inf allowed");
  v->add_option("--seed", validate.seed, "corpus and perturbation seed");
  v->add_option("--resolution", validate.resolution, "grid points per axis (odd, >= 33)");
  v->add_option("--out", validate.out, "suite report document path");
  v->add_option("--csv", validate.csv, "per-record CSV path");
  v->add_flag("--corrupt-solver", validate.corrupt_solver,
              "perturb every solver output before checking (negative control)");
  v->add_flag("--skip-difference-quotients", validate.skip_difference_quotients,
              "omit the finite-difference variation records");

  lpjohn::VariationArgs variation;
  auto* x = app.add_subcommand("variation", "evaluate the L_p first variation of f along g");
  x->add_option("--f", variation.f, "spec file for f")->required()->check(CLI::ExistingFile);
  x->add_option("--g", variation.g, "spec file for g")->required()->check(CLI::ExistingFile);
  x->add_option("--p", variation.p, "p >= 1, or inf")->required();
  x->add_option("--resolution", variation.resolution, "grid points per axis (odd, >= 33)");
  x->add_flag("--oracle", variation.oracle, "cross-check against the independent route");
  x->add_option("--out", variation.out, "result document path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lpjohn::kExitInvalidInput;
  }

  if (*s) return lpjohn::cmd_solve(solve, std::cout, std::cerr);
  if (*w) return lpjohn::cmd_sweep(sweep, std::cout, std::cerr);
  if (*v) return lpjohn::cmd_validate(validate, std::cout, std::cerr);
  return lpjohn::cmd_variation(variation, std::cout, std::cerr);
}
