#include "lpjohn/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "lpjohn/serialization.hpp"

namespace lpjohn {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw InputError("cannot write " + path);
  f << text;
}

void write_document(const std::string& path, const ResultDocument& doc) {
  if (!path.empty()) write_text(path, to_json(doc).dump(2) + "\n");
}

std::vector<double> parse_p_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_p(item));
  }
  if (out.empty()) throw InputError("p list is empty");
  return out;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

int effective_resolution(int resolution, int dim) {
  return resolution > 0 ? resolution : default_resolution(dim);
}

// Runs body and maps exceptions to exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

// Grid potentials given by the user that fail the decay test are input errors.
LogConcaveFunction load_function(const std::string& path, Json* spec) {
  try {
    return function_from_file(path, spec);
  } catch (const NumericalError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void check_resolution(int resolution) {
  if (resolution != 0 && (resolution < 33 || resolution % 2 == 0)) {
    throw InputError("resolution must be an odd integer >= 33");
  }
}

}  // namespace

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    check_resolution(args.resolution);
    Json spec;
    const LogConcaveFunction f = load_function(args.input, &spec);
    const double p = parse_p(args.p);
    SolverOptions opts;
    opts.tol = args.tol;
    opts.resolution = args.resolution;
    const SolverResult r = solve_Ep(f, p, opts);

    ResultDocument doc;
    doc.command = "solve";
    doc.input_spec = spec;
    doc.outputs = to_json(r);
    doc.provenance.resolution = effective_resolution(args.resolution, f.dim());
    doc.provenance.seed = args.seed;
    doc.provenance.tolerances = {{"solver_tol", args.tol}};
    doc.provenance.wall_time_ms = elapsed_ms(start);
    write_document(args.out, doc);

    const auto ev = r.Q_bar.eigenvalues();
    out << "p=" << validation::format_p(p) << " Q_bar eigenvalues [";
    for (Eigen::Index i = 0; i < ev.size(); ++i) out << (i ? " " : "") << fmt(ev(i));
    out << "] delta_bar=" << fmt(r.delta_bar) << " mass=" << fmt(r.E_p.mass())
        << " residual=" << std::setprecision(3) << std::scientific << r.kkt_residual
        << std::defaultfloat << " iterations=" << r.iterations << "\n";
    if (!r.converged) {
      err << "solver did not reach tolerance " << args.tol << "\n";
      return kExitNumerical;
    }
    return kExitOk;
  });
}

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_resolution(args.resolution);
    const LogConcaveFunction f = load_function(args.input, nullptr);
    const std::vector<double> ps = parse_p_list(args.p_list);
    SolverOptions opts;
    opts.tol = args.tol;
    opts.resolution = args.resolution;
    std::ostringstream csv;
    csv << std::setprecision(17);
    csv << "p,mass,delta_bar,residual,iterations,status\n";
    bool partial = false;
    for (double p : ps) {
      csv << validation::format_p(p) << ',';
      try {
        const SolverResult r = solve_Ep(f, p, opts);
        csv << r.E_p.mass() << ',' << r.delta_bar << ',' << r.kkt_residual << ','
            << r.iterations << ',' << (r.converged ? "ok" : "not_converged") << '\n';
        partial |= !r.converged;
      } catch (const NumericalError& e) {
        csv << ",,,,failed\n";
        err << "p=" << validation::format_p(p) << ": " << e.what() << "\n";
        partial = true;
      }
    }
    if (args.out.empty()) {
      out << csv.str();
    } else {
      write_text(args.out, csv.str());
    }
    return partial ? kExitNumerical : kExitOk;
  });
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    check_resolution(args.resolution);
    validation::TestCorpus corpus;
    Json corpus_spec;
    if (args.corpus == "builtin") {
      corpus = validation::TestCorpus::builtin(args.seed);
      corpus_spec = "builtin";
    } else if (args.corpus == "gaussian") {
      corpus = validation::TestCorpus::gaussian_only();
      corpus_spec = "gaussian";
    } else if (std::filesystem::is_regular_file(args.corpus)) {
      corpus_spec = read_json_file(args.corpus);
      const Json& list = corpus_spec.contains("functions") ? corpus_spec["functions"] : Json();
      if (!list.is_array() || list.empty()) throw InputError("corpus file needs a \"functions\" list");
      corpus.p_ladder = validation::default_ladder();
      for (const auto& item : list) {
        if (!item.contains("name") || !item.contains("spec")) {
          throw InputError("corpus entries need \"name\" and \"spec\"");
        }
        const Json& spec = item["spec"];
        LogConcaveFunction f = [&] {
          try {
            return function_from_json(spec);
          } catch (const NumericalError& e) {
            throw InputError(item["name"].dump() + ": " + e.what());
          }
        }();
        corpus.functions.push_back({item["name"].get<std::string>(), std::move(f),
                                    spec.value("type", "") == "gaussian"});
      }
    } else {
      throw InputError("unknown corpus \"" + args.corpus + "\" (builtin, gaussian or a file)");
    }
    if (!args.p_ladder.empty()) corpus.p_ladder = parse_p_list(args.p_ladder);

    validation::SuiteOptions opts;
    opts.seed = args.seed;
    opts.resolution = args.resolution;
    opts.corrupt_solver = args.corrupt_solver;
    opts.include_difference_quotients = !args.skip_difference_quotients;
    const validation::SuiteReport report = validation::run_suite(corpus, opts);

    ResultDocument doc;
    doc.command = "validate";
    Json ladder = Json::array();
    for (double p : corpus.p_ladder) ladder.push_back(real_to_json(p));
    doc.input_spec = {{"corpus", corpus_spec}, {"p_ladder", ladder},
                      {"corrupt_solver", args.corrupt_solver}};
    doc.outputs = to_json(report);
    doc.provenance.resolution = effective_resolution(args.resolution, 2);
    doc.provenance.seed = args.seed;
    doc.provenance.tolerances = {{"identity", 1e-6},
                                 {"solver_fed", 1e-4},
                                 {"kkt", 1e-5},
                                 {"difference_quotient", 2e-2}};
    doc.provenance.wall_time_ms = elapsed_ms(start);
    write_document(args.out, doc);
    if (!args.csv.empty()) write_text(args.csv, validation::to_csv(report));

    out << report.passed << " passed, " << report.failed << " failed of "
        << report.records.size() << " records\n";
    for (const auto& r : report.records) {
      if (!r.pass) {
        out << "FAIL " << r.name << " " << r.function << " p=" << validation::format_p(r.p)
            << " lhs=" << fmt(r.lhs) << " rhs=" << fmt(r.rhs) << " margin=" << fmt(r.margin)
            << (r.diagnostic.empty() ? "" : " (" + r.diagnostic + ")") << "\n";
      }
    }
    return report.all_pass() ? kExitOk : kExitSuiteFailure;
  });
}

int cmd_variation(const VariationArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = Clock::now();
    check_resolution(args.resolution);
    Json fspec, gspec;
    const LogConcaveFunction f = load_function(args.f, &fspec);
    const LogConcaveFunction g = load_function(args.g, &gspec);
    if (f.dim() != g.dim()) throw InputError("f and g have different dimensions");
    const double p = parse_p(args.p);
    const VariationReport r = lp_first_variation(f, g, p, args.resolution);

    ResultDocument doc;
    doc.command = "variation";
    doc.input_spec = {{"f", fspec}, {"g", gspec}, {"p", real_to_json(p)}};
    doc.outputs = {{"report", to_json(r)}};

    out << "p=" << validation::format_p(p);
    if (r.delta_Jp) out << " delta_Jp=" << fmt(*r.delta_Jp);
    out << " normalized=" << fmt(r.normalized) << " cloud=" << r.cloud_size
        << " excluded_mass=" << fmt(r.excluded_mass) << "\n";
    if (!r.diagnostic.empty()) out << "diagnostic: " << r.diagnostic << "\n";

    if (args.oracle) {
      if (std::isinf(p)) {
        const SupRatio sr = sup_ratio_variation(f, g);
        const double gap = std::abs(r.normalized / sr.value - 1.0);
        doc.outputs["oracle"] = {{"sup_ratio", real_to_json(sr.value)},
                                 {"relative_gap", real_to_json(gap)}};
        out << "oracle sup_ratio=" << fmt(sr.value) << " relative_gap=" << fmt(gap) << "\n";
      } else {
        const double quotient =
            lp_first_variation_fd_extrapolated(f, g, p, 1e-2, args.resolution);
        const double gap = std::abs(quotient / *r.delta_Jp - 1.0);
        doc.outputs["oracle"] = {{"difference_quotient", real_to_json(quotient)},
                                 {"t", 1e-2},
                                 {"relative_gap", real_to_json(gap)}};
        out << "oracle difference_quotient=" << fmt(quotient) << " relative_gap=" << fmt(gap)
            << "\n";
      }
    }
    doc.provenance.resolution = effective_resolution(args.resolution, f.dim());
    doc.provenance.tolerances = {{"hf_floor", kHfFloor},
                                 {"excluded_mass_fraction", kExcludedMassFraction}};
    doc.provenance.wall_time_ms = elapsed_ms(start);
    write_document(args.out, doc);
    return kExitOk;
  });
}

}  // namespace lpjohn
