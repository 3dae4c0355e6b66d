// srcq: command-line driver for the ground-state solver and its diagnostics.
//
// Subcommands:
//   constants            special-constant table (optionally quadrature-verified)
//   check-nl             hypothesis suite for a nonlinearity family
//   solve                ground state for a config file
//   continuation         warm-started solves along a decreasing mu schedule
//   probe-nonexistence   fibering maxima of translated profiles
//   diagnose splitting   Brezis-Lieb cross terms of separated copies
//   oracle riesz         direct-sum vs FFT-kernel convolution comparison
//
// Exit codes: 0 success, 2 validation failure, 3 solver failure, 4 I/O failure.

#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srcq/diagnostics.hpp"
#include "srcq/io.hpp"
#include "srcq/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitIo = 4;

// CSV sink: a file when a path is given, stdout otherwise.
class CsvSink {
 public:
  explicit CsvSink(const std::string& path) : path_(path) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw srcq::io_error("cannot open '" + path_ + "' for writing");
    }
  }
  std::ostream& out() { return path_.empty() ? std::cout : file_; }
  void finish() {
    if (!path_.empty()) {
      file_.flush();
      if (!file_) throw srcq::io_error("write to '" + path_ + "' failed");
      std::cerr << "wrote " << path_ << "\n";
    }
  }

 private:
  std::string path_;
  std::ofstream file_;
};

std::vector<double> parse_number_list(const std::string& text,
                                      const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw srcq::usage_error(what + ": '" + piece + "' is not a number");
    }
  }
  if (out.empty()) throw srcq::usage_error(what + ": empty list");
  return out;
}

srcq::RunConfig load_config(const std::string& path) {
  srcq::RunConfig cfg = srcq::parse_config(path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  return cfg;
}

srcq::SolveOptions solve_options(const srcq::RunConfig& cfg) {
  srcq::SolveOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.grad_tol = cfg.grad_tol;
  opts.seed = cfg.seed;
  opts.restarts = cfg.restarts;
  opts.step_size = cfg.step_size;
  return opts;
}

// ---------------------------------------------------------------- constants

int run_constants(int dim_min, int dim_max, bool verify, double tol,
                  const std::string& out_path) {
  if (dim_min < 2 || dim_max < dim_min) {
    throw srcq::usage_error("constants: need 2 <= dim-min <= dim-max");
  }
  CsvSink sink(out_path);
  sink.out() << "N,c_n_half,hardy_sharp,mu_star,quad_rel_err\n";
  for (int n = dim_min; n <= dim_max; ++n) {
    double rel_err = std::numeric_limits<double>::quiet_NaN();
    if (verify) {
      auto rep = srcq::verify_c_n_half(n, tol);
      rel_err = rep.rel_error.value();
    }
    sink.out() << n << ',' << srcq::format_g17(srcq::c_n_half(n)) << ','
               << srcq::format_g17(srcq::hardy_sharp(n)) << ','
               << srcq::format_g17(srcq::mu_star(n)) << ','
               << srcq::format_g17(rel_err) << '\n';
  }
  sink.finish();
  return kExitOk;
}

// ---------------------------------------------------------------- check-nl

// spec syntax: power:<p>,<q> | log_power:<p>,<q> | piecewise:<p>,<q>,<M>
srcq::NonlinearitySpec parse_family(const std::string& text) {
  std::string name;
  std::vector<double> args;
  if (!srcq::detail::split_builtin(text, name, args)) {
    throw srcq::usage_error("check-nl: malformed spec '" + text + "'");
  }
  if (name == "power" && args.size() == 2) {
    return srcq::NonlinearitySpec::power(args[0], args[1]);
  }
  if (name == "log_power" && args.size() == 2) {
    return srcq::NonlinearitySpec::log_power(args[0], args[1]);
  }
  if (name == "piecewise" && args.size() == 3) {
    return srcq::NonlinearitySpec::piecewise(args[0], args[1], args[2]);
  }
  throw srcq::usage_error(
      "check-nl: spec must be power:<p>,<q> | log_power:<p>,<q> | "
      "piecewise:<p>,<q>,<M>; got '" + text + "'");
}

int run_check_nl(const std::string& spec_text, const std::string& range,
                 int samples, int dim, double alpha,
                 const std::string& out_path) {
  const auto colon = range.find(':');
  if (colon == std::string::npos) {
    throw srcq::usage_error("check-nl: range must be <lo>:<hi>");
  }
  double lo, hi;
  try {
    lo = std::stod(range.substr(0, colon));
    hi = std::stod(range.substr(colon + 1));
  } catch (const std::exception&) {
    throw srcq::usage_error("check-nl: range bounds are not numbers");
  }
  if (!(0.0 < lo && lo < hi) || samples < 16) {
    throw srcq::usage_error("check-nl: need 0 < lo < hi and samples >= 16");
  }
  auto spec = parse_family(spec_text);
  auto suite = srcq::run_hypothesis_suite(spec, alpha / dim, lo, hi, samples);

  CsvSink sink(out_path);
  sink.out() << "hypothesis,passed,witness,fitted_constant\n";
  auto row = [&sink](const srcq::HypothesisReport& rep) {
    sink.out() << rep.name << ',' << (rep.passed ? "pass" : "fail") << ','
               << srcq::format_g17(rep.witness) << ','
               << srcq::format_g17(rep.fitted_constant) << '\n';
  };
  row(suite.f1);
  row(suite.f2);
  row(suite.f3);
  row(suite.f4);
  row(suite.arq);
  // F >= 0 and the (F-eps) constant, directly from the scalar core
  const auto pts = srcq::log_samples(spec, lo, hi, samples);
  double fmin = 0.0, fmin_at = 0.0;
  for (double u : pts) {
    const double v = spec.F_core(u);
    if (v < fmin) {
      fmin = v;
      fmin_at = u;
    }
  }
  sink.out() << "F_nonneg," << (fmin >= 0.0 ? "pass" : "fail") << ','
             << srcq::format_g17(fmin_at) << ',' << srcq::format_g17(fmin) << '\n';
  const double c_eps = srcq::feps_constants(
      [&spec](double u) { return spec.F_core(u); }, spec.p(), 1e-2, pts);
  sink.out() << "F_eps," << (std::isfinite(c_eps) ? "pass" : "fail") << ",0,"
             << srcq::format_g17(c_eps) << '\n';
  sink.finish();
  const bool ok = suite.all_passed() && fmin >= 0.0 && std::isfinite(c_eps);
  return ok ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------- solve

void write_iteration_log(const std::string& path,
                         const std::vector<srcq::IterationRecord>& log) {
  std::vector<std::vector<double>> rows;
  rows.reserve(log.size());
  for (const auto& rec : log) {
    rows.push_back({static_cast<double>(rec.iter), rec.energy, rec.grad_norm,
                    rec.nehari_residual, rec.t_star});
  }
  srcq::write_csv(path, "iter,energy,grad_norm,nehari_residual,t_star", rows);
}

int run_solve(const std::string& config_path, const std::string& out_path,
              const std::string& log_path) {
  srcq::RunConfig cfg = load_config(config_path);
  srcq::ModelParams mp = srcq::build_model(cfg);
  srcq::require_valid(mp);
  srcq::RieszPlan plan(mp.grid, mp.alpha);
  if (cfg.mu < 0.0) {
    std::cerr << "warning: mu < 0 lies in the nonexistence regime; any "
                 "critical point found is an artifact of the finite box "
                 "(the escaping-translate signature is exhibited by "
                 "`srcq probe-nonexistence`)\n";
  }
  try {
    auto res = srcq::ground_state(mp, plan, solve_options(cfg));
    srcq::write_field_srcq(out_path, res.field);
    write_iteration_log(log_path, res.log);
    std::cout << "energy = " << srcq::format_g17(res.energy) << "\n"
              << "grad_norm = " << srcq::format_g17(res.grad_norm) << "\n"
              << "nehari_residual = " << srcq::format_g17(res.nehari_residual)
              << "\n"
              << "iterations = " << res.iterations << "\n"
              << "seed = " << cfg.seed << "\n";
    std::cout << "restart_energies =";
    for (double e : res.restart_energies) std::cout << ' ' << srcq::format_g17(e);
    std::cout << "\n";
    std::cerr << "wrote " << out_path << " and " << log_path << "\n";
    return kExitOk;
  } catch (const srcq::stagnation_error& ex) {
    std::cerr << "solver stagnated: " << ex.what()
              << "\n  last energy " << srcq::format_g17(ex.last_energy)
              << ", last grad norm " << srcq::format_g17(ex.last_grad_norm) << "\n";
    if (cfg.mu < 0.0) {
      std::cerr << "  mu = " << srcq::format_g17(cfg.mu)
                << " < 0 lies in the nonexistence regime: the infimum is not "
                   "attained and descent chases escaping translates.\n"
                   "  Run `srcq probe-nonexistence` on this config to see the "
                   "decreasing fibering maxima.\n";
    }
    return kExitSolver;
  }
}

// ---------------------------------------------------------------- continuation

int run_continuation(const std::string& config_path, const std::string& schedule,
                     const std::string& out_path) {
  srcq::RunConfig cfg = load_config(config_path);
  srcq::ModelParams mp = srcq::build_model(cfg);
  srcq::require_valid(mp);
  srcq::RieszPlan plan(mp.grid, mp.alpha);
  auto mus = parse_number_list(schedule, "continuation: mu-schedule");
  auto res = srcq::continuation_mu(mp, plan, mus, solve_options(cfg));
  std::vector<std::vector<double>> rows;
  for (const auto& row : res.rows) {
    rows.push_back({row.mu, row.energy, static_cast<double>(cfg.seed)});
  }
  rows.push_back({0.0, res.c0, static_cast<double>(cfg.seed)});
  srcq::write_csv(out_path, "mu,energy,seed", rows);
  std::cout << "c0 = " << srcq::format_g17(res.c0) << "\n"
            << "final_gap = "
            << srcq::format_g17(res.c0 - res.rows.back().energy) << "\n";
  std::cerr << "wrote " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- probe

int run_probe(const std::string& config_path, const std::string& shifts_text,
              const std::string& out_path) {
  srcq::RunConfig cfg = load_config(config_path);
  srcq::ModelParams mp = srcq::build_model(cfg);
  srcq::require_valid(mp);
  srcq::RieszPlan plan(mp.grid, mp.alpha);
  auto mags = parse_number_list(shifts_text, "probe-nonexistence: shifts");
  std::vector<std::vector<long long>> shifts;
  for (double m : mags) {
    if (m != std::floor(m) || m < 0.0) {
      throw srcq::usage_error("probe-nonexistence: shifts must be non-negative "
                              "integers (lattice translations)");
    }
    std::vector<long long> z(cfg.dim, 0);
    z[0] = static_cast<long long>(m);
    shifts.push_back(z);
  }
  // reference profile: default Gaussian on the model's grid; the probe
  // compares its fibering maxima across translates
  srcq::Field base = srcq::gaussian_init(mp.grid);
  auto table = srcq::nonexistence_probe(mp, plan, base, shifts);
  std::vector<std::vector<double>> rows;
  for (const auto& row : table) {
    rows.push_back({row.shift_norm, row.sup_energy, static_cast<double>(cfg.seed)});
  }
  srcq::write_csv(out_path, "shift_norm,sup_energy,seed", rows);
  std::cerr << "wrote " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- diagnose

int run_diagnose_splitting(const std::string& config_path,
                           const std::string& seps_text,
                           const std::string& out_path) {
  srcq::RunConfig cfg = load_config(config_path);
  srcq::ModelParams mp = srcq::build_model(cfg);
  srcq::require_valid(mp);
  srcq::RieszPlan plan(mp.grid, mp.alpha);
  auto seps = parse_number_list(seps_text, "diagnose splitting: separations");
  auto res = srcq::ground_state(mp, plan, solve_options(cfg));
  std::vector<srcq::Field> parts = {res.field, res.field};
  auto bl = srcq::brezis_lieb_d(parts, seps, plan, mp.nonlinearity);
  auto es = srcq::energy_split(parts, seps, mp, plan);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < seps.size(); ++i) {
    rows.push_back({seps[i], bl.cross_terms[i], bl.decay_ratios[i],
                    es.cross_terms[i], static_cast<double>(cfg.seed)});
  }
  srcq::write_csv(out_path, "separation,hartree_cross,decay_ratio,energy_defect,seed",
                  rows);
  if (seps.size() >= 2) {
    std::cout << "fitted_slope = " << srcq::format_g17(srcq::splitting_slope(bl))
              << "\n"
              << "kernel_tail_slope = "
              << srcq::format_g17(mp.alpha - static_cast<double>(mp.dim)) << "\n";
  }
  std::cerr << "wrote " << out_path << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- oracle

int run_oracle_riesz(int dim, std::size_t points, double alpha, unsigned seed) {
  auto grid = srcq::make_grid(dim, points, 8.0);
  srcq::RieszPlan fast(grid, alpha, srcq::RieszMethod::fft_kernel);
  srcq::RieszPlan direct(grid, alpha, srcq::RieszMethod::direct);
  srcq::Field g(grid);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : g.values) v = dist(rng);
  srcq::Field a = fast.convolve(g);
  srcq::Field b = direct.convolve(g);
  double scale = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max(scale, std::abs(b[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  std::cout << "max_rel_diff = " << srcq::format_g17(diff / scale) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ground states of a semirelativistic Choquard equation on a "
               "periodic box"};
  app.require_subcommand(1);

  // constants
  int dim_min = 2, dim_max = 10;
  bool verify = false;
  double tol = 1e-8;
  std::string const_out;
  auto* sc_const = app.add_subcommand("constants", "special-constant table");
  sc_const->add_option("--dim-min", dim_min, "smallest dimension");
  sc_const->add_option("--dim-max", dim_max, "largest dimension");
  sc_const->add_flag("--verify", verify, "quadrature-verify 1/C(N,1/2)");
  sc_const->add_option("--tol", tol, "verification tolerance");
  sc_const->add_option("--out", const_out, "output CSV (default stdout)");

  // check-nl
  std::string nl_spec, nl_range = "1e-4:1e4", nl_out;
  int nl_samples = 4096, nl_dim = 2;
  double nl_alpha = 1.5;
  auto* sc_nl = app.add_subcommand("check-nl", "nonlinearity hypothesis suite");
  sc_nl->add_option("--spec", nl_spec,
                    "family: power:<p>,<q> | log_power:<p>,<q> | "
                    "piecewise:<p>,<q>,<M>")
      ->required();
  sc_nl->add_option("--range", nl_range, "sample range <lo>:<hi>");
  sc_nl->add_option("--samples", nl_samples, "sample count");
  sc_nl->add_option("--dim", nl_dim, "dimension N for the (F1) exponent");
  sc_nl->add_option("--alpha", nl_alpha, "Riesz exponent for the (F1) exponent");
  sc_nl->add_option("--out", nl_out, "output CSV (default stdout)");

  // solve
  std::string solve_cfg, solve_out = "result.srcq", solve_log = "iters.csv";
  auto* sc_solve = app.add_subcommand("solve", "compute a ground state");
  sc_solve->add_option("--config", solve_cfg, "config file")->required();
  sc_solve->add_option("--out", solve_out, "result field (SRCQ binary)");
  sc_solve->add_option("--log", solve_log, "iteration log CSV");

  // continuation
  std::string cont_cfg, cont_schedule, cont_out = "cont.csv";
  auto* sc_cont = app.add_subcommand("continuation",
                                     "solve along a decreasing mu schedule");
  sc_cont->add_option("--config", cont_cfg, "config file")->required();
  sc_cont->add_option("--mu-schedule", cont_schedule,
                      "comma-separated decreasing mu values")
      ->required();
  sc_cont->add_option("--out", cont_out, "output CSV");

  // probe-nonexistence
  std::string probe_cfg, probe_shifts, probe_out = "probe.csv";
  auto* sc_probe = app.add_subcommand(
      "probe-nonexistence", "fibering maxima of translated profiles");
  sc_probe->add_option("--config", probe_cfg, "config file")->required();
  sc_probe->add_option("--shifts", probe_shifts,
                       "comma-separated integer shift magnitudes")
      ->required();
  sc_probe->add_option("--out", probe_out, "output CSV");

  // diagnose splitting
  std::string diag_cfg, diag_seps, diag_out = "split.csv";
  auto* sc_diag = app.add_subcommand("diagnose", "solver diagnostics");
  auto* sc_split = sc_diag->add_subcommand(
      "splitting", "Brezis-Lieb cross terms of separated copies");
  sc_split->add_option("--config", diag_cfg, "config file")->required();
  sc_split->add_option("--separations", diag_seps,
                       "comma-separated increasing integer separations")
      ->required();
  sc_split->add_option("--out", diag_out, "output CSV");
  sc_diag->require_subcommand(1);

  // oracle riesz
  int oracle_dim = 2;
  std::size_t oracle_points = 16;
  double oracle_alpha = 1.5;
  unsigned oracle_seed = 0;
  auto* sc_oracle = app.add_subcommand("oracle", "slow reference paths");
  auto* sc_riesz = sc_oracle->add_subcommand(
      "riesz", "direct-sum vs FFT-kernel convolution on a random field");
  sc_riesz->add_option("--dim", oracle_dim, "dimension");
  sc_riesz->add_option("--points", oracle_points, "grid points per axis");
  sc_riesz->add_option("--alpha", oracle_alpha, "Riesz exponent");
  sc_riesz->add_option("--seed", oracle_seed, "RNG seed");
  sc_oracle->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*sc_const) return run_constants(dim_min, dim_max, verify, tol, const_out);
    if (*sc_nl) {
      return run_check_nl(nl_spec, nl_range, nl_samples, nl_dim, nl_alpha, nl_out);
    }
    if (*sc_solve) return run_solve(solve_cfg, solve_out, solve_log);
    if (*sc_cont) return run_continuation(cont_cfg, cont_schedule, cont_out);
    if (*sc_probe) return run_probe(probe_cfg, probe_shifts, probe_out);
    if (*sc_split) return run_diagnose_splitting(diag_cfg, diag_seps, diag_out);
    if (*sc_riesz) {
      return run_oracle_riesz(oracle_dim, oracle_points, oracle_alpha, oracle_seed);
    }
  } catch (const srcq::usage_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const srcq::domain_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const srcq::constraint_error& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitValidation;
  } catch (const srcq::io_error& ex) {
    std::cerr << "I/O error: " << ex.what() << "\n";
    return kExitIo;
  } catch (const srcq::stagnation_error& ex) {
    std::cerr << "solver stagnated: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const srcq::numeric_error& ex) {
    std::cerr << "numerical failure: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const srcq::projection_error& ex) {
    std::cerr << "projection failure: " << ex.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitSolver;
  }
  return kExitValidation;
}
