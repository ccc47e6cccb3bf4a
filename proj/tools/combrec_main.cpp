// combrec: sparse recovery with non-negative and combined representations.
// Subcommands cover coherence/threshold reports, single-signal recovery,
// Monte-Carlo recovery experiments, phase transitions, saturation-noise
// image recovery and brute-force oracle checks.
//
// Conventions: results go to standard output (CSV or JSON, '.' decimal
// separator, 0-based indices); progress goes to standard error; every run
// writes its resolved configuration next to its outputs so it can be
// replayed.

#include <CLI11.hpp>
#include <json.hpp>

#include <combrec/bench.hpp>
#include <combrec/bounds.hpp>
#include <combrec/imaging.hpp>
#include <combrec/oracle.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir = ".";
  std::string config_path;
  json config;  // parsed --config contents, {} when absent
};

// Config-file fallback: a flag wins over the config key, which wins over
// the built-in default.
template <typename T>
void fall_back(const CLI::Option* opt, const json& cfg, const char* key, T& value) {
  if (opt != nullptr && opt->count() > 0) return;
  if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

void emit_config_echo(const GlobalOptions& g, const std::string& name,
                      json resolved) {
  resolved["seed"] = g.seed;
  resolved["threads"] = g.threads;
  resolved["out_dir"] = g.out_dir;
  fs::create_directories(g.out_dir);
  write_text_file(fs::path(g.out_dir) / (name + "_config.json"),
                  resolved.dump(2) + "\n");
}

combrec::CombinedDictionary load_dictionary(const std::string& dict_path,
                                            long split) {
  combrec::Matrix m = combrec::load_matrix_csv(dict_path);
  if (split < 0 || split > m.cols()) {
    throw std::runtime_error("--split out of range for dictionary with " +
                             std::to_string(m.cols()) + " columns");
  }
  return combrec::CombinedDictionary{
      combrec::Dictionary::from_columns(std::move(m)), split};
}

combrec::Vector load_signal(const std::string& path) {
  combrec::Matrix m = combrec::load_matrix_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw std::runtime_error("signal file must be a single row or column");
}

std::vector<combrec::Algorithm> parse_algorithms(const std::string& csv) {
  std::vector<combrec::Algorithm> algs;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) algs.push_back(combrec::algorithm_from_string(tok));
  }
  if (algs.empty()) throw std::runtime_error("no algorithms given");
  return algs;
}

std::vector<int> int_range(int lo, int hi, int step) {
  if (step < 1 || hi < lo) throw std::runtime_error("bad range");
  std::vector<int> out;
  for (int v = lo; v <= hi; v += step) out.push_back(v);
  return out;
}

std::string format_threshold_row(const combrec::ThresholdReport& r) {
  char buf[160];
  if (r.unbounded) {
    std::snprintf(buf, sizeof buf, "%-15s %8s %12s", to_string(r.algorithm).c_str(),
                  "inf", "inf");
  } else {
    std::snprintf(buf, sizeof buf, "%-15s %8ld %12.6g",
                  to_string(r.algorithm).c_str(), r.max_sg, r.raw_bound);
  }
  return buf;
}

void append_threshold_csv(std::string& csv, const combrec::ThresholdReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%ld,%.10g,%.6g,%.6g,%.6g,%ld,%ld\n",
                to_string(r.algorithm).c_str(), r.unbounded ? -1 : r.max_sg,
                r.raw_bound, r.inputs.mu_x, r.inputs.mu_d, r.inputs.mu_g, r.sx,
                r.sd);
  csv += buf;
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_coherence(const GlobalOptions& g, const std::string& dict_path,
                  long split) {
  auto dict = load_dictionary(dict_path, split >= 0 ? split : 0);
  std::printf("quantity,value\n");
  if (split >= 0) {
    auto prof = combrec::coherence_profile(dict);
    std::printf("mu_x,%.10g\nmu_d,%.10g\nmu_g,%.10g\nmu_m,%.10g\nsigma_x,%.10g\n",
                prof.mu_x, prof.mu_d, prof.mu_g, prof.mu_m, prof.sigma_x);
  } else {
    std::printf("mu,%.10g\n", combrec::coherence(dict.g));
    std::printf("sigma,%.10g\n", combrec::one_sided_coherence(dict.g.atoms()));
  }
  emit_config_echo(g, "coherence",
                   json{{"dict", dict_path}, {"split", split}});
  return 0;
}

int run_thresholds(const GlobalOptions& g, combrec::CoherenceProfile prof,
                   long sx, long sd, long s_max) {
  prof.mu_m = std::max({prof.mu_x, prof.mu_d, prof.mu_g});

  std::vector<combrec::ThresholdReport> rows;
  rows.push_back(combrec::threshold_nonneg(prof.mu_x));
  rows.push_back(combrec::threshold_comb_bp(prof, s_max));
  rows.push_back(combrec::threshold_comb_omp(prof));
  rows.push_back(combrec::threshold_full_rank(prof, s_max));
  if (sd >= 0) {
    try {
      rows.push_back(combrec::threshold_reduced_nn(sd, prof));
    } catch (const std::invalid_argument& e) {
      std::fprintf(stderr, "reduced-nn row skipped: %s\n", e.what());
    }
  }

  std::printf("%-15s %8s %12s\n", "algorithm", "max_sg", "raw_bound");
  for (const auto& r : rows) std::printf("%s\n", format_threshold_row(r).c_str());
  if (sx >= 0 && sd >= 0) {
    std::printf("full_rank_condition(Sx=%ld, Sd=%ld): %s\n", sx, sd,
                combrec::full_rank_condition(sx, sd, prof) ? "true" : "false");
    std::printf("comb_bp_condition(Sx=%ld, Sd=%ld): %s\n", sx, sd,
                combrec::comb_bp_condition(sx, sd, prof) ? "true" : "false");
  }

  std::string csv = "algorithm,max_sg,raw_bound,mu_x,mu_d,mu_g,sx,sd\n";
  for (const auto& r : rows) append_threshold_csv(csv, r);
  fs::create_directories(g.out_dir);
  write_text_file(fs::path(g.out_dir) / "thresholds.csv", csv);

  emit_config_echo(g, "thresholds",
                   json{{"mu_x", prof.mu_x},
                        {"mu_d", prof.mu_d},
                        {"mu_g", prof.mu_g},
                        {"sx", sx},
                        {"sd", sd},
                        {"s_max", s_max}});
  return 0;
}

int run_recover(const GlobalOptions& g, const std::string& dict_path, long split,
                const std::string& signal_path, const std::string& algorithm,
                double eps, int max_iters, bool constrained_update, bool debias) {
  auto dict = load_dictionary(dict_path, split);
  auto y = load_signal(signal_path);
  const auto alg = combrec::algorithm_from_string(algorithm);

  combrec::StoppingCriteria stop{max_iters, eps};
  combrec::PathSolverConfig cfg;
  cfg.residual_tol = eps;
  combrec::CombOmpOptions opts{constrained_update, debias};

  combrec::SparseSolution sol;
  switch (alg) {
    case combrec::Algorithm::Omp: sol = combrec::omp_solve(dict.g, y, stop); break;
    case combrec::Algorithm::NnOmp: sol = combrec::nn_omp_solve(dict.g, y, stop); break;
    case combrec::Algorithm::CombOmp: sol = combrec::comb_omp_solve(dict, y, stop, opts); break;
    case combrec::Algorithm::Bp: sol = combrec::bp_solve(dict.g, y, cfg); break;
    case combrec::Algorithm::NnBp: sol = combrec::nn_homotopy_solve(dict.g, y, cfg); break;
    case combrec::Algorithm::CombBp: sol = combrec::comb_bp_solve(dict, y, cfg); break;
  }

  std::printf("index,value,block\n");
  for (Eigen::Index i = 0; i < sol.delta.size(); ++i) {
    if (sol.delta[i] != 0.0) {
      std::printf("%ld,%.10g,%s\n", static_cast<long>(i), sol.delta[i],
                  i < dict.split ? "x" : "d");
    }
  }
  std::fprintf(stderr, "termination=%s residual=%.3e iterations=%d\n",
               to_string(sol.termination).c_str(), sol.residual_norm,
               sol.iterations);

  emit_config_echo(g, "recover",
                   json{{"dict", dict_path},
                        {"split", split},
                        {"signal", signal_path},
                        {"algorithm", algorithm},
                        {"eps", eps},
                        {"max_iters", max_iters},
                        {"constrained_update", constrained_update},
                        {"debias", debias}});
  return 0;
}

struct GridArgs {
  int m = 100, kx = 100, kd = 100;
  int sx_min = 1, sx_max = 1, sx_step = 1;
  int sd_min = 1, sd_max = 1, sd_step = 1;
  int trials = 100;
  std::string algorithms = "omp,comb-omp,bp,comb-bp";
  std::string coeff_model = "uniform";
  std::vector<double> snr_db;
};

int run_recovery_grid(const GlobalOptions& g, const GridArgs& a, bool noisy,
                      const char* name) {
  combrec::TrialSpec base;
  base.m = a.m;
  base.kx = a.kx;
  base.kd = a.kd;
  base.coeff_model = combrec::coeff_model_from_string(a.coeff_model);
  base.seed = g.seed;

  const auto algorithms = parse_algorithms(a.algorithms);
  const auto sx_range = int_range(a.sx_min, a.sx_max, a.sx_step);
  const auto sd_range = int_range(a.sd_min, a.sd_max, a.sd_step);

  std::vector<double> snrs = a.snr_db;
  if (noisy && snrs.empty()) snrs = {0.0, 5.0, 15.0, 25.0};
  if (!noisy) snrs = {};

  combrec::GridResult all;
  if (snrs.empty()) {
    all = combrec::run_grid(base, sx_range, sd_range, a.trials, algorithms,
                            g.threads);
  } else {
    for (double snr : snrs) {
      combrec::TrialSpec spec = base;
      spec.snr_db = snr;
      // Distinct noise levels share instances only up to the noise draw.
      auto part = combrec::run_grid(spec, sx_range, sd_range, a.trials,
                                    algorithms, g.threads);
      all.cells.insert(all.cells.end(), part.cells.begin(), part.cells.end());
    }
  }

  std::stringstream csv;
  combrec::write_grid_csv(all, csv);
  std::fputs(csv.str().c_str(), stdout);
  fs::create_directories(g.out_dir);
  write_text_file(fs::path(g.out_dir) / (std::string(name) + ".csv"), csv.str());

  emit_config_echo(g, name,
                   json{{"m", a.m},
                        {"kx", a.kx},
                        {"kd", a.kd},
                        {"sx_min", a.sx_min},
                        {"sx_max", a.sx_max},
                        {"sx_step", a.sx_step},
                        {"sd_min", a.sd_min},
                        {"sd_max", a.sd_max},
                        {"sd_step", a.sd_step},
                        {"trials", a.trials},
                        {"algorithms", a.algorithms},
                        {"coeff_model", a.coeff_model},
                        {"snr_db", snrs}});
  return 0;
}

int run_phase(const GlobalOptions& g, int kg, int kx, int m_min, int m_max,
              int m_step, double rho_min, double rho_max, double rho_step,
              int trials, const std::string& algorithms_csv) {
  const auto algorithms = parse_algorithms(algorithms_csv);
  const auto m_range = int_range(m_min, m_max, m_step);
  std::vector<double> rho_range;
  for (double r = rho_min; r <= rho_max + 1e-12; r += rho_step) {
    rho_range.push_back(r);
  }

  auto phase = combrec::run_phase_transition(kg, kx, m_range, rho_range, trials,
                                             algorithms, g.seed,
                                             combrec::CoeffModel::Uniform,
                                             g.threads);
  std::stringstream csv;
  combrec::write_phase_csv(phase, csv);
  std::fputs(csv.str().c_str(), stdout);

  std::stringstream contours;
  combrec::write_contour_csv(phase, contours);
  fs::create_directories(g.out_dir);
  write_text_file(fs::path(g.out_dir) / "phase_transition.csv", csv.str());
  write_text_file(fs::path(g.out_dir) / "phase_contours.csv", contours.str());

  emit_config_echo(g, "phase-transition",
                   json{{"kg", kg},
                        {"kx", kx},
                        {"m_min", m_min},
                        {"m_max", m_max},
                        {"m_step", m_step},
                        {"rho_min", rho_min},
                        {"rho_max", rho_max},
                        {"rho_step", rho_step},
                        {"trials", trials},
                        {"algorithms", algorithms_csv}});
  return 0;
}

int run_image(const GlobalOptions& g, const std::string& input,
              double saturation, const std::string& algorithm, double eps) {
  auto img = combrec::read_pgm(input);
  auto alg = combrec::algorithm_from_string(algorithm);

  auto sat = combrec::saturate(img, saturation, g.seed);
  auto rec = combrec::recover_image(sat.image, alg, eps, g.threads);

  fs::create_directories(g.out_dir);
  const fs::path out_pgm = fs::path(g.out_dir) / "recovered.pgm";
  const fs::path out_sat = fs::path(g.out_dir) / "corrupted.pgm";
  combrec::write_pgm(rec.image, out_pgm.string());
  combrec::write_pgm(sat.image, out_sat.string());

  const double p_corr = combrec::psnr(img, sat.image);
  const double p_rec = combrec::psnr(img, rec.image);
  json report{{"input", input},
              {"algorithm", algorithm},
              {"saturation", saturation},
              {"psnr_corrupted_db", p_corr},
              {"psnr_recovered_db", p_rec},
              {"stalled_patches", rec.stalled_patches},
              {"recovered_pgm", out_pgm.string()},
              {"corrupted_pgm", out_sat.string()}};
  std::printf("%s\n", report.dump(2).c_str());
  write_text_file(fs::path(g.out_dir) / "image_report.json", report.dump(2) + "\n");

  emit_config_echo(g, "image-recover",
                   json{{"input", input},
                        {"saturation", saturation},
                        {"algorithm", algorithm},
                        {"eps", eps}});
  return 0;
}

int run_oracle_check(const GlobalOptions& g, const std::string& dict_path,
                     long split, const std::string& signal_path, int s_max,
                     double tol) {
  auto dict = load_dictionary(dict_path, split);
  auto y = load_signal(signal_path);

  auto res = combrec::ml0_search(dict, y, s_max, tol, g.threads);
  auto support_of = [](const combrec::SparseSolution& sol) {
    std::vector<int> all = sol.support_x;
    all.insert(all.end(), sol.support_d.begin(), sol.support_d.end());
    std::sort(all.begin(), all.end());
    return all;
  };
  auto bp_support = [&](const combrec::Vector& delta) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < delta.size(); ++i) {
      if (std::abs(delta[i]) > 1e-7) s.push_back(static_cast<int>(i));
    }
    return s;
  };

  const auto want = support_of(res.solution);
  json verdict{{"ml0",
                {{"support", want},
                 {"size", want.size()},
                 {"unique", res.unique},
                 {"residual", res.solution.residual_norm}}}};

  auto greedy = combrec::comb_omp_solve(dict, y, {0, tol});
  verdict["comb_omp"] = {{"support", support_of(greedy)},
                         {"matches_ml0", support_of(greedy) == want}};
  combrec::PathSolverConfig cfg;
  cfg.residual_tol = tol;
  auto convex = combrec::comb_bp_solve(dict, y, cfg);
  verdict["comb_bp"] = {{"support", bp_support(convex.delta)},
                        {"matches_ml0", bp_support(convex.delta) == want}};

  std::printf("%s\n", verdict.dump(2).c_str());
  emit_config_echo(g, "oracle-check",
                   json{{"dict", dict_path},
                        {"split", split},
                        {"signal", signal_path},
                        {"s_max", s_max},
                        {"tol", tol}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse recovery with non-negative and combined representations"};
  app.require_subcommand(1);

  GlobalOptions g;
  auto* seed_opt = app.add_option("--seed", g.seed, "master RNG seed");
  auto* threads_opt =
      app.add_option("--threads", g.threads, "worker threads (0 = auto)");
  auto* outdir_opt = app.add_option("--out-dir", g.out_dir,
                                    "directory for result files and config echoes");
  app.add_option("--config", g.config_path, "JSON config file (flags override)");

  // coherence
  auto* c_cmd = app.add_subcommand("coherence", "coherence profile of a dictionary");
  std::string c_dict;
  long c_split = -1;
  auto* c_dict_opt = c_cmd->add_option("--dict", c_dict, "dictionary CSV")->required(false);
  auto* c_split_opt = c_cmd->add_option("--split", c_split,
                                        "columns in the non-negative block");

  // thresholds
  auto* t_cmd = app.add_subcommand("thresholds", "deterministic sparsity thresholds");
  combrec::CoherenceProfile t_prof;
  std::string t_dict;
  long t_split = 0, t_sx = -1, t_sd = -1, t_smax = 200;
  auto* t_mux = t_cmd->add_option("--mu-x", t_prof.mu_x, "coherence of the X block");
  auto* t_mud = t_cmd->add_option("--mu-d", t_prof.mu_d, "coherence of the D block");
  auto* t_mug = t_cmd->add_option("--mu-g", t_prof.mu_g, "cross-coherence");
  auto* t_dict_opt = t_cmd->add_option("--dict", t_dict, "dictionary CSV (alternative to --mu-*)");
  auto* t_split_opt = t_cmd->add_option("--split", t_split, "non-negative block size");
  auto* t_sx_opt = t_cmd->add_option("--sx", t_sx, "X-block sparsity for pair conditions");
  auto* t_sd_opt = t_cmd->add_option("--sd", t_sd, "D-block sparsity for pair conditions");
  auto* t_smax_opt = t_cmd->add_option("--s-max", t_smax, "search cap for split searches");

  // recover
  auto* r_cmd = app.add_subcommand("recover", "recover one signal from a dictionary");
  std::string r_dict, r_signal, r_alg = "comb-omp";
  long r_split = 0;
  double r_eps = 1e-6;
  int r_iters = 0;
  bool r_constrained = false, r_debias = false;
  auto* r_dict_opt = r_cmd->add_option("--dict", r_dict, "dictionary CSV");
  auto* r_split_opt = r_cmd->add_option("--split", r_split, "non-negative block size");
  auto* r_signal_opt = r_cmd->add_option("--signal", r_signal, "signal CSV");
  auto* r_alg_opt = r_cmd->add_option("--algorithm", r_alg,
                                      "omp|nn-omp|comb-omp|bp|nn-bp|comb-bp");
  auto* r_eps_opt = r_cmd->add_option("--eps", r_eps, "residual tolerance");
  auto* r_iters_opt = r_cmd->add_option("--max-iters", r_iters, "iteration cap (0 = M)");
  r_cmd->add_flag("--constrained-update", r_constrained,
                  "sign-constrained refit inside the greedy loop");
  r_cmd->add_flag("--debias", r_debias, "final sign-constrained refit");

  // exact-recovery / noisy-recovery
  GridArgs e_args;
  auto* e_cmd = app.add_subcommand("exact-recovery", "exact recovery probability grid");
  GridArgs n_args;
  auto* n_cmd = app.add_subcommand("noisy-recovery", "approximate recovery under additive noise");
  auto add_grid_options = [](CLI::App* cmd, GridArgs& a) {
    auto* om = cmd->add_option("--m", a.m, "measurements");
    auto* okx = cmd->add_option("--kx", a.kx, "non-negative atoms");
    auto* okd = cmd->add_option("--kd", a.kd, "general atoms");
    auto* o1 = cmd->add_option("--sx-min", a.sx_min);
    auto* o2 = cmd->add_option("--sx-max", a.sx_max);
    auto* o3 = cmd->add_option("--sx-step", a.sx_step);
    auto* o4 = cmd->add_option("--sd-min", a.sd_min);
    auto* o5 = cmd->add_option("--sd-max", a.sd_max);
    auto* o6 = cmd->add_option("--sd-step", a.sd_step);
    auto* ot = cmd->add_option("--trials", a.trials, "trials per cell");
    auto* oa = cmd->add_option("--algorithms", a.algorithms, "comma-separated list");
    auto* oc = cmd->add_option("--coeff-model", a.coeff_model, "uniform|signs");
    auto* os = cmd->add_option("--snr-db", a.snr_db, "additive-noise levels in dB");
    return std::function<void(const json&)>([=, &a](const json& cfg) {
      fall_back(om, cfg, "m", a.m);
      fall_back(okx, cfg, "kx", a.kx);
      fall_back(okd, cfg, "kd", a.kd);
      fall_back(o1, cfg, "sx_min", a.sx_min);
      fall_back(o2, cfg, "sx_max", a.sx_max);
      fall_back(o3, cfg, "sx_step", a.sx_step);
      fall_back(o4, cfg, "sd_min", a.sd_min);
      fall_back(o5, cfg, "sd_max", a.sd_max);
      fall_back(o6, cfg, "sd_step", a.sd_step);
      fall_back(ot, cfg, "trials", a.trials);
      fall_back(oa, cfg, "algorithms", a.algorithms);
      fall_back(oc, cfg, "coeff_model", a.coeff_model);
      fall_back(os, cfg, "snr_db", a.snr_db);
    });
  };
  auto apply_e_cfg = add_grid_options(e_cmd, e_args);
  auto apply_n_cfg = add_grid_options(n_cmd, n_args);

  // phase-transition
  auto* p_cmd = app.add_subcommand("phase-transition", "empirical phase transition diagram");
  int p_kg = 100, p_kx = 50, p_mmin = 10, p_mmax = 100, p_mstep = 10, p_trials = 100;
  double p_rmin = 0.05, p_rmax = 1.0, p_rstep = 0.05;
  std::string p_algs = "bp,comb-bp";
  p_cmd->add_option("--kg", p_kg);
  p_cmd->add_option("--kx", p_kx);
  p_cmd->add_option("--m-min", p_mmin);
  p_cmd->add_option("--m-max", p_mmax);
  p_cmd->add_option("--m-step", p_mstep);
  p_cmd->add_option("--rho-min", p_rmin);
  p_cmd->add_option("--rho-max", p_rmax);
  p_cmd->add_option("--rho-step", p_rstep);
  p_cmd->add_option("--trials", p_trials);
  p_cmd->add_option("--algorithms", p_algs);

  // image-recover
  auto* i_cmd = app.add_subcommand("image-recover", "saturation-noise image recovery");
  std::string i_input, i_alg = "comb-bp";
  double i_sat = 0.1, i_eps = 1e-6;
  auto* i_input_opt = i_cmd->add_option("--input", i_input, "clean 8-bit PGM (P5)");
  auto* i_sat_opt = i_cmd->add_option("--saturation", i_sat, "fraction of pixels driven to 255");
  auto* i_alg_opt = i_cmd->add_option("--algorithm", i_alg, "omp|comb-omp|bp|comb-bp");
  auto* i_eps_opt = i_cmd->add_option("--eps", i_eps, "per-patch residual tolerance");

  // oracle-check
  auto* o_cmd = app.add_subcommand("oracle-check", "brute-force verification of a recovery");
  std::string o_dict, o_signal;
  long o_split = 0;
  int o_smax = 3;
  double o_tol = 1e-6;
  auto* o_dict_opt = o_cmd->add_option("--dict", o_dict, "dictionary CSV");
  auto* o_split_opt = o_cmd->add_option("--split", o_split, "non-negative block size");
  auto* o_signal_opt = o_cmd->add_option("--signal", o_signal, "signal CSV");
  auto* o_smax_opt = o_cmd->add_option("--s-max", o_smax, "largest support size enumerated");
  auto* o_tol_opt = o_cmd->add_option("--tol", o_tol, "feasibility tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::stringstream usage;
    usage << app.help();
    std::fprintf(stderr, "%s\n%s", e.what(), usage.str().c_str());
    return 1;
  }

  try {
    if (!g.config_path.empty()) {
      std::ifstream f(g.config_path);
      if (!f) throw std::runtime_error("cannot open config " + g.config_path);
      f >> g.config;
      fall_back(seed_opt, g.config, "seed", g.seed);
      fall_back(threads_opt, g.config, "threads", g.threads);
      fall_back(outdir_opt, g.config, "out_dir", g.out_dir);
    }
    const json& cfg = g.config;

    if (*c_cmd) {
      fall_back(c_dict_opt, cfg, "dict", c_dict);
      fall_back(c_split_opt, cfg, "split", c_split);
      if (c_dict.empty()) throw std::runtime_error("coherence: --dict is required");
      return run_coherence(g, c_dict, c_split);
    }
    if (*t_cmd) {
      fall_back(t_mux, cfg, "mu_x", t_prof.mu_x);
      fall_back(t_mud, cfg, "mu_d", t_prof.mu_d);
      fall_back(t_mug, cfg, "mu_g", t_prof.mu_g);
      fall_back(t_dict_opt, cfg, "dict", t_dict);
      fall_back(t_split_opt, cfg, "split", t_split);
      fall_back(t_sx_opt, cfg, "sx", t_sx);
      fall_back(t_sd_opt, cfg, "sd", t_sd);
      fall_back(t_smax_opt, cfg, "s_max", t_smax);
      if (!t_dict.empty()) {
        auto dict = load_dictionary(t_dict, t_split);
        t_prof = combrec::coherence_profile(dict);
      }
      return run_thresholds(g, t_prof, t_sx, t_sd, t_smax);
    }
    if (*r_cmd) {
      fall_back(r_dict_opt, cfg, "dict", r_dict);
      fall_back(r_split_opt, cfg, "split", r_split);
      fall_back(r_signal_opt, cfg, "signal", r_signal);
      fall_back(r_alg_opt, cfg, "algorithm", r_alg);
      fall_back(r_eps_opt, cfg, "eps", r_eps);
      fall_back(r_iters_opt, cfg, "max_iters", r_iters);
      if (r_dict.empty() || r_signal.empty()) {
        throw std::runtime_error("recover: --dict and --signal are required");
      }
      return run_recover(g, r_dict, r_split, r_signal, r_alg, r_eps, r_iters,
                         r_constrained, r_debias);
    }
    if (*e_cmd) return run_recovery_grid(g, e_args, false, "exact_recovery");
    if (*n_cmd) return run_recovery_grid(g, n_args, true, "noisy_recovery");
    if (*p_cmd) {
      return run_phase(g, p_kg, p_kx, p_mmin, p_mmax, p_mstep, p_rmin, p_rmax,
                       p_rstep, p_trials, p_algs);
    }
    if (*i_cmd) {
      fall_back(i_input_opt, cfg, "input", i_input);
      fall_back(i_sat_opt, cfg, "saturation", i_sat);
      fall_back(i_alg_opt, cfg, "algorithm", i_alg);
      fall_back(i_eps_opt, cfg, "eps", i_eps);
      if (i_input.empty()) throw std::runtime_error("image-recover: --input is required");
      return run_image(g, i_input, i_sat, i_alg, i_eps);
    }
    if (*o_cmd) {
      fall_back(o_dict_opt, cfg, "dict", o_dict);
      fall_back(o_split_opt, cfg, "split", o_split);
      fall_back(o_signal_opt, cfg, "signal", o_signal);
      fall_back(o_smax_opt, cfg, "s_max", o_smax);
      fall_back(o_tol_opt, cfg, "tol", o_tol);
      if (o_dict.empty() || o_signal.empty()) {
        throw std::runtime_error("oracle-check: --dict and --signal are required");
      }
      return run_oracle_check(g, o_dict, o_split, o_signal, o_smax, o_tol);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
