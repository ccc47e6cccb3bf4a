#include "combrec/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "combrec/rng.hpp"

namespace combrec {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Omp: return "omp";
    case Algorithm::NnOmp: return "nn-omp";
    case Algorithm::CombOmp: return "comb-omp";
    case Algorithm::Bp: return "bp";
    case Algorithm::NnBp: return "nn-bp";
    case Algorithm::CombBp: return "comb-bp";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "omp") return Algorithm::Omp;
  if (s == "nn-omp" || s == "nnomp") return Algorithm::NnOmp;
  if (s == "comb-omp" || s == "combomp") return Algorithm::CombOmp;
  if (s == "bp") return Algorithm::Bp;
  if (s == "nn-bp" || s == "nnbp") return Algorithm::NnBp;
  if (s == "comb-bp" || s == "combbp") return Algorithm::CombBp;
  throw std::invalid_argument("unknown algorithm: " + s);
}

std::string to_string(CoeffModel m) {
  return m == CoeffModel::Uniform ? "uniform" : "signs";
}

CoeffModel coeff_model_from_string(const std::string& s) {
  if (s == "uniform") return CoeffModel::Uniform;
  if (s == "signs") return CoeffModel::Signs;
  throw std::invalid_argument("unknown coefficient model: " + s);
}

double rre(const Vector& delta_hat, const Vector& delta_true) {
  if (delta_hat.size() != delta_true.size()) {
    throw std::invalid_argument("rre: length mismatch");
  }
  const double denom = delta_true.squaredNorm();
  if (denom == 0.0) {
    throw std::invalid_argument("rre: true coefficient vector is zero");
  }
  return (delta_hat - delta_true).squaredNorm() / denom;
}

PlantedInstance plant_instance(const TrialSpec& spec) {
  if (spec.m < 1 || spec.kx < 0 || spec.kd < 0 || spec.kx + spec.kd < 1) {
    throw std::invalid_argument("plant_instance: bad sizes");
  }
  if (spec.sx < 0 || spec.sx > spec.kx || spec.sd < 0 || spec.sd > spec.kd) {
    throw std::invalid_argument("plant_instance: sparsity exceeds block size");
  }
  Rng rng(spec.seed);

  const auto kg = spec.kx + spec.kd;
  Matrix g(spec.m, kg);
  for (Eigen::Index j = 0; j < kg; ++j) {
    for (Eigen::Index i = 0; i < spec.m; ++i) g(i, j) = rng.normal();
  }

  PlantedInstance inst;
  inst.g = CombinedDictionary{Dictionary::from_columns(std::move(g)), spec.kx};

  const auto xs = rng.sample_without_replacement(spec.kx, spec.sx);
  const auto ds = rng.sample_without_replacement(spec.kd, spec.sd);

  inst.delta_true = Vector::Zero(kg);
  for (int i : xs) {
    inst.delta_true[i] =
        spec.coeff_model == CoeffModel::Uniform ? rng.uniform01() : 1.0;
  }
  for (int i : ds) {
    inst.delta_true[spec.kx + i] = spec.coeff_model == CoeffModel::Uniform
                                       ? rng.uniform(-1.0, 1.0)
                                       : (rng.uniform01() < 0.5 ? -1.0 : 1.0);
  }

  inst.y = inst.g.g.atoms() * inst.delta_true;

  if (spec.snr_db) {
    Vector noise(spec.m);
    for (Eigen::Index i = 0; i < spec.m; ++i) noise[i] = rng.normal();
    const double signal = inst.y.norm();
    const double n = noise.norm();
    if (signal > 0.0 && n > 0.0) {
      noise *= signal * std::pow(10.0, -*spec.snr_db / 20.0) / n;
      inst.y += noise;
    }
  }
  return inst;
}

namespace {

SparseSolution dispatch(const TrialSpec& spec, const PlantedInstance& inst) {
  StoppingCriteria stop{spec.m, 1e-6};
  PathSolverConfig cfg;
  cfg.residual_tol = 1e-6;
  switch (spec.algorithm) {
    case Algorithm::Omp:
      return omp_solve(inst.g.g, inst.y, stop);
    case Algorithm::NnOmp:
      return nn_omp_solve(inst.g.g, inst.y, stop);
    case Algorithm::CombOmp:
      return comb_omp_solve(inst.g, inst.y, stop);
    case Algorithm::Bp:
      return bp_solve(inst.g.g, inst.y, cfg);
    case Algorithm::NnBp:
      return nn_homotopy_solve(inst.g.g, inst.y, cfg);
    case Algorithm::CombBp:
      return comb_bp_solve(inst.g, inst.y, cfg);
  }
  throw std::logic_error("dispatch: unreachable");
}

}  // namespace

TrialRecord run_trial(const TrialSpec& spec) {
  const PlantedInstance inst = plant_instance(spec);
  TrialRecord rec;
  rec.spec = spec;

  SparseSolution sol;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    sol = dispatch(spec, inst);
  } catch (const path_limit_error& e) {
    sol = e.partial_solution;
    sol.termination = Termination::Stalled;
  } catch (const std::exception&) {
    // A numerically degenerate instance scores as a failed trial rather
    // than aborting the whole experiment.
    sol.delta = Vector::Zero(inst.g.kg());
    sol.residual_norm = inst.y.norm();
    sol.termination = Termination::Stalled;
  }
  const auto t1 = std::chrono::steady_clock::now();

  rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.rre = rre(sol.delta, inst.delta_true);
  rec.exact = rec.rre < kExactRreCutoff;
  rec.termination = sol.termination;
  return rec;
}

namespace {

int resolve_threads(int threads) {
  if (threads > 0) return threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

struct CellAccumulator {
  long exact = 0;
  double rre_sum = 0.0;
  double ms_sum = 0.0;
};

}  // namespace

GridResult run_grid(const TrialSpec& base, const std::vector<int>& sx_range,
                    const std::vector<int>& sd_range, int trials,
                    const std::vector<Algorithm>& algorithms, int threads) {
  if (sx_range.empty() || sd_range.empty() || algorithms.empty() || trials < 1) {
    throw std::invalid_argument("run_grid: empty ranges");
  }
  threads = resolve_threads(threads);

  struct Task {
    int sx, sd, trial;
    std::size_t alg;
  };
  std::vector<Task> tasks;
  for (int sx : sx_range) {
    for (int sd : sd_range) {
      for (int t = 0; t < trials; ++t) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
          tasks.push_back(Task{sx, sd, t, a});
        }
      }
    }
  }

  std::vector<TrialRecord> records(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (threads == 1) {
    // Serial reference loop, kept as the comparison baseline for the
    // OpenMP path; results must agree record for record.
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Task& task = tasks[static_cast<std::size_t>(i)];
      TrialSpec spec = base;
      spec.sx = task.sx;
      spec.sd = task.sd;
      spec.algorithm = algorithms[task.alg];
      spec.seed = derive_seed(base.seed, task.sx, task.sd, task.trial);
      records[static_cast<std::size_t>(i)] = run_trial(spec);
    }
  } else {
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      const Task& task = tasks[static_cast<std::size_t>(i)];
      TrialSpec spec = base;
      spec.sx = task.sx;
      spec.sd = task.sd;
      spec.algorithm = algorithms[task.alg];
      spec.seed = derive_seed(base.seed, task.sx, task.sd, task.trial);
      records[static_cast<std::size_t>(i)] = run_trial(spec);
    }
  }

  // Fixed-order reduction so aggregates do not depend on the worker count.
  GridResult out;
  for (int sx : sx_range) {
    for (int sd : sd_range) {
      for (std::size_t a = 0; a < algorithms.size(); ++a) {
        CellAccumulator acc;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          const Task& task = tasks[i];
          if (task.sx != sx || task.sd != sd || task.alg != a) continue;
          const TrialRecord& rec = records[i];
          acc.exact += rec.exact ? 1 : 0;
          acc.rre_sum += rec.rre;
          acc.ms_sum += rec.wall_ms;
        }
        GridCell cell;
        cell.m = base.m;
        cell.kx = base.kx;
        cell.kd = base.kd;
        cell.sx = sx;
        cell.sd = sd;
        cell.coeff_model = base.coeff_model;
        cell.snr_db = base.snr_db;
        cell.algorithm = algorithms[a];
        cell.trials = trials;
        cell.p_exact = static_cast<double>(acc.exact) / trials;
        cell.mean_rre = acc.rre_sum / trials;
        cell.mean_ms = acc.ms_sum / trials;
        out.cells.push_back(cell);
      }
    }
  }
  return out;
}

PhaseResult run_phase_transition(int kg, int kx, const std::vector<int>& m_range,
                                 const std::vector<double>& rho_range, int trials,
                                 const std::vector<Algorithm>& algorithms,
                                 std::uint64_t master_seed, CoeffModel coeff_model,
                                 int threads) {
  if (kg < 1 || kx < 0 || kx > kg || m_range.empty() || rho_range.empty() ||
      trials < 1 || algorithms.empty()) {
    throw std::invalid_argument("run_phase_transition: bad arguments");
  }
  threads = resolve_threads(threads);
  const int kd = kg - kx;

  struct Task {
    std::size_t mi, ri, alg;
    int trial;
  };
  std::vector<Task> tasks;
  for (std::size_t mi = 0; mi < m_range.size(); ++mi) {
    for (std::size_t ri = 0; ri < rho_range.size(); ++ri) {
      for (int t = 0; t < trials; ++t) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
          tasks.push_back(Task{mi, ri, a, t});
        }
      }
    }
  }

  auto make_spec = [&](const Task& task) {
    const int m = m_range[task.mi];
    const double rho = rho_range[task.ri];
    int sg = static_cast<int>(std::llround(rho * m));
    sg = std::max(1, std::min(sg, kg));
    // tau drawn from the trial seed before the instance is planted, so all
    // algorithms see the same split.
    const std::uint64_t seed =
        derive_seed(master_seed, static_cast<std::uint64_t>(task.mi),
                    static_cast<std::uint64_t>(task.ri),
                    static_cast<std::uint64_t>(task.trial));
    Rng split_rng(mix_u64(seed));
    const double tau = split_rng.uniform01();
    int sx = static_cast<int>(std::floor(tau * sg));
    sx = std::min(sx, kx);
    int sd = sg - sx;
    if (sd > kd) {
      sd = kd;
      sx = std::min(sg - sd, kx);
    }
    TrialSpec spec;
    spec.m = m;
    spec.kx = kx;
    spec.kd = kd;
    spec.sx = sx;
    spec.sd = sd;
    spec.coeff_model = coeff_model;
    spec.algorithm = algorithms[task.alg];
    spec.seed = seed;
    return spec;
  };

  std::vector<TrialRecord> records(tasks.size());
  const auto count = static_cast<std::ptrdiff_t>(tasks.size());
  if (threads == 1) {
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      records[static_cast<std::size_t>(i)] =
          run_trial(make_spec(tasks[static_cast<std::size_t>(i)]));
    }
  } else {
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      records[static_cast<std::size_t>(i)] =
          run_trial(make_spec(tasks[static_cast<std::size_t>(i)]));
    }
  }

  PhaseResult out;
  out.kg = kg;
  out.kx = kx;
  for (std::size_t mi = 0; mi < m_range.size(); ++mi) {
    for (std::size_t ri = 0; ri < rho_range.size(); ++ri) {
      for (std::size_t a = 0; a < algorithms.size(); ++a) {
        CellAccumulator acc;
        for (std::size_t i = 0; i < tasks.size(); ++i) {
          const Task& task = tasks[i];
          if (task.mi != mi || task.ri != ri || task.alg != a) continue;
          acc.exact += records[i].exact ? 1 : 0;
          acc.rre_sum += records[i].rre;
          acc.ms_sum += records[i].wall_ms;
        }
        PhaseCell cell;
        cell.m = m_range[mi];
        cell.rho = rho_range[ri];
        cell.sg = std::max(
            1, std::min(static_cast<int>(std::llround(cell.rho * cell.m)), kg));
        cell.algorithm = algorithms[a];
        cell.trials = trials;
        cell.p_exact = static_cast<double>(acc.exact) / trials;
        cell.mean_rre = acc.rre_sum / trials;
        cell.mean_ms = acc.ms_sum / trials;
        out.cells.push_back(cell);
      }
    }
  }

  // Contours: per algorithm and M, pool cells sharing an Sg, walk Sg
  // upward and interpolate the first crossing below each level.
  const double levels[] = {0.25, 0.5, 0.75};
  for (std::size_t a = 0; a < algorithms.size(); ++a) {
    for (std::size_t mi = 0; mi < m_range.size(); ++mi) {
      std::vector<std::pair<int, std::pair<long, long>>> pooled;  // sg -> (exact, trials)
      for (const PhaseCell& cell : out.cells) {
        if (cell.algorithm != algorithms[a] || cell.m != m_range[mi]) continue;
        bool merged = false;
        for (auto& p : pooled) {
          if (p.first == cell.sg) {
            p.second.first += std::lround(cell.p_exact * cell.trials);
            p.second.second += cell.trials;
            merged = true;
            break;
          }
        }
        if (!merged) {
          pooled.push_back({cell.sg,
                            {std::lround(cell.p_exact * cell.trials), cell.trials}});
        }
      }
      std::sort(pooled.begin(), pooled.end(),
                [](const auto& x, const auto& y) { return x.first < y.first; });
      for (double level : levels) {
        PhaseContourPoint pt;
        pt.algorithm = algorithms[a];
        pt.level = level;
        pt.m = m_range[mi];
        double sg = 0.0;
        double prev_sg = 0.0;
        double prev_p = 1.0;  // trivially recoverable at Sg = 0
        bool crossed = false;
        for (const auto& p : pooled) {
          const double prob =
              static_cast<double>(p.second.first) / static_cast<double>(p.second.second);
          if (prob < level) {
            sg = prev_p <= prob
                     ? prev_sg
                     : prev_sg + (prev_p - level) * (p.first - prev_sg) /
                                     (prev_p - prob);
            crossed = true;
            break;
          }
          prev_sg = p.first;
          prev_p = prob;
        }
        if (!crossed) sg = prev_sg;
        pt.sg = sg;
        out.contours.push_back(pt);
      }
    }
  }
  return out;
}

namespace {

void print_double(std::ostream& os, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace

void write_grid_csv(const GridResult& grid, std::ostream& os) {
  os << "M,Kx,Kd,Sx,Sd,coeff_model,snr_db,algorithm,trials,p_exact,mean_rre,mean_ms\n";
  for (const GridCell& c : grid.cells) {
    os << c.m << "," << c.kx << "," << c.kd << "," << c.sx << "," << c.sd << ","
       << to_string(c.coeff_model) << ",";
    if (c.snr_db) print_double(os, *c.snr_db);
    os << "," << to_string(c.algorithm) << "," << c.trials << ",";
    print_double(os, c.p_exact);
    os << ",";
    print_double(os, c.mean_rre);
    os << ",";
    print_double(os, c.mean_ms);
    os << "\n";
  }
}

void write_phase_csv(const PhaseResult& phase, std::ostream& os) {
  os << "M,rho,Sg,algorithm,trials,p_exact,mean_rre,mean_ms\n";
  for (const PhaseCell& c : phase.cells) {
    os << c.m << ",";
    print_double(os, c.rho);
    os << "," << c.sg << "," << to_string(c.algorithm) << "," << c.trials << ",";
    print_double(os, c.p_exact);
    os << ",";
    print_double(os, c.mean_rre);
    os << ",";
    print_double(os, c.mean_ms);
    os << "\n";
  }
}

void write_contour_csv(const PhaseResult& phase, std::ostream& os) {
  os << "algorithm,level,M,Sg\n";
  for (const PhaseContourPoint& p : phase.contours) {
    os << to_string(p.algorithm) << ",";
    print_double(os, p.level);
    os << "," << p.m << ",";
    print_double(os, p.sg);
    os << "\n";
  }
}

}  // namespace combrec
