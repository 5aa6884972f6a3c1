#include "gdf/runner.hpp"

#include "gdf/config.hpp"
#include "gdf/diagnostics.hpp"
#include "gdf/io.hpp"
#include "gdf/potential.hpp"
#include "gdf/simulate.hpp"
#include "gdf/yosida.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <ostream>

namespace gdf {

namespace {

using nlohmann::ordered_json;

struct RunContext {
  ExperimentConfig cfg;
  SubMarkovGenerator generator;
  StateSpace space;
  std::string out_dir;
  std::string config_text;
  RunOptions opt;
  std::vector<std::string> outputs;

  std::uint64_t seed() const {
    if (opt.seed) return *opt.seed;
    if (cfg.seed) return *cfg.seed;
    throw ConfigError("this subcommand needs a seed ([mc] seed or --seed)");
  }

  void emit(const std::string& name, const std::string& content) {
    write_text_file(out_dir + "/" + name, content);
    outputs.push_back(name);
  }

  void finish(const std::string& subcommand) {
    ordered_json manifest;
    manifest["tool"] = "gdflab";
    manifest["version"] = "0.1.0";
    manifest["subcommand"] = subcommand;
    manifest["config_path"] = opt.config_path;
    char hash_hex[19];
    std::snprintf(hash_hex, sizeof(hash_hex), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_text)));
    manifest["config_fnv1a64"] = hash_hex;
    manifest["seed"] = opt.seed ? ordered_json(*opt.seed)
                                : (cfg.seed ? ordered_json(*cfg.seed) : ordered_json(nullptr));
    manifest["tol_scale"] = opt.tol_scale;
    manifest["tolerances"] = {{"excessivity", cfg.tol_excessivity},
                              {"reduite", cfg.tol_reduite},
                              {"capacity", cfg.tol_capacity}};
    manifest["outputs"] = outputs;
    write_text_file(out_dir + "/manifest.json", manifest.dump(2) + "\n");

    // Wall-clock data is segregated here so every other artifact is
    // byte-reproducible for a fixed seed.
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
    write_text_file(out_dir + "/run_info.txt",
                    "unix_time=" + std::to_string(secs) + "\nthreads=" + std::to_string(opt.threads) + "\n");
  }
};

RunContext make_context(const RunOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("missing --config PATH");
  RunContext ctx;
  ctx.opt = opt;
  try {
    ctx.config_text = read_text_file(opt.config_path);
  } catch (const std::runtime_error&) {
    throw ConfigError("cannot open config file", opt.config_path);
  }
  ctx.cfg = parse_config_file(opt.config_path);
  ctx.cfg.tol_excessivity *= opt.tol_scale;
  ctx.cfg.tol_reduite *= opt.tol_scale;
  ctx.cfg.tol_capacity *= opt.tol_scale;
  ctx.generator = ctx.cfg.build_generator();
  ctx.generator.validate();
  ctx.space = ctx.cfg.build_space(ctx.generator);
  ctx.out_dir = opt.out_dir.empty() ? ctx.cfg.out_dir : opt.out_dir;
  std::filesystem::create_directories(ctx.out_dir);
  return ctx;
}

std::vector<double> betas_or(const std::vector<double>& given, std::vector<double> fallback) {
  return given.empty() ? fallback : given;
}

// Reference observable for convergence studies: the order-1 potential of a
// ramp. A potential of a constant would itself be constant on conservative
// models and show no convergence signal.
Vector reference_observable(const SubMarkovGenerator& L) {
  Vector ramp(L.size());
  for (int i = 0; i < L.size(); ++i) ramp[i] = static_cast<double>(i + 1) / L.size();
  return resolvent(L, 1.0).matrix * ramp;
}

// ---------------------------------------------------------------------------

int cmd_capacity(RunContext& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  const auto& L = ctx.generator;
  const auto& sp = ctx.space;
  const std::uint64_t seed = ctx.seed();
  ReduiteOptions ropt;
  ropt.tol = cfg.tol_reduite;

  std::vector<std::pair<std::string, std::vector<int>>> named;
  for (const auto& s : cfg.sets) named.emplace_back(s.name, cfg.resolve_set(s, sp, L));
  for (std::size_t k = 0; k < cfg.useq.size(); ++k)
    named.emplace_back("useq:" + std::to_string(k), cfg.useq[k]);
  if (named.empty()) throw ConfigError("capacity: define at least one set in [sets] or [useq]");

  CsvWriter csv({"set_id", "size", "cap", "dual_lower_bound", "markov_margin"});
  std::uint64_t stream = 1;
  for (const auto& [name, U] : named) {
    const CapacityReport rep = capacity(U, sp, L, ropt);
    const double dual = capacity_dual_lower_bound(U, sp, L, 24, CounterRng::mix(seed) + stream++, ropt);
    if (dual > rep.value + cfg.tol_capacity)
      throw NumericalError("capacity-dual-bound", "dual value " + format_g17(dual) + " exceeds capacity " +
                                                      format_g17(rep.value) + " for set " + name);
    const MarkovInequality mi = capacity_markov_inequality(rep.e_U, 0.5, sp, L, cfg.tol_capacity, ropt);
    if (!mi.holds)
      throw NumericalError("capacity-markov-inequality", "violated for set " + name);
    csv.row({name, std::to_string(U.size()), format_g17(rep.value), format_g17(dual),
             format_g17(mi.rhs - mi.lhs)});
  }
  ctx.emit("capacity.csv", csv.str());
  ctx.finish("capacity");
  out << "capacity: " << named.size() << " sets -> " << ctx.out_dir << "/capacity.csv\n";
  return 0;
}

int cmd_yosida_converge(RunContext& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  const auto& L = ctx.generator;
  const auto& sp = ctx.space;
  const std::vector<double> betas = betas_or(cfg.beta_grid, dyadic_grid(0, 12));
  const std::vector<double> ts = cfg.t_list.empty() ? std::vector<double>{1.0} : cfg.t_list;

  const Vector f = reference_observable(L);

  for (std::size_t ti = 0; ti < ts.size(); ++ti) {
    const ConvergenceTable table = convergence_table(L, sp, f, ts[ti], betas);
    CsvWriter csv({"beta", "sup_error", "l2_error", "fitted_order"});
    std::string plot;
    for (std::size_t i = 0; i < table.betas.size(); ++i) {
      csv.row({format_g17(table.betas[i]), format_g17(table.sup_error[i]),
               format_g17(table.l2_error[i]), format_g17(table.fitted_order)});
      if (table.sup_error[i] > 0.0)
        plot += format_g17(std::log2(table.betas[i])) + " " + format_g17(std::log2(table.sup_error[i])) + "\n";
    }
    ctx.emit("yosida_converge_t" + std::to_string(ti) + ".csv", csv.str());
    ctx.emit("yosida_plot_t" + std::to_string(ti) + ".dat", plot);
    out << "yosida-converge: t=" << ts[ti] << " fitted order " << table.fitted_order << "\n";
  }
  ctx.finish("yosida-converge");
  return 0;
}

int cmd_simulate(RunContext& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  if (cfg.mc_paths <= 0 || !(cfg.mc_horizon > 0.0))
    throw ConfigError("simulate: [mc] paths and horizon are required");
  const std::uint64_t seed = ctx.seed();
  const double beta = betas_or(cfg.chain_betas, {4.0}).front();
  const int start = cfg.probe_states.empty() ? 0 : cfg.probe_states.front();
  if (start < 0 || start > ctx.generator.size())
    throw ConfigError("simulate: start state out of range");
  const YosidaApprox ya = yosida_generator(ctx.generator, beta);

  // Paths are generated per index from counter streams, so the dump is
  // identical for any thread count.
  std::vector<PathSample> paths(static_cast<std::size_t>(cfg.mc_paths));
  MCOptions mc{cfg.mc_paths, cfg.mc_horizon, seed, 0, ctx.opt.threads};
  const long n_blocks = (mc.n_paths + detail::kMcBlock - 1) / detail::kMcBlock;
  detail::run_blocks(n_blocks, mc.threads, [&](long bidx) {
    const long lo = bidx * detail::kMcBlock;
    const long hi = std::min(mc.n_paths, lo + detail::kMcBlock);
    for (long i = lo; i < hi; ++i) {
      CounterRng rng(seed, static_cast<std::uint64_t>(i));
      paths[static_cast<std::size_t>(i)] = sample_path(start, ya, cfg.mc_horizon, rng);
    }
  });

  std::string dump;
  dump += "# gdflab paths v1\n";
  dump += "# beta=" + format_g17(beta) + " horizon=" + format_g17(cfg.mc_horizon) +
          " start=" + std::to_string(start) + " seed=" + std::to_string(seed) +
          " paths=" + std::to_string(cfg.mc_paths) + "\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    dump += std::to_string(i) + " " + std::to_string(paths[i].jump_times.size()) + " |";
    for (double t : paths[i].jump_times) dump += " " + format_g17(t);
    dump += " |";
    for (int s : paths[i].states) dump += " " + std::to_string(s);
    dump += "\n";
  }
  ctx.emit("paths.txt", dump);
  ctx.finish("simulate");
  out << "simulate: " << cfg.mc_paths << " paths -> " << ctx.out_dir << "/paths.txt\n";
  return 0;
}

int cmd_exit_bound(RunContext& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  const auto& L = ctx.generator;
  const auto& sp = ctx.space;
  if (!cfg.useq_present) throw ConfigError("exit-bound: [useq] sequence is required");
  if (cfg.mc_paths <= 0 || !(cfg.mc_horizon > 0.0))
    throw ConfigError("exit-bound: [mc] paths and horizon are required");
  const std::uint64_t seed = ctx.seed();
  const std::vector<double> betas = betas_or(cfg.chain_betas, {2.0, 4.0, 8.0});
  for (double b : betas)
    if (b < 2.0) throw ConfigError("exit-bound: chain betas must be >= 2");
  std::vector<int> probes = cfg.probe_states.empty() ? std::vector<int>{0} : cfg.probe_states;
  for (int x : probes)
    if (x < 0 || x >= L.size()) throw ConfigError("exit-bound: probe state out of range");

  ModifiedSequenceOptions mopt;
  for (double a : cfg.alpha_grid)
    if (a >= 1.0) mopt.alpha_grid.push_back(a);
  for (double l : cfg.l_grid)
    if (l >= 1.0) mopt.l_grid.push_back(l);
  mopt.reduite_opt.tol = std::min(cfg.tol_reduite, 1e-11);
  mopt.invariant_tol = cfg.tol_capacity;
  const ModifiedExcessiveSequence seq = build_modified_sequence(cfg.useq, L, sp, mopt);

  // Deterministic 2-excessivity layer first.
  const std::vector<double> t2 = cfg.t2_grid.empty() ? dyadic_grid(-10, 1) : cfg.t2_grid;
  CsvWriter det({"n", "beta", "max_violation", "smallest_t_gap"});
  for (double beta : betas) {
    const YosidaApprox ya = yosida_generator(L, beta);
    for (std::size_t k = 0; k < seq.lifted.size(); ++k) {
      const TwoExcessiveReport rep = check_two_excessive(seq.lifted[k], ya, t2, cfg.tol_capacity);
      if (!rep.ok)
        throw NumericalError("two-excessive", "violated by " + format_g17(rep.max_violation) +
                                                  " at n=" + std::to_string(k) + " beta=" + format_g17(beta));
      det.row({std::to_string(k), format_g17(beta), format_g17(rep.max_violation),
               format_g17(rep.smallest_t_gap)});
    }
  }
  ctx.emit("two_excessive.csv", det.str());

  CsvWriter csv({"x", "n", "beta", "estimate", "std_error", "tail", "e_hat", "verdict"});
  bool all_ok = true;
  std::uint64_t cell = 0;
  for (int x : probes)
    for (std::size_t k = 0; k < seq.sets.size(); ++k)
      for (double beta : betas) {
        const YosidaApprox ya = yosida_generator(L, beta);
        MCOptions mc{cfg.mc_paths, cfg.mc_horizon, seed, (cell++) << 40, ctx.opt.threads};
        const ExitBound eb = mc_exit_bound(x, seq.sets[k], seq.lifted[k], ya, mc, cfg.tol_capacity);
        all_ok = all_ok && eb.verdict;
        csv.row({std::to_string(x), std::to_string(k), format_g17(beta), format_g17(eb.hit_mean),
                 format_g17(eb.combined.std_error), format_g17(eb.tail_mean), format_g17(eb.bound),
                 eb.verdict ? "true" : "false"});
      }
  ctx.emit("exit_bound.csv", csv.str());
  ctx.finish("exit-bound");
  out << "exit-bound: " << (all_ok ? "all verdicts true" : "VIOLATIONS found") << " -> " << ctx.out_dir
      << "/exit_bound.csv\n";
  if (!all_ok) throw NumericalError("exit-time-bound", "at least one probed cell violates the bound");
  return 0;
}

int cmd_report(RunContext& ctx, std::ostream& out) {
  const auto& cfg = ctx.cfg;
  const auto& L = ctx.generator;
  const auto& sp = ctx.space;
  if (cfg.mc_paths <= 0) throw ConfigError("report: [mc] paths is required");
  const std::uint64_t seed = ctx.seed();
  const std::vector<double> betas = betas_or(cfg.chain_betas, {1.0, 4.0, 16.0, 64.0, 256.0});
  const std::vector<double> ts = cfg.t_list.empty() ? std::vector<double>{0.5, 1.0} : cfg.t_list;
  const int x = cfg.probe_states.empty() ? 0 : cfg.probe_states.front();
  if (x < 0 || x >= L.size()) throw ConfigError("report: probe state out of range");

  const SeparatingFamily fam = build_separating_family(sp, L, L.size());
  const double horizon = std::max(cfg.mc_horizon, *std::max_element(ts.begin(), ts.end()));
  MCOptions mc{cfg.mc_paths, horizon, seed, 0, ctx.opt.threads};
  const ConvergenceReport probe = weak_convergence_probe(x, betas, ts, fam, L, sp, mc);

  const Vector f = reference_observable(L);
  const ConvergenceTable det = convergence_table(L, sp, f, ts.front(), betas);

  CsvWriter csv({"beta", "det_sup_error", "mc_discrepancy", "mc_sigma", "mean_jumps", "max_rho_jump"});
  std::string plot;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    csv.row({format_g17(betas[i]), format_g17(det.sup_error[i]), format_g17(probe.discrepancy[i]),
             format_g17(probe.sigma[i]), format_g17(probe.mean_jumps[i]),
             format_g17(probe.max_rho_jump[i])});
    if (probe.discrepancy[i] > 0.0)
      plot += format_g17(std::log2(betas[i])) + " " + format_g17(std::log2(probe.discrepancy[i])) + "\n";
  }
  ctx.emit("report.csv", csv.str());
  ctx.emit("report_plot.dat", plot);
  ctx.finish("report");
  out << "report: final/first discrepancy ratio "
      << format_g17(probe.discrepancy.back() / std::max(probe.discrepancy.front(), 1e-300)) << " -> "
      << ctx.out_dir << "/report.csv\n";
  return 0;
}

}  // namespace

int run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    if (opt.subcommand == "selftest") return run_selftest(out);
    RunContext ctx = make_context(opt);
    if (opt.subcommand == "capacity") return cmd_capacity(ctx, out);
    if (opt.subcommand == "yosida-converge") return cmd_yosida_converge(ctx, out);
    if (opt.subcommand == "simulate") return cmd_simulate(ctx, out);
    if (opt.subcommand == "exit-bound") return cmd_exit_bound(ctx, out);
    if (opt.subcommand == "report") return cmd_report(ctx, out);
    err << "unknown subcommand '" << opt.subcommand << "'\n";
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace gdf
