#include "addyn/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "addyn/errors.hpp"
#include "addyn/pes.hpp"
#include "addyn/singularity.hpp"
#include "addyn/tss.hpp"

namespace addyn {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"simulate-ibm", "simulate-pes", "simulate-tss",
                                              "canonical",    "analyze",      "pip"};
  return names;
}

std::vector<Cluster> gap_clusters(const PopulationState& state, double gap) {
  std::vector<Cluster> out;
  const double K = state.K;
  double weighted = 0.0;
  long count = 0;
  for (const auto& [x, c] : state.atoms) {
    if (!out.empty() && x - out.back().hi <= gap) {
      out.back().hi = x;
    } else {
      if (!out.empty()) {
        out.back().mean = weighted / static_cast<double>(count);
        out.back().mass = static_cast<double>(count) / K;
      }
      out.push_back(Cluster{x, x, 0.0, 0.0});
      weighted = 0.0;
      count = 0;
    }
    weighted += x * static_cast<double>(c);
    count += c;
  }
  if (!out.empty()) {
    out.back().mean = weighted / static_cast<double>(count);
    out.back().mass = static_cast<double>(count) / K;
  }
  return out;
}

std::string output_header(const std::string& kind, const std::string& config_hash,
                          std::uint64_t seed) {
  return std::string("# addyn ") + kVersion + " format=" + kind + " config_hash=" +
         config_hash + " seed=" + std::to_string(seed);
}

bool scaling_advisory(const ModelSpec& model) {
  const double K = model.carrying_scale;
  return std::log(K) * K * model.mut_rate_scale >= 0.1;
}

void parallel_for(int n, int workers, const std::function<void(int)>& body) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) {
      body(i);
    }
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      }
    });
  }
  for (auto& t : pool) {
    t.join();
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

namespace {

struct Context {
  const RunConfig& cfg;
  ModelSpec model;
  std::uint64_t seed;
  int replicates;
  int workers;
  fs::path out_dir;
  std::string hash;

  json header(const std::string& kind) const {
    return json{{"version", kVersion}, {"format", kind}, {"config_hash", hash}, {"seed", seed}};
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(out_dir / name);
    if (!f) {
      throw Error("cannot write " + (out_dir / name).string());
    }
    return f;
  }
};

double positive(const RunConfig& cfg, const std::string& key, double fallback) {
  const double v = cfg.get_double(key, fallback);
  if (!(v > 0.0)) {
    throw ConfigError("key '" + key + "' must be positive");
  }
  return v;
}

int positive_int(const RunConfig& cfg, const std::string& key, long fallback) {
  const long v = cfg.get_int(key, fallback);
  if (v < 1) {
    throw ConfigError("key '" + key + "' must be a positive integer");
  }
  return static_cast<int>(v);
}

Trait trait_in_space(const Context& ctx, const std::string& key, double fallback) {
  const double x = ctx.cfg.get_double(key, fallback);
  if (!ctx.model.space.contains(x)) {
    throw ConfigError("key '" + key + "' lies outside the trait space");
  }
  return x;
}

std::vector<double> even_grid(double t_end, int samples) {
  std::vector<double> g;
  for (int k = 0; k <= samples; ++k) {
    g.push_back(t_end * k / samples);
  }
  return g;
}

Trait default_x_star(const ModelSpec& model, Trait near) {
  const auto found = find_singularities(model);
  if (found.empty()) {
    throw ConfigError("no evolutionary singularity found; set x_star explicitly");
  }
  const auto best = std::min_element(found.begin(), found.end(), [&](const auto& a, const auto& b) {
    return std::abs(a.x_star - near) < std::abs(b.x_star - near);
  });
  return best->x_star;
}

int cmd_simulate_ibm(const Context& ctx, std::ostream& out, std::ostream& err) {
  const auto& cfg = ctx.cfg;
  const double t_end = positive(cfg, "simulate-ibm.t_end", 500.0);
  const int snapshots = positive_int(cfg, "simulate-ibm.snapshots", 500);
  const Trait x0 = trait_in_space(ctx, "simulate-ibm.initial_trait", -1.0);
  const long n0 = cfg.get_int("simulate-ibm.initial_count", ctx.model.carrying_scale);
  if (n0 < 1) {
    throw ConfigError("initial_count must be positive");
  }
  const bool log_events = cfg.get_bool("simulate-ibm.log_events", false);
  const double gap = positive(cfg, "simulate-ibm.cluster_gap", 0.1);
  if (scaling_advisory(ctx.model)) {
    err << "warning: log(K) K u_K >= 0.1; mutations are not rare on the ecological "
           "time scale\n";
  }

  PopulationState init;
  init.K = ctx.model.carrying_scale;
  init.add(x0, n0);
  std::vector<IbmResult> results(static_cast<std::size_t>(ctx.replicates));
  IbmOptions opts;
  opts.snapshots = snapshots;
  opts.log_events = log_events;
  parallel_for(ctx.replicates, ctx.workers, [&](int r) {
    Rng rng = make_stream(ctx.seed, static_cast<std::uint64_t>(r));
    results[static_cast<std::size_t>(r)] = simulate_ibm(ctx.model, init, t_end, rng, opts);
  });

  json summary{{"header", ctx.header("ibm-summary/1")}, {"t_end", t_end}, {"replicates", json::array()}};
  for (int r = 0; r < ctx.replicates; ++r) {
    const auto& res = results[static_cast<std::size_t>(r)];
    {
      auto f = ctx.open("ibm_rep" + std::to_string(r) + ".csv");
      f << output_header("ibm-trajectory/1", ctx.hash, ctx.seed) << " replicate=" << r << '\n';
      write_trajectory_csv(f, res.snapshots);
    }
    if (log_events) {
      auto f = ctx.open("ibm_rep" + std::to_string(r) + ".events.ndjson");
      json h = ctx.header("ibm-events/1");
      h["replicate"] = r;
      f << h.dump() << '\n';
      write_event_log(f, res.log);
    }
    const auto clusters = gap_clusters(res.snapshots.back().state, gap);
    json cl = json::array();
    for (const auto& c : clusters) {
      cl.push_back({{"lo", c.lo}, {"hi", c.hi}, {"mean", c.mean}, {"mass", c.mass}});
    }
    summary["replicates"].push_back({{"replicate", r},
                                     {"events", res.events},
                                     {"extinct", res.extinct},
                                     {"max_rate_drift", res.max_drift},
                                     {"cluster_count", clusters.size()},
                                     {"clusters", cl}});
    out << "replicate " << r << ": " << res.events << " events, " << clusters.size()
        << " cluster(s) at t=" << t_end << '\n';
  }
  ctx.open("summary.json") << summary.dump(2) << '\n';
  return 0;
}

int cmd_simulate_pes(const Context& ctx, std::ostream& out, std::ostream& err) {
  const auto& cfg = ctx.cfg;
  const double t_end = positive(cfg, "simulate-pes.t_end", 2000.0);
  const Trait x0 = trait_in_space(ctx, "simulate-pes.initial_trait", -1.0);
  const PesVariant variant = parse_variant(cfg.get_string("simulate-pes.variant", "full"));
  const double eta = positive(cfg, "simulate-pes.eta", 0.2);
  const auto xs_opt = cfg.get_optional_double("simulate-pes.x_star");
  const Trait x_star = xs_opt ? *xs_opt : default_x_star(ctx.model, x0);
  if (scaling_advisory(ctx.model)) {
    err << "warning: log(K) K u_K >= 0.1; the PES limit needs rarer mutations\n";
  }

  const PESState init = monomorphic_state(ctx.model, x0);
  std::vector<JumpTrajectory> trajs(static_cast<std::size_t>(ctx.replicates));
  parallel_for(ctx.replicates, ctx.workers, [&](int r) {
    Rng rng = make_stream(ctx.seed, static_cast<std::uint64_t>(r));
    trajs[static_cast<std::size_t>(r)] = simulate_pes(ctx.model, init, t_end, rng, variant);
  });

  json report{{"header", ctx.header("pes-branching/1")},
              {"x_star", x_star},
              {"eta", eta},
              {"variant", to_string(variant)},
              {"replicates", json::array()}};
  int branched = 0;
  int killed = 0;
  for (int r = 0; r < ctx.replicates; ++r) {
    const auto& traj = trajs[static_cast<std::size_t>(r)];
    {
      auto f = ctx.open("pes_rep" + std::to_string(r) + ".ndjson");
      json h = ctx.header("pes-trajectory/1");
      h["replicate"] = r;
      f << h.dump() << '\n';
      write_pes_ndjson(f, traj);
    }
    const auto br = detect_branching(traj, x_star, eta);
    const PESState& last = traj.jumps.empty() ? traj.initial : traj.jumps.back().state;
    branched += br.occurred ? 1 : 0;
    killed += last.alive() ? 0 : 1;
    json rec{{"replicate", r},
             {"occurred", br.occurred},
             {"max_support_diameter", br.max_support_diameter},
             {"confined_after_theta", br.confined_after_theta},
             {"killed_reason", to_string(last.killed)},
             {"final_support", last.support},
             {"jumps", traj.jumps.size()}};
    rec["t1"] = br.t1 ? json(*br.t1) : json(nullptr);
    rec["t2"] = br.t2 ? json(*br.t2) : json(nullptr);
    rec["theta_eta"] = br.theta_eta ? json(*br.theta_eta) : json(nullptr);
    report["replicates"].push_back(rec);
  }
  report["branching_fraction"] = static_cast<double>(branched) / ctx.replicates;
  report["killed_fraction"] = static_cast<double>(killed) / ctx.replicates;
  ctx.open("branching.json") << report.dump(2) << '\n';
  out << "eta-branching in " << branched << " of " << ctx.replicates << " replicate(s); "
      << killed << " killed\n";
  return 0;
}

int cmd_simulate_tss(const Context& ctx, std::ostream& out, std::ostream&) {
  const auto& cfg = ctx.cfg;
  const double t_end = positive(cfg, "simulate-tss.t_end", 1000.0);
  const Trait x0 = trait_in_space(ctx, "simulate-tss.x0", -1.0);
  const double eps = positive(cfg, "simulate-tss.epsilon", ctx.model.jump_scale);
  const int samples = positive_int(cfg, "simulate-tss.samples", 500);
  const auto grid = even_grid(t_end, samples);
  TssParams params;
  params.gamma = compute_gamma(ctx.model);

  std::vector<TSSPath> paths(static_cast<std::size_t>(ctx.replicates));
  parallel_for(ctx.replicates, ctx.workers, [&](int r) {
    Rng rng = make_stream(ctx.seed, static_cast<std::uint64_t>(r));
    paths[static_cast<std::size_t>(r)] = simulate_tss(ctx.model, x0, eps, t_end, rng, params);
  });
  std::vector<double> mean(grid.size(), 0.0);
  for (int r = 0; r < ctx.replicates; ++r) {
    const auto& path = paths[static_cast<std::size_t>(r)];
    auto f = ctx.open("tss_rep" + std::to_string(r) + ".csv");
    f << output_header("tss-path/1", ctx.hash, ctx.seed) << " replicate=" << r << '\n';
    write_path_csv(f, ctx.model, grid, [&](double t) { return path.at(t); });
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mean[i] += path.at(grid[i]) / ctx.replicates;
    }
  }
  auto f = ctx.open("tss_mean.csv");
  f << output_header("tss-mean/1", ctx.hash, ctx.seed) << '\n';
  write_path_csv(f, ctx.model, grid, [&](double t) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), t);
    return mean[static_cast<std::size_t>(it - grid.begin())];
  });
  out << "simulated " << ctx.replicates << " TSS path(s); mean trait at t=" << t_end << ": "
      << mean.back() << '\n';
  return 0;
}

int cmd_canonical(const Context& ctx, std::ostream& out, std::ostream&) {
  const auto& cfg = ctx.cfg;
  const double t_end = positive(cfg, "canonical.t_end", 1000.0);
  const Trait x0 = trait_in_space(ctx, "canonical.x0", -1.0);
  const double tol = positive(cfg, "canonical.tol", 1e-10);
  const int samples = positive_int(cfg, "canonical.samples", 500);
  const auto sol = solve_canonical(ctx.model, x0, t_end, tol, samples);
  auto f = ctx.open("canonical.csv");
  f << output_header("canonical/1", ctx.hash, ctx.seed) << '\n';
  write_path_csv(f, ctx.model, sol.times, [&](double t) {
    const auto it = std::lower_bound(sol.times.begin(), sol.times.end(), t);
    return sol.traits[static_cast<std::size_t>(it - sol.times.begin())];
  });
  out << "canonical solution x(" << t_end << ") = " << sol.traits.back()
      << " (error estimate " << sol.error_estimate << ")\n";
  return 0;
}

json report_json(const SingularityReport& r) { return json::parse(report_to_json(r, -1)); }

int cmd_analyze(const Context& ctx, std::ostream& out, std::ostream&) {
  SingularityOptions opts;
  opts.grid = positive_int(ctx.cfg, "analyze.grid", 401);
  const auto found = find_singularities(ctx.model, opts);
  json doc{{"header", ctx.header("singularity-report/1")}, {"singularities", json::array()}};
  for (const auto& r : found) {
    doc["singularities"].push_back(report_json(r));
  }
  doc["verdict"] = found.empty() ? "none" : to_string(found.front().classification);
  ctx.open("analyze.json") << doc.dump(2) << '\n';
  out << doc.dump(2) << '\n';
  return 0;
}

int cmd_pip(const Context& ctx, std::ostream& out, std::ostream&) {
  const auto found = find_singularities(ctx.model);
  const Trait center = found.empty() ? 0.5 * (ctx.model.space.lower + ctx.model.space.upper)
                                     : found.front().x_star;
  const double lo = ctx.cfg.get_double("pip.lo", center - 0.5);
  const double hi = ctx.cfg.get_double("pip.hi", center + 0.5);
  const int res = positive_int(ctx.cfg, "pip.resolution", 400);
  if (res < 2 || !(hi > lo)) {
    throw ConfigError("pip needs hi > lo and resolution >= 2");
  }
  const auto grid = pip(ctx.model, lo, hi, res);
  {
    auto f = ctx.open("pip.csv");
    f << output_header("pip/1", ctx.hash, ctx.seed) << '\n';
    write_pip_csv(f, grid);
  }
  json doc{{"header", ctx.header("pip-summary/1")}, {"lo", lo}, {"hi", hi}, {"resolution", res}};
  std::size_t coexisting = 0;
  for (const auto& c : grid.cells) {
    coexisting += c.coexist ? 1 : 0;
  }
  doc["coexisting_cells"] = coexisting;
  if (!found.empty()) {
    const auto& r = found.front();
    doc["singularity"] = report_json(r);
    if (r.classification != EsClass::degenerate) {
      const auto slopes = coexistence_boundary_slopes(ctx.model, r.x_star);
      doc["boundary_slopes"] = {{"fyx_zero", slopes.fyx_zero},
                                {"fxy_zero", slopes.fxy_zero},
                                {"expected_fyx_zero", r.c / r.a},
                                {"expected_fxy_zero", r.a / r.c}};
    }
  }
  ctx.open("pip.json") << doc.dump(2) << '\n';
  out << "pip grid " << res << "x" << res << " on [" << lo << ", " << hi << "]: " << coexisting
      << " coexisting cell(s)\n";
  return 0;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, const CommandOptions& options,
                std::ostream& out, std::ostream& err) {
  try {
    const auto& names = command_names();
    if (std::find(names.begin(), names.end(), command) == names.end()) {
      throw ConfigError("unknown command '" + command + "'");
    }
    const long seed = cfg.get_int("run.seed", 1);
    const long reps = cfg.get_int("run.replicates", 1);
    const long workers = cfg.get_int("run.workers", 1);
    Context ctx{cfg,
                build_model(cfg),
                options.seed ? *options.seed : static_cast<std::uint64_t>(seed),
                options.replicates ? *options.replicates : static_cast<int>(reps),
                options.workers ? *options.workers : static_cast<int>(workers),
                options.out ? fs::path(*options.out) : fs::path(cfg.get_string("run.out", "out")),
                cfg.hash()};
    if (ctx.replicates < 1 || ctx.workers < 1) {
      throw ConfigError("replicates and workers must be positive");
    }
    for (const auto& w : audit_assumptions(ctx.model)) {
      err << "warning: " << w << '\n';
    }
    fs::create_directories(ctx.out_dir);

    if (command == "simulate-ibm") {
      return cmd_simulate_ibm(ctx, out, err);
    }
    if (command == "simulate-pes") {
      return cmd_simulate_pes(ctx, out, err);
    }
    if (command == "simulate-tss") {
      return cmd_simulate_tss(ctx, out, err);
    }
    if (command == "canonical") {
      return cmd_canonical(ctx, out, err);
    }
    if (command == "analyze") {
      return cmd_analyze(ctx, out, err);
    }
    return cmd_pip(ctx, out, err);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_command(const std::string& command, const CommandOptions& options, std::ostream& out,
                std::ostream& err) {
  RunConfig cfg;
  try {
    if (!options.config_path.empty()) {
      cfg = load_config(options.config_path);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return run_command(command, cfg, options, out, err);
}

}  // namespace addyn
