// lnls_cli: simulations, estimate sweeps and continuum-limit studies from JSON configs.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "lnls/lnls.hpp"

namespace fs = std::filesystem;
using namespace lnls;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::string out;
  int threads = -1;
  bool dry_run = false;
  std::optional<std::uint64_t> seed;
  std::string h_list;
  std::string times;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("lnls");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LNLS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("LNLS_LOG='{}' not recognised; keeping 'info'", env);
    else
      spdlog::set_level(level);
  }
}

json split_list(const std::string& text) {
  json out = json::array();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    if (item.rfind("pi", 0) == 0 || item == "inf") {
      out.push_back(item);
    } else {
      try {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.push_back(v);
      } catch (const std::exception&) {
        throw ConfigError("cannot parse list entry '" + item + "'");
      }
    }
  }
  return out;
}

const char* section_for(const std::string& command) {
  if (command == "converge") return "study";
  if (command == "strichartz") return "strichartz";
  if (command == "dispersive") return "dispersive";
  if (command == "inequalities") return "inequalities";
  return nullptr;
}

/// Loads the config, checks it targets `command`, and applies command-line overrides.
json resolve_config(const std::string& command, const Options& opt) {
  json doc = load_config_file(opt.config);
  const auto settings = read_settings(doc);
  if (settings.command != command)
    throw ConfigError("field 'command': config is for '" + settings.command + "', not '" + command + "'");
  if (opt.seed) doc["seed"] = *opt.seed;
  if (opt.threads >= 0) doc["threads"] = opt.threads;
  if (!opt.h_list.empty()) {
    const char* section = section_for(command);
    if (!section) throw ConfigError("--h-list does not apply to '" + command + "'");
    doc[section]["h_list"] = split_list(opt.h_list);
    doc[section].erase("h_levels");
  }
  if (!opt.times.empty()) {
    if (command != "converge") throw ConfigError("--times applies only to 'converge'");
    doc["study"]["times"] = split_list(opt.times);
  }
  return doc;
}

fs::path output_dir(const std::string& command, const Options& opt) {
  return opt.out.empty() ? fs::path("out") / command : fs::path(opt.out);
}

void write_resolved(const fs::path& dir, const json& doc) {
  fs::create_directories(dir);
  write_text(dir / "resolved_config.json", doc.dump(2) + "\n");
}

std::string verdict_line(const std::string& name, const UniformityVerdict& v) {
  std::ostringstream os;
  os << (v.pass() ? "PASS" : "FAIL") << "  " << name << ": max ratio spread " << std::setprecision(4) << v.spread
     << " (band " << v.band << ")";
  return os.str();
}

void print_max_table(const UniformityVerdict& v) {
  std::cout << "    h            max ratio\n";
  for (auto it = v.max_ratio_by_h.rbegin(); it != v.max_ratio_by_h.rend(); ++it)
    std::cout << "    " << std::left << std::setw(12) << format_double(it->first) << " " << format_double(it->second) << "\n";
}

void print_plan(const std::string& command, const json& doc) {
  std::cout << "dry run: '" << command << "' would execute with the resolved configuration\n" << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& opt) {
  const json doc = resolve_config("simulate", opt);
  const auto settings = read_settings(doc);
  const auto cfg = read_simulate(doc, settings);
  if (auto w = cfg.params.hypothesis_warning(cfg.u0->dim())) spdlog::warn("{}", *w);
  if (opt.dry_run) {
    print_plan("simulate", doc);
    std::cout << "steps: " << detail::step_count(cfg.evolution.t_final, cfg.evolution.dt) << " on M = " << cfg.half_size << "\n";
    return 0;
  }
  const fs::path dir = output_dir("simulate", opt);
  write_resolved(dir, doc);
  const Lattice lat(cfg.u0->dim(), cfg.half_size);
  spdlog::info("simulate: d = {}, M = {}, dt = {}, t_final = {}", lat.dim(), lat.half_size(), cfg.evolution.dt, cfg.evolution.t_final);
  const auto traj = evolve(discretize(*cfg.u0, lat), cfg.params, cfg.evolution);
  write_trajectory(dir / "trajectory", traj, cfg.params, cfg.evolution);

  const auto& c0 = traj.snapshots.front().conserved;
  std::ostringstream table;
  table << "t,mass,energy,mass_drift,energy_drift\n";
  for (const auto& s : traj.snapshots) {
    const double md = c0.mass > 0 ? std::abs(s.conserved.mass - c0.mass) / c0.mass : 0.0;
    const double ed = std::abs(s.conserved.energy - c0.energy) / std::max(std::abs(c0.energy), 1e-300);
    table << format_double(s.t) << ',' << format_double(s.conserved.mass) << ',' << format_double(s.conserved.energy) << ','
          << format_double(md) << ',' << format_double(ed) << '\n';
  }
  write_text(dir / "conserved.csv", table.str());
  const auto report = conservation_report(traj);
  std::cout << "snapshots: " << traj.snapshots.size() << "\nmax relative mass drift: " << format_double(report.mass_drift)
            << "\nmax relative energy drift: " << format_double(report.energy_drift) << "\noutput: " << dir.string() << "\n";
  return 0;
}

int cmd_converge(const Options& opt) {
  const json doc = resolve_config("converge", opt);
  const auto settings = read_settings(doc);
  const auto cfg = read_converge(doc, settings);
  const auto& study = cfg.study;
  if (opt.dry_run) {
    print_plan("converge", doc);
    std::cout << "cells: " << study.h_list.size() << " spacings x " << study.times.size() << " times; reference R = "
              << study.reference.resolution << " certified at " << 2 * study.reference.resolution << "\n";
    return 0;
  }
  const fs::path dir = output_dir("converge", opt);
  write_resolved(dir, doc);
  spdlog::info("converge: {} spacings, {} times, {} threads", study.h_list.size(), study.times.size(), study.threads);
  const auto result = run_convergence(study);
  for (const auto& w : result.warnings) spdlog::warn("{}", w);
  write_records(dir, "converge", result.records);

  std::vector<PlotSeries> series;
  std::ostringstream summary;
  summary << "continuum-limit study (" << (study.params.free ? "free evolution" : "p = " + format_double(study.params.p) +
                                                                              ", lambda = " + std::to_string(study.params.lambda))
          << ")\nreference self-convergence: " << format_double(result.reference_self_convergence)
          << "\nguaranteed rate: 0.5\n";
  for (const auto& [t, fit] : result.fits) {
    PlotSeries s{"t = " + format_double(t), {}, {}};
    for (const auto& rec : result.records)
      if (*rec.t == t) {
        s.x.push_back(std::log(*rec.h));
        s.y.push_back(std::log(*rec.value));
      }
    write_tsv(dir / ("plot_t" + format_double(t) + ".tsv"), s);
    series.push_back(std::move(s));
    summary << "t = " << format_double(t) << ": slope " << std::fixed << std::setprecision(3) << fit.slope
            << (t == 0.0 ? "" : (fit.slope >= 0.5 ? "  (>= 0.5)" : "  (< 0.5)")) << ", residual " << fit.residual << "\n";
    summary.unsetf(std::ios::fixed);
  }
  std::vector<ExperimentRecord> positive;
  for (const auto& rec : result.records)
    if (*rec.t > 0.0) positive.push_back(rec);
  std::set<double> distinct_t;
  for (const auto& r : positive) distinct_t.insert(*r.t);
  if (distinct_t.size() >= 3) {
    const auto g = growth_fit(positive);
    summary << "growth fit: A_hat = " << format_double(g.A_hat) << ", B_hat = " << format_double(g.B_hat) << "\n";
  }
  if (study.params.free) {
    const auto growth = linear_growth_check(result.records);
    if (!growth.normalized_by_t.empty())
      summary << "max_h error / (sqrt(h) <t>) spread over t: " << format_double(growth.spread)
              << (growth.pass() ? "  (at most linear growth)" : "  (needs >= 2 times, spread < 3)") << "\n";
  }
  summary << "errors decrease along h_list: " << (result.monotone ? "yes" : "no") << "\n";
  write_text(dir / "converge.svg", svg_line_chart(series, "continuum-limit error", "log h", "log L2 error"));

  if (cfg.decompose) {
    std::vector<ExperimentRecord> parts;
    for (double h : study.h_list)
      for (double t : study.times) {
        const auto d = decompose_error(study, h, t);
        const std::pair<const char*, double> terms[] = {{"I1", d.I1}, {"I2", d.I2}, {"I3", d.I3}, {"I4", d.I4}};
        for (const auto& [name, v] : terms) {
          ExperimentRecord rec;
          rec.experiment = std::string("decompose_") + name;
          rec.h = h;
          rec.t = t;
          rec.value = v;
          if (std::string(name) == "I3") rec.ratio = d.I3_ratio;
          parts.push_back(std::move(rec));
        }
      }
    write_records(dir, "decompose", parts);
  }
  write_text(dir / "summary.txt", summary.str());
  std::cout << summary.str() << "output: " << dir.string() << "\n";
  return 0;
}

int cmd_strichartz(const Options& opt) {
  const json doc = resolve_config("strichartz", opt);
  const auto settings = read_settings(doc);
  const auto cfg = read_strichartz(doc, settings);
  if (opt.dry_run) {
    print_plan("strichartz", doc);
    return 0;
  }
  const fs::path dir = output_dir("strichartz", opt);
  write_resolved(dir, doc);
  const auto records = strichartz_sweep(cfg.pairs, cfg.epsilon, cfg.h_list, cfg.profiles, cfg.t_quadrature);
  std::vector<ExperimentRecord> all = records;
  for (double h : cfg.h_list) {
    const Lattice lat(cfg.pairs.front().dim(), half_size_for_spacing(h));
    for (const auto& f : cfg.profiles) {
      const auto ratios = linear_time_averaged_ratios(discretize(*f, lat), {2.0, 4.0}, cfg.t_quadrature);
      for (std::size_t i = 0; i < 2; ++i) {
        ExperimentRecord rec;
        rec.experiment = "time_averaged_linf";
        rec.h = h;
        rec.q = i == 0 ? 2.0 : 4.0;
        rec.r = kInfinity;
        rec.ratio = ratios[i];
        rec.metadata["profile"] = f->tag();
        all.push_back(std::move(rec));
      }
    }
  }
  write_records(dir, "strichartz", all);
  double quadrature = 0.0;
  for (const auto& r : records) quadrature = std::max(quadrature, std::stod(r.metadata.at("quadrature_change")));
  std::cout << "time quadrature: max relative change under refinement " << format_double(quadrature)
            << (quadrature < 0.01 ? "" : "  (exceeds 1%, raise t_quadrature)") << "\n";
  for (const auto& pair : cfg.pairs) {
    std::vector<ExperimentRecord> subset;
    for (const auto& r : records)
      if (*r.q == pair.q() && *r.r == pair.r()) subset.push_back(r);
    const auto v = uniformity_verdict(subset);
    std::cout << verdict_line("(q, r) = (" + format_double(pair.q()) + ", " + format_double(pair.r()) + ")", v) << "\n";
    print_max_table(v);
  }
  std::cout << "output: " << dir.string() << "\n";
  return 0;
}

int cmd_dispersive(const Options& opt) {
  const json doc = resolve_config("dispersive", opt);
  const auto cfg = read_dispersive(doc);
  if (opt.dry_run) {
    print_plan("dispersive", doc);
    return 0;
  }
  const fs::path dir = output_dir("dispersive", opt);
  write_resolved(dir, doc);
  std::vector<ExperimentRecord> all;
  for (int d : cfg.dims) {
    std::vector<ExperimentRecord> per_d;
    for (double h : cfg.h_list) {
      const Lattice lat(d, half_size_for_spacing(h));
      for (const auto& N : DyadicScale::all(lat)) {
        auto recs = dispersive_bound_sweep({lat, N, cfg.c, cfg.t_samples});
        per_d.insert(per_d.end(), recs.begin(), recs.end());
      }
    }
    const auto v = uniformity_verdict(per_d);
    std::cout << verdict_line("dispersive d = " + std::to_string(d), v) << "\n";
    print_max_table(v);
    all.insert(all.end(), per_d.begin(), per_d.end());
  }
  write_records(dir, "dispersive", all);
  std::cout << "output: " << dir.string() << "\n";
  return 0;
}

int cmd_inequalities(const Options& opt) {
  const json doc = resolve_config("inequalities", opt);
  const auto settings = read_settings(doc);
  const auto cfg = read_inequalities(doc);
  if (opt.dry_run) {
    print_plan("inequalities", doc);
    return 0;
  }
  const fs::path dir = output_dir("inequalities", opt);
  write_resolved(dir, doc);
  std::vector<ExperimentRecord> all;
  std::map<InequalityKind, std::vector<ExperimentRecord>> by_kind;
  for (double h : cfg.h_list) {
    const auto corpus = stress_corpus(Lattice(cfg.dim, half_size_for_spacing(h)), settings.seed);
    for (auto kind : cfg.kinds) {
      auto recs = inequality_sweep(kind, corpus, cfg.params);
      by_kind[kind].insert(by_kind[kind].end(), recs.begin(), recs.end());
      all.insert(all.end(), recs.begin(), recs.end());
    }
  }
  for (const auto& [kind, recs] : by_kind) {
    const auto v = uniformity_verdict(recs);
    std::cout << verdict_line(to_string(kind), v) << "\n";
    print_max_table(v);
  }
  write_records(dir, "inequalities", all);
  std::cout << "output: " << dir.string() << "\n";
  return 0;
}

int cmd_conserve(const Options& opt) {
  const json doc = resolve_config("conserve", opt);
  const auto settings = read_settings(doc);
  const auto cfg = read_conserve(doc, settings);
  if (opt.dry_run) {
    print_plan("conserve", doc);
    return 0;
  }
  const fs::path dir = output_dir("conserve", opt);
  write_resolved(dir, doc);
  const Lattice lat(cfg.u0->dim(), cfg.half_size);
  const GridFunction u0 = discretize(*cfg.u0, lat);
  StrangStepper stepper(lat, cfg.params, cfg.mass_step);
  GridFunction u = u0;
  const double m0 = std::pow(lebesgue_norm(u0, 2.0), 2);
  double drift = 0.0;
  for (int n = 0; n < cfg.steps_check; ++n) {
    u = stepper.step(u);
    drift = std::max(drift, std::abs(std::pow(lebesgue_norm(u, 2.0), 2) - m0) / m0);
  }
  const auto rich = energy_richardson(u0, cfg.params, cfg.dt, cfg.t_final);
  std::vector<ExperimentRecord> recs(3);
  recs[0].experiment = "mass_drift";
  recs[0].value = drift;
  recs[0].t = cfg.steps_check * cfg.mass_step;
  recs[1].experiment = "energy_drift";
  recs[1].value = rich.drift_coarse;
  recs[1].t = cfg.t_final;
  recs[1].metadata["dt"] = format_double(cfg.dt);
  recs[2].experiment = "energy_drift";
  recs[2].value = rich.drift_fine;
  recs[2].ratio = rich.ratio();
  recs[2].t = cfg.t_final;
  recs[2].metadata["dt"] = format_double(cfg.dt / 2);
  for (auto& r : recs) r.h = lat.spacing();
  write_records(dir, "conserve", recs);
  std::cout << "mass drift over " << cfg.steps_check << " steps: " << format_double(drift) << "\n"
            << "energy drift at dt, dt/2: " << format_double(rich.drift_coarse) << ", " << format_double(rich.drift_fine)
            << "  (ratio " << format_double(rich.ratio()) << ", second order expects about 4)\n"
            << "output: " << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Lattice NLS: simulations, estimate sweeps and continuum-limit studies"};
  app.require_subcommand(1);
  Options opt;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  };
  const Command commands[] = {
      {"simulate", "evolve one initial datum and write the trajectory", cmd_simulate},
      {"converge", "continuum-limit convergence study", cmd_converge},
      {"strichartz", "Strichartz ratio sweep over h", cmd_strichartz},
      {"dispersive", "dispersive kernel sweep over h and N", cmd_dispersive},
      {"conserve", "mass and energy conservation checks", cmd_conserve},
      {"inequalities", "Bernstein, Sobolev and Gagliardo-Nirenberg sweeps", cmd_inequalities},
  };
  std::map<CLI::App*, const Command*> lookup;
  for (const auto& c : commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opt.config, "JSON config path")->required();
    sub->add_option("--out", opt.out, "output directory (default out/<command>)");
    sub->add_option("--threads", opt.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--dry-run", opt.dry_run, "print the resolved plan and exit");
    sub->add_option("--seed", opt.seed, "seed for random initial data and corpora");
    sub->add_option("--h-list", opt.h_list, "comma-separated spacings, e.g. pi/8,pi/16,pi/32");
    sub->add_option("--times", opt.times, "comma-separated evaluation times (converge)");
    lookup[sub] = &c;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  const Command* chosen = lookup.at(app.get_subcommands().front());
  try {
    return chosen->run(opt);
  } catch (const ConfigError& e) {
    spdlog::error("config: {}", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    spdlog::error("i/o: {}", e.what());
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("i/o: {}", e.what());
    return kExitUsage;
  } catch (const AccuracyError& e) {
    spdlog::error("accuracy: {}", e.what());
    return kExitNumerical;
  } catch (const NumericalError& e) {
    spdlog::error("numerical: {}", e.what());
    return kExitNumerical;
  }
}
