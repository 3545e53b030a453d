#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "flipchain/config.hpp"
#include "flipchain/ensemble.hpp"
#include "flipchain/experiments.hpp"
#include "flipchain/moments.hpp"
#include "flipchain/pde.hpp"
#include "flipchain/spectral.hpp"
#include "flipchain/wigner.hpp"

using namespace flipchain;

namespace {

struct Common {
  std::string config_file;
  std::map<std::string, std::string> values;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_file, "flat key = value file");
  for (const auto& k : config_keys()) sub->add_option("--" + k, c.values[k], "config key " + k);
}

ExperimentConfig resolve(const Common& c, const std::string& experiment) {
  ExperimentConfig cfg = default_config(experiment);
  if (!c.config_file.empty()) cfg = load_config(c.config_file, cfg);
  for (const auto& [k, v] : c.values)
    if (!v.empty()) config_set(cfg, k, v);
  cfg.integrator.t_end_macro = cfg.t_end;
  cfg.validate();
  return cfg;
}

std::string out_path(const ExperimentConfig& cfg, const std::string& file) {
  const std::string dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / file).string();
}

Profile load_profile(const std::string& spec, FieldKind kind, const ModelParams& params) {
  if (spec.size() > 4 && spec.substr(spec.size() - 4) == ".csv") return profile_from_csv(spec);
  return profile_preset(spec, kind, params);
}

std::vector<MomentState> moment_path(const ExperimentConfig& cfg) {
  const MomentState s0 = moments_from_gibbs(initial_law(cfg.initial, cfg.params), cfg.params);
  std::vector<MomentState> path;
  long long k = 0;
  evolve_observed(s0, cfg.params, cfg.t_end, cfg.integrator.dtau, [&](const MomentState& m) {
    if (k++ % cfg.integrator.record_stride == 0) path.push_back(m);
  });
  return path;
}

int print_report(const Report& r) {
  std::cout << r.experiment << ": " << (r.pass() ? "PASS" : "FAIL") << "  (" << r.seconds << " s)\n";
  for (const auto& c : r.checks)
    std::cout << "  [" << (c.pass ? "ok  " : "FAIL") << "]" << (c.gated ? " " : " (report) ") << c.name
              << (c.detail.empty() ? "" : "  -- " + c.detail) << '\n';
  for (const auto& w : r.warnings) std::cout << "  warning: " << w << '\n';
  return r.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open harmonic chain with momentum flips and boundary thermostats"};
  app.require_subcommand(1);

  Common c_sim, c_mom, c_pde, c_wig, c_spec, c_ver;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo ensemble, writes ensemble.csv");
  add_common(sim, c_sim);
  auto* mom = app.add_subcommand("moments", "exact moment evolution, writes moments.csv");
  add_common(mom, c_mom);
  auto* pde = app.add_subcommand("pde", "macroscopic solvers, writes stretch.csv and energy.csv");
  add_common(pde, c_pde);
  std::string r_profile = "sine", e_profile = "linear-tension";
  int frame_stride = 100;
  pde->add_option("--r_profile", r_profile, "stretch initial profile: preset or two-column csv");
  pde->add_option("--e_profile", e_profile, "energy initial profile: preset or two-column csv");
  pde->add_option("--frame_stride", frame_stride, "write every k-th frame");
  auto* wig = app.add_subcommand("wigner", "energy functional and balance terms along a moment path");
  add_common(wig, c_wig);
  auto* spec = app.add_subcommand("spectral", "Laplace-domain bound certification, writes spectral.csv");
  add_common(spec, c_spec);
  auto* ver = app.add_subcommand("verify", "run a named experiment (or 'all')");
  add_common(ver, c_ver);
  std::string experiment;
  ver->add_option("name", experiment, "experiment name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const ExperimentConfig cfg = resolve(c_sim, "simulate");
      EnsembleOptions opt;
      opt.n_traj = cfg.trajectories;
      opt.master_seed = cfg.master_seed;
      opt.workers = cfg.workers;
      const EnsembleStats st = run_ensemble(initial_law(cfg.initial, cfg.params), cfg.integrator, cfg.params, opt);
      const std::string f = out_path(cfg, "ensemble.csv");
      write_ensemble_csv(st, f);
      std::cout << "wrote " << f << " (" << st.times.size() << " records, " << st.n_traj << " trajectories)\n";
      for (std::size_t i = 0; i < boundary_stat_names().size(); ++i)
        std::cout << "  " << boundary_stat_names()[i] << " = " << st.boundary_mean[i] << " +- " << st.boundary_se[i]
                  << '\n';
    } else if (*mom) {
      const ExperimentConfig cfg = resolve(c_mom, "moments");
      const auto path = moment_path(cfg);
      const std::string f = out_path(cfg, "moments.csv");
      write_moments_csv(path, f);
      std::cout << "wrote " << f << " (" << path.size() << " records)\n";
    } else if (*pde) {
      const ExperimentConfig cfg = resolve(c_pde, "pde");
      const MacroPath r = solve_stretch(load_profile(r_profile, FieldKind::Stretch, cfg.params), cfg.params, cfg.t_end,
                                        cfg.grid);
      const MacroPath e = solve_energy(load_profile(e_profile, FieldKind::Energy, cfg.params), r, cfg.params, cfg.grid);
      write_macro_csv(r, out_path(cfg, "stretch.csv"), frame_stride);
      write_macro_csv(e, out_path(cfg, "energy.csv"), frame_stride);
      for (const auto& w : r.warnings) std::cout << "warning (stretch): " << w << '\n';
      for (const auto& w : e.warnings) std::cout << "warning (energy): " << w << '\n';
      std::cout << "wrote stretch.csv and energy.csv (" << r.frames.size() << " frames)\n";
    } else if (*wig) {
      const ExperimentConfig cfg = resolve(c_wig, "wigner");
      const auto path = moment_path(cfg);
      const std::string f = out_path(cfg, "wigner.csv");
      std::ofstream out(f);
      out.precision(12);
      out << "t,energy_functional,dissipation_sum,thermostat,injection,boundary_dissipation,bulk_dissipation\n";
      for (const auto& m : path) {
        const WignerSet ws = wigner_from_cov(fluctuation_cov(m), m.n(), m.t_macro);
        const BalanceTerms b = balance_terms(m, cfg.params);
        out << m.t_macro << ',' << energy_functional(ws) << ',' << dissipation_sum(ws) << ',' << b.thermostat << ','
            << b.injection << ',' << b.boundary_dissipation << ',' << b.bulk_dissipation << '\n';
      }
      std::cout << "wrote " << f << " (" << path.size() << " records)\n";
    } else if (*spec) {
      ExperimentConfig cfg = resolve(c_spec, "spectral");
      const CertifyReport rep = appendix_certify(cfg.n_list, default_eta_grid(), cfg.params, [](int n) {
        return InitialSpectra::fourier_series(n, {0.7, -0.3, 0.2, 0.1}, {0.5, 0.25, -0.1, 0.05},
                                              {0.4, 0.2, -0.2, 0.1}, {-0.3, 0.15, 0.1, 0.05});
      });
      const std::string f = out_path(cfg, "spectral.csv");
      std::ofstream(f) << rep.to_csv();
      std::cout << "wrote " << f << "; all gated checks " << (rep.all_pass ? "pass" : "do not pass") << '\n';
      return rep.all_pass ? 0 : 1;
    } else if (*ver) {
      int status = 0;
      const std::vector<std::string> names =
          experiment == "all" ? experiment_names() : std::vector<std::string>{experiment};
      for (const auto& name : names) {
        ExperimentConfig cfg = resolve(c_ver, name);
        cfg.experiment = name;
        status |= print_report(run_experiment(name, cfg));
      }
      return status;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
