#include "chds/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include "chds/diagnostics.hpp"
#include "chds/harness.hpp"
#include "chds/output.hpp"
#include "chds/simulation.hpp"

namespace chds {

namespace {

namespace fs = std::filesystem;

fs::path out_dir(const Config& c, const CommandOptions& o) { return o.out_dir ? fs::path(*o.out_dir) : fs::path(c.out_dir); }

int cmd_mesh_info(const Config& c, std::ostream& out) {
  const MeshPtr mesh = build_crossed_mesh(c.domain, c.n);
  const MeshReport rep = inspect(*mesh);
  out << "cells per side:     " << c.n << '\n'
      << "triangles:          " << mesh->triangle_count() << '\n'
      << "vertices:           " << mesh->vertex_count() << '\n'
      << "edges:              " << mesh->edge_count() << '\n'
      << "boundary vertices:  " << mesh->boundary_vertices().size() << '\n'
      << "h (longest edge):   " << mesh->h() << '\n'
      << "P1 dofs:            " << mesh->vertex_count() << '\n'
      << "P2 vector dofs:     " << 2 * (mesh->vertex_count() + mesh->edge_count()) << '\n'
      << "orientation ok:     " << (rep.positive_orientation ? "yes" : "no") << '\n'
      << "conforming:         " << (rep.conforming ? "yes" : "no") << '\n'
      << "max boundary edges per triangle: " << rep.max_boundary_edges_per_triangle << '\n';
  return rep.positive_orientation && rep.conforming && rep.at_most_one_boundary_edge ? 0 : 1;
}

int cmd_run(const Config& c, const CommandOptions& o, std::ostream& out) {
  const fs::path dir = out_dir(c, o);
  const Discretization disc(build_crossed_mesh(c.domain, c.n));
  const State s0 = initialize(disc, make_initial_data(c), c.params);
  RunOptions ro;
  ro.csv = dir / "run.csv";
  ro.snapshot_every = o.snapshots.value_or(c.snapshot_every);
  if (ro.snapshot_every > 0) ro.snapshot_dir = dir / "vtk";
  {
    std::ofstream cfg = open_output(dir / "config.txt");
    cfg << serialize(c);
  }
  const int total = c.params.step_count();
  const int every = std::max(1, total / 10);
  ro.observer = [&](const StepRecord& r, const State&) {
    if (r.step % every == 0 || r.step == total)
      out << "step " << r.step << "/" << total << "  t=" << r.time << "  E=" << r.energy.total
          << "  picard=" << r.stats.picard_iters << std::endl;
  };
  const RunSummary s = run(disc, c.params, s0, ro);
  out << std::setprecision(10) << "steps:                 " << s.steps << '\n'
      << "energy initial/final:  " << s.initial_energy.total << " / " << s.final_energy.total << '\n'
      << "max energy increase:   " << s.max_energy_increase << '\n'
      << "max energy-law resid:  " << s.max_energy_law << '\n'
      << "max mass deviation:    " << s.max_mass_dev << '\n'
      << "max divergence resid:  " << s.max_div_res << '\n'
      << "max mu-mean resid:     " << s.max_mu_mean_res << '\n'
      << "max picard / newton:   " << s.max_picard_iters << " / " << s.max_newton_iters << '\n'
      << "coupled-Newton steps:  " << s.monolithic_steps << '\n'
      << "tau sum |grad mu|^2:   " << s.sum_grad_mu << '\n'
      << "tau sum |grad u|^2:    " << s.sum_grad_u << '\n'
      << "sum |dphi|_H1^2:       " << s.sum_phi_increment << '\n'
      << "max |mu|, |lap phi|:   " << s.max_mu_l2 << ", " << s.max_laplacian_phi << '\n'
      << "wall time [s]:         " << s.wall_seconds << '\n'
      << "csv:                   " << ro.csv->string() << '\n';
  if (ro.snapshot_dir) write_state_vtk(s.final_state, *ro.snapshot_dir / "final.vtk");
  return 0;
}

int cmd_converge(const Config& c, const CommandOptions& o, std::ostream& out) {
  Config cfg = c;
  if (o.levels) cfg.levels = *o.levels;
  if (o.finest) cfg.levels += 1;
  const fs::path dir = out_dir(c, o);
  ConvergenceOptions co;
  co.threads = o.threads;
  co.log = [&](const std::string& s) { out << s << std::endl; };
  const ConvergenceReport r = cauchy_convergence(cfg, co);
  write_report_csv(r, dir / "convergence.csv");
  write_report_json(r, dir / "convergence.json");
  out << std::setprecision(4);
  out << "  h_coarse      h_fine    |dphi|_H1  rate   |dmu|_H1   rate   |dp|_H1    rate\n";
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& d = r.pairs[i];
    auto rate = [&](const std::vector<double>& v) {
      std::ostringstream s;
      if (i == 0) s << "  -  ";
      else s << std::fixed << std::setprecision(2) << v[i - 1];
      return s.str();
    };
    out << std::scientific << std::setprecision(3) << d.h_coarse << "  " << d.h_fine << "  " << d.phi << "  "
        << rate(r.rate_phi) << "  " << d.mu << "  " << rate(r.rate_mu) << "  " << d.p << "  " << rate(r.rate_p)
        << '\n';
  }
  out << std::defaultfloat << "report: " << (dir / "convergence.csv").string() << ", "
      << (dir / "convergence.json").string() << '\n';
  return 0;
}

int cmd_diagnose(const Config& c, std::ostream& out) {
  const Discretization disc(build_crossed_mesh(c.domain, c.n));
  const State s0 = initialize(disc, make_initial_data(c), c.params);
  Stepper stepper(disc, c.params);
  StepStats stats;
  const State s1 = stepper.step(s0, &stats);
  const EnergyBreakdown e0 = energy(disc, s0, c.params);
  const double scale = std::max(1.0, e0.total);
  const InvariantResiduals r0 = invariant_residuals(disc, s0, c.params);
  const InvariantResiduals r1 = invariant_residuals(disc, s1, c.params);
  const double law = energy_law_residual(disc, s0, s1, c.params);
  bool ok = true;
  auto line = [&](const char* name, double v, double limit) {
    const bool pass = std::abs(v) <= limit;
    ok = ok && pass;
    out << std::left << std::setw(22) << name << std::scientific << std::setprecision(3) << v << "  (limit "
        << limit << ")  " << (pass ? "ok" : "FAIL") << '\n';
  };
  out << "initial energy: " << e0.total << "  (kinetic " << e0.kinetic << ", double-well " << e0.double_well
      << ", gradient " << e0.gradient << ", long-range " << e0.longrange << ")\n";
  out << "initial state\n";
  line("  mass_dev", r0.mass_dev, 1e-11);
  line("  div_res", r0.div_res, 1e-10);
  line("  mu_mean_res", r0.mu_mean_res, 1e-9);
  line("  xi_mean_res", r0.xi_mean_res, 1e-11);
  line("  p_mean_res", r0.p_mean_res, 1e-11);
  out << "after one step (picard " << stats.picard_iters << ", newton " << stats.newton_iters << ")\n";
  line("  mass_dev", r1.mass_dev, 1e-10);
  line("  div_res", r1.div_res, 1e-10);
  line("  mu_mean_res", r1.mu_mean_res, 1e-9);
  line("  xi_mean_res", r1.xi_mean_res, 1e-10);
  line("  p_mean_res", r1.p_mean_res, 1e-10);
  line("  energy_law", law, 1e-8 * scale);
  line("  energy_increase", std::max(0.0, energy(disc, s1, c.params).total - e0.total), 1e-10 * scale);
  return ok ? 0 : 1;
}

}  // namespace

int dispatch(const std::string& command, const Config& config, const CommandOptions& options, std::ostream& out) {
  if (command == "mesh-info") return cmd_mesh_info(config, out);
  if (command == "run") return cmd_run(config, options, out);
  if (command == "converge") return cmd_converge(config, options, out);
  if (command == "diagnose") return cmd_diagnose(config, out);
  throw Error(ErrorKind::InvalidArgument, "unknown command '" + command + "'");
}

}  // namespace chds
