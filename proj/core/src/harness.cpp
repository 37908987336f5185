#include "chds/harness.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chds/assembly.hpp"
#include "chds/output.hpp"
#include "chds/prolongation.hpp"
#include "chds/simulation.hpp"

namespace chds {

std::vector<double> compute_rates(const std::vector<double>& norms, const std::vector<double>& hs) {
  if (norms.size() != hs.size() || norms.size() < 2)
    throw Error(ErrorKind::InvalidArgument, "compute_rates: need two or more norms and as many mesh sizes");
  for (std::size_t i = 0; i < norms.size(); ++i)
    if (!(norms[i] > 0.0) || !(hs[i] > 0.0))
      throw Error(ErrorKind::InvalidArgument, "compute_rates: norms and mesh sizes must be positive");
  std::vector<double> rates;
  for (std::size_t i = 1; i < norms.size(); ++i) {
    if (hs[i - 1] == hs[i]) throw Error(ErrorKind::InvalidArgument, "compute_rates: equal consecutive mesh sizes");
    rates.push_back(std::log(norms[i - 1] / norms[i]) / std::log(hs[i - 1] / hs[i]));
  }
  return rates;
}

CauchyDifference cauchy_difference(const State& coarse, const State& fine) {
  auto diff = [](const FeFunction& c, const FeFunction& f) {
    const FeFunction pc = prolongate(c, f.space);
    return fe_norm(FeFunction(f.space, f.coefficients - pc.coefficients), NormKind::H1);
  };
  CauchyDifference d;
  d.h_coarse = coarse.phi.fe_space().mesh().h();
  d.h_fine = fine.phi.fe_space().mesh().h();
  d.phi = diff(coarse.phi, fine.phi);
  d.mu = diff(coarse.mu, fine.mu);
  d.p = diff(coarse.p, fine.p);
  d.u = diff(coarse.u, fine.u);
  return d;
}

namespace {

std::vector<double> safe_rates(const std::vector<double>& norms, const std::vector<double>& hs) {
  if (norms.size() < 2) return {};
  for (double v : norms)
    if (!(v > 0.0)) return std::vector<double>(norms.size() - 1, std::nan(""));
  return compute_rates(norms, hs);
}

}  // namespace

ConvergenceReport cauchy_convergence(const Config& config, const ConvergenceOptions& options) {
  config.validate();
  if (config.levels < 2) throw Error(ErrorKind::Config, "levels: a convergence study needs levels >= 2");

  std::vector<MeshPtr> meshes{build_crossed_mesh(config.domain, config.n)};
  for (int l = 1; l < config.levels; ++l) meshes.push_back(uniform_refine(meshes.back()));

  ConvergenceReport report;
  report.config = config;
  report.levels.resize(meshes.size());
  std::vector<Params> level_params(meshes.size(), config.params);
  for (std::size_t l = 0; l < meshes.size(); ++l) {
    Params& p = level_params[l];
    p.tau = config.path_constant * meshes[l]->h();
    p.validate();
    report.levels[l].n = config.n << l;
    report.levels[l].h = meshes[l]->h();
    report.levels[l].tau = p.tau;
    report.levels[l].steps = p.step_count();
  }

  const InitialData init = make_initial_data(config);
  std::vector<std::unique_ptr<Discretization>> discs(meshes.size());
  std::vector<State> finals(meshes.size());
  std::vector<std::exception_ptr> errors(meshes.size());
  std::mutex log_mutex;
  auto log = [&](const std::string& s) {
    if (!options.log) return;
    std::lock_guard lock(log_mutex);
    options.log(s);
  };

  // Largest level first so that it overlaps with the rest.
  std::atomic<int> next{static_cast<int>(meshes.size()) - 1};
  auto worker = [&] {
    for (int l = next--; l >= 0; l = next--) {
      try {
        discs[l] = std::make_unique<Discretization>(meshes[l]);
        const State s0 = initialize(*discs[l], init, level_params[l]);
        RunOptions ro;
        ro.diagnostics = false;
        std::ostringstream msg;
        msg << "level n=" << report.levels[l].n << ": " << report.levels[l].steps << " steps, tau=" << level_params[l].tau;
        log(msg.str());
        RunSummary sum = run(*discs[l], level_params[l], s0, ro);
        report.levels[l].wall_seconds = sum.wall_seconds;
        report.levels[l].monolithic_steps = sum.monolithic_steps;
        finals[l] = std::move(sum.final_state);
        std::ostringstream done;
        done << "level n=" << report.levels[l].n << " done in " << sum.wall_seconds << " s";
        log(done.str());
      } catch (...) {
        errors[l] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min(options.threads, static_cast<int>(meshes.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<double> hs, nphi, nmu, np, nu;
  for (std::size_t l = 1; l < meshes.size(); ++l) {
    const CauchyDifference d = cauchy_difference(finals[l - 1], finals[l]);
    report.pairs.push_back(d);
    hs.push_back(d.h_fine);
    nphi.push_back(d.phi);
    nmu.push_back(d.mu);
    np.push_back(d.p);
    nu.push_back(d.u);
  }
  report.rate_phi = safe_rates(nphi, hs);
  report.rate_mu = safe_rates(nmu, hs);
  report.rate_p = safe_rates(np, hs);
  report.rate_u = safe_rates(nu, hs);
  return report;
}

void write_report_csv(const ConvergenceReport& r, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"pair", "n_coarse", "n_fine", "h_coarse", "h_fine", "dphi_H1", "rate_phi", "dmu_H1",
              "rate_mu", "dp_H1", "rate_p", "du_H1", "rate_u"};
  for (std::size_t i = 0; i < r.pairs.size(); ++i) {
    const auto& d = r.pairs[i];
    auto rate = [&](const std::vector<double>& v) { return i == 0 ? 0.0 : v[i - 1]; };
    t.rows.push_back({static_cast<double>(i + 1), static_cast<double>(r.levels[i].n),
                      static_cast<double>(r.levels[i + 1].n), d.h_coarse, d.h_fine, d.phi, rate(r.rate_phi), d.mu,
                      rate(r.rate_mu), d.p, rate(r.rate_p), d.u, rate(r.rate_u)});
  }
  write_csv(t, path);
}

void write_report_json(const ConvergenceReport& r, const std::filesystem::path& path) {
  nlohmann::json j;
  j["config"] = serialize(r.config);
  for (const auto& l : r.levels)
    j["levels"].push_back({{"n", l.n},
                           {"h", l.h},
                           {"tau", l.tau},
                           {"steps", l.steps},
                           {"monolithic_steps", l.monolithic_steps},
                           {"wall_seconds", l.wall_seconds}});
  for (const auto& d : r.pairs)
    j["pairs"].push_back({{"h_coarse", d.h_coarse},
                          {"h_fine", d.h_fine},
                          {"dphi_H1", d.phi},
                          {"dmu_H1", d.mu},
                          {"dp_H1", d.p},
                          {"du_H1", d.u}});
  auto arr = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return a;
  };
  j["rates"] = {{"phi", arr(r.rate_phi)}, {"mu", arr(r.rate_mu)}, {"p", arr(r.rate_p)}, {"u", arr(r.rate_u)}};
  j["note"] = "rate entries relate consecutive pairs; the rate columns of the first CSV row are placeholders";
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

std::vector<double> rates_from_csv(const std::filesystem::path& path, const std::string& field) {
  const CsvTable t = read_csv(path);
  return compute_rates(t.values("d" + field + "_H1"), t.values("h_fine"));
}

}  // namespace chds
