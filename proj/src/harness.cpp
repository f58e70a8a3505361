#include "specgeo/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "specgeo/error.hpp"
#include "specgeo/shapes.hpp"

namespace specgeo {

namespace {

constexpr double kSpectralTolerance = 0.02;
constexpr double kIntegralTolerance = 0.05;
constexpr double kChainTolerance = 0.0;
constexpr double kAlgebraicTolerance = 1e-12;
constexpr double kDegreeVolumeTolerance = 0.02;
constexpr int kUniversalMaxK = 15;

double bbox_diagonal(const ImmersedComplex& c) {
  return (c.vertices().rowwise().maxCoeff() - c.vertices().rowwise().minCoeff()).norm();
}

Provenance euclidean_provenance(const ExperimentConfig& e, const ImmersedComplex& c) {
  const auto& b = e.budgets;
  Provenance p;
  p.seed = e.seed;
  p.mesh = e.shape;
  p.vertices = c.vertex_count();
  p.simplices = c.simplex_count();
  p.samples = {{"n_grassmann", b.n_grassmann},
               {"stab_budget", b.stab_budget},
               {"crofton_samples", static_cast<double>(b.crofton_samples)},
               {"crofton_frames", b.crofton_frames},
               {"projection_samples", b.projection_samples},
               {"projection_resolution", b.projection_resolution},
               {"covering_radii", b.covering_radii},
               {"max_centers", static_cast<double>(b.max_centers)},
               {"growth_radii", b.growth_radii},
               {"min_jacobian", b.min_jacobian}};
  return p;
}

double eigenvalue(const SpectrumResult& s, int k) {  // 1-based, lambda_1 = 0
  return s.eigenvalues.at(static_cast<std::size_t>(k - 1));
}

}  // namespace

EuclideanRun verify_euclidean_run(const ExperimentConfig& e) {
  validate(e);
  if (e.kind != ExperimentConfig::Kind::euclidean) throw ConfigError("not a euclidean experiment");
  const auto c = make_shape(e.shape);
  const auto& b = e.budgets;
  const int m = c.dim();
  const int p = c.codim();
  const double two_m = 2.0 / m;

  EuclideanRun run;
  run.volume = c.volume();
  run.r = e.r ? *e.r : 0.25 * bbox_diagonal(c);
  const Provenance prov = euclidean_provenance(e, c);

  run.spectrum = solve_spectrum(assemble(c), std::max(e.k_max, 2), 1e-8, e.seed);

  IndexOptions opts;
  opts.n_grassmann = b.n_grassmann;
  opts.stab_budget = b.stab_budget;
  opts.seed = e.seed;
  opts.min_jacobian = b.min_jacobian;
  opts.max_centers = static_cast<std::size_t>(b.max_centers);
  run.mean = mean_index(c, opts);
  run.sup = *std::max_element(run.mean.fiber_values.begin(), run.mean.fiber_values.end());
  run.eps_mean = eps_index(c, e.eps, std::nullopt, e.strategy, opts);
  run.eps_local = eps_index(c, e.eps, run.r, e.strategy, opts);
  if (run.sup < 1 || !(run.eps_mean.value > 0.0) || !(run.eps_local.value > 0.0))
    throw Error("no transversal fibre found on " + e.shape + "; raise the stabbing budget");

  run.crofton = crofton_constant(m, p, b.crofton_samples, b.crofton_frames, e.seed);
  run.max_projected = max_projected_volume(c, b.projection_samples, b.projection_resolution, e.seed);

  const auto x = to_mm_space(c, Metric::euclidean);
  const auto centers = static_cast<std::size_t>(b.max_centers);
  run.covering = covering_number(x, std::numeric_limits<double>::infinity(), b.covering_radii, centers);
  run.covering_r = covering_number(x, run.r, b.covering_radii, centers);
  run.growth = ball_growth_constant(c, growth_radii(c, b.growth_radii), centers);

  const double I = run.crofton.value;
  const double V = unit_ball_volume(m);
  const double vol = run.volume;
  auto& out = run.reports;

  // Hypersurface curvature bounds.
  if (p == 1) {
    run.curvature = mean_curvature_norms(c);
    const double rhs = m / vol * run.curvature->l2_norm_sq;
    out.push_back(asserted(e.name, "reilly", 2, eigenvalue(run.spectrum, 2), rhs, kSpectralTolerance,
                           {{"m", m}, {"volume", vol}, {"mean_curvature_l2_sq", run.curvature->l2_norm_sq}}, prov));
    const double hinf = run.curvature->linf_norm;
    if (hinf > 0.0)
      for (int k = 1; k <= e.k_max; ++k)
        out.push_back(ratio(e.name, "ehi-ratio", k, eigenvalue(run.spectrum, k) / (hinf * hinf * std::pow(k, two_m)),
                            {{"mean_curvature_linf", hinf}}, prov));
  }

  for (int k = 1; k <= e.k_max; ++k) {
    const double value = eigenvalue(run.spectrum, k) * std::pow(vol, two_m) /
                         (std::pow(run.sup, two_m) * std::pow(k, two_m));
    out.push_back(ratio(e.name, "cde-ratio", k, value, {{"sup_index", run.sup}, {"volume", vol}}, prov));
  }

  // Explicit chain with measured N and L, rho = infinity.
  const double N = run.covering.N_hat;
  const double L = run.growth.L_hat;
  for (int k = 1; k <= e.k_max; ++k) {
    const auto bound = explicit_bound(k, std::numeric_limits<double>::infinity(), N, L, m, vol, vol);
    out.push_back(asserted(e.name, "cor-2.6", k, eigenvalue(run.spectrum, k), bound.rhs_value, kChainTolerance,
                           {{"N", N}, {"L", L}, {"rho", bound.rho}, {"p", m}, {"kappa", run.covering.kappa},
                            {"term_main", bound.term_main}},
                           prov));
  }

  // Mean-index form: lambda_k Vol^(2/m) <= c_m ibar_eps^(2/m) / (1-eps)^(1+2/m) k^(2/m).
  const double eps = e.eps;
  const double shrink = std::pow(1.0 - eps, 1.0 + two_m);
  const double c_m = 16.0 * N * std::pow(8.0 * N * N * 2.0 * V / I, two_m);
  for (int k = 1; k <= e.k_max; ++k) {
    const double lhs = eigenvalue(run.spectrum, k) * std::pow(vol, two_m);
    const double rhs = c_m * std::pow(run.eps_mean.value, two_m) / shrink * std::pow(k, two_m);
    out.push_back(asserted(e.name, "thm-a3-mean", k, lhs, rhs, kChainTolerance,
                           {{"c_m", c_m}, {"N", N}, {"crofton", I}, {"eps", eps},
                            {"eps_mean_index", run.eps_mean.value},
                            {"removed_fraction", run.eps_mean.chosen_region ? run.eps_mean.chosen_region->volume_fraction : 0.0},
                            {"rho", std::numeric_limits<double>::infinity()}},
                           prov));
  }

  // Local form with rho = r: lambda_k <= alpha / ((1-eps) r^2) + beta ibar_eps_r^(2/m) / (1-eps)^(1+2/m) (k/Vol)^(2/m).
  const double Nr = run.covering_r.N_hat;
  const double alpha = 16.0 * Nr;
  const double beta = 16.0 * Nr * std::pow(8.0 * Nr * Nr * 2.0 * V / I, two_m);
  for (int k = 1; k <= e.k_max; ++k) {
    const double rhs = alpha / ((1.0 - eps) * run.r * run.r) +
                       beta * std::pow(run.eps_local.value, two_m) / shrink * std::pow(k / vol, two_m);
    out.push_back(asserted(e.name, "thm-a3-local", k, eigenvalue(run.spectrum, k), rhs, kChainTolerance,
                           {{"alpha_m", alpha}, {"beta_m", beta}, {"N_r", Nr}, {"r", run.r}, {"crofton", I},
                            {"eps", eps}, {"eps_local_index", run.eps_local.value},
                            {"removed_fraction", run.eps_local.chosen_region ? run.eps_local.chosen_region->volume_fraction : 0.0}},
                           prov));
  }

  out.push_back(asserted(e.name, "vol-lemma", 0, vol, 2.0 / I * run.mean.value * run.max_projected, kIntegralTolerance,
                         {{"crofton", I}, {"mean_index", run.mean.value}, {"mean_index_se", run.mean.standard_error},
                          {"max_projected_volume", run.max_projected}},
                         prov));
  out.push_back(asserted(e.name, "ball-growth", 0, L, theoretical_ball_growth(m, I, run.mean.value), kIntegralTolerance,
                         {{"crofton", I}, {"mean_index", run.mean.value}, {"unit_ball_volume", V},
                          {"worst_radius", run.growth.worst_radius}},
                         prov));
  return run;
}

std::vector<BoundReport> verify_euclidean(const ExperimentConfig& e) { return verify_euclidean_run(e).reports; }

CpnRun verify_cpn_run(const ExperimentConfig& e) {
  validate(e);
  if (e.kind != ExperimentConfig::Kind::cpn) throw ConfigError("not a cpn experiment");
  const auto curve = parse_curve_spec(e.curve);
  const auto metric = fs_conformal_factor(curve, e.subdiv);

  CpnRun run;
  run.degree = curve_degree(curve);
  run.area = curve_area(metric);
  run.spectrum = curve_spectrum(metric, std::max(e.k_max + 1, kUniversalMaxK + 1), 1e-8, e.seed);
  const auto& ev = run.spectrum.eigenvalues;

  Provenance prov;
  prov.seed = e.seed;
  prov.mesh = "icosphere(" + std::to_string(e.subdiv) + ",0.5) " + e.curve;
  prov.vertices = metric.base.vertex_count();
  prov.simplices = metric.base.simplex_count();
  prov.samples = {{"subdiv", e.subdiv}};
  auto& out = run.reports;
  constexpr int m = 1;
  const double pi = std::numbers::pi;

  for (int k = 1; k <= e.k_max; ++k) {
    const double rhs = 2.0 * (m + 1) * (m + 2) * std::pow(k, 1.0 / m) - 2.0 * m * (m + 1);
    out.push_back(asserted(e.name, "thm-1.2", k, ev[static_cast<std::size_t>(k)], rhs, kSpectralTolerance,
                           {{"m", m}}, prov));
  }
  for (int k = 1; k <= kUniversalMaxK; ++k) {
    const auto [lhs, rhs] = universal_inequality_sides(ev, m, k);
    out.push_back(asserted(e.name, "universal", k, lhs, rhs, kAlgebraicTolerance, {{"m", m}, {"c_m", 2.0 * m * (m + 1)}}, prov));
  }

  std::vector<double> mu(ev.begin(), ev.begin() + e.k_max + 1);
  for (auto& v : mu) v += 2.0 * m * (m + 1);
  for (const auto& st : cheng_yang_bound(mu, 2 * m))
    out.push_back(asserted(e.name, "cheng-yang", st.k, st.mu_next, st.bound, kSpectralTolerance,
                           {{"n", 2 * m},
                            {"shift", 2.0 * m * (m + 1)},
                            {"mu_1", mu.front()},
                            {"hypothesis_lhs", st.hypothesis_lhs},
                            {"hypothesis_rhs", st.hypothesis_rhs},
                            {"hypothesis_holds", st.hypothesis_holds ? 1.0 : 0.0}},
                           prov));

  // Two-sided check |area - d pi| <= 2% of d pi; Vol(CP^1) = pi is pinned by lambda_2 = 8.
  const double target = run.degree * pi;
  out.push_back(asserted(e.name, "degree-volume", 0, std::abs(run.area - target), kDegreeVolumeTolerance * target, 0.0,
                         {{"area", run.area}, {"degree", run.degree}, {"vol_cp1", pi}}, prov));

  for (int k = 1; k <= e.k_max; ++k)
    out.push_back(ratio(e.name, "normalized-cpn", k,
                        ev[static_cast<std::size_t>(k)] * std::pow(run.area, 1.0 / m) /
                            (std::pow(run.degree, 1.0 / m) * std::pow(k, 1.0 / m)),
                        {{"area", run.area}, {"degree", run.degree}}, prov));
  return run;
}

std::vector<BoundReport> verify_cpn(const ExperimentConfig& e) { return verify_cpn_run(e).reports; }

namespace {

nlohmann::ordered_json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

}  // namespace

nlohmann::ordered_json to_json(const SpectrumResult& s) {
  nlohmann::ordered_json j;
  j["k"] = s.k_requested;
  j["eigenvalues"] = s.eigenvalues;
  j["residual_norms"] = s.residual_norms;
  j["iterations"] = s.iterations;
  return j;
}

nlohmann::ordered_json to_json(const IndexEstimate& e) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(e.kind);
  j["value"] = e.value;
  j["standard_error"] = e.standard_error;
  j["samples_grassmann"] = e.samples_grassmann;
  j["samples_stabbing"] = e.samples_stabbing;
  j["radius_r"] = e.radius_r ? nlohmann::ordered_json(*e.radius_r) : nlohmann::ordered_json();
  j["epsilon"] = e.epsilon ? nlohmann::ordered_json(*e.epsilon) : nlohmann::ordered_json();
  if (e.chosen_region) {
    j["chosen_region"] = {{"simplices", e.chosen_region->simplex_ids.size()},
                          {"measure", e.chosen_region->measure},
                          {"volume_fraction", e.chosen_region->volume_fraction}};
  } else {
    j["chosen_region"] = nullptr;
  }
  j["seed"] = e.seed;
  j["fiber_values"] = e.fiber_values;
  return j;
}

nlohmann::ordered_json to_json(const CroftonEstimate& e) {
  nlohmann::ordered_json j;
  j["m"] = e.m;
  j["p"] = e.p;
  j["value"] = e.value;
  j["standard_error"] = e.standard_error;
  j["samples_per_frame"] = e.samples;
  j["frames"] = e.per_frame.size();
  j["anisotropy_spread"] = e.anisotropy_spread;
  j["frame_standard_error"] = e.frame_standard_error;
  j["per_frame"] = e.per_frame;
  j["seed"] = e.seed;
  return j;
}

nlohmann::ordered_json to_json(const CoveringEstimate& e) {
  nlohmann::ordered_json j;
  j["kappa"] = e.kappa;
  j["N_hat"] = e.N_hat;
  j["rho"] = finite_or_string(e.rho);
  j["radii_tested"] = e.radii_tested;
  j["centers_tested"] = e.centers_tested;
  return j;
}

nlohmann::ordered_json to_json(const CapacitorFamily& f) {
  nlohmann::ordered_json j;
  j["n"] = f.n;
  j["r"] = f.r;
  j["centers"] = f.centers;
  j["core_sizes"] = nlohmann::ordered_json::array();
  j["halo_sizes"] = nlohmann::ordered_json::array();
  for (const auto& core : f.cores) j["core_sizes"].push_back(core.size());
  for (const auto& halo : f.halos) j["halo_sizes"].push_back(halo.size());
  j["core_masses"] = f.core_masses;
  j["halo_masses"] = f.halo_masses;
  j["halos_disjoint"] = halos_disjoint(f);
  j["mass_bound"] = f.mass_bound ? nlohmann::ordered_json(*f.mass_bound) : nlohmann::ordered_json();
  j["mass_bound_holds"] = f.mass_bound_holds;
  return j;
}

nlohmann::ordered_json to_json(const CapacitorBound& b) {
  nlohmann::ordered_json j;
  j["bound"] = b.bound;
  j["spectrum_check"] = b.spectrum_check;
  j["built"] = b.built;
  j["stiffness_coupled"] = b.stiffness_coupled;
  j["rayleigh"] = b.rayleigh;
  j["family"] = to_json(b.family);
  return j;
}

nlohmann::ordered_json to_json(const ExplicitBound& b) {
  nlohmann::ordered_json j;
  j["k"] = b.k;
  j["rho"] = finite_or_string(b.rho);
  j["N"] = b.N;
  j["L"] = b.L;
  j["p"] = b.p;
  j["mu_total"] = b.mu_total;
  j["nu_total"] = b.nu_total;
  j["rhs_value"] = b.rhs_value;
  j["term_rho"] = b.term_rho;
  j["term_main"] = b.term_main;
  return j;
}

std::vector<BoundReport> run_experiment(const ExperimentConfig& e) {
  return e.kind == ExperimentConfig::Kind::euclidean ? verify_euclidean(e) : verify_cpn(e);
}

std::vector<BoundReport> run_suite(const SuiteConfig& suite, std::ostream* log) {
  for (const auto& e : suite.experiments) {
    validate(e);
    if (e.kind == ExperimentConfig::Kind::euclidean) {
      (void)make_shape(e.shape);
    } else {
      fs_conformal_factor(parse_curve_spec(e.curve), std::min(e.subdiv, 1));
    }
  }
  std::vector<BoundReport> all;
  for (const auto& e : suite.experiments) {
    const auto t0 = std::chrono::steady_clock::now();
    auto reports = run_experiment(e);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (log) {
      int violated = 0;
      for (const auto& r : reports) violated += r.verdict == Verdict::violated;
      *log << e.name << ": " << reports.size() << " reports, " << violated << " violated (" << secs << " s)\n";
    }
    all.insert(all.end(), std::make_move_iterator(reports.begin()), std::make_move_iterator(reports.end()));
  }
  return all;
}

void emit(const std::vector<BoundReport>& reports, ReportFormat format, const std::string& path) {
  namespace fs = std::filesystem;
  const std::string body = serialize(reports, format);
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f << body;
    f.flush();
    if (!f) {
      f.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot move report into place at " + path);
  }
}

int run(const std::string& config_path, const std::optional<std::string>& out, std::ostream& log) {
  try {
    const auto suite = load_suite_config(config_path);
    const std::string path = out ? *out : suite.output;
    if (path.empty()) throw ConfigError("no output path given");
    const auto reports = run_suite(suite, &log);
    emit(reports, suite.format, path);
    int violated = 0;
    for (const auto& r : reports) violated += r.verdict == Verdict::violated;
    log << reports.size() << " reports written to " << path << ", " << violated << " violated\n";
    return violated ? kExitViolation : kExitOk;
  } catch (const std::exception& ex) {
    log << "error: " << ex.what() << '\n';
    return kExitError;
  }
}

}  // namespace specgeo
