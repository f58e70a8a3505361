// Command-line front end: one subcommand per module plus the report runner.

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "specgeo/capacitor.hpp"
#include "specgeo/config.hpp"
#include "specgeo/cpn.hpp"
#include "specgeo/error.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/harness.hpp"
#include "specgeo/shapes.hpp"
#include "specgeo/spectrum.hpp"

namespace {

using namespace specgeo;

void write_json(const nlohmann::ordered_json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << j.dump(2) << '\n';
}

int finish_reports(const std::vector<BoundReport>& reports, const std::string& out, const std::string& format) {
  const auto fmt = parse_report_format(format);
  if (out.empty()) {
    std::cout << serialize(reports, fmt);
  } else {
    emit(reports, fmt, out);
  }
  int violated = 0;
  for (const auto& r : reports) violated += r.verdict == Verdict::violated;
  std::cerr << reports.size() << " reports, " << violated << " violated\n";
  return violated ? kExitViolation : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral geometry bounds: spectra, intersection indices, capacitors and report runs"};
  app.require_subcommand(1);

  std::string shape, curve, out, format = "jsonl", kind = "mean", strategy = "greedy-multiplicity",
                                metric = "euclidean", config, dump;
  int k = 10, subdiv = 4, stab_budget = 256, m = 2, p = 1, frames = 4;
  long samples = 64;
  double eps = 0.05, r = 0.0, tol = 1e-8, min_jacobian = 0.05;
  std::uint64_t seed = 1;

  auto* spectrum = app.add_subcommand("spectrum", "Smallest Laplace eigenvalues of a shape or curve");
  spectrum->add_option("--shape", shape, "Shape spec, e.g. icosphere(4) or file(mesh.off)");
  spectrum->add_option("--curve", curve, "Curve spec: identity, veronese, rnc(d) or a JSON coefficient list");
  spectrum->add_option("--subdiv", subdiv, "Icosphere level for curves")->check(CLI::NonNegativeNumber);
  spectrum->add_option("--k", k, "Number of eigenvalues")->check(CLI::PositiveNumber);
  spectrum->add_option("--tol", tol, "Relative residual tolerance")->check(CLI::PositiveNumber);

  auto* index = app.add_subcommand("index", "Intersection index estimates");
  index->add_option("--shape", shape)->required();
  index->add_option("--kind", kind, "sup, mean, local, eps or eps-local")
      ->check(CLI::IsMember({"sup", "mean", "local", "eps", "eps-local"}));
  index->add_option("--eps", eps, "Removed volume fraction");
  index->add_option("--r", r, "Local radius");
  index->add_option("--strategy", strategy, "greedy-multiplicity, cap-removal or none");
  index->add_option("--samples", samples, "Haar planes")->check(CLI::PositiveNumber);
  index->add_option("--stab-budget", stab_budget, "Random fibres per plane")->check(CLI::PositiveNumber);
  index->add_option("--min-jacobian", min_jacobian, "Transversality threshold")->check(CLI::PositiveNumber);

  auto* crofton = app.add_subcommand("crofton", "Monte Carlo Crofton constant I(G)");
  crofton->add_option("--m", m, "Plane dimension")->check(CLI::PositiveNumber);
  crofton->add_option("--p", p, "Codimension")->check(CLI::PositiveNumber);
  crofton->add_option("--samples", samples, "Planes per frame")->check(CLI::PositiveNumber);
  crofton->add_option("--frames", frames, "Tangent frames")->check(CLI::PositiveNumber);

  auto* capacitor = app.add_subcommand("capacitor", "Capacitor test functions and their min-max certificate");
  capacitor->add_option("--shape", shape)->required();
  capacitor->add_option("--k", k, "Number of capacitors n")->check(CLI::PositiveNumber);
  capacitor->add_option("--r", r, "Core radius")->required()->check(CLI::PositiveNumber);
  capacitor->add_option("--metric", metric, "euclidean or graph-geodesic");
  capacitor->add_option("--dump", dump, "CSV of per-vertex test functions");

  auto* verify_e = app.add_subcommand("verify-euclidean", "All Euclidean reports for one shape");
  verify_e->add_option("--shape", shape)->required();
  auto* verify_c = app.add_subcommand("verify-cpn", "All curve reports for one curve");
  verify_c->add_option("--curve", curve)->required();
  verify_c->add_option("--subdiv", subdiv)->check(CLI::NonNegativeNumber);
  for (auto* sub : {verify_e, verify_c}) {
    sub->add_option("--k", k, "Largest k reported")->check(CLI::PositiveNumber);
    sub->add_option("--format", format, "jsonl or csv");
  }
  verify_e->add_option("--eps", eps);
  verify_e->add_option("--r", r, "Local radius; default a quarter of the bounding-box diagonal");
  verify_e->add_option("--samples", samples, "Haar planes")->check(CLI::PositiveNumber);
  verify_e->add_option("--strategy", strategy);

  auto* report = app.add_subcommand("report", "Run a config file and emit its reports");
  report->add_option("--config", config)->required()->check(CLI::ExistingFile);

  for (auto* sub : {spectrum, index, crofton, capacitor, verify_e, verify_c})
    sub->add_option("--seed", seed, "Base seed");
  for (auto* sub : {spectrum, index, crofton, capacitor, verify_e, verify_c, report})
    sub->add_option("--out", out, "Output file (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum) {
      if (shape.empty() == curve.empty()) throw ConfigError("give exactly one of --shape and --curve");
      SpectrumResult s;
      if (!shape.empty()) {
        s = solve_spectrum(assemble(make_shape(shape)), k, tol, seed);
      } else {
        s = curve_spectrum(fs_conformal_factor(parse_curve_spec(curve), subdiv), k, tol, seed);
      }
      write_json(to_json(s), out);
      return kExitOk;
    }
    if (*index) {
      const auto c = make_shape(shape);
      IndexOptions opts;
      opts.n_grassmann = static_cast<int>(samples);
      opts.stab_budget = stab_budget;
      opts.seed = seed;
      opts.min_jacobian = min_jacobian;
      IndexEstimate e;
      if (kind == "sup") e = sup_index(c, opts);
      else if (kind == "mean") e = mean_index(c, opts);
      else if (kind == "local") e = local_index(c, r, opts);
      else if (kind == "eps") e = eps_index(c, eps, std::nullopt, parse_region_strategy(strategy), opts);
      else e = eps_index(c, eps, r, parse_region_strategy(strategy), opts);
      write_json(to_json(e), out);
      return kExitOk;
    }
    if (*crofton) {
      write_json(to_json(crofton_constant(m, p, samples, frames, seed)), out);
      return kExitOk;
    }
    if (*capacitor) {
      const auto c = make_shape(shape);
      const auto b = capacitor_upper_bound(c, k, r, parse_metric(metric));
      auto j = to_json(b);
      j["max_dilatation"] = max_dilatation(b.family, to_mm_space(c, parse_metric(metric)));
      write_json(j, out);
      if (!dump.empty()) {
        std::ofstream f(dump);
        if (!f) throw Error("cannot write " + dump);
        f.precision(17);
        f << "vertex";
        for (int d = 0; d < c.ambient_dim(); ++d) f << ",x" << d;
        for (int i = 0; i < k; ++i) f << ",f" << i;
        f << '\n';
        for (std::size_t v = 0; v < c.vertex_count(); ++v) {
          f << v;
          for (int d = 0; d < c.ambient_dim(); ++d) f << ',' << c.vertex(v)(d);
          for (int i = 0; i < k; ++i) f << ',' << b.vertex_functions(static_cast<Eigen::Index>(v), i);
          f << '\n';
        }
      }
      return kExitOk;
    }
    if (*verify_e || *verify_c) {
      ExperimentConfig e;
      e.kind = *verify_e ? ExperimentConfig::Kind::euclidean : ExperimentConfig::Kind::cpn;
      e.shape = shape;
      e.curve = curve;
      e.name = *verify_e ? shape : curve;
      e.subdiv = subdiv;
      e.k_max = k;
      e.eps = eps;
      if (r > 0.0) e.r = r;
      e.strategy = parse_region_strategy(strategy);
      e.budgets.n_grassmann = static_cast<int>(samples);
      e.seed = seed;
      return finish_reports(run_experiment(e), out, format);
    }
    if (*report) {
      return run(config, out.empty() ? std::nullopt : std::optional<std::string>(out), std::cerr);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
