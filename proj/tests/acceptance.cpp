// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Tolerances are the pinned ones; nothing here is tuned to make a line pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "specgeo/capacitor.hpp"
#include "specgeo/config.hpp"
#include "specgeo/cpn.hpp"
#include "specgeo/grassmann.hpp"
#include "specgeo/harness.hpp"
#include "specgeo/reports.hpp"
#include "specgeo/shapes.hpp"
#include "specgeo/spectrum.hpp"

#ifndef SPECGEO_FIXTURES
#define SPECGEO_FIXTURES "configs/fixtures.json"
#endif

using namespace specgeo;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<void(Outcome&)>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& ex) {
    o.pass = false;
    o.detail << " [exception: " << ex.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %s %s:%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id.c_str(), title.c_str(), o.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

double ev(const std::vector<double>& e, int k) { return e.at(static_cast<std::size_t>(k - 1)); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ConformalMetric curve_metric(int degree) { return fs_conformal_factor(rational_normal_curve(degree), 4); }

}  // namespace

int main() {
  criterion("C1", "spectrum oracles", [](Outcome& o) {
    const std::vector<double> circle_want{0, 1, 1, 4, 4, 9, 9, 16, 16};
    const auto c = solve_spectrum(assemble(make_circle(2048)), 9, 1e-10, kSeed).eigenvalues;
    double worst = std::abs(c[0]);
    o.require(std::abs(c[0]) < 1e-8, "circle lambda_1 not zero");
    for (std::size_t i = 1; i < 9; ++i) {
      worst = std::max(worst, rel(c[i], circle_want[i]));
      o.require(rel(c[i], circle_want[i]) <= 0.005, "circle eigenvalue " + std::to_string(i + 1));
    }
    o.detail << " circle worst rel " << num(worst);

    const std::vector<double> sphere_want{0, 2, 2, 2, 6, 6, 6, 6, 6, 12};
    const auto s = solve_spectrum(assemble(make_icosphere(4)), 10, 1e-10, kSeed).eigenvalues;
    worst = 0.0;
    o.require(std::abs(s[0]) < 1e-8, "sphere lambda_1 not zero");
    for (std::size_t i = 1; i < 10; ++i) {
      worst = std::max(worst, rel(s[i], sphere_want[i]));
      o.require(rel(s[i], sphere_want[i]) <= 0.02, "sphere eigenvalue " + std::to_string(i + 1));
    }
    o.detail << ", sphere worst rel " << num(worst);
  });

  criterion("C2", "Crofton constants", [](Outcome& o) {
    for (auto [m, p, want] : {std::tuple{1, 1, 2 / pi}, std::tuple{2, 1, 0.5}}) {
      const auto est = crofton_constant(m, p, 100000, 4, kSeed);
      o.detail << " (" << m << "," << p << ") I=" << num(est.value) << " rel " << num(rel(est.value, want))
               << " spread " << num(est.anisotropy_spread) << " vs 2se " << num(2 * est.frame_standard_error);
      o.require(rel(est.value, want) <= 0.01, "I(G) off by more than 1%");
      o.require(est.anisotropy_spread <= 2 * est.frame_standard_error, "frame spread above 2 standard errors");
    }
  });

  criterion("C3", "exact indices", [](Outcome& o) {
    IndexOptions io;
    io.seed = kSeed;
    for (const char* shape : {"circle(1024)", "sphere(4)", "ellipsoid(1,2,3,4)"}) {
      const auto c = make_shape(shape);
      const double sup = sup_index(c, io).value, mean = mean_index(c, io).value;
      o.detail << " " << shape << " sup " << sup << " mean " << mean << ";";
      o.require(sup == 2.0 && mean == 2.0, std::string(shape) + " index is not 2");
    }
    IndexOptions many = io;
    many.n_grassmann = 256;
    const double torus = sup_index(make_torus(2, 0.5, 64), many).value;
    o.detail << " torus(2,0.5,64) sup " << torus << " over 256 planes";
    o.require(torus == 4.0, "torus sup index is not 4");
  });

  criterion("C4", "volume lemma", [](Outcome& o) {
    IndexOptions io;
    io.seed = kSeed;
    const double I1 = crofton_constant(1, 1, 100000, 4, kSeed).value;
    const double I2 = crofton_constant(2, 1, 100000, 4, kSeed).value;
    for (const char* shape : {"circle(1024)", "sphere(4)", "ellipsoid(1,2,3,4)", "torus(2,0.5,64)",
                              "spiky_sphere(4,2,0.4,0.12)"}) {
      const auto c = make_shape(shape);
      const double I = c.dim() == 1 ? I1 : I2;
      const double rhs = 2.0 / I * mean_index(c, io).value * max_projected_volume(c, 64, 256, kSeed);
      o.detail << " " << shape << " " << num(c.volume()) << "<=" << num(rhs) << ";";
      o.require(c.volume() <= rhs * 1.05, std::string(shape) + " volume exceeds the bound");
    }
  });

  criterion("C5", "explicit corollary bound for k <= 20", [](Outcome& o) {
    for (const char* shape : {"circle(1024)", "sphere(4)", "torus(2,0.5,32)"}) {
      const auto c = make_shape(shape);
      const auto e = solve_spectrum(assemble(c), 20, 1e-8, kSeed).eigenvalues;
      const double N = covering_number(to_mm_space(c), kInf, 12, 256).N_hat;
      const double L = ball_growth_constant(c, growth_radii(c, 12), 256).L_hat;
      int bad = 0;
      double tightest = kInf;
      for (int k = 1; k <= 20; ++k) {
        const auto b = explicit_bound(k, kInf, N, L, c.dim(), c.volume(), c.volume());
        bad += ev(e, k) > b.rhs_value;
        if (k > 1) tightest = std::min(tightest, b.rhs_value / ev(e, k));
      }
      o.detail << " " << shape << " N=" << N << " L=" << num(L) << " min rhs/lambda " << num(tightest) << ";";
      o.require(bad == 0, std::string(shape) + ": " + std::to_string(bad) + " violations");
    }
  });

  criterion("C6", "capacitor certificates", [](Outcome& o) {
    for (auto [shape, r] : {std::pair{"circle(1024)", 0.15}, std::pair{"sphere(3)", 0.2}}) {
      const auto c = make_shape(shape);
      const auto x = to_mm_space(c);
      for (int n : {2, 3, 4}) {
        const auto b = capacitor_upper_bound(c, n, r);
        const double dil = max_dilatation(b.family, x);
        o.detail << " " << shape << " n=" << n << " bound " << num(b.bound) << " lambda " << num(b.spectrum_check)
                 << ";";
        const std::string tag = std::string(shape) + " n=" + std::to_string(n);
        o.require(halos_disjoint(b.family), tag + " halos overlap");
        o.require(dil <= 1.0 / r + 1e-9, tag + " dilatation " + num(dil));
        o.require(b.bound >= b.spectrum_check - 1e-6 * b.spectrum_check, tag + " bound below lambda_n");
      }
    }
  });

  criterion("C7", "perturbation stability", [](Outcome& o) {
    const auto spiky = make_spiky_sphere(4, 2, 0.4, 0.12);
    const double frac = spike_region(spiky, 2, 0.12).volume_fraction;
    o.detail << " spike area " << num(100 * frac) << "%";
    o.require(frac <= 0.03, "spikes cover more than 3% of the area");

    ExperimentConfig e;
    e.seed = kSeed;
    e.k_max = 20;
    e.eps = 0.05;
    e.shape = e.name = "spiky_sphere(4,2,0.4,0.12)";
    const auto a = verify_euclidean_run(e);
    e.shape = e.name = "sphere(4)";
    const auto b = verify_euclidean_run(e);
    o.detail << ", sup " << a.sup << " (smooth " << b.sup << "), eps index " << num(a.eps_mean.value) << " +- "
             << num(a.eps_mean.standard_error);
    o.require(a.sup >= 4, "spiky sup index below 4");
    o.require(a.eps_mean.value <= 2.0 + a.eps_mean.standard_error, "eps index above 2 + se");

    auto rhs_at = [](const EuclideanRun& run, int k) {
      for (const auto& r : run.reports)
        if (r.inequality_id == "thm-a3-mean" && r.k == k) return *r.rhs;
      throw std::runtime_error("missing thm-a3-mean report");
    };
    const double ratio = rhs_at(a, 5) / rhs_at(b, 5);
    o.detail << ", mean-form bound ratio " << num(ratio);
    o.require(ratio <= 3.0 && ratio >= 1.0 / 3.0, "bounds differ by more than a factor 3");
    for (const auto& r : a.reports)
      if (r.inequality_id == "thm-a3-mean") o.require(r.verdict == Verdict::holds, "spiky mean-form bound violated");
  });

  criterion("C8", "CP1 sharpness", [](Outcome& o) {
    for (int d : {1, 2, 3}) {
      const auto e = curve_spectrum(curve_metric(d), 21, 1e-10, kSeed).eigenvalues;
      int bad = 0;
      for (int k = 1; k <= 20; ++k) bad += ev(e, k + 1) > (12.0 * k - 4) * (1 + 0.02);
      o.detail << " d=" << d << " lambda_2 " << num(e[1]) << ";";
      o.require(bad == 0, "degree " + std::to_string(d) + ": " + std::to_string(bad) + " violations");
      if (d == 1) {
        o.require(rel(e[1], 8.0) <= 0.02, "identity lambda_2 not 8");
      }
    }
  });

  criterion("C9", "universal inequality and Cheng-Yang", [](Outcome& o) {
    double worst = kInf;
    for (int d : {1, 2, 3}) {
      const auto e = curve_spectrum(curve_metric(d), 16, 1e-10, kSeed).eigenvalues;
      for (int k = 1; k <= 15; ++k) {
        const double res = universal_inequality_residual(e, 1, k);
        worst = std::min(worst, res);
        if (res < -1e-9) o.require(false, "degree " + std::to_string(d) + " k=" + std::to_string(k) + " residual " + num(res));
      }
    }
    o.detail << " worst computed residual " << num(worst);

    const auto cp1 = closed_form_spectrum({ClosedFormShape::Kind::cpm, 1.0, 1.0, 1}, 16);
    for (int k : {1, 4}) {
      const auto [lhs, rhs] = universal_inequality_sides(cp1, 1, k);
      o.require(std::abs(rhs - lhs) < 1e-9 * rhs, "closed-form equality fails at k=" + std::to_string(k));
    }
    std::vector<double> mu(cp1.begin(), cp1.begin() + 6);
    for (auto& v : mu) v += 4.0;
    const auto step = cheng_yang_bound(mu, 2).front();
    o.detail << ", Cheng-Yang mu_2 " << step.mu_next << " bound " << step.bound;
    o.require(step.mu_next == 3 * mu[0] && step.bound == step.mu_next, "shifted CP1 is not the equality case");
  });

  criterion("C10", "degree and area", [](Outcome& o) {
    for (int d : {1, 2, 3}) {
      const double area = curve_area(curve_metric(d));
      o.detail << " d=" << d << " area/pi " << num(area / pi) << ";";
      o.require(rel(area, d * pi) <= 0.01, "degree " + std::to_string(d) + " area off by more than 1%");
    }
  });

  criterion("C11", "fixture suite determinism and soundness", [](Outcome& o) {
    namespace fs = std::filesystem;
    const auto suite = load_suite_config(SPECGEO_FIXTURES);
    const auto dir = fs::temp_directory_path() / "specgeo_acceptance";
    fs::create_directories(dir);
    std::string bytes[2];
    std::vector<BoundReport> reports;
    for (int i = 0; i < 2; ++i) {
      reports = run_suite(suite);
      const auto path = (dir / ("run" + std::to_string(i) + ".jsonl")).string();
      emit(reports, ReportFormat::json_lines, path);
      std::ifstream in(path, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      bytes[i] = s.str();
    }
    o.detail << " " << reports.size() << " reports, " << bytes[0].size() << " bytes";
    o.require(!bytes[0].empty() && bytes[0] == bytes[1], "runs differ");

    int violated = 0;
    std::set<std::string> ids;
    for (const auto& r : reports) {
      ids.insert(r.inequality_id);
      if (r.verdict == Verdict::violated) {
        ++violated;
        o.detail << " violated: " << r.fixture << " " << r.inequality_id << " k=" << r.k;
      }
    }
    o.require(violated == 0, std::to_string(violated) + " asserted reports violated");
    for (const auto& id : inequality_ids()) o.require(ids.count(id) == 1, "no report for " + id);
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
