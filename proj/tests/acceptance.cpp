// Copyright 2026 The Anchored Inversion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "anchored/engine.hpp"
#include "anchored/io.hpp"
#include "anchored/mixture.hpp"
#include "anchored/mvn.hpp"
#include "anchored/prior.hpp"
#include "common.hpp"
#include "oracles.hpp"

using namespace anchored;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome mvn_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 gen(20260101);
  double worst = 0.0, min_eig = INFINITY;
  for (int rep = 0; rep < 50; ++rep) {
    const int q = 1 + rep % 3;
    const MatrixXd sigma = oracle::random_spd(6, gen);
    const VectorXd mu = oracle::random_matrix(6, 1, gen);
    const MatrixXd h = oracle::random_matrix(q, 6, gen);
    const VectorXd obs = oracle::random_matrix(q, 1, gen);
    const MvnDistd got = condition_on_linear(MvnDistd(mu, sigma), h, obs);
    const auto want = oracle::two_step_condition(mu, sigma, h, obs);
    worst = std::max({worst, (got.mean - want.mean).cwiseAbs().maxCoeff(), (got.cov - want.cov).cwiseAbs().maxCoeff()});
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<MatrixXd>(got.cov).eigenvalues().minCoeff());
  }
  const double secs = seconds_since(t0);
  // PSD up to round-off on the conditioned directions.
  const bool pass = worst <= 1e-10 && min_eig > -1e-10 && secs < 1.0;
  return {pass, fmt::format("max abs diff {:.2e}, min eigenvalue {:.2e}, {:.2f} s", worst, min_eig, secs)};
}

Outcome structural_posterior() {
  const auto t0 = Clock::now();
  VectorXd x(3), y(3);
  x << 2.0, 7.0, 15.0;
  y << 0.3, 1.1, -0.4;
  const PointData data = PointData::with_constant_mean(x, y);
  StructuralPrior prior;
  prior.lambda_lower = 1.0;
  prior.lambda_upper = 20.0;
  const StructuralPosterior post(data, prior);

  const Index n = 10000;
  Rng rng = substream(20260101, StreamTag::structural, 0);
  std::vector<double> lam, lv, beta;
  for (Index i = 0; i < n; ++i) {
    const StructuralParams s = post.draw(rng);
    lam.push_back(s.lambda);
    lv.push_back(std::log(s.eta2));
    beta.push_back(s.beta(0));
  }

  std::vector<double> grid(post.lambda_grid().data(), post.lambda_grid().data() + post.lambda_grid().size());
  double s2_lo = INFINITY, s2_hi = 0.0;
  for (Index k = 0; k < post.lambda_grid().size(); ++k) {
    s2_lo = std::min(s2_lo, post.statistics(k).s2);
    s2_hi = std::max(s2_hi, post.statistics(k).s2);
  }
  const auto g = oracle::grid_posterior(x, y, grid, prior.a, -60.0, 60.0, 2400, std::log(s2_lo) - 10.0,
                                        std::log(s2_hi) + 14.0, 400);
  const double crit = oracle::ks_critical_01(static_cast<std::size_t>(n));
  const double d_lambda = oracle::ks_discrete(lam, g.lambda, g.lambda_mass);
  // Exact discretized lambda posterior against the grid oracle, no sampling involved.
  double exact_gap = 0.0, fa = 0.0, fb = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    fa += post.probabilities()(static_cast<Index>(k));
    fb += g.lambda_mass[k];
    exact_gap = std::max(exact_gap, std::abs(fa - fb));
  }
  const double d_eta = oracle::ks_statistic(lv, [&](double t) { return oracle::histogram_cdf(g.log_eta2, g.log_eta2_mass, t); });
  const double d_beta = oracle::ks_statistic(beta, [&](double t) { return oracle::histogram_cdf(g.beta, g.beta_mass, t); });

  // Variance moment: three points give nu = 2 and no finite mean, so six points (nu = 5) are used.
  VectorXd x6(6), y6(6);
  x6 << 1, 3, 4, 8, 12, 17;
  y6 << 0.4, 1.1, 0.9, -0.3, 0.2, 1.5;
  const PointData six = PointData::with_constant_mean(x6, y6);
  const double nu = variance_dof(six, prior);
  const double s2 = LambdaStatistics::compute(6.0, six).s2;
  const double mean = s2 / (nu - 2.0);
  const double sd = std::sqrt(2.0) * s2 / ((nu - 2.0) * std::sqrt(nu - 4.0));
  Rng vr = substream(78, StreamTag::structural, 0);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += sample_variance_given_lambda(6.0, six, prior, vr);
  const double z = (acc / n - mean) / (sd / std::sqrt(double(n)));

  const double secs = seconds_since(t0);
  const bool pass = d_lambda < crit && d_eta < crit && d_beta < crit && std::abs(z) < 3.0 && secs < 30.0;
  return {pass, fmt::format("KS lambda {:.4f}, eta2 {:.4f}, beta {:.4f} (critical {:.4f}); exact lambda CDF gap {:.1e}; "
                            "variance mean z = {:.2f}; {:.1f} s",
                            d_lambda, d_eta, d_beta, crit, exact_gap, z, secs)};
}

Outcome forward_solver() {
  double linear_err = 0.0;
  const VectorXd z = solve_process(VectorXd::Constant(80, 3.7), VectorXd::Zero(80), 1.0, 0.0);
  for (Index i = 0; i < 80; ++i) linear_err = std::max(linear_err, std::abs(z(i) - (1.0 - i / 79.0)));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(0.05, 20.0);
  std::normal_distribution<double> nrm;
  double dense_err = 0.0, flux_err = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Index g = 3 + rep % 18;
    VectorXd y(g), s(g);
    for (Index i = 0; i < g; ++i) {
      y(i) = pos(rng);
      s(i) = 10.0 * nrm(rng);
    }
    const double zl = 10.0 * nrm(rng), zr = 10.0 * nrm(rng);
    dense_err = std::max(dense_err, (solve_process(y, s, zl, zr) - oracle::dense_diffusion(y, s, zl, zr)).cwiseAbs().maxCoeff());

    const VectorXd z0 = solve_process(y, VectorXd::Zero(g), zl, zr);
    const auto flux = [&](Index i) { return 2.0 * y(i) * y(i + 1) / (y(i) + y(i + 1)) * (z0(i + 1) - z0(i)); };
    for (Index i = 1; i + 1 < g; ++i) flux_err = std::max(flux_err, std::abs(flux(i) - flux(0)) / std::abs(flux(0)));
  }
  const bool pass = linear_err < 1e-12 && dense_err < 1e-10 && flux_err < 1e-10;
  return {pass, fmt::format("linear profile {:.2e}, dense oracle {:.2e}, flux relative {:.2e}", linear_err, dense_err, flux_err)};
}

Outcome mixture_conditioning() {
  const auto t0 = Clock::now();
  MatrixXd c(2, 2);
  c << 1.0, 0.8, 0.8, 1.0;
  const double datum = 1.0;
  const double want_mean = 0.8 * datum;
  const double want_sd = std::sqrt(1.0 - 0.8 * 0.8);
  double mean_acc = 0.0, sd_acc = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = substream(500 + seed, StreamTag::field, 0);
    const MatrixXd x = sample(MvnDistd(VectorXd::Zero(2), c), 5000, rng);
    const NormalMixture joint = build_kde(WeightedJointSample::uniform(x, 1), 500, 1.0);
    const NormalMixture post = condition(joint, 1, VectorXd::Constant(1, datum));
    mean_acc += mixture_mean(post)(0);
    sd_acc += std::sqrt(mixture_covariance(post)(0, 0));
  }
  const double mean = mean_acc / 10.0, sd = sd_acc / 10.0;
  const double mean_rel = std::abs(mean - want_mean) / want_mean;
  const double sd_rel = std::abs(sd - want_sd) / want_sd;
  const double secs = seconds_since(t0);
  const bool pass = mean_rel <= 0.05 && sd_rel <= 0.15 && secs < 60.0;
  return {pass, fmt::format("mean {:.4f} vs {:.4f} ({:.1f} %), sd {:.4f} vs {:.4f} ({:.1f} %), {:.1f} s", mean, want_mean,
                            100.0 * mean_rel, sd, want_sd, 100.0 * sd_rel, secs)};
}

Outcome anchor_collapse() {
  ScenarioConfig c = testing_support::reference_config();
  c.sample_size = 1500;
  c.neighbors = 150;
  const auto forward = make_forward(c);
  const RunArtifacts art = run_inversion(c, *forward);
  const PosteriorRealizations r = draw_posterior_fields(c, art.posterior, 1000, *forward);
  const MatrixXd h = make_anchor_set(c).functionals();
  double worst = 0.0;
  for (Index i = 0; i < r.fields.rows(); ++i) {
    worst = std::max(worst, (h * r.fields.row(i).transpose() - r.parameters[static_cast<std::size_t>(i)].anchor_values)
                                .cwiseAbs()
                                .maxCoeff());
  }
  return {r.fields.rows() == 1000 && worst < 1e-8, fmt::format("{} realizations, max |H y - anchors| {:.2e}", r.fields.rows(), worst)};
}

Outcome reference_pipeline() {
  const auto t0 = Clock::now();
  ScenarioConfig ab = testing_support::reference_config();
  ScenarioConfig a = ab;
  a.kind = ScenarioKind::a_only;
  const auto forward = make_forward(ab);
  const TruthOutputs truth = make_truth(ab, *forward);
  const ParameterLayout layout = make_layout(ab);
  VectorXd true_anchors(layout.inverted);
  for (Index j = 0; j < layout.inverted; ++j) {
    true_anchors(j) = truth.model(ab.grid.index_of(ab.anchor_locations[static_cast<std::size_t>(j)]));
  }

  const RunArtifacts run_ab = run_inversion(ab, *forward);
  const RunArtifacts run_a = run_inversion(a, *forward);
  const auto rep_ab = draw_posterior_fields(ab, run_ab.posterior, ab.posterior_draws, *forward);
  const auto rep_a = draw_posterior_fields(a, run_a.posterior, a.posterior_draws, *forward);
  const double err_ab = median_anchor_error(rep_ab.parameters, layout.measured_total, true_anchors);
  const double err_a = median_anchor_error(rep_a.parameters, layout.measured_total, true_anchors);
  int covered = 0;
  for (const auto& row : reproduction_stats(rep_ab.reproductions, ab.type_b->values)) covered += row.covered;
  const double secs = seconds_since(t0);
  const bool pass = err_ab < err_a && covered >= 10 && secs < 600.0;
  return {pass, fmt::format("median anchor error AB {:.4f} vs A {:.4f}; AB bands cover {}/15; ESS {:.1f}; {:.1f} s", err_ab,
                            err_a, covered, run_ab.ess, secs)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  const fs::path root = fs::temp_directory_path() / "anchored_acceptance_repro";
  fs::remove_all(root);
  const auto produce = [&](const std::string& name, int workers) {
    ScenarioConfig c = testing_support::reference_config();
    c.sample_size = 1500;
    c.neighbors = 150;
    c.workers = workers;
    const auto forward = make_forward(c);
    const RunArtifacts art = run_inversion(c, *forward);
    write_run(root / name, c, art);
    write_realizations(root / name, c, draw_posterior_fields(c, art.posterior, 200, *forward));
    return root / name;
  };
  const fs::path first = produce("w1a", 1);
  const fs::path second = produce("w1b", 1);
  const fs::path third = produce("w4", 4);
  int files = 0, mismatched = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename();
    ++files;
    const std::string ref = slurp(entry.path());
    if (ref != slurp(second / name) || ref != slurp(third / name)) ++mismatched;
  }
  fs::remove_all(root);
  return {files >= 10 && mismatched == 0,
          fmt::format("{} artifacts compared across 2 single-worker runs and a 4-worker run, {} differ", files, mismatched)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 normal conditioning identities", mvn_identities},
      {"2 structural posterior sampler", structural_posterior},
      {"3 forward solver", forward_solver},
      {"4 mixture conditioning", mixture_conditioning},
      {"5 anchor collapse", anchor_collapse},
      {"6 reference pipeline", reference_pipeline},
      {"7 reproducibility", reproducibility},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("{} criterion {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
