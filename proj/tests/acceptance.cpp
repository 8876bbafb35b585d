// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tvg/app/commands.hpp"
#include "tvg/diagnostics.hpp"
#include "tvg/potentials.hpp"

namespace {

using namespace tvg;
using namespace tvg::app;

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

double sup_diff(const Field& a, const Field& b) { return (a.values - b.values).cwiseAbs().maxCoeff(); }

double safe_ess(const std::vector<double>& s) {
  try {
    return ess(s);
  } catch (const std::domain_error&) {
    return 0.0;  // the chain never moved
  }
}

// Running batch means: the standard error comes from the spread of batch averages.
class BatchMeans {
 public:
  explicit BatchMeans(std::size_t batch) : batch_(batch) {}
  void add(double x) {
    sum_ += x;
    if (++in_batch_ == batch_) {
      means_.push_back(sum_ / static_cast<double>(batch_));
      sum_ = 0.0;
      in_batch_ = 0;
    }
  }
  double mean() const {
    double m = 0.0;
    for (double b : means_) m += b;
    return m / static_cast<double>(means_.size());
  }
  double se() const {
    const double m = mean();
    double v = 0.0;
    for (double b : means_) v += (b - m) * (b - m);
    return std::sqrt(v / static_cast<double>(means_.size() - 1) / static_cast<double>(means_.size()));
  }

 private:
  std::size_t batch_;
  std::size_t in_batch_ = 0;
  double sum_ = 0.0;
  std::vector<double> means_;
};

// 1. Manufactured heat solution, exact boundary trace 2 + 2t.
Result heat_solver() {
  const Field rho = sample_function(Grid1D(201, 0.0, 1.0), [](double t) { return t; });
  std::vector<double> errors;
  for (auto [nx, nt] : {std::pair<std::size_t, std::size_t>{101, 400}, {201, 800}, {401, 1600}}) {
    const auto setup = default_heat_setup(nx, nt, 100);
    const Vector y = heat_model(setup)->apply(rho);
    const Vector exact = (2.0 + 2.0 * setup.obs_times.array()).matrix();
    errors.push_back((y - exact).cwiseAbs().maxCoeff());
  }
  const double p1 = std::log2(errors[0] / errors[1]);
  const double p2 = std::log2(errors[1] / errors[2]);
  return {errors[0] < 1e-3 && p1 >= 1.9 && p2 >= 1.9,
          "max error " + fmt(errors[0]) + " / " + fmt(errors[1]) + " / " + fmt(errors[2]) +
              ", order " + fmt(p1) + ", " + fmt(p2)};
}

// 2. pCN with R = 0 against the closed-form Gaussian posterior.
Result gaussian_oracle() {
  const auto cfg = resolve_config({{"lambda", "0"}, {"d", "0.08"}, {"beta", "0.02"},
                                   {"n_samples", "200000"}, {"burn_in", "50000"}, {"thin", "100"}});
  const ObservationSet obs = make_synthetic_data(cfg).obs;
  const ChainOutput out = run_sampler(cfg, obs, cfg.n);
  const GpPosterior exact = gp_posterior_exact(SqExpKernel(cfg.gamma, cfg.d), unknown_grid(cfg.n), obs);
  const double err = sup_diff(out.mean, exact.mean);
  return {err < 0.02, "sup |mcmc - exact| = " + fmt(err) + " (accept " +
                          fmt(out.stats.outer_accept_rate()) + ")"};
}

const MeshStudy& mesh_study() {
  static std::optional<MeshStudy> study;
  if (!study) {
    const auto cfg = resolve_config({{"n_list", "89,177,353"}, {"n_samples", "1000000"},
                                     {"burn_in", "200000"}, {"thin", "100"}, {"tv_compare", "true"}});
    study = run_mesh_study(cfg, make_synthetic_data(cfg).obs);
  }
  return *study;
}

std::string arm_detail(const MeshStudy& s, const MeshArm& arm) {
  std::string d;
  for (std::size_t i = 0; i < s.n_list.size(); ++i) {
    for (std::size_t j = i + 1; j < s.n_list.size(); ++j) {
      d += std::to_string(s.n_list[i]) + "-" + std::to_string(s.n_list[j]) + " " +
           fmt(arm.sup_diff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) + ", ";
    }
  }
  d += "accept";
  for (double a : arm.accept_rate) d += " " + fmt(a);
  return d;
}

// 3. TG posterior means agree across meshes.
Result tg_mesh_invariance() {
  const MeshStudy& s = mesh_study();
  return {s.tg.max_sup_diff < 0.05, "max sup diff " + fmt(s.tg.max_sup_diff) + " (" + arm_detail(s, s.tg) + ")"};
}

// 4. Pure TV prior means drift further apart than the TG ones.
Result tv_mesh_dependence() {
  const MeshStudy& s = mesh_study();
  return {s.tv->max_sup_diff > s.tg.max_sup_diff,
          "tv " + fmt(s.tv->max_sup_diff) + " vs tg " + fmt(s.tg.max_sup_diff) + " (" +
              arm_detail(s, *s.tv) + ")"};
}

struct HeatRuns {
  std::optional<ChainOutput> pcn, spcn;
};

const HeatRuns& heat_runs() {
  static HeatRuns runs;
  if (!runs.pcn) {
    auto cfg = resolve_config({{"problem", "heat-robin"}, {"n_samples", "100000"},
                               {"burn_in", "20000"}, {"thin", "100"}, {"sampler", "pcn"}});
    const ObservationSet obs = make_synthetic_data(cfg).obs;
    runs.pcn.emplace(run_sampler(cfg, obs, cfg.n));
    cfg.sampler = Kernel::Spcn;
    runs.spcn.emplace(run_sampler(cfg, obs, cfg.n));
  }
  return runs;
}

// 5. Outer acceptance rates on the Robin problem.
Result heat_acceptance() {
  const HeatRuns& r = heat_runs();
  const double a_pcn = r.pcn->stats.outer_accept_rate();
  const double a_spcn = r.spcn->stats.outer_accept_rate();
  return {a_pcn >= 0.05 && a_pcn <= 0.25 && a_spcn >= 0.30 && a_spcn <= 0.50,
          "pcn " + fmt(a_pcn) + " (want 0.05..0.25), spcn " + fmt(a_spcn) +
              " (want 0.30..0.50, inner " + fmt(r.spcn->stats.inner_accept_rate()) + ")"};
}

// 6. S-pCN ESS at least twice pCN ESS at each probe.
Result heat_efficiency() {
  const HeatRuns& r = heat_runs();
  bool pass = true;
  std::string d;
  for (std::size_t p = 0; p < r.pcn->traces.size(); ++p) {
    const double e_pcn = safe_ess(r.pcn->traces[p]);
    const double e_spcn = safe_ess(r.spcn->traces[p]);
    pass = pass && e_spcn >= 2.0 * e_pcn && e_spcn > 0.0;
    const double t = r.pcn->mean.grid.point(r.pcn->config.probe_nodes[p]);
    d += "t=" + fmt(t) + " ess " + fmt(e_spcn) + " vs " + fmt(e_pcn) + "; ";
  }
  return {pass, d};
}

// 7. S-pCN on exp(-|u|^2/2 - |u2 - u1|) w.r.t. N(0, I) against a plain random-walk reference.
Result detailed_balance() {
  // u1, u2, u1^2, u2^2, u1 u2, each over 1000 batches
  using Stats = std::vector<BatchMeans>;
  auto record = [](Stats& s, double a, double b) {
    s[0].add(a);
    s[1].add(b);
    s[2].add(a * a);
    s[3].add(b * b);
    s[4].add(a * b);
  };

  constexpr std::size_t kReferenceSteps = 10'000'000;
  Stats rwm(5, BatchMeans(kReferenceSteps / 1000));
  {
    // Lebesgue density exp(-|u|^2 - |u2 - u1|).
    std::mt19937_64 eng(20240611);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> unif;
    auto logp = [](double a, double b) { return -(a * a + b * b) - std::abs(b - a); };
    double a = 0.0, b = 0.0, lp = logp(a, b);
    for (std::size_t i = 0; i < kReferenceSteps; ++i) {
      const double a2 = a + 1.1 * z(eng), b2 = b + 1.1 * z(eng);
      const double lp2 = logp(a2, b2);
      if (std::log(unif(eng)) < lp2 - lp) a = a2, b = b2, lp = lp2;
      record(rwm, a, b);
    }
  }

  const Grid1D g(2, 0.0, 1.0);
  const auto prior = std::make_shared<const CholeskyFactor>(factor(CovarianceOperator{g, Matrix::Identity(2, 2), 0.0}));
  SamplerConfig cfg;
  cfg.beta = 0.5;
  cfg.k = 5;
  cfg.n_samples = 2'000'000;
  cfg.burn_in = 1000;
  cfg.thin = 1000;
  cfg.seed = 7;
  cfg.probe_nodes = {0, 1};
  const Target target{[](const Field& u) { return 0.5 * u.values.squaredNorm(); },
                      [](const Field& u) { return std::abs(u.values[1] - u.values[0]); }};
  const ChainOutput out = run_chain(Kernel::Spcn, Field(g), cfg, Problem{prior, target});
  Stats spcn(5, BatchMeans(cfg.n_samples / 1000));
  for (std::size_t i = 0; i < out.traces[0].size(); ++i) record(spcn, out.traces[0][i], out.traces[1][i]);

  const char* names[] = {"E u1", "E u2", "E u1^2", "E u2^2", "E u1u2"};
  bool pass = true;
  std::string d;
  for (std::size_t q = 0; q < 5; ++q) {
    const BatchMeans& a = spcn[q];
    const BatchMeans& b = rwm[q];
    const double z = std::abs(a.mean() - b.mean()) / std::hypot(a.se(), b.se());
    pass = pass && z < 3.0;
    d += std::string(names[q]) + " " + fmt(a.mean()) + " vs " + fmt(b.mean()) + " (" + fmt(z) + " se); ";
  }
  return {pass, d};
}

// 8. Invariant checks without the unit-test harness.
Result properties() {
  std::mt19937_64 eng(99);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::string> failed;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok && std::find(failed.begin(), failed.end(), what) == failed.end()) failed.push_back(what);
  };
  auto random_field = [&](const Grid1D& g) {
    Vector v(static_cast<Eigen::Index>(g.size()));
    const double scale = std::pow(10.0, 3.0 * unif(eng));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale * unif(eng);
    if (unif(eng) > 0.0) {
      for (Eigen::Index i = v.size() / 2; i < v.size(); ++i) v[i] += scale;
    }
    return Field(g, std::move(v));
  };

  for (int c = 0; c < 500; ++c) {
    const Grid1D g(2 + static_cast<std::size_t>(std::abs(unif(eng)) * 300), 0.0, 1.0);
    const Field u = random_field(g), v = random_field(g);
    const double tu = tv_seminorm(u), tv = tv_seminorm(v);
    const double tol = 1e-12 * (tu + tv + 1.0);
    check(tu >= 0.0 && tv >= 0.0, "tv nonnegative");
    check(tv_seminorm(Field(g, u.values + v.values)) <= tu + tv + tol, "tv triangle inequality");
    const double shift = 100.0 * unif(eng);
    check(std::abs(tv_seminorm(Field(g, (u.values.array() + shift).matrix())) - tu) <= 1e-9 * (tu + std::abs(shift) * g.size()),
          "tv translation invariance");
  }
  for (std::size_t n : {89, 177, 353}) {
    check(tv_seminorm(sample_function(Grid1D(n, 0.0, 1.0), step_signal)) == 2.0, "tv mesh consistency");
  }

  double worst_reconstruction = 0.0;
  for (std::size_t n : {50, 89, 177, 353}) {
    for (double gamma : {0.1, 1.0}) {
      for (double d : {0.02, 0.05}) {
        const auto cov = build_covariance(SqExpKernel(gamma, d), Grid1D(n, 0.0, 1.0));
        check(cov.matrix.isApprox(cov.matrix.transpose(), 0.0), "covariance symmetric");
        const CholeskyFactor f = factor(cov);
        Matrix target = cov.matrix;
        target.diagonal().array() += f.jitter();
        const double err = (f.lower() * f.lower().transpose() - target).cwiseAbs().maxCoeff() / gamma;
        worst_reconstruction = std::max(worst_reconstruction, err);
        check(err < 1e-10, "cholesky reconstruction");
      }
    }
  }

  for (int c = 0; c < 100000; ++c) {
    const double cur = 50.0 * unif(eng);
    const double prop = c % 7 == 0 ? cur : 50.0 * unif(eng);
    const double p = acceptance_probability(cur, prop);
    check(p >= 0.0 && p <= 1.0, "acceptance probability in [0,1]");
    if (prop <= cur) check(p == 1.0, "acceptance probability 1 downhill");
  }

  std::string ess_detail;
  for (double phi : {0.5, 0.9}) {
    std::normal_distribution<double> z;
    std::vector<double> s(1'000'000);
    double x = z(eng) / std::sqrt(1.0 - phi * phi);
    for (auto& v : s) v = x = phi * x + z(eng);
    const double expected = static_cast<double>(s.size()) * (1.0 - phi) / (1.0 + phi);
    const double rel = std::abs(ess(s) - expected) / expected;
    check(rel < 0.15, "AR(1) ESS");
    ess_detail += " ar" + fmt(phi) + " " + fmt(rel);
  }

  {
    auto cfg = resolve_config({{"n", "45"}, {"n_samples", "3000"}, {"burn_in", "500"}, {"thin", "7"}});
    const ObservationSet obs = make_synthetic_data(cfg).obs;
    for (Kernel k : {Kernel::Pcn, Kernel::Spcn}) {
      cfg.sampler = k;
      const ChainOutput a = run_sampler(cfg, obs, cfg.n), b = run_sampler(cfg, obs, cfg.n);
      bool same = a.samples.size() == b.samples.size() && a.count == b.count &&
                  std::memcmp(a.mean.values.data(), b.mean.values.data(), sizeof(double) * cfg.n) == 0;
      for (std::size_t i = 0; same && i < a.samples.size(); ++i) {
        same = std::memcmp(a.samples[i].values.data(), b.samples[i].values.data(), sizeof(double) * cfg.n) == 0;
      }
      check(same, "bit-exact rerun " + kernel_name(k));
    }
    auto tv = resolve_config({{"problem", "tv-denoising"}, {"n", "45"}, {"n_samples", "3000"}, {"burn_in", "0"}});
    const ChainOutput a = run_sampler(tv, obs, tv.n), b = run_sampler(tv, obs, tv.n);
    check(std::memcmp(a.mean.values.data(), b.mean.values.data(), sizeof(double) * tv.n) == 0,
          "bit-exact rerun rw-tv");
  }

  std::string d = failed.empty() ? "all invariants hold" : "failed:";
  for (const auto& f : failed) d += " [" + f + "]";
  d += "; worst cholesky error " + fmt(worst_reconstruction) + " gamma; ess rel err" + ess_detail;
  return {failed.empty(), d};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Result()>> criteria{
      heat_solver,      gaussian_oracle,  tg_mesh_invariance, tv_mesh_dependence,
      heat_acceptance,  heat_efficiency,  detailed_balance,   properties};
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const std::size_t id = i + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Result r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += r.pass ? 0 : 1;
    std::cout << "criterion " << id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.detail << "  ["
              << fmt(secs) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
