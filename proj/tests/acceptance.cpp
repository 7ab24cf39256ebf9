// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria 5-7 share one desk-scale training + benchmark
// run; criterion 8 drives the installed CLI binary.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metaprior/bo.hpp"
#include "metaprior/checkpoint.hpp"
#include "metaprior/math.hpp"
#include "metaprior/prior.hpp"
#include "metaprior/reptile.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace metaprior;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << criterion
            << ": " << what;
  if (!detail.empty()) std::cout << " (" << detail << ")";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- criterion 1: analytic gradients vs central finite differences ----

void criterion_gradients() {
  const auto start = Clock::now();
  RandomStream rng(1001);
  Scalar worst = 0;

  for (int trial = 0; trial < 50; ++trial) {
    const Layout layout = trial < 47 ? dense_layout({1, 16, 16, 1})
                                     : dense_layout({1, 64, 64, 1});
    const WeightVector w = init_weights(layout, 4000 + trial);
    Minibatch batch;
    const Index size = 2 + static_cast<Index>(rng.next_u64() % 7);
    batch.xs.resize(size);
    batch.ys.resize(size);
    for (Index i = 0; i < size; ++i) {
      batch.xs[i] = rng.uniform(-4.0, 4.0);
      batch.ys[i] = rng.uniform(-1.0, 1.0);
    }

    const LossGrad lg = mse_loss_grad(w, batch);
    const Vector fd = oracles::finite_difference_grad(w, batch, 1e-5);
    worst = std::max(
        worst, oracles::max_relative_gradient_error(lg.grad.values, fd));
  }

  const double elapsed = seconds_since(start);
  report(1, worst < 1e-5 && elapsed < 10.0,
         "analytic gradient matches central finite differences",
         "worst rel err " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 2: GP posterior vs dense-inverse oracle ----

void criterion_gp_oracle() {
  const auto start = Clock::now();
  RandomStream rng(2002);
  KernelParams p;
  p.noise_var = 1e-6;
  Scalar worst = 0;

  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    ObservationSet obs;
    for (int i = 0; i < n; ++i) {
      obs.add(rng.uniform(-4.0, 4.0), rng.uniform(-1.0, 1.0));
    }
    const GPPosterior post = fit(obs, p);
    for (int q = 0; q < 50; ++q) {
      const Scalar x = rng.uniform(-4.0, 4.0);
      const auto [mean, var] = post.predict(x);
      const auto [omean, ovar] =
          oracles::dense_gp_oracle(obs, p, post.effective_noise_var(), x);
      worst = std::max(worst, std::abs(mean - omean));
      worst = std::max(worst, std::abs(var - std::max(ovar, 0.0)));
    }
  }

  const double elapsed = seconds_since(start);
  report(2, worst < 1e-8 && elapsed < 10.0,
         "posterior matches the dense-inverse oracle",
         "worst abs err " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 3: closed-form EI vs quadrature ----

void criterion_ei_quadrature() {
  const auto start = Clock::now();
  RandomStream rng(3003);
  Scalar worst = 0;

  for (int trial = 0; trial < 200; ++trial) {
    const Scalar mu = rng.uniform(-2.0, 2.0);
    const Scalar sigma = rng.uniform(0.05, 3.0);
    const Scalar best = rng.uniform(-3.0, 3.0);
    const Scalar closed = acquire_from_moments(
        mu, sigma * sigma, best, AcquisitionKind::kExpectedImprovement);
    worst = std::max(worst,
                     std::abs(closed - oracles::ei_quadrature(mu, sigma, best)));
  }

  const double elapsed = seconds_since(start);
  report(3, worst < 1e-6 && elapsed < 10.0,
         "closed-form EI matches numerical quadrature",
         "worst abs err " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 4: meta-step fixed point and interpolation identities ----

void criterion_meta_step_algebra() {
  const Layout layout = dense_layout({1, 16, 16, 1});
  RandomStream rng(4004);
  bool fixed_point_exact = true;
  Scalar worst_interp = 0;

  ReptileConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const WeightVector theta = init_weights(layout, 7000 + trial);
    cfg.outer_step = rng.uniform(0.05, 1.0);

    // fixed point: all candidates equal theta -> theta is returned bit-exact
    const std::vector<WeightVector> same(1 + trial % 5, theta);
    const MetaState fp = meta_step(MetaState{theta, 0}, same, cfg);
    fixed_point_exact &= (fp.theta.values == theta.values);

    // interpolation: theta' = (1 - a) theta + a mean(candidates)
    std::vector<WeightVector> candidates;
    const int n = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < n; ++i) {
      WeightVector c = theta;
      for (Index j = 0; j < c.values.size(); ++j) {
        c.values[j] += rng.uniform(-1.0, 1.0);
      }
      candidates.push_back(std::move(c));
    }
    const MetaState next = meta_step(MetaState{theta, 0}, candidates, cfg);
    Vector mean = Vector::Zero(theta.values.size());
    for (const auto& c : candidates) mean += c.values;
    mean /= static_cast<Scalar>(n);
    const Vector expected =
        theta.values * (1.0 - cfg.outer_step) + cfg.outer_step * mean;
    worst_interp = std::max(
        worst_interp,
        (next.theta.values - expected).lpNorm<Eigen::Infinity>());
  }

  // the two algebraic routes agree to accumulated rounding (~1e-16 scale)
  report(4, fixed_point_exact && worst_interp < 1e-13,
         "meta-step fixed point (bit-exact) and interpolation identities",
         std::string("fixed point exact=") +
             (fixed_point_exact ? "yes" : "no") + ", interp max err " +
             fmt(worst_interp));
}

// ---- criteria 5-7: desk-scale benchmark, trend, prior shape ----

struct DeskScaleOutputs {
  MetaState state;
  BenchResult bench;
  bool ok = false;
};

DeskScaleOutputs run_desk_scale() {
  DeskScaleOutputs out;

  ReptileConfig train_cfg;
  train_cfg.outer_iters = 2000;
  train_cfg.seed = 2026;
  const TaskClassConfig task_cfg;

  std::cerr << "[info] criterion 5: training 2000 outer iterations...\n";
  out.state = train(train_cfg, task_cfg, dense_layout({1, 64, 64, 1}));

  BORunConfig bo_cfg;
  bo_cfg.seed = train_cfg.seed;
  bo_cfg.mc.sample_count = 100000;
  bo_cfg.eval_grid_size = 256;
  bo_cfg.observation_noise_var = task_cfg.noise_var;

  KShotOptions opts;
  opts.eval_iterations = 32;
  opts.eval_batch = 10;
  opts.prior_grid_size = 1024;
  opts.on_cell = [](int k, PriorKind kind, Scalar mse) {
    std::cerr << "[info] k=" << k << " " << to_string(kind) << " mse=" << mse
              << "\n";
  };

  out.bench =
      evaluate_kshot(&out.state.theta, bo_cfg, task_cfg, opts);
  out.ok = true;
  return out;
}

void criterion_table3(const DeskScaleOutputs& desk, double elapsed) {
  if (!desk.ok) {
    report(5, false, "desk-scale benchmark", "training/evaluation failed");
    return;
  }

  std::cout << "    k   mse_uniform      mse_meta         ratio\n";
  bool meta_below_everywhere = true;
  for (const BenchRow& row : desk.bench.rows) {
    const Scalar ratio = row.mse_uniform / row.mse_meta;
    char line[128];
    std::snprintf(line, sizeof(line), "   %2d   %-14.6g   %-14.6g   %.3g",
                  row.k, row.mse_uniform, row.mse_meta, ratio);
    std::cout << line << "\n";
    if (!(row.mse_meta < row.mse_uniform)) meta_below_everywhere = false;
  }

  const Scalar gap_k1 =
      desk.bench.rows[0].mse_uniform / desk.bench.rows[0].mse_meta;
  const bool gap_ok = gap_k1 >= 10.0;
  const bool uniform_decays =
      desk.bench.rows[9].mse_uniform < desk.bench.rows[0].mse_uniform;
  const bool time_ok = elapsed < 900.0;

  report(5,
         meta_below_everywhere && gap_ok && uniform_decays && time_ok,
         "desk-scale benchmark: meta below uniform at every k, >=1 order "
         "gap at k=1, uniform decays by k=10",
         "(a) meta<uniform all k: " +
             std::string(meta_below_everywhere ? "yes" : "no") +
             ", (b) k=1 gap " + fmt(gap_k1) + "x, (c) uniform k10/k1 " +
             fmt(desk.bench.rows[9].mse_uniform) + "/" +
             fmt(desk.bench.rows[0].mse_uniform) + ", " + fmt(elapsed) + " s");
}

void criterion_log_linear_trend(const DeskScaleOutputs& desk) {
  if (!desk.ok) {
    report(6, false, "log-MSE trend vs k", "no benchmark data");
    return;
  }
  std::vector<Scalar> ks, log_uniform, log_meta;
  for (const BenchRow& row : desk.bench.rows) {
    ks.push_back(row.k);
    log_uniform.push_back(std::log(row.mse_uniform));
    log_meta.push_back(std::log(row.mse_meta));
  }
  const Scalar slope_u = oracles::least_squares_slope(ks, log_uniform);
  const Scalar slope_m = oracles::least_squares_slope(ks, log_meta);
  const Scalar r_u = oracles::pearson_r(ks, log_uniform);

  report(6, slope_u < 0 && slope_m < 0 && std::abs(r_u) >= 0.8,
         "log(mean MSE) decreases with k and is near-linear for uniform",
         "slope uniform " + fmt(slope_u) + ", slope meta " + fmt(slope_m) +
             ", pearson |r| uniform " + fmt(std::abs(r_u)));
}

void criterion_prior_shape(const DeskScaleOutputs& desk) {
  if (!desk.ok) {
    report(7, false, "meta prior shape", "no trained weights");
    return;
  }
  const Boundary boundary{4.0};
  const PriorDensity prior =
      PriorDensity::from_network(desk.state.theta, boundary, 1024);

  const bool unimodal = oracles::is_unimodal(prior.density(), 1e-3);
  const Scalar mode = prior.mode();
  const Scalar cell = 8.0 / 1023.0;
  const bool interior = std::abs(mode) < 4.0 - cell;
  const Scalar mass = trapezoid(prior.grid(), prior.density());
  const bool normalized = std::abs(mass - 1.0) < 1e-6;

  report(7, unimodal && interior && normalized,
         "emitted meta prior is unimodal with an interior mode and unit mass",
         "mode " + fmt(mode) + ", unimodal " + (unimodal ? "yes" : "no") +
             ", integral " + fmt(mass));
}

// ---- criterion 8: eval reproducibility across worker counts ----

std::optional<std::string> find_cli() {
  if (const char* env = std::getenv("METAPRIOR_CLI")) return env;
  std::error_code ec;
  const fs::path self = fs::read_symlink("/proc/self/exe", ec);
  if (ec) return std::nullopt;
  const fs::path sibling = self.parent_path() / "metaprior";
  if (fs::exists(sibling)) return sibling.string();
  return std::nullopt;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_determinism(const DeskScaleOutputs& desk) {
  const auto cli = find_cli();
  if (!cli) {
    report(8, false, "eval determinism across worker counts",
           "cli binary not found");
    return;
  }

  const fs::path dir =
      fs::temp_directory_path() /
      ("metaprior_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const fs::path ckpt = dir / "meta.ckpt";
  if (desk.ok) {
    save_checkpoint(ckpt, Checkpoint{desk.state.theta.layout,
                                     desk.state.theta.values,
                                     static_cast<std::uint64_t>(
                                         desk.state.iteration),
                                     2026});
  } else {
    const Layout layout = dense_layout({1, 64, 64, 1});
    save_checkpoint(ckpt,
                    Checkpoint{layout, init_weights(layout, 2026).values, 0,
                               2026});
  }

  const fs::path cfg_path = dir / "eval.cfg";
  {
    std::ofstream cfg(cfg_path);
    cfg << "seed = 13\n"
        << "mc_samples = 5000\n"
        << "eval_iterations = 4\n"
        << "eval_batch = 2\n"
        << "prior_grid = 512\n"
        << "eval_grid_size = 128\n";
  }

  auto run_eval = [&](int workers, const fs::path& out) {
    const std::string cmd = *cli + " eval --config " + cfg_path.string() +
                            " --checkpoint " + ckpt.string() + " --out " +
                            out.string() + " --set workers=" +
                            std::to_string(workers) + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return status != -1 && WEXITSTATUS(status) == 0;
  };

  const fs::path out1 = dir / "w1.csv";
  const fs::path out4 = dir / "w4.csv";
  const bool ran = run_eval(1, out1) && run_eval(4, out4);
  const bool identical = ran && slurp(out1) == slurp(out4) &&
                         slurp(dir / "w1.json") == slurp(dir / "w4.json");

  report(8, ran && identical,
         "eval output is byte-identical across worker counts",
         ran ? (identical ? "csv+json bytes equal" : "outputs differ")
             : "cli run failed");
  fs::remove_all(dir);
}

}  // namespace

int main() {
  std::cout << "acceptance suite\n";

  criterion_gradients();
  criterion_gp_oracle();
  criterion_ei_quadrature();
  criterion_meta_step_algebra();

  const auto start = Clock::now();
  DeskScaleOutputs desk;
  try {
    desk = run_desk_scale();
  } catch (const std::exception& e) {
    std::cerr << "[info] desk-scale run failed: " << e.what() << "\n";
  }
  const double desk_elapsed = seconds_since(start);

  criterion_table3(desk, desk_elapsed);
  criterion_log_linear_trend(desk);
  criterion_prior_shape(desk);
  criterion_determinism(desk);

  std::cout << (g_failures == 0 ? "all criteria passed"
                                : std::to_string(g_failures) +
                                      " criterion(s) failed")
            << std::endl;
  return g_failures == 0 ? 0 : 1;
}
