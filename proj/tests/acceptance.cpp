// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "dualprop/bench.hpp"
#include "dualprop/dual.hpp"
#include "dualprop/model.hpp"
#include "dualprop/oracle.hpp"
#include "dualprop/trainer.hpp"
#include "dualprop/transcendental.hpp"
#include "support/test_support.hpp"

using namespace dualprop;
using testsupport::quad;
using testsupport::rel_err;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = "FAILED: " + what + (detail.empty() ? "" : " | " + detail) + " | ";
    pass = pass && ok;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Criterion {
  const char* id;
  const char* title;
  double max_seconds;
  std::function<Verdict()> body;
};

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

// ---------------------------------------------------------------------------

Verdict ring_axioms() {
  Verdict v;
  SplitMix64 rng(101);
  double worst_mul = 0.0;
  bool additive_exact = true;
  bool nilpotent_exact = true;
  double worst_add_assoc_continuous = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const Dual a(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const Dual b(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const Dual c(rng.uniform(-10, 10), rng.uniform(-10, 10));

    additive_exact &= (a + b == b + a) && (a + Dual() == a) && (a + (-a) == Dual()) && (a - a == Dual());

    // Binary64 addition is exact on the dyadic grid k * 2^-40 in [-10, 10],
    // so associativity can be asserted bit for bit there.
    auto grid = [&] { return std::ldexp(std::round(std::ldexp(rng.uniform(-10, 10), 40)), -40); };
    const Dual ga(grid(), grid()), gb(grid(), grid()), gc(grid(), grid());
    additive_exact &= ((ga + gb) + gc == ga + (gb + gc));
    const Dual l = (a + b) + c, r = a + (b + c);
    worst_add_assoc_continuous = std::max({worst_add_assoc_continuous, rel_err(l.re(), r.re()), rel_err(l.du(), r.du())});

    const Dual e1 = Dual::make(0, b.du()) * Dual::make(0, c.du());
    nilpotent_exact &= bits_equal(e1.re(), 0.0) && bits_equal(e1.du(), 0.0);

    const Dual m1 = (a * b) * c, m2 = a * (b * c);
    const Dual d1 = a * (b + c), d2 = a * b + a * c;
    const Dual d3 = (a + b) * c, d4 = a * c + b * c;
    const Dual c1 = a * b, c2 = b * a;
    for (auto [x, y] : {std::pair{m1, m2}, {d1, d2}, {d3, d4}, {c1, c2}}) {
      worst_mul = std::max({worst_mul, rel_err(x.re(), y.re()), rel_err(x.du(), y.du())});
    }
  }
  nilpotent_exact &= bits_equal((Dual::epsilon() * Dual::epsilon()).du(), 0.0);
  v.require(nilpotent_exact, "eps*eps not bit-exact zero");
  v.require(additive_exact, "additive axioms not exact");
  v.require(worst_mul <= 1e-12, "multiplicative axioms rel err " + fmt("%.3g", worst_mul));
  v.detail += "mul/dist max rel err " + fmt("%.2e", worst_mul) + ", continuous add-assoc rel err " +
              fmt("%.2e", worst_add_assoc_continuous);
  return v;
}

Verdict polynomial_identity() {
  Verdict v;
  SplitMix64 rng(202);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const std::size_t degree = rng.below(9);
    std::vector<double> c(degree + 1);
    for (double& k : c) k = rng.uniform(-5, 5);
    const double x = rng.uniform(-2, 2);
    Dual acc;
    const Dual at = Dual::variable(x);
    for (std::size_t k = c.size(); k-- > 0;) acc = acc * at + c[k];
    worst = std::max(worst, rel_err(acc.du(), testsupport::poly_derivative(c, x)));
    v.require(rel_err(acc.re(), testsupport::poly_value(c, x)) <= 1e-10, "real part of p(x+eps)");
  }
  v.require(worst <= 1e-10, "p' rel err " + fmt("%.3g", worst));
  v.detail += "max rel err " + fmt("%.2e", worst);
  return v;
}

Verdict lifting_suite() {
  Verdict v;
  struct Lift {
    const char* name;
    Dual (*dual)(const Dual&);
    quad (*wide)(quad);
    double lo;
  };
  const Lift lifts[] = {
      {"sin", [](const Dual& x) { return sin(x); }, [](quad a) { return sinq(a); }, -20},
      {"cos", [](const Dual& x) { return cos(x); }, [](quad a) { return cosq(a); }, -20},
      {"exp", [](const Dual& x) { return exp(x); }, [](quad a) { return expq(a); }, -20},
      {"ln", [](const Dual& x) { return log(x); }, [](quad a) { return logq(a); }, 1e-3},
      {"tanh", [](const Dual& x) { return tanh(x); }, [](quad a) { return tanhq(a); }, -20},
      {"sigmoid", [](const Dual& x) { return sigmoid(x); }, [](quad a) { return testsupport::q_sigmoid(a); }, -20},
  };
  SplitMix64 rng(303);
  std::string per;
  for (const auto& lift : lifts) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double a = rng.uniform(lift.lo, 20.0);
      const double fd = testsupport::central_difference(lift.wide, a, 1e-6);
      worst = std::max(worst, rel_err(lift.dual(Dual::variable(a)).du(), fd));
    }
    v.require(worst <= 1e-6, std::string(lift.name) + " rel err " + fmt("%.3g", worst));
    per += std::string(lift.name) + "=" + fmt("%.1e", worst) + " ";
  }
  double worst_sin = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-20, 20);
    const Dual s = sin(Dual(x, 1.0));
    worst_sin = std::max({worst_sin, rel_err(s.re(), static_cast<double>(sinq(x))),
                          rel_err(s.du(), static_cast<double>(cosq(x)))});
  }
  v.require(worst_sin <= 1e-12, "sin(x+eps) = sin x + eps cos x rel err " + fmt("%.3g", worst_sin));
  v.detail += "vs FD: " + per + "| sin identity " + fmt("%.1e", worst_sin);
  return v;
}

Verdict ones_seeded_equivalence() {
  Verdict v;
  SplitMix64 rng(404);
  const std::size_t widths[] = {2, 4, 8, 16, 64};
  double paper_vs_bp = 0.0, paper_vs_fd = 0.0, seeded_vs_bp = 0.0;
  for (int i = 0; i < 10'000; ++i) {
    const std::size_t n = widths[i % 5];
    const Perceptron m = guarded_perceptron(n, Activation::Sigmoid, rng);
    const Sample s = random_sample(n, rng);
    const Gradient bp = grad_backprop_analytic(m, s);
    const Gradient paper = grad_paper(m, s);
    paper_vs_bp = std::max(paper_vs_bp, compare(paper, bp, 1e-10).max_rel_err);
    paper_vs_fd = std::max(paper_vs_fd, compare(paper, grad_finite_difference(m, s), 1e-6).max_rel_err);
    seeded_vs_bp = std::max(seeded_vs_bp, compare(grad_forward_seeded(m, s), bp, 1e-10).max_rel_err);
  }
  v.require(paper_vs_bp <= 1e-10, "paper vs backprop " + fmt("%.3g", paper_vs_bp));
  v.require(paper_vs_fd <= 1e-6, "paper vs finite differences " + fmt("%.3g", paper_vs_fd));
  v.require(seeded_vs_bp <= 1e-10, "seeded vs backprop " + fmt("%.3g", seeded_vs_bp));
  v.detail += "paper~backprop " + fmt("%.1e", paper_vs_bp) + ", paper~FD " + fmt("%.1e", paper_vs_fd) +
              ", seeded~backprop " + fmt("%.1e", seeded_vs_bp);
  return v;
}

Verdict singular_seed() {
  Verdict v;
  SplitMix64 rng(505);
  const std::size_t widths[] = {2, 4, 8, 16, 64};
  int raised = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = widths[i % 5];
    std::vector<double> w(n);
    double partial = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      w[k] = rng.uniform(-2, 2);
      partial += w[k];
    }
    w[n - 1] = -partial;  // left-to-right sum is exactly zero
    const Perceptron m(std::move(w), rng.uniform(-2, 2), Activation::Sigmoid);
    const Sample s = random_sample(n, rng);
    try {
      (void)grad_paper(m, s);
    } catch (const SingularSeed&) {
      ++raised;
    }
    worst = std::max(worst, compare(grad_forward_seeded(m, s), grad_finite_difference(m, s), 1e-6).max_rel_err);
  }
  v.require(raised == 100, "SingularSeed raised " + std::to_string(raised) + "/100");
  v.require(worst <= 1e-6, "seeded vs FD " + fmt("%.3g", worst));
  v.detail += "SingularSeed " + std::to_string(raised) + "/100, seeded~FD " + fmt("%.1e", worst);
  return v;
}

Verdict multilayer() {
  Verdict v;
  SplitMix64 rng(606);
  double worst = 0.0;
  int built = 0;
  while (built < 500) {
    const std::size_t in = 1 + rng.below(8);
    const std::size_t hidden = 1 + rng.below(8);
    if (hidden * (in + 1) + hidden + 1 > 50) continue;
    const std::vector<std::size_t> widths{in, hidden, 1};
    const Mlp net = random_mlp(widths, built % 2 ? Activation::Tanh : Activation::Sigmoid, 1.0, rng);
    const Sample s = random_sample(in, rng);
    worst = std::max(worst, compare(grad_forward_seeded(net, s), grad_finite_difference(net, s), 1e-5).max_rel_err);
    ++built;
  }
  v.require(worst <= 1e-5, "seeded vs FD " + fmt("%.3g", worst));
  v.detail += "500 nets, seeded~FD " + fmt("%.1e", worst);
  return v;
}

Verdict training_equivalence() {
  Verdict v;
  TrainConfig cfg;
  cfg.dataset = "and";
  cfg.learning_rate = 0.5;
  cfg.epochs = 2000;
  cfg.rng_seed = 2024;
  std::vector<TrainLog> logs;
  for (Engine e : {Engine::Paper, Engine::Backprop, Engine::Seeded}) {
    cfg.engine = e;
    logs.push_back(train(cfg));
  }
  double worst = 0.0;
  for (std::size_t k = 1; k < logs.size(); ++k) {
    v.require(logs[k].epochs.size() == logs[0].epochs.size(), "epoch counts differ");
    for (std::size_t i = 0; i < logs[0].epochs.size(); ++i) {
      worst = std::max(worst, std::fabs(logs[k].epochs[i].mean_loss - logs[0].epochs[i].mean_loss));
    }
  }
  v.require(logs[0].engine_failures == 0, "paper engine hit SingularSeed");
  v.require(worst <= 1e-8, "loss curves differ by " + fmt("%.3g", worst));
  for (const auto& log : logs) v.require(log.final_loss() < 0.02, "final loss " + fmt("%.4g", log.final_loss()));
  v.detail += "max |dloss| " + fmt("%.1e", worst) + ", final loss " + fmt("%.5f", logs[0].final_loss());
  return v;
}

Verdict xor_network() {
  Verdict v;
  TrainConfig cfg;
  cfg.dataset = "xor";
  cfg.engine = Engine::Seeded;
  cfg.learning_rate = 0.5;
  cfg.epochs = 10'000;
  cfg.hidden = {2};
  double best = INFINITY;
  int attempts = 0;
  for (std::uint64_t restart = 0; restart < 5; ++restart) {
    cfg.rng_seed = 1000 + restart;
    ++attempts;
    best = std::min(best, train(cfg).final_loss());
    if (best < 0.05) break;
  }
  v.require(best < 0.05, "final XOR loss " + fmt("%.4g", best));
  v.detail += "final loss " + fmt("%.5f", best) + " after " + std::to_string(attempts) + " run(s)";
  return v;
}

Verdict bench_structure() {
  Verdict v;
  BenchConfig cfg;  // widths 8..256, all engines, 10 reps
  const auto results = run_bench(cfg);
  std::vector<double> p_seeded, t_seeded, p_bp, t_bp;
  double worst_ratio = 0.0;
  for (const auto& r : results) {
    const std::uint64_t expected = r.engine == Engine::Seeded ? r.params + 1 : 1;
    v.require(r.passes == expected, std::string(to_string(r.engine)) + " passes " + std::to_string(r.passes));
    if (r.engine == Engine::Seeded) {
      p_seeded.push_back(static_cast<double>(r.params));
      t_seeded.push_back(r.median_ns);
    } else if (r.engine == Engine::Backprop) {
      p_bp.push_back(static_cast<double>(r.params));
      t_bp.push_back(r.median_ns);
    }
  }
  for (const auto& r : results) {
    if (r.engine != Engine::Paper) continue;
    for (const auto& b : results) {
      if (b.engine == Engine::Backprop && b.params == r.params) worst_ratio = std::max(worst_ratio, r.median_ns / b.median_ns);
    }
  }
  const LinearFit seeded = fit_line(p_seeded, t_seeded);
  const LinearFit bp = fit_line(p_bp, t_bp);
  v.require(seeded.r_squared > 0.95, "seeded time-vs-P linear fit R^2 = " + fmt("%.4f", seeded.r_squared));
  v.detail += "seeded R^2 " + fmt("%.4f", seeded.r_squared) + ", slope seeded " + fmt("%.2f", seeded.slope) +
              " vs backprop " + fmt("%.3f", bp.slope) + " ns/param, paper/backprop max " + fmt("%.2f", worst_ratio) +
              "x; no GPU comparison";
  std::printf("%s", bench_table(results).c_str());
  return v;
}

std::string csv_without_wall_time(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::string line, out;
  while (std::getline(f, line)) {
    const std::size_t last = line.rfind(',');
    out += line.substr(0, last) + "\n";
  }
  return out;
}

Verdict cli_determinism() {
  Verdict v;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "dualprop_acceptance_determinism";
  fs::remove_all(base);
  std::ostringstream sink;
  std::string csv[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = base / ("run" + std::to_string(run));
    const int code = cli::run({"train", "--dataset", "line2d", "--engine", "paper", "--epochs", "500", "--seed", "42",
                               "--shuffle", "--out", dir.string()},
                              sink, sink);
    v.require(code == 0, "train exit code " + std::to_string(code));
    csv[run] = csv_without_wall_time(dir / "log.csv");
  }
  v.require(!csv[0].empty() && csv[0] == csv[1], "log.csv differs between identical runs");
  v.detail += std::to_string(std::count(csv[0].begin(), csv[0].end(), '\n')) + " lines identical";
  fs::remove_all(base);
  return v;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "ring axioms on 10,000 random duals", 1.0, ring_axioms},
      {"AC2", "polynomial derivative identity (1,000 polynomials)", 1.0, polynomial_identity},
      {"AC3", "lifted functions vs central differences", 1.0, lifting_suite},
      {"AC4", "ones-seeded rule equals backprop (10,000 perceptrons)", 10.0, ones_seeded_equivalence},
      {"AC5", "singular seed behaviour (sum(w) = 0)", 1.0, singular_seed},
      {"AC6", "per-parameter seeding on 2-layer networks", 10.0, multilayer},
      {"AC7", "training equivalence on AND", 5.0, training_equivalence},
      {"AC8", "2-2-1 network learns XOR with seeded engine", 30.0, xor_network},
      {"AC9", "benchmark pass counts and linear scaling", 60.0, bench_structure},
      {"AC10", "deterministic train logs", 5.0, cli_determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds < c.max_seconds, "runtime " + fmt("%.2f", seconds) + " s over budget");
    std::printf("[%s] %-4s %s (%.2f s): %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, seconds, v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
