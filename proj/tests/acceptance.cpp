// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Usage: acceptance <path-to-frolic-binary>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "frolic/debias.hpp"
#include "frolic/fusion.hpp"
#include "frolic/gda.hpp"
#include "frolic/io.hpp"
#include "frolic/pipeline.hpp"
#include "frolic/random.hpp"
#include "frolic/synth.hpp"

using namespace frolic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

// Per-class sample covariance around the empirical class mean, averaged
// over classes.
Matrix labeled_mle_covariance(const Matrix& x, const std::vector<Index>& y, Index k) {
  const Index d = x.cols();
  Matrix total = Matrix::Zero(d, d);
  for (Index j = 0; j < k; ++j) {
    Vector mean = Vector::Zero(d);
    Index n = 0;
    for (Index i = 0; i < x.rows(); ++i) {
      if (y[i] != j) continue;
      mean += x.row(i).transpose();
      ++n;
    }
    mean /= static_cast<double>(n);
    Matrix c = Matrix::Zero(d, d);
    for (Index i = 0; i < x.rows(); ++i) {
      if (y[i] != j) continue;
      const Vector r = x.row(i).transpose() - mean;
      c += r * r.transpose();
    }
    total += c / static_cast<double>(n - 1);
  }
  return total / static_cast<double>(k);
}

Outcome ac1_covariance() {
  const auto t0 = std::chrono::steady_clock::now();
  synth::IsotropicPrototypeParams p;
  p.classes = 5;
  p.dim = 16;
  p.samples = 50000;
  double sum_err = 0.0, worst_gap = 0.0;
  const std::vector<std::uint64_t> seeds = {3, 4, 5, 6, 7};
  for (auto seed : seeds) {
    const auto spec = synth::make_mixture_spec(p, seed);
    const auto sample = synth::sample_mixture(spec);
    const auto moments = gda::estimate_moments(sample.embeddings);
    const PrototypeSet protos{spec.prototypes, io::default_class_names(spec.classes), false};
    const auto cov = gda::estimate_shared_covariance(moments, protos, gda::uniform_pi(spec.classes));
    const double norm = spec.sigma.norm();
    sum_err += (cov.sigma - spec.sigma).norm() / norm;
    const Matrix mle = labeled_mle_covariance(sample.embeddings.data, sample.labels.labels, spec.classes);
    worst_gap = std::max(worst_gap, (cov.sigma - mle).norm() / norm);
  }
  const double mean_err = sum_err / static_cast<double>(seeds.size());
  const double t = seconds_since(t0);
  return {mean_err <= 0.05 && worst_gap <= 0.02 && t < 10.0,
          "mean rel err " + fmt(mean_err) + " (<= 0.05), max |est - MLE|/|Sigma| " + fmt(worst_gap) +
              " (<= 0.02), " + fmt(t, 3) + " s (< 10)"};
}

Outcome ac2_mahalanobis() {
  const Index k = 10, d = 32, n = 1000;
  const Matrix a = synth::gaussian_matrix(d, d, 2001);
  const Matrix sigma = a * a.transpose() / static_cast<double>(d) + 0.1 * Matrix::Identity(d, d);
  const Matrix z = synth::gaussian_matrix(k, d, 2002) * 0.5;
  const Matrix x = synth::gaussian_matrix(n, d, 2003);

  gda::SharedCovariance cov;
  cov.sigma = sigma;
  const PrototypeSet protos{z, io::default_class_names(k), false};
  const auto head = gda::build_gaussian_head(cov, protos);
  const auto pred = argmax_rows(gda::score_gaussian(head, EmbeddingSet{x, false}));

  const Matrix inv = sigma.inverse();
  Index agree = 0;
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < k; ++j) {
      const Vector r = (x.row(i) - z.row(j)).transpose();
      const double dist = r.dot(inv * r);
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    agree += best == pred[i];
  }
  return {agree == n, std::to_string(agree) + "/" + std::to_string(n) + " argmax agreement"};
}

// Two-level log grid: 1e3 points over the bracket, then 1e4 points over the
// two coarse cells either side of the coarse minimizer.
double grid_tau(const LogitMatrix& f, double target) {
  const double lo = std::log(1e-4), hi = std::log(1e4);
  auto scan = [&](double a, double b, int points) {
    double best = a, best_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      const double lt = a + (b - a) * i / (points - 1);
      const double gap = std::abs(fusion::average_confidence(f, std::exp(lt)) - target);
      if (gap < best_gap) {
        best_gap = gap;
        best = lt;
      }
    }
    return best;
  };
  const int coarse = 1000;
  const double cell = (hi - lo) / (coarse - 1);
  const double c = scan(lo, hi, coarse);
  return std::exp(scan(std::max(lo, c - 2 * cell), std::min(hi, c + 2 * cell), 10000));
}

Outcome ac3_confidence() {
  double worst_gap = 0.0, worst_rel = 0.0;
  bool monotone = true;
  for (int inst = 0; inst < 20; ++inst) {
    const Index n = 200, k = 2 + inst % 9;
    random::Stream rng(3000 + inst, 0);
    const double scale = 0.05 + 2.0 * rng.uniform();
    const LogitMatrix f{synth::gaussian_matrix(n, k, 3100 + inst) * scale};
    const double target = 1.0 / k + (0.15 + 0.7 * rng.uniform()) * (1.0 - 1.0 / k);
    const auto temps = fusion::match_confidence(f, target);
    worst_gap = std::max(worst_gap, temps.achieved_gap);
    const double oracle = grid_tau(f, target);
    worst_rel = std::max(worst_rel, std::abs(temps.tau_g - oracle) / oracle);

    double prev = 2.0;
    for (int g = 0; g < 50; ++g) {
      const double tau = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * g / 49.0);
      const double conf = fusion::average_confidence(f, tau);
      if (conf > prev) monotone = false;
      prev = conf;
    }
  }
  return {worst_gap <= 1e-4 && worst_rel <= 1e-3 && monotone,
          "max gap " + fmt(worst_gap) + " (<= 1e-4), max tau rel diff " + fmt(worst_rel) +
              " (<= 1e-3), monotone " + (monotone ? "yes" : "no")};
}

Outcome ac4_fixed_point() {
  double worst = 0.0, worst_res = 0.0;
  int count = 0;
  for (Index k : {3, 5, 10}) {
    for (int rep = 0; rep < 7 && count < 20; ++rep, ++count) {
      random::Stream rng(4000 + 17 * k + rep, 0);
      Matrix s(k, k);
      for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j) s(i, j) = rng.uniform() + (i == j ? 2.0 * rng.uniform() : 0.0);
      for (Index j = 0; j < k; ++j) s.col(j) /= s.col(j).sum();

      const auto got = debias::solve_beta_power(s, uniform_prior(k));
      Eigen::EigenSolver<Matrix> es(s);
      Index best = 0;
      for (Index i = 1; i < k; ++i) {
        if (std::abs(es.eigenvalues()(i) - 1.0) < std::abs(es.eigenvalues()(best) - 1.0)) best = i;
      }
      Vector v = es.eigenvectors().col(best).real();
      v /= v.sum();
      worst = std::max(worst, (got.beta - v).lpNorm<Eigen::Infinity>());
      worst_res = std::max(worst_res, (s * got.beta - got.beta).lpNorm<1>());
    }
  }
  return {count == 20 && worst <= 1e-6 && worst_res <= 1e-5,
          std::to_string(count) + " matrices, max l_inf vs eigensolve " + fmt(worst) +
              " (<= 1e-6), max ||(S-I)b||_1 " + fmt(worst_res) + " (<= 1e-5)"};
}

Outcome ac5_planted_bias() {
  const auto t0 = std::chrono::steady_clock::now();
  Vector beta_star(3);
  beta_star << 0.5, 0.3, 0.2;
  synth::IsotropicPrototypeParams p;
  p.classes = 3;
  p.dim = 4;
  p.samples = 20000;
  p.separation = 0.2;
  double worst_err = 0.0, worst_gain = 1.0;
  int worst_iters = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto spec = synth::make_mixture_spec(p, seed, beta_star);
    const auto sample = synth::sample_mixture(spec);
    const auto biased = synth::biased_logits(sample.embeddings, spec);
    const auto est = debias::estimate_beta_iterative(biased);
    const auto fixed = debias::adjust_logits(biased, est.beta).logits;
    worst_err = std::max(worst_err, (est.beta - beta_star).lpNorm<Eigen::Infinity>());
    worst_gain = std::min(worst_gain, pipeline::accuracy(fixed, sample.labels) -
                                          pipeline::accuracy(biased, sample.labels));
    worst_iters = std::max(worst_iters, est.iterations_outer);
  }
  const double t = seconds_since(t0);
  return {worst_err <= 0.05 && worst_gain >= 0.02 && worst_iters <= 15 && t < 5.0,
          "5 seeds: max l_inf err " + fmt(worst_err) + " (<= 0.05), min gain " +
              fmt(100 * worst_gain, 3) + " pt (>= 2), max outer iters " + std::to_string(worst_iters) +
              " (<= 15), " + fmt(t, 3) + " s (< 5)"};
}

Outcome ac6_ablation() {
  synth::ContaminatedParams p;
  double acc_sum = 0, acc_f = 0, acc_d = 0, acc_c = 0, acc_g = 0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    const auto spec = synth::make_contaminated_spec(p, seed);
    const auto sample = synth::sample_mixture(spec);
    const PrototypeSet protos{spec.prototypes, io::default_class_names(spec.classes), false};
    pipeline::PipelineConfig config;
    config.normalize_inputs = false;
    const auto r = pipeline::run_frolic(sample.embeddings, protos, config);
    acc_c += pipeline::accuracy(r.f_c, sample.labels);
    acc_g += pipeline::accuracy(r.f_g, sample.labels);
    acc_f += pipeline::accuracy(r.f_f, sample.labels);
    acc_d += pipeline::accuracy(r.f_d, sample.labels);
    acc_sum += pipeline::accuracy(LogitMatrix{r.f_c.scores + r.f_g.scores}, sample.labels);
  }
  acc_sum /= seeds, acc_f /= seeds, acc_d /= seeds, acc_c /= seeds, acc_g /= seeds;
  return {acc_d >= acc_f && acc_f >= acc_sum,
          "mean acc over 20 seeds: f_d " + fmt(100 * acc_d, 3) + " >= f_f " + fmt(100 * acc_f, 3) +
              " >= f_c+f_g " + fmt(100 * acc_sum, 3) + " (f_c " + fmt(100 * acc_c, 3) + ", f_g " +
              fmt(100 * acc_g, 3) + ")"};
}

Outcome ac7_baselines() {
  const Index n = 300, k = 7, d = 12;
  const Matrix probs = debias::softmax_rows(LogitMatrix{synth::gaussian_matrix(n, k, 7001)});
  const Vector got = debias::implicit_prior(probs);
  bool exact = true;
  for (Index j = 0; j < k; ++j) {
    double s = 0.0;
    for (Index i = 0; i < n; ++i) s += probs(i, j);
    exact = exact && (s / static_cast<double>(n) == got(j));
  }
  Matrix x = synth::gaussian_matrix(n, d, 7002);
  x.rowwise() += Vector::LinSpaced(d, 0.5, 1.5).transpose();
  const EmbeddingSet e{x, false};
  const Vector mean = x.colwise().mean().transpose();
  const auto proj = debias::tde_project(e);
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double rel = std::abs(proj.data.row(i).dot(mean)) / (mean.norm() * proj.data.row(i).norm());
    worst = std::max(worst, rel);
  }
  return {exact && worst <= 1e-8, std::string("implicit prior bit-exact ") + (exact ? "yes" : "no") +
                                      ", max relative dot with mean " + fmt(worst) + " (<= 1e-8)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome ac8_determinism(const std::string& bin) {
  const fs::path root = fs::temp_directory_path() / ("frolic_ac8_" + std::to_string(::getpid()));
  fs::remove_all(root);
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null").c_str()); };
  const std::string data = (root / "data").string();
  if (sh(bin + " synth --kind contaminated --seed 8 --out " + data) != 0) {
    return {false, "synth failed"};
  }
  const std::string common = bin + " run --features " + data + "/features.fmat --prototypes " + data +
                             "/prototypes.fmat --emit-stages --out ";
  if (sh(common + (root / "a").string()) != 0 || sh(common + (root / "b").string()) != 0) {
    return {false, "run failed"};
  }
  std::vector<std::string> names_a, names_b;
  for (const auto& e : fs::directory_iterator(root / "a")) names_a.push_back(e.path().filename());
  for (const auto& e : fs::directory_iterator(root / "b")) names_b.push_back(e.path().filename());
  std::sort(names_a.begin(), names_a.end());
  std::sort(names_b.begin(), names_b.end());
  bool same = names_a == names_b && !names_a.empty();
  for (const auto& n : names_a) same = same && slurp(root / "a" / n) == slurp(root / "b" / n);
  fs::remove_all(root);
  return {same, std::to_string(names_a.size()) + " files, byte-identical " + (same ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <frolic-binary>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"AC1 covariance recovery", ac1_covariance},
      {"AC2 GDA/Mahalanobis equivalence", ac2_mahalanobis},
      {"AC3 confidence matching", ac3_confidence},
      {"AC4 fixed-point correctness", ac4_fixed_point},
      {"AC5 planted-bias recovery", ac5_planted_bias},
      {"AC6 ablation ordering", ac6_ablation},
      {"AC7 baseline sanity", ac7_baselines},
      {"AC8 determinism", [&] { return ac8_determinism(bin); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : checks) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
