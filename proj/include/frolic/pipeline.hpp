#pragma once

// End-to-end label-free adaptation:
//   1. f_c = z^T x
//   2. Sigma = M - sum_j pi_j z_j z_j^T
//   3. w_j = Sigma^{-1} z_j, b_j = -1/2 z_j^T w_j
//   4. f_g = w^T x + b
//   5. tau_g so that conf(f_g, tau_g) = conf(f_c, tau_c)
//   6. f_f = f_g / tau_g + f_c / tau_c
//   7. beta from the soft-confusion fixed point of f_f
//   8. f_d = f_f - ln beta (+ ln pi)
//   9. prediction = argmax f_d

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "frolic/debias.hpp"
#include "frolic/error.hpp"
#include "frolic/fusion.hpp"
#include "frolic/gda.hpp"
#include "frolic/io.hpp"
#include "frolic/types.hpp"

namespace frolic::pipeline {

struct PipelineConfig {
  double tau_c = fusion::kDefaultTauC;
  double epsilon = debias::kDefaultEpsilon;
  bool normalize_inputs = true;
  std::optional<Vector> pi;  // downstream prior; uniform when empty
  gda::CovarianceOptions covariance;
  fusion::SearchOptions search;
  debias::PowerOptions power;
  int max_outer = 100;
  debias::BetaUpdate beta_update = debias::BetaUpdate::kResidual;
};

struct PipelineReport {
  std::vector<Index> predictions;
  LogitMatrix f_c, f_g, f_f, f_d;
  gda::SharedCovariance covariance;  // sigma is dropped after use; ridge/repair kept
  double target_confidence = 0.0;
  fusion::TemperaturePair temps;
  debias::PriorEstimate prior;
  Index floored_beta = 0;
  Vector mean_probabilities;  // column means of softmax(f_d)
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;  // NaN for classes absent from labels
  std::vector<Index> per_class_count;
  std::optional<Vector> mean_probabilities;
};

inline void validate_config(const PipelineConfig& c) {
  if (!(c.tau_c > 0.0)) throw Error(ErrorCode::kNonPositiveTemperature, "tau_c must be > 0");
  if (!(c.epsilon > 0.0)) throw Error(ErrorCode::kInvalidArgument, "epsilon must be > 0");
  if (!(c.covariance.ridge_initial > 0.0) || c.covariance.ridge_cap < c.covariance.ridge_initial) {
    throw Error(ErrorCode::kInvalidArgument, "ridge parameters must be positive and ordered");
  }
  if (c.max_outer < 1 || c.power.max_steps < 1 || c.search.max_steps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "iteration caps must be positive");
  }
}

namespace detail {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (Error& e) {
    if (e.stage().empty()) e.with_stage(name);
    throw;
  }
}

}  // namespace detail

inline PipelineReport run_frolic(const EmbeddingSet& embeddings_in,
                                 const PrototypeSet& prototypes_in,
                                 const PipelineConfig& config = {}) {
  validate_config(config);
  if (embeddings_in.rows() < 1) throw Error(ErrorCode::kEmptyInput, "no embeddings").with_stage("input");
  if (prototypes_in.classes() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "need at least two classes").with_stage("input");
  }
  detail::stage("input", [&] {
    frolic::detail::require_same_dim(embeddings_in.dim(), prototypes_in.dim(),
                                     "embedding dim vs prototype dim");
    frolic::detail::require_finite(embeddings_in.data, ErrorCode::kNonFiniteEntry, "embeddings");
    frolic::detail::require_finite(prototypes_in.data, ErrorCode::kNonFiniteEntry, "prototypes");
    if (config.pi) {
      frolic::detail::require_same_dim(config.pi->size(), prototypes_in.classes(),
                                       "pi length vs classes");
    }
    return 0;
  });

  const auto [embeddings, prototypes] = detail::stage("normalize", [&] {
    return config.normalize_inputs
               ? std::pair{io::normalized(embeddings_in), io::normalized(prototypes_in)}
               : std::pair{embeddings_in, prototypes_in};
  });

  PipelineReport report;
  report.f_c = detail::stage("base", [&] { return gda::score_base(prototypes, embeddings); });

  const auto head = detail::stage("covariance", [&] {
    const auto moments = gda::estimate_moments(embeddings);
    const gda::PriorVectorPi pi =
        config.pi ? gda::PriorVectorPi{*config.pi, gda::PriorSource::kFile, false}
                  : gda::uniform_pi(prototypes.classes());
    auto sigma = gda::estimate_shared_covariance(moments, prototypes, pi, config.covariance);
    auto h = gda::build_gaussian_head(sigma, prototypes);
    report.covariance = std::move(sigma);
    report.covariance.sigma.resize(0, 0);
    return h;
  });
  report.f_g = detail::stage("gaussian", [&] { return gda::score_gaussian(head, embeddings); });

  report.temps = detail::stage("temperature", [&] {
    report.target_confidence = fusion::average_confidence(report.f_c, config.tau_c);
    return fusion::match_confidence(report.f_g, report.target_confidence, config.search,
                                    config.tau_c);
  });
  report.f_f = detail::stage("fusion",
                             [&] { return fusion::fuse_logits(report.f_c, report.f_g, report.temps); });

  report.prior = detail::stage("prior", [&] {
    debias::BetaOptions options;
    options.epsilon = config.epsilon;
    options.max_outer = config.max_outer;
    options.power = config.power;
    options.update = config.beta_update;
    options.pi = config.pi;
    return debias::estimate_beta_iterative(report.f_f, options);
  });

  detail::stage("adjust", [&] {
    auto adjusted = debias::adjust_logits(report.f_f, report.prior.beta, config.pi);
    report.f_d = std::move(adjusted.logits);
    report.floored_beta = adjusted.floored;
    report.predictions = argmax_rows(report.f_d);
    report.mean_probabilities = debias::implicit_prior(debias::softmax_rows(report.f_d));
    return 0;
  });
  return report;
}

inline Metrics evaluate(const std::vector<Index>& predictions, const LabelSet& labels,
                        Index classes, const Matrix* probabilities = nullptr) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                                std::to_string(labels.size()) + " labels");
  }
  if (predictions.empty()) throw Error(ErrorCode::kEmptyInput, "nothing to evaluate");
  io::validate_labels(labels, classes);
  io::validate_labels(LabelSet{predictions}, classes);

  Metrics m;
  std::vector<Index> hits(static_cast<std::size_t>(classes), 0);
  m.per_class_count.assign(static_cast<std::size_t>(classes), 0);
  Index correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels.labels[i]);
    ++m.per_class_count[y];
    if (predictions[i] == labels.labels[i]) {
      ++correct;
      ++hits[y];
    }
  }
  m.accuracy = static_cast<double>(correct) / static_cast<double>(predictions.size());
  for (std::size_t j = 0; j < hits.size(); ++j) {
    m.per_class_accuracy.push_back(m.per_class_count[j] == 0
                                       ? std::numeric_limits<double>::quiet_NaN()
                                       : static_cast<double>(hits[j]) /
                                             static_cast<double>(m.per_class_count[j]));
  }
  if (probabilities) {
    if (probabilities->rows() != static_cast<Index>(predictions.size()) ||
        probabilities->cols() != classes) {
      throw Error(ErrorCode::kShapeMismatch, "probability matrix must be N x K");
    }
    m.mean_probabilities = debias::implicit_prior(*probabilities);
  }
  return m;
}

inline double accuracy(const LogitMatrix& logits, const LabelSet& labels) {
  return evaluate(argmax_rows(logits), labels, logits.classes()).accuracy;
}

inline std::string encode_temps(const PipelineReport& r) {
  return io::encode_key_values({{"tau_c", io::format_double(r.temps.tau_c)},
                                {"tau_g", io::format_double(r.temps.tau_g)},
                                {"achieved_gap", io::format_double(r.temps.achieved_gap)}});
}

/// predictions.csv, beta.csv, trajectory.csv, temps.txt and, when asked,
/// the four logit stages as FMAT1 files.
inline void write_report(const PipelineReport& r, const std::filesystem::path& dir,
                         bool emit_stages = false) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string() + ": " + ec.message());
  io::detail::write_file(dir / "predictions.csv", io::encode_predictions(r.predictions));
  io::detail::write_file(dir / "beta.csv", io::encode_vector_csv(r.prior.beta, "class", "beta"));
  io::detail::write_file(dir / "trajectory.csv", io::encode_trajectory(r.prior.l1_trajectory));
  io::detail::write_file(dir / "temps.txt", encode_temps(r));
  if (emit_stages) {
    io::save_feature_matrix(r.f_c.scores, dir / "f_c.fmat");
    io::save_feature_matrix(r.f_g.scores, dir / "f_g.fmat");
    io::save_feature_matrix(r.f_f.scores, dir / "f_f.fmat");
    io::save_feature_matrix(r.f_d.scores, dir / "f_d.fmat");
  }
}

}  // namespace frolic::pipeline
