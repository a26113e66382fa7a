#pragma once

// Command-line front end. Each subcommand loads its inputs, calls the
// matching library operation and writes plain files.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
// non-convergence.

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frolic/debias.hpp"
#include "frolic/error.hpp"
#include "frolic/fusion.hpp"
#include "frolic/gda.hpp"
#include "frolic/io.hpp"
#include "frolic/pipeline.hpp"
#include "frolic/synth.hpp"

namespace frolic::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumerical = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

namespace fs = std::filesystem;

inline Vector load_vector_file(const fs::path& path, Index expected) {
  Vector v = io::decode_vector_csv(io::detail::read_file(path), "class", "value");
  if (expected >= 0 && v.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                path.string() + " has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(expected));
  }
  return v;
}

inline Vector parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0;
    if (!io::detail::parse_number(item, v)) throw UsageError("bad number in list: " + item);
    values.push_back(v);
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

inline std::string join(const Vector& v) {
  std::string out;
  for (Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + io::format_double(v(i));
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw UsageError("config key " + key + " expects a boolean, got " + value);
}

inline double parse_positive(const std::string& key, const std::string& value) {
  double v = 0;
  if (!io::detail::parse_number(value, v) || !(v > 0.0)) {
    throw UsageError(key + " expects a positive number, got " + value);
  }
  return v;
}

inline debias::BetaUpdate parse_update(const std::string& value) {
  if (value == "residual") return debias::BetaUpdate::kResidual;
  if (value == "regroup") return debias::BetaUpdate::kRegroup;
  throw UsageError("beta-update must be residual or regroup, got " + value);
}

/// Settings shared by the subcommands that build a pipeline config. Values
/// given on the command line override those from --config.
struct PipelineFlags {
  std::string config_file;
  std::optional<double> tau_c, epsilon, ridge_scale;
  bool no_normalize = false, normalize = false;
  std::string pi_file;
  std::string beta_update;
  bool emit_stages = false;

  void add_to(CLI::App* app, bool with_stages) {
    app->add_option("--config", config_file, "key = value settings file")->check(CLI::ExistingFile);
    app->add_option("--tau-c", tau_c, "base scorer temperature (default 0.01)");
    app->add_option("--epsilon", epsilon, "prior estimation tolerance (default 0.01)");
    app->add_option("--ridge-scale", ridge_scale, "multiplier on the covariance ridge schedule");
    auto* off = app->add_flag("--no-normalize", no_normalize, "use features and prototypes as given");
    auto* on = app->add_flag("--normalize", normalize, "L2-normalize features and prototypes (default)");
    off->excludes(on);
    app->add_option("--pi-file", pi_file, "downstream class prior, CSV class,value")
        ->check(CLI::ExistingFile);
    app->add_option("--beta-update", beta_update, "prior update rule: residual (default) or regroup");
    if (with_stages) app->add_flag("--emit-stages", emit_stages, "also write f_c/f_g/f_f/f_d matrices");
  }

  pipeline::PipelineConfig resolve(const CLI::App& app, Index classes) const {
    pipeline::PipelineConfig c;
    double ridge = 1.0;
    std::string pi_path;
    if (!config_file.empty()) {
      for (const auto& [key, value] : io::load_key_values(config_file)) {
        if (key == "tau-c") c.tau_c = parse_positive(key, value);
        else if (key == "epsilon") c.epsilon = parse_positive(key, value);
        else if (key == "ridge-scale") ridge = parse_positive(key, value);
        else if (key == "normalize") c.normalize_inputs = parse_bool(key, value);
        else if (key == "pi-file") pi_path = value;
        else if (key == "beta-update") c.beta_update = parse_update(value);
        else if (key == "emit-stages") (void)parse_bool(key, value);
        else throw UsageError("unknown config key: " + key);
      }
    }
    if (tau_c) c.tau_c = *tau_c;
    if (epsilon) c.epsilon = *epsilon;
    if (ridge_scale) ridge = *ridge_scale;
    if (app.count("--no-normalize")) c.normalize_inputs = false;
    if (app.count("--normalize")) c.normalize_inputs = true;
    if (!pi_file.empty()) pi_path = pi_file;
    if (!beta_update.empty()) c.beta_update = parse_update(beta_update);
    if (!(c.tau_c > 0.0) || !(c.epsilon > 0.0) || !(ridge > 0.0)) {
      throw UsageError("--tau-c, --epsilon and --ridge-scale must be positive");
    }
    c.covariance.ridge_initial *= ridge;
    c.covariance.ridge_cap *= ridge;
    if (!pi_path.empty()) c.pi = load_vector_file(pi_path, classes);
    return c;
  }

  bool stages_requested() const {
    if (emit_stages) return true;
    if (config_file.empty()) return false;
    const auto kv = io::load_key_values(config_file);
    const auto it = kv.find("emit-stages");
    return it != kv.end() && parse_bool(it->first, it->second);
  }
};

inline PrototypeSet load_prototypes(const std::string& path, const std::string& names_path) {
  PrototypeSet p;
  p.data = io::load_feature_matrix(path);
  p.class_names = names_path.empty() ? io::default_class_names(p.classes())
                                     : io::load_class_names(names_path);
  if (static_cast<Index>(p.class_names.size()) != p.classes()) {
    throw Error(ErrorCode::kDimensionMismatch, "class-name count differs from prototype rows");
  }
  return p;
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + dir.string());
}

inline void print_metrics(std::ostream& out, const pipeline::Metrics& m) {
  out << "accuracy = " << io::format_double(m.accuracy) << "\n";
  for (std::size_t j = 0; j < m.per_class_accuracy.size(); ++j) {
    out << "class_" << j << "_accuracy = " << io::format_double(m.per_class_accuracy[j])
        << " (n=" << m.per_class_count[j] << ")\n";
  }
  if (m.mean_probabilities) {
    out << "mean_probabilities = " << join(*m.mean_probabilities) << "\n";
  }
}

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  namespace fs = std::filesystem;
  using namespace detail;

  CLI::App app{"frolic: label-free zero-shot adaptation on precomputed embeddings", "frolic"};
  app.require_subcommand(1);
  app.allow_extras(false);

  // run
  auto* run = app.add_subcommand("run", "full pipeline: base, Gaussian head, fusion, debiasing");
  std::string features, prototypes, names, out_dir, labels_path;
  PipelineFlags run_flags;
  run->add_option("--features", features, "FMAT1 embeddings")->required()->check(CLI::ExistingFile);
  run->add_option("--prototypes", prototypes, "FMAT1 class prototypes")->required()->check(CLI::ExistingFile);
  run->add_option("--class-names", names, "one class name per line")->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "report directory")->required();
  run->add_option("--labels", labels_path, "optional labels CSV; prints accuracy per stage")
      ->check(CLI::ExistingFile);
  run_flags.add_to(run, true);

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic Gaussian-mixture dataset");
  std::string synth_out, kind = "mixture", pi_list, beta_list;
  std::uint64_t seed = 0;
  synth::IsotropicPrototypeParams iso;
  synth::ContaminatedParams contaminated;
  std::optional<Index> classes, dim, samples;
  std::optional<double> eig_lo, eig_hi, beta_spread;
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--kind", kind, "mixture (orthonormal prototypes) or contaminated")
      ->check(CLI::IsMember({"mixture", "contaminated"}));
  synth_cmd->add_option("--seed", seed, "64-bit seed");
  synth_cmd->add_option("--classes", classes, "number of classes K");
  synth_cmd->add_option("--dim", dim, "feature dimension d");
  synth_cmd->add_option("--samples", samples, "number of samples N");
  synth_cmd->add_option("--separation", iso.separation, "mixture: prototype norm");
  synth_cmd->add_option("--eig-lo", eig_lo, "smallest covariance eigenvalue (before noise scaling)");
  synth_cmd->add_option("--eig-hi", eig_hi, "largest covariance eigenvalue (before noise scaling)");
  synth_cmd->add_option("--noise", contaminated.noise, "contaminated: noise scale");
  synth_cmd->add_option("--class-scale", contaminated.class_scale, "contaminated: class-specific prototype part");
  synth_cmd->add_option("--pi", pi_list, "mixture: comma-separated class frequencies");
  auto* beta_opt = synth_cmd->add_option("--beta", beta_list, "comma-separated planted prior");
  auto* spread_opt = synth_cmd->add_option("--beta-spread", beta_spread, "log-normal spread of a random planted prior");
  beta_opt->excludes(spread_opt);

  // eval
  auto* eval = app.add_subcommand("eval", "accuracy of a predictions file against labels");
  std::string predictions_path, probs_path;
  Index eval_classes = 0;
  eval->add_option("--predictions", predictions_path, "CSV index,prediction")->required()->check(CLI::ExistingFile);
  eval->add_option("--labels", labels_path, "CSV index,label")->required()->check(CLI::ExistingFile);
  eval->add_option("--classes", eval_classes, "number of classes (default: inferred)");
  eval->add_option("--probs", probs_path, "optional FMAT1 N x K probabilities")->check(CLI::ExistingFile);

  // debias
  auto* debias_cmd = app.add_subcommand("debias", "estimate the label prior of a logit matrix and correct it");
  std::string logits_path, method = "frolic";
  PipelineFlags debias_flags;
  debias_cmd->add_option("--logits", logits_path, "FMAT1 N x K logits (e.g. f_f.fmat)")->check(CLI::ExistingFile);
  debias_cmd->add_option("--method", method, "frolic, implicit or tde")
      ->check(CLI::IsMember({"frolic", "implicit", "tde"}));
  debias_cmd->add_option("--features", features, "tde: FMAT1 embeddings")->check(CLI::ExistingFile);
  debias_cmd->add_option("--prototypes", prototypes, "tde: FMAT1 prototypes")->check(CLI::ExistingFile);
  debias_cmd->add_option("--out", out_dir, "output directory")->required();
  debias_flags.add_to(debias_cmd, false);

  // fuse
  auto* fuse = app.add_subcommand("fuse", "confidence-matched fusion of two logit matrices");
  std::string base_path, gauss_path;
  PipelineFlags fuse_flags;
  fuse->add_option("--base", base_path, "FMAT1 base logits f_c")->required()->check(CLI::ExistingFile);
  fuse->add_option("--gaussian", gauss_path, "FMAT1 Gaussian logits f_g")->required()->check(CLI::ExistingFile);
  fuse->add_option("--out", out_dir, "output directory")->required();
  fuse_flags.add_to(fuse, false);

  // gda
  auto* gda_cmd = app.add_subcommand("gda", "estimate the shared covariance and score with the Gaussian head");
  PipelineFlags gda_flags;
  gda_cmd->add_option("--features", features, "FMAT1 embeddings")->required()->check(CLI::ExistingFile);
  gda_cmd->add_option("--prototypes", prototypes, "FMAT1 prototypes")->required()->check(CLI::ExistingFile);
  gda_cmd->add_option("--out", out_dir, "output directory")->required();
  gda_flags.add_to(gda_cmd, false);

  // diag
  auto* diag = app.add_subcommand("diag", "moment and calibration diagnostics");
  PipelineFlags diag_flags;
  diag->add_option("--features", features, "FMAT1 embeddings")->required()->check(CLI::ExistingFile);
  diag->add_option("--prototypes", prototypes, "FMAT1 prototypes")->required()->check(CLI::ExistingFile);
  diag_flags.add_to(diag, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    if (run->parsed()) {
      EmbeddingSet embeddings = io::load_embeddings(features);
      PrototypeSet protos = load_prototypes(prototypes, names);
      const auto config = run_flags.resolve(*run, protos.classes());
      const auto report = pipeline::run_frolic(embeddings, protos, config);
      pipeline::write_report(report, out_dir, run_flags.stages_requested());
      out << "predictions written to " << out_dir << "\n";
      out << "tau_g = " << io::format_double(report.temps.tau_g)
          << ", outer iterations = " << report.prior.iterations_outer << "\n";
      if (report.prior.degenerate) out << "warning: prior estimate is degenerate (empty pseudo-classes)\n";
      if (report.covariance.repaired) out << "warning: covariance estimate was indefinite and repaired\n";
      if (!labels_path.empty()) {
        const auto labels = io::load_labels(labels_path);
        for (const auto& [name, stage] : {std::pair{"f_c", &report.f_c}, {"f_g", &report.f_g},
                                          {"f_f", &report.f_f}, {"f_d", &report.f_d}}) {
          out << name << "_accuracy = " << io::format_double(pipeline::accuracy(*stage, labels)) << "\n";
        }
      }
    } else if (synth_cmd->parsed()) {
      synth::MixtureSpec spec;
      std::optional<Vector> beta;
      if (!beta_list.empty()) beta = parse_list(beta_list);
      if (kind == "mixture") {
        if (classes) iso.classes = *classes;
        if (dim) iso.dim = *dim;
        if (samples) iso.samples = *samples;
        if (eig_lo) iso.eig_lo = *eig_lo;
        if (eig_hi) iso.eig_hi = *eig_hi;
        if (beta_spread) {
          beta = synth::random_prior(iso.classes, *beta_spread, random::stream_seed(seed, 103));
        }
        spec = synth::make_mixture_spec(iso, seed, beta);
        if (!pi_list.empty()) spec.pi_true = parse_list(pi_list);
      } else {
        if (classes) contaminated.classes = *classes;
        if (dim) contaminated.dim = *dim;
        if (samples) contaminated.samples = *samples;
        if (eig_lo) contaminated.eig_lo = *eig_lo;
        if (eig_hi) contaminated.eig_hi = *eig_hi;
        if (beta_spread) contaminated.log_prior_spread = *beta_spread;
        if (!pi_list.empty()) throw UsageError("--pi applies to --kind mixture only");
        spec = synth::make_contaminated_spec(contaminated, seed, beta);
      }
      const auto sample = synth::sample_mixture(spec);
      const fs::path dir = synth_out;
      ensure_dir(dir);
      io::save_feature_matrix(sample.embeddings.data, dir / "features.fmat");
      io::save_labels(sample.labels, dir / "labels.csv");
      io::save_feature_matrix(spec.prototypes, dir / "prototypes.fmat");
      io::save_feature_matrix(spec.sigma, dir / "sigma.fmat");
      io::save_class_names(io::default_class_names(spec.classes), dir / "classes.txt");
      std::vector<std::pair<std::string, std::string>> manifest = {
          {"kind", kind},
          {"seed", std::to_string(seed)},
          {"classes", std::to_string(spec.classes)},
          {"dim", std::to_string(spec.dim)},
          {"samples", std::to_string(spec.samples)},
          {"pi", join(spec.pi_true)}};
      if (spec.beta_true) manifest.emplace_back("beta", join(*spec.beta_true));
      if (kind == "mixture") {
        manifest.emplace_back("separation", io::format_double(iso.separation));
        manifest.emplace_back("eig_lo", io::format_double(iso.eig_lo));
        manifest.emplace_back("eig_hi", io::format_double(iso.eig_hi));
        if (spec.beta_true) {
          io::save_feature_matrix(synth::biased_logits(sample.embeddings, spec).scores,
                                  dir / "biased_logits.fmat");
        }
      } else {
        manifest.emplace_back("class_scale", io::format_double(contaminated.class_scale));
        manifest.emplace_back("noise", io::format_double(contaminated.noise));
        manifest.emplace_back("eig_lo", io::format_double(contaminated.eig_lo));
        manifest.emplace_back("eig_hi", io::format_double(contaminated.eig_hi));
        manifest.emplace_back("tau_c", io::format_double(contaminated.tau_c));
      }
      io::detail::write_file(dir / "manifest.txt", io::encode_key_values(manifest));
      out << "wrote " << spec.samples << " samples to " << synth_out << "\n";
    } else if (eval->parsed()) {
      const auto predictions = io::load_predictions(predictions_path);
      const auto labels = io::load_labels(labels_path);
      Index k = eval_classes;
      if (k <= 0) {
        for (auto v : predictions) k = std::max(k, v + 1);
        for (auto v : labels.labels) k = std::max(k, v + 1);
      }
      std::optional<Matrix> probs;
      if (!probs_path.empty()) probs = io::load_feature_matrix(probs_path);
      print_metrics(out, pipeline::evaluate(predictions, labels, k, probs ? &*probs : nullptr));
    } else if (debias_cmd->parsed()) {
      const fs::path dir = out_dir;
      if (method == "tde") {
        if (features.empty() || prototypes.empty()) throw UsageError("tde needs --features and --prototypes");
        auto embeddings = io::load_embeddings(features);
        auto protos = load_prototypes(prototypes, "");
        const auto config = debias_flags.resolve(*debias_cmd, protos.classes());
        if (config.normalize_inputs) {
          embeddings = io::normalized(embeddings);
          protos = io::normalized(protos);
        }
        const auto scores = gda::score_base(protos, debias::tde_project(embeddings));
        ensure_dir(dir);
        io::detail::write_file(dir / "predictions.csv", io::encode_predictions(argmax_rows(scores)));
      } else {
        if (logits_path.empty()) throw UsageError("--logits is required for method " + method);
        const LogitMatrix logits{io::load_feature_matrix(logits_path)};
        const auto config = debias_flags.resolve(*debias_cmd, logits.classes());
        Vector beta;
        std::vector<double> trajectory;
        if (method == "implicit") {
          beta = debias::implicit_prior(debias::softmax_rows(logits));
        } else {
          debias::BetaOptions options;
          options.epsilon = config.epsilon;
          options.update = config.beta_update;
          options.pi = config.pi;
          const auto estimate = debias::estimate_beta_iterative(logits, options);
          beta = estimate.beta;
          trajectory = estimate.l1_trajectory;
          if (estimate.degenerate) out << "warning: prior estimate is degenerate (empty pseudo-classes)\n";
        }
        const auto adjusted = debias::adjust_logits(logits, beta, config.pi);
        ensure_dir(dir);
        io::detail::write_file(dir / "beta.csv", io::encode_vector_csv(beta, "class", "beta"));
        if (method == "frolic") {
          io::detail::write_file(dir / "trajectory.csv", io::encode_trajectory(trajectory));
        }
        io::detail::write_file(dir / "predictions.csv",
                               io::encode_predictions(argmax_rows(adjusted.logits)));
        out << "beta = " << join(beta) << "\n";
      }
    } else if (fuse->parsed()) {
      const LogitMatrix base{io::load_feature_matrix(base_path)};
      const LogitMatrix gauss{io::load_feature_matrix(gauss_path)};
      const auto config = fuse_flags.resolve(*fuse, base.classes());
      const double target = fusion::average_confidence(base, config.tau_c);
      const auto temps = fusion::match_confidence(gauss, target, config.search, config.tau_c);
      const auto fused = fusion::fuse_logits(base, gauss, temps);
      const fs::path dir = out_dir;
      ensure_dir(dir);
      io::save_feature_matrix(fused.scores, dir / "f_f.fmat");
      pipeline::PipelineReport r;
      r.temps = temps;
      io::detail::write_file(dir / "temps.txt", pipeline::encode_temps(r));
      out << "tau_g = " << io::format_double(temps.tau_g) << "\n";
    } else if (gda_cmd->parsed()) {
      auto embeddings = io::load_embeddings(features);
      auto protos = load_prototypes(prototypes, "");
      const auto config = gda_flags.resolve(*gda_cmd, protos.classes());
      if (config.normalize_inputs) {
        embeddings = io::normalized(embeddings);
        protos = io::normalized(protos);
      }
      const auto moments = gda::estimate_moments(embeddings);
      const auto pi = config.pi ? gda::PriorVectorPi{*config.pi, gda::PriorSource::kFile, false}
                                : gda::uniform_pi(protos.classes());
      const auto sigma = gda::estimate_shared_covariance(moments, protos, pi, config.covariance);
      const auto head = gda::build_gaussian_head(sigma, protos);
      const fs::path dir = out_dir;
      ensure_dir(dir);
      io::save_feature_matrix(gda::score_gaussian(head, embeddings).scores, dir / "f_g.fmat");
      io::save_feature_matrix(gda::score_base(protos, embeddings).scores, dir / "f_c.fmat");
      io::save_feature_matrix(head.weights, dir / "weights.fmat");
      io::detail::write_file(dir / "biases.csv", io::encode_vector_csv(head.biases, "class", "bias"));
      io::detail::write_file(
          dir / "covariance.txt",
          io::encode_key_values({{"ridge", io::format_double(sigma.ridge)},
                                 {"repaired", sigma.repaired ? "true" : "false"},
                                 {"negative_eigenvalues", std::to_string(sigma.negative_eigenvalues)}}));
      out << "ridge = " << io::format_double(sigma.ridge) << "\n";
    } else if (diag->parsed()) {
      auto embeddings = io::load_embeddings(features);
      auto protos = load_prototypes(prototypes, "");
      const auto config = diag_flags.resolve(*diag, protos.classes());
      if (config.normalize_inputs) {
        embeddings = io::normalized(embeddings);
        protos = io::normalized(protos);
      }
      const auto moments = gda::estimate_moments(embeddings);
      out << "samples = " << embeddings.rows() << "\n";
      out << "dim = " << embeddings.dim() << "\n";
      out << "classes = " << protos.classes() << "\n";
      out << "trace_second_moment = " << io::format_double(moments.second_moment.trace()) << "\n";
      try {
        const auto pi = gda::estimate_pi_from_moments(protos, moments.mean);
        out << "moment_pi = " << join(pi.pi) << "\n";
        out << "moment_pi_outside_simplex = " << (pi.outside_simplex ? "true" : "false") << "\n";
      } catch (const Error& e) {
        out << "moment_pi = unavailable (" << to_string(e.code()) << ")\n";
      }
      const auto sigma = gda::estimate_shared_covariance(moments, protos,
                                                         gda::uniform_pi(protos.classes()),
                                                         config.covariance);
      out << "ridge = " << io::format_double(sigma.ridge) << "\n";
      out << "covariance_repaired = " << (sigma.repaired ? "true" : "false") << "\n";
      out << "negative_eigenvalues = " << sigma.negative_eigenvalues << "\n";
      const auto base = gda::score_base(protos, embeddings);
      out << "base_confidence = "
          << io::format_double(fusion::average_confidence(base, config.tau_c)) << "\n";
      LogitMatrix scaled{base.scores / config.tau_c};
      out << "base_implicit_prior = " << join(debias::implicit_prior(debias::softmax_rows(scaled)))
          << "\n";
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error";
    if (!e.stage().empty()) err << " [" << e.stage() << "]";
    err << ": " << e.what() << "\n";
    if (!e.trajectory().empty()) {
      err << "l1 trajectory:";
      for (double d : e.trajectory()) err << " " << io::format_double(d);
      err << "\n";
    }
    return e.category() == ErrorCategory::kNumerical ? kExitNumerical : kExitData;
  }
  return kExitOk;
}

inline int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace frolic::cli
