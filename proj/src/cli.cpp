#include "bundlelearn/cli.hpp"

#include "bundlelearn/config.hpp"
#include "bundlelearn/corpus.hpp"
#include "bundlelearn/design.hpp"
#include "bundlelearn/interactions.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace bundlelearn {

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  std::string config, strategy, out, out_dir, format;
  std::optional<std::uint64_t> seed;
  std::size_t sweep{0};
  unsigned threads{0};
};

struct SpectralArgs {
  std::string corpus, matrix, config, report, format;
  int min_appearances{1};
  bool interactions{false};
};

struct DesignArgs {
  std::string construction, cov, objective{"raise"}, norm{"L2"}, out, format;
  std::vector<double> delta, anchor, z;
  double di{0}, dj{0}, dij{0}, gap{0};
  long long i{0}, j{1}, target{0};
};

struct MarketArgs {
  std::string config, out, format;
};

struct ReplayArgs {
  std::string corpus, out, format;
  int min_appearances{1};
  bool interactions{false}, no_reduce{false};
  double rho{kDefaultRidge}, alpha{0.0};
  std::optional<std::int64_t> split_at;
  int min_before{0}, min_after{0};
};

Format resolve_format(const std::string& flag, const std::string& path) {
  if (flag == "json") return Format::JSON;
  if (flag == "csv") return Format::CSV;
  return fs::path(path).extension() == ".json" ? Format::JSON : Format::CSV;
}

const char* extension(Format f) { return f == Format::JSON ? ".json" : ".csv"; }

fs::path default_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

// Opens `path` for writing ("-" means `out`) and runs `write` on it.
template <typename Write>
void emit(const std::string& path, std::ostream& out, Write&& write) {
  if (path == "-") {
    write(out);
    return;
  }
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream file(p, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::SinkWriteFailure, "cannot open '" + path + "' for writing");
  write(file);
  file.flush();
  if (!file) throw Error(ErrorCode::SinkWriteFailure, "failed writing '" + path + "'");
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// "a,b;c,d" -> 2x2 matrix.
Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    rows.emplace_back();
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) rows.back().push_back(parse_double(cell));
  }
  if (rows.empty() || rows[0].empty()) throw Error(ErrorCode::InvalidArgument, "empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw Error(ErrorCode::InvalidArgument, "matrix rows differ in length");
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return m;
}

std::vector<NamedStrategy> select_strategies(const RunConfig& cfg, const std::string& name) {
  if (name.empty()) {
    if (cfg.strategies.empty()) throw Error(ErrorCode::ConfigError, "strategy: required (or pass --strategy)");
    return cfg.strategies;
  }
  for (const auto& s : cfg.strategies)
    if (s.name == name) return {s};
  for (const auto& s : cfg.strategies)
    if (to_string(s.strategy.kind) == name) return {s};
  const auto kind = strategy_kind_from_string(name);
  if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
  if (*kind == StrategyKind::FixedBundle)
    throw Error(ErrorCode::InvalidArgument, "the fixed strategy needs a bundle; declare it in the config");
  NamedStrategy ns{name, {}};
  ns.strategy.kind = *kind;
  return {ns};
}

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  RunConfig cfg = load_config(a.config);
  if (a.seed) cfg.scenario.noise.seed = *a.seed;
  const auto chosen = select_strategies(cfg, a.strategy);
  if (chosen.size() > 1 && !a.out.empty())
    throw Error(ErrorCode::InvalidArgument, "--out names one file but " + std::to_string(chosen.size()) +
                                                " strategies are selected; use --out-dir or --strategy");
  const Format format = resolve_format(a.format, a.out);
  const fs::path dir = default_dir(a.out_dir);
  for (const auto& ns : chosen) {
    const std::string suffix = a.sweep ? "_sweep" : "";
    const std::string path = a.out.empty() ? (dir / (ns.name + suffix + extension(format))).string() : a.out;
    if (a.sweep) {
      const auto runs = run_sweep(cfg.scenario, ns.strategy, cfg.scenario.noise.seed, a.sweep, a.threads);
      std::vector<SweepRow> rows;
      for (std::size_t k = 0; k < runs.size(); ++k)
        rows.push_back({cfg.scenario.noise.seed + k, convergence_diagnostics(runs[k])});
      emit(path, out, [&](std::ostream& s) { export_sweep(rows, s, format); });
    } else {
      const Trajectory traj = run(cfg.scenario, ns.strategy);
      emit(path, out, [&](std::ostream& s) { export_trajectory(traj, s, format); });
    }
  }
}

void cmd_spectral(const SpectralArgs& a, std::ostream& out) {
  const int sources = !a.corpus.empty() + !a.matrix.empty() + !a.config.empty();
  if (sources != 1) throw Error(ErrorCode::InvalidArgument, "give exactly one of --corpus, --matrix, --config");
  Matrix info;
  std::vector<std::string> labels;
  if (!a.corpus.empty()) {
    ReplayOptions opt;
    opt.min_appearances = a.min_appearances;
    opt.interactions = a.interactions;
    const ReplayReport rep = replay(load_corpus_file(a.corpus), opt);
    info = rep.reduced_design.transpose() * rep.reduced_design;
    labels = rep.reduced_labels;
  } else if (!a.matrix.empty()) {
    info = parse_matrix(a.matrix);
  } else {
    const RunConfig cfg = load_config(a.config);
    Rng rng(cfg.scenario.noise.seed);
    info = initial_state(cfg.scenario, rng).info;
  }
  const SpectralSummary summary = decompose(info);
  const Format format = resolve_format(a.format, a.report);
  const std::string path = a.report.empty() ? (default_dir("") / (std::string("spectral") + extension(format))).string()
                                            : a.report;
  emit(path, out, [&](std::ostream& s) { export_spectral(summary, labels, s, format); });
}

Eigen::Index good_index(long long v, Eigen::Index n, const char* flag) {
  if (v < 0 || v >= n)
    throw Error(ErrorCode::InvalidArgument, std::string(flag) + ": index out of range [0, " + std::to_string(n) + ")");
  return static_cast<Eigen::Index>(v);
}

void cmd_design(const DesignArgs& a, std::ostream& out) {
  DesignResult r{a.construction, {}, std::nullopt};
  const Vector delta = to_vector(a.delta);
  const auto need_cov = [&]() {
    if (a.cov.empty()) throw Error(ErrorCode::InvalidArgument, "--cov is required for " + a.construction);
    return parse_matrix(a.cov);
  };
  if (a.construction == "orthogonal") {
    const auto norm = norm_from_string(a.norm);
    if (!norm) throw Error(ErrorCode::InvalidArgument, "--norm: expected L1, L2 or LInf");
    std::optional<Bundle> anchor;
    if (!a.anchor.empty()) anchor = to_vector(a.anchor);
    r.bundle = orthogonal_bundle(delta, anchor, *norm);
  } else if (a.construction == "two_good") {
    const double ratio = two_good_orthogonal(a.di, a.dj);
    r.values.emplace_back("ratio", ratio);
    const Vector x = Vector{{1.0, ratio}};
    r.bundle = sum_normalized(x);
  } else if (a.construction == "joint_region") {
    const Matrix cov = need_cov();
    const auto reg = joint_increase_region(cov, good_index(a.i, cov.rows(), "--i"), good_index(a.j, cov.rows(), "--j"));
    r.values = {{"lower", reg.lower}, {"upper", reg.upper}, {"nonempty", reg.nonempty ? 1.0 : 0.0}};
  } else if (a.construction == "companion") {
    const Matrix cov = need_cov();
    if (a.objective != "raise" && a.objective != "lower")
      throw Error(ErrorCode::InvalidArgument, "--objective: expected raise or lower");
    const auto obj = a.objective == "raise" ? CompanionObjective::Raise : CompanionObjective::Lower;
    const auto k = companion_good(cov, delta, good_index(a.target, cov.rows(), "--target"), obj);
    r.values.emplace_back("companion", static_cast<double>(k));
  } else if (a.construction == "shifted") {
    r.bundle = shifted_orthogonal(delta, a.gap, to_vector(a.z));
  } else if (a.construction == "quadratic") {
    const double h = orthogonal_quadratic(a.di, a.dj, a.dij);
    r.values.emplace_back("h", h);
    r.bundle = Vector{{1.0 - h, h}};
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown construction '" + a.construction + "'");
  }
  const Format format = resolve_format(a.format, a.out);
  const std::string path = a.out.empty() ? "-" : a.out;
  emit(path, out, [&](std::ostream& s) { export_design(r, s, format); });
}

void cmd_market(const MarketArgs& a, std::ostream& out) {
  const RunConfig cfg = load_config(a.config);
  if (!cfg.market) throw Error(ErrorCode::ConfigError, "market: required for the market subcommand");
  const MarketSpec& m = *cfg.market;
  Rng rng(cfg.scenario.noise.seed);
  const PrecisionState state0 = initial_state(cfg.scenario, rng);
  MarketReport report;
  if (m.config.norm == Norm::L1) {
    const Vector beta_hat0 = m.beta_hat0 ? *m.beta_hat0 : state0.estimate;
    report.complete = plan_complete_info(cfg.scenario.beta_true, beta_hat0, state0, m.config);
  } else if (m.config.norm == Norm::L2) {
    if (!m.prior) throw Error(ErrorCode::ConfigError, "market.stance: required when market.norm is L2");
    report.prior = m.prior;
    report.incomplete = plan_incomplete_info(state0, *m.prior, m.config);
  } else {
    throw Error(ErrorCode::ConfigError, "market.norm: must be L1 (complete information) or L2 (prior belief)");
  }
  const Format format = resolve_format(a.format, a.out);
  const std::string path = a.out.empty() ? (default_dir("") / (std::string("market") + extension(format))).string() : a.out;
  emit(path, out, [&](std::ostream& s) { export_market(report, s, format); });
}

void cmd_replay(const ReplayArgs& a, std::ostream& out) {
  ReplayOptions opt;
  opt.min_appearances = a.min_appearances;
  opt.interactions = a.interactions;
  opt.reduce = !a.no_reduce;
  opt.rho = a.rho;
  opt.alpha = a.alpha;
  if (a.split_at) opt.split = SplitFilter{*a.split_at, a.min_before, a.min_after};
  const ReplayReport rep = replay(load_corpus_file(a.corpus), opt);
  const Format format = resolve_format(a.format, a.out);
  const std::string path = a.out.empty() ? (default_dir("") / (std::string("replay") + extension(format))).string() : a.out;
  emit(path, out, [&](std::ostream& s) { export_report(rep, s, format); });
}

void add_format(CLI::App* app, std::string& target) {
  app->add_option("--format", target, "csv or json (default: from the output extension, else csv)")
      ->check(CLI::IsMember({"csv", "json"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bundle-based preference learning: simulation, spectral analysis, design, pricing, corpus replay",
               "bundlelearn"};
  app.require_subcommand(1, 1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a learning trajectory from a config document");
  simulate->add_option("--config", sim.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  simulate->add_option("--strategy", sim.strategy, "strategy name or kind (default: every configured strategy)");
  simulate->add_option("--out", sim.out, "output file ('-' for stdout)");
  simulate->add_option("--out-dir", sim.out_dir, "directory for default-named outputs");
  simulate->add_option("--seed", sim.seed, "override noise.seed");
  simulate->add_option("--sweep", sim.sweep, "run N seeds from the base seed and write a summary")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--threads", sim.threads, "worker threads for --sweep (0: hardware)");
  add_format(simulate, sim.format);

  SpectralArgs spec;
  auto* spectral = app.add_subcommand("spectral", "Eigen-decompose an information matrix and rank centralities");
  spectral->add_option("--corpus", spec.corpus, "corpus CSV")->check(CLI::ExistingFile);
  spectral->add_option("--matrix", spec.matrix, "matrix literal 'a,b;c,d'");
  spectral->add_option("--config", spec.config, "use the initial state of a run configuration")
      ->check(CLI::ExistingFile);
  spectral->add_option("--report", spec.report, "output file ('-' for stdout)");
  spectral->add_option("--min-appearances", spec.min_appearances, "corpus entity filter")->check(CLI::PositiveNumber);
  spectral->add_flag("--interactions", spec.interactions, "add pair dummies for co-occurring entities");
  add_format(spectral, spec.format);

  DesignArgs des;
  auto* design = app.add_subcommand("design", "Evaluate a bundle construction");
  design->add_option("--construction", des.construction, "orthogonal | two_good | joint_region | companion | shifted | quadratic")
      ->required()
      ->check(CLI::IsMember({"orthogonal", "two_good", "joint_region", "companion", "shifted", "quadratic"}));
  design->add_option("--delta", des.delta, "estimation error, comma separated")->delimiter(',');
  design->add_option("--anchor", des.anchor, "anchor bundle for orthogonal")->delimiter(',');
  design->add_option("--z", des.z, "orthogonal component for shifted")->delimiter(',');
  design->add_option("--norm", des.norm, "normalization for orthogonal")->check(CLI::IsMember({"L1", "L2", "LInf"}));
  design->add_option("--di", des.di, "error of good i");
  design->add_option("--dj", des.dj, "error of good j");
  design->add_option("--dij", des.dij, "error of the pair interaction");
  design->add_option("--gap", des.gap, "intercept gap for shifted");
  design->add_option("--cov", des.cov, "covariance literal 'a,b;c,d'");
  design->add_option("--i", des.i, "first good");
  design->add_option("--j", des.j, "second good");
  design->add_option("--target", des.target, "target good for companion");
  design->add_option("--objective", des.objective, "raise or lower")->check(CLI::IsMember({"raise", "lower"}));
  design->add_option("--out", des.out, "output file (default stdout)");
  add_format(design, des.format);

  MarketArgs mk;
  auto* market = app.add_subcommand("market", "Plan bundles and prices from a run configuration's market section");
  market->add_option("--config", mk.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
  market->add_option("--out", mk.out, "output file ('-' for stdout)");
  add_format(market, mk.format);

  ReplayArgs rp;
  auto* replay_cmd = app.add_subcommand("replay", "Replay a corpus through the recursive estimator");
  replay_cmd->add_option("--corpus", rp.corpus, "corpus CSV")->required()->check(CLI::ExistingFile);
  replay_cmd->add_option("--min-appearances", rp.min_appearances, "entity filter")->check(CLI::PositiveNumber);
  replay_cmd->add_flag("--interactions", rp.interactions, "add pair dummies for co-occurring entities");
  replay_cmd->add_flag("--no-reduce", rp.no_reduce, "keep collinear columns");
  replay_cmd->add_option("--rho", rp.rho, "ridge scale before full rank")->check(CLI::PositiveNumber);
  replay_cmd->add_option("--alpha", rp.alpha, "known intercept");
  replay_cmd->add_option("--split-at", rp.split_at, "record position for the before/after filter");
  replay_cmd->add_option("--min-before", rp.min_before, "appearances required before --split-at");
  replay_cmd->add_option("--min-after", rp.min_after, "appearances required from --split-at on");
  replay_cmd->add_option("--out", rp.out, "output file ('-' for stdout)");
  add_format(replay_cmd, rp.format);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*simulate) cmd_simulate(sim, out);
    else if (*spectral) cmd_spectral(spec, out);
    else if (*design) cmd_design(des, out);
    else if (*market) cmd_market(mk, out);
    else if (*replay_cmd) cmd_replay(rp, out);
    return 0;
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error[Internal]: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace bundlelearn
