#include "bundlelearn/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace bundlelearn {

const char* to_string(Norm norm) noexcept {
  switch (norm) {
    case Norm::L1: return "L1";
    case Norm::L2: return "L2";
    case Norm::LInf: return "LInf";
  }
  return "L2";
}

std::optional<Norm> norm_from_string(const std::string& name) {
  for (auto n : {Norm::L1, Norm::L2, Norm::LInf})
    if (name == to_string(n)) return n;
  return std::nullopt;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw Error(ErrorCode::ConfigError, path + ": " + reason);
}

std::string join(const std::string& parent, const std::string& key) { return parent.empty() ? key : parent + "." + key; }

void only_keys(const YAML::Node& node, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!node.IsMap()) fail(path.empty() ? "<root>" : path, "expected a mapping");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) fail(join(path, key), "unknown key");
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& path, const char* expected) {
  if (!node.IsScalar()) fail(path, std::string("expected ") + expected);
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(path, std::string("expected ") + expected);
  }
}

double number(const YAML::Node& node, const std::string& path) {
  const double v = scalar<double>(node, path, "a number");
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

Vector vector(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence()) fail(path, "expected a list of numbers");
  Vector v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t k = 0; k < node.size(); ++k)
    v(static_cast<Eigen::Index>(k)) = number(node[k], path + "[" + std::to_string(k) + "]");
  return v;
}

Matrix matrix(const YAML::Node& node, const std::string& path) {
  if (!node.IsSequence() || node.size() == 0) fail(path, "expected a list of rows");
  const auto rows = static_cast<Eigen::Index>(node.size());
  Matrix m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Vector row = vector(node[static_cast<std::size_t>(r)], path + "[" + std::to_string(r) + "]");
    if (r == 0) m.resize(rows, row.size());
    if (row.size() != m.cols()) fail(path, "rows have different lengths");
    m.row(r) = row.transpose();
  }
  return m;
}

Norm norm_value(const YAML::Node& node, const std::string& path) {
  const auto name = scalar<std::string>(node, path, "L1, L2 or LInf");
  const auto n = norm_from_string(name);
  if (!n) fail(path, "expected L1, L2 or LInf, got '" + name + "'");
  return *n;
}

NamedStrategy strategy(const YAML::Node& node, const std::string& path, Eigen::Index n) {
  only_keys(node, path, {"name", "kind", "recompute", "bundle", "i", "j", "ratio"});
  if (!node["kind"]) fail(join(path, "kind"), "required");
  const auto kind_name = scalar<std::string>(node["kind"], join(path, "kind"), "a strategy name");
  const auto kind = strategy_kind_from_string(kind_name);
  if (!kind)
    fail(join(path, "kind"), "unknown strategy '" + kind_name +
                                 "' (round_robin, popularity, correlation_breaking, orthogonal, fixed, two_good)");
  NamedStrategy out;
  out.name = node["name"] ? scalar<std::string>(node["name"], join(path, "name"), "a string") : kind_name;
  Strategy& s = out.strategy;
  s.kind = *kind;
  if (node["recompute"]) s.recompute = scalar<bool>(node["recompute"], join(path, "recompute"), "true or false");
  if (node["bundle"]) {
    s.bundle = vector(node["bundle"], join(path, "bundle"));
    if (s.bundle.size() != n) fail(join(path, "bundle"), "must have one entry per good");
  } else if (s.kind == StrategyKind::FixedBundle) {
    fail(join(path, "bundle"), "required for the fixed strategy");
  }
  const auto index = [&](const char* key, Eigen::Index fallback) {
    if (!node[key]) return fallback;
    const auto v = scalar<long long>(node[key], join(path, key), "an integer");
    if (v < 0 || v >= n) fail(join(path, key), "must be a good index in [0, " + std::to_string(n) + ")");
    return static_cast<Eigen::Index>(v);
  };
  s.i = index("i", 0);
  s.j = index("j", 1);
  if (s.kind == StrategyKind::TwoGoodTargeted && s.i == s.j) fail(join(path, "j"), "must differ from i");
  if (node["ratio"]) {
    const double r = number(node["ratio"], join(path, "ratio"));
    if (!(r > 0.0)) fail(join(path, "ratio"), "must be > 0");
    s.ratio = r;
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, "<document>: " + std::string(e.what()));
  }
  only_keys(root, "",
            {"version", "beta", "alpha", "alpha_hat", "noise", "init", "horizon", "norm", "strategy", "strategies",
             "market"});
  if (root["version"] && scalar<int>(root["version"], "version", "an integer") != 1)
    fail("version", "unsupported version (expected 1)");

  RunConfig cfg;
  Scenario& sc = cfg.scenario;
  if (!root["beta"]) fail("beta", "required");
  sc.beta_true = vector(root["beta"], "beta");
  const Eigen::Index n = sc.beta_true.size();
  if (n < 1) fail("beta", "must list at least one good");
  if (root["alpha"]) sc.alpha = number(root["alpha"], "alpha");
  if (root["alpha_hat"]) sc.alpha_hat = number(root["alpha_hat"], "alpha_hat");

  if (const auto noise = root["noise"]) {
    only_keys(noise, "noise", {"sigma2", "seed"});
    if (noise["sigma2"]) {
      sc.noise.sigma2 = number(noise["sigma2"], "noise.sigma2");
      if (sc.noise.sigma2 < 0.0) fail("noise.sigma2", "must be ≥ 0");
    }
    if (noise["seed"]) sc.noise.seed = scalar<std::uint64_t>(noise["seed"], "noise.seed", "a nonnegative integer");
  }

  sc.init = RidgeInit{kDefaultRidge, Vector::Zero(n)};
  if (const auto init = root["init"]) {
    only_keys(init, "init", {"kind", "rho", "beta0", "info"});
    const std::string kind = init["kind"] ? scalar<std::string>(init["kind"], "init.kind", "ridge, warmup or prior") : "ridge";
    const auto beta0 = [&]() -> Vector {
      if (!init["beta0"]) return Vector::Zero(n);
      Vector b = vector(init["beta0"], "init.beta0");
      if (b.size() != n) fail("init.beta0", "must have one entry per good");
      return b;
    };
    if (kind == "ridge") {
      RidgeInit r{kDefaultRidge, beta0()};
      if (init["rho"]) r.rho = number(init["rho"], "init.rho");
      if (!(r.rho > 0.0)) fail("init.rho", "must be > 0");
      if (init["info"]) fail("init.info", "only valid for kind prior");
      sc.init = r;
    } else if (kind == "warmup") {
      for (const char* key : {"rho", "beta0", "info"})
        if (init[key]) fail(join("init", key), "not valid for kind warmup");
      sc.init = WarmupInit{};
    } else if (kind == "prior") {
      if (!init["info"]) fail("init.info", "required for kind prior");
      PriorInit p{matrix(init["info"], "init.info"), beta0()};
      if (p.info.rows() != n || p.info.cols() != n) fail("init.info", "must be n x n");
      sc.init = p;
    } else {
      fail("init.kind", "expected ridge, warmup or prior, got '" + kind + "'");
    }
  }

  if (root["horizon"]) {
    const auto h = scalar<long long>(root["horizon"], "horizon", "an integer");
    if (h < 1) fail("horizon", "must be ≥ 1");
    sc.horizon = h;
  }
  if (root["norm"]) sc.norm = norm_value(root["norm"], "norm");

  if (root["strategy"] && root["strategies"]) fail("strategies", "give either strategy or strategies, not both");
  if (root["strategy"]) cfg.strategies.push_back(strategy(root["strategy"], "strategy", n));
  if (const auto list = root["strategies"]) {
    if (!list.IsSequence()) fail("strategies", "expected a list");
    std::set<std::string> names;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string path = "strategies[" + std::to_string(k) + "]";
      cfg.strategies.push_back(strategy(list[k], path, n));
      if (!names.insert(cfg.strategies.back().name).second) fail(join(path, "name"), "duplicate strategy name");
    }
  }

  if (const auto mk = root["market"]) {
    only_keys(mk, "market", {"gamma", "delta_weight", "norm", "regime_premise", "beta_hat0", "stance", "xi", "grid_points"});
    MarketSpec spec;
    MarketConfig& m = spec.config;
    m.gamma = mk["gamma"] ? vector(mk["gamma"], "market.gamma") : Vector::Zero(n);
    if (m.gamma.size() != n) fail("market.gamma", "must have one entry per good");
    if (mk["delta_weight"]) m.delta_weight = number(mk["delta_weight"], "market.delta_weight");
    if (!(m.delta_weight > 0.0)) fail("market.delta_weight", "must be > 0");
    if (mk["norm"]) m.norm = norm_value(mk["norm"], "market.norm");
    if (mk["regime_premise"])
      m.regime_premise = scalar<bool>(mk["regime_premise"], "market.regime_premise", "true or false");
    if (mk["grid_points"]) {
      m.grid_points = scalar<int>(mk["grid_points"], "market.grid_points", "an integer");
      if (m.grid_points < 2) fail("market.grid_points", "must be ≥ 2");
    }
    if (mk["beta_hat0"]) {
      spec.beta_hat0 = vector(mk["beta_hat0"], "market.beta_hat0");
      if (spec.beta_hat0->size() != n) fail("market.beta_hat0", "must have one entry per good");
    }
    if (mk["stance"]) {
      const auto st = scalar<std::string>(mk["stance"], "market.stance", "pessimistic or optimistic");
      PriorBelief prior{};
      if (st == "pessimistic")
        prior.stance = Stance::Pessimistic;
      else if (st == "optimistic")
        prior.stance = Stance::Optimistic;
      else
        fail("market.stance", "expected pessimistic or optimistic");
      prior.xi = mk["xi"] ? number(mk["xi"], "market.xi") : (prior.stance == Stance::Pessimistic ? -1.0 : 1.0);
      if (prior.stance == Stance::Pessimistic ? !(prior.xi < 0.0) : !(prior.xi > 0.0))
        fail("market.xi", "sign must match stance (negative when pessimistic, positive when optimistic)");
      spec.prior = prior;
    } else if (mk["xi"]) {
      fail("market.xi", "requires market.stance");
    }
    cfg.market = std::move(spec);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, path + ": cannot open config file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace bundlelearn
