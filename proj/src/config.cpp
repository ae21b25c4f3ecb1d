#include "wadet/config.hpp"

#include <fstream>
#include <set>

namespace wadet {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config error at " + where + ": " + what);
}

void reject_unknown_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) fail(where + "/" + key, "unknown key");
  }
}

const json& require_key(const json& j, const std::string& where,
                        const std::string& key) {
  if (!j.contains(key)) fail(where, "missing key '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

long as_integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(where, "expected an integer");
  return j.get<long>();
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty matrix");
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty())
    fail(where, "expected rows to be non-empty arrays");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      fail(where, "ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_number(j[r][c], where);
  }
  return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

NoisePrimitive parse_primitive(const json& j, const std::string& where) {
  const std::string type =
      require_key(j, where, "type").get<std::string>();
  if (type == "gaussian") {
    reject_unknown_keys(j, where, {"type", "mean", "variance"});
    return NoisePrimitive::gaussian(
        as_number(require_key(j, where, "mean"), where + "/mean"),
        as_number(require_key(j, where, "variance"), where + "/variance"));
  }
  if (type == "uniform") {
    reject_unknown_keys(j, where, {"type", "lo", "hi"});
    return NoisePrimitive::uniform(
        as_number(require_key(j, where, "lo"), where + "/lo"),
        as_number(require_key(j, where, "hi"), where + "/hi"));
  }
  if (type == "point_mass") {
    reject_unknown_keys(j, where, {"type", "value"});
    return NoisePrimitive::point_mass(
        as_number(require_key(j, where, "value"), where + "/value"));
  }
  fail(where, "unknown primitive type '" + type + "'");
}

json primitive_to_json(const NoisePrimitive& prim) {
  switch (prim.kind) {
    case NoisePrimitive::Kind::gaussian:
      return {{"type", "gaussian"}, {"mean", prim.a}, {"variance", prim.b}};
    case NoisePrimitive::Kind::uniform:
      return {{"type", "uniform"}, {"lo", prim.a}, {"hi", prim.b}};
    case NoisePrimitive::Kind::point_mass:
      return {{"type", "point_mass"}, {"value", prim.a}};
  }
  return {};
}

NoiseSpec parse_noise_spec(const json& j, const std::string& where,
                           int expected_dim) {
  if (!j.is_array()) fail(where, "expected per-coordinate array");
  if (static_cast<int>(j.size()) != expected_dim)
    fail(where, "expected " + std::to_string(expected_dim) + " coordinates");
  NoiseSpec spec;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string coord = where + "/" + std::to_string(i);
    if (!j[i].is_array() || j[i].empty())
      fail(coord, "expected a non-empty list of primitives");
    std::vector<NoisePrimitive> terms;
    for (std::size_t k = 0; k < j[i].size(); ++k)
      terms.push_back(
          parse_primitive(j[i][k], coord + "/" + std::to_string(k)));
    spec.terms.push_back(std::move(terms));
  }
  return spec;
}

json noise_spec_to_json(const NoiseSpec& spec) {
  json coords = json::array();
  for (const auto& terms : spec.terms) {
    json list = json::array();
    for (const auto& prim : terms) list.push_back(primitive_to_json(prim));
    coords.push_back(list);
  }
  return coords;
}

std::vector<double> parse_number_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(as_number(j[i], where + "/" + std::to_string(i)));
  return out;
}

}  // namespace

AttackPolicy AttackConfig::make_policy(
    std::shared_ptr<const EmpiricalDistribution> benchmark) const {
  const long stop = end.value_or(std::numeric_limits<long>::max());
  switch (kind) {
    case AttackPolicy::Kind::none:
      return AttackPolicy::none();
    case AttackPolicy::Kind::additive_fixed:
      return AttackPolicy::additive_fixed(value, start, stop);
    case AttackPolicy::Kind::additive_noise:
      return AttackPolicy::additive_noise(spec, start, stop);
    case AttackPolicy::Kind::stealthy_resample:
      return AttackPolicy::stealthy_resample(std::move(benchmark), jitter,
                                             start, stop);
  }
  throw ConfigError("invalid attack kind");
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  reject_unknown_keys(
      j, "", {"seed", "plant", "noise", "profile", "detection", "attack",
              "reach"});

  ExperimentConfig cfg;
  cfg.seed = static_cast<std::uint64_t>(
      as_integer(require_key(j, "", "seed"), "/seed"));

  {
    const json& p = require_key(j, "", "plant");
    reject_unknown_keys(p, "/plant", {"A", "B", "C", "L", "K"});
    try {
      cfg.plant = LinearPlant::make(
          parse_matrix(require_key(p, "/plant", "A"), "/plant/A"),
          parse_matrix(require_key(p, "/plant", "B"), "/plant/B"),
          parse_matrix(require_key(p, "/plant", "C"), "/plant/C"),
          parse_matrix(require_key(p, "/plant", "L"), "/plant/L"),
          parse_matrix(require_key(p, "/plant", "K"), "/plant/K"));
    } catch (const std::invalid_argument& e) {
      fail("/plant", e.what());
    }
  }

  {
    const json& n = require_key(j, "", "noise");
    reject_unknown_keys(n, "/noise", {"w", "v"});
    cfg.w_spec = parse_noise_spec(require_key(n, "/noise", "w"), "/noise/w",
                                  cfg.plant.n);
    cfg.v_spec = parse_noise_spec(require_key(n, "/noise", "v"), "/noise/v",
                                  cfg.plant.p);
  }

  {
    const json& p = require_key(j, "", "profile");
    reject_unknown_keys(p, "/profile", {"q", "a", "c1", "c2", "p"});
    try {
      cfg.profile = ConcentrationProfile::make(
          as_number(require_key(p, "/profile", "q"), "/profile/q"),
          as_number(require_key(p, "/profile", "a"), "/profile/a"),
          as_number(require_key(p, "/profile", "c1"), "/profile/c1"),
          as_number(require_key(p, "/profile", "c2"), "/profile/c2"),
          static_cast<int>(
              as_integer(require_key(p, "/profile", "p"), "/profile/p")));
    } catch (const std::invalid_argument& e) {
      fail("/profile", e.what());
    }
  }

  {
    const json& d = require_key(j, "", "detection");
    reject_unknown_keys(
        d, "/detection", {"N", "T", "beta", "delta", "burn_in", "gap", "steps"});
    cfg.detection.benchmark_samples =
        as_integer(require_key(d, "/detection", "N"), "/detection/N");
    cfg.detection.window =
        as_integer(require_key(d, "/detection", "T"), "/detection/T");
    cfg.detection.beta =
        as_number(require_key(d, "/detection", "beta"), "/detection/beta");
    cfg.detection.delta =
        as_number(require_key(d, "/detection", "delta"), "/detection/delta");
    if (d.contains("burn_in"))
      cfg.detection.burn_in = as_integer(d["burn_in"], "/detection/burn_in");
    if (d.contains("gap"))
      cfg.detection.gap = as_integer(d["gap"], "/detection/gap");
    if (d.contains("steps"))
      cfg.detection.steps = as_integer(d["steps"], "/detection/steps");
    if (cfg.detection.benchmark_samples < 1 || cfg.detection.window < 1)
      fail("/detection", "N and T must be >= 1");
    if (!(cfg.detection.beta > 0.0 && cfg.detection.beta < cfg.detection.delta &&
          cfg.detection.delta < 1.0))
      fail("/detection", "need 0 < beta < delta < 1");
    if (cfg.detection.burn_in < 0 || cfg.detection.gap < 1 ||
        cfg.detection.steps < 1)
      fail("/detection", "need burn_in >= 0, gap >= 1, steps >= 1");
  }

  {
    const json& a = require_key(j, "", "attack");
    const std::string kind =
        require_key(a, "/attack", "kind").get<std::string>();
    auto window = [&](const json& obj) {
      if (obj.contains("start"))
        cfg.attack.start = as_integer(obj["start"], "/attack/start");
      if (obj.contains("end"))
        cfg.attack.end = as_integer(obj["end"], "/attack/end");
      if (cfg.attack.end && *cfg.attack.end < cfg.attack.start)
        fail("/attack", "end must be >= start");
    };
    if (kind == "none") {
      reject_unknown_keys(a, "/attack", {"kind"});
      cfg.attack.kind = AttackPolicy::Kind::none;
    } else if (kind == "additive_fixed") {
      reject_unknown_keys(a, "/attack", {"kind", "value", "start", "end"});
      const auto values =
          parse_number_list(require_key(a, "/attack", "value"), "/attack/value");
      if (static_cast<int>(values.size()) != cfg.plant.p)
        fail("/attack/value", "dimension must match plant outputs");
      cfg.attack.kind = AttackPolicy::Kind::additive_fixed;
      cfg.attack.value = Eigen::Map<const Eigen::VectorXd>(
          values.data(), static_cast<Eigen::Index>(values.size()));
      window(a);
    } else if (kind == "additive_noise") {
      reject_unknown_keys(a, "/attack", {"kind", "spec", "start", "end"});
      cfg.attack.kind = AttackPolicy::Kind::additive_noise;
      cfg.attack.spec = parse_noise_spec(require_key(a, "/attack", "spec"),
                                         "/attack/spec", cfg.plant.p);
      window(a);
    } else if (kind == "stealthy_resample") {
      reject_unknown_keys(a, "/attack", {"kind", "jitter", "start", "end"});
      cfg.attack.kind = AttackPolicy::Kind::stealthy_resample;
      cfg.attack.jitter =
          as_number(require_key(a, "/attack", "jitter"), "/attack/jitter");
      if (cfg.attack.jitter < 0.0) fail("/attack/jitter", "must be >= 0");
      window(a);
    } else {
      fail("/attack/kind", "unknown attack kind '" + kind + "'");
    }
  }

  if (j.contains("reach")) {
    const json& r = j["reach"];
    reject_unknown_keys(r, "/reach",
                        {"a_grid", "a1_fractions", "s", "trials", "M",
                         "noise_benchmark_samples"});
    if (r.contains("a_grid"))
      cfg.reach.a_grid = parse_number_list(r["a_grid"], "/reach/a_grid");
    if (r.contains("a1_fractions"))
      cfg.reach.a1_fractions =
          parse_number_list(r["a1_fractions"], "/reach/a1_fractions");
    if (r.contains("s")) cfg.reach.s = as_number(r["s"], "/reach/s");
    if (r.contains("trials"))
      cfg.reach.trials = as_integer(r["trials"], "/reach/trials");
    if (r.contains("M")) cfg.reach.horizon = as_integer(r["M"], "/reach/M");
    if (r.contains("noise_benchmark_samples"))
      cfg.reach.noise_benchmark_samples = as_integer(
          r["noise_benchmark_samples"], "/reach/noise_benchmark_samples");
    for (double a : cfg.reach.a_grid)
      if (!(a >= 0.0 && a < 1.0)) fail("/reach/a_grid", "entries must be in [0, 1)");
    for (double f : cfg.reach.a1_fractions)
      if (!(f > 0.0 && f < 1.0))
        fail("/reach/a1_fractions", "entries must be in (0, 1)");
    if (!(cfg.reach.s > 0.0)) fail("/reach/s", "must be positive");
    if (cfg.reach.trials < 1 || cfg.reach.horizon < 0 ||
        cfg.reach.noise_benchmark_samples < 1)
      fail("/reach", "trials, M, noise_benchmark_samples must be positive");
  }

  return cfg;
}

nlohmann::json ExperimentConfig::to_json() const {
  json j;
  j["seed"] = seed;
  j["plant"] = {{"A", matrix_to_json(plant.A)},
                {"B", matrix_to_json(plant.B)},
                {"C", matrix_to_json(plant.C)},
                {"L", matrix_to_json(plant.L)},
                {"K", matrix_to_json(plant.K)}};
  j["noise"] = {{"w", noise_spec_to_json(w_spec)},
                {"v", noise_spec_to_json(v_spec)}};
  j["profile"] = {{"q", profile.q},
                  {"a", profile.a},
                  {"c1", profile.c1},
                  {"c2", profile.c2},
                  {"p", profile.p}};
  j["detection"] = {{"N", detection.benchmark_samples},
                    {"T", detection.window},
                    {"beta", detection.beta},
                    {"delta", detection.delta},
                    {"burn_in", detection.burn_in},
                    {"gap", detection.gap},
                    {"steps", detection.steps}};
  switch (attack.kind) {
    case AttackPolicy::Kind::none:
      j["attack"] = {{"kind", "none"}};
      break;
    case AttackPolicy::Kind::additive_fixed: {
      json values = json::array();
      for (Eigen::Index i = 0; i < attack.value.size(); ++i)
        values.push_back(attack.value[i]);
      j["attack"] = {{"kind", "additive_fixed"},
                     {"value", values},
                     {"start", attack.start}};
      break;
    }
    case AttackPolicy::Kind::additive_noise:
      j["attack"] = {{"kind", "additive_noise"},
                     {"spec", noise_spec_to_json(attack.spec)},
                     {"start", attack.start}};
      break;
    case AttackPolicy::Kind::stealthy_resample:
      j["attack"] = {{"kind", "stealthy_resample"},
                     {"jitter", attack.jitter},
                     {"start", attack.start}};
      break;
  }
  if (attack.kind != AttackPolicy::Kind::none && attack.end)
    j["attack"]["end"] = *attack.end;
  j["reach"] = {{"a_grid", reach.a_grid},
                {"a1_fractions", reach.a1_fractions},
                {"s", reach.s},
                {"trials", reach.trials},
                {"M", reach.horizon},
                {"noise_benchmark_samples", reach.noise_benchmark_samples}};
  return j;
}

}  // namespace wadet
