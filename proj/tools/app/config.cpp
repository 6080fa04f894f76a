#include "app/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "qmcst/rng.hpp"

namespace qmcst::app {

namespace {

using nlohmann::json;

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::uint64_t get_u64(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
  return j.get<std::uint64_t>();
}

int get_int(const json& j, const std::string& where, int lo, int hi) {
  const std::uint64_t v = get_u64(j, where);
  if (v < static_cast<std::uint64_t>(lo) || v > static_cast<std::uint64_t>(hi)) {
    throw ConfigError(where + ": must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "]");
  }
  return static_cast<int>(v);
}

double get_double(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

bool get_bool(const json& j, const std::string& where) {
  if (!j.is_boolean()) throw ConfigError(where + ": expected true or false");
  return j.get<bool>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

bool is_pow2(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

void parse_weights(const json& j, ExperimentConfig& c) {
  only_keys(j, "weights", {"mode", "gammas", "s"});
  const std::string mode = j.contains("mode") ? get_string(j["mode"], "weights.mode") : "full";
  if (mode == "full") {
    c.weight_mode = WeightMode::Full;
  } else if (mode == "superposition") {
    c.weight_mode = WeightMode::Superposition;
  } else if (mode == "truncation") {
    c.weight_mode = WeightMode::Truncation;
  } else {
    throw ConfigError("weights.mode: expected full, superposition or truncation");
  }
  if (j.contains("gammas")) {
    if (c.weight_mode == WeightMode::Truncation) {
      throw ConfigError("weights.gammas: truncation mode uses 0/1 weights and takes no gammas");
    }
    if (!j["gammas"].is_array()) throw ConfigError("weights.gammas: expected an array");
    for (const auto& g : j["gammas"]) c.gammas.push_back(get_double(g, "weights.gammas"));
  }
  if (j.contains("s")) {
    if (c.weight_mode == WeightMode::Full) throw ConfigError("weights.s: not used in full mode");
    c.s = get_int(j["s"], "weights.s", 1, 1 << 20);
  } else if (c.weight_mode != WeightMode::Full) {
    throw ConfigError("weights.s: required for " + mode + " mode");
  }
}

void parse_init(const json& j, ExperimentConfig& c) {
  only_keys(j, "init", {"kind", "seed", "scramble", "path"});
  const std::string kind = j.contains("kind") ? get_string(j["kind"], "init.kind") : "iid";
  if (kind == "iid") {
    c.init_kind = InitKind::Iid;
  } else if (kind == "sobol") {
    c.init_kind = InitKind::Sobol;
  } else if (kind == "external") {
    c.init_kind = InitKind::External;
  } else {
    throw ConfigError("init.kind: expected iid, sobol or external");
  }
  if (j.contains("seed")) c.init_seed = get_u64(j["seed"], "init.seed");
  if (j.contains("scramble")) {
    if (c.init_kind != InitKind::Sobol) throw ConfigError("init.scramble: only for sobol init");
    const std::string s = get_string(j["scramble"], "init.scramble");
    if (s == "none") {
      c.init_scramble = ScrambleKind::None;
    } else if (s == "shift") {
      c.init_scramble = ScrambleKind::DigitalShift;
    } else if (s == "owen") {
      c.init_scramble = ScrambleKind::Owen;
    } else {
      throw ConfigError("init.scramble: expected none, shift or owen");
    }
  }
  if (j.contains("path")) {
    if (c.init_kind != InitKind::External) throw ConfigError("init.path: only for external init");
    c.init_path = get_string(j["path"], "init.path");
  } else if (c.init_kind == InitKind::External) {
    throw ConfigError("init.path: required for external init");
  }
}

void parse_walk(const json& j, ExperimentConfig& c) {
  only_keys(j, "walk", {"mode", "lambda", "delta", "seed", "shuffle_pairs"});
  const std::string mode = j.contains("mode") ? get_string(j["mode"], "walk.mode") : "greedy";
  if (mode != "greedy" && mode != "strict") throw ConfigError("walk.mode: expected greedy or strict");
  c.strict_walk = mode == "strict";
  if (j.contains("lambda")) {
    if (c.strict_walk) throw ConfigError("walk.lambda: strict mode derives lambda from delta");
    c.lambda = get_double(j["lambda"], "walk.lambda");
    if (!(c.lambda > 0.0)) throw ConfigError("walk.lambda: must be positive");
  }
  if (j.contains("delta")) {
    if (!c.strict_walk) throw ConfigError("walk.delta: only for strict mode");
    c.delta = get_double(j["delta"], "walk.delta");
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("walk.delta: must lie in (0,1)");
  }
  if (j.contains("seed")) c.walk_seed = get_u64(j["seed"], "walk.seed");
  if (j.contains("shuffle_pairs")) c.shuffle_pairs = get_bool(j["shuffle_pairs"], "walk.shuffle_pairs");
}

void parse_shift(const json& j, ExperimentConfig& c) {
  only_keys(j, "shift", {"seed", "target"});
  if (j.contains("seed")) c.shift_seed = get_u64(j["seed"], "shift.seed");
  if (j.contains("target")) {
    const std::string t = get_string(j["target"], "shift.target");
    if (t == "grid") {
      c.shift_target = ShiftTarget::Grid;
    } else if (t == "points") {
      c.shift_target = ShiftTarget::Points;
    } else {
      throw ConfigError("shift.target: expected grid or points");
    }
  }
}

void parse_integrand(const json& j, ExperimentConfig& c) {
  only_keys(j, "integrand", {"name", "asian"});
  if (!j.contains("name")) throw ConfigError("integrand.name: required");
  c.integrand = get_string(j["name"], "integrand.name");
  if (c.integrand != "truncation" && c.integrand != "asian" && c.integrand.rfind("fourier:", 0) != 0) {
    throw ConfigError("integrand.name: expected truncation, asian or fourier:<file>");
  }
  if (j.contains("asian")) {
    if (c.integrand != "asian") throw ConfigError("integrand.asian: only for the asian integrand");
    const json& a = j["asian"];
    only_keys(a, "integrand.asian", {"s0", "strike", "maturity", "rate", "sigma"});
    if (a.contains("s0")) c.asian.s0 = get_double(a["s0"], "integrand.asian.s0");
    if (a.contains("strike")) c.asian.strike = get_double(a["strike"], "integrand.asian.strike");
    if (a.contains("maturity")) c.asian.maturity = get_double(a["maturity"], "integrand.asian.maturity");
    if (a.contains("rate")) c.asian.rate = get_double(a["rate"], "integrand.asian.rate");
    if (a.contains("sigma")) c.asian.sigma = get_double(a["sigma"], "integrand.asian.sigma");
  }
}

void parse_baselines(const json& j, ExperimentConfig& c) {
  only_keys(j, "baselines", {"iid", "sobol", "sobol_scrambled"});
  if (j.contains("iid")) c.baseline_iid = get_bool(j["iid"], "baselines.iid");
  if (j.contains("sobol")) c.baseline_sobol = get_bool(j["sobol"], "baselines.sobol");
  if (j.contains("sobol_scrambled")) {
    c.baseline_sobol_scrambled = get_bool(j["sobol_scrambled"], "baselines.sobol_scrambled");
  }
}

}  // namespace

WeightProfile ExperimentConfig::profile() const {
  std::vector<double> g = gammas.empty() ? std::vector<double>(d, 1.0) : gammas;
  switch (weight_mode) {
    case WeightMode::Full:
      return WeightProfile::full(std::move(g));
    case WeightMode::Superposition:
      return WeightProfile::superposition(std::move(g), s);
    case WeightMode::Truncation:
      return WeightProfile::truncation(d, s);
  }
  throw ConfigError("unknown weight mode");
}

std::uint64_t ExperimentConfig::derived_seed(std::size_t rep, std::uint64_t stream) const {
  return Rng::derive(seed, (static_cast<std::uint64_t>(rep) << 8) | stream);
}

TransferenceConfig ExperimentConfig::transference(std::uint64_t target_n, std::size_t rep) const {
  TransferenceConfig t;
  t.n = target_n;
  t.d = d;
  t.oversample_k = oversample_k;
  t.profile = profile();
  t.h_override = h;
  const std::uint64_t init = init_seed ? *init_seed + rep : derived_seed(rep, 1);
  switch (init_kind) {
    case InitKind::Iid:
      t.init = IidInit{init};
      break;
    case InitKind::Sobol:
      t.init = SobolInit{init, init_scramble};
      break;
    case InitKind::External:
      t.init = ExternalInit{load_qmcpts(init_path)};
      break;
  }
  if (strict_walk) {
    t.walk.lambda_mode = StrictLambda{delta};
  } else {
    t.walk.lambda_mode = GreedyLambda{lambda};
  }
  t.walk.seed = walk_seed ? *walk_seed + rep : derived_seed(rep, 2);
  t.walk.shuffle_pairs = shuffle_pairs;
  t.shift_seed = shift_seed ? *shift_seed + rep : derived_seed(rep, 3);
  t.shift_target = shift_target.value_or(ShiftTarget::Grid);
  return t;
}

ExperimentConfig parse_config(const json& j) {
  only_keys(j, "config",
            {"seed", "n", "n_sweep", "d", "oversample_k", "h", "weights", "init", "walk", "shift",
             "repetitions", "baselines", "integrand", "output_dir", "workers"});
  ExperimentConfig c;
  if (j.contains("seed")) c.seed = get_u64(j["seed"], "seed");
  if (j.contains("d")) c.d = get_int(j["d"], "d", 1, 1024);
  if (j.contains("n")) {
    c.n = get_u64(j["n"], "n");
    if (!is_pow2(*c.n)) throw ConfigError("n: must be a power of two, got " + std::to_string(*c.n));
  }
  if (j.contains("n_sweep")) {
    if (!j["n_sweep"].is_array() || j["n_sweep"].empty()) {
      throw ConfigError("n_sweep: expected a non-empty array");
    }
    for (const auto& v : j["n_sweep"]) {
      const std::uint64_t n = get_u64(v, "n_sweep");
      if (!is_pow2(n)) throw ConfigError("n_sweep: " + std::to_string(n) + " is not a power of two");
      c.n_sweep.push_back(n);
    }
  }
  if (j.contains("oversample_k")) {
    c.oversample_k = get_u64(j["oversample_k"], "oversample_k");
    if (!is_pow2(c.oversample_k) || c.oversample_k < 2) {
      throw ConfigError("oversample_k: must be a power of two >= 2");
    }
  }
  if (j.contains("h")) c.h = get_int(j["h"], "h", 0, 61);
  if (j.contains("weights")) parse_weights(j["weights"], c);
  if (j.contains("init")) parse_init(j["init"], c);
  if (j.contains("walk")) parse_walk(j["walk"], c);
  if (j.contains("shift")) parse_shift(j["shift"], c);
  if (j.contains("repetitions")) c.repetitions = get_int(j["repetitions"], "repetitions", 1, 1 << 20);
  if (j.contains("baselines")) parse_baselines(j["baselines"], c);
  if (j.contains("integrand")) parse_integrand(j["integrand"], c);
  if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
  if (j.contains("workers")) c.workers = get_int(j["workers"], "workers", 1, 1024);
  c.asian.d = c.d;
  try {
    (void)c.profile();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
  if (!c.gammas.empty() && static_cast<int>(c.gammas.size()) != c.d) {
    throw ConfigError("weights.gammas: expected " + std::to_string(c.d) + " entries");
  }
  if (c.integrand == "asian") {
    try {
      c.asian.validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(std::string("integrand.asian: ") + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

void validate_transference(const ExperimentConfig& cfg) {
  std::vector<std::uint64_t> ns = cfg.n_sweep;
  if (cfg.n) ns.push_back(*cfg.n);
  for (std::uint64_t n : ns) {
    try {
      TransferenceConfig t = cfg.transference(n, 0);
      t.validate();
      if (t.refinement_depth() > 61) throw PreconditionError("refinement depth exceeds 61");
      (void)BoxIndex(t.d, t.refinement_depth(), t.profile.mode(), t.profile.s_eff());
    } catch (const std::exception& e) {
      throw ConfigError("n=" + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace qmcst::app
