#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "app/util.hpp"
#include "qmcst/integrands.hpp"
#include "qmcst/metrics.hpp"
#include "qmcst/rng.hpp"

namespace qmcst::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Smallest positive value Rng::uniform can return; stands in for exact zeros
// where an integrand needs the open cube.
constexpr double kSmallestUniform = 0x1.0p-53;

std::string output_dir(const GlobalOptions& g, const ExperimentConfig& cfg) {
  const std::string dir = g.out_dir.empty() ? cfg.output_dir : g.out_dir;
  if (dir.empty()) throw ConfigError("no output directory: pass --out or set output_dir");
  return dir;
}

const char* mode_name(WeightMode m) {
  switch (m) {
    case WeightMode::Full:
      return "full";
    case WeightMode::Superposition:
      return "superposition";
    case WeightMode::Truncation:
      return "truncation";
  }
  return "?";
}

std::string set_file_name(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "set_%04zu.qmcpts", r);
  return buf;
}

std::string fixed6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

}  // namespace

ExperimentConfig resolve_config(const GlobalOptions& g, bool config_required) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) {
    cfg = load_config(g.config_path);
  } else if (config_required) {
    throw ConfigError("this command needs --config");
  }
  if (g.seed) cfg.seed = *g.seed;
  if (g.workers) {
    if (*g.workers < 1) throw ConfigError("--workers must be >= 1");
    cfg.workers = *g.workers;
  }
  return cfg;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const GlobalOptions& g, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = resolve_config(g, true);
  if (!cfg.n) throw ConfigError("generate: config needs n");
  validate_transference(cfg);
  const std::string dir = output_dir(g, cfg);
  const TransferenceConfig tc = cfg.transference(*cfg.n, 0);
  const TransferenceResult res = run(tc);
  const TransferenceTrail& trail = res.trail;

  fs::create_directories(dir);
  save_qmcpts((fs::path(dir) / "population.qmcpts").string(), trail.population());

  ordered_json m;
  m["format"] = "qmcst-manifest v1";
  m["n"] = tc.n;
  m["d"] = tc.d;
  m["oversample_k"] = tc.oversample_k;
  m["h"] = trail.refinement_depth();
  m["splits"] = trail.splits();
  ordered_json w;
  w["mode"] = mode_name(tc.profile.mode());
  w["gammas"] = tc.profile.gammas();
  w["s"] = tc.profile.s_eff();
  m["weights"] = w;
  ordered_json seeds;
  std::visit(
      [&](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, IidInit>) {
          seeds["init"] = {{"kind", "iid"}, {"seed", init.seed}};
        } else if constexpr (std::is_same_v<T, SobolInit>) {
          const char* sk = init.scramble == ScrambleKind::None           ? "none"
                           : init.scramble == ScrambleKind::DigitalShift ? "shift"
                                                                         : "owen";
          seeds["init"] = {{"kind", "sobol"}, {"seed", init.seed}, {"scramble", sk}};
        } else {
          seeds["init"] = {{"kind", "external"}, {"path", cfg.init_path}};
        }
      },
      tc.init);
  seeds["walk"] = tc.walk.seed;
  seeds["shift"] = tc.shift_seed;
  m["seeds"] = seeds;
  m["walk"] = {{"mode", tc.walk.strict() ? "strict" : "greedy"},
               {"lambda", tc.walk.lambda(1)},
               {"shuffle_pairs", tc.walk.shuffle_pairs}};
  if (tc.walk.strict()) m["walk"]["delta"] = std::get<StrictLambda>(tc.walk.lambda_mode).delta;
  m["shift_target"] = tc.shift_target == ShiftTarget::Grid ? "grid" : "points";
  m["shift"] = std::vector<double>(trail.shift().begin(), trail.shift().end());
  m["frame_shift"] = std::vector<double>(trail.frame_shift().begin(), trail.frame_shift().end());
  m["population"] = "population.qmcpts";

  ordered_json sets = ordered_json::array();
  for (std::size_t r = 0; r < res.sets.size(); ++r) {
    const std::string name = set_file_name(r);
    save_qmcpts((fs::path(dir) / name).string(), res.sets[r]);
    sets.push_back({{"file", name}, {"leaf", leaf_of_output(r)}});
  }
  m["sets"] = sets;

  ordered_json nodes = ordered_json::array();
  for (int t = 0; t <= trail.splits(); ++t) {
    for (std::size_t i = 0; i < trail.node_count(t); ++i) {
      const TrailNode& node = trail.node(t, i);
      ordered_json jn;
      jn["t"] = t;
      jn["i"] = i;
      jn["members"] = node.members;
      if (t < trail.splits()) {
        std::vector<int> signs(node.coloring.signs.begin(), node.coloring.signs.end());
        jn["signs"] = signs;
        jn["digest"] = coloring_digest(node.coloring);
      }
      nodes.push_back(std::move(jn));
    }
  }
  m["nodes"] = nodes;
  write_file_atomic((fs::path(dir) / "manifest.json").string(), m.dump(1) + "\n");
  out << "wrote " << res.sets.size() << " sets of " << tc.n << " points to " << dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- stardisc

int cmd_stardisc(const GlobalOptions& g, const std::string& file, std::size_t samples,
                 std::ostream& out, std::ostream&) {
  const PointSet ps = load_qmcpts(file);
  DiscrepancyReport rep;
  if (ps.dimension() <= kMaxExactDimension) {
    rep = star_discrepancy_exact(ps);
  } else {
    rep = star_discrepancy_lower_bound(ps, samples, g.seed.value_or(0));
  }
  out << "stardisc " << format_double(rep.value) << "\n";
  if (rep.method == DiscrepancyMethod::Exact) {
    out << "method exact\n";
  } else {
    out << "method lower-bound (d=" << ps.dimension() << " > " << kMaxExactDimension
        << ": exact evaluation unsupported; " << samples << " random corners plus every point)\n";
  }
  out << "corner";
  for (double a : rep.argmax_corner) out << " " << format_double(a);
  out << "\nbranch " << (rep.closed_branch ? "closed" : "open") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- table1

std::vector<Table1Cell> compute_table1(const ExperimentConfig& cfg,
                                       const std::vector<std::string>& columns) {
  static const std::vector<std::string> kAll = {"sobol",       "iid",          "st_iid_n2",
                                                "st_iid_16n", "st_sobol_n2", "st_sobol_16n"};
  const std::vector<std::string>& cols = columns.empty() ? kAll : columns;
  if (cfg.d != 2) throw ConfigError("table1: d must be 2");
  const std::vector<std::uint64_t> ns =
      cfg.n_sweep.empty() ? std::vector<std::uint64_t>{8, 16, 32, 64, 128, 256} : cfg.n_sweep;
  const auto reps = static_cast<std::size_t>(cfg.repetitions);

  struct Task {
    std::size_t col;
    std::size_t n_index;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (std::find(kAll.begin(), kAll.end(), cols[c]) == kAll.end()) {
      throw ConfigError("table1: unknown column " + cols[c]);
    }
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      const std::size_t count = cols[c] == "sobol" ? 1 : reps;
      for (std::size_t r = 0; r < count; ++r) tasks.push_back({c, ni, r});
    }
  }

  auto column_config = [&](const std::string& col, std::uint64_t n, std::size_t rep) {
    ExperimentConfig cc = cfg;
    const auto id = static_cast<std::uint64_t>(
        std::find(kAll.begin(), kAll.end(), col) - kAll.begin());
    cc.seed = Rng::derive(cfg.seed, id + 1);
    cc.weight_mode = WeightMode::Full;
    cc.gammas.clear();
    cc.init_seed.reset();
    cc.walk_seed.reset();
    cc.shift_seed.reset();
    cc.init_kind = col.find("sobol") != std::string::npos ? InitKind::Sobol : InitKind::Iid;
    cc.init_scramble = ScrambleKind::None;
    cc.shift_target = cfg.shift_target.value_or(ShiftTarget::Points);
    cc.oversample_k = col.find("16n") != std::string::npos ? 16 : n;
    TransferenceConfig tc = cc.transference(n, rep);
    return std::make_pair(cc, tc);
  };

  for (const auto& col : cols) {
    if (col.rfind("st_", 0) != 0) continue;
    for (std::uint64_t n : ns) {
      try {
        column_config(col, n, 0).second.validate();
      } catch (const PreconditionError& e) {
        throw ConfigError("table1 " + col + " n=" + std::to_string(n) + ": " + e.what());
      }
    }
  }

  std::vector<std::vector<double>> results(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t ti) {
    const Task& task = tasks[ti];
    const std::string& col = cols[task.col];
    const std::uint64_t n = ns[task.n_index];
    std::vector<double>& vals = results[ti];
    if (col == "sobol") {
      vals.push_back(star_discrepancy_exact(sobol(n, 2, SobolSpec{})).value);
    } else if (col == "iid") {
      auto [cc, tc] = column_config(col, n, task.rep);
      vals.push_back(star_discrepancy_exact(iid_uniform(n, 2, cc.derived_seed(task.rep, 4))).value);
    } else {
      auto [cc, tc] = column_config(col, n, task.rep);
      const TransferenceResult res = run(tc);
      for (const auto& s : res.sets) vals.push_back(star_discrepancy_exact(s).value);
    }
  });

  std::vector<Table1Cell> cells;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t ni = 0; ni < ns.size(); ++ni) {
      Table1Cell cell;
      cell.column = cols[c];
      cell.n = ns[ni];
      cell.k = cols[c].rfind("st_", 0) == 0 ? (cols[c].find("16n") != std::string::npos ? 16 : ns[ni])
                                            : 0;
      double sum = 0.0;
      cell.min = 1.0;
      for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        if (tasks[ti].col != c || tasks[ti].n_index != ni) continue;
        for (double v : results[ti]) {
          sum += v;
          cell.min = std::min(cell.min, v);
          ++cell.sets;
        }
      }
      cell.mean = sum / static_cast<double>(cell.sets);
      cells.push_back(cell);
    }
  }
  return cells;
}

int cmd_table1(const GlobalOptions& g, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = resolve_config(g, false);
  const std::string dir = output_dir(g, cfg);
  const std::vector<Table1Cell> cells = compute_table1(cfg);

  std::ostringstream csv;
  csv << "column,n,k,mean,min,sets\n";
  for (const auto& c : cells) {
    csv << c.column << "," << c.n << "," << c.k << "," << format_double(c.mean) << ","
        << format_double(c.min) << "," << c.sets << "\n";
  }
  fs::create_directories(dir);
  write_file_atomic((fs::path(dir) / "table1.csv").string(), csv.str());

  std::map<std::pair<std::string, std::uint64_t>, const Table1Cell*> at;
  std::vector<std::uint64_t> ns;
  for (const auto& c : cells) {
    at[{c.column, c.n}] = &c;
    if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
  }
  const char* cols[] = {"sobol", "iid", "st_iid_n2", "st_iid_16n", "st_sobol_n2", "st_sobol_16n"};
  out << "n";
  for (const char* c : cols) out << "\t" << c;
  out << "\n";
  for (std::uint64_t n : ns) {
    out << n;
    for (const char* c : cols) out << "\t" << fixed6(at.at({c, n})->mean);
    out << "\n";
  }
  out << "wrote " << (fs::path(dir) / "table1.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- bench

std::vector<BenchRow> compute_bench(const ExperimentConfig& cfg) {
  if (cfg.integrand.empty()) throw ConfigError("bench: config needs integrand.name");
  if (cfg.n_sweep.empty()) throw ConfigError("bench: config needs n_sweep");
  validate_transference(cfg);
  NamedIntegrand integ;
  try {
    integ = make_integrand(cfg.integrand, cfg.d, cfg.asian);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("integrand: ") + e.what());
  }
  Integrand f = integ.f;
  if (cfg.integrand == "asian") {
    f = [inner = integ.f](std::span<const double> x) {
      std::vector<double> u(x.begin(), x.end());
      for (double& v : u) {
        if (v <= 0.0) v = kSmallestUniform;
      }
      return inner(u);
    };
  }
  const int d = cfg.d;
  auto row = [&](const char* method, std::uint64_t n, std::uint64_t id, const PointSet& ps) {
    BenchRow r;
    r.method = method;
    r.n = n;
    r.d = d;
    r.seed = id;
    r.error = integration_error(ps, f, integ.exact);
    if (d <= kMaxExactDimension) r.stardisc = star_discrepancy_exact(ps).value;
    return r;
  };

  enum class Method { Transference, Iid, Sobol, SobolOwen };
  struct Task {
    Method method;
    std::uint64_t n;
    std::size_t rep;
  };
  std::vector<Task> tasks;
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  for (std::uint64_t n : cfg.n_sweep) {
    for (std::size_t r = 0; r < reps; ++r) tasks.push_back({Method::Transference, n, r});
    if (cfg.baseline_iid) {
      for (std::size_t r = 0; r < reps; ++r) tasks.push_back({Method::Iid, n, r});
    }
    if (cfg.baseline_sobol) tasks.push_back({Method::Sobol, n, 0});
    if (cfg.baseline_sobol_scrambled) {
      for (std::size_t r = 0; r < reps; ++r) tasks.push_back({Method::SobolOwen, n, r});
    }
  }
  // Baselines draw as many sets per repetition as one transference run emits.
  const std::uint64_t per_rep = cfg.oversample_k;

  std::vector<std::vector<BenchRow>> results(tasks.size());
  parallel_for(tasks.size(), cfg.workers, [&](std::size_t ti) {
    const Task& t = tasks[ti];
    auto& rows = results[ti];
    switch (t.method) {
      case Method::Transference: {
        const TransferenceResult res = run(cfg.transference(t.n, t.rep));
        for (std::size_t r = 0; r < res.sets.size(); ++r) {
          rows.push_back(row("wsubgtrans", t.n, t.rep * res.sets.size() + r, res.sets[r]));
        }
        break;
      }
      case Method::Iid: {
        const std::uint64_t base = cfg.derived_seed(t.rep, 4);
        for (std::uint64_t r = 0; r < per_rep; ++r) {
          rows.push_back(row("iid", t.n, t.rep * per_rep + r, iid_uniform(t.n, d, Rng::derive(base, r))));
        }
        break;
      }
      case Method::Sobol:
        rows.push_back(row("sobol", t.n, 0, sobol(t.n, d, SobolSpec{})));
        break;
      case Method::SobolOwen: {
        const std::uint64_t base = cfg.derived_seed(t.rep, 5);
        for (std::uint64_t r = 0; r < per_rep; ++r) {
          const PointSet ps = sobol(t.n, d, SobolSpec{Scramble::owen(Rng::derive(base, r))});
          rows.push_back(row("sobol-owen", t.n, t.rep * per_rep + r, ps));
        }
        break;
      }
    }
  });
  std::vector<BenchRow> all;
  for (auto& rs : results) all.insert(all.end(), rs.begin(), rs.end());
  return all;
}

std::string bench_raw_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream csv;
  csv << "method,n,d,seed,error,abs_error,stardisc\n";
  for (const auto& r : rows) {
    csv << r.method << "," << r.n << "," << r.d << "," << r.seed << "," << format_double(r.error)
        << "," << format_double(std::abs(r.error)) << ","
        << (r.stardisc ? format_double(*r.stardisc) : "") << "\n";
  }
  return csv.str();
}

std::string bench_summary_csv(const std::vector<BenchRow>& rows) {
  std::vector<std::string> methods;
  std::map<std::string, std::map<std::uint64_t, std::vector<double>>> by;
  for (const auto& r : rows) {
    if (!by.count(r.method)) methods.push_back(r.method);
    by[r.method][r.n].push_back(r.error);
  }
  std::ostringstream csv;
  csv << "method,n,mae,iqr_lo,iqr_hi,alpha\n";
  for (const auto& m : methods) {
    const ErrorSummary s = summarize(by[m]);
    for (const auto& row : s.rows) {
      csv << m << "," << row.n << "," << format_double(row.mae) << "," << format_double(row.abs_q25)
          << "," << format_double(row.abs_q75) << "," << (s.alpha ? format_double(*s.alpha) : "")
          << "\n";
    }
  }
  return csv.str();
}

int cmd_bench(const GlobalOptions& g, std::ostream& out, std::ostream&) {
  const ExperimentConfig cfg = resolve_config(g, true);
  const std::string dir = output_dir(g, cfg);
  const fs::path raw = fs::path(dir) / "bench_raw.csv";
  const fs::path summary = fs::path(dir) / "bench_summary.csv";
  const std::vector<BenchRow> rows = compute_bench(cfg);
  fs::create_directories(dir);
  try {
    write_file_atomic(raw.string(), bench_raw_csv(rows));
    write_file_atomic(summary.string(), bench_summary_csv(rows));
  } catch (...) {
    std::error_code ec;
    fs::remove(raw, ec);
    fs::remove(summary, ec);
    throw;
  }
  out << "wrote " << raw.string() << " and " << summary.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- audit

namespace {

struct LoadedManifest {
  TransferenceTrail trail;
  std::size_t digest_mismatches = 0;
};

LoadedManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path);
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path + ": " + e.what());
  }
  try {
    if (m.at("format") != "qmcst-manifest v1") throw ConfigError("manifest: unknown format");
    const fs::path base = fs::path(path).parent_path();
    PointSet pop = load_qmcpts((base / m.at("population").get<std::string>()).string());
    const int splits = m.at("splits").get<int>();
    if (splits < 0 || splits > 32) throw ConfigError("manifest: bad splits");
    LoadedManifest lm{TransferenceTrail(std::move(pop), m.at("shift").get<std::vector<double>>(),
                                        m.at("h").get<int>(), splits,
                                        m.at("frame_shift").get<std::vector<double>>()),
                      0};
    for (const auto& jn : m.at("nodes")) {
      const int t = jn.at("t").get<int>();
      TrailNode& node = lm.trail.node(t, jn.at("i").get<std::size_t>());
      node.members = jn.at("members").get<std::vector<std::uint32_t>>();
      for (auto idx : node.members) {
        if (idx >= lm.trail.population().size()) throw ConfigError("manifest: member out of range");
      }
      if (t < splits) {
        const auto signs = jn.at("signs").get<std::vector<int>>();
        if (signs.size() != node.members.size()) throw ConfigError("manifest: signs/members mismatch");
        node.coloring.signs.clear();
        for (int s : signs) {
          if (s != 1 && s != -1) throw ConfigError("manifest: signs must be +1 or -1");
          node.coloring.signs.push_back(static_cast<std::int8_t>(s));
        }
        node.coloring.balanced = true;
        if (coloring_digest(node.coloring) != jn.at("digest").get<std::string>()) {
          ++lm.digest_mismatches;
        }
      }
    }
    return lm;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("manifest " + path + ": " + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError("manifest " + path + ": " + e.what());
  }
}

std::vector<Region> read_regions(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open regions file " + path);
  std::vector<Region> regions;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<double> vals;
    for (double v; ls >> v;) vals.push_back(v);
    if (!ls.eof()) throw ConfigError("regions: malformed line '" + line + "'");
    if (vals.empty()) continue;
    if (vals.size() != static_cast<std::size_t>(2 * d)) {
      throw ConfigError("regions: expected " + std::to_string(2 * d) + " numbers per line");
    }
    std::vector<double> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
      lo[j] = vals[2 * j];
      hi[j] = vals[2 * j + 1];
      if (!(0.0 <= lo[j] && lo[j] <= hi[j] && hi[j] <= 1.0)) {
        throw ConfigError("regions: need 0 <= lo <= hi <= 1");
      }
    }
    regions.push_back(Region::left_open(lo, hi));
  }
  return regions;
}

}  // namespace

std::vector<Region> random_dyadic_regions(int d, int max_level, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Region> regions;
  std::vector<double> lo(d), hi(d);
  for (std::size_t c = 0; c < count; ++c) {
    for (int j = 0; j < d; ++j) {
      const int l = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_level) + 1));
      const std::uint64_t k = rng.below(std::uint64_t{1} << l);
      lo[j] = std::ldexp(static_cast<double>(k), -l);
      hi[j] = std::ldexp(static_cast<double>(k + 1), -l);
    }
    regions.push_back(Region::left_open(lo, hi));
  }
  return regions;
}

int cmd_audit(const GlobalOptions& g, const std::string& manifest, const std::string& regions_path,
              std::size_t random_dyadic, std::ostream& out, std::ostream&) {
  if (regions_path.empty() && random_dyadic == 0) {
    throw ConfigError("audit: give a regions file or --random-dyadic N");
  }
  const LoadedManifest lm = load_manifest(manifest);
  const TransferenceTrail& trail = lm.trail;
  const int d = trail.population().dimension();
  std::vector<Region> regions;
  if (!regions_path.empty()) regions = read_regions(regions_path, d);
  const auto extra = random_dyadic_regions(d, std::min(trail.refinement_depth(), 30), random_dyadic,
                                           g.seed.value_or(0));
  regions.insert(regions.end(), extra.begin(), extra.end());

  double violation = 0.0;
  std::int64_t exact = 0;
  for (std::size_t leaf = 0; leaf < trail.leaf_count(); ++leaf) {
    violation = std::max(violation, transference_audit(trail, leaf, regions));
    exact = std::max(exact, transference_audit_exact(trail, leaf, regions));
  }
  constexpr double kTolerance = 1e-10;
  const bool pass = violation <= kTolerance && lm.digest_mismatches == 0;
  out << "regions " << regions.size() << "\n";
  out << "leaves " << trail.leaf_count() << "\n";
  out << "max_violation " << format_double(violation);
  if (regions.empty()) out << " (vacuous: no regions)";
  out << "\n";
  out << "max_residual_times_n0 " << exact << "\n";
  out << "digest_mismatches " << lm.digest_mismatches << "\n";
  out << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kExitOk : kExitFailure;
}

}  // namespace qmcst::app
