#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "anncap/anncap.hpp"

namespace {

using namespace anncap;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpaceArgs {
  std::string space = "rn";
  int n = 2;
  double eta = 0.5;
  double alpha = 0.5;
  std::string kind = "min-one-over-x";
  int k_max = 10;
};

struct Common {
  int jobs = default_jobs();
  std::string format;
  std::string output;
  std::string config;
};

std::string squash(std::string s) {
  std::string out;
  for (char c : s) {
    if (c != '-' && c != '_') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

BoundId parse_bound(const std::string& s) {
  for (BoundId id : kAllBounds) {
    if (squash(s) == squash(to_string(id))) return id;
  }
  throw UsageError("unknown bound `" + s + "`");
}

HalfLineKind parse_kind(const std::string& s) {
  const std::string k = squash(s);
  if (k == "minoneoverx") return HalfLineKind::MinOneOverX;
  if (k == "expdecay") return HalfLineKind::ExpDecay;
  if (k == "expinvoverxsq") return HalfLineKind::ExpInvOverXSq;
  throw UsageError("unknown half-line kind `" + s + "`");
}

GalleryEntry resolve_space(const SpaceArgs& a) {
  if (a.space == "rn") return make_rn(a.n);
  if (a.space == "buckley") return make_buckley(a.eta, a.n);
  if (a.space == "summed-buckley") return make_summed_buckley(a.eta, {}, a.n);
  if (a.space == "bowtie") return make_bowtie(a.alpha, a.n);
  if (a.space == "snake") return make_snake(a.k_max);
  if (a.space == "halfline") return make_halfline(parse_kind(a.kind));
  for (auto& g : full_gallery()) {
    if (g.key == a.space) return g;
  }
  throw UsageError("unknown space `" + a.space + "` (rn, buckley, summed-buckley, bowtie, snake, halfline, or a gallery key)");
}

void add_space_options(CLI::App* sub, SpaceArgs& a) {
  sub->add_option("--space", a.space, "rn | buckley | summed-buckley | bowtie | snake | halfline | gallery key");
  sub->add_option("--n", a.n, "Euclidean dimension");
  sub->add_option("--eta", a.eta, "Buckley exponent");
  sub->add_option("--alpha", a.alpha, "bow-tie weight exponent");
  sub->add_option("--kind", a.kind, "half-line weight: min-one-over-x | exp-decay | exp-inv-over-x-sq");
  sub->add_option("--kmax", a.k_max, "snake depth");
}

std::pair<double, double> parse_range(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("range must be lo:hi");
  try {
    const double lo = std::stod(s.substr(0, colon));
    const double hi = std::stod(s.substr(colon + 1));
    if (!(lo > 0.0 && hi > lo)) throw UsageError("range needs 0 < lo < hi");
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("range must be lo:hi with numeric ends");
  }
}

// Output goes to --output when given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw UsageError("cannot open output file " + path);
    }
  }
  std::ostream& out() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

void emit_json(const Common& c, const Json& j) {
  Sink s(c.output);
  s.out() << j.dump(2) << '\n';
}

std::string want_format(const Common& c, const std::string& fallback, std::initializer_list<const char*> allowed) {
  const std::string f = c.format.empty() ? fallback : c.format;
  for (const char* a : allowed) {
    if (f == a) return f;
  }
  throw UsageError("format `" + f + "` not supported by this command");
}

// --config: a JSON object whose keys are flag names. Keys are expanded into
// flags placed right after the subcommand, so explicit flags still win and
// unknown keys are rejected by the parser itself.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");

  std::vector<std::string> extra;
  std::optional<std::string> command;
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    const std::string& key = it.key();
    const Json& v = it.value();
    if (key == "command") {
      if (!v.is_string()) throw UsageError("config: command must be a string");
      command = v.get<std::string>();
      continue;
    }
    if (key == "config") throw UsageError("config: nested config is not allowed");
    if (v.is_boolean()) {
      if (v.get<bool>()) extra.push_back("--" + key);
    } else if (v.is_number()) {
      extra.push_back("--" + key);
      extra.push_back(format_number(v.get<double>()));
    } else if (v.is_string()) {
      extra.push_back("--" + key);
      extra.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        extra.push_back("--" + key);
        extra.push_back(e.is_string() ? e.get<std::string>() : format_number(e.get<double>()));
      }
    } else {
      throw UsageError("config: unsupported value for `" + key + "`");
    }
  }

  static const std::vector<std::string> commands{"cap", "sweep", "ad", "oracle", "gallery", "verify-all"};
  auto pos = std::find_if(args.begin() + 1, args.end(),
                          [](const std::string& a) { return std::find(commands.begin(), commands.end(), a) != commands.end(); });
  if (pos == args.end()) {
    if (!command) throw UsageError("no subcommand on the command line or in the config");
    args.insert(args.begin() + 1, *command);
    pos = args.begin() + 1;
  } else if (command && *command != *pos) {
    throw UsageError("config command `" + *command + "` disagrees with `" + *pos + "`");
  }
  // gallery has its own nested subcommand; flags belong after it
  if (*pos == "gallery" && pos + 1 != args.end() && (pos[1] == "list" || pos[1] == "verify")) ++pos;
  args.insert(pos + 1, extra.begin(), extra.end());
  return args;
}

// ---------------------------------------------------------------------------

int cmd_cap(const Common& c, const SpaceArgs& sa, double p, double r, double R) {
  const GalleryEntry g = resolve_space(sa);
  const CapacityResult res = compute_capacity(g.space, p, AnnulusSpec(r, R));
  const std::string f = want_format(c, "text", {"text", "json", "csv"});
  Sink s(c.output);
  if (f == "json") {
    Json j{{"space", g.key}, {"p", json_number(p)}, {"r", json_number(r)}, {"R", json_number(R)}};
    j["capacity"] = to_json(res);
    s.out() << j.dump(2) << '\n';
  } else if (f == "csv") {
    s.out() << "r,R,p,cap\n"
            << format_number(r) << ',' << format_number(R) << ',' << format_number(p) << ','
            << format_number(res.value) << '\n';
  } else {
    s.out() << format_number(res.value) << '\n';
  }
  return kExitPass;
}

struct SweepArgs {
  double p = 2.0;
  double R = 1.0;
  int j_lo = 2;
  int j_hi = 12;
  std::string family = "thin";
  double straddle_c = 16.0;
  std::string bound = "UpperSimple";
  std::optional<double> eta;
  std::optional<double> q;
  std::string gating = "diagnose";
};

int cmd_sweep(const Common& c, const SpaceArgs& sa, const SweepArgs& a) {
  const GalleryEntry g = resolve_space(sa);
  AnnulusFamily fam;
  if (a.family == "thin") {
    fam = thin_family(a.R, a.j_lo, a.j_hi);
  } else if (a.family == "straddle") {
    fam = straddle_family(a.straddle_c, a.j_lo, a.j_hi);
  } else {
    throw UsageError("family must be thin or straddle");
  }
  Gating gating;
  if (a.gating == "diagnose") {
    gating = Gating::Diagnose;
  } else if (a.gating == "enforce") {
    gating = Gating::Enforce;
  } else {
    throw UsageError("gating must be enforce or diagnose");
  }
  BoundSpec spec{parse_bound(a.bound), a.p};
  spec.eta = a.eta;
  spec.q = a.q;
  const SweepReport rep = verify_envelope(g.space, spec, fam, {}, gating, c.jobs);
  const std::string f = want_format(c, "csv", {"csv", "json"});
  Sink s(c.output);
  if (f == "json") {
    Json j = to_json(rep);
    Json rows = Json::array();
    for (const auto& row : rep.rows) {
      rows.push_back(Json{{"r", json_exact(row.r)},
                          {"R", json_exact(row.R)},
                          {"cap", json_exact(row.cap)},
                          {"bound", json_exact(row.bound)},
                          {"ratio", json_exact(row.ratio)}});
    }
    j["space"] = g.key;
    j["rows"] = rows;
    s.out() << j.dump(2) << '\n';
  } else {
    write_sweep_csv(rep, s.out());
  }
  std::cerr << "quantity_slope " << format_number(rep.quantity_slope) << "  ratio_slope " << format_number(rep.slope)
            << " vs " << rep.trend_variable << "  ratio in [" << format_number(rep.min_ratio) << ", "
            << format_number(rep.max_ratio) << "]  " << rep.verdict();
  for (const auto& h : rep.failed_hypotheses) std::cerr << "  (hypothesis not satisfied: " << h << ")";
  std::cerr << '\n';
  return rep.pass ? kExitPass : kExitFail;
}

int cmd_ad(const Common& c, const SpaceArgs& sa, const std::string& range, int grid, bool doubling) {
  const GalleryEntry g = resolve_space(sa);
  want_format(c, "json", {"json"});
  Json j{{"space", g.key}};
  if (g.space.traits().point_mass_at_center) {
    j["ad_fit"] = nullptr;
  } else {
    j["ad_fit"] = to_json(estimate_ad_exponent(g.space, g.probes.ad_family, MeasureOptions::relative(), c.jobs));
  }
  double lo = g.probes.one_ad_lo, hi = g.probes.one_ad_hi;
  if (!range.empty()) std::tie(lo, hi) = parse_range(range);
  j["one_ad"] = to_json(check_one_ad(g.space, lo, hi, grid, {}, MeasureOptions::relative(), c.jobs));
  if (doubling) {
    j["doubling"] = to_json(check_doubling(g.space, g.probes.doubling_radii, 2.0, MeasureOptions::relative(), c.jobs));
    if (const auto& rd = g.space.traits().reverse_doubling) {
      j["reverse_doubling"] =
          to_json(check_reverse_doubling(g.space, rd->tau, g.probes.doubling_radii, MeasureOptions::relative(), c.jobs));
    }
  }
  emit_json(c, j);
  return kExitPass;
}

struct OracleArgs {
  double p = 2.0;
  double r = 1.0;
  double R = 2.0;
  int cells = 2000;
  double cells_per_unit = 64.0;
  double h = 1.0 / 64.0;
  double tolerance = 0.01;
  std::string network;
};

int cmd_oracle(const Common& c, const SpaceArgs& sa, const OracleArgs& a) {
  const std::string f = want_format(c, "text", {"text", "json"});
  if (!a.network.empty()) {
    std::ifstream in(a.network);
    if (!in) throw UsageError("cannot read network " + a.network);
    const DiscreteNetwork net = read_network_csv(in);
    const OracleRun run = run_oracle(net, boundary_by_radius(net, a.r, a.R), a.p);
    Sink s(c.output);
    if (f == "json") {
      s.out() << Json{{"network", a.network}, {"discrete", to_json(run)}}.dump(2) << '\n';
    } else {
      s.out() << "network " << format_number(run.capacity) << '\n';
    }
    return kExitPass;
  }
  const GalleryEntry g = resolve_space(sa);
  const AnnulusSpec ann(a.r, a.R);
  OracleRun run;
  if (g.space.is_snake()) {
    run = snake_oracle(a.p, ann, a.cells_per_unit, sa.k_max);
  } else if (const auto* bt = std::get_if<BowTie>(&g.space.geometry())) {
    if (bt->n != 2) throw UsageError("the bow-tie grid oracle is planar (n = 2)");
    // no closed form here: report the grid value alone
    run = bowtie_oracle(bt->alpha, a.p, ann, a.h);
    Sink s(c.output);
    if (f == "json") {
      Json j{{"space", g.key}, {"p", json_number(a.p)}, {"r", json_number(a.r)}, {"R", json_number(a.R)},
             {"mesh", json_number(a.h)}};
      j["discrete"] = to_json(run);
      s.out() << j.dump(2) << '\n';
    } else {
      s.out() << "network " << format_number(run.capacity) << '\n';
    }
    return kExitPass;
  } else {
    run = radial_oracle(g.space, a.p, ann, a.cells);
  }
  const OracleComparison cmp = compare_with_formula(compute_capacity(g.space, a.p, ann).value, run);
  Sink s(c.output);
  if (f == "json") {
    Json j{{"space", g.key}, {"p", json_number(a.p)}, {"r", json_number(a.r)}, {"R", json_number(a.R)}};
    j["comparison"] = to_json(cmp);
    j["tolerance"] = json_number(a.tolerance);
    j["verdict"] = cmp.rel_error <= a.tolerance ? "PASS" : "FAIL";
    s.out() << j.dump(2) << '\n';
  } else {
    s.out() << "formula " << format_number(cmp.formula) << "\nnetwork " << format_number(run.capacity)
            << "\nrel_error " << format_number(cmp.rel_error) << '\n';
  }
  std::cerr << run.vertices << " vertices, " << run.edges << " edges, " << run.iterations << " iterations, "
            << run.seconds << " s\n";
  return cmp.rel_error <= a.tolerance ? kExitPass : kExitFail;
}

int cmd_gallery_list(const Common& c) {
  want_format(c, "json", {"json"});
  emit_json(c, gallery_manifest(full_gallery()));
  return kExitPass;
}

int cmd_gallery_verify(const Common& c, const std::vector<std::string>& keys, double budget) {
  const std::string f = want_format(c, "text", {"text", "json"});
  std::vector<ClaimVerdict> all;
  bool matched = keys.empty();
  for (const auto& g : full_gallery()) {
    if (!keys.empty() && std::find(keys.begin(), keys.end(), g.key) == keys.end()) continue;
    matched = true;
    auto v = verify_expectations(g, budget, c.jobs);
    all.insert(all.end(), v.begin(), v.end());
  }
  if (!matched) throw UsageError("no gallery entry matches the requested keys");
  Sink s(c.output);
  if (f == "json") {
    Json arr = Json::array();
    for (const auto& v : all) arr.push_back(to_json(v));
    s.out() << Json{{"claims", arr}}.dump(2) << '\n';
  } else {
    for (const auto& v : all) s.out() << to_string(v.status) << ' ' << v.claim << "  " << v.evidence << '\n';
  }
  const bool fail = std::any_of(all.begin(), all.end(), [](const ClaimVerdict& v) { return v.status == ClaimStatus::Fail; });
  return fail ? kExitFail : kExitPass;
}

int cmd_verify_all(const Common& c, const std::vector<int>& only, bool quiet) {
  const std::string f = want_format(c, "text", {"text", "json"});
  for (int id : only) {
    if (id < 1 || id > static_cast<int>(acceptance_criteria().size())) throw UsageError("no criterion " + std::to_string(id));
  }
  const auto results = run_acceptance(c.jobs, only);
  Sink s(c.output);
  if (f == "json") {
    Json arr = Json::array();
    for (const auto& r : results) {
      arr.push_back(Json{{"id", r.id}, {"title", r.title}, {"verdict", r.pass ? "PASS" : "FAIL"}, {"info", r.info}});
    }
    s.out() << Json{{"criteria", arr}}.dump(2) << '\n';
  } else {
    for (const auto& r : results) {
      s.out() << (r.pass ? "PASS " : "FAIL ") << r.id << ' ' << r.title << '\n';
      if (!quiet) {
        for (const auto& line : r.info) s.out() << "  INFO " << line << '\n';
      }
    }
  }
  const bool fail = std::any_of(results.begin(), results.end(), [](const CriterionResult& r) { return !r.pass; });
  return fail ? kExitFail : kExitPass;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  args = expand_config(std::move(args));

  CLI::App app{"Annular p-capacity toolkit", "anncap"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough();
  app.require_subcommand(1);

  Common common;
  app.add_option("--jobs", common.jobs, "worker threads (default ANNCAP_JOBS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--format", common.format, "text | csv | json");
  app.add_option("-o,--output", common.output, "write the result here instead of stdout");
  app.add_option("--config", common.config, "JSON file of flag values");

  SpaceArgs sa;

  auto* cap = app.add_subcommand("cap", "capacity of one annulus");
  add_space_options(cap, sa);
  double cap_p = 2.0, cap_r = 1.0, cap_R = 2.0;
  cap->add_option("--p", cap_p, "exponent p >= 1")->required();
  cap->add_option("--r", cap_r, "inner radius")->required();
  cap->add_option("--R", cap_R, "outer radius")->required();

  auto* sweep = app.add_subcommand("sweep", "capacity vs bound over a thin-annulus family");
  add_space_options(sweep, sa);
  SweepArgs sw;
  sweep->add_option("--p", sw.p);
  sweep->add_option("--R", sw.R, "outer radius of the thin family");
  sweep->add_option("--thin", sw.j_hi, "largest j; annuli r = R(1-2^-j)");
  sweep->add_option("--jmin", sw.j_lo, "smallest j");
  sweep->add_option("--family", sw.family, "thin | straddle");
  sweep->add_option("--straddle-center", sw.straddle_c, "center radius of straddle annuli");
  sweep->add_option("--bound", sw.bound, "bound id, e.g. UpperSimple, TwoSidedNice, upper-eta");
  sweep->add_option("--bound-eta", sw.eta, "eta used by eta-dependent bounds");
  sweep->add_option("--q", sw.q, "PI exponent for q-dependent bounds");
  sweep->add_option("--gating", sw.gating, "enforce | diagnose");

  auto* ad = app.add_subcommand("ad", "annular-decay fit and 1-AD characterization");
  add_space_options(ad, sa);
  std::string ad_range;
  int ad_grid = 256;
  bool ad_doubling = false;
  ad->add_option("--range", ad_range, "lo:hi radii for the 1-AD check");
  ad->add_option("--grid", ad_grid, "grid size for the 1-AD check")->check(CLI::Range(16, 1 << 20));
  ad->add_flag("--doubling", ad_doubling, "also report doubling and reverse doubling");

  auto* oracle = app.add_subcommand("oracle", "closed form vs discrete network");
  add_space_options(oracle, sa);
  OracleArgs oa;
  oracle->add_option("--p", oa.p);
  oracle->add_option("--r", oa.r);
  oracle->add_option("--R", oa.R);
  oracle->add_option("--cells", oa.cells, "radial network cells")->check(CLI::Range(2, 50'000'000));
  oracle->add_option("--cells-per-unit", oa.cells_per_unit, "snake network density");
  oracle->add_option("--mesh", oa.h, "bow-tie grid spacing");
  oracle->add_option("--tolerance", oa.tolerance, "relative error for PASS");
  oracle->add_option("--network", oa.network, "solve a network CSV instead");

  auto* gallery = app.add_subcommand("gallery", "gallery manifest and claim verification");
  gallery->require_subcommand(1);
  auto* glist = gallery->add_subcommand("list", "print the gallery manifest");
  auto* gverify = gallery->add_subcommand("verify", "check the expected behavior of gallery spaces");
  std::vector<std::string> gkeys;
  double budget = 300.0;
  gverify->add_option("--key", gkeys, "restrict to these keys")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  gverify->add_option("--budget", budget, "seconds before remaining claims are skipped");

  auto* verify = app.add_subcommand("verify-all", "run the acceptance criteria");
  std::vector<int> only;
  bool quiet = false;
  verify->add_option("--only", only, "criterion ids")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  verify->add_flag("--quiet", quiet, "omit INFO lines");

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
  try {
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*cap) return cmd_cap(common, sa, cap_p, cap_r, cap_R);
  if (*sweep) return cmd_sweep(common, sa, sw);
  if (*ad) return cmd_ad(common, sa, ad_range, ad_grid, ad_doubling);
  if (*oracle) return cmd_oracle(common, sa, oa);
  if (*glist) return cmd_gallery_list(common);
  if (*gverify) return cmd_gallery_verify(common, gkeys, budget);
  if (*verify) return cmd_verify_all(common, only, quiet);
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const anncap::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const anncap::InputError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const anncap::ApplicabilityError& e) {
    std::cerr << "FAIL: " << e.what() << '\n';
    return kExitFail;
  } catch (const anncap::Error& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}
