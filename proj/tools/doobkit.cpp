// doobkit command-line front end.
//
// Exit codes: 0 success, 1 domain failure, 2 infeasible / no EMM, 3 I/O, schema or usage error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "doobkit/audit.hpp"
#include "doobkit/conditional.hpp"
#include "doobkit/error.hpp"
#include "doobkit/pricing.hpp"
#include "doobkit/regularity.hpp"
#include "doobkit/report.hpp"
#include "doobkit/scenario.hpp"

namespace {

using namespace doobkit;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kInfeasible = 2;
constexpr int kInput = 3;

struct Options {
  std::vector<std::string> files;
  double tol = kDefaultTol;
  std::string mode = "a0";
  std::string generators;
  std::string claim;
  std::string process;
  std::uint64_t seed = 7;
  std::size_t budget = 0;
  std::string out;
  bool csv = false;
  bool expect_pass = false;
  bool expect_counterexample = false;
  std::string claim_id;
  std::string strategy = "lp";
  std::string xi0;
  std::string objective;
  unsigned jobs = 1;
  bool stamp = false;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
    case ErrorCode::Schema:
    case ErrorCode::NonRefining:
    case ErrorCode::BadCover:
    case ErrorCode::TrivialRootMissing:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::BadMeasure:
    case ErrorCode::DuplicateExtreme:
    case ErrorCode::LengthMismatch:
    case ErrorCode::UnknownClaim:
    case ErrorCode::BadBudget:
      return kInput;
    case ErrorCode::Infeasible:
      return kInfeasible;
    default:
      return kDomain;
  }
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void emit(const Options& opt, Json doc) {
  if (opt.stamp) {
    if (doc.is_array())
      for (Json& e : doc) e["generated_at"] = utc_now();
    else
      doc["generated_at"] = utc_now();
  }
  const std::string text = doc.dump(2) + "\n";
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out);
  if (!f) throw Error(ErrorCode::Io, "cannot write " + opt.out);
  f << text;
}

const std::string& single_file(const Options& opt) {
  if (opt.files.size() != 1) throw Error(ErrorCode::Schema, "this verb takes exactly one scenario file");
  return opt.files.front();
}

std::string or_default(const std::string& v, const char* fallback) { return v.empty() ? fallback : v; }

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// ---------------------------------------------------------------------------

Json summary(const std::string& file, const Scenario& sc) {
  Json out;
  out["file"] = file;
  out["valid"] = true;
  out["atoms"] = sc.space.n_atoms();
  out["horizon"] = sc.space.horizon();
  out["measures"] = sc.measure_names;
  Json ps = Json::array();
  for (const auto& p : sc.processes) ps.push_back(p.first);
  out["processes"] = std::move(ps);
  Json cs = Json::array();
  for (const auto& c : sc.claims) cs.push_back(c.first);
  out["claims"] = std::move(cs);
  return out;
}

int cmd_validate(const Options& opt) {
  if (opt.files.empty()) throw Error(ErrorCode::Schema, "validate needs at least one scenario file");
  struct Outcome {
    std::optional<Json> doc;
    std::string error;
    int code = kOk;
  };
  const auto check = [](const std::string& file) {
    Outcome o;
    try {
      o.doc = summary(file, load_scenario(file));
    } catch (const Error& e) {
      o.error = file + ": " + e.what();
      o.code = exit_code_for(e.code());
    }
    return o;
  };

  std::vector<Outcome> outcomes(opt.files.size());
  const std::size_t jobs = std::max(1u, opt.jobs);
  for (std::size_t start = 0; start < opt.files.size(); start += jobs) {
    std::vector<std::future<Outcome>> batch;
    for (std::size_t i = start; i < std::min(opt.files.size(), start + jobs); ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, check, opt.files[i]));
    for (std::size_t i = 0; i < batch.size(); ++i) outcomes[start + i] = batch[i].get();
  }

  int code = kOk;
  Json docs = Json::array();
  for (const Outcome& o : outcomes) {
    if (o.doc) docs.push_back(*o.doc);
    if (!o.error.empty()) std::cerr << "doobkit: " << o.error << "\n";
    code = std::max(code, o.code);
  }
  if (!docs.empty()) emit(opt, docs.size() == 1 && opt.files.size() == 1 ? docs.front() : docs);
  return code;
}

int cmd_classify(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  const Classification c =
      classify(sc.space, sc.require_process(or_default(opt.process, "f")), sc.require_family(), opt.tol);
  emit(opt, report::classification(c));
  return c.kind == ProcessKind::not_supermartingale ? kDomain : kOk;
}

Strategy parse_strategy(const std::string& s) {
  if (s == "lp") return Strategy::lp;
  if (s == "alpha" || s == "alpha-with-xi0") return Strategy::alpha_with_xi0;
  if (s == "auto") return Strategy::automatic;
  throw Error(ErrorCode::Schema, "unknown strategy \"" + s + "\"");
}

int cmd_decompose(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  const MeasureFamily& family = sc.require_family();
  const AdaptedProcess& f = sc.require_process(or_default(opt.process, "f"));
  const Strategy strategy = parse_strategy(opt.strategy);
  std::optional<A0Element> xi0;
  if (!opt.xi0.empty()) xi0.emplace(sc.require_claim(opt.xi0).atoms, family, opt.tol);
  try {
    const OptionalDecomposition d = optional_decompose(sc.space, f, family, strategy, xi0, opt.tol);
    const VerificationReport v = verify_decomposition(sc.space, f, d, family, opt.tol, opt.seed);
    emit(opt, report::decomposition(&d, &v));
    for (const auto& msg : v.failures) std::cerr << "doobkit: " << msg << "\n";
    return v.ok ? kOk : kDomain;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotSupermartingale && e.code() != ErrorCode::NotLocallyRegular &&
        e.code() != ErrorCode::PreconditionFailed)
      throw;
    emit(opt, report::decomposition(nullptr, nullptr, e.what()));
    std::cerr << "doobkit: " << e.what() << "\n";
    return kDomain;
  }
}

std::vector<RandomVariable> resolve_generators(const Scenario& sc, const std::string& list) {
  std::vector<RandomVariable> out;
  for (const std::string& name : split_list(list)) {
    if (name == "1") {
      out.push_back(RandomVariable::constant(sc.space.n_atoms(), 1.0));
    } else if (const auto* p = sc.process(name)) {
      for (RandomVariable& g : asset_generators(sc.space, *p)) out.push_back(std::move(g));
    } else if (const auto* c = sc.claim(name)) {
      out.push_back(c->atoms);
    } else {
      throw Error(ErrorCode::Schema, "generator \"" + name + "\" is neither a process nor a claim");
    }
  }
  if (out.empty()) throw Error(ErrorCode::Schema, "generators mode needs --generators");
  return out;
}

int cmd_price(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  const MeasureFamily& family = sc.require_family();
  if (opt.claim.empty()) throw Error(ErrorCode::Schema, "price needs --claim");
  const RandomVariable& claim = sc.require_claim(opt.claim).atoms;
  PricingResult r;
  if (opt.mode == "a0") {
    r = fair_price_a0(sc.space, claim, family, opt.tol);
  } else if (opt.mode == "generators") {
    const auto gens = resolve_generators(sc, opt.generators);
    r = fair_price_generators(sc.space, claim, gens, family, opt.tol);
  } else {
    throw Error(ErrorCode::Schema, "unknown mode \"" + opt.mode + "\"");
  }
  emit(opt, report::pricing(r));
  return kOk;
}

int cmd_hedge(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  if (opt.claim.empty()) throw Error(ErrorCode::Schema, "hedge needs --claim");
  const AdaptedProcess& s = sc.require_process(or_default(opt.process, "S"));
  const MarketModel market(s);
  const TradingStrategy st =
      superhedge_strategy(sc.space, sc.require_claim(opt.claim).atoms, market, sc.require_family(), opt.tol);
  if (opt.csv) {
    const std::string csv = report::capital_csv(sc.space, st, s);
    if (opt.out.empty()) {
      std::cout << csv;
      return kOk;
    }
    std::filesystem::path path(opt.out);
    path.replace_extension(".csv");
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
    f << csv;
  }
  emit(opt, report::pricing(st.pricing, &st));
  return kOk;
}

int cmd_emm(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  const MarketModel market(sc.require_process(or_default(opt.process, "S")));
  const EmmResult r = find_emm(sc.space, market);
  std::optional<EmmReport> check;
  if (r.measure) check = verify_emm(sc.space, *r.measure, market, opt.tol);
  emit(opt, report::emm(r, check));
  return r.measure ? kOk : kInfeasible;
}

int cmd_a0(const Options& opt) {
  const Scenario sc = load_scenario(single_file(opt));
  const MeasureFamily& family = sc.require_family();
  Json out;
  if (!opt.claim.empty()) {
    const RandomVariable& xi = sc.require_claim(opt.claim).atoms;
    const bool member = a0_membership(xi, family, std::min(opt.tol, kStrictTol));
    out["xi"] = xi.values;
    out["member"] = member;
    emit(opt, out);
    return member ? kOk : kDomain;
  }
  std::optional<RandomVariable> objective;
  if (!opt.objective.empty()) objective = sc.require_claim(opt.objective).atoms;
  const A0Element e = find_a0_element(family, objective);
  out["xi"] = e.xi().values;
  out["member"] = true;
  emit(opt, out);
  return kOk;
}

int cmd_audit(const Options& opt) {
  std::vector<ClaimId> claims;
  if (opt.claim_id.empty())
    claims.assign(std::begin(kAllClaims), std::end(kAllClaims));
  else
    for (const std::string& id : split_list(opt.claim_id)) claims.push_back(parse_claim(id));

  std::vector<AuditResult> results;
  if (!opt.files.empty()) {
    const Scenario sc = load_scenario(single_file(opt));
    const AuditInstance in =
        instance_from_scenario(sc, or_default(opt.claim, "xi"),
                               opt.process.empty() ? std::nullopt : std::optional<std::string>(opt.process));
    for (ClaimId id : claims) {
      try {
        results.push_back(audit(id, in, opt.tol));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ClaimPreconditionUnmet) throw;
        std::cerr << "doobkit: " << to_string(id) << " skipped: " << e.what() << "\n";
      }
    }
  }
  if (opt.budget > 0)
    for (ClaimId id : claims) results.push_back(search_counterexample(id, opt.budget, opt.seed, {}, opt.tol));
  if (opt.files.empty() && opt.budget == 0)
    throw Error(ErrorCode::Schema, "audit needs a scenario file or --budget");

  emit(opt, report::audit(results));
  bool any_counter = false;
  bool any_pass = false;
  for (const AuditResult& r : results) (r.verdict == Verdict::counterexample ? any_counter : any_pass) = true;
  if (opt.expect_pass && any_counter) return kDomain;
  if (opt.expect_counterexample && (any_pass || results.empty())) return kDomain;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  if (const char* env = std::getenv("DOOBKIT_TOL")) {
    try {
      opt.tol = std::stod(env);
    } catch (const std::exception&) {
      std::cerr << "doobkit: DOOBKIT_TOL is not a number\n";
      return kInput;
    }
  }

  CLI::App app{"Supermartingales, optional decomposition and superhedging on finite scenario trees"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--tol", opt.tol, "Equality tolerance (default 1e-9, or DOOBKIT_TOL)");
  app.add_option("--mode", opt.mode, "Pricing mode: a0 | generators")->check(CLI::IsMember({"a0", "generators"}));
  app.add_option("--generators", opt.generators, "Generator names: process (expands to S_i/S_0), claim, or 1");
  app.add_option("--claim", opt.claim, "Claim name");
  app.add_option("--process", opt.process, "Process name");
  app.add_option("--seed", opt.seed, "Seed for sampled checks and search");
  app.add_option("--budget", opt.budget, "Counterexample search budget (audit)");
  app.add_option("--out", opt.out, "Write the report here instead of stdout");
  app.add_flag("--csv", opt.csv, "Also write the capital path as CSV (hedge)");
  app.add_flag("--expect-pass", opt.expect_pass, "Exit 1 if any audited claim has a counterexample");
  app.add_flag("--expect-counterexample", opt.expect_counterexample, "Exit 1 if any audited claim passes");
  app.add_option("--claim-id", opt.claim_id, "Audited claim id(s), comma separated");
  app.add_option("--strategy", opt.strategy, "Decomposition strategy: lp | alpha | auto");
  app.add_option("--xi0", opt.xi0, "Claim used as xi_0 on the alpha path");
  app.add_option("--objective", opt.objective, "Claim used as LP objective (a0)");
  app.add_option("--jobs", opt.jobs, "Parallel workers across input files (validate)");
  app.add_flag("--stamp", opt.stamp, "Add a generated_at timestamp to reports");

  const struct {
    const char* name;
    const char* help;
    int (*run)(const Options&);
  } verbs[] = {
      {"validate", "Check scenario files", cmd_validate},
      {"classify", "Classify a process relative to the family", cmd_classify},
      {"decompose", "Optional decomposition f = M - g and its verification", cmd_decompose},
      {"price", "Fair price of a claim", cmd_price},
      {"hedge", "Self-financing superhedge", cmd_hedge},
      {"emm", "Search for an equivalent martingale measure", cmd_emm},
      {"a0", "Find or test an element of A_0", cmd_a0},
      {"audit", "Audit claims on an instance, or search for counterexamples", cmd_audit},
  };
  std::vector<CLI::App*> subs;
  for (const auto& v : verbs) {
    CLI::App* sub = app.add_subcommand(v.name, v.help);
    sub->add_option("files", opt.files, "Scenario file(s)");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }
  if (opt.expect_pass && opt.expect_counterexample) {
    std::cerr << "doobkit: --expect-pass and --expect-counterexample are exclusive\n";
    return kInput;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return verbs[i].run(opt);
  } catch (const Error& e) {
    std::cerr << "doobkit: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "doobkit: " << e.what() << "\n";
    return kInput;
  }
  return kInput;
}
