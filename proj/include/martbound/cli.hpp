#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "martbound/constructions.hpp"
#include "martbound/exact_constants.hpp"
#include "martbound/moment_bounds.hpp"
#include "martbound/scan.hpp"
#include "martbound/simulator.hpp"
#include "martbound/spaces.hpp"
#include "martbound/tail_bounds.hpp"

#define MARTBOUND_VERSION "0.1.0"

namespace martbound::cli {

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("MARTBOUND_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    throw std::invalid_argument("MARTBOUND_SEED is not an integer");
  }
  return 1;
}

inline std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--params entries must look like key=value");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric value in --params: " + item);
    }
  }
  if (out.empty()) throw std::invalid_argument("--params is empty");
  return out;
}

inline double param(const std::map<std::string, double>& prm,
                    const std::string& key) {
  const auto it = prm.find(key);
  if (it == prm.end())
    throw std::invalid_argument("missing required parameter '" + key + "'");
  return it->second;
}

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric grid entry: " + item);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

// Every emitted document carries the version and the full configuration that
// produced it, so results can be regenerated bit for bit.
inline nlohmann::json with_meta(nlohmann::json config, nlohmann::json body) {
  body["version"] = MARTBOUND_VERSION;
  body["config"] = std::move(config);
  return body;
}

inline void emit(const nlohmann::json& doc, const std::string& out_path) {
  const std::string text = doc.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::invalid_argument("cannot open output file " + out_path);
    f << text;
  }
}

inline nlohmann::json report_to_json(const SimulationReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name},
                      {"threshold", c.threshold},
                      {"bound", c.bound},
                      {"estimate", c.estimate},
                      {"ci_lo", c.ci.lo},
                      {"ci_hi", c.ci.hi},
                      {"informative", c.informative},
                      {"pass", c.pass}});
  return {{"kind", r.kind},
          {"family", r.family},
          {"theorem", r.theorem},
          {"replicas", r.replicas},
          {"seed", r.seed},
          {"statistics", r.statistics},
          {"checks", checks},
          {"pass", r.pass}};
}

inline TailTheorem default_theorem(Family family) {
  switch (family) {
    case Family::rademacher: return TailTheorem::bounded_increment;
    case Family::two_point: return TailTheorem::bennett;
    case Family::cond_symmetric_scaled: return TailTheorem::cond_symmetric;
    case Family::independent_discrete: return TailTheorem::bennett;
    case Family::supermartingale_drift: return TailTheorem::supermartingale;
  }
  return TailTheorem::bennett;
}

inline int run_cli(int argc, const char* const* argv) {
  CLI::App app{"closed-form martingale bounds, exact constants, extremal "
               "constructions, and Monte Carlo verification"};
  app.require_subcommand(1);
  int verdict = 0;

  // ---- bound ---------------------------------------------------------------
  auto* bound = app.add_subcommand("bound", "evaluate closed-form bounds");
  bound->require_subcommand(1);

  {
    auto* tail = bound->add_subcommand("tail", "maximal-function tail bounds");
    auto kind = std::make_shared<std::string>();
    auto r = std::make_shared<double>(0.0);
    auto params = std::make_shared<std::string>();
    auto one_sided = std::make_shared<bool>(false);
    tail->add_option("--kind", *kind, "bennett|bernstein|bounded|condsym")
        ->required()
        ->check(CLI::IsMember({"bennett", "bernstein", "bounded", "condsym"}));
    tail->add_option("--r", *r, "tail threshold")->required();
    tail->add_option("--params", *params,
                     "comma list: bennett a=,b=; bernstein B=,Gamma=; "
                     "bounded bstar=,D=; condsym b=,D=")
        ->required();
    tail->add_flag("--one-sided", *one_sided,
                   "one-sided form (drops the factor 2; forces D = 1)");
    tail->callback([=]() {
      const auto prm = parse_params(*params);
      TailBound b;
      if (*kind == "bennett") {
        b = bennett_tail(*r, param(prm, "a"), param(prm, "b"), !*one_sided);
      } else if (*kind == "bernstein") {
        b = bernstein_tail(*r, param(prm, "B"), param(prm, "Gamma"),
                           !*one_sided);
      } else if (*kind == "bounded") {
        const double D = *one_sided ? 1.0 : param(prm, "D");
        b = bounded_increment_tail(*r, param(prm, "bstar"), D);
        if (*one_sided) {
          b.value *= 0.5;
          b.informative = b.value < 1.0;
        }
      } else {
        const double D = *one_sided ? 1.0 : param(prm, "D");
        b = conditionally_symmetric_tail(*r, param(prm, "b"), D);
        if (*one_sided) {
          b.value *= 0.5;
          b.informative = b.value < 1.0;
        }
      }
      nlohmann::json body = {{"value", b.value},
                             {"informative", b.informative}};
      body["lambda_used"] =
          b.lambda_used ? nlohmann::json(*b.lambda_used) : nlohmann::json();
      if (b.alt_value) body["alt_value"] = *b.alt_value;
      emit(with_meta({{"command", "bound tail"},
                      {"kind", *kind},
                      {"r", *r},
                      {"params", prm},
                      {"one_sided", *one_sided}},
                     std::move(body)),
           "");
    });
  }

  {
    auto* moment = bound->add_subcommand("moment", "p-th moment envelopes");
    auto p = std::make_shared<double>(0.0);
    auto ap = std::make_shared<double>(0.0);
    auto a2 = std::make_shared<double>(0.0);
    auto c = std::make_shared<double>(0.0);
    auto envelope = std::make_shared<std::string>("hat");
    moment->add_option("--p", *p, "moment order, > 2")->required();
    moment->add_option("--ap", *ap, "increment budget a_p")->required();
    moment->add_option("--a2", *a2, "variance budget a_2")->required();
    auto* copt = moment->add_option(
        "--c", *c, "evaluate the spectrum at this c instead of optimizing");
    moment->add_option("--envelope", *envelope, "hat|check|star")
        ->check(CLI::IsMember({"hat", "check", "star"}));
    moment->callback([=]() {
      const BoundQuery bq{*p, *ap, *a2};
      nlohmann::json body;
      std::string form;
      if (copt->count() > 0) {
        form = "spectrum";
        body = {{"value", spectrum_term(bq, *c)}, {"c", *c}};
      } else if (*envelope == "hat") {
        form = "hat";
        const HatEnvelope h = hat_B(bq);
        body = {{"value", h.value}, {"c", h.c}};
      } else if (*envelope == "check") {
        form = "check";
        const CheckEnvelope ch = check_B(bq);
        body = {{"value", ch.value}, {"alpha", ch.alpha}};
      } else {
        form = "star";
        body = {{"value", star_B(bq)}};
      }
      body["form"] = form;
      emit(with_meta({{"command", "bound moment"},
                      {"p", *p},
                      {"ap", *ap},
                      {"a2", *a2},
                      {"envelope", form},
                      {"c", copt->count() > 0 ? *c : 0.0}},
                     std::move(body)),
           "");
    });
  }

  // ---- constants -----------------------------------------------------------
  auto* constants =
      app.add_subcommand("constants", "exact and extremized constants");
  constants->require_subcommand(1);

  {
    auto* gamma = constants->add_subcommand(
        "gamma", "partition constants of even moments");
    auto j = std::make_shared<int>(0);
    auto m = std::make_shared<int>(0);
    gamma->add_option("--j", *j, "number of distinct coordinates")->required();
    gamma->add_option("--m", *m, "half the moment order")->required();
    gamma->callback([=]() {
      const PartitionConstant pc = gamma_jm(*j, *m);
      const BigInt num = boost::multiprecision::numerator(pc.value);
      const BigInt den = boost::multiprecision::denominator(pc.value);
      emit(with_meta({{"command", "constants gamma"}, {"j", *j}, {"m", *m}},
                     {{"numerator", num.str()},
                      {"denominator", den.str()},
                      {"decimal", pc.value.convert_to<double>()},
                      {"partitions", pc.partitions}}),
           "");
    });
  }

  {
    auto* burk = constants->add_subcommand(
        "burkholder", "extremized maximal-inequality constants");
    auto i = std::make_shared<int>(0);
    auto p = std::make_shared<double>(0.0);
    burk->add_option("--i", *i, "1 or 2")->required()->check(CLI::Range(1, 2));
    burk->add_option("--p", *p, "moment order, > 1")->required();
    burk->callback([=]() {
      const BurkholderConstant c = burkholder_C(*i, *p);
      emit(with_meta(
               {{"command", "constants burkholder"}, {"i", *i}, {"p", *p}},
               {{"value", c.value}, {"beta", c.beta}, {"delta", c.delta}}),
           "");
    });
  }

  {
    auto* b80 = constants->add_subcommand(
        "b1980", "classical two-budget moment bound");
    auto p = std::make_shared<double>(0.0);
    auto ap = std::make_shared<double>(0.0);
    auto a2 = std::make_shared<double>(0.0);
    auto refine = std::make_shared<bool>(false);
    b80->add_option("--p", *p)->required();
    b80->add_option("--ap", *ap)->required();
    b80->add_option("--a2", *a2)->required();
    b80->add_flag("--refine", *refine, "optimize the free scale per term");
    b80->callback([=]() {
      const B1980Result r = b1980(*p, *ap, *a2, *refine);
      emit(with_meta({{"command", "constants b1980"},
                      {"p", *p},
                      {"ap", *ap},
                      {"a2", *a2},
                      {"refine", *refine}},
                     {{"value", r.value}, {"m", r.m}, {"refined", r.refined}}),
           "");
    });
  }

  // ---- construct -----------------------------------------------------------
  auto* construct =
      app.add_subcommand("construct", "extremal two-point constructions");
  construct->require_subcommand(1);

  {
    auto* ext = construct->add_subcommand("extremal", "finite-horizon");
    auto p = std::make_shared<double>(0.0);
    auto ap = std::make_shared<double>(0.0);
    auto a2 = std::make_shared<double>(0.0);
    auto n = std::make_shared<std::int64_t>(0);
    ext->add_option("--p", *p)->required();
    ext->add_option("--ap", *ap)->required();
    ext->add_option("--a2", *a2)->required();
    ext->add_option("--n", *n, "horizon")->required();
    ext->callback([=]() {
      const ExtremalConstruction c = build_extremal(*p, *n, *ap, *a2);
      emit(with_meta({{"command", "construct extremal"},
                      {"p", *p},
                      {"ap", *ap},
                      {"a2", *a2},
                      {"n", *n}},
                     {{"p", c.p},
                      {"n", c.n},
                      {"ap", c.a_p},
                      {"a2", c.a_2},
                      {"t", c.t},
                      {"q", c.q},
                      {"u", c.u}}),
           "");
    });
  }

  {
    auto* lim = construct->add_subcommand("limit", "infinite-horizon");
    auto p = std::make_shared<double>(0.0);
    auto ap = std::make_shared<double>(0.0);
    auto a2 = std::make_shared<double>(0.0);
    lim->add_option("--p", *p)->required();
    lim->add_option("--ap", *ap)->required();
    lim->add_option("--a2", *a2)->required();
    lim->callback([=]() {
      const LimitConstruction c = build_limit(*p, *ap, *a2);
      emit(with_meta({{"command", "construct limit"},
                      {"p", *p},
                      {"ap", *ap},
                      {"a2", *a2}},
                     {{"p", c.p},
                      {"ap", c.a_p},
                      {"a2", c.a_2},
                      {"t", c.t},
                      {"u", c.u}}),
           "");
    });
  }

  // ---- simulate ------------------------------------------------------------
  {
    auto* sim = app.add_subcommand(
        "simulate", "Monte Carlo verification of the closed-form bounds");
    auto spec_path = std::make_shared<std::string>();
    auto replicas = std::make_shared<std::int64_t>(100000);
    auto seed = std::make_shared<std::uint64_t>(default_seed());
    auto verify = std::make_shared<std::string>();
    auto theorem = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto p_order = std::make_shared<double>(4.0);
    auto beta = std::make_shared<double>(3.0);
    auto delta1 = std::make_shared<double>(0.1);
    auto delta2 = std::make_shared<double>(0.5);
    auto workers = std::make_shared<int>(0);
    sim->add_option("--spec", *spec_path, "martingale spec JSON file")
        ->required();
    sim->add_option("--replicas", *replicas)->check(CLI::PositiveNumber);
    sim->add_option("--seed", *seed, "overrides MARTBOUND_SEED");
    sim->add_option("--verify", *verify, "tail|moment|goodlambda|yurinskii")
        ->required()
        ->check(CLI::IsMember({"tail", "moment", "goodlambda", "yurinskii"}));
    sim->add_option("--theorem", *theorem,
                    "tail theorem override: bennett|bounded|condsym|"
                    "supermartingale");
    sim->add_option("--out", *out, "also write the report JSON here");
    sim->add_option("--p", *p_order, "moment order for --verify moment");
    sim->add_option("--beta", *beta);
    sim->add_option("--delta1", *delta1);
    sim->add_option("--delta2", *delta2);
    sim->add_option("--workers", *workers, "0 = hardware concurrency");
    sim->callback([=, &verdict]() {
      std::ifstream f(*spec_path);
      if (!f)
        throw std::invalid_argument("cannot open spec file " + *spec_path);
      nlohmann::json sj = nlohmann::json::parse(f);
      nlohmann::json config = {{"command", "simulate"},
                               {"spec_file", *spec_path},
                               {"spec", sj},
                               {"replicas", *replicas},
                               {"seed", *seed},
                               {"verify", *verify}};
      nlohmann::json body;
      bool pass = false;
      if (*verify == "yurinskii") {
        const SpaceSpec space = sj.at("space").get<SpaceSpec>();
        const auto x = sj.at("x").get<std::vector<double>>();
        std::vector<VectorDistribution> incs;
        for (const auto& step : sj.at("increments")) {
          VectorDistribution dist;
          for (const auto& a : step)
            dist.atoms.push_back(
                {a.at("value").get<std::vector<double>>(),
                 a.at("prob").get<double>()});
          incs.push_back(std::move(dist));
        }
        const YurinskiiReport rep = yurinskii_check(space, incs, x);
        pass = rep.pass;
        body = {{"theorem", "yurinskii"},
                {"pass", rep.pass},
                {"paths", rep.paths},
                {"mean_norm", rep.mean_norm},
                {"worst_pointwise_slack", rep.worst_pointwise_slack},
                {"worst_conditional_slack", rep.worst_conditional_slack},
                {"worst_telescope_error", rep.worst_telescope_error},
                {"worst_limit_rel_err", rep.worst_limit_rel_err}};
      } else {
        const MartingaleSpec ms = sj.get<MartingaleSpec>();
        SimulationReport rep;
        if (*verify == "tail") {
          const TailTheorem thm = theorem->empty()
                                      ? default_theorem(ms.family)
                                      : tail_theorem_from_name(*theorem);
          const auto fn = tail_bound_for(ms, thm);
          const auto grid = default_r_grid(fn, 1.0);
          rep = verify_tail_bounds(ms, thm, grid, *replicas, *seed, *workers);
        } else if (*verify == "moment") {
          rep = verify_moment_bounds(ms, *p_order, *replicas, *seed,
                                     *workers);
          config["p"] = *p_order;
        } else {
          const double D =
              ms.family == Family::supermartingale_drift
                  ? 1.0
                  : smoothness_constant(ms.space);
          const double base =
              std::max(increment_sup(ms) / *delta2,
                       D * std::sqrt(predictable_variance_sup(ms)) / *delta1);
          std::vector<double> lambda_grid(12);
          for (int k = 0; k < 12; ++k)
            lambda_grid[static_cast<std::size_t>(k)] =
                base / 64.0 * std::pow(128.0, double(k) / 11.0);
          rep = good_lambda_check(ms, *beta, *delta1, *delta2, lambda_grid,
                                  *replicas, *seed, *workers);
          config["beta"] = *beta;
          config["delta1"] = *delta1;
          config["delta2"] = *delta2;
        }
        pass = rep.pass;
        body = report_to_json(rep);
      }
      emit(with_meta(std::move(config), std::move(body)), *out);
      if (!pass) verdict = 1;
    });
  }

  // ---- scan ----------------------------------------------------------------
  auto* scan = app.add_subcommand("scan", "grid scans over (p, q)");
  scan->require_subcommand(1);

  {
    auto* eq = scan->add_subcommand(
        "equivalence", "hat/check/star/b1980 envelope comparison");
    auto p_grid = std::make_shared<std::string>();
    auto q_points = std::make_shared<int>(41);
    auto csv_path = std::make_shared<std::string>("equivalence.csv");
    auto summary_path = std::make_shared<std::string>();
    auto workers = std::make_shared<int>(0);
    eq->add_option("--p-grid", *p_grid, "comma list of p values");
    eq->add_option("--q-grid", *q_points,
                   "log-spaced q points per p, spanning [e^{-2p}, e^2 "
                   "sqrt(p)]");
    eq->add_option("--csv", *csv_path, "CSV output path");
    eq->add_option("--summary", *summary_path, "also write summary here");
    eq->add_option("--workers", *workers);
    eq->callback([=, &verdict]() {
      const auto grid =
          p_grid->empty() ? default_p_grid() : parse_grid(*p_grid);
      const EquivalenceScan sc = equivalence_scan(grid, *q_points, *workers);
      std::ofstream csv(*csv_path);
      if (!csv)
        throw std::invalid_argument("cannot open CSV output " + *csv_path);
      write_equivalence_csv(csv, sc);
      nlohmann::json body = equivalence_summary(sc);
      const bool pass = sc.max_hat_over_check <= 8.0 &&
                        sc.max_b1980_over_check <= 64.0;
      body["pass"] = pass;
      body["csv"] = *csv_path;
      emit(with_meta({{"command", "scan equivalence"},
                      {"p_grid", grid},
                      {"q_grid", *q_points},
                      {"csv", *csv_path}},
                     std::move(body)),
           *summary_path);
      if (!pass) verdict = 1;
    });
  }

  {
    auto* mini = scan->add_subcommand(
        "minimality", "no part of the spectrum is removable");
    auto p_grid = std::make_shared<std::string>();
    auto c_points = std::make_shared<int>(41);
    auto csv_path = std::make_shared<std::string>("minimality.csv");
    auto summary_path = std::make_shared<std::string>();
    auto workers = std::make_shared<int>(0);
    mini->add_option("--p-grid", *p_grid, "comma list of p values");
    mini->add_option("--c-grid", *c_points, "log-spaced c points in [1, p]");
    mini->add_option("--csv", *csv_path, "CSV output path");
    mini->add_option("--summary", *summary_path);
    mini->add_option("--workers", *workers);
    mini->callback([=, &verdict]() {
      const auto grid =
          p_grid->empty() ? default_p_grid() : parse_grid(*p_grid);
      const MinimalityScan sc = minimality_scan(grid, *c_points, *workers);
      std::ofstream csv(*csv_path);
      if (!csv)
        throw std::invalid_argument("cannot open CSV output " + *csv_path);
      write_minimality_csv(csv, sc);
      nlohmann::json body = minimality_summary(sc);
      const bool pass =
          sc.max_ratio <= 2.0 * std::exp(1.0) * (1.0 + 1e-12);
      body["pass"] = pass;
      body["csv"] = *csv_path;
      emit(with_meta({{"command", "scan minimality"},
                      {"p_grid", grid},
                      {"c_grid", *c_points},
                      {"csv", *csv_path}},
                     std::move(body)),
           *summary_path);
      if (!pass) verdict = 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return verdict;
}

}  // namespace martbound::cli
