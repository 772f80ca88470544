// omegarepair command-line front end.
//
// Every result is printed as "KEY VALUE" lines on stdout; diagnostics go to
// stderr. Exit codes: 0 ok, 1 usage, 2 parse/model error, 3 infeasible or
// undecidable, 4 size limit, 5 oracle mismatch.

#include "omegarepair/dot.hpp"
#include "omegarepair/error.hpp"
#include "omegarepair/impair.hpp"
#include "omegarepair/io.hpp"
#include "omegarepair/mask.hpp"
#include "omegarepair/oracle.hpp"
#include "omegarepair/repair.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace omegarepair;

namespace {

enum Exit { OK = 0, USAGE = 1, PARSE = 2, INFEASIBLE = 3, SIZE = 4, MISMATCH = 5 };

int exit_code(ErrorCode c) {
  switch (c) {
  case ErrorCode::PARSE:
  case ErrorCode::INVALID_MODEL:
  case ErrorCode::ALPHABET_MISMATCH:
  case ErrorCode::BAD_AGGREGATOR:
    return PARSE;
  case ErrorCode::INFEASIBLE:
  case ErrorCode::ACYCLIC:
  case ErrorCode::UNDECIDABLE_MEAN_MASK:
  case ErrorCode::NONDET_INPUT:
    return INFEASIBLE;
  case ErrorCode::SIZE_LIMIT:
  case ErrorCode::BUDGET_EXCEEDED:
    return SIZE;
  case ErrorCode::BAD_EPSILON:
    return USAGE;
  default:
    return PARSE;
  }
}

template <class T>
T load(const std::string& path, T (*parse)(std::string_view)) {
  try {
    T x = parse(read_text_file(path));
    require_valid(x);
    return x;
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::optional<Rational> opt_rational(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return Rational::parse(s);
}

void print_threshold(const ThresholdResult& r) {
  std::cout << "TAU* " << ext_str(r.value);
  if (r.value) std::cout << " " << to_string(r.attainment);
  std::cout << "\n";
  if (!r.value) return;
  std::cout << "MEMORY " << to_string(r.memory) << "\n";
  for (const auto& i : r.good) std::cout << "GOOD " << i.str() << "\n";
  for (const auto& i : r.bad) std::cout << "BAD " << i.str() << "\n";
}

struct Files {
  std::string kripke, rm, nba, epsilon;
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative repair, impair verification and masking of transition systems"};
  app.require_subcommand(1);

  std::string rm_file, costs;
  auto* eval = app.add_subcommand("eval", "Aggregate a cost lasso with a repair machine's aggregator");
  eval->add_option("--rm", rm_file, "Repair machine file")->required();
  eval->add_option("--costs", costs, "Cost lasso, e.g. \"2,0|1,4\"")->required();

  Files rf;
  std::string strategy_out, dot_out;
  auto* repair = app.add_subcommand("repair", "Optimal repair threshold and strategy");
  repair->add_option("--kripke", rf.kripke)->required();
  repair->add_option("--rm", rf.rm)->required();
  repair->add_option("--spec", rf.nba, "Specification NBA")->required();
  repair->add_option("--epsilon", rf.epsilon, "Optimality margin p/q for the strategy");
  repair->add_option("--strategy", strategy_out, "Write the strategy here");
  repair->add_option("--dot", dot_out, "Write the arena as DOT here");

  Files imf;
  std::string witness_out;
  auto* impair = app.add_subcommand("impair", "Least cost of a bad rewrite");
  impair->add_option("--kripke", imf.kripke)->required();
  impair->add_option("--rm", imf.rm)->required();
  impair->add_option("--bad", imf.nba, "NBA of bad rewrites")->required();
  impair->add_option("--epsilon", imf.epsilon, "Witness margin p/q (default 1/100)");
  impair->add_option("--witness", witness_out, "Write the witness here");

  Files mf;
  std::string threshold, depth = "auto", mask_out, bad_out;
  auto* mask = app.add_subcommand("mask", "Traces safe from every bad rewrite within a threshold");
  mask->add_option("--kripke", mf.kripke)->required();
  mask->add_option("--rm", mf.rm)->required();
  mask->add_option("--bad", mf.nba)->required();
  mask->add_option("--threshold", threshold, "Threshold p/q")->required();
  mask->add_option("--epsilon", mf.epsilon, "Isolation margin p/q (DSUM)");
  mask->add_option("--depth", depth, "Unrolling depth n or auto (DSUM)");
  mask->add_option("-o,--output", mask_out, "Mask NBA output file")->required();
  mask->add_option("--bad-nba", bad_out, "Also write the NBA of unsafe traces (DSUM)");

  Files pf;
  std::string product_dot;
  auto* product = app.add_subcommand("product", "Build the synchronized product");
  product->add_option("--kripke", pf.kripke)->required();
  product->add_option("--rm", pf.rm)->required();
  product->add_option("--spec", pf.nba)->required();
  product->add_option("--dot", product_dot)->required();

  std::uint64_t seed = 1;
  std::size_t count = 10;
  std::string config_file;
  OracleBudget budget;
  auto* oracle = app.add_subcommand("oracle", "Compare the solvers with brute force on random instances");
  oracle->add_option("--seed", seed)->required();
  oracle->add_option("--count", count)->required();
  oracle->add_option("--config", config_file, "Generator configuration (JSON)");
  oracle->add_option("--budget", budget.max_strategies, "Max positional strategies enumerated per instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? OK : USAGE;
  }

  try {
    if (*eval) {
      auto t = load(rm_file, parse_rm);
      std::cout << "VALUE " << eval_aggregator(t.agg, parse_cost_lasso(costs)).str() << "\n";
      return OK;
    }

    if (*repair) {
      auto k = load(rf.kripke, parse_kripke);
      auto t = load(rf.rm, parse_rm);
      auto b = load(rf.nba, parse_nba);
      auto eps = opt_rational(rf.epsilon);
      if (eps && *eps <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
      auto g = build_product(k, t, b);
      auto a = build_arena(g);
      auto sol = solve_repair(a, t.agg, eps ? eps : std::optional<Rational>(Rational(1, 100)));
      print_threshold(sol.threshold);
      if (!dot_out.empty()) {
        std::vector<std::pair<int, int>> chosen;
        if (sol.strategy)
          for (const auto& m : sol.strategy->modes) chosen.insert(chosen.end(), m.map.begin(), m.map.end());
        write_text_file(dot_out, to_dot(a, k, t, b, chosen));
      }
      if (sol.threshold.infinite()) return INFEASIBLE;
      if (!strategy_out.empty()) write_text_file(strategy_out, sol.strategy->serialize());
      return OK;
    }

    if (*impair) {
      auto k = load(imf.kripke, parse_kripke);
      auto t = load(imf.rm, parse_rm);
      auto b = load(imf.nba, parse_nba);
      auto eps = opt_rational(imf.epsilon).value_or(Rational(1, 100));
      if (eps <= Rational(0)) throw Error(ErrorCode::BAD_EPSILON, "epsilon must be positive");
      auto g = build_product(k, t, b);
      auto r = impair_threshold(g, t.agg);
      print_threshold(r);
      if (r.infinite()) return INFEASIBLE;
      if (!witness_out.empty()) {
        auto w = make_witness(g, k, t, impair_witness_run(g, t.agg, eps));
        std::cout << "WITNESS_COST " << w.cost.str() << "\n";
        write_text_file(witness_out, w.serialize());
      }
      return OK;
    }

    if (*mask) {
      auto k = load(mf.kripke, parse_kripke);
      auto t = load(mf.rm, parse_rm);
      auto b = load(mf.nba, parse_nba);
      auto tau = Rational::parse(threshold);
      auto eps = opt_rational(mf.epsilon);
      std::optional<std::int64_t> n;
      if (depth != "auto") {
        try {
          n = std::stoll(depth);
        } catch (const std::exception&) {
          throw Error(ErrorCode::BAD_EPSILON, "--depth expects an integer or auto");
        }
      }
      auto tq = restrict_domain(t, kripke_to_nba(k));
      if (tq.agg.kind == AggKind::DSUM && eps) {
        if (!n) n = dsum_mask_depth(tq, b, *eps);
        std::cout << "DEPTH " << *n << "\n";
        if (!bad_out.empty()) write_text_file(bad_out, serialize_model(dsum_mask_bad_nba(tq, b, tau, *eps, n)));
      }
      auto m = synthesize_mask(tq, b, tau, eps, n);
      write_text_file(mask_out, serialize_model(m));
      std::cout << "MASK_STATES " << m.size() << "\n";
      std::cout << "MASK_EMPTY " << (m.states.empty() ? "true" : "false") << "\n";
      return OK;
    }

    if (*product) {
      auto k = load(pf.kripke, parse_kripke);
      auto t = load(pf.rm, parse_rm);
      auto b = load(pf.nba, parse_nba);
      auto g = build_product(k, t, b);
      std::size_t finals = 0;
      for (bool f : g.final) finals += f;
      std::cout << "VERTICES " << g.size() << "\nEDGES " << g.edges.size() << "\nFINAL " << finals << "\n";
      write_text_file(product_dot, to_dot(g, k, t, b));
      return OK;
    }

    if (*oracle) {
      GeneratorConfig cfg;
      if (!config_file.empty()) cfg = parse_generator_config(read_text_file(config_file));
      std::size_t bad = 0;
      auto lines = run_oracle(seed, count, cfg, budget);
      for (const auto& l : lines) {
        std::cout << l.str() << "\n";
        bad += !l.ok();
      }
      std::cout << "CHECKS " << lines.size() << "\nMISMATCHES " << bad << "\n";
      return bad ? MISMATCH : OK;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return PARSE;
  }
  return USAGE;
}
