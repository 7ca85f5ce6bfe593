// Copyright 2026 The fdcop Authors
// SPDX-License-Identifier: Apache-2.0

// fdcop: generate instances, run an engine, run benchmark matrices, verify
// properties. Exit codes: 0 success, 1 unexpected error, 2 invalid input,
// 3 capacity exceeded, 4 verification failed.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fdcop/fdcop.hpp"
#include "json.hpp"

namespace {

using namespace fdcop;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitVerify = 4;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ArgumentError("failed writing '" + path + "'");
}

/// Flags that pick an instance family and coefficient profile.
struct FamilyFlags {
  std::string graph = "tree";
  std::size_t n = 10;
  double p1 = 0.2;
  std::string profile = "standard";
  bool concave = false;

  void add(CLI::App* app) {
    app->add_option("-n,--agents", n, "Number of agents")->check(CLI::PositiveNumber);
    app->add_option("--p1", p1, "Edge density for graphs");
    app->add_option("--profile", profile, "Coefficient profile")
        ->check(CLI::IsMember({"standard", "calibrated"}));
    app->add_flag("--concave", concave, "Force concave square terms");
  }

  InstanceSpec spec() const {
    InstanceSpec s;
    s.kind = parse_graph_kind(graph);
    s.agents = n;
    s.p1 = p1;
    s.coefficients = coefficient_profile(profile);
    s.coefficients.concave = concave;
    return s;
  }
};

/// Engine knobs shared by solve, bench and verify.
struct EngineFlags {
  std::string engine = "dpop";
  std::size_t points = 3;
  std::size_t moves = 10;
  double alpha = 0.01;
  std::size_t clusters = 10;
  std::size_t iterations = 1;
  std::string interp = "idw";
  std::size_t row_cap = kDefaultRowCap;
  std::size_t piece_cap = kDefaultPieceCap;
  std::size_t work_cap = kDefaultInterpolationWorkCap;

  void add_knobs(CLI::App* app) {
    app->add_option("-d,--points", points, "Points per variable")->check(CLI::PositiveNumber);
    app->add_option("--moves", moves, "Gradient moves per tuple");
    app->add_option("--alpha", alpha, "Learning rate")->check(CLI::NonNegativeNumber);
    app->add_option("-k,--clusters", clusters, "Clusters")->check(CLI::PositiveNumber);
    app->add_option("--iters", iterations, "Max-sum iterations")->check(CLI::PositiveNumber);
    app->add_option("--interp", interp, "Interpolation")
        ->check(CLI::IsMember({"idw", "nearest"}));
    app->add_option("--row-cap", row_cap, "Table row cap");
    app->add_option("--piece-cap", piece_cap, "Piece cap");
    app->add_option("--work-cap", work_cap, "Interpolation work cap per agent");
  }

  EngineConfig config(std::uint64_t seed) const {
    EngineConfig c;
    c.engine = parse_engine(engine);
    c.points = points;
    c.moves = moves;
    c.alpha = alpha;
    c.k_clusters = clusters;
    c.iterations = iterations;
    c.interpolation = parse_interpolation(interp);
    c.seed = seed;
    c.row_cap = row_cap;
    c.piece_cap = piece_cap;
    c.interpolation_work_cap = work_cap;
    return c;
  }
};

json stats_json(const RunStats& s) {
  json by_kind = json::object();
  for (const auto& [k, v] : s.messages_by_kind) by_kind[kind_name(k)] = v;
  return {{"total_messages", s.total_messages},
          {"messages_by_kind", by_kind},
          {"total_scalars", s.total_scalars},
          {"max_message_scalars", s.max_message_scalars},
          {"inter_agent_messages", s.inter_agent_messages},
          {"max_util_rows", s.max_util_rows},
          {"phase_ms", s.phase_ms}};
}

json config_json(const EngineConfig& c) {
  return {{"engine", engine_name(c.engine)},
          {"points", c.points},
          {"moves", c.moves},
          {"alpha", c.alpha},
          {"clusters", c.k_clusters},
          {"iterations", c.iterations},
          {"interp", interpolation_name(c.interpolation)},
          {"seed", c.seed},
          {"row_cap", c.row_cap},
          {"piece_cap", c.piece_cap},
          {"work_cap", c.interpolation_work_cap}};
}

json bounds_json(const Problem& p, const EngineConfig& c) {
  json b;
  b["delta"] = gradient_bound(p).global_delta;
  b["predicted_messages"] =
      predicted_message_count(c.engine, p.graph(), c.iterations);
  if (c.points > 0) {
    double m = discretization_gap(p, c.points);
    b["m"] = m;
    b["error_bound_discrete"] = error_bound_discrete(p, m);
    if (c.alpha > 0.0) {
      b["error_bound_af"] = error_bound_af(p, m, c.moves, c.alpha);
    }
  }
  return b;
}

int cmd_generate(const std::string& kind, const FamilyFlags& fam,
                 std::uint64_t seed, const std::string& out) {
  FamilyFlags f = fam;
  f.graph = kind;
  Problem p = make_instance(f.spec(), seed);
  if (out.empty()) {
    std::cout << serialize(p);
  } else {
    save_problem(p, out);
    PseudoTree t = PseudoTree::build(p.graph());
    std::cout << "variables " << p.variable_count() << "\nconstraints "
              << p.utility_count() << "\ninduced_width " << t.induced_width()
              << '\n';
  }
  return kExitOk;
}

int cmd_solve(const std::string& path, const EngineFlags& ef,
              std::uint64_t seed, const std::string& out) {
  Problem p = load_problem(path);
  EngineConfig c = ef.config(seed);
  json report;
  report["problem"] = path;
  report["config"] = config_json(c);
  report["bounds"] = bounds_json(p, c);
  int code = kExitOk;
  try {
    RunResult r = run(p, c);
    report["status"] = "ok";
    report["utility"] = evaluate_solution(p, r.assignment);
    json a = json::object();
    for (VarIndex v = 0; v < p.variable_count(); ++v) {
      a[p.variable(v).id] = r.assignment.at(v);
    }
    report["assignment"] = a;
    report["stats"] = stats_json(r.stats);
  } catch (const CapacityExceeded& e) {
    report["status"] = "capacity";
    report["error"] = e.what();
    report["stats"] = stats_json(e.partial_stats());
    code = kExitCapacity;
  }
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out.empty()) write_file(out, text);
  return code;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  std::filesystem::path stem = p.parent_path() / p.stem();
  return stem.string() + suffix;
}

int cmd_bench(BenchMatrix m, bool timing, bool quiet, const std::string& out) {
  auto rows = run_matrix(m, [&](const BenchRow& r) {
    if (!quiet) {
      std::cerr << cell_columns(r.cell) << " seed " << r.seed << ' '
                << status_name(r.status) << '\n';
    }
  });
  auto aggs = aggregate(rows);
  const std::string table = pivot_to_csv(aggs);
  std::cout << table;
  if (!out.empty()) {
    write_file(out, rows_to_csv(rows, timing));
    write_file(sibling(out, ".aggregate.csv"), aggregates_to_csv(aggs));
    write_file(sibling(out, ".table.csv"), table);
  }
  return kExitOk;
}

int cmd_verify(const std::vector<Problem>& problems, const VerifyConfig& vc) {
  bool ok = true;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    auto checks = verify_problem(problems[i], vc);
    if (problems.size() > 1) std::cout << "# instance " << i << '\n';
    std::cout << checks_report(checks);
    ok = ok && all_passed(checks);
  }
  std::cout << (ok ? "all checks passed" : "verification failed") << '\n';
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Continuous-domain distributed constraint optimization"};
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  std::string out;

  // generate
  auto* gen = app.add_subcommand("generate", "Write a random problem");
  std::string gen_kind = "tree";
  FamilyFlags gen_fam;
  gen->add_option("kind", gen_kind, "tree or graph")
      ->required()
      ->check(CLI::IsMember({"tree", "graph"}));
  gen_fam.add(gen);
  gen->add_option("--seed", seed, "Random seed");
  gen->add_option("-o,--out", out, "Output path (stdout when omitted)");

  // solve
  auto* solve = app.add_subcommand("solve", "Run one engine on a problem file");
  std::string solve_path;
  EngineFlags solve_eng;
  solve->add_option("problem", solve_path, "Problem document")->required();
  solve->add_option("--engine", solve_eng.engine, "Engine")
      ->check(CLI::IsMember({"dpop", "ef-dpop", "af-dpop", "caf-dpop", "hcms"}));
  solve_eng.add_knobs(solve);
  solve->add_option("--seed", seed, "Seed for clustering");
  solve->add_option("-o,--out", out, "Also write the report here");

  // bench
  auto* bench = app.add_subcommand("bench", "Run a benchmark matrix");
  std::string preset;
  std::string bench_graph = "tree";
  FamilyFlags bench_fam;
  bench_fam.profile = "calibrated";
  std::vector<std::size_t> sizes{10};
  std::vector<std::string> engines{"dpop"};
  std::vector<std::size_t> points{3};
  std::vector<std::size_t> moves{10};
  std::vector<std::size_t> clusters{10};
  EngineFlags bench_eng;
  std::size_t runs = 20;
  bool timing = false;
  bool quiet = false;
  bench->add_option("--preset", preset, "Named matrix")
      ->check(CLI::IsMember({"table1", "table2", "table3-tree", "table3-graph"}));
  bench->add_option("--graph", bench_graph, "tree or graph")
      ->check(CLI::IsMember({"tree", "graph"}));
  bench->add_option("--p1", bench_fam.p1, "Edge density for graphs");
  bench->add_option("--profile", bench_fam.profile, "Coefficient profile")
      ->check(CLI::IsMember({"standard", "calibrated"}));
  bench->add_flag("--concave", bench_fam.concave, "Force concave square terms");
  bench->add_option("--sizes", sizes, "Agent counts")->delimiter(',');
  bench->add_option("--engines", engines, "Engines")->delimiter(',');
  bench->add_option("-d,--points", points, "Points per variable")->delimiter(',');
  bench->add_option("--moves", moves, "Move counts")->delimiter(',');
  bench->add_option("-k,--clusters", clusters, "Cluster counts")->delimiter(',');
  bench->add_option("--alpha", bench_eng.alpha, "Learning rate");
  bench->add_option("--iters", bench_eng.iterations, "Max-sum iterations");
  bench->add_option("--interp", bench_eng.interp, "Interpolation")
      ->check(CLI::IsMember({"idw", "nearest"}));
  bench->add_option("--runs", runs, "Seeds per cell")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "First seed");
  bench->add_flag("--timing", timing, "Append wall time to each row");
  bench->add_flag("-q,--quiet", quiet, "No per-row progress");
  bench->add_option("-o,--out", out, "Rows CSV; views go next to it");

  // verify
  auto* verify = app.add_subcommand("verify", "Check properties on instances");
  std::string verify_path;
  std::string verify_graph = "tree";
  FamilyFlags verify_fam;
  EngineFlags verify_eng;
  verify_eng.clusters = 5;
  std::size_t verify_runs = 1;
  verify->add_option("problem", verify_path, "Problem document (else generated)");
  verify->add_option("--graph", verify_graph, "tree or graph")
      ->check(CLI::IsMember({"tree", "graph"}));
  verify_fam.add(verify);
  verify_eng.add_knobs(verify);
  verify->add_option("--runs", verify_runs, "Generated instances")->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "First seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*gen) return cmd_generate(gen_kind, gen_fam, seed, out);
    if (*solve) return cmd_solve(solve_path, solve_eng, seed, out);
    if (*bench) {
      BenchMatrix m;
      if (!preset.empty()) {
        m = preset_matrix(preset);
        if (bench->count("--profile")) {
          m.instance.coefficients = coefficient_profile(bench_fam.profile);
        }
      } else {
        FamilyFlags f = bench_fam;
        f.graph = bench_graph;
        m.instance = f.spec();
        m.sizes = sizes;
        m.engines.clear();
        for (const auto& e : engines) m.engines.push_back(parse_engine(e));
        m.points = points;
        m.moves = moves;
        m.clusters = clusters;
      }
      m.instance.coefficients.concave = bench_fam.concave;
      if (bench->count("--p1")) m.instance.p1 = bench_fam.p1;
      m.alpha = bench_eng.alpha;
      m.iterations = bench_eng.iterations;
      m.interpolation = parse_interpolation(bench_eng.interp);
      if (bench->count("--runs") || bench->count("--seed") || preset.empty()) {
        m.seeds = seed_range(seed, runs);
      }
      return cmd_bench(m, timing, quiet, out);
    }
    if (*verify) {
      VerifyConfig vc;
      vc.points = verify_eng.points;
      vc.moves = verify_eng.moves;
      vc.alpha = verify_eng.alpha;
      vc.k_clusters = verify_eng.clusters;
      vc.iterations = verify_eng.iterations;
      std::vector<Problem> problems;
      if (!verify_path.empty()) {
        problems.push_back(load_problem(verify_path));
      } else {
        FamilyFlags f = verify_fam;
        f.graph = verify_graph;
        for (std::size_t i = 0; i < verify_runs; ++i) {
          problems.push_back(make_instance(f.spec(), seed + i));
        }
      }
      return cmd_verify(problems, vc);
    }
  } catch (const CapacityError& e) {
    std::cerr << "capacity exceeded: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    switch (e.category()) {
      case ErrorCategory::kArgument:
      case ErrorCategory::kValidation:
      case ErrorCategory::kDomain:
      case ErrorCategory::kStructure:
      case ErrorCategory::kUnsupported:
        return kExitInvalid;
      case ErrorCategory::kVerification:
        return kExitVerify;
      default:
        return kExitOther;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
