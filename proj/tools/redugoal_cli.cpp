// Command-line front end: benchmark runs and reports, single plans, goal sets
// and scene export.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "redugoal/bench.hpp"
#include "redugoal/plots.hpp"

namespace fs = std::filesystem;
using namespace redugoal;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ArgumentError("not an integer: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

std::string fmt(double v, int digits = 4) {
  if (!std::isfinite(v)) return "N/A";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_ci(const MeanCi& m) {
  if (m.n == 0) return "N/A";
  return fmt(m.mean) + " +- " + (m.half_width ? fmt(*m.half_width) : std::string("N/A"));
}

void print_summary(const std::vector<SummaryRow>& summary, std::ostream& out) {
  out << "strategy  k    ok/runs   length [rad]          exec time [s]         d_len%   d_exec%\n";
  for (const auto& s : summary) {
    char head[64];
    std::snprintf(head, sizeof head, "%-8s %3d  %4zu/%-4zu", to_string(s.strategy).c_str(), s.k, s.successes, s.runs);
    out << head << "  " << fmt_ci(s.length) << "   " << fmt_ci(s.exec_time) << "   "
        << (s.length_improvement_pct ? fmt(*s.length_improvement_pct, 1) : "N/A") << "   "
        << (s.exec_improvement_pct ? fmt(*s.exec_improvement_pct, 1) : "N/A") << "\n";
  }
}

/// One-sided Welch tests of every k against k = 1 of the same strategy, over
/// per-query means of queries solved under both conditions.
std::string welch_table(const std::vector<ResultRow>& rows) {
  std::map<SelectionStrategy, std::set<int>> ks;
  for (const auto& r : rows) ks[r.strategy].insert(r.k);
  std::string out = "strategy,k,metric,common_queries,mean_k1,mean_k,t,df,p_one_sided\n";
  for (const auto& [st, set] : ks) {
    if (!set.count(1)) continue;
    for (int k : set) {
      if (k == 1) continue;
      for (const Metric m : {Metric::length, Metric::exec_time}) {
        const auto base = per_query_means(rows, st, 1, m);
        const auto cand = per_query_means(rows, st, k, m);
        std::vector<double> a, b;
        for (const auto& [q, v] : cand) {
          if (const auto it = base.find(q); it != base.end()) {
            a.push_back(v);
            b.push_back(it->second);
          }
        }
        out += to_string(st) + "," + std::to_string(k) + "," + (m == Metric::length ? "length" : "exec_time") + "," +
               std::to_string(a.size()) + ",";
        if (a.size() < 2) {
          out += "N/A,N/A,N/A,N/A,N/A\n";
          continue;
        }
        const auto w = welch_less(a, b);
        out += format_double(mean_ci(b).mean) + "," + format_double(mean_ci(a).mean) + "," + format_double(w.t) + "," +
               format_double(w.df) + "," + format_double(w.p) + "\n";
      }
    }
  }
  return out;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TaskGoal parse_task_goal(const std::string& text, const SceneBundle* bundle) {
  if (bundle && !text.empty() && std::all_of(text.begin(), text.end(), ::isdigit)) {
    const auto i = std::stoul(text);
    if (i >= bundle->goals.size()) throw ArgumentError("scene has no task goal " + text);
    return bundle->goals[i];
  }
  if (fs::exists(text)) return task_goal_from_json(read_json_file(text));
  return task_goal_from_json(json::parse(text));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-goal motion planning with equivalent configurations"};
  app.require_subcommand(1);

  // bench run / bench report
  auto* bench = app.add_subcommand("bench", "Benchmark experiments");
  bench->require_subcommand(1);

  auto* run = bench->add_subcommand("run", "Run an experiment and write results CSV plus traces");
  std::string scene_path = (data_dir() / "scenes" / "cubicles-3x3.json").string();
  std::string chain_name = "ur5-elbow-limited";
  std::string k_text = "1,16";
  std::string strategy_text = "random";
  std::string neighbors = "kdtree";
  std::string dynamics_path = (data_dir() / "dynamics" / "ur5.json").string();
  std::string out_path = "results.csv";
  int queries = 50, reps = 5, workers = 1;
  double budget_ms = 2000.0, calibration = calibration_constant();
  std::uint64_t seed = 42;
  run->add_option("--scene", scene_path, "Scene spec JSON")->check(CLI::ExistingFile)->capture_default_str();
  run->add_option("--chain", chain_name, "Chain preset name or JSON file")->capture_default_str();
  run->add_option("--k", k_text, "Comma-separated goal counts")->capture_default_str();
  run->add_option("--strategy", strategy_text, "Comma-separated subset of random,closest")->capture_default_str();
  run->add_option("--queries", queries, "Number of start/target queries")->capture_default_str();
  run->add_option("--reps", reps, "Repetitions per query and condition")->capture_default_str();
  run->add_option("--budget-ms", budget_ms, "Nominal planning budget per run")->capture_default_str();
  run->add_option("--seed", seed, "Base seed")->capture_default_str();
  run->add_option("--workers", workers, "Parallel planning threads")->capture_default_str();
  run->add_option("--neighbors", neighbors, "Nearest-neighbour structure: linear or kdtree")->capture_default_str();
  run->add_option("--calibration", calibration, "Planner iterations per nominal millisecond")->capture_default_str();
  run->add_option("--dynamics", dynamics_path, "Joint dynamics JSON")->capture_default_str();
  run->add_option("--out", out_path, "Results CSV path")->capture_default_str();

  auto* report = bench->add_subcommand("report", "Summaries, rank tables and SVG plots from a results CSV");
  std::string in_path, out_dir = "figs";
  int buckets = 20;
  report->add_option("--in", in_path, "Results CSV written by bench run")->required()->check(CLI::ExistingFile);
  report->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  report->add_option("--buckets", buckets, "Time buckets over the budget")->capture_default_str();

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "Plan one query");
  std::string plan_scene, start_text, goal_text, plan_out = "plan.json", plan_strategy = "random";
  std::string plan_chain = "ur5-elbow-limited";
  int plan_k = 0;
  double plan_budget = 2000.0, plan_cal = calibration_constant();
  std::uint64_t plan_seed = 1;
  plan_cmd->add_option("--scene", plan_scene, "Scene spec JSON")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--chain", plan_chain, "Chain preset name or JSON file")->capture_default_str();
  plan_cmd->add_option("--start", start_text, "Start configuration: a,b,c or JSON array or file")->required();
  plan_cmd->add_option("--goal", goal_text, "Task goal: scene goal index, JSON text or JSON file")->required();
  plan_cmd->add_option("--k", plan_k, "Use only k goal configurations (0 = all)")->capture_default_str();
  plan_cmd->add_option("--strategy", plan_strategy, "Goal selection when k > 0")->capture_default_str();
  plan_cmd->add_option("--budget-ms", plan_budget, "Nominal planning budget")->capture_default_str();
  plan_cmd->add_option("--calibration", plan_cal, "Planner iterations per nominal millisecond")->capture_default_str();
  plan_cmd->add_option("--seed", plan_seed, "Planner seed")->capture_default_str();
  plan_cmd->add_option("--out", plan_out, "Plan result JSON")->capture_default_str();

  // goalset
  auto* gs_cmd = app.add_subcommand("goalset", "Print the ranked goal set of a task goal");
  std::string gs_chain = "ur5-elbow-limited", gs_goal, gs_start, gs_scene;
  gs_cmd->add_option("--chain", gs_chain, "Chain preset name or JSON file")->capture_default_str();
  gs_cmd->add_option("--goal", gs_goal, "Task goal: JSON text, JSON file, or scene goal index with --scene")->required();
  gs_cmd->add_option("--start", gs_start, "Start configuration")->required();
  gs_cmd->add_option("--scene", gs_scene, "Scene spec; keeps only collision-free goals")->check(CLI::ExistingFile);

  // scene
  auto* scene_cmd = app.add_subcommand("scene", "Generate a scene and write it as a scene file");
  std::string sc_spec, sc_chain = "ur5-elbow-limited", sc_out = "scene.json";
  scene_cmd->add_option("--spec", sc_spec, "Scene spec JSON")->required()->check(CLI::ExistingFile);
  scene_cmd->add_option("--chain", sc_chain, "Chain preset name or JSON file")->capture_default_str();
  scene_cmd->add_option("--out", sc_out, "Scene JSON path")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec;
      spec.scene = load_scene_spec(scene_path);
      spec.chain = chain_name;
      spec.k_values = parse_ints(k_text);
      spec.strategies.clear();
      for (const auto& s : split(strategy_text, ',')) spec.strategies.push_back(parse_strategy(s));
      spec.queries = queries;
      spec.repetitions = reps;
      spec.budget_ms = budget_ms;
      spec.seed = seed;
      spec.workers = workers;
      spec.neighbors = parse_neighbor_structure(neighbors);
      spec.calibration = calibration;
      spec.dynamics = dynamics_from_json(read_json_file(dynamics_path));
      const auto res = run_experiment(spec);
      write_experiment(res, out_path);
      print_summary(summarize(rows_of(res.runs)), std::cout);
      std::cout << res.runs.size() << " runs in " << fmt(res.wall_ms / 1000.0, 1) << " s -> " << out_path << "\n";
    } else if (report->parsed()) {
      const auto files = experiment_files(in_path);
      const auto rows = rows_from_csv(read_text(files.results));
      const auto traces = traces_from_csv(read_text(files.traces));
      double budget = 0.0;
      if (fs::exists(files.meta)) budget = read_json_file(files.meta).at("spec").at("budget_ms").get<double>();
      if (!(budget > 0.0)) {
        for (const auto& [_, t] : traces) budget = std::max(budget, t.empty() ? 0.0 : t.back().elapsed_ms);
      }
      const auto summary = summarize(rows);
      const auto grid = time_grid(budget, buckets);
      const auto costs = cost_over_time(rows, traces, grid);
      const auto ranks = rank_histogram(rows, traces, grid, budget);
      fs::create_directories(out_dir);
      write_text_file(fs::path(out_dir) / "summary.csv", summary_to_csv(summary));
      write_text_file(fs::path(out_dir) / "rank_histogram.csv", rank_tables_to_csv(ranks));
      std::string cost_csv = "strategy,k,t_ms,queries,length_mean,length_ci95,exec_time_mean,exec_time_ci95\n";
      for (const auto& c : costs) {
        for (const auto& p : c.points) {
          auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("N/A"); };
          cost_csv += to_string(c.strategy) + "," + std::to_string(c.k) + "," + format_double(p.t_ms) + "," +
                      std::to_string(p.length.n) + "," + (p.length.n ? format_double(p.length.mean) : "N/A") + "," +
                      opt(p.length.half_width) + "," + (p.exec_time.n ? format_double(p.exec_time.mean) : "N/A") + "," +
                      opt(p.exec_time.half_width) + "\n";
        }
      }
      write_text_file(fs::path(out_dir) / "cost_over_time.csv", cost_csv);
      const auto welch = welch_table(rows);
      write_text_file(fs::path(out_dir) / "welch.csv", welch);
      const auto svgs = emit_plots(costs, ranks, out_dir);
      print_summary(summary, std::cout);
      std::cout << welch;
      std::cout << "wrote " << svgs.size() + 4 << " files to " << out_dir << "\n";
    } else if (plan_cmd->parsed()) {
      const auto spec = load_scene_spec(plan_scene);
      const auto chain = load_chain(plan_chain);
      const auto robot = load_robot(spec.robot);
      const auto bundle = build_scene(spec, chain, robot);
      const CollisionChecker checker(bundle.scene, robot, chain);
      const auto start = parse_configuration(start_text);
      const auto goal = parse_task_goal(goal_text, &bundle);
      GoalSet goals = query_goal_set(chain, goal, start, checker, spec.seed);
      if (goals.empty()) throw GenerationError("task goal has no collision-free goal configuration");
      if (plan_k > 0) goals = select_goals(goals, plan_k, parse_strategy(plan_strategy), selection_seed(plan_seed));
      PlannerConfig cfg;
      cfg.time_budget_ms = plan_budget;
      cfg.calibration = plan_cal;
      cfg.seed = plan_seed;
      const auto r = plan(bundle.scene, robot, chain, start, goals, cfg);
      write_text_file(plan_out, plan_result_to_json(r).dump(2) + "\n");
      std::cout << (r.success ? "solved" : "no solution") << ": length " << fmt(r.length) << " rad, exec "
                << fmt(r.exec_time) << " s, goal rank " << r.goal_rank << " of " << goals.size() << " -> " << plan_out
                << "\n";
      return r.success ? 0 : 2;
    } else if (gs_cmd->parsed()) {
      const auto chain = load_chain(gs_chain);
      const auto start = parse_configuration(gs_start);
      GoalSet set;
      if (!gs_scene.empty()) {
        const auto spec = load_scene_spec(gs_scene);
        const auto robot = load_robot(spec.robot);
        const auto bundle = build_scene(spec, chain, robot);
        const CollisionChecker checker(bundle.scene, robot, chain);
        set = query_goal_set(chain, parse_task_goal(gs_goal, &bundle), start, checker, spec.seed);
      } else {
        set = compute_goal_configurations(chain, parse_task_goal(gs_goal, nullptr), start);
      }
      std::cout << goal_set_to_json(set).dump(2) << "\n";
    } else if (scene_cmd->parsed()) {
      const auto spec = load_scene_spec(sc_spec);
      const auto chain = load_chain(sc_chain);
      const auto bundle = build_scene(spec, chain, load_robot(spec.robot));
      write_text_file(sc_out, scene_to_json(bundle, spec.robot).dump(2) + "\n");
      std::cout << bundle.scene.obstacles.size() << " obstacles, " << bundle.goals.size() << " task goals -> " << sc_out
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
