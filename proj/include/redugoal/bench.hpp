#pragma once

// Experiment driver: queries between task goals of a generated scene, planned
// under every (strategy, k, repetition) condition, plus CSV round-tripping and
// the summary statistics used by the report.

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "redugoal/io.hpp"
#include "redugoal/planner.hpp"
#include "redugoal/random.hpp"

namespace redugoal {

struct ExperimentSpec {
  SceneSpec scene;
  std::string chain = "ur5-elbow-limited";
  std::vector<int> k_values{1};
  std::vector<SelectionStrategy> strategies{SelectionStrategy::random};
  int queries = 50;
  int repetitions = 5;
  double budget_ms = 2000.0;
  std::uint64_t seed = 42;
  JointDynamics dynamics;  // empty means the UR5 defaults
  NeighborStructure neighbors = NeighborStructure::kdtree;
  double calibration = calibration_constant();
  int workers = 1;

  void validate() const {
    scene.validate();
    if (k_values.empty()) throw ArgumentError("k_values must not be empty");
    for (int k : k_values) {
      if (k < 1) throw ArgumentError("every k must be >= 1");
    }
    if (strategies.empty()) throw ArgumentError("at least one strategy is required");
    if (queries < 1) throw ArgumentError("queries must be >= 1");
    if (repetitions < 1) throw ArgumentError("repetitions must be >= 1");
    if (!(budget_ms > 0.0)) throw ArgumentError("budget must be > 0");
    if (!(calibration > 0.0)) throw ArgumentError("calibration must be > 0");
    if (workers < 1) throw ArgumentError("workers must be >= 1");
  }
};

struct ResultRow {
  int query_id = 0;
  int target_id = 0;
  SelectionStrategy strategy = SelectionStrategy::random;
  int k = 1;
  int repetition = 0;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  double length_rad = std::numeric_limits<double>::infinity();
  double exec_time_s = std::numeric_limits<double>::infinity();
  std::size_t goal_rank = 0;
  bool success = false;
  std::string trace_ref;
};

/// One start/target pair. The start is a collision-free arm pose for the
/// start task goal; `goals` is the full ranked goal set of the target.
struct Query {
  int query_id = 0;
  int start_task = 0;
  int target_id = 0;
  Configuration start;
  GoalSet goals;
};

struct RunRecord {
  ResultRow row;
  std::vector<TraceEntry> trace;
  Path path;
};

struct ExperimentResult {
  ExperimentSpec spec;
  KinematicChain chain;
  RobotGeometry robot;
  SceneBundle bundle;
  std::vector<Query> queries;
  std::vector<RunRecord> runs;  // canonical order
  double wall_ms = 0.0;
};

inline std::string trace_ref_for(int query_id, SelectionStrategy s, int k, int rep) {
  return "q" + std::to_string(query_id) + "-" + to_string(s) + "-k" + std::to_string(k) + "-r" + std::to_string(rep);
}

inline std::uint64_t run_seed(std::uint64_t base, int query_id, int target_id, SelectionStrategy s, int k, int rep) {
  return mix_seed({base, static_cast<std::uint64_t>(query_id), static_cast<std::uint64_t>(target_id),
                   static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(rep)});
}

/// Goal subsets are drawn from a stream separate from the planner's.
inline std::uint64_t selection_seed(std::uint64_t run) { return mix_seed({run, 0x5e1ec7ULL}); }

inline bool canonical_less(const ResultRow& a, const ResultRow& b) {
  return std::tie(a.query_id, a.strategy, a.k, a.repetition) < std::tie(b.query_id, b.strategy, b.k, b.repetition);
}

inline ConfigPredicate collision_free(const CollisionChecker& checker) {
  return [&checker](const Configuration& q) { return !checker.in_collision(q); };
}

/// Collision-free arm pose with the most obstacle clearance (first on ties).
inline std::optional<Configuration> roomiest_pose(const KinematicChain& chain, const TaskGoal& goal,
                                                  const CollisionChecker& checker, std::uint64_t roll_seed) {
  const auto poses = distinct_pose_solutions(chain, goal, roll_seed, collision_free(checker));
  std::optional<Configuration> best;
  double best_clearance = -std::numeric_limits<double>::infinity();
  for (const auto& q : poses) {
    const double c = checker.clearance(q);
    if (c > best_clearance) {
      best_clearance = c;
      best = q;
    }
  }
  return best;
}

/// Goal set a query plans against: every collision-free goal configuration.
inline GoalSet query_goal_set(const KinematicChain& chain, const TaskGoal& goal, const Configuration& start,
                              const CollisionChecker& checker, std::uint64_t roll_seed) {
  return compute_goal_configurations(chain, goal, start, roll_seed, collision_free(checker));
}

/// Ordered (start task, target task) pairs in a seeded order, cycling when
/// more queries than pairs are requested.
inline std::vector<Query> make_queries(const ExperimentSpec& spec, const SceneBundle& bundle,
                                       const KinematicChain& chain, const CollisionChecker& checker) {
  const int n = static_cast<int>(bundle.goals.size());
  if (n < 2) throw GenerationError("scene '" + bundle.scene.name + "' needs at least two task goals for queries");
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b) pairs.emplace_back(a, b);
    }
  }
  std::mt19937_64 rng(mix_seed({spec.seed, 0x9e37ULL}));
  std::shuffle(pairs.begin(), pairs.end(), rng);

  std::vector<std::optional<Configuration>> starts(n);
  std::vector<bool> have_start(n, false);
  std::vector<Query> out;
  for (int i = 0; i < spec.queries; ++i) {
    const auto [a, b] = pairs[static_cast<std::size_t>(i) % pairs.size()];
    if (!have_start[a]) {
      starts[a] = roomiest_pose(chain, bundle.goals[a], checker, spec.scene.seed);
      have_start[a] = true;
    }
    if (!starts[a]) throw GenerationError("task goal " + std::to_string(a) + " has no collision-free arm pose");
    Query q;
    q.query_id = i;
    q.start_task = a;
    q.target_id = b;
    q.start = *starts[a];
    q.goals = query_goal_set(chain, bundle.goals[b], q.start, checker, spec.scene.seed);
    if (q.goals.empty()) throw GenerationError("task goal " + std::to_string(b) + " has no collision-free goal");
    out.push_back(std::move(q));
  }
  return out;
}

inline PlannerConfig planner_config(const ExperimentSpec& spec, std::uint64_t seed) {
  PlannerConfig cfg;
  cfg.time_budget_ms = spec.budget_ms;
  cfg.seed = seed;
  cfg.calibration = spec.calibration;
  cfg.neighbors = spec.neighbors;
  cfg.dynamics = spec.dynamics;
  return cfg;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto wall_start = std::chrono::steady_clock::now();
  ExperimentResult res;
  res.spec = spec;
  res.chain = load_chain(spec.chain);
  res.robot = load_robot(spec.scene.robot);
  res.bundle = build_scene(spec.scene, res.chain, res.robot);
  const MultiGoalPlanner planner(res.bundle.scene, res.robot, res.chain);
  const CollisionChecker checker(res.bundle.scene, res.robot, res.chain);
  res.queries = make_queries(spec, res.bundle, res.chain, checker);

  struct Job {
    std::size_t query;
    SelectionStrategy strategy;
    int k;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t q = 0; q < res.queries.size(); ++q) {
    for (auto s : spec.strategies) {
      for (int k : spec.k_values) {
        for (int r = 0; r < spec.repetitions; ++r) jobs.push_back({q, s, k, r});
      }
    }
  }
  res.runs.resize(jobs.size());

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const auto& job = jobs[i];
        const auto& query = res.queries[job.query];
        RunRecord rec;
        auto& row = rec.row;
        row.query_id = query.query_id;
        row.target_id = query.target_id;
        row.strategy = job.strategy;
        row.k = job.k;
        row.repetition = job.rep;
        row.seed = run_seed(spec.seed, query.query_id, query.target_id, job.strategy, job.k, job.rep);
        row.trace_ref = trace_ref_for(query.query_id, job.strategy, job.k, job.rep);
        const GoalSet chosen = select_goals(query.goals, job.k, job.strategy, selection_seed(row.seed));
        const PlanResult r = planner.plan(query.start, chosen, planner_config(spec, row.seed));
        row.elapsed_ms = r.elapsed_ms;
        row.success = r.success;
        if (r.success) {
          row.length_rad = r.length;
          row.exec_time_s = r.exec_time;
          row.goal_rank = r.goal_rank;
        }
        rec.trace = r.trace;
        rec.path = r.path;
        res.runs[i] = std::move(rec);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(jobs.size());
      }
    }
  };
  const int n_workers = std::min<int>(spec.workers, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::sort(res.runs.begin(), res.runs.end(),
            [](const RunRecord& a, const RunRecord& b) { return canonical_less(a.row, b.row); });
  res.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall_start).count();
  return res;
}

inline std::vector<ResultRow> rows_of(const std::vector<RunRecord>& runs) {
  std::vector<ResultRow> rows;
  rows.reserve(runs.size());
  for (const auto& r : runs) rows.push_back(r.row);
  return rows;
}

// ---- CSV ----------------------------------------------------------------

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ArgumentError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ArgumentError("not a number: '" + s + "'");
  return v;
}

inline constexpr const char* kResultHeader =
    "query_id,target_id,strategy,k,repetition,seed,elapsed_ms,length_rad,exec_time_s,goal_rank,success,trace_ref";

inline std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::string out = std::string(kResultHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.query_id) + "," + std::to_string(r.target_id) + "," + to_string(r.strategy) + "," +
           std::to_string(r.k) + "," + std::to_string(r.repetition) + "," + std::to_string(r.seed) + "," +
           format_double(r.elapsed_ms) + "," + format_double(r.length_rad) + "," + format_double(r.exec_time_s) + "," +
           std::to_string(r.goal_rank) + "," + (r.success ? "1" : "0") + "," + r.trace_ref + "\n";
  }
  return out;
}

inline std::vector<ResultRow> rows_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultHeader) throw ArgumentError("results CSV has an unexpected header");
  std::vector<ResultRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 12) throw ArgumentError("results CSV line " + std::to_string(line_no) + " has wrong column count");
    ResultRow r;
    r.query_id = std::stoi(c[0]);
    r.target_id = std::stoi(c[1]);
    r.strategy = parse_strategy(c[2]);
    r.k = std::stoi(c[3]);
    r.repetition = std::stoi(c[4]);
    r.seed = std::stoull(c[5]);
    r.elapsed_ms = parse_double(c[6]);
    r.length_rad = parse_double(c[7]);
    r.exec_time_s = parse_double(c[8]);
    r.goal_rank = std::stoull(c[9]);
    r.success = c[10] == "1";
    r.trace_ref = c[11];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline constexpr const char* kTraceHeader = "trace_ref,elapsed_ms,length_rad,goal_rank,exec_time_s";

inline std::string traces_to_csv(const std::vector<RunRecord>& runs) {
  std::string out = std::string(kTraceHeader) + "\n";
  for (const auto& run : runs) {
    for (const auto& t : run.trace) {
      out += run.row.trace_ref + "," + format_double(t.elapsed_ms) + "," + format_double(t.length) + "," +
             std::to_string(t.goal_rank) + "," + format_double(t.exec_time) + "\n";
    }
  }
  return out;
}

using TraceTable = std::map<std::string, std::vector<TraceEntry>>;

inline TraceTable traces_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ArgumentError("trace CSV has an unexpected header");
  TraceTable out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 5) throw ArgumentError("trace CSV line has wrong column count");
    out[c[0]].push_back({parse_double(c[1]), parse_double(c[2]), std::stoull(c[3]), parse_double(c[4])});
  }
  return out;
}

inline std::string paths_to_csv(const std::vector<RunRecord>& runs) {
  std::string out = "trace_ref,waypoint,angles\n";
  for (const auto& run : runs) {
    for (std::size_t w = 0; w < run.path.waypoints.size(); ++w) {
      out += run.row.trace_ref + "," + std::to_string(w) + ",";
      const auto& q = run.path.waypoints[w];
      for (std::size_t j = 0; j < q.size(); ++j) out += (j ? " " : "") + format_double(q[j]);
      out += "\n";
    }
  }
  return out;
}

struct ExperimentFiles {
  std::filesystem::path results, traces, paths, meta;
};

inline ExperimentFiles experiment_files(const std::filesystem::path& results_csv) {
  auto stem = results_csv;
  stem.replace_extension();
  return {results_csv, stem.string() + ".trace.csv", stem.string() + ".paths.csv", stem.string() + ".meta.json"};
}

inline json experiment_spec_to_json(const ExperimentSpec& s) {
  json strategies = json::array();
  for (auto st : s.strategies) strategies.push_back(to_string(st));
  json j{{"scene", scene_spec_to_json(s.scene)},
         {"chain", s.chain},
         {"k_values", s.k_values},
         {"strategies", strategies},
         {"queries", s.queries},
         {"repetitions", s.repetitions},
         {"budget_ms", s.budget_ms},
         {"seed", s.seed},
         {"neighbors", to_string(s.neighbors)},
         {"calibration", s.calibration}};
  if (!s.dynamics.v_max.empty()) j["dynamics"] = dynamics_to_json(s.dynamics);
  return j;
}

inline void write_experiment(const ExperimentResult& res, const std::filesystem::path& results_csv) {
  const auto files = experiment_files(results_csv);
  write_text_file(files.results, rows_to_csv(rows_of(res.runs)));
  write_text_file(files.traces, traces_to_csv(res.runs));
  write_text_file(files.paths, paths_to_csv(res.runs));
  const json meta{{"spec", experiment_spec_to_json(res.spec)},
                  {"scene", res.bundle.scene.name},
                  {"task_goals", res.bundle.goals.size()},
                  {"iterations_per_run", planner_config(res.spec, 0).iteration_budget()},
                  {"runs", res.runs.size()},
                  {"wall_ms", res.wall_ms}};
  write_text_file(files.meta, meta.dump(2) + "\n");
}

// ---- statistics ------------------------------------------------------------

struct MeanCi {
  std::size_t n = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> half_width;  // absent when n < 2
};

/// Student-t interval over `values`.
inline MeanCi mean_ci(const std::vector<double>& values, double level = 0.95) {
  MeanCi out;
  out.n = values.size();
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(out.n - 1));
  const boost::math::students_t dist(static_cast<double>(out.n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, (1.0 - level) / 2.0));
  out.half_width = t * sd / std::sqrt(static_cast<double>(out.n));
  return out;
}

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // one-sided, H1: mean(a) < mean(b)
};

inline WelchResult welch_less(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw ArgumentError("Welch test needs at least two samples per group");
  auto moments = [](const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m += v;
    m /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::pair{m, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double sa = va / static_cast<double>(a.size());
  const double sb = vb / static_cast<double>(b.size());
  WelchResult r;
  if (sa + sb == 0.0) {
    r.t = ma < mb ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    r.df = static_cast<double>(a.size() + b.size() - 2);
    r.p = ma < mb ? 0.0 : 1.0;
    return r;
  }
  r.t = (ma - mb) / std::sqrt(sa + sb);
  r.df = (sa + sb) * (sa + sb) /
         (sa * sa / static_cast<double>(a.size() - 1) + sb * sb / static_cast<double>(b.size() - 1));
  const boost::math::students_t dist(r.df);
  r.p = boost::math::cdf(dist, r.t);
  return r;
}

enum class Metric { length, exec_time };

inline double metric_of(const ResultRow& r, Metric m) { return m == Metric::length ? r.length_rad : r.exec_time_s; }

/// Per-query mean over successful repetitions of one condition, by query id.
inline std::map<int, double> per_query_means(const std::vector<ResultRow>& rows, SelectionStrategy s, int k,
                                             Metric m) {
  std::map<int, std::pair<double, int>> acc;
  for (const auto& r : rows) {
    if (r.strategy != s || r.k != k || !r.success) continue;
    auto& [sum, n] = acc[r.query_id];
    sum += metric_of(r, m);
    ++n;
  }
  std::map<int, double> out;
  for (const auto& [q, v] : acc) out[q] = v.first / v.second;
  return out;
}

inline std::vector<double> values_of(const std::map<int, double>& m) {
  std::vector<double> v;
  for (const auto& [_, x] : m) v.push_back(x);
  return v;
}

struct SummaryRow {
  SelectionStrategy strategy = SelectionStrategy::random;
  int k = 1;
  std::size_t runs = 0;
  std::size_t successes = 0;
  MeanCi length;
  MeanCi exec_time;
  std::optional<double> length_improvement_pct;  // vs k = 1 of the same strategy
  std::optional<double> exec_improvement_pct;
};

inline std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw ArgumentError("cannot summarize an empty result set");
  std::map<std::pair<SelectionStrategy, int>, SummaryRow> cells;
  for (const auto& r : rows) {
    auto& c = cells[{r.strategy, r.k}];
    c.strategy = r.strategy;
    c.k = r.k;
    ++c.runs;
    if (r.success) ++c.successes;
  }
  for (auto& [key, c] : cells) {
    c.length = mean_ci(values_of(per_query_means(rows, key.first, key.second, Metric::length)));
    c.exec_time = mean_ci(values_of(per_query_means(rows, key.first, key.second, Metric::exec_time)));
  }
  for (auto& [key, c] : cells) {
    const auto base = cells.find({key.first, 1});
    if (base == cells.end()) continue;
    const auto& b = base->second;
    if (c.length.n > 0 && b.length.n > 0) c.length_improvement_pct = 100.0 * (1.0 - c.length.mean / b.length.mean);
    if (c.exec_time.n > 0 && b.exec_time.n > 0) {
      c.exec_improvement_pct = 100.0 * (1.0 - c.exec_time.mean / b.exec_time.mean);
    }
  }
  std::vector<SummaryRow> out;
  for (auto& [_, c] : cells) out.push_back(c);
  return out;
}

inline std::string summary_to_csv(const std::vector<SummaryRow>& summary) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("N/A"); };
  auto mean = [](const MeanCi& m) { return m.n > 0 ? format_double(m.mean) : std::string("N/A"); };
  std::string out =
      "strategy,k,runs,successes,queries,length_mean,length_ci95,exec_time_mean,exec_time_ci95,"
      "length_improvement_pct,exec_time_improvement_pct\n";
  for (const auto& s : summary) {
    out += to_string(s.strategy) + "," + std::to_string(s.k) + "," + std::to_string(s.runs) + "," +
           std::to_string(s.successes) + "," + std::to_string(s.length.n) + "," + mean(s.length) + "," +
           opt(s.length.half_width) + "," + mean(s.exec_time) + "," + opt(s.exec_time.half_width) + "," +
           opt(s.length_improvement_pct) + "," + opt(s.exec_improvement_pct) + "\n";
  }
  return out;
}

// ---- time series -------------------------------------------------------------

/// Incumbent trace entry at nominal time t (the last entry at or before t).
inline const TraceEntry* incumbent_at(const std::vector<TraceEntry>& trace, double t) {
  const TraceEntry* best = nullptr;
  for (const auto& e : trace) {
    if (e.elapsed_ms <= t) best = &e;
    else break;
  }
  return best;
}

inline std::vector<double> time_grid(double budget_ms, int buckets) {
  if (buckets < 1) throw ArgumentError("need at least one time bucket");
  std::vector<double> out;
  for (int i = 1; i <= buckets; ++i) out.push_back(budget_ms * i / buckets);
  return out;
}

struct CostPoint {
  double t_ms = 0.0;
  MeanCi length;
  MeanCi exec_time;
};

struct CostSeries {
  SelectionStrategy strategy = SelectionStrategy::random;
  int k = 1;
  std::vector<CostPoint> points;
};

/// Mean incumbent cost over time, averaged per query first (runs without a
/// solution yet are left out of that query's mean).
inline std::vector<CostSeries> cost_over_time(const std::vector<ResultRow>& rows, const TraceTable& traces,
                                              const std::vector<double>& times) {
  std::map<std::pair<SelectionStrategy, int>, CostSeries> cells;
  for (const auto& r : rows) cells[{r.strategy, r.k}] = CostSeries{r.strategy, r.k, {}};
  for (auto& [key, series] : cells) {
    for (double t : times) {
      std::map<int, std::tuple<double, double, int>> acc;
      for (const auto& r : rows) {
        if (r.strategy != key.first || r.k != key.second) continue;
        const auto it = traces.find(r.trace_ref);
        if (it == traces.end()) continue;
        const auto* e = incumbent_at(it->second, t);
        if (!e) continue;
        auto& [len, ex, n] = acc[r.query_id];
        len += e->length;
        ex += e->exec_time;
        ++n;
      }
      std::vector<double> lens, execs;
      for (const auto& [_, v] : acc) {
        lens.push_back(std::get<0>(v) / std::get<2>(v));
        execs.push_back(std::get<1>(v) / std::get<2>(v));
      }
      series.points.push_back({t, mean_ci(lens), mean_ci(execs)});
    }
  }
  std::vector<CostSeries> out;
  for (auto& [_, s] : cells) out.push_back(std::move(s));
  return out;
}

struct RankBucket {
  double end_ms = 0.0;
  std::map<std::size_t, std::size_t> counts;  // incumbent rank -> runs
  std::size_t total = 0;
};

struct RankTable {
  SelectionStrategy strategy = SelectionStrategy::random;
  int k = 1;
  std::vector<RankBucket> buckets;
};

/// Incumbent goal rank at each bucket end. Runs contribute only to buckets
/// ending within the budget; later buckets stay empty but are still listed.
inline std::vector<RankTable> rank_histogram(const std::vector<ResultRow>& rows, const TraceTable& traces,
                                             const std::vector<double>& bucket_ends, double budget_ms) {
  std::map<std::pair<SelectionStrategy, int>, RankTable> cells;
  for (const auto& r : rows) cells[{r.strategy, r.k}] = RankTable{r.strategy, r.k, {}};
  for (auto& [key, table] : cells) {
    for (double t : bucket_ends) {
      RankBucket b;
      b.end_ms = t;
      if (t <= budget_ms) {
        for (const auto& r : rows) {
          if (r.strategy != key.first || r.k != key.second) continue;
          const auto it = traces.find(r.trace_ref);
          if (it == traces.end()) continue;
          if (const auto* e = incumbent_at(it->second, t)) {
            ++b.counts[e->goal_rank];
            ++b.total;
          }
        }
      }
      table.buckets.push_back(std::move(b));
    }
  }
  std::vector<RankTable> out;
  for (auto& [_, t] : cells) out.push_back(std::move(t));
  return out;
}

inline std::string rank_tables_to_csv(const std::vector<RankTable>& tables) {
  std::string out = "strategy,k,bucket_end_ms,goal_rank,count\n";
  for (const auto& t : tables) {
    for (const auto& b : t.buckets) {
      const std::string head = to_string(t.strategy) + "," + std::to_string(t.k) + "," + format_double(b.end_ms) + ",";
      if (b.counts.empty()) out += head + ",0\n";
      for (const auto& [rank, n] : b.counts) out += head + std::to_string(rank) + "," + std::to_string(n) + "\n";
    }
  }
  return out;
}

// ---- verification ------------------------------------------------------------

/// Rank of a run's final waypoint in a goal set rebuilt from scratch
/// (query goal set, then the same seeded selection). Zero if not a member.
inline std::size_t recompute_rank(const ExperimentResult& res, const RunRecord& run) {
  const auto& query = res.queries.at(static_cast<std::size_t>(run.row.query_id));
  const CollisionChecker checker(res.bundle.scene, res.robot, res.chain);
  const GoalSet full = query_goal_set(res.chain, res.bundle.goals.at(static_cast<std::size_t>(query.target_id)),
                                      query.start, checker, res.spec.scene.seed);
  const GoalSet chosen = select_goals(full, run.row.k, run.row.strategy, selection_seed(run.row.seed));
  if (run.path.waypoints.empty()) return 0;
  return chosen.rank_of(run.path.waypoints.back()).value_or(0);
}

}  // namespace redugoal
