#include <gtest/gtest.h>

#include <filesystem>

#include "redugoal/bench.hpp"
#include "redugoal/plots.hpp"

using namespace redugoal;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.queries = 2;
  s.k_values = {1, 5};
  s.strategies = {SelectionStrategy::random};
  s.repetitions = 3;
  s.budget_ms = 150.0;
  s.calibration = 8.0;
  return s;
}

ResultRow row(int query, int k, double length, bool success = true, int rep = 0) {
  ResultRow r;
  r.query_id = query;
  r.k = k;
  r.repetition = rep;
  r.success = success;
  r.length_rad = success ? length : std::numeric_limits<double>::infinity();
  r.exec_time_s = success ? 2.0 * length : std::numeric_limits<double>::infinity();
  r.goal_rank = success ? 1 : 0;
  r.trace_ref = trace_ref_for(query, r.strategy, k, rep);
  return r;
}

const ExperimentResult& shared_result() {
  static const ExperimentResult res = run_experiment(small_spec());
  return res;
}

}  // namespace

TEST(RunExperiment, RowCountAndCanonicalOrder) {
  const auto& res = shared_result();
  ASSERT_EQ(res.runs.size(), 12u);
  for (std::size_t i = 1; i < res.runs.size(); ++i) EXPECT_TRUE(canonical_less(res.runs[i - 1].row, res.runs[i].row));
  for (const auto& run : res.runs) {
    EXPECT_EQ(run.row.seed, run_seed(42, run.row.query_id, run.row.target_id, run.row.strategy, run.row.k,
                                     run.row.repetition));
    if (run.row.success) {
      EXPECT_NEAR(run.row.length_rad, path_length(run.path), 1e-9);
      EXPECT_EQ(recompute_rank(res, run), run.row.goal_rank);
    }
  }
}

TEST(RunExperiment, IdenticalSpecGivesIdenticalCsv) {
  auto spec = small_spec();
  spec.workers = 2;
  const auto again = run_experiment(spec);
  EXPECT_EQ(rows_to_csv(rows_of(again.runs)), rows_to_csv(rows_of(shared_result().runs)));
  EXPECT_EQ(traces_to_csv(again.runs), traces_to_csv(shared_result().runs));
}

TEST(RunExperiment, RowReproducibleFromStoredSeed) {
  const auto& res = shared_result();
  const auto& run = res.runs.back();
  const auto& query = res.queries.at(static_cast<std::size_t>(run.row.query_id));
  const auto chosen = select_goals(query.goals, run.row.k, run.row.strategy, selection_seed(run.row.seed));
  const auto r = plan(res.bundle.scene, res.robot, res.chain, query.start, chosen, planner_config(res.spec, run.row.seed));
  EXPECT_EQ(r.success, run.row.success);
  if (r.success) {
    EXPECT_EQ(r.length, run.row.length_rad);
  }
}

TEST(RunExperiment, InvalidSpecRejected) {
  auto s = small_spec();
  s.k_values = {};
  EXPECT_THROW(run_experiment(s), ArgumentError);
  s = small_spec();
  s.k_values = {0};
  EXPECT_THROW(run_experiment(s), ArgumentError);
  s = small_spec();
  s.queries = 0;
  EXPECT_THROW(run_experiment(s), ArgumentError);
}

TEST(ResultCsv, RoundTrip) {
  const auto rows = rows_of(shared_result().runs);
  const auto text = rows_to_csv(rows);
  EXPECT_EQ(text.rfind(kResultHeader, 0), 0u);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(rows_to_csv(rows_from_csv(text)), text);
  EXPECT_THROW(rows_from_csv("bad,header\n"), ArgumentError);
  const auto traces = traces_from_csv(traces_to_csv(shared_result().runs));
  for (const auto& run : shared_result().runs) {
    if (!run.row.success) continue;
    ASSERT_TRUE(traces.count(run.row.trace_ref));
    EXPECT_EQ(traces.at(run.row.trace_ref).back().length, run.row.length_rad);
  }
}

TEST(ResultCsv, WritesCompanionFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "redugoal-test-bench";
  std::filesystem::remove_all(dir);
  write_experiment(shared_result(), dir / "results.csv");
  const auto files = experiment_files(dir / "results.csv");
  for (const auto& p : {files.results, files.traces, files.paths, files.meta}) EXPECT_TRUE(std::filesystem::exists(p));
  const auto meta = read_json_file(files.meta);
  EXPECT_EQ(meta["spec"]["calibration"].get<double>(), 8.0);
}

TEST(Summarize, HandComputedInterval) {
  std::vector<ResultRow> rows;
  const double v[] = {2.0, 4.0, 4.0, 5.0, 7.5};
  for (int q = 0; q < 5; ++q) rows.push_back(row(q, 1, v[q]));
  const auto s = summarize(rows);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_NEAR(s[0].length.mean, 4.5, 1e-12);
  ASSERT_TRUE(s[0].length.half_width.has_value());
  EXPECT_NEAR(*s[0].length.half_width, 2.483327996407533, 1e-9);
  EXPECT_NEAR(*s[0].exec_time.half_width, 2.0 * 2.483327996407533, 1e-9);
  EXPECT_EQ(*s[0].length_improvement_pct, 0.0);
}

TEST(Summarize, PerQueryMeansFirst) {
  std::vector<ResultRow> rows{row(0, 1, 1.0, true, 0), row(0, 1, 3.0, true, 1), row(1, 1, 4.0, true, 0)};
  const auto s = summarize(rows);
  EXPECT_EQ(s[0].length.n, 2u);
  EXPECT_NEAR(s[0].length.mean, 3.0, 1e-12);
}

TEST(Summarize, DegenerateCells) {
  auto s = summarize({row(0, 1, 2.0)});
  EXPECT_FALSE(s[0].length.half_width.has_value());
  s = summarize({row(0, 1, 2.0), row(1, 1, 2.0), row(2, 1, 2.0)});
  EXPECT_EQ(*s[0].length.half_width, 0.0);
  s = summarize({row(0, 1, 2.0), row(1, 1, 3.0), row(0, 8, 0.0, false), row(1, 8, 0.0, false)});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].length.n, 0u);
  EXPECT_FALSE(s[1].length_improvement_pct.has_value());
  const auto csv = summary_to_csv(s);
  EXPECT_NE(csv.find("random,8,2,0,0,N/A,N/A,N/A,N/A,N/A,N/A"), std::string::npos);
  EXPECT_THROW(summarize({}), ArgumentError);
}

TEST(Summarize, ImprovementAgainstKOne) {
  const auto s = summarize({row(0, 1, 4.0), row(1, 1, 6.0), row(0, 16, 2.0), row(1, 16, 3.0)});
  EXPECT_NEAR(*s[1].length_improvement_pct, 50.0, 1e-12);
}

TEST(Welch, MatchesReferenceValue) {
  const auto r = welch_less({1, 2, 3, 4, 5.5}, {3, 4, 5, 6, 7, 9});
  EXPECT_NEAR(r.t, -2.1787605646510273, 1e-12);
  EXPECT_NEAR(r.p, 0.028646456134974387, 1e-9);
  EXPECT_GT(welch_less({3, 4, 5, 6, 7, 9}, {1, 2, 3, 4, 5.5}).p, 0.95);
  EXPECT_THROW(welch_less({1}, {1, 2}), ArgumentError);
}

TEST(RankHistogram, AllRankOneAndEmptyTail) {
  std::vector<ResultRow> rows{row(0, 4, 1.0), row(1, 4, 1.0)};
  TraceTable traces;
  traces[rows[0].trace_ref] = {{10.0, 2.0, 1, 1.0}, {50.0, 1.0, 1, 0.5}};
  traces[rows[1].trace_ref] = {{30.0, 1.0, 1, 0.5}};
  const auto tables = rank_histogram(rows, traces, {25.0, 100.0, 150.0}, 100.0);
  ASSERT_EQ(tables.size(), 1u);
  const auto& b = tables[0].buckets;
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].total, 1u);
  EXPECT_EQ(b[1].total, 2u);
  EXPECT_EQ(b[1].counts.size(), 1u);
  EXPECT_EQ(b[1].counts.at(1), 2u);
  EXPECT_EQ(b[2].total, 0u);
  EXPECT_NE(rank_tables_to_csv(tables).find("random,4,150,,0"), std::string::npos);
}

TEST(RankHistogram, RecomputedRanksMatchInputs) {
  const auto& res = shared_result();
  const auto traces = traces_from_csv(traces_to_csv(res.runs));
  const auto rows = rows_of(res.runs);
  const auto tables = rank_histogram(rows, traces, {res.spec.budget_ms}, res.spec.budget_ms);
  std::map<std::pair<int, std::size_t>, std::size_t> recomputed;
  for (const auto& run : res.runs) {
    if (run.row.success) ++recomputed[{run.row.k, recompute_rank(res, run)}];
  }
  for (const auto& t : tables) {
    for (const auto& [rank, n] : t.buckets.back().counts) EXPECT_EQ((recomputed[{t.k, rank}]), n);
  }
}

TEST(CostOverTime, IncumbentAveraging) {
  std::vector<ResultRow> rows{row(0, 1, 1.0), row(1, 1, 3.0)};
  TraceTable traces;
  traces[rows[0].trace_ref] = {{10.0, 4.0, 1, 8.0}, {50.0, 1.0, 1, 2.0}};
  traces[rows[1].trace_ref] = {{30.0, 3.0, 1, 6.0}};
  const auto c = cost_over_time(rows, traces, {20.0, 60.0});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].points[0].length.n, 1u);
  EXPECT_EQ(c[0].points[0].length.mean, 4.0);
  EXPECT_EQ(c[0].points[1].length.mean, 2.0);
  EXPECT_EQ(c[0].points[1].exec_time.mean, 4.0);
}

TEST(Plots, DeterministicAndPadded) {
  const std::vector<PlotSeries> s{{"a", {0, 10}, {1, 3}, {}}, {"b", {0, 10}, {2, 2}, {0.5, 0.5}}};
  EXPECT_EQ(render_line_plot("t", "x", "y", s), render_line_plot("t", "x", "y", s));
  const auto r = plot_ranges(s);
  EXPECT_NEAR(r.x.lo, -0.5, 1e-12);
  EXPECT_NEAR(r.x.hi, 10.5, 1e-12);
  EXPECT_NEAR(r.y.lo, 1.0 - 0.1, 1e-12);
  EXPECT_NEAR(r.y.hi, 3.0 + 0.1, 1e-12);
}

TEST(Plots, EmptySeriesNamed) {
  const std::vector<PlotSeries> s{{"random k=16", {1.0}, {NAN}, {}}};
  try {
    render_line_plot("t", "x", "y", s);
    FAIL() << "expected an error";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("random k=16"), std::string::npos);
  }
  EXPECT_THROW(emit_plots({}, {}, "/tmp"), ArgumentError);
}

TEST(Plots, EmitFromExperiment) {
  const auto& res = shared_result();
  const auto traces = traces_from_csv(traces_to_csv(res.runs));
  const auto rows = rows_of(res.runs);
  const auto grid = time_grid(res.spec.budget_ms, 10);
  const auto dir = std::filesystem::temp_directory_path() / "redugoal-test-plots";
  std::filesystem::remove_all(dir);
  const auto files = emit_plots(cost_over_time(rows, traces, grid), rank_histogram(rows, traces, grid, res.spec.budget_ms), dir);
  EXPECT_EQ(files.size(), 2u + 2u);
  for (const auto& f : files) EXPECT_GT(std::filesystem::file_size(f), 100u);
}
