#pragma once

#include "rowswarm/dataset.hpp"
#include "rowswarm/episode.hpp"
#include "rowswarm/nn.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rowswarm {

// Coefficient of determination, 1 - SS_res / SS_tot. Throws when the
// targets are constant (SS_tot = 0) or the lengths differ.
double r2_score(const std::vector<double>& y_true, const std::vector<double>& y_pred);

// Quantile with linear interpolation between closest ranks
// (h = (n-1) q). `values` need not be sorted.
double quantile(std::vector<double> values, double q);

// Per-step spread of |position - goal| over the movers of many runs.
// Shorter runs are extended by holding their final state, so every
// series has the same length (the longest trajectory).
struct DistanceStats {
    std::vector<double> median, q25, q75, d10, d90;

    std::size_t size() const { return median.size(); }
};
DistanceStats distance_stats(const std::vector<RunLog>& logs);

// Median over (run, mover) of the final distance from goal.
double final_median_distance(const std::vector<RunLog>& logs);

// ROC by threshold sweep over the distinct scores (equal scores move
// together), plus the trapezoidal area. Equals the pair-counting
// statistic with half credit for ties. Throws unless both labels occur.
struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};
struct RocCurve {
    std::vector<RocPoint> points; // from (0,0) to (1,1)
    double auc = 0.0;
};
RocCurve roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Fraction of wrongly coloured agents over time, from the spawn
// colouring (index 0) through every decision step, extended by holding
// each run's final colouring. Reported both as wrong agents per run
// and normalized per agent.
struct WrongColourSeries {
    std::vector<double> per_run;   // total wrong / n_runs
    std::vector<double> per_agent; // total wrong / total agents
};
WrongColourSeries wrong_colour_rate(const std::vector<RunLog>& logs,
                                    int series_len = 0); // 0: longest run

// Sweep a synthetic obstacle reading across one axis of the sensing
// slice (front: the front-center sensor; rear: both rear sensors) and
// record the commanded speed. Works for manual and learned spacing
// controllers; learned message inputs are held at zero.
enum class ProbeAxis { front, rear };
struct ProbeCurve {
    std::vector<double> x;     // the swept reading
    std::vector<double> value; // commanded speed
};
ProbeCurve probe_sensing(const ControllerSpec& controller, ProbeAxis axis,
                         const std::vector<double>& grid);

// Place a mover between two stationary robots and record the commanded
// speed across positions, each averaged over uniformly jittered
// (+-0.5 cm) placements. Also works for the expert (goal = midpoint).
struct PositionProbe {
    std::vector<double> position;
    std::vector<double> mean;
    std::vector<double> stddev; // population std over the jitters
};
PositionProbe probe_position(const ControllerSpec& controller, double left_x,
                             double right_x, const std::vector<double>& grid,
                             int jitters, std::uint64_t seed,
                             const WorldConfig& base = {});

// Matched evaluation episodes: run i spawns from seed^i, so different
// controllers see identical rows. `horizon` 0 picks cfg.max_steps for
// the spacing task and max(cfg.max_steps, n) for the colouring task.
std::vector<RunLog> run_eval_episodes(const ControllerSpec& controller,
                                      const WorldConfig& cfg, int runs,
                                      std::uint64_t seed, int horizon = 0,
                                      int jobs = 1);

// Agreement with the expert on the expert's own held-out trajectories:
// predict every recorded mover state with `controller` and score
// against the recorded expert command.
double r2_vs_expert(const std::vector<RunLog>& expert_logs,
                    const ControllerSpec& controller);

// Held-out classification quality of a colouring net: cut the runs into
// two-step windows, roll the net with seeded random boards (as in
// training), and score the second-step membership probabilities of the
// movers against the ground truth.
RocCurve colour_windows_auc(const MlpParams& model,
                            const std::vector<RunRecord>& records,
                            std::uint64_t seed);

// Spacing quality across row sizes: final-distance quantiles per n.
struct ScalabilityRow {
    int n_agents = 0;
    double median = 0.0, q25 = 0.0, q75 = 0.0, d10 = 0.0, d90 = 0.0;
};
std::vector<ScalabilityRow> scalability_spacing(const ControllerSpec& controller,
                                                const std::vector<int>& n_list,
                                                int runs, std::uint64_t seed,
                                                const WorldConfig& base,
                                                int jobs = 1);

// Colouring quality across row sizes: final wrong-colour rates per n
// (horizon raised to n when n exceeds the configured cap).
struct ColourScalabilityRow {
    int n_agents = 0;
    double final_per_run = 0.0;
    double final_per_agent = 0.0;
};
std::vector<ColourScalabilityRow> scalability_colour(const ControllerSpec& controller,
                                                     const std::vector<int>& n_list,
                                                     int runs, std::uint64_t seed,
                                                     const WorldConfig& base,
                                                     int jobs = 1);

// CSV renderings. Reals carry 9 significant digits; all are
// byte-deterministic for identical inputs.
std::string distance_stats_csv(const DistanceStats& stats);
std::string wrong_colour_csv(const WrongColourSeries& series);
std::string roc_csv(const RocCurve& curve);
std::string probe_sensing_csv(const ProbeCurve& curve);
std::string probe_position_csv(const PositionProbe& probe);
std::string scalability_csv(const std::vector<ScalabilityRow>& rows);
std::string colour_scalability_csv(const std::vector<ColourScalabilityRow>& rows);

std::vector<double> linspace(double lo, double hi, int points);

} // namespace rowswarm
