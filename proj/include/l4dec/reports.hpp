#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace l4dec {

// Wilson score interval for a binomial proportion; the sweep CSV marks the
// interval columns explicitly.
struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};
WilsonInterval wilson_interval(int successes, int trials, double z = 1.96);

struct CellParams {
    int p = 0;
    int r = 0;
    double theta = 0.0;
    int n = 0;
};

struct CellResult {
    CellParams params;
    int trials = 0;
    int successes = 0;
    double success_rate = 0.0;
    double mean_frobenius_err = 0.0;
    double mean_iters = 0.0;
    // Trials that threw or whose solver stalled even after the retry; they
    // count toward `trials` but are excluded from the means.
    int failed_trials = 0;
    double wall_time_ms = 0.0;  // 0 unless timing was requested
};

// One row per cell, input order preserved (callers sort by theta, r, n).
// Columns: p,r,theta,n,trials,successes,success_rate,wilson_lo,wilson_hi,
//          mean_frobenius_err,mean_iters,failed_trials,wall_time_ms
void write_sweep_csv(const std::filesystem::path& path, const std::vector<CellResult>& rows);

// t in [0,1] through the fixed 8-stop color ramp -> "#rrggbb".
std::string ramp_color(double t);

// 600x480 SVG heatmap over categorical axes; values(i, j) is the cell at
// x tick j, y tick i, with y ticks running bottom-up. NaN cells render gray.
void write_svg_heatmap(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::vector<std::string>& x_ticks,
                       const std::string& y_label, const std::vector<std::string>& y_ticks,
                       const Eigen::MatrixXd& values, double vmin, double vmax);

// 600x480 SVG scatter with auto-scaled numeric axes.
void write_svg_scatter(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<std::pair<double, double>>& points);

}  // namespace l4dec
