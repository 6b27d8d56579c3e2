#include "l4dec/reports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "l4dec/common.hpp"

namespace l4dec {

namespace {

// 8-stop perceptual ramp, dark-to-bright.
constexpr int kRamp[8][3] = {
    {0x44, 0x01, 0x54}, {0x46, 0x32, 0x7e}, {0x36, 0x5c, 0x8d}, {0x27, 0x7f, 0x8e},
    {0x1f, 0xa1, 0x87}, {0x4a, 0xc1, 0x6d}, {0xa0, 0xda, 0x39}, {0xfd, 0xe7, 0x25},
};

class SvgFile {
  public:
    explicit SvgFile(const std::filesystem::path& path) : path_(path.string()) {
        f_ = std::fopen(path_.c_str(), "w");
        if (!f_) throw IoError(path_ + ": cannot open for writing");
        put("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 600 480\" "
            "width=\"600\" height=\"480\">\n");
        put("<rect width=\"600\" height=\"480\" fill=\"#ffffff\"/>\n");
    }
    ~SvgFile() {
        if (f_) std::fclose(f_);
    }
    SvgFile(const SvgFile&) = delete;
    SvgFile& operator=(const SvgFile&) = delete;

    void put(const std::string& s) {
        if (std::fwrite(s.data(), 1, s.size(), f_) != s.size())
            throw IoError(path_ + ": write failed");
    }
    template <typename... Args>
    void putf(const char* fmt, Args... args) {
        char buf[512];
        std::snprintf(buf, sizeof(buf), fmt, args...);
        put(buf);
    }
    void close() {
        put("</svg>\n");
        if (std::fclose(f_) != 0) {
            f_ = nullptr;
            throw IoError(path_ + ": close failed");
        }
        f_ = nullptr;
    }

  private:
    std::string path_;
    std::FILE* f_ = nullptr;
};

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct AxisScale {
    double lo = 0.0;
    double hi = 1.0;
    double to_px(double v, double px_lo, double px_hi) const {
        const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return px_lo + t * (px_hi - px_lo);
    }
};

AxisScale nice_span(double lo, double hi) {
    if (!(lo < hi)) {
        const double pad = std::max(1.0, std::abs(lo)) * 0.5;
        return {lo - pad, hi + pad};
    }
    const double pad = (hi - lo) * 0.05;
    return {lo - pad, hi + pad};
}

}  // namespace

WilsonInterval wilson_interval(int successes, int trials, double z) {
    if (trials <= 0 || successes < 0 || successes > trials)
        throw InvalidArgument("wilson_interval: need 0 <= successes <= trials, trials > 0");
    const double n = trials;
    const double ph = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = ph + z2 / (2.0 * n);
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, (center - half) / denom), std::min(1.0, (center + half) / denom)};
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<CellResult>& rows) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw IoError(path.string() + ": cannot open for writing");
    std::fputs(
        "p,r,theta,n,trials,successes,success_rate,wilson_lo,wilson_hi,"
        "mean_frobenius_err,mean_iters,failed_trials,wall_time_ms\n",
        f);
    for (const auto& row : rows) {
        const WilsonInterval wi = wilson_interval(row.successes, row.trials);
        std::fprintf(f, "%d,%d,%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n",
                     row.params.p, row.params.r, row.params.theta, row.params.n, row.trials,
                     row.successes, row.success_rate, wi.lo, wi.hi, row.mean_frobenius_err,
                     row.mean_iters, row.failed_trials, row.wall_time_ms);
    }
    if (std::fclose(f) != 0) throw IoError(path.string() + ": close failed");
}

std::string ramp_color(double t) {
    if (std::isnan(t)) return "#888888";
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 7.0;
    const int lo = std::min(6, static_cast<int>(pos));
    const double frac = pos - lo;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(kRamp[lo][0] * (1.0 - frac) +
                                               kRamp[lo + 1][0] * frac)),
                  static_cast<int>(std::lround(kRamp[lo][1] * (1.0 - frac) +
                                               kRamp[lo + 1][1] * frac)),
                  static_cast<int>(std::lround(kRamp[lo][2] * (1.0 - frac) +
                                               kRamp[lo + 1][2] * frac)));
    return buf;
}

void write_svg_heatmap(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::vector<std::string>& x_ticks,
                       const std::string& y_label, const std::vector<std::string>& y_ticks,
                       const Eigen::MatrixXd& values, double vmin, double vmax) {
    const int ny = static_cast<int>(values.rows());
    const int nx = static_cast<int>(values.cols());
    if (nx == 0 || ny == 0 || static_cast<int>(x_ticks.size()) != nx ||
        static_cast<int>(y_ticks.size()) != ny)
        throw InvalidArgument("write_svg_heatmap: tick/value shape mismatch");

    const double px0 = 80.0, px1 = 500.0, py0 = 60.0, py1 = 400.0;
    const double cw = (px1 - px0) / nx;
    const double ch = (py1 - py0) / ny;

    SvgFile svg(path);
    svg.putf("<text x=\"300\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\" "
             "text-anchor=\"middle\">%s</text>\n",
             escape_xml(title).c_str());

    for (int i = 0; i < ny; ++i) {
        for (int j = 0; j < nx; ++j) {
            const double v = values(i, j);
            const double t = std::isnan(v) || vmax <= vmin ? (std::isnan(v) ? v : 0.5)
                                                           : (v - vmin) / (vmax - vmin);
            const double x = px0 + j * cw;
            // y ticks run bottom-up: row i sits i cells above the bottom edge.
            const double y = py1 - (i + 1) * ch;
            svg.putf("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" "
                     "fill=\"%s\"/>\n",
                     x, y, cw, ch, ramp_color(t).c_str());
            if (!std::isnan(v)) {
                const double tc = std::clamp(t, 0.0, 1.0);
                svg.putf("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" "
                         "font-size=\"11\" text-anchor=\"middle\" fill=\"%s\">%.2f</text>\n",
                         x + cw / 2.0, y + ch / 2.0 + 4.0, tc < 0.55 ? "#ffffff" : "#000000",
                         v);
            }
        }
    }

    for (int j = 0; j < nx; ++j)
        svg.putf("<text x=\"%.2f\" y=\"418\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"middle\">%s</text>\n",
                 px0 + (j + 0.5) * cw, escape_xml(x_ticks[j]).c_str());
    for (int i = 0; i < ny; ++i)
        svg.putf("<text x=\"74\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\" "
                 "text-anchor=\"end\">%s</text>\n",
                 py1 - (i + 0.5) * ch + 4.0, escape_xml(y_ticks[i]).c_str());
    svg.putf("<text x=\"300\" y=\"445\" font-family=\"sans-serif\" font-size=\"13\" "
             "text-anchor=\"middle\">%s</text>\n",
             escape_xml(x_label).c_str());
    svg.putf("<text x=\"24\" y=\"230\" font-family=\"sans-serif\" font-size=\"13\" "
             "text-anchor=\"middle\" transform=\"rotate(-90 24 230)\">%s</text>\n",
             escape_xml(y_label).c_str());

    // Discrete legend bar, bottom-up.
    const double ly0 = 60.0, ly1 = 400.0;
    const double lh = (ly1 - ly0) / 8.0;
    for (int s = 0; s < 8; ++s) {
        char color[8];
        std::snprintf(color, sizeof(color), "#%02x%02x%02x", kRamp[s][0], kRamp[s][1],
                      kRamp[s][2]);
        svg.putf("<rect x=\"530\" y=\"%.2f\" width=\"18\" height=\"%.2f\" fill=\"%s\"/>\n",
                 ly1 - (s + 1) * lh, lh, color);
    }
    svg.putf("<text x=\"552\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\">%.3g"
             "</text>\n",
             ly1 + 4.0, vmin);
    svg.putf("<text x=\"552\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\">%.3g"
             "</text>\n",
             ly0 + 4.0, vmax);
    svg.close();
}

void write_svg_scatter(const std::filesystem::path& path, const std::string& title,
                       const std::string& x_label, const std::string& y_label,
                       const std::vector<std::pair<double, double>>& points) {
    double xlo = 0.0, xhi = 1.0, ylo = 0.0, yhi = 1.0;
    if (!points.empty()) {
        xlo = xhi = points[0].first;
        ylo = yhi = points[0].second;
        for (const auto& [x, y] : points) {
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, y);
            yhi = std::max(yhi, y);
        }
    }
    const AxisScale xs = nice_span(xlo, xhi);
    const AxisScale ys = nice_span(ylo, yhi);
    const double px0 = 80.0, px1 = 560.0, py0 = 60.0, py1 = 400.0;

    SvgFile svg(path);
    svg.putf("<text x=\"300\" y=\"30\" font-family=\"sans-serif\" font-size=\"16\" "
             "text-anchor=\"middle\">%s</text>\n",
             escape_xml(title).c_str());
    svg.putf("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
             "stroke=\"#444444\"/>\n",
             px0, py0, px1 - px0, py1 - py0);

    for (int k = 0; k <= 4; ++k) {
        const double fx = xs.lo + (xs.hi - xs.lo) * k / 4.0;
        const double fy = ys.lo + (ys.hi - ys.lo) * k / 4.0;
        const double tx = px0 + (px1 - px0) * k / 4.0;
        const double ty = py1 - (py1 - py0) * k / 4.0;
        svg.putf("<text x=\"%.2f\" y=\"418\" font-family=\"sans-serif\" font-size=\"11\" "
                 "text-anchor=\"middle\">%.3g</text>\n",
                 tx, fx);
        svg.putf("<text x=\"74\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"11\" "
                 "text-anchor=\"end\">%.3g</text>\n",
                 ty + 4.0, fy);
        if (k > 0 && k < 4) {
            svg.putf("<line x1=\"%.2f\" y1=\"%.1f\" x2=\"%.2f\" y2=\"%.1f\" "
                     "stroke=\"#dddddd\"/>\n",
                     tx, py0, tx, py1);
            svg.putf("<line x1=\"%.1f\" y1=\"%.2f\" x2=\"%.1f\" y2=\"%.2f\" "
                     "stroke=\"#dddddd\"/>\n",
                     px0, ty, px1, ty);
        }
    }

    for (const auto& [x, y] : points)
        svg.putf("<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"#365c8d\" "
                 "fill-opacity=\"0.7\"/>\n",
                 xs.to_px(x, px0, px1), ys.to_px(y, py1, py0));

    svg.putf("<text x=\"300\" y=\"445\" font-family=\"sans-serif\" font-size=\"13\" "
             "text-anchor=\"middle\">%s</text>\n",
             escape_xml(x_label).c_str());
    svg.putf("<text x=\"24\" y=\"230\" font-family=\"sans-serif\" font-size=\"13\" "
             "text-anchor=\"middle\" transform=\"rotate(-90 24 230)\">%s</text>\n",
             escape_xml(y_label).c_str());
    svg.close();
}

}  // namespace l4dec
