#include "swapbench/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace swapbench {

const char* kHeatmapNaColor = "#67001f";  // deep red, distinct from 0%

namespace {

struct Rgb {
    int r, g, b;
};

std::string hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
    return buf;
}

Rgb mix(const Rgb& a, const Rgb& b, double t) {
    auto ch = [&](int x, int y) { return static_cast<int>(std::lround(x + (y - x) * t)); };
    return {ch(a.r, b.r), ch(a.g, b.g), ch(a.b, b.b)};
}

std::string fmt(double v, int decimals) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

}  // namespace

std::string heatmap_color(double pass_rate) {
    // red -> yellow -> green ramp
    const Rgb red{0xd7, 0x30, 0x27};
    const Rgb yellow{0xfe, 0xe0, 0x8b};
    const Rgb green{0x1a, 0x98, 0x50};
    double t = std::clamp(pass_rate, 0.0, 1.0);
    if (t < 0.5)
        return hex(mix(red, yellow, t * 2.0));
    return hex(mix(yellow, green, (t - 0.5) * 2.0));
}

std::string render_heatmap_svg(const std::string& model_id,
                               const std::vector<TestIteration>& iterations) {
    const int cell = 10, gap = 2, per_row = 50;
    const int margin = 14, header = 28, legend = 26;
    size_t n = iterations.size();
    int rows = static_cast<int>((n + per_row - 1) / per_row);
    int width = margin * 2 + per_row * (cell + gap) - gap;
    int height = header + margin + rows * (cell + gap) - gap + legend + margin;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">"
        << model_id << " — test pass rate per iteration</text>\n";

    size_t na_count = 0;
    for (size_t i = 0; i < n; ++i) {
        const TestIteration& it = iterations[i];
        int col = static_cast<int>(i % per_row);
        int row = static_cast<int>(i / per_row);
        int x = margin + col * (cell + gap);
        int y = header + row * (cell + gap);
        std::string fill;
        std::string cls;
        std::string title;
        if (it.status == "na") {
            fill = kHeatmapNaColor;
            cls = "na";
            title = "iteration " + std::to_string(it.iteration_index) + ": N/A";
            ++na_count;
        } else {
            double rate = it.pass_rate.value_or(0.0);
            fill = heatmap_color(rate);
            cls = "ok";
            title = "iteration " + std::to_string(it.iteration_index) + ": " +
                    fmt(rate * 100.0, 1) + "%";
        }
        svg << "<rect class=\"" << cls << "\" x=\"" << x << "\" y=\"" << y << "\" width=\""
            << cell << "\" height=\"" << cell << "\" fill=\"" << fill << "\"><title>" << title
            << "</title></rect>\n";
    }

    int ly = header + rows * (cell + gap) + margin;
    svg << "<rect x=\"" << margin << "\" y=\"" << ly << "\" width=\"" << cell << "\" height=\""
        << cell << "\" fill=\"" << heatmap_color(0.0) << "\"/>\n";
    svg << "<text x=\"" << margin + cell + 4 << "\" y=\"" << ly + cell - 1
        << "\" font-family=\"sans-serif\" font-size=\"10\">0%</text>\n";
    svg << "<rect x=\"" << margin + 60 << "\" y=\"" << ly << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"" << heatmap_color(1.0) << "\"/>\n";
    svg << "<text x=\"" << margin + 60 + cell + 4 << "\" y=\"" << ly + cell - 1
        << "\" font-family=\"sans-serif\" font-size=\"10\">100%</text>\n";
    svg << "<rect x=\"" << margin + 130 << "\" y=\"" << ly << "\" width=\"" << cell
        << "\" height=\"" << cell << "\" fill=\"" << kHeatmapNaColor << "\"/>\n";
    svg << "<text x=\"" << margin + 130 + cell + 4 << "\" y=\"" << ly + cell - 1
        << "\" font-family=\"sans-serif\" font-size=\"10\">N/A (" << na_count << ")</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const ReportInputs& inputs, const std::filesystem::path& out_dir) {
    if (inputs.scorecards.empty())
        throw std::runtime_error("emit_report: no scorecards");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw std::runtime_error("cannot create report directory " + out_dir.string());

    std::vector<ScoreCard> ranked = inputs.scorecards;
    std::stable_sort(ranked.begin(), ranked.end(), [](const ScoreCard& a, const ScoreCard& b) {
        return a.final_score > b.final_score;
    });

    std::ostringstream md;
    md << "# Leaderboard\n\n";
    md << "| Rank | Model | Compilability | Func. Test | Mem. Safety | Delta ("
       << fmt(ranked.front().weights.wd * 100.0, 0) << "%) | Score |\n";
    md << "|-----:|-------|--------------:|-----------:|------------:|------------:|------:|\n";
    json lb_rows = json::array();
    int rank = 1;
    for (const auto& c : ranked) {
        md << "| " << rank << " | " << c.model_id << " | " << fmt(c.s1, 2) << " | " << fmt(c.s2, 2)
           << " | " << fmt(c.s3, 2) << " | " << fmt(c.delta_bonus, 2) << " | "
           << fmt(c.final_score, 1) << " |\n";
        json row = scorecard_to_json(c);
        row["rank"] = rank;
        auto alert_it = inputs.alerts.find(c.model_id);
        if (alert_it != inputs.alerts.end()) {
            json counts = json::object();
            for (const auto& a : alert_it->second) {
                std::string key = to_string(a.category);
                counts[key] = counts.value(key, 0) + 1;
            }
            row["unique_alerts"] = alert_it->second.size();
            row["alert_categories"] = counts;
        }
        auto iter_it = inputs.iterations.find(c.model_id);
        if (iter_it != inputs.iterations.end()) {
            size_t na = 0;
            for (const auto& it : iter_it->second)
                if (it.status == "na")
                    ++na;
            row["iterations"] = iter_it->second.size();
            row["na_iterations"] = na;
        }
        lb_rows.push_back(row);
        ++rank;
    }
    write_file(out_dir / "leaderboard.md", md.str());
    write_file(out_dir / "leaderboard.json", json{{"models", lb_rows}}.dump(2) + "\n");

    for (const auto& [model, iters] : inputs.iterations)
        write_file(out_dir / ("heatmap." + model + ".svg"), render_heatmap_svg(model, iters));

    json manifest = inputs.manifest_extra;
    manifest["models"] = json::array();
    for (const auto& c : ranked)
        manifest["models"].push_back(c.model_id);
    write_file(out_dir / "run-manifest.json", manifest.dump(2) + "\n");
}

}  // namespace swapbench
