#include "rsqp/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>

namespace rsqp {

int first_hit_iteration(const std::vector<IterRecord>& trace, double eps_f, int window) {
    if (trace.empty()) return 0;
    const IterRecord& fin = trace[select_final_index(trace, window)];
    for (const IterRecord& r : trace)
        if (r.v_tilde <= fin.v_tilde + 2.0 * eps_f && r.f_tilde <= fin.f_tilde + 2.0 * eps_f)
            return r.k;
    return trace.back().k;  // unreachable: fin itself qualifies
}

RunRow run_single(const Problem& p, double eps1, uint64_t seed, const SolverConfig& cfg) {
    RunRow row;
    row.problem = p.name;
    row.eps1 = eps1;
    row.seed = seed;

    NoiseModel model = derive_eps(eps1);
    model.seed = seed;
    SolverConfig run_cfg = cfg;
    if (model.is_zero() && run_cfg.dqp_stop_tol == 0.0) run_cfg.dqp_stop_tol = 1e-8;

    try {
        const SolverReport rep = solve(p, model, run_cfg);
        const Evaluation exact = eval_true(p, rep.x_final);
        row.v_final = violation(exact.c);
        if (p.reference) row.f_err = std::abs(exact.f - p.reference->f);
        row.final_pi = rep.final_pi;
        row.qn_skips = rep.qn_skip_count;
        row.first_hit = first_hit_iteration(rep.trace, model.eps_f, run_cfg.window);
        row.iters = static_cast<int>(rep.trace.size());
        row.status = to_string(rep.status);
    } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& ch : msg)
            if (ch == ',' || ch == '\n') ch = ';';
        row.status = "error: " + msg;
    }
    return row;
}

std::vector<RunRow> run_experiment(const ExperimentSpec& spec) {
    std::vector<const Problem*> problems;
    if (spec.problem_names.empty()) {
        for (const Problem& p : corpus()) problems.push_back(&p);
    } else {
        for (const std::string& name : spec.problem_names) problems.push_back(&find_problem(name));
    }

    struct Cell {
        const Problem* p;
        double eps1;
        uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const Problem* p : problems)
        for (double eps1 : spec.eps1_levels)
            for (uint64_t seed : spec.seeds) cells.push_back({p, eps1, seed});

    std::vector<RunRow> rows(cells.size());
    if (spec.parallel && cells.size() > 1) {
        std::vector<std::future<RunRow>> futures;
        futures.reserve(cells.size());
        for (const Cell& c : cells)
            futures.push_back(std::async(std::launch::async, [&spec, c] {
                return run_single(*c.p, c.eps1, c.seed, spec.config);
            }));
        for (size_t i = 0; i < futures.size(); ++i) rows[i] = futures[i].get();
    } else {
        for (size_t i = 0; i < cells.size(); ++i)
            rows[i] = run_single(*cells[i].p, cells[i].eps1, cells[i].seed, spec.config);
    }
    return rows;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::string render_csv(const std::vector<RunRow>& rows) {
    std::ostringstream out;
    out << "problem,eps1,seed,v_final,f_err,final_pi,qn_skips,first_hit,iters,status\n";
    for (const RunRow& r : rows) {
        out << r.problem << ',' << fmt17(r.eps1) << ',' << r.seed << ',' << fmt17(r.v_final)
            << ',' << (r.f_err ? fmt17(*r.f_err) : std::string()) << ',' << fmt17(r.final_pi)
            << ',' << r.qn_skips << ',' << r.first_hit << ',' << r.iters << ',' << r.status
            << '\n';
    }
    return out.str();
}

std::string render_svg(const std::vector<RunRow>& rows, const std::string& metric) {
    // per-problem medians over seeds at each positive eps1, in order of
    // first appearance
    std::vector<std::string> problems;
    std::map<std::string, std::map<double, std::vector<double>>> samples;
    for (const RunRow& r : rows) {
        if (r.eps1 <= 0.0) continue;
        double value;
        if (metric == "v_final") {
            value = r.v_final;
        } else if (metric == "f_err") {
            if (!r.f_err) continue;
            value = *r.f_err;
        } else if (metric == "final_pi") {
            value = r.final_pi;
        } else {
            throw std::invalid_argument("render_svg: unknown metric " + metric);
        }
        if (samples.find(r.problem) == samples.end()) problems.push_back(r.problem);
        samples[r.problem][r.eps1].push_back(value);
    }

    struct Series {
        std::string name;
        std::vector<std::pair<double, double>> pts;  // (log10 eps1, log10 value)
    };
    constexpr double kFloor = 1e-16;
    std::vector<Series> series;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    bool first = true;
    for (const std::string& name : problems) {
        Series s;
        s.name = name;
        for (const auto& [eps1, vals] : samples[name]) {
            const double x = std::log10(eps1);
            const double y = std::log10(std::max(median(vals), kFloor));
            s.pts.emplace_back(x, y);
            if (first) {
                xmin = xmax = x;
                ymin = ymax = y;
                first = false;
            }
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        series.push_back(std::move(s));
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

    constexpr int W = 760, Hpx = 480, ML = 70, MR = 170, MT = 40, MB = 50;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return Hpx - MB - (y - ymin) / (ymax - ymin) * (Hpx - MT - MB); };
    static const char* palette[] = {"#1b6ca8", "#c2402a", "#2a9d4e", "#8e44ad",
                                    "#d68910", "#148f9f", "#7f5539", "#5d6d7e"};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << Hpx
        << "\" viewBox=\"0 0 " << W << ' ' << Hpx << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << ML << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
        << metric << " vs eps1 (log-log, median over seeds)</text>\n";
    // axes
    svg << "<line x1=\"" << ML << "\" y1=\"" << Hpx - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << Hpx - MB << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << Hpx - MB
        << "\" stroke=\"black\"/>\n";
    for (int e = static_cast<int>(std::ceil(xmin)); e <= static_cast<int>(std::floor(xmax)); ++e) {
        svg << "<text x=\"" << px(e) << "\" y=\"" << Hpx - MB + 18
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">1e" << e
            << "</text>\n";
    }
    const int ystep = std::max(1, static_cast<int>((ymax - ymin) / 6.0));
    for (int e = static_cast<int>(std::ceil(ymin)); e <= static_cast<int>(std::floor(ymax));
         e += ystep) {
        svg << "<text x=\"" << ML - 6 << "\" y=\"" << py(e) + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e" << e
            << "</text>\n";
    }
    svg << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << Hpx - 10
        << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">eps1</text>\n";

    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % (sizeof palette / sizeof palette[0])];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < series[s].pts.size(); ++i) {
            if (i) svg << ' ';
            svg << px(series[s].pts[i].first) << ',' << py(series[s].pts[i].second);
        }
        svg << "\"/>\n";
        for (const auto& [x, y] : series[s].pts)
            svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\""
                << color << "\"/>\n";
        svg << "<text x=\"" << W - MR + 12 << "\" y=\"" << MT + 16 * (s + 1)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
            << series[s].name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_outputs(const std::vector<RunRow>& rows, const std::filesystem::path& out_dir) {
    if (rows.empty()) throw std::invalid_argument("emit_outputs: no rows");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("emit_outputs: cannot create " + out_dir.string() + ": " +
                                 ec.message());
    auto write = [&](const std::string& name, const std::string& content) {
        const std::filesystem::path path = out_dir / name;
        std::ofstream f(path, std::ios::binary);
        f << content;
        if (!f) throw std::runtime_error("emit_outputs: write failed: " + path.string());
    };
    write("results.csv", render_csv(rows));
    write("v_final.svg", render_svg(rows, "v_final"));
    write("f_err.svg", render_svg(rows, "f_err"));
    write("final_pi.svg", render_svg(rows, "final_pi"));
}

}  // namespace rsqp
