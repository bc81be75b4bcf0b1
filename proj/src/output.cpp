#include "spatial_sir/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace spatial_sir {

OutputFormat parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "csv+svg") return OutputFormat::csv_svg;
    throw ValidationError("unknown output format: " + s + " (expected csv or csv+svg)");
}

namespace {

std::string fd(double v) { return format_double(v); }

std::string hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string trace_csv(std::span<const RunTrace> traces) {
    std::ostringstream os;
    os << kTraceHeader << "\n";
    for (const auto& t : traces) {
        for (const auto& d : t.days) {
            os << t.scenario_id << ',' << t.seed << ',' << d.day << ',' << d.s << ',' << d.i << ',' << d.r << ','
               << fd(d.isolation_share) << ',' << fd(d.locked_share) << ',' << fd(d.avg_contacts) << ','
               << d.new_infections << ',' << (d.lambda_hat ? fd(*d.lambda_hat) : std::string()) << '\n';
        }
    }
    return os.str();
}

std::string panel_csv(const PanelDataset& panel) {
    std::ostringstream os;
    os << kPanelHeader << "\n";
    for (const auto& r : panel) {
        os << r.city_id << ',' << r.day << ',' << fd(r.density) << ',' << r.n << ',' << (r.treated ? 1 : 0) << ','
           << r.i_count << ',' << r.s_count << ',' << r.r_count << ',' << fd(r.i_frac) << ',' << fd(r.s_frac) << ','
           << (r.growth ? fd(*r.growth) : std::string()) << ',' << fd(r.contacts) << '\n';
    }
    return os.str();
}

std::string averaged_csv(std::span<const ReplicationResult> reps) {
    std::ostringstream os;
    os << "scenario_id,day,s_frac,i_frac,r_frac,isolated_share,locked_share,avg_contacts,new_infections,lambda_hat\n";
    for (const auto& rep : reps) {
        const double n = rep.n();
        for (const auto& d : rep.averaged) {
            os << rep.spec.scenario_id << ',' << d.day << ',' << fd(d.s / n) << ',' << fd(d.i / n) << ','
               << fd(d.r / n) << ',' << fd(d.isolation_share) << ',' << fd(d.locked_share) << ','
               << fd(d.avg_contacts) << ',' << fd(d.new_infections) << ','
               << (d.lambda_hat ? fd(*d.lambda_hat) : std::string()) << '\n';
        }
    }
    return os.str();
}

std::string summary_csv(std::span<const Metric> metrics) {
    std::ostringstream os;
    os << "scenario_id,metric,value\n";
    for (const auto& m : metrics) os << m.scenario << ',' << m.name << ',' << fd(m.value) << '\n';
    return os.str();
}

std::string sir_csv(std::span<const SirSeries> series) {
    std::ostringstream os;
    os << "scenario_id,day,s_frac,i_frac,r_frac\n";
    for (const auto& s : series) {
        for (const auto& st : s.states) {
            os << s.id << ',' << st.day << ',' << fd(st.s / s.n) << ',' << fd(st.i / s.n) << ',' << fd(st.r / s.n)
               << '\n';
        }
    }
    return os.str();
}

std::string predictions_csv(std::span<const NamedPrediction> predictions) {
    std::ostringstream os;
    os << "series,day,mean_fitted,mean_actual,cities\n";
    for (const auto& p : predictions) {
        for (const auto& d : p.days) {
            os << p.name << ',' << d.day << ',' << fd(d.mean_fitted) << ',' << fd(d.mean_actual) << ',' << d.cities
               << '\n';
        }
    }
    return os.str();
}

PanelDataset read_panel_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read panel file: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("empty panel file: " + path.string());
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kPanelHeader) throw ValidationError("panel header mismatch; expected " + std::string(kPanelHeader));
    PanelDataset panel;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto c = split(line);
        if (c.size() != 12) throw ValidationError("panel line " + std::to_string(lineno) + ": expected 12 fields");
        try {
            PanelRow r;
            r.city_id = std::stoi(c[0]);
            r.day = std::stoi(c[1]);
            r.density = std::stod(c[2]);
            r.n = std::stoll(c[3]);
            r.treated = std::stoi(c[4]) != 0;
            r.i_count = std::stoll(c[5]);
            r.s_count = std::stoll(c[6]);
            r.r_count = std::stoll(c[7]);
            r.i_frac = std::stod(c[8]);
            r.s_frac = std::stod(c[9]);
            if (!c[10].empty()) r.growth = std::stod(c[10]);
            r.contacts = std::stod(c[11]);
            panel.push_back(r);
        } catch (const std::logic_error&) {
            throw ValidationError("panel line " + std::to_string(lineno) + ": malformed number");
        }
    }
    return panel;
}

std::string svg_chart(const std::string& title, std::span<const ChartSeries> series) {
    const double w = 640.0, h = 400.0, left = 50.0, right = 150.0, top = 30.0, bottom = 30.0;
    std::size_t len = 1;
    double ymax = 0.0;
    for (const auto& s : series) {
        len = std::max(len, s.values.size());
        for (double v : s.values) {
            if (std::isfinite(v)) ymax = std::max(ymax, v);
        }
    }
    if (ymax <= 0.0) ymax = 1.0;
    static const char* colors[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d"};
    std::ostringstream os;
    char buf[128];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">" << title << "</text>\n";
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    std::snprintf(buf, sizeof(buf), "%.3g", ymax);
    os << "<text x=\"4\" y=\"" << top + 4 << "\" font-size=\"10\">" << buf << "</text>\n";
    os << "<text x=\"4\" y=\"" << h - bottom << "\" font-size=\"10\">0</text>\n";
    os << "<text x=\"" << left + pw - 20 << "\" y=\"" << h - 10 << "\" font-size=\"10\">" << len - 1 << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = colors[k % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        const auto& v = series[k].values;
        for (std::size_t t = 0; t < v.size(); ++t) {
            if (!std::isfinite(v[t])) continue;
            const double x = left + pw * static_cast<double>(t) / static_cast<double>(std::max<std::size_t>(len - 1, 1));
            const double y = top + ph * (1.0 - v[t] / ymax);
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x, y);
            os << buf;
        }
        os << "\"/>\n";
        os << "<text x=\"" << left + pw + 8 << "\" y=\"" << top + 14 * (k + 1) << "\" font-size=\"10\" fill=\""
           << color << "\">" << series[k].name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
    if (!out) throw ValidationError("write failed: " + path.string());
}

std::vector<std::filesystem::path> write_outputs(const PresetOutcome& outcome, const std::filesystem::path& dir,
                                                 OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (!std::filesystem::is_directory(dir)) throw ValidationError("cannot create output directory " + dir.string());

    std::vector<std::filesystem::path> files;
    auto emit = [&](const std::string& name, const std::string& content) {
        write_text(dir / name, content);
        files.push_back(dir / name);
    };

    std::vector<RunTrace> traces;
    for (const auto& rep : outcome.replications) traces.insert(traces.end(), rep.runs.begin(), rep.runs.end());
    emit("traces.csv", trace_csv(traces));
    emit("averaged.csv", averaged_csv(outcome.replications));
    emit("summary.csv", summary_csv(outcome.metrics));
    if (!outcome.sir.empty()) emit("sir.csv", sir_csv(outcome.sir));
    for (const auto& p : outcome.panels) emit("panel_" + p.name + ".csv", panel_csv(p.panel));
    if (!outcome.predictions.empty()) emit("predictions.csv", predictions_csv(outcome.predictions));
    if (outcome.table) {
        emit("table5.csv", treatment_table_csv(*outcome.table));
        emit("table5.txt", format_treatment_table(*outcome.table));
    }

    if (format == OutputFormat::csv_svg) {
        std::vector<ChartSeries> series;
        for (const auto& rep : outcome.replications) {
            if (outcome.replications.size() <= 8) series.push_back({rep.spec.scenario_id, rep.infected_share()});
        }
        for (const auto& s : outcome.sir) {
            if (outcome.sir.size() <= 8) series.push_back({s.id, sir_infected_share(s)});
        }
        if (!series.empty()) emit("infected.svg", svg_chart(outcome.preset + ": infected share", series));
        if (!outcome.predictions.empty()) {
            for (const auto& p : outcome.predictions) {
                std::vector<ChartSeries> ps(2);
                ps[0].name = "actual";
                ps[1].name = "fitted";
                for (const auto& d : p.days) {
                    ps[0].values.push_back(d.mean_actual);
                    ps[1].values.push_back(d.mean_fitted);
                }
                emit("predictions_" + p.name + ".svg", svg_chart(p.name, ps));
            }
        }
    }

    nlohmann::ordered_json manifest;
    manifest["preset"] = outcome.preset;
    nlohmann::ordered_json scenarios = nlohmann::ordered_json::array();
    for (const auto& rep : outcome.replications) {
        nlohmann::ordered_json s;
        s["scenario_id"] = rep.spec.scenario_id;
        s["spec_hash"] = hex(spec_hash(rep.spec));
        std::vector<std::uint64_t> seeds;
        std::vector<std::uint64_t> open;
        for (const auto& r : rep.runs) {
            seeds.push_back(r.seed);
            if (!r.converged) open.push_back(r.seed);
        }
        s["seeds"] = format_seed_list(seeds);
        s["days"] = rep.averaged.size() ? rep.averaged.size() - 1 : 0;
        s["non_converged"] = rep.non_converged;
        s["non_converged_seeds"] = open;
        scenarios.push_back(s);
    }
    manifest["scenarios"] = scenarios;
    std::vector<std::string> names;
    for (const auto& f : files) names.push_back(f.filename().string());
    manifest["files"] = names;
    files.push_back(dir / "manifest.json");
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return files;
}

}  // namespace spatial_sir
