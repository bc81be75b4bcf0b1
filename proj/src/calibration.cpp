#include "spatial_sir/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <sstream>

#include "spatial_sir/engine.hpp"

namespace spatial_sir {

double rho_from_growth(double r0, double g0) {
    if (!(r0 > 1.0)) throw ValidationError("r0 must exceed 1 for the growth identity");
    if (!(g0 > 0.0)) throw ValidationError("growth rate must be positive");
    return g0 / (r0 - 1.0);
}

double infectious_period(double r0, double g0) { return 1.0 / rho_from_growth(r0, g0); }

double radius_for_contacts(double c_target, double density, double city_side) {
    if (c_target < 0.0 || !(density > 0.0)) throw ValidationError("contact target and density must be positive");
    const double radius = std::sqrt(c_target / (density * std::numbers::pi));
    if (radius >= city_side) throw ValidationError("contact radius reaches the city side");
    return radius;
}

void validate_target(const CalibrationTarget& target) {
    if (target.target_growth.size() < 5) throw ValidationError("target series needs at least 5 days");
    if (!target.weights.empty() && target.weights.size() != target.target_growth.size())
        throw ValidationError("weights do not match the target length");
    for (double w : target.weights) {
        if (w < 0.0) throw ValidationError("negative weight");
    }
}

void validate_search(const SearchConfig& s) {
    if (!(s.pi_lo > 0.0 && s.pi_lo < s.pi_hi && s.pi_hi <= 1.0)) throw ValidationError("bad contagion bounds");
    if (!(s.mu_lo > 0.0 && s.mu_lo < s.mu_hi)) throw ValidationError("bad movement bounds");
    if (s.grid < 2) throw ValidationError("grid resolution must be at least 2");
    if (s.refine_iterations < 0) throw ValidationError("negative refinement iterations");
    if (s.seeds.empty()) throw ValidationError("no seeds for evaluation");
}

std::vector<double> simulated_growth(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds, int days) {
    RunOptions options;
    options.diagnostics = false;
    options.max_day = days;
    const auto rep = run_replications(spec, seeds, options);
    std::vector<double> infected;
    for (const auto& d : rep.averaged) infected.push_back(d.i);
    infected.resize(static_cast<std::size_t>(days) + 1, infected.empty() ? 0.0 : infected.back());
    std::vector<double> out;
    for (int t = 0; t < days; ++t) {
        const double now = infected[static_cast<std::size_t>(t)];
        if (now <= 0.0) break;
        out.push_back(infected[static_cast<std::size_t>(t) + 1] / now - 1.0);
    }
    return out;
}

std::optional<double> growth_loss(const CalibrationTarget& target, const ScenarioSpec& spec,
                                  std::span<const std::uint64_t> seeds) {
    const int days = static_cast<int>(target.target_growth.size());
    const auto sim = simulated_growth(spec, seeds, days);
    if (static_cast<int>(sim.size()) < days) return std::nullopt;
    double num = 0.0;
    double den = 0.0;
    for (int t = 0; t < days; ++t) {
        const double w = target.weights.empty() ? 1.0 : target.weights[static_cast<std::size_t>(t)];
        const double e = sim[static_cast<std::size_t>(t)] - target.target_growth[static_cast<std::size_t>(t)];
        num += w * e * e;
        den += w;
    }
    return den > 0.0 ? num / den : 0.0;
}

CalibrationResult fit_pi_mu(const CalibrationTarget& target, const ScenarioSpec& spec, const SearchConfig& search) {
    validate_target(target);
    validate_search(search);
    validate_scenario(spec);

    CalibrationResult result;
    auto evaluate = [&](double pi, double mu, bool coarse) -> std::optional<double> {
        for (const auto& e : result.evaluations) {
            if (e.pi == pi && e.mu == mu) return e.extinct ? std::nullopt : std::optional<double>(e.loss);
        }
        ScenarioSpec s = spec;
        s.epidemic.contagion_prob = pi;
        s.epidemic.move_distance = mu;
        const auto loss = growth_loss(target, s, search.seeds);
        result.evaluations.push_back({pi, mu, loss.value_or(0.0), !loss, coarse});
        return loss;
    };

    const double dpi = (search.pi_hi - search.pi_lo) / (search.grid - 1);
    const double dmu = (search.mu_hi - search.mu_lo) / (search.grid - 1);
    std::optional<double> best;
    for (int a = 0; a < search.grid; ++a) {
        for (int b = 0; b < search.grid; ++b) {
            const double pi = search.pi_lo + a * dpi;
            const double mu = search.mu_lo + b * dmu;
            const auto loss = evaluate(pi, mu, true);
            if (loss && (!best || *loss < *best)) {
                best = loss;
                result.pi_hat = pi;
                result.mu_hat = mu;
            }
        }
    }
    if (!best) throw ValidationError("target unreachable in bounds");

    double step_pi = dpi / 2.0;
    double step_mu = dmu / 2.0;
    for (int it = 0; it < search.refine_iterations; ++it) {
        for (int axis = 0; axis < 2; ++axis) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (double sign : {-1.0, 1.0}) {
                    double pi = result.pi_hat;
                    double mu = result.mu_hat;
                    if (axis == 0) {
                        pi = std::clamp(pi + sign * step_pi, search.pi_lo, search.pi_hi);
                    } else {
                        mu = std::clamp(mu + sign * step_mu, search.mu_lo, search.mu_hi);
                    }
                    const auto loss = evaluate(pi, mu, false);
                    if (loss && *loss < *best) {
                        best = loss;
                        result.pi_hat = pi;
                        result.mu_hat = mu;
                        moved = true;
                        break;
                    }
                }
            }
        }
        step_pi /= 2.0;
        step_mu /= 2.0;
    }
    result.loss = *best;
    return result;
}

CalibrationTarget read_target_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read target file: " + path.string());
    CalibrationTarget target;
    std::string line;
    bool header = true;
    bool weighted = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header) {
            header = false;
            if (cells.size() < 2 || cells[0] != "day" || cells[1] != "growth")
                throw ValidationError("target CSV must start with header day,growth");
            weighted = cells.size() > 2 && cells[2] == "weight";
            continue;
        }
        try {
            target.target_growth.push_back(std::stod(cells.at(1)));
            if (weighted) target.weights.push_back(std::stod(cells.at(2)));
        } catch (const std::exception&) {
            throw ValidationError("malformed target row: " + line);
        }
    }
    validate_target(target);
    return target;
}

void write_target_csv(const std::filesystem::path& path, const CalibrationTarget& target) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << (target.weights.empty() ? "day,growth\n" : "day,growth,weight\n");
    for (std::size_t t = 0; t < target.target_growth.size(); ++t) {
        out << t << "," << format_double(target.target_growth[t]);
        if (!target.weights.empty()) out << "," << format_double(target.weights[t]);
        out << "\n";
    }
}

std::string calibration_report_csv(const CalibrationResult& result) {
    std::ostringstream os;
    os << "kind,contagion_prob,move_distance,loss,extinct\n";
    os << "best," << format_double(result.pi_hat) << "," << format_double(result.mu_hat) << ","
       << format_double(result.loss) << ",0\n";
    for (const auto& e : result.evaluations) {
        os << (e.coarse ? "grid" : "refine") << "," << format_double(e.pi) << "," << format_double(e.mu) << ","
           << format_double(e.loss) << "," << (e.extinct ? 1 : 0) << "\n";
    }
    return os.str();
}

}  // namespace spatial_sir
