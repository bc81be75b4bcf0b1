#include "spatial_sir/scenario.hpp"

#include <charconv>
#include <sstream>

namespace spatial_sir {

namespace {

std::string_view trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_real(std::string_view key, std::string_view v) {
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("type mismatch for key '" + std::string(key) + "': expected real, got '" +
                          std::string(v) + "'");
    return out;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
        throw ConfigError("type mismatch for key '" + std::string(key) + "': expected integer, got '" +
                          std::string(v) + "'");
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("type mismatch for key '" + std::string(key) + "': expected boolean, got '" +
                      std::string(v) + "'");
}

Point to_point(std::string_view key, std::string_view v) {
    const auto comma = v.find(',');
    if (comma == std::string_view::npos)
        throw ConfigError("type mismatch for key '" + std::string(key) + "': expected 'x,y'");
    return {to_real(key, trim(v.substr(0, comma))), to_real(key, trim(v.substr(comma + 1)))};
}

template <typename Parse>
auto to_enum(std::string_view key, std::string_view v, Parse parse) {
    try {
        return parse(std::string(v));
    } catch (const ValidationError& e) {
        throw ConfigError("invalid value for key '" + std::string(key) + "': " + e.what());
    }
}

LockdownPolicy& lockdown_of(ScenarioSpec& spec) {
    if (!spec.lockdown) spec.lockdown = LockdownPolicy{};
    return *spec.lockdown;
}

}  // namespace

std::vector<std::uint64_t> default_seeds(std::uint64_t count) {
    std::vector<std::uint64_t> s;
    for (std::uint64_t i = 1; i <= count; ++i) s.push_back(i);
    return s;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

void set_scenario_value(ScenarioSpec& spec, std::string_view key, std::string_view raw) {
    const std::string_view v = trim(raw);
    auto& e = spec.epidemic;
    auto& g = spec.geography;
    auto& b = spec.behavior;
    if (key == "scenario.id") {
        if (v.empty()) throw ConfigError("scenario.id must not be empty");
        spec.scenario_id = std::string(v);
    } else if (key == "scenario.seeds") {
        spec.seeds = parse_seed_list(v);
    } else if (key == "scenario.notes") {
        spec.notes = std::string(v);
    } else if (key == "scenario.stream_salt") {
        spec.stream_salt = static_cast<std::uint64_t>(to_int(key, v));
    } else if (key == "epidemic.n_agents") {
        e.n_agents = to_int(key, v);
    } else if (key == "epidemic.initial_infected") {
        e.initial_infected = to_int(key, v);
    } else if (key == "epidemic.recovery_prob") {
        e.recovery_prob = to_real(key, v);
    } else if (key == "epidemic.contagion_prob") {
        e.contagion_prob = to_real(key, v);
    } else if (key == "epidemic.contagion_radius") {
        e.contagion_radius = to_real(key, v);
    } else if (key == "epidemic.move_distance") {
        e.move_distance = to_real(key, v);
    } else if (key == "epidemic.horizon") {
        e.horizon = static_cast<int>(to_int(key, v));
    } else if (key == "geography.city_side") {
        g.city_side = to_real(key, v);
    } else if (key == "geography.density_mode") {
        g.density_mode = to_enum(key, v, parse_density_mode);
    } else if (key == "geography.outbreak_mode") {
        g.outbreak_mode = to_enum(key, v, parse_outbreak_mode);
    } else if (key == "geography.cluster_anchor") {
        g.cluster_anchor = to_point(key, v);
    } else if (key == "geography.cluster_count") {
        g.cluster_count = static_cast<int>(to_int(key, v));
    } else if (key == "geography.relocation_mode") {
        g.relocation_mode = to_enum(key, v, parse_relocation_mode);
    } else if (key == "behavior.kind") {
        b.kind = to_enum(key, v, parse_behavior_kind);
    } else if (key == "behavior.phi") {
        b.params.phi = to_real(key, v);
    } else if (key == "behavior.i_bar") {
        b.params.i_bar = to_real(key, v);
    } else if (key == "lockdown.enabled") {
        if (to_bool(key, v)) {
            lockdown_of(spec);
        } else {
            spec.lockdown.reset();
        }
    } else if (key == "lockdown.share") {
        lockdown_of(spec).share = to_real(key, v);
    } else if (key == "lockdown.start_day") {
        lockdown_of(spec).start_day = static_cast<int>(to_int(key, v));
    } else if (key == "lockdown.selection") {
        lockdown_of(spec).selection = to_enum(key, v, parse_lockdown_selection);
    } else {
        throw ConfigError("unknown key: " + std::string(key));
    }
}

void validate_scenario(const ScenarioSpec& spec) {
    if (spec.scenario_id.empty()) throw ValidationError("scenario_id must not be empty");
    if (spec.seeds.empty()) throw ValidationError("seed list must not be empty");
    validate_params(spec.epidemic, spec.geography);
    validate_behavior(spec.behavior);
    if (spec.lockdown) validate_lockdown(*spec.lockdown);
}

ScenarioSpec parse_scenario(std::string_view text) {
    ScenarioSpec spec;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header on line " + std::to_string(line_no));
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "scenario" && section != "epidemic" && section != "geography" &&
                section != "behavior" && section != "lockdown")
                throw ConfigError("unknown section: " + section);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected key = value on line " + std::to_string(line_no));
        const std::string_view key = trim(line.substr(0, eq));
        const std::string_view value = trim(line.substr(eq + 1));
        std::string dotted;
        if (key.find('.') != std::string_view::npos) {
            dotted = std::string(key);
        } else if (!section.empty()) {
            dotted = section + "." + std::string(key);
        } else {
            throw ConfigError("key outside of any section: " + std::string(key));
        }
        set_scenario_value(spec, dotted, value);
    }
    validate_scenario(spec);
    return spec;
}

std::string serialize_scenario(const ScenarioSpec& spec) {
    std::ostringstream os;
    const auto& e = spec.epidemic;
    const auto& g = spec.geography;
    os << "[scenario]\n"
       << "id = " << spec.scenario_id << "\n"
       << "seeds = " << format_seed_list(spec.seeds) << "\n";
    if (!spec.notes.empty()) os << "notes = " << spec.notes << "\n";
    os << "stream_salt = " << spec.stream_salt << "\n\n"
       << "[epidemic]\n"
       << "n_agents = " << e.n_agents << "\n"
       << "initial_infected = " << e.initial_infected << "\n"
       << "recovery_prob = " << format_double(e.recovery_prob) << "\n"
       << "contagion_prob = " << format_double(e.contagion_prob) << "\n"
       << "contagion_radius = " << format_double(e.contagion_radius) << "\n"
       << "move_distance = " << format_double(e.move_distance) << "\n"
       << "horizon = " << e.horizon << "\n\n"
       << "[geography]\n"
       << "city_side = " << format_double(g.city_side) << "\n"
       << "density_mode = " << to_string(g.density_mode) << "\n"
       << "outbreak_mode = " << to_string(g.outbreak_mode) << "\n"
       << "cluster_anchor = " << format_double(g.cluster_anchor.x) << "," << format_double(g.cluster_anchor.y) << "\n"
       << "cluster_count = " << g.cluster_count << "\n"
       << "relocation_mode = " << to_string(g.relocation_mode) << "\n\n"
       << "[behavior]\n"
       << "kind = " << to_string(spec.behavior.kind) << "\n"
       << "phi = " << format_double(spec.behavior.params.phi) << "\n"
       << "i_bar = " << format_double(spec.behavior.params.i_bar) << "\n";
    if (spec.lockdown) {
        os << "\n[lockdown]\n"
           << "enabled = true\n"
           << "share = " << format_double(spec.lockdown->share) << "\n"
           << "start_day = " << spec.lockdown->start_day << "\n"
           << "selection = " << to_string(spec.lockdown->selection) << "\n";
    }
    return os.str();
}

std::uint64_t spec_hash(const ScenarioSpec& spec) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_scenario(spec)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view item = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) {
            out.push_back(static_cast<std::uint64_t>(to_int("seeds", item)));
        } else {
            const auto lo = to_int("seeds", trim(item.substr(0, dash)));
            const auto hi = to_int("seeds", trim(item.substr(dash + 1)));
            if (hi < lo || lo < 0) throw ConfigError("invalid seed range: " + std::string(item));
            for (auto s = lo; s <= hi; ++s) out.push_back(static_cast<std::uint64_t>(s));
        }
    }
    if (out.empty()) throw ConfigError("seed list must not be empty");
    return out;
}

std::string format_seed_list(const std::vector<std::uint64_t>& seeds) {
    std::string out;
    std::size_t i = 0;
    while (i < seeds.size()) {
        std::size_t j = i;
        while (j + 1 < seeds.size() && seeds[j + 1] == seeds[j] + 1) ++j;
        if (!out.empty()) out += ",";
        out += std::to_string(seeds[i]);
        if (j > i) out += "-" + std::to_string(seeds[j]);
        i = j + 1;
    }
    return out;
}

}  // namespace spatial_sir
