#pragma once

#include "qacs/model.hpp"
#include "qacs/simkit.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace qacs {

/// Scenario plus Monte-Carlo plan, as loaded from a config file.
struct run_config {
    scenario_config scenario;
    sim_plan plan;

    bool operator==(const run_config&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view text, const std::string& key)
{
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && text.front() == '+')
        ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || text.empty())
        throw config_error(key + ": cannot parse '" + std::string(text) + "' as a number");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value))
            throw config_error(key + ": value must be finite");
    }
    return value;
}

using setter = std::function<void(run_config&, std::string_view)>;

template <class T, class Get>
setter number_setter(std::string key, Get get)
{
    return [key, get](run_config& c, std::string_view v) { get(c) = parse_number<T>(v, key); };
}

inline const std::map<std::string, setter>& config_keys()
{
    static const std::map<std::string, setter> keys = [] {
        std::map<std::string, setter> k;
        auto add_int = [&k](const std::string& key, auto get) { k[key] = number_setter<int>(key, get); };
        auto add_u64 = [&k](const std::string& key, auto get) {
            k[key] = number_setter<std::uint64_t>(key, get);
        };
        auto add_real = [&k](const std::string& key, auto get) { k[key] = number_setter<double>(key, get); };

        add_int("scenario.n_fap_antennas", [](run_config& c) -> int& { return c.scenario.n_fap_antennas; });
        add_int("scenario.n_mbs_antennas", [](run_config& c) -> int& { return c.scenario.n_mbs_antennas; });
        add_int("scenario.n_femto_mts", [](run_config& c) -> int& { return c.scenario.n_femto_mts; });
        add_int("scenario.n_macro_mts", [](run_config& c) -> int& { return c.scenario.n_macro_mts; });
        add_real("scenario.p_fap", [](run_config& c) -> double& { return c.scenario.p_fap; });
        add_real("scenario.p_mbs", [](run_config& c) -> double& { return c.scenario.p_mbs; });
        add_real("scenario.noise_femto", [](run_config& c) -> double& { return c.scenario.noise_femto; });
        add_real("scenario.noise_macro", [](run_config& c) -> double& { return c.scenario.noise_macro; });
        add_real("scenario.gamma_f_req", [](run_config& c) -> double& { return c.scenario.gamma_f_req; });
        add_real("scenario.gamma_m_req", [](run_config& c) -> double& { return c.scenario.gamma_m_req; });
        add_real("scenario.macro_radius", [](run_config& c) -> double& { return c.scenario.macro_radius; });
        add_real("scenario.femto_radius", [](run_config& c) -> double& { return c.scenario.femto_radius; });
        add_real("scenario.mbs_fap_distance",
                 [](run_config& c) -> double& { return c.scenario.mbs_fap_distance; });
        add_u64("scenario.rng_seed", [](run_config& c) -> std::uint64_t& { return c.scenario.rng_seed; });

        for (int i = 0; i < 4; ++i) {
            const std::string name = std::string("pathloss.") + to_string(static_cast<link_class>(i));
            add_real(name + "_intercept",
                     [i](run_config& c) -> double& { return c.scenario.path_loss_params.classes[i].intercept; });
            add_real(name + "_slope",
                     [i](run_config& c) -> double& { return c.scenario.path_loss_params.classes[i].slope; });
            add_real(name + "_wall_loss",
                     [i](run_config& c) -> double& { return c.scenario.path_loss_params.classes[i].wall_loss; });
        }

        add_u64("sim.frames", [](run_config& c) -> std::uint64_t& { return c.plan.frames; });
        add_int("sim.drops", [](run_config& c) -> int& { return c.plan.drops; });
        add_u64("sim.batch_size", [](run_config& c) -> std::uint64_t& { return c.plan.batch_size; });
        add_int("sim.threads", [](run_config& c) -> int& { return c.plan.threads; });
        add_real("sim.abs_tol", [](run_config& c) -> double& { return c.plan.quad.abs_tol; });
        add_real("sim.rel_tol", [](run_config& c) -> double& { return c.plan.quad.rel_tol; });
        return k;
    }();
    return keys;
}

} // namespace detail

/// All accepted `section.key` names.
inline std::vector<std::string> config_key_names()
{
    std::vector<std::string> out;
    for (const auto& [k, _] : detail::config_keys())
        out.push_back(k);
    return out;
}

/// Applies one `section.key = value` setting.
inline void apply_setting(run_config& cfg, const std::string& key, std::string_view value)
{
    const auto& keys = detail::config_keys();
    const auto it = keys.find(key);
    if (it == keys.end())
        throw config_error("unknown key '" + key + "'");
    it->second(cfg, detail::trim(value));
}

/// Applies a `section.key=value` override as given on the command line.
inline void apply_override(run_config& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw config_error("override '" + std::string(assignment) + "' is not of the form section.key=value");
    apply_setting(cfg, std::string(detail::trim(assignment.substr(0, eq))), assignment.substr(eq + 1));
}

/// Copies the seed into the plan and checks both halves.
inline void finalize(run_config& cfg)
{
    cfg.plan.seed = cfg.scenario.rng_seed;
    cfg.scenario.validate();
    cfg.plan.validate();
}

/// Parses INI text: [section] headers, `key = value` lines, `#` comments.
/// Unlisted keys keep their defaults. Errors name the line and the key.
inline run_config parse_config(std::istream& in, const std::string& source = "<config>")
{
    run_config cfg;
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view text = line;
        if (const auto hash = text.find('#'); hash != std::string_view::npos)
            text = text.substr(0, hash);
        text = detail::trim(text);
        if (text.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (text.front() == '[') {
            if (text.back() != ']')
                throw config_error(where + "unterminated section header");
            section = std::string(detail::trim(text.substr(1, text.size() - 2)));
            if (section != "scenario" && section != "pathloss" && section != "sim")
                throw config_error(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw config_error(where + "expected 'key = value'");
        if (section.empty())
            throw config_error(where + "setting outside of a section");
        const std::string key = section + "." + std::string(detail::trim(text.substr(0, eq)));
        try {
            apply_setting(cfg, key, text.substr(eq + 1));
        } catch (const config_error& e) {
            throw config_error(where + e.what());
        }
    }
    finalize(cfg);
    return cfg;
}

inline run_config load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

/// Canonical INI text of a config; parsing it back yields the same config.
inline std::string to_ini(const run_config& cfg)
{
    auto real = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    const auto& s = cfg.scenario;
    std::ostringstream o;
    o << "[scenario]\n"
      << "n_fap_antennas = " << s.n_fap_antennas << "\n"
      << "n_mbs_antennas = " << s.n_mbs_antennas << "\n"
      << "n_femto_mts = " << s.n_femto_mts << "\n"
      << "n_macro_mts = " << s.n_macro_mts << "\n"
      << "p_fap = " << real(s.p_fap) << "\n"
      << "p_mbs = " << real(s.p_mbs) << "\n"
      << "noise_femto = " << real(s.noise_femto) << "\n"
      << "noise_macro = " << real(s.noise_macro) << "\n"
      << "gamma_f_req = " << real(s.gamma_f_req) << "\n"
      << "gamma_m_req = " << real(s.gamma_m_req) << "\n"
      << "macro_radius = " << real(s.macro_radius) << "\n"
      << "femto_radius = " << real(s.femto_radius) << "\n"
      << "mbs_fap_distance = " << real(s.mbs_fap_distance) << "\n"
      << "rng_seed = " << s.rng_seed << "\n\n[pathloss]\n";
    for (int i = 0; i < 4; ++i) {
        const std::string name = to_string(static_cast<link_class>(i));
        const auto& c = s.path_loss_params.classes[i];
        o << name << "_intercept = " << real(c.intercept) << "\n"
          << name << "_slope = " << real(c.slope) << "\n"
          << name << "_wall_loss = " << real(c.wall_loss) << "\n";
    }
    const auto& p = cfg.plan;
    o << "\n[sim]\n"
      << "frames = " << p.frames << "\n"
      << "drops = " << p.drops << "\n"
      << "batch_size = " << p.batch_size << "\n"
      << "threads = " << p.threads << "\n"
      << "abs_tol = " << real(p.quad.abs_tol) << "\n"
      << "rel_tol = " << real(p.quad.rel_tol) << "\n";
    return o.str();
}

} // namespace qacs
