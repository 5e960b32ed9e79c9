// qacs: command-line front end for the coordinated femto/macro scheduling simulator.

#include "qacs/config.hpp"
#include "qacs/report.hpp"
#include "qacs/simkit.hpp"
#include "qacs/validation.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

enum exit_code { ok = 0, usage = 1, config = 2, numerical = 3 };

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// "a:b:step" (inclusive) or a single value.
std::vector<double> parse_values(const std::string& text)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string::npos)
            break;
        start = colon + 1;
    }
    auto number = [&](const std::string& s) {
        try {
            return qacs::detail::parse_number<double>(qacs::detail::trim(s), "--values");
        } catch (const qacs::config_error& e) {
            throw usage_error(e.what());
        }
    };
    if (parts.size() == 1)
        return {number(parts[0])};
    if (parts.size() != 3)
        throw usage_error("--values expects a:b:step");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || b < a)
        throw usage_error("--values needs step > 0 and b >= a");
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long i = 0; i <= n; ++i)
        out.push_back(a + static_cast<double>(i) * step);
    return out;
}

void print_report(const qacs::rate_report& r)
{
    std::printf("frames %llu  macro active %llu  QoS violations %llu\n",
                static_cast<unsigned long long>(r.frames), static_cast<unsigned long long>(r.macro_active_frames),
                static_cast<unsigned long long>(r.qos_violations));
    std::printf("R_F analytic %.6f  empirical %.6f +- %.6f\n", r.r_f_analytic, r.r_f_empirical, r.r_f_ci);
    std::printf("R_M analytic %.6f  empirical %.6f +- %.6f\n", r.r_m_analytic, r.r_m_empirical, r.r_m_ci);
    std::printf("E[N_Q] %.4f  E[N_B] %.4f\n", r.e_nq, r.e_nb);
}

void print_notes(const qacs::simulation_result& res)
{
    for (std::size_t d = 0; d < res.drops.size(); ++d)
        if (res.drops[d].analysis)
            for (const auto& n : res.drops[d].analysis->notes)
                std::fprintf(stderr, "drop %zu: %s\n", d, n.c_str());
}

int run(const std::string& command, const qacs::run_config& cfg, const std::filesystem::path& out_dir,
        const std::optional<std::string>& axis_name, const std::optional<std::string>& values_text)
{
    {
        auto f = qacs::open_output(out_dir, "config.ini");
        f << qacs::to_ini(cfg);
    }
    if (command == "simulate") {
        const auto res = qacs::simulate(cfg.scenario, cfg.plan);
        print_notes(res);
        {
            auto f = qacs::open_output(out_dir, "rates.csv");
            qacs::write_rates_csv(f, res);
        }
        {
            auto f = qacs::open_output(out_dir, "pmf.csv");
            qacs::write_pmf_csv(f, res);
        }
        {
            auto f = qacs::open_output(out_dir, "fairness.csv");
            qacs::write_fairness_csv(f, qacs::fairness_from(res.drops.front().totals));
        }
        print_report(res.combined);
        return ok;
    }
    if (command == "sweep") {
        if (!axis_name || !values_text)
            throw usage_error("sweep needs --axis and --values");
        const auto axis = qacs::parse_axis(*axis_name);
        const auto values = parse_values(*values_text);
        const auto results = qacs::sweep(cfg.scenario, cfg.plan, axis, values);
        for (const auto& r : results)
            print_notes(r);
        auto f = qacs::open_output(out_dir, std::string("sweep_") + qacs::to_string(axis) + ".csv");
        qacs::write_sweep_csv(f, values, results);
        std::printf("%zu sweep points written\n", values.size());
        return ok;
    }
    if (command == "analyze") {
        std::vector<qacs::analytics::drop_analysis> drops;
        const auto shape = qacs::analytics::analysis_shape::from(cfg.scenario);
        const auto radio = qacs::radio_budget::from(cfg.scenario);
        for (int d = 0; d < cfg.plan.drops; ++d) {
            const auto gains = qacs::drop_layout(cfg.scenario, cfg.plan.seed, d);
            drops.push_back(qacs::analytics::analyze_drop(shape, qacs::link_budgets(radio, gains), cfg.plan.quad));
            for (const auto& n : drops.back().notes)
                std::fprintf(stderr, "drop %d: %s\n", d, n.c_str());
            std::printf("drop %d: R_F %.6f  R_M %.6f  E[N_Q] %.4f  E[N_B] %.4f\n", d, drops.back().r_f,
                        drops.back().r_m, drops.back().expected_nq(), drops.back().expected_nb());
        }
        auto f = qacs::open_output(out_dir, "analysis.csv");
        qacs::write_analysis_csv(f, drops);
        return ok;
    }
    // validate
    const auto rep = qacs::run_validation(cfg);
    qacs::write_validation_text(std::cout, rep);
    {
        auto f = qacs::open_output(out_dir, "validation.txt");
        qacs::write_validation_text(f, rep);
    }
    {
        auto f = qacs::open_output(out_dir, "validation.csv");
        qacs::write_validation_csv(f, rep);
    }
    return rep.passed() ? ok : numerical;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"QoS-aware coordinated scheduling simulator"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> frames;
    std::optional<int> threads;
    std::optional<std::string> axis;
    std::optional<std::string> values;

    app.add_option("command", command, "simulate | sweep | analyze | validate")
        ->required()
        ->check(CLI::IsMember({"simulate", "sweep", "analyze", "validate"}));
    app.add_option("--config", config_path, "INI config file")->required();
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--set", overrides, "section.key=value override (repeatable)");
    app.add_option("--seed", seed, "RNG seed (scenario.rng_seed)");
    app.add_option("--frames", frames, "frames per drop (sim.frames)");
    app.add_option("--threads", threads, "worker cap (sim.threads)");
    app.add_option("--axis", axis, "sweep axis: gamma_f | gamma_m | p_fap | p_mbs");
    app.add_option("--values", values, "sweep values a:b:step (dB or dBm)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }

    try {
        qacs::run_config cfg = qacs::load_config(config_path);
        for (const auto& o : overrides)
            qacs::apply_override(cfg, o);
        if (seed)
            cfg.scenario.rng_seed = *seed;
        if (frames)
            cfg.plan.frames = *frames;
        if (threads)
            cfg.plan.threads = *threads;
        qacs::finalize(cfg);
        return run(command, cfg, out_dir, axis, values);
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return usage;
    } catch (const qacs::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return config;
    } catch (const qacs::io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return config;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return numerical;
    }
}
