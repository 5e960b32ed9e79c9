#pragma once

#include "qacs/analytics/throughput.hpp"
#include "qacs/channel.hpp"
#include "qacs/model.hpp"
#include "qacs/numeric.hpp"
#include "qacs/qacs.hpp"
#include "qacs/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qacs {

struct sim_plan {
    std::uint64_t frames = 1'000'000;
    int drops = 1;
    std::uint64_t batch_size = 10'000;
    std::uint64_t seed = 1;
    int threads = 1;          ///< worker cap; never changes results
    bool analytics = true;    ///< evaluate the analytic rates of each drop
    quadrature quad{};

    bool operator==(const sim_plan&) const = default;

    void validate() const
    {
        if (batch_size < 1)
            throw config_error("sim.batch_size must be >= 1");
        if (frames < batch_size)
            throw config_error("sim.frames must be >= sim.batch_size");
        if (drops < 1)
            throw config_error("sim.drops must be >= 1");
        if (threads < 1)
            throw config_error("threads must be >= 1");
        if (!(quad.abs_tol > 0.0) || !(quad.rel_tol > 0.0))
            throw config_error("sim.abs_tol and sim.rel_tol must be > 0");
    }
};

struct empirical_stats {
    double mean = 0.0;
    double ci95_halfwidth = 0.0;
    std::uint64_t n_samples = 0;
    std::vector<std::uint64_t> histogram;
};

/// Sums over a contiguous block of frames.
struct frame_tally {
    std::uint64_t frames = 0;
    double sum_rf = 0.0;
    double sum_rf2 = 0.0;
    double sum_rm = 0.0;
    double sum_rm2 = 0.0;
    std::vector<std::uint64_t> nq_hist;
    std::vector<std::uint64_t> nb_hist;
    std::vector<std::uint64_t> femto_selected;
    std::vector<std::uint64_t> macro_selected;
    std::vector<double> macro_expected; ///< sum over frames of 1/(requesters of the served beam)
    std::vector<double> macro_variance; ///< matching Bernoulli variances
    std::uint64_t macro_active = 0;
    std::uint64_t qos_violations = 0;

    frame_tally() = default;
    frame_tally(int n_m, int k_f, int k_m)
        : nq_hist(n_m + 1, 0), nb_hist(n_m + 1, 0), femto_selected(k_f, 0), macro_selected(k_m, 0),
          macro_expected(k_m, 0.0), macro_variance(k_m, 0.0)
    {
    }

    void record(const schedule_outcome& out, const qos_thresholds& qos)
    {
        ++frames;
        const double rf = log2_1p(out.sinr_femto);
        sum_rf += rf;
        sum_rf2 += rf * rf;
        ++nq_hist[out.n_qualified()];
        ++nb_hist[out.n_best_beams()];
        ++femto_selected[out.femto_mt];
        if (out.macro_active) {
            ++macro_active;
            const double rm = log2_1p(*out.sinr_macro);
            sum_rm += rm;
            sum_rm2 += rm * rm;
            ++macro_selected[*out.macro_mt];
            int requesters = 0;
            for (const auto& [mt, beam] : out.macro_requests)
                requesters += beam == *out.macro_beam;
            const double share = 1.0 / requesters;
            for (const auto& [mt, beam] : out.macro_requests)
                if (beam == *out.macro_beam) {
                    macro_expected[mt] += share;
                    macro_variance[mt] += share * (1.0 - share);
                }
            if (out.sinr_femto < qos.gamma_f || *out.sinr_macro < qos.gamma_m)
                ++qos_violations;
        }
    }

    void merge(const frame_tally& o)
    {
        if (nq_hist.empty()) {
            *this = o;
            return;
        }
        frames += o.frames;
        sum_rf += o.sum_rf;
        sum_rf2 += o.sum_rf2;
        sum_rm += o.sum_rm;
        sum_rm2 += o.sum_rm2;
        auto add = [](auto& a, const auto& b) {
            for (std::size_t i = 0; i < a.size(); ++i)
                a[i] += b[i];
        };
        add(nq_hist, o.nq_hist);
        add(nb_hist, o.nb_hist);
        add(femto_selected, o.femto_selected);
        add(macro_selected, o.macro_selected);
        add(macro_expected, o.macro_expected);
        add(macro_variance, o.macro_variance);
        macro_active += o.macro_active;
        qos_violations += o.qos_violations;
    }
};

namespace detail {

/// Mean with a 95% batch-means interval; falls back to the i.i.d. formula with one batch.
inline empirical_stats batch_mean_stats(std::span<const frame_tally> batches, bool macro)
{
    empirical_stats s;
    double total = 0.0, total2 = 0.0;
    for (const auto& b : batches) {
        s.n_samples += b.frames;
        total += macro ? b.sum_rm : b.sum_rf;
        total2 += macro ? b.sum_rm2 : b.sum_rf2;
    }
    if (s.n_samples == 0)
        return s;
    const double n = static_cast<double>(s.n_samples);
    s.mean = total / n;
    if (batches.size() >= 2) {
        double ss = 0.0;
        for (const auto& b : batches) {
            const double m = (macro ? b.sum_rm : b.sum_rf) / static_cast<double>(b.frames);
            ss += (m - s.mean) * (m - s.mean);
        }
        const double k = static_cast<double>(batches.size());
        s.ci95_halfwidth = 1.96 * std::sqrt(ss / (k - 1.0) / k);
    } else {
        const double var = std::max(0.0, total2 / n - s.mean * s.mean);
        s.ci95_halfwidth = n > 1.0 ? 1.96 * std::sqrt(var / (n - 1.0)) : 0.0;
    }
    return s;
}

inline std::vector<double> normalize(const std::vector<std::uint64_t>& counts)
{
    std::uint64_t total = 0;
    for (auto c : counts)
        total += c;
    std::vector<double> out(counts.size(), 0.0);
    if (total > 0)
        for (std::size_t i = 0; i < counts.size(); ++i)
            out[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
    return out;
}

inline double mean_index(const std::vector<double>& pmf)
{
    double e = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i)
        e += i * pmf[i];
    return e;
}

} // namespace detail

/// Monte-Carlo result of one drop.
struct drop_result {
    drop_gains gains;
    rate_report report;
    frame_tally totals;
    std::vector<frame_tally> batches;
    std::optional<analytics::drop_analysis> analysis;
};

inline drop_gains drop_layout(const scenario_config& cfg, std::uint64_t seed, std::uint64_t drop)
{
    auto rng = substream(seed, drop, drop_layout_index);
    return gains_for(cfg, drop_users(cfg, rng));
}

/// Runs plan.frames frames of the protocol on fixed path gains.
inline drop_result simulate_gains(const scenario_config& cfg, const drop_gains& gains, const sim_plan& plan,
                                  std::uint64_t drop_index = 0)
{
    cfg.validate();
    plan.validate();
    const auto qos = qos_thresholds::from(cfg);
    const std::uint64_t n_batches = (plan.frames + plan.batch_size - 1) / plan.batch_size;
    std::vector<frame_tally> batches(n_batches);

    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::uint64_t b = next++; b < n_batches; b = next++) {
                frame_tally t(cfg.n_mbs_antennas, cfg.n_femto_mts, cfg.n_macro_mts);
                const std::uint64_t begin = b * plan.batch_size;
                const std::uint64_t end = std::min(plan.frames, begin + plan.batch_size);
                for (std::uint64_t f = begin; f < end; ++f) {
                    auto rng = substream(plan.seed, drop_index, f);
                    const auto frame = realize_frame(cfg, gains, rng);
                    t.record(run_frame(frame, qos, rng), qos);
                }
                batches[b] = std::move(t);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next = n_batches;
        }
    };
    const int n_workers = static_cast<int>(std::min<std::uint64_t>(plan.threads, n_batches));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);

    drop_result out;
    out.gains = gains;
    for (const auto& b : batches)
        out.totals.merge(b);

    const auto rf = detail::batch_mean_stats(batches, false);
    const auto rm = detail::batch_mean_stats(batches, true);
    auto& r = out.report;
    r.r_f_empirical = rf.mean;
    r.r_f_ci = rf.ci95_halfwidth;
    r.r_m_empirical = rm.mean;
    r.r_m_ci = rm.ci95_halfwidth;
    r.pmf_nq_empirical = detail::normalize(out.totals.nq_hist);
    r.pmf_nb_empirical = detail::normalize(out.totals.nb_hist);
    r.e_nq = detail::mean_index(r.pmf_nq_empirical);
    r.e_nb = detail::mean_index(r.pmf_nb_empirical);
    r.frames = out.totals.frames;
    r.qos_violations = out.totals.qos_violations;
    r.macro_active_frames = out.totals.macro_active;

    if (plan.analytics) {
        auto a = analytics::analyze_drop(analytics::analysis_shape::from(cfg),
                                         link_budgets(radio_budget::from(cfg), gains), plan.quad);
        r.r_f_analytic = a.r_f;
        r.r_m_analytic = a.r_m;
        r.pmf_nq = a.pmf_nq;
        r.pmf_nb = a.pmf_nb;
        r.analytic_available = true;
        out.analysis = std::move(a);
    }
    out.batches = std::move(batches);
    return out;
}

struct simulation_result {
    std::vector<drop_result> drops;
    rate_report combined; ///< average over drops
};

/// Equal-weight average of per-drop reports; intervals combine as independent estimates.
inline rate_report combine_reports(std::span<const rate_report> reports)
{
    rate_report c;
    if (reports.empty())
        return c;
    const double d = static_cast<double>(reports.size());
    double ci_f = 0.0, ci_m = 0.0;
    c.analytic_available = true;
    auto acc = [d](std::vector<double>& into, const std::vector<double>& v) {
        if (into.size() < v.size())
            into.resize(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i)
            into[i] += v[i] / d;
    };
    for (const auto& r : reports) {
        c.r_f_analytic += r.r_f_analytic / d;
        c.r_m_analytic += r.r_m_analytic / d;
        c.r_f_empirical += r.r_f_empirical / d;
        c.r_m_empirical += r.r_m_empirical / d;
        ci_f += r.r_f_ci * r.r_f_ci;
        ci_m += r.r_m_ci * r.r_m_ci;
        acc(c.pmf_nq, r.pmf_nq);
        acc(c.pmf_nb, r.pmf_nb);
        acc(c.pmf_nq_empirical, r.pmf_nq_empirical);
        acc(c.pmf_nb_empirical, r.pmf_nb_empirical);
        c.e_nq += r.e_nq / d;
        c.e_nb += r.e_nb / d;
        c.frames += r.frames;
        c.qos_violations += r.qos_violations;
        c.macro_active_frames += r.macro_active_frames;
        c.analytic_available = c.analytic_available && r.analytic_available;
    }
    c.r_f_ci = std::sqrt(ci_f) / d;
    c.r_m_ci = std::sqrt(ci_m) / d;
    return c;
}

inline simulation_result simulate(const scenario_config& cfg, const sim_plan& plan)
{
    cfg.validate();
    plan.validate();
    simulation_result out;
    std::vector<rate_report> reports;
    for (int d = 0; d < plan.drops; ++d) {
        out.drops.push_back(simulate_gains(cfg, drop_layout(cfg, plan.seed, d), plan, d));
        reports.push_back(out.drops.back().report);
    }
    out.combined = combine_reports(reports);
    return out;
}

enum class sweep_axis { gamma_f, gamma_m, p_fap, p_mbs };

inline sweep_axis parse_axis(const std::string& s)
{
    if (s == "gamma_f")
        return sweep_axis::gamma_f;
    if (s == "gamma_m")
        return sweep_axis::gamma_m;
    if (s == "p_fap")
        return sweep_axis::p_fap;
    if (s == "p_mbs")
        return sweep_axis::p_mbs;
    throw config_error("unknown sweep axis '" + s + "' (expected gamma_f|gamma_m|p_fap|p_mbs)");
}

inline const char* to_string(sweep_axis a)
{
    switch (a) {
    case sweep_axis::gamma_f: return "gamma_f";
    case sweep_axis::gamma_m: return "gamma_m";
    case sweep_axis::p_fap: return "p_fap";
    case sweep_axis::p_mbs: return "p_mbs";
    }
    return "?";
}

inline scenario_config with_axis(scenario_config cfg, sweep_axis axis, double value)
{
    switch (axis) {
    case sweep_axis::gamma_f: cfg.gamma_f_req = value; break;
    case sweep_axis::gamma_m: cfg.gamma_m_req = value; break;
    case sweep_axis::p_fap: cfg.p_fap = value; break;
    case sweep_axis::p_mbs: cfg.p_mbs = value; break;
    }
    return cfg;
}

/// One report per axis value. Every point reuses the plan seed (common random numbers).
inline std::vector<simulation_result> sweep(const scenario_config& cfg, const sim_plan& plan, sweep_axis axis,
                                            std::span<const double> values)
{
    if (values.empty())
        throw config_error("sweep: no axis values");
    if (!std::is_sorted(values.begin(), values.end()))
        throw config_error("sweep: axis values must be sorted");
    std::vector<simulation_result> out;
    for (double v : values)
        out.push_back(simulate(with_axis(cfg, axis, v), plan));
    return out;
}

struct fairness_report {
    std::vector<double> femto_frequency;
    double femto_chi2 = 0.0;       ///< K_F - 1 degrees of freedom
    double femto_max_z = 0.0;      ///< largest |count - N/K_F| / binomial sigma
    std::vector<double> macro_frequency;
    std::vector<double> macro_expected_frequency; ///< under uniform choice among same-beam requesters
    double macro_chi2 = 0.0;
    double macro_max_z = 0.0;
    std::uint64_t frames = 0;
};

inline fairness_report fairness_from(const frame_tally& t)
{
    fairness_report r;
    r.frames = t.frames;
    const double n = static_cast<double>(t.frames);
    const double k_f = static_cast<double>(t.femto_selected.size());
    const double p = 1.0 / k_f;
    for (auto c : t.femto_selected) {
        const double obs = static_cast<double>(c);
        r.femto_frequency.push_back(obs / n);
        const double expect = n * p;
        r.femto_chi2 += (obs - expect) * (obs - expect) / expect;
        const double sigma = std::sqrt(n * p * (1.0 - p));
        if (sigma > 0.0)
            r.femto_max_z = std::max(r.femto_max_z, std::abs(obs - expect) / sigma);
    }
    for (std::size_t k = 0; k < t.macro_selected.size(); ++k) {
        const double obs = static_cast<double>(t.macro_selected[k]);
        const double expect = t.macro_expected[k];
        r.macro_frequency.push_back(obs / n);
        r.macro_expected_frequency.push_back(expect / n);
        if (expect > 0.0)
            r.macro_chi2 += (obs - expect) * (obs - expect) / expect;
        if (t.macro_variance[k] > 0.0)
            r.macro_max_z = std::max(r.macro_max_z, std::abs(obs - expect) / std::sqrt(t.macro_variance[k]));
    }
    return r;
}

/// Selection frequencies of the first drop of a plan.
inline fairness_report fairness_audit(const scenario_config& cfg, sim_plan plan)
{
    plan.analytics = false;
    const auto res = simulate_gains(cfg, drop_layout(cfg, plan.seed, 0), plan, 0);
    return fairness_from(res.totals);
}

} // namespace qacs
