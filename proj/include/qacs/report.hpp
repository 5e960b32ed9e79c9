#pragma once

#include "qacs/simkit.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qacs {

class io_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Locale-independent, fixed-precision number formatting for CSV cells.
inline std::string csv_number(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_number(std::uint64_t v) { return std::to_string(v); }

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            out << ',';
        out << cells[i];
    }
    out << '\n';
}

inline const char* sweep_csv_header =
    "axis_value_db,r_f_analytic,r_f_empirical,r_f_ci,r_m_analytic,r_m_empirical,r_m_ci,e_nq,e_nb";

inline void write_sweep_csv(std::ostream& out, std::span<const double> values,
                            std::span<const simulation_result> results)
{
    if (values.size() != results.size())
        throw std::invalid_argument("write_sweep_csv: values and results differ in length");
    out << sweep_csv_header << '\n';
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& r = results[i].combined;
        write_csv_row(out, {csv_number(values[i]), csv_number(r.r_f_analytic), csv_number(r.r_f_empirical),
                            csv_number(r.r_f_ci), csv_number(r.r_m_analytic), csv_number(r.r_m_empirical),
                            csv_number(r.r_m_ci), csv_number(r.e_nq), csv_number(r.e_nb)});
    }
}

inline const char* rates_csv_header = "drop,frames,r_f_analytic,r_f_empirical,r_f_ci,r_m_analytic,r_m_empirical,"
                                      "r_m_ci,e_nq,e_nb,e_nq_analytic,e_nb_analytic,macro_active_frames,"
                                      "qos_violations";

namespace detail {

inline std::vector<std::string> rates_row(const std::string& label, const rate_report& r)
{
    return {label,
            csv_number(r.frames),
            csv_number(r.r_f_analytic),
            csv_number(r.r_f_empirical),
            csv_number(r.r_f_ci),
            csv_number(r.r_m_analytic),
            csv_number(r.r_m_empirical),
            csv_number(r.r_m_ci),
            csv_number(r.e_nq),
            csv_number(r.e_nb),
            csv_number(mean_index(r.pmf_nq)),
            csv_number(mean_index(r.pmf_nb)),
            csv_number(r.macro_active_frames),
            csv_number(r.qos_violations)};
}

} // namespace detail

/// One row per drop followed by the drop average (label "all").
inline void write_rates_csv(std::ostream& out, const simulation_result& res)
{
    out << rates_csv_header << '\n';
    for (std::size_t d = 0; d < res.drops.size(); ++d)
        write_csv_row(out, detail::rates_row(std::to_string(d), res.drops[d].report));
    write_csv_row(out, detail::rates_row("all", res.combined));
}

inline void write_pmf_csv(std::ostream& out, const simulation_result& res)
{
    out << "drop,n,pmf_nq_analytic,pmf_nq_empirical,pmf_nb_analytic,pmf_nb_empirical\n";
    auto rows = [&out](const std::string& label, const rate_report& r) {
        const std::size_t n = std::max(r.pmf_nq.size(), r.pmf_nq_empirical.size());
        auto at = [](const std::vector<double>& v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };
        for (std::size_t i = 0; i < n; ++i)
            write_csv_row(out, {label, std::to_string(i), csv_number(at(r.pmf_nq, i)),
                                csv_number(at(r.pmf_nq_empirical, i)), csv_number(at(r.pmf_nb, i)),
                                csv_number(at(r.pmf_nb_empirical, i))});
    };
    for (std::size_t d = 0; d < res.drops.size(); ++d)
        rows(std::to_string(d), res.drops[d].report);
    rows("all", res.combined);
}

inline void write_fairness_csv(std::ostream& out, const fairness_report& f)
{
    out << "tier,mt,frequency,expected_frequency\n";
    const double uniform = f.femto_frequency.empty() ? 0.0 : 1.0 / static_cast<double>(f.femto_frequency.size());
    for (std::size_t k = 0; k < f.femto_frequency.size(); ++k)
        write_csv_row(out, {"femto", std::to_string(k), csv_number(f.femto_frequency[k]), csv_number(uniform)});
    for (std::size_t k = 0; k < f.macro_frequency.size(); ++k)
        write_csv_row(out, {"macro", std::to_string(k), csv_number(f.macro_frequency[k]),
                            csv_number(f.macro_expected_frequency[k])});
}

/// Analytic-only summary: one row per drop.
inline void write_analysis_csv(std::ostream& out, const std::vector<analytics::drop_analysis>& drops)
{
    out << "drop,r_f_analytic,r_m_analytic,e_nq_analytic,e_nb_analytic,macro_qos_reachable\n";
    for (std::size_t d = 0; d < drops.size(); ++d) {
        const auto& a = drops[d];
        write_csv_row(out, {std::to_string(d), csv_number(a.r_f), csv_number(a.r_m), csv_number(a.expected_nq()),
                            csv_number(a.expected_nb()), a.unreachable_macro_qos ? "0" : "1"});
    }
}

/// Creates `dir` if needed and opens `dir/name` for writing.
inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw io_error("cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write '" + path.string() + "'");
    return out;
}

} // namespace qacs
