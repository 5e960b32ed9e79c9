#pragma once

#include "qacs/units.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qacs {

/// Raised for invalid scenario or plan parameters.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class link_class : int {
    mbs_outdoor = 0, ///< MBS -> macro-MT
    mbs_indoor = 1,  ///< MBS -> femto-MT (through a wall)
    fap_indoor = 2,  ///< FAP -> femto-MT
    fap_outdoor = 3, ///< FAP -> macro-MT (through a wall)
};

inline const char* to_string(link_class c)
{
    switch (c) {
    case link_class::mbs_outdoor: return "mbs_outdoor";
    case link_class::mbs_indoor: return "mbs_indoor";
    case link_class::fap_indoor: return "fap_indoor";
    case link_class::fap_outdoor: return "fap_outdoor";
    }
    return "?";
}

/// Log-distance loss: intercept + slope * log10(d) + wall_loss, all in dB.
struct path_loss_coefficients {
    double intercept = 0.0;
    double slope = 20.0;
    double wall_loss = 0.0;

    bool operator==(const path_loss_coefficients&) const = default;
};

struct path_loss_model {
    std::array<path_loss_coefficients, 4> classes = {{
        {15.3, 37.6, 0.0},  // mbs_outdoor
        {15.3, 37.6, 10.0}, // mbs_indoor
        {38.5, 20.0, 0.0},  // fap_indoor
        {38.5, 20.0, 10.0}, // fap_outdoor
    }};

    bool operator==(const path_loss_model&) const = default;

    [[nodiscard]] const path_loss_coefficients& operator[](link_class c) const
    {
        return classes[static_cast<int>(c)];
    }
    [[nodiscard]] path_loss_coefficients& operator[](link_class c)
    {
        return classes[static_cast<int>(c)];
    }

    void validate() const
    {
        for (int i = 0; i < 4; ++i) {
            const auto& c = classes[i];
            const std::string name = to_string(static_cast<link_class>(i));
            if (!(c.slope > 0.0) || !std::isfinite(c.slope))
                throw config_error("pathloss." + name + "_slope must be > 0");
            if (!(c.wall_loss >= 0.0) || !std::isfinite(c.wall_loss))
                throw config_error("pathloss." + name + "_wall_loss must be >= 0");
            if (!std::isfinite(c.intercept))
                throw config_error("pathloss." + name + "_intercept must be finite");
        }
    }
};

/// Scenario parameters as the user states them (dB / dBm at this boundary).
/// Defaults are the Case I layout with the MBS-FAP distance of the power-sweep scenario.
struct scenario_config {
    int n_fap_antennas = 2;  // N_F
    int n_mbs_antennas = 4;  // N_M
    int n_femto_mts = 5;     // K_F
    int n_macro_mts = 50;    // K_M
    double p_fap = 20.0;     // dBm
    double p_mbs = 50.0;     // dBm
    double noise_femto = -104.0; // dBm
    double noise_macro = -104.0; // dBm
    double gamma_f_req = 20.0;   // dB
    double gamma_m_req = 10.0;   // dB
    double macro_radius = 1000.0;    // m
    double femto_radius = 20.0;      // m
    double mbs_fap_distance = 500.0; // m
    path_loss_model path_loss_params{};
    std::uint64_t rng_seed = 1;

    bool operator==(const scenario_config&) const = default;

    void validate() const
    {
        auto count = [](int v, const char* key) {
            if (v < 1)
                throw config_error(std::string("scenario.") + key + " must be >= 1");
        };
        count(n_fap_antennas, "n_fap_antennas");
        count(n_mbs_antennas, "n_mbs_antennas");
        count(n_femto_mts, "n_femto_mts");
        count(n_macro_mts, "n_macro_mts");
        auto finite = [](double v, const char* key) {
            if (!std::isfinite(v))
                throw config_error(std::string("scenario.") + key + " must be finite");
        };
        finite(p_fap, "p_fap");
        finite(p_mbs, "p_mbs");
        finite(noise_femto, "noise_femto");
        finite(noise_macro, "noise_macro");
        finite(gamma_f_req, "gamma_f_req");
        finite(gamma_m_req, "gamma_m_req");
        auto positive = [](double v, const char* key) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw config_error(std::string("scenario.") + key + " must be > 0");
        };
        positive(macro_radius, "macro_radius");
        positive(femto_radius, "femto_radius");
        positive(mbs_fap_distance, "mbs_fap_distance");
        if (mbs_fap_distance + femto_radius > macro_radius)
            throw config_error("scenario.mbs_fap_distance: femto disk must lie inside the macro disk");
        path_loss_params.validate();
    }
};

/// Transmit powers and noise in linear units (mW).
struct radio_budget {
    double p_fap = 1.0;
    double p_mbs = 1.0;
    double noise_femto = 1.0;
    double noise_macro = 1.0;

    static radio_budget from(const scenario_config& cfg)
    {
        return {db_to_linear(cfg.p_fap), db_to_linear(cfg.p_mbs), db_to_linear(cfg.noise_femto),
                db_to_linear(cfg.noise_macro)};
    }
};

/// SINR thresholds in linear scale.
struct qos_thresholds {
    double gamma_f = 1.0;
    double gamma_m = 1.0;

    static qos_thresholds from(const scenario_config& cfg)
    {
        return {db_to_linear(cfg.gamma_f_req), db_to_linear(cfg.gamma_m_req)};
    }
};

/// lambda_F = P_M beta_M / (P_F beta_F), mu_F = sigma_F^2 / (P_F beta_F).
struct femto_link_budget {
    double lambda_f = 1.0;
    double mu_f = 1.0;
};

/// lambda_M = P_F alpha_F / (P_M alpha_M), mu_M = sigma_M^2 / (P_M alpha_M).
/// The interferer at a macro-MT is the FAP, so the numerator carries P_F.
struct macro_link_budget {
    double lambda_m = 1.0;
    double mu_m = 1.0;
};

namespace detail {
inline void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::domain_error(std::string(what) + " must be positive and finite");
}
} // namespace detail

inline femto_link_budget link_budget(const radio_budget& radio, double beta_f, double beta_m)
{
    detail::require_positive(radio.p_fap, "P_F");
    detail::require_positive(radio.p_mbs, "P_M");
    detail::require_positive(beta_f, "beta_F");
    detail::require_positive(beta_m, "beta_M");
    if (!(radio.noise_femto >= 0.0))
        throw std::domain_error("sigma_F^2 must be non-negative");
    const double signal = radio.p_fap * beta_f;
    return {radio.p_mbs * beta_m / signal, radio.noise_femto / signal};
}

inline macro_link_budget link_budget_macro(const radio_budget& radio, double alpha_m, double alpha_f)
{
    detail::require_positive(radio.p_fap, "P_F");
    detail::require_positive(radio.p_mbs, "P_M");
    detail::require_positive(alpha_m, "alpha_M");
    detail::require_positive(alpha_f, "alpha_F");
    if (!(radio.noise_macro >= 0.0))
        throw std::domain_error("sigma_M^2 must be non-negative");
    const double signal = radio.p_mbs * alpha_m;
    return {radio.p_fap * alpha_f / signal, radio.noise_macro / signal};
}

/// Large-scale gains of one user drop (linear, in (0, 1]).
struct drop_gains {
    std::vector<double> beta_f;  ///< FAP -> femto-MT k
    std::vector<double> beta_m;  ///< MBS -> femto-MT k
    std::vector<double> alpha_m; ///< MBS -> macro-MT k
    std::vector<double> alpha_f; ///< FAP -> macro-MT k
};

/// Per-MT link budgets of a drop.
struct drop_link_budget {
    std::vector<femto_link_budget> femto;
    std::vector<macro_link_budget> macro;
};

inline drop_link_budget link_budgets(const radio_budget& radio, const drop_gains& gains)
{
    drop_link_budget out;
    out.femto.reserve(gains.beta_f.size());
    for (std::size_t k = 0; k < gains.beta_f.size(); ++k)
        out.femto.push_back(link_budget(radio, gains.beta_f[k], gains.beta_m[k]));
    out.macro.reserve(gains.alpha_m.size());
    for (std::size_t k = 0; k < gains.alpha_m.size(); ++k)
        out.macro.push_back(link_budget_macro(radio, gains.alpha_m[k], gains.alpha_f[k]));
    return out;
}

/// One frame of small-scale fading and codebooks on top of a drop's path gains.
/// Fading matrices store one MT per row; codebooks store one beam per column.
struct frame_realization {
    Eigen::MatrixXcd h_f;           ///< K_F x N_F, FAP -> femto-MT
    Eigen::MatrixXcd h_m;           ///< K_F x N_M, MBS -> femto-MT
    Eigen::MatrixXcd g_m;           ///< K_M x N_M, MBS -> macro-MT
    Eigen::MatrixXcd g_f;           ///< K_M x N_F, FAP -> macro-MT
    Eigen::MatrixXcd fap_codebook;  ///< N_F x N_F unitary
    Eigen::MatrixXcd mbs_codebook;  ///< N_M x N_M unitary
    drop_gains gains;
    radio_budget radio;

    [[nodiscard]] int n_fap_antennas() const { return static_cast<int>(fap_codebook.cols()); }
    [[nodiscard]] int n_mbs_antennas() const { return static_cast<int>(mbs_codebook.cols()); }
    [[nodiscard]] int n_femto_mts() const { return static_cast<int>(h_f.rows()); }
    [[nodiscard]] int n_macro_mts() const { return static_cast<int>(g_m.rows()); }
};

/// Decisions and SINRs of one QACS frame.
struct schedule_outcome {
    int femto_mt = 0;
    int femto_beam = 0;
    double femto_nsnr = 0.0;            ///< x_F
    std::vector<int> qualified_beams;   ///< ascending interference toward the femto-MT
    std::map<int, int> macro_requests;  ///< macro-MT -> requested best beam
    std::optional<int> macro_beam;
    std::optional<int> macro_mt;
    double sinr_femto = 0.0;
    std::optional<double> sinr_macro;
    bool macro_active = false;

    [[nodiscard]] int n_qualified() const { return static_cast<int>(qualified_beams.size()); }
    [[nodiscard]] int n_qualified_mts() const { return static_cast<int>(macro_requests.size()); }
    /// Number of distinct beams requested (N_B).
    [[nodiscard]] int n_best_beams() const
    {
        std::vector<bool> seen;
        int n = 0;
        for (const auto& [mt, beam] : macro_requests) {
            if (beam >= static_cast<int>(seen.size()))
                seen.resize(beam + 1, false);
            if (!seen[beam]) {
                seen[beam] = true;
                ++n;
            }
        }
        return n;
    }
};

/// Analytic and Monte-Carlo rates for one drop (or an average over drops).
struct rate_report {
    double r_f_analytic = 0.0;
    double r_m_analytic = 0.0;
    double r_f_empirical = 0.0;
    double r_f_ci = 0.0;
    double r_m_empirical = 0.0;
    double r_m_ci = 0.0;
    std::vector<double> pmf_nq;           ///< analytic, length N_M + 1
    std::vector<double> pmf_nb;           ///< analytic, length N_M + 1
    std::vector<double> pmf_nq_empirical;
    std::vector<double> pmf_nb_empirical;
    double e_nq = 0.0; ///< empirical mean of N_Q
    double e_nb = 0.0; ///< empirical mean of N_B
    std::uint64_t frames = 0;
    std::uint64_t qos_violations = 0;
    std::uint64_t macro_active_frames = 0;
    bool analytic_available = false;
};

} // namespace qacs
