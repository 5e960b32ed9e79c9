#pragma once

#include "qacs/model.hpp"
#include "qacs/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <random>
#include <vector>

namespace qacs {

/// x / (lambda * y + mu): SINR of a unit-mean-normalized link.
inline double normalized_sinr(double signal, double interference, double lambda, double mu)
{
    return signal / (lambda * interference + mu);
}

struct femto_selection {
    int femto_mt = 0;
    int femto_beam = 0;
    double nsnr = 0.0; ///< x_F
};

/// Step b: argmax over (MT, beam) of |h_{F,k}^H w_i|^2, ties to the lowest (k, i).
/// Path gains do not enter; the choice depends on normalized projections only.
inline femto_selection femto_select(const Eigen::MatrixXd& nsnr)
{
    femto_selection best{0, 0, nsnr(0, 0)};
    for (Eigen::Index k = 0; k < nsnr.rows(); ++k)
        for (Eigen::Index i = 0; i < nsnr.cols(); ++i)
            if (nsnr(k, i) > best.nsnr)
                best = {static_cast<int>(k), static_cast<int>(i), nsnr(k, i)};
    return best;
}

/// K_F x N_F matrix of |h_{F,k}^H w_i|^2.
inline Eigen::MatrixXd femto_projections(const frame_realization& frame)
{
    return (frame.h_f.conjugate() * frame.fap_codebook).cwiseAbs2();
}

inline femto_selection femto_select(const frame_realization& frame)
{
    return femto_select(femto_projections(frame));
}

/// y_j = |h_{M,k}^H f_j|^2 for every MBS beam j, seen by femto-MT k.
inline std::vector<double> interference_projections(const frame_realization& frame, int femto_mt)
{
    const Eigen::RowVectorXd y = (frame.h_m.row(femto_mt).conjugate() * frame.mbs_codebook).cwiseAbs2();
    return {y.data(), y.data() + y.size()};
}

inline femto_link_budget selected_femto_budget(const frame_realization& frame, int femto_mt)
{
    return link_budget(frame.radio, frame.gains.beta_f[femto_mt], frame.gains.beta_m[femto_mt]);
}

/// Beams j with x_F / (lambda_F y_j + mu_F) >= Gamma_F, ordered by ascending y_j.
inline std::vector<int> qualified_beams(std::span<const double> interference, double nsnr,
                                        const femto_link_budget& lb, double gamma_f)
{
    std::vector<int> out;
    for (std::size_t j = 0; j < interference.size(); ++j)
        if (normalized_sinr(nsnr, interference[j], lb.lambda_f, lb.mu_f) >= gamma_f)
            out.push_back(static_cast<int>(j));
    std::stable_sort(out.begin(), out.end(),
                     [&](int a, int b) { return interference[a] < interference[b]; });
    return out;
}

inline std::vector<int> qualified_beams(const frame_realization& frame, int femto_mt, double nsnr,
                                        const qos_thresholds& qos)
{
    const auto y = interference_projections(frame, femto_mt);
    return qualified_beams(y, nsnr, selected_femto_budget(frame, femto_mt), qos.gamma_f);
}

struct macro_request {
    int beam = 0;
    double sinr = 0.0; ///< best-beam SINR gamma_{M,k}
};

/// Step d on a precomputed SINR table: sinr(k, q) is macro-MT k's SINR on qualified[q].
/// MT k requests its best beam when that SINR reaches Gamma_M.
inline std::map<int, macro_request> best_beam_requests(const Eigen::MatrixXd& sinr,
                                                       std::span<const int> qualified,
                                                       double gamma_m)
{
    std::map<int, macro_request> out;
    if (qualified.empty())
        return out;
    for (Eigen::Index k = 0; k < sinr.rows(); ++k) {
        Eigen::Index best = 0;
        for (Eigen::Index q = 1; q < sinr.cols(); ++q)
            if (sinr(k, q) > sinr(k, best))
                best = q;
        if (sinr(k, best) >= gamma_m)
            out.emplace(static_cast<int>(k), macro_request{qualified[best], sinr(k, best)});
    }
    return out;
}

/// SINR of every macro-MT on every qualified beam with the FAP transmitting on femto_beam.
inline Eigen::MatrixXd macro_sinr_table(const frame_realization& frame, std::span<const int> qualified,
                                        int femto_beam)
{
    const int k_m = frame.n_macro_mts();
    Eigen::MatrixXd table(k_m, static_cast<Eigen::Index>(qualified.size()));
    if (qualified.empty())
        return table;
    const Eigen::VectorXd leak = (frame.g_f.conjugate() * frame.fap_codebook.col(femto_beam)).cwiseAbs2();
    Eigen::MatrixXcd beams(frame.mbs_codebook.rows(), static_cast<Eigen::Index>(qualified.size()));
    for (std::size_t q = 0; q < qualified.size(); ++q)
        beams.col(static_cast<Eigen::Index>(q)) = frame.mbs_codebook.col(qualified[q]);
    const Eigen::MatrixXd gain = (frame.g_m.conjugate() * beams).cwiseAbs2();
    for (int k = 0; k < k_m; ++k) {
        const auto lb = link_budget_macro(frame.radio, frame.gains.alpha_m[k], frame.gains.alpha_f[k]);
        for (Eigen::Index q = 0; q < table.cols(); ++q)
            table(k, q) = normalized_sinr(gain(k, q), leak(k), lb.lambda_m, lb.mu_m);
    }
    return table;
}

inline std::map<int, macro_request> macro_best_beam_requests(const frame_realization& frame,
                                                             std::span<const int> qualified,
                                                             int femto_beam, const qos_thresholds& qos)
{
    if (qualified.empty())
        return {};
    return best_beam_requests(macro_sinr_table(frame, qualified, femto_beam), qualified, qos.gamma_m);
}

/// macro-MT -> requested beam.
inline std::map<int, int> macro_best_beams(const frame_realization& frame, std::span<const int> qualified,
                                           int femto_beam, const qos_thresholds& qos)
{
    std::map<int, int> out;
    for (const auto& [mt, req] : macro_best_beam_requests(frame, qualified, femto_beam, qos))
        out.emplace(mt, req.beam);
    return out;
}

struct macro_selection {
    int beam = 0;
    int mt = 0;
};

/// Step e: the requested beam with the least interference toward the femto-MT, then a
/// uniformly random MT among those requesting it. Draws from rng only on a tie.
inline std::optional<macro_selection> mbs_select(const std::map<int, int>& requests,
                                                 std::span<const double> interference,
                                                 random_stream& rng)
{
    if (requests.empty())
        return std::nullopt;
    int beam = -1;
    for (const auto& [mt, b] : requests)
        if (beam < 0 || interference[b] < interference[beam] ||
            (interference[b] == interference[beam] && b < beam))
            beam = b;
    std::vector<int> candidates;
    for (const auto& [mt, b] : requests)
        if (b == beam)
            candidates.push_back(mt);
    if (candidates.size() == 1)
        return macro_selection{beam, candidates.front()};
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return macro_selection{beam, candidates[pick(rng)]};
}

/// Runs steps a-e on one frame.
inline schedule_outcome run_frame(const frame_realization& frame, const qos_thresholds& qos,
                                  random_stream& rng)
{
    schedule_outcome out;
    const auto sel = femto_select(frame);
    out.femto_mt = sel.femto_mt;
    out.femto_beam = sel.femto_beam;
    out.femto_nsnr = sel.nsnr;

    const auto lb = selected_femto_budget(frame, sel.femto_mt);
    const auto y = interference_projections(frame, sel.femto_mt);
    out.qualified_beams = qualified_beams(y, sel.nsnr, lb, qos.gamma_f);

    const auto detailed = macro_best_beam_requests(frame, out.qualified_beams, sel.femto_beam, qos);
    for (const auto& [mt, req] : detailed)
        out.macro_requests.emplace(mt, req.beam);

    const auto chosen = mbs_select(out.macro_requests, y, rng);
    if (chosen) {
        out.macro_active = true;
        out.macro_beam = chosen->beam;
        out.macro_mt = chosen->mt;
        out.sinr_macro = detailed.at(chosen->mt).sinr;
        out.sinr_femto = normalized_sinr(sel.nsnr, y[chosen->beam], lb.lambda_f, lb.mu_f);
    } else {
        // MBS vacates the band: no cross-tier interference.
        out.sinr_femto = normalized_sinr(sel.nsnr, 0.0, lb.lambda_f, lb.mu_f);
    }
    return out;
}

} // namespace qacs
