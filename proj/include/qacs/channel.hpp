#pragma once

#include "qacs/model.hpp"
#include "qacs/rng.hpp"

#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace qacs {

struct point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(point a, point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// MT positions of one drop. The MBS sits at the origin, the FAP on the x axis.
struct user_drop {
    std::vector<point> femto_positions;
    std::vector<point> macro_positions;
    point fap_position;
    point mbs_position;
};

namespace detail {
/// Area-uniform point in a disk: radius R*sqrt(u).
inline point uniform_in_disk(point center, double radius, random_stream& rng)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}
} // namespace detail

inline user_drop drop_users(const scenario_config& cfg, random_stream& rng)
{
    user_drop drop;
    drop.mbs_position = {0.0, 0.0};
    drop.fap_position = {cfg.mbs_fap_distance, 0.0};
    drop.femto_positions.reserve(cfg.n_femto_mts);
    for (int k = 0; k < cfg.n_femto_mts; ++k)
        drop.femto_positions.push_back(detail::uniform_in_disk(drop.fap_position, cfg.femto_radius, rng));
    drop.macro_positions.reserve(cfg.n_macro_mts);
    for (int k = 0; k < cfg.n_macro_mts; ++k)
        drop.macro_positions.push_back(detail::uniform_in_disk(drop.mbs_position, cfg.macro_radius, rng));
    return drop;
}

/// Distances below this are clamped so the log-distance model stays bounded.
inline constexpr double min_link_distance = 1.0;

inline double path_loss_db(const path_loss_model& model, link_class cls, double meters)
{
    const auto& c = model[cls];
    const double d = std::max(meters, min_link_distance);
    return c.intercept + c.slope * std::log10(d) + c.wall_loss;
}

inline double path_gain(const path_loss_model& model, link_class cls, double meters)
{
    return db_to_linear(-path_loss_db(model, cls, meters));
}

inline drop_gains gains_for(const scenario_config& cfg, const user_drop& drop)
{
    const auto& pl = cfg.path_loss_params;
    drop_gains g;
    for (const auto& p : drop.femto_positions) {
        g.beta_f.push_back(path_gain(pl, link_class::fap_indoor, distance(p, drop.fap_position)));
        g.beta_m.push_back(path_gain(pl, link_class::mbs_indoor, distance(p, drop.mbs_position)));
    }
    for (const auto& p : drop.macro_positions) {
        g.alpha_m.push_back(path_gain(pl, link_class::mbs_outdoor, distance(p, drop.mbs_position)));
        g.alpha_f.push_back(path_gain(pl, link_class::fap_outdoor, distance(p, drop.fap_position)));
    }
    return g;
}

/// i.i.d. CN(0, 1) entries: real and imaginary parts each N(0, 1/2).
inline Eigen::MatrixXcd draw_fading(int rows, int cols, random_stream& rng)
{
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = {re, im};
        }
    return m;
}

/// Haar-distributed n x n unitary: QR of a complex Gaussian matrix with the phases of
/// diag(R) moved into Q, so the result does not depend on the QR sign convention.
inline Eigen::MatrixXcd draw_codebook(int n, random_stream& rng)
{
    const Eigen::MatrixXcd a = draw_fading(n, n, rng);
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
    const auto& r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
        const std::complex<double> d = r(j, j);
        const double mag = std::abs(d);
        if (mag > 0.0)
            q.col(j) *= d / mag;
    }
    return q;
}

/// Fresh fading and codebooks for one frame. Path gains are those of the drop.
inline frame_realization realize_frame(const scenario_config& cfg, const drop_gains& gains,
                                       random_stream& rng)
{
    frame_realization f;
    f.fap_codebook = draw_codebook(cfg.n_fap_antennas, rng);
    f.mbs_codebook = draw_codebook(cfg.n_mbs_antennas, rng);
    f.h_f = draw_fading(cfg.n_femto_mts, cfg.n_fap_antennas, rng);
    f.h_m = draw_fading(cfg.n_femto_mts, cfg.n_mbs_antennas, rng);
    f.g_m = draw_fading(cfg.n_macro_mts, cfg.n_mbs_antennas, rng);
    f.g_f = draw_fading(cfg.n_macro_mts, cfg.n_fap_antennas, rng);
    f.gains = gains;
    f.radio = radio_budget::from(cfg);
    return f;
}

inline frame_realization realize_frame(const scenario_config& cfg, const user_drop& drop,
                                       random_stream& rng)
{
    return realize_frame(cfg, gains_for(cfg, drop), rng);
}

} // namespace qacs
