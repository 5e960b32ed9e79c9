#pragma once

#include <cmath>

namespace qacs {

/// 10^(value/10). Works for dB ratios and for dBm -> mW.
inline double db_to_linear(double value_db) { return std::pow(10.0, value_db / 10.0); }

inline double linear_to_db(double value) { return 10.0 * std::log10(value); }

} // namespace qacs
