#pragma once

#include <cstddef>
#include <vector>

#include "snapgate/signal.hpp"

namespace snapgate::features {

// Per-channel time-domain features. Each function returns one value per
// channel, in channel order. `eps` is an amplitude deadband in raw units.

std::vector<double> mav(WindowView w);
std::vector<double> rms(WindowView w);
std::vector<double> waveform_length(WindowView w);

/// Sign changes between neighbouring samples whose difference is at least
/// eps. Zero counts as positive.
std::vector<std::size_t> zero_crossings(WindowView w, double eps = 0.0);

/// Interior samples that are strict local extrema, with at least one of the
/// two adjacent differences >= eps.
std::vector<std::size_t> slope_sign_changes(WindowView w, double eps = 0.0);

/// Hudgins time-domain set laid out as [MAV | ZC | SSC | WL], each block in
/// channel order (length 4 * C). Requires L >= 3.
std::vector<double> hudgins_td(WindowView w, double eps = 0.0);

/// Mean over channels of the per-channel MAV.
double mean_mav(WindowView w);

}  // namespace snapgate::features
