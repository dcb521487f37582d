#include "snapgate/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace snapgate::features {
namespace {

void require_length(WindowView w, std::size_t min_length, const char* what) {
  if (w.length() < min_length || w.channels() == 0) {
    throw std::invalid_argument(std::string(what) + ": window too short");
  }
}

void require_eps(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("deadband eps must be >= 0");
}

}  // namespace

std::vector<double> mav(WindowView w) {
  require_length(w, 1, "mav");
  std::vector<double> out(w.channels(), 0.0);
  for (std::size_t i = 0; i < w.length(); ++i)
    for (std::size_t c = 0; c < w.channels(); ++c) out[c] += std::abs(w(i, c));
  for (auto& v : out) v /= static_cast<double>(w.length());
  return out;
}

std::vector<double> rms(WindowView w) {
  require_length(w, 1, "rms");
  std::vector<double> out(w.channels(), 0.0);
  for (std::size_t i = 0; i < w.length(); ++i)
    for (std::size_t c = 0; c < w.channels(); ++c) out[c] += w(i, c) * w(i, c);
  for (auto& v : out) v = std::sqrt(v / static_cast<double>(w.length()));
  return out;
}

std::vector<double> waveform_length(WindowView w) {
  require_length(w, 2, "waveform_length");
  std::vector<double> out(w.channels(), 0.0);
  for (std::size_t i = 0; i + 1 < w.length(); ++i)
    for (std::size_t c = 0; c < w.channels(); ++c) out[c] += std::abs(w(i + 1, c) - w(i, c));
  return out;
}

std::vector<std::size_t> zero_crossings(WindowView w, double eps) {
  require_length(w, 1, "zero_crossings");
  require_eps(eps);
  std::vector<std::size_t> out(w.channels(), 0);
  for (std::size_t i = 0; i + 1 < w.length(); ++i) {
    for (std::size_t c = 0; c < w.channels(); ++c) {
      const double a = w(i, c);
      const double b = w(i + 1, c);
      if ((a >= 0.0) != (b >= 0.0) && std::abs(a - b) >= eps) ++out[c];
    }
  }
  return out;
}

std::vector<std::size_t> slope_sign_changes(WindowView w, double eps) {
  require_length(w, 3, "slope_sign_changes");
  require_eps(eps);
  std::vector<std::size_t> out(w.channels(), 0);
  for (std::size_t i = 1; i + 1 < w.length(); ++i) {
    for (std::size_t c = 0; c < w.channels(); ++c) {
      const double left = w(i, c) - w(i - 1, c);
      const double right = w(i, c) - w(i + 1, c);
      if (left * right > 0.0 && std::max(std::abs(left), std::abs(right)) >= eps) ++out[c];
    }
  }
  return out;
}

std::vector<double> hudgins_td(WindowView w, double eps) {
  require_length(w, 3, "hudgins_td");
  const std::size_t channels = w.channels();
  std::vector<double> out;
  out.reserve(4 * channels);
  const auto m = mav(w);
  const auto zc = zero_crossings(w, eps);
  const auto ssc = slope_sign_changes(w, eps);
  const auto wl = waveform_length(w);
  out.insert(out.end(), m.begin(), m.end());
  for (auto v : zc) out.push_back(static_cast<double>(v));
  for (auto v : ssc) out.push_back(static_cast<double>(v));
  out.insert(out.end(), wl.begin(), wl.end());
  return out;
}

double mean_mav(WindowView w) {
  const auto m = mav(w);
  double sum = 0.0;
  for (double v : m) sum += v;
  return sum / static_cast<double>(m.size());
}

}  // namespace snapgate::features
