#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace hexsid::signal {

/// Single-bin DFT of a real series, normalized so that
/// A*cos(2*pi*k*n/N + phi) maps to A*exp(i*phi) for 0 < k < N/2.
std::complex<double> dft_line(const Eigen::Ref<const Eigen::ArrayXd>& x, int k);

/// Several bins at once.
Eigen::ArrayXcd dft_lines(const Eigen::Ref<const Eigen::ArrayXd>& x, const std::vector<int>& bins);

/// Circularly shift a periodic real series by `delay_samples` (fractional
/// allowed) via a frequency-domain phase ramp. Positive delay moves content
/// to later sample indices.
Eigen::ArrayXd circular_delay(const Eigen::Ref<const Eigen::ArrayXd>& x, double delay_samples);

/// Unwrap a phase sequence in place; returns false when an adjacent step
/// exceeds pi (ambiguous unwrapping).
bool unwrap_phases(std::vector<double>& phases);

}  // namespace hexsid::signal
