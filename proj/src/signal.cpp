#include "hexsid/signal.hpp"

#include <unsupported/Eigen/FFT>

#include "hexsid/types.hpp"

namespace hexsid::signal {

std::complex<double> dft_line(const Eigen::Ref<const Eigen::ArrayXd>& x, int k) {
    const int n = static_cast<int>(x.size());
    const double w = -2.0 * kPi * k / n;
    const Eigen::ArrayXd idx = Eigen::ArrayXd::LinSpaced(n, 0.0, n - 1.0);
    const double re = (x * (w * idx).cos()).sum();
    const double im = (x * (w * idx).sin()).sum();
    return std::complex<double>(2.0 * re / n, 2.0 * im / n);
}

Eigen::ArrayXcd dft_lines(const Eigen::Ref<const Eigen::ArrayXd>& x, const std::vector<int>& bins) {
    Eigen::ArrayXcd out(bins.size());
    for (size_t i = 0; i < bins.size(); ++i) out[i] = dft_line(x, bins[i]);
    return out;
}

Eigen::ArrayXd circular_delay(const Eigen::Ref<const Eigen::ArrayXd>& x, double delay_samples) {
    const int n = static_cast<int>(x.size());
    Eigen::FFT<double> fft;
    std::vector<double> in(x.data(), x.data() + n);
    std::vector<std::complex<double>> spec;
    fft.fwd(spec, in);
    const int half = n / 2;
    for (int k = 0; k < static_cast<int>(spec.size()); ++k) {
        int kk = k <= half ? k : k - n;
        if (2 * k == n) {
            // Nyquist bin of an even-length series has no quadrature partner;
            // only its real part is meaningful after a fractional shift.
            spec[k] *= std::cos(2.0 * kPi * kk * delay_samples / n);
            continue;
        }
        const double ang = -2.0 * kPi * kk * delay_samples / n;
        spec[k] *= std::complex<double>(std::cos(ang), std::sin(ang));
    }
    std::vector<double> out;
    fft.inv(out, spec);
    return Eigen::Map<Eigen::ArrayXd>(out.data(), n);
}

bool unwrap_phases(std::vector<double>& phases) {
    bool ok = true;
    for (size_t i = 1; i < phases.size(); ++i) {
        double d = phases[i] - phases[i - 1];
        double adj = std::remainder(d, 2.0 * kPi);
        if (std::abs(adj) > kPi - 1e-12) ok = false;
        phases[i] = phases[i - 1] + adj;
    }
    return ok;
}

}  // namespace hexsid::signal
