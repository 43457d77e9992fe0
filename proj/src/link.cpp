#include "mmho/link.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace mmho {

namespace {

inline std::complex<double> mul(std::complex<double> x, std::complex<double> y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

// x <- c x - sp y,  y <- s x + cp y  over n strided entries.
void rotate(std::complex<double>* x, std::complex<double>* y, Eigen::Index stride, Eigen::Index n, double c,
            double s, std::complex<double> sp, std::complex<double> cp) {
  for (Eigen::Index k = 0; k < n; ++k) {
    const std::complex<double> xk = x[k * stride], yk = y[k * stride];
    x[k * stride] = c * xk - mul(sp, yk);
    y[k * stride] = s * xk + mul(cp, yk);
  }
}

}  // namespace

HermitianEigen hermitian_eigen(const CMatrix& input, int max_sweeps) {
  if (input.rows() != input.cols()) throw std::invalid_argument("hermitian_eigen: matrix not square");
  const Eigen::Index n = input.rows();
  CMatrix a = input;
  CMatrix v = CMatrix::Identity(n, n);
  const double scale = a.norm();
  HermitianEigen out;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    out.sweeps = sweep;
    if (std::sqrt(off) <= 1e-14 * scale || off == 0.0) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double r = std::sqrt(std::norm(a(p, q)));
        if (r <= 1e-18 * scale) continue;
        // Phase-align a(p,q) to a real value, then a real symmetric rotation.
        const std::complex<double> phase = std::conj(a(p, q)) / r;  // e^{-i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * r);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- U^H A U with U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        const std::complex<double> sp = s * phase, cp = c * phase;
        rotate(a.data() + p * n, a.data() + q * n, 1, n, c, s, sp, cp);
        rotate(a.data() + p, a.data() + q, n, n, c, s, std::conj(sp), std::conj(cp));
        rotate(v.data() + p * n, v.data() + q * n, 1, n, c, s, sp, cp);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  // Sort ascending.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index x, Eigen::Index y) { return a(x, x).real() < a(y, y).real(); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]).real();
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

BeamPair svd_beamforming(const CMatrix& H) {
  if (H.size() == 0 || !H.allFinite()) throw std::invalid_argument("svd_beamforming: channel not finite");
  if (H.squaredNorm() == 0.0) throw std::invalid_argument("svd_beamforming: zero channel has no beam direction");

  BeamPair beam;
  if (H.rows() <= H.cols()) {
    const HermitianEigen eig = hermitian_eigen(H * H.adjoint());
    beam.w = eig.vectors.col(eig.values.size() - 1).normalized();
    CVector hf = H.adjoint() * beam.w;
    beam.gain = hf.norm();
    beam.f = hf / beam.gain;
  } else {
    const HermitianEigen eig = hermitian_eigen(H.adjoint() * H);
    beam.f = eig.vectors.col(eig.values.size() - 1).normalized();
    CVector hf = H * beam.f;
    beam.gain = hf.norm();
    beam.w = hf / beam.gain;
  }
  return beam;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double capacity(double gain, double interference_w, double p, double bandwidth_hz,
                double noise_psd_w_per_hz) {
  const double sinr = p * gain * gain / (noise_psd_w_per_hz * bandwidth_hz + interference_w);
  return bandwidth_hz * std::log2(1.0 + sinr);
}

LinkCapacity link_capacity(double gain, double interference_w, const RadioParams& radio) {
  LinkCapacity out;
  out.interference_w = interference_w;
  out.snr_linear = radio.tx_power_w * gain * gain / (radio.noise_power_w() + interference_w);
  out.capacity = capacity(gain, interference_w, radio.tx_power_w, radio.bandwidth_hz, radio.noise_psd_w_per_hz);
  return out;
}

LinkGrid::LinkGrid(int num_ue, int num_bs, std::vector<ChannelRealization> channels)
    : num_ue_(num_ue), num_bs_(num_bs), channels_(std::move(channels)) {
  if (static_cast<int>(channels_.size()) != num_ue * num_bs)
    throw std::invalid_argument("LinkGrid: expected one channel per UE-BS pair");
  beams_.reserve(channels_.size());
  for (const auto& ch : channels_) beams_.push_back(svd_beamforming(ch.H));

  coupling_.assign(static_cast<std::size_t>(num_ue) * num_bs * num_bs * num_ue, 0.0);
  for (int i = 0; i < num_ue; ++i) {
    for (int jp = 0; jp < num_bs; ++jp) {
      const CMatrix& h = channel(i, jp).H;
      for (int ip = 0; ip < num_ue; ++ip) {
        const CVector leak = h * beam(ip, jp).f;
        for (int j = 0; j < num_bs; ++j) {
          const double v = std::norm(beam(i, j).w.dot(leak));  // dot() conjugates the left operand
          coupling_[((static_cast<std::size_t>(i) * num_bs + j) * num_bs + jp) * num_ue + ip] = v;
        }
      }
    }
  }
}

double interference(int ue, std::span<const int> serving, std::span<const double> share,
                    const LinkGrid& grid, double p) {
  const int own = serving[static_cast<std::size_t>(ue)];
  double total = 0.0;
  for (int other = 0; other < grid.num_ue(); ++other) {
    const int bs = serving[static_cast<std::size_t>(other)];
    if (bs == own || share[static_cast<std::size_t>(other)] <= 0.0) continue;
    total += p * grid.coupling(ue, own, bs, other);
  }
  return total;
}

}  // namespace mmho
