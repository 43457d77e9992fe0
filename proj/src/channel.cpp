#include "mmho/channel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmho/log.hpp"

namespace mmho {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

// Inverse-CDF Laplacian with scale b.
double laplacian(Rng& rng, double b) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  const double x = u(rng);
  const double mag = -b * std::log1p(-2.0 * std::abs(x));
  return x < 0.0 ? -mag : mag;
}

}  // namespace

double p_los(double d) {
  if (!(d > 0.0)) throw std::domain_error("p_los: distance must be positive");
  const double decay = std::exp(-d / 71.0);
  const double bracket = std::min(27.0 / d, 1.0) * (1.0 - decay) + decay;
  return bracket * bracket;
}

double p_nlos(double d) { return 1.0 - p_los(d); }

double reference_loss_db(const ChannelParams& params) {
  return 20.0 * std::log10(4.0 * kPi * params.reference_distance / params.wavelength());
}

double mean_pathloss_db(double d, bool los, const ChannelParams& params) {
  if (d < params.reference_distance) {
    log_warn("pathloss: distance " + std::to_string(d) + " m below reference distance, clamped");
    d = params.reference_distance;
  }
  const double exponent = los ? params.ple_los : params.ple_nlos;
  return reference_loss_db(params) + 10.0 * exponent * std::log10(d / params.reference_distance);
}

double pathloss_db(double d, bool los, Rng& rng, const ChannelParams& params) {
  const double sigma = los ? params.shadow_sigma_los_db : params.shadow_sigma_nlos_db;
  std::normal_distribution<double> shadow(0.0, sigma);
  return mean_pathloss_db(d, los, params) + shadow(rng);
}

CVector array_response(double az, double el, const ArrayGeometry& geom) {
  CVector u(geom.size());
  const double kh = kPi * std::sin(az) * std::cos(el);
  const double kv = kPi * std::sin(az) * std::sin(el);
  // Separable phase: one phasor per row index times one per column index.
  std::vector<std::complex<double>> h(static_cast<std::size_t>(geom.n_horizontal));
  for (int nh = 0; nh < geom.n_horizontal; ++nh) h[static_cast<std::size_t>(nh)] = std::polar(1.0, nh * kh);
  for (int nv = 0; nv < geom.n_vertical; ++nv) {
    const std::complex<double> v = std::polar(1.0, nv * kv);
    for (int nh = 0; nh < geom.n_horizontal; ++nh) u(nh + geom.n_horizontal * nv) = v * h[static_cast<std::size_t>(nh)];
  }
  return u;
}

CMatrix channel_matrix(std::span<const Subpath> subpaths, int subpaths_per_cluster,
                       const ArrayGeometry& ue_array, const ArrayGeometry& bs_array) {
  if (subpaths_per_cluster < 1) throw std::invalid_argument("channel_matrix: R must be >= 1");
  const auto n = static_cast<Eigen::Index>(subpaths.size());
  CMatrix rx(ue_array.size(), n);
  CMatrix tx(bs_array.size(), n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(subpaths_per_cluster));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Subpath& sp = subpaths[static_cast<std::size_t>(k)];
    rx.col(k) = (scale * sp.gain) * array_response(sp.aoa_az, sp.aoa_el, ue_array);
    tx.col(k) = array_response(sp.aod_az, sp.aod_el, bs_array);
  }
  return rx * tx.adjoint();
}

ChannelRealization sample_channel(const Point3& ue_pos, const Point3& bs_pos, Rng& rng,
                                  const ChannelParams& params) {
  ChannelRealization out;
  out.distance = distance_3d(ue_pos, bs_pos);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  out.los = unit(rng) < p_los(std::max(out.distance, 1e-9));
  out.pathloss_db = pathloss_db(out.distance, out.los, rng, params);

  std::poisson_distribution<int> cluster_count(params.cluster_count_mean);
  const int C = std::max(1, cluster_count(rng));
  const int R = params.subpaths_per_cluster;
  out.clusters = C;
  out.subpaths_per_cluster = R;

  // Exponentially distributed cluster powers, normalized to unit sum.
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> power(static_cast<std::size_t>(C));
  double total = 0.0;
  for (auto& p : power) total += (p = expo(rng));
  const double path_gain = std::pow(10.0, -out.pathloss_db / 10.0);

  std::uniform_real_distribution<double> az(-kPi, kPi);
  std::uniform_real_distribution<double> el(-params.elevation_extent, params.elevation_extent);
  const double spread = params.subpath_spread_deg * kPi / 180.0;
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Subpath> subpaths;
  subpaths.reserve(static_cast<std::size_t>(C * R));
  for (int c = 0; c < C; ++c) {
    const double aoa_az = az(rng), aoa_el = el(rng);
    const double aod_az = az(rng), aod_el = el(rng);
    const double amp = std::sqrt(power[static_cast<std::size_t>(c)] / total * path_gain / 2.0);
    for (int r = 0; r < R; ++r) {
      Subpath sp;
      sp.aoa_az = wrap_angle(aoa_az + laplacian(rng, spread));
      sp.aoa_el = wrap_angle(aoa_el + laplacian(rng, spread));
      sp.aod_az = wrap_angle(aod_az + laplacian(rng, spread));
      sp.aod_el = wrap_angle(aod_el + laplacian(rng, spread));
      const double re = gauss(rng), im = gauss(rng);
      sp.gain = {amp * re, amp * im};
      subpaths.push_back(sp);
    }
  }
  out.H = channel_matrix(subpaths, R, params.ue_array, params.bs_array);
  return out;
}

}  // namespace mmho
