#pragma once

// Clustered narrowband mmWave channel: LoS/NLoS link state, close-in
// pathloss with log-normal shadowing, and the sum-of-subpaths matrix
// H = (1/sqrt(R)) * sum_c sum_r h_rc * u_ue(aoa) * u_bs(aod)^H.

#include <complex>
#include <numbers>
#include <span>

#include <Eigen/Dense>

#include "mmho/geometry.hpp"
#include "mmho/rng.hpp"

namespace mmho {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class ArrayRole { bs, ue };

/// Half-wavelength uniform planar array.
struct ArrayGeometry {
  int n_horizontal = 1;
  int n_vertical = 1;
  ArrayRole role = ArrayRole::bs;

  int size() const { return n_horizontal * n_vertical; }
};

struct Subpath {
  std::complex<double> gain;
  double aoa_az = 0.0;
  double aoa_el = 0.0;
  double aod_az = 0.0;
  double aod_el = 0.0;
};

/// UE-BS channel held fixed over one coherence interval. H is N_UE x N_BS.
struct ChannelRealization {
  CMatrix H;
  bool los = true;
  double distance = 0.0;
  double pathloss_db = 0.0;
  int clusters = 1;
  int subpaths_per_cluster = 1;
};

struct ChannelParams {
  double carrier_hz = 28e9;
  double speed_of_light = 3e8;
  double reference_distance = 1.0;
  double ple_los = 3.0;
  double ple_nlos = 4.0;
  double shadow_sigma_los_db = 4.0;
  double shadow_sigma_nlos_db = 7.8;
  // Stand-in cluster statistics for 28 GHz; the measurement tables are not reproduced here.
  double cluster_count_mean = 1.8;
  int subpaths_per_cluster = 10;
  double elevation_extent = std::numbers::pi / 6.0;
  double subpath_spread_deg = 5.0;
  ArrayGeometry bs_array{8, 8, ArrayRole::bs};
  ArrayGeometry ue_array{4, 4, ArrayRole::ue};

  double wavelength() const { return speed_of_light / carrier_hz; }
};

/// LoS probability from the NYC 28 GHz fit. Throws std::domain_error for d <= 0.
double p_los(double d);
double p_nlos(double d);

/// 20 log10(4 pi d0 / lambda).
double reference_loss_db(const ChannelParams& params);

/// Pathloss without shadowing. Distances below d0 are clamped to d0 with a warning.
double mean_pathloss_db(double d, bool los, const ChannelParams& params);

/// Pathloss with a zero-mean Gaussian shadow term drawn from `rng`.
double pathloss_db(double d, bool los, Rng& rng, const ChannelParams& params);

/// Planar array response; entry (n_h + N_h * n_v) is exp(j*pi*(n_h sin(az)cos(el) + n_v sin(az)sin(el))).
CVector array_response(double az, double el, const ArrayGeometry& geom);

/// Assembles H from explicit subpaths. `subpaths_per_cluster` is the R in the 1/sqrt(R) factor.
CMatrix channel_matrix(std::span<const Subpath> subpaths, int subpaths_per_cluster,
                       const ArrayGeometry& ue_array, const ArrayGeometry& bs_array);

/// Draws link state, shadowed pathloss, cluster geometry, and gains. Subpath
/// gains are scaled so E[sum |h_rc|^2 / R] equals the linear pathloss.
ChannelRealization sample_channel(const Point3& ue_pos, const Point3& bs_pos, Rng& rng,
                                  const ChannelParams& params = {});

}  // namespace mmho
