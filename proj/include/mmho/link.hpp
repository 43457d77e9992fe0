#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mmho/channel.hpp"

namespace mmho {

/// Transmit beamformer f (N_BS) and receive combiner w (N_UE) along the dominant
/// singular direction of H; gain = |w^H H f| = sigma_max(H).
struct BeamPair {
  CVector f;
  CVector w;
  double gain = 0.0;
};

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver for a Hermitian matrix.
HermitianEigen hermitian_eigen(const CMatrix& a, int max_sweeps = 60);

/// Dominant singular pair of H via Jacobi on the smaller Gram matrix.
/// Throws std::invalid_argument for a zero or non-finite H.
BeamPair svd_beamforming(const CMatrix& H);

struct RadioParams {
  double tx_power_w = 1.0;            // 30 dBm
  double bandwidth_hz = 500e6;
  double noise_psd_w_per_hz = 3.981071705534973e-21;  // -174 dBm/Hz

  double noise_power_w() const { return noise_psd_w_per_hz * bandwidth_hz; }
};

double dbm_to_watts(double dbm);

struct LinkCapacity {
  double capacity = 0.0;  // bits/s
  double snr_linear = 0.0;
  double interference_w = 0.0;
};

/// W log2(1 + p gain^2 / (noise_psd W + I)).
double capacity(double gain, double interference_w, double p, double bandwidth_hz,
                double noise_psd_w_per_hz);

LinkCapacity link_capacity(double gain, double interference_w, const RadioParams& radio);

/// Every UE-BS channel of one slot with its SVD beams, plus the cross-link
/// coupling table |w(i,j)^H H(i,j') f(i',j')|^2 used for interference.
class LinkGrid {
 public:
  LinkGrid() = default;
  LinkGrid(int num_ue, int num_bs, std::vector<ChannelRealization> channels);

  int num_ue() const { return num_ue_; }
  int num_bs() const { return num_bs_; }

  const ChannelRealization& channel(int ue, int bs) const { return channels_[index(ue, bs)]; }
  const BeamPair& beam(int ue, int bs) const { return beams_[index(ue, bs)]; }
  double gain(int ue, int bs) const { return beams_[index(ue, bs)].gain; }

  /// Power leaking into UE `ue` (combining for BS `serving`) from BS
  /// `other_bs` while it beams toward `other_ue`, per unit transmit power.
  double coupling(int ue, int serving, int other_bs, int other_ue) const {
    return coupling_[((static_cast<std::size_t>(ue) * num_bs_ + serving) * num_bs_ + other_bs) * num_ue_ +
                     other_ue];
  }

 private:
  std::size_t index(int ue, int bs) const { return static_cast<std::size_t>(ue) * num_bs_ + bs; }

  int num_ue_ = 0;
  int num_bs_ = 0;
  std::vector<ChannelRealization> channels_;
  std::vector<BeamPair> beams_;
  std::vector<double> coupling_;
};

/// Sum over BSs j' != serving[ue] of p |w(ue)^H H(ue,j') f(i',j')|^2 across
/// UEs i' served by j' with share[i'] > 0.
double interference(int ue, std::span<const int> serving, std::span<const double> share,
                    const LinkGrid& grid, double p);

}  // namespace mmho
