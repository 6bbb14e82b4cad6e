#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dsris/config.hpp"
#include "dsris/matrix.hpp"

namespace dsris {

enum class Side : std::uint8_t { Front = 0, Back = 1 };

/// AP/UE geometry, side labels and the stored small-scale fading draws.
struct Scenario {
  std::vector<double> ap_angles;     ///< departure angle per AP (rad)
  std::vector<double> ue_angles;     ///< arrival angle per UE (rad)
  RMatrix ap_ris_distances;          ///< M x N (m)
  RMatrix ris_ue_distances;          ///< N x K (m)
  std::vector<double> beta;          ///< composite large-scale path loss per UE
  std::vector<Side> element_sides;
  std::vector<Side> ap_sides;
  std::vector<Side> ue_sides;
  CMatrix nlos_ap;                   ///< M x N, CN(0, 1)
  CMatrix nlos_ue;                   ///< N x K, CN(0, 1)
};

/// Decision variables: activation bits and reflection phases.
struct RISState {
  std::vector<std::uint8_t> activation;
  std::vector<double> phases;

  [[nodiscard]] std::size_t size() const noexcept { return activation.size(); }
  [[nodiscard]] static RISState all_active(std::size_t n);

  friend bool operator==(const RISState&, const RISState&) = default;
};

/// Reduces an angle into [0, 2*pi).
[[nodiscard]] double wrap_phase(double phi);
[[nodiscard]] std::size_t active_count(std::span<const std::uint8_t> activation);

/// p_n = n * d_min for zero-based n.
[[nodiscard]] std::vector<double> grid_positions(std::size_t n, double d_min);

struct LosComponents {
  CMatrix ap_ris;  ///< M x N
  CMatrix ris_ue;  ///< N x K
};

/// Free-space LoS terms with the element steering phase. Throws DomainError for
/// non-positive distances.
[[nodiscard]] LosComponents los_components(const Scenario& scenario, const SystemConfig& config);

/// beta_k from the AP-RIS and RIS-UE mean distances and the two path-loss
/// exponents; equals 1 when both reference distances are 1 m.
[[nodiscard]] std::vector<double> composite_path_loss(const Scenario& scenario,
                                                      const SystemConfig& config);

/// Fills scenario.nlos_ap / nlos_ue with CN(0, 1) draws.
void draw_nlos(Scenario& scenario, Rng& rng);

/// Channel realization consumed by the rate model. Entries between a terminal and
/// an element on the opposite side are zero.
struct ChannelSet {
  CMatrix ap_ris;                       ///< h_{m,n}
  CMatrix ris_ue;                       ///< h_{n,k}
  std::vector<double> beta;
  std::vector<double> positions;        ///< element positions on the grid (m)
  std::vector<std::uint8_t> forced_off; ///< elements on an unpowered side
  double wavelength_m = 0.0;

  [[nodiscard]] std::size_t n_aps() const noexcept { return ap_ris.rows(); }
  [[nodiscard]] std::size_t n_elements() const noexcept { return ap_ris.cols(); }
  [[nodiscard]] std::size_t n_ues() const noexcept { return ris_ue.cols(); }
};

/// Rician combination of the LoS terms with the scenario's stored NLoS draws.
/// The NLoS draw of each link is scaled by that link's free-space amplitude so
/// kappa is the LoS/NLoS power ratio.
[[nodiscard]] ChannelSet combine_channels(const Scenario& scenario, const SystemConfig& config);

/// Same as combine_channels but with fresh NLoS draws from rng.
[[nodiscard]] ChannelSet sample_channels(const Scenario& scenario, const SystemConfig& config,
                                         Rng& rng);

/// Per-element flag: element sits on a side whose aggregate LoS power is at most
/// config.side_power_fraction of the total.
[[nodiscard]] std::vector<std::uint8_t> unpowered_elements(const Scenario& scenario,
                                                           const SystemConfig& config);

/// C = I + C_mutual over the given (active) positions. Throws DomainError on
/// repeated positions and ContractViolation on an empty list.
[[nodiscard]] CMatrix mutual_coupling(std::span<const double> positions, double wavelength_m);

/// Gaps between consecutive active elements; empty with fewer than two active.
[[nodiscard]] std::vector<double> effective_spacings(std::span<const std::uint8_t> activation,
                                                     double d_min);

/// Activation after removing elements the channel set forces off.
[[nodiscard]] std::vector<std::uint8_t> effective_activation(const RISState& state,
                                                             const ChannelSet& channels);

/// G[m][k] = sqrt(beta_k) h_m^H C R h_k over the effective active set.
[[nodiscard]] CMatrix cascaded_gain(const RISState& state, const ChannelSet& channels,
                                    const SystemConfig& config);

/// Per-element coefficients t(j,k) = sqrt(beta_k) c_j h_{j,k} over the listed
/// elements, with c = (sum_m conj(h_m))^T C. Then s_k = sum_j t(j,k) e^{i phi_j}.
struct ReflectionTerms {
  std::vector<std::size_t> idx;  ///< element ids, ascending
  CMatrix t;                     ///< idx.size() x K
};

/// Coupling is taken over exactly the elements with a nonzero activation entry.
[[nodiscard]] ReflectionTerms reflection_terms(std::span<const std::uint8_t> activation,
                                               const ChannelSet& channels);
[[nodiscard]] std::vector<Complex> effective_sums(const ReflectionTerms& terms,
                                                  std::span<const double> phases,
                                                  std::span<const double> amplitudes = {});
/// g_k = |s_k|^2. Optional amplitudes (indexed by element id) scale each reflection.
[[nodiscard]] std::vector<double> received_gains(const ReflectionTerms& terms,
                                                 std::span<const double> phases,
                                                 std::span<const double> amplitudes = {});

struct LinkQuality {
  std::vector<double> sinr;
  std::vector<double> rates;  ///< bps/Hz
};

[[nodiscard]] LinkQuality sinr_and_rates(const RISState& state, const ChannelSet& channels,
                                         const SystemConfig& config);
/// Same, from precomputed effective gains g_k = |sum_m G[m][k]|^2.
[[nodiscard]] LinkQuality sinr_and_rates(std::span<const double> gains, const SystemConfig& config);

[[nodiscard]] double objective_min_rate(const RISState& state, const ChannelSet& channels,
                                        const SystemConfig& config);

struct Feasibility {
  bool min_active = false;  ///< sum a_n >= N_min
  bool aperture = false;    ///< sum d_eff <= D_total
  [[nodiscard]] bool ok() const noexcept { return min_active && aperture; }
};

[[nodiscard]] Feasibility feasibility(std::span<const std::uint8_t> activation,
                                      const SystemConfig& config);

/// Penalized training loss. Empty ue_weights selects config.loss.ue.
[[nodiscard]] double loss(const RISState& state, const ChannelSet& channels,
                          const SystemConfig& config, std::span<const double> ue_weights = {});

/// Loss from precomputed rates; the activation must already be effective.
[[nodiscard]] double loss_from_rates(std::span<const double> rates,
                                     std::span<const std::uint8_t> activation,
                                     std::span<const double> phases, const SystemConfig& config,
                                     std::span<const double> ue_weights = {});

/// Everything the optimizers need from one state, computed once.
struct Evaluation {
  LinkQuality link;
  std::vector<std::uint8_t> activation;  ///< effective
  double min_rate = 0.0;
  double sum_rate = 0.0;
  double loss = 0.0;
  Feasibility feasible;
};

[[nodiscard]] Evaluation evaluate_state(const RISState& state, const ChannelSet& channels,
                                        const SystemConfig& config,
                                        std::span<const double> ue_weights = {});

/// dL/dphi_n for the current activation (zero on inactive elements).
[[nodiscard]] std::vector<double> loss_phase_gradient(const RISState& state,
                                                      const ChannelSet& channels,
                                                      const SystemConfig& config,
                                                      std::span<const double> ue_weights = {});

/// Noise power giving the requested mean SNR for the all-active, zero-phase
/// reference configuration.
[[nodiscard]] double reference_noise_power(const ChannelSet& channels, const SystemConfig& config,
                                           double snr_db);

/// Bessel function of the first kind, order zero.
[[nodiscard]] double bessel_j0(double x);

struct CoherenceReport {
  bool feasible = false;
  double rho = 0.0;       ///< J0(2 pi f_D T_c)
  double slack_s = 0.0;   ///< T_c - (T_p + T_opt + T_switch)
};

[[nodiscard]] CoherenceReport coherence_report(double t_pilot_s, double t_opt_s, double t_switch_s,
                                               double t_coherence_s, double doppler_hz);

}  // namespace dsris
