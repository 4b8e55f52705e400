#pragma once

#include "imprelay/noise_channel.hpp"

namespace imprelay::analytic {

/// Largest relay count the closed forms accept. Alternating binomial sums
/// beyond this lose more digits than the extended-precision evaluator holds.
inline constexpr int kMaxRelays = 32;

/// (1 / 2 theta) (1 - 1 / sqrt(1 + theta)); 1/4 at theta = 0.
double omega(double theta);

/// a (1 - exp(-x / a)).
double chi(double a, double x);

/// 2^(2R) - 1.
double rate_threshold(double rate);

/// M - N + 2.
int diversity_order(int relays, int rank);

// Densities and distribution functions. `x` is an instantaneous SNR.

double pdf_gamma_sr_n(double x, int relays, int rank, const AvgSnrSet& s);
double cdf_gamma_sr_n(double x, int relays, int rank, const AvgSnrSet& s);
double pdf_gamma_rd_n(double x, int relays, int rank, const AvgSnrSet& s);
double cdf_gamma_rd_n(double x, int relays, int rank, const AvgSnrSet& s);
/// gamma_{R_N D} + gamma_SD.
double pdf_gamma_srnd(double x, int relays, int rank, const AvgSnrSet& s);
double cdf_gamma_srnd(double x, int relays, int rank, const AvgSnrSet& s);
/// Source hop of the relay chosen when every relay is in state B.
double pdf_gamma_sr_bad(double x, int relays, const AvgSnrSet& s);
double cdf_gamma_sr_bad(double x, int relays, const AvgSnrSet& s);
/// Mean of gamma_{R_N D}.
double mean_gamma_rd_n(int relays, int rank, const AvgSnrSet& s);

struct BerBreakdown {
  double relay = 0.0;          ///< error probability at the selected relay
  double dest_no_error = 0.0;  ///< destination BER given a correct relay bit
  double dest_error = 0.0;     ///< destination BER given a propagated error
  double dest = 0.0;           ///< composed end-to-end BER
};

BerBreakdown ber_nth_good(int relays, int rank, const AvgSnrSet& s);
BerBreakdown ber_bad_state(int relays, const AvgSnrSet& s);

/// BER of two-branch MRC over independent Rayleigh branches.
double ber_mrc_two_branch(double g1, double g2);

/// Destination BER weighted over the rank actually used and the all-bad case.
double ber_overall(int relays, const AvgSnrSet& s, double p_b);
/// Same weighting applied to the relay error probability.
double ber_relay_overall(int relays, const AvgSnrSet& s, double p_b);

struct OutageBreakdown {
  double f_sr = 0.0;    ///< outage of the source -> relay hop
  double f_comb = 0.0;  ///< outage of the combined relay + direct path
  double f_sd = 0.0;    ///< outage of the direct path alone
  double p_out = 0.0;
};

OutageBreakdown outage_nth_good(int relays, int rank, const AvgSnrSet& s, double phi);
OutageBreakdown outage_bad_state(int relays, const AvgSnrSet& s, double phi);
double outage_overall(int relays, const AvgSnrSet& s, double p_b, double phi);

// High-SNR power laws.

double asym_pdf_sr_n(double x, int relays, int rank, const AvgSnrSet& s);
double asym_ber_relay(int relays, int rank, const AvgSnrSet& s);
double asym_ber_dest_no_error(int relays, int rank, const AvgSnrSet& s);
double asym_mean_gamma_rd_n(int relays, int rank, const AvgSnrSet& s);
BerBreakdown asym_ber_nth_good(int relays, int rank, const AvgSnrSet& s);
double asym_ber_relay_bad(int relays, const AvgSnrSet& s);
BerBreakdown asym_ber_bad(int relays, const AvgSnrSet& s);
double asym_outage(int relays, int rank, const AvgSnrSet& s, double phi);
double asym_outage_bad(int relays, const AvgSnrSet& s, double phi);
double asym_ber_overall(int relays, const AvgSnrSet& s, double p_b);
double asym_ber_relay_overall(int relays, const AvgSnrSet& s, double p_b);
double asym_outage_overall(int relays, const AvgSnrSet& s, double p_b, double phi);

}  // namespace imprelay::analytic
