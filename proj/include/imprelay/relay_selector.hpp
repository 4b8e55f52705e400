#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "imprelay/state_detector.hpp"

namespace imprelay {

enum class Protocol { nth_best_map, nth_best_memoryless, nth_best_genie, conventional, random };

/// Relay choice when every relay is detected in state B.
enum class FallbackRule {
  partial,  ///< argmax gamma_SR (source hop only)
  max_min,  ///< argmax min(gamma_SR / rho, gamma_RD)
};

std::string_view to_string(Protocol p);
std::optional<Protocol> parse_protocol(std::string_view name);
std::string_view to_string(FallbackRule f);
std::optional<FallbackRule> parse_fallback(std::string_view name);

/// Detector a protocol relies on, if any.
std::optional<DetectorKind> detector_for(Protocol p);

/// Relays ordered by min(gamma_SR, gamma_RD), best first. Relay indices are
/// 0-based; equal keys keep the lower index first.
struct RankingTable {
  std::vector<int> order;
  std::vector<double> key;  ///< key[m] = min(gamma_SR[m], gamma_RD[m])

  std::size_t size() const { return order.size(); }
  /// 1-based rank of `relay` (1 = best).
  int rank_of(int relay) const;
};

struct SelectionDecision {
  int relay = 0;      ///< 0-based index
  int rank_used = 1;  ///< 1-based position in the ranking
  bool fallback = false;
  std::optional<DetectorKind> detector_source;
};

RankingTable rank_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd);
void rank_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd,
                  RankingTable& out);

/// Partial selection: argmax gamma_SR / rho, i.e. argmax gamma_SR.
int select_all_bad(std::span<const double> gamma_sr, double rho);

/// Max-min selection with the source hop penalised by rho.
int select_all_bad_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd,
                           double rho);

/// Highest-ranked relay detected in G. When none is, falls back per `rule`.
SelectionDecision select_nth_best(const RankingTable& ranking,
                                  std::span<const NoiseState> detected,
                                  std::span<const double> gamma_sr,
                                  std::span<const double> gamma_rd, double rho,
                                  FallbackRule rule = FallbackRule::partial);

SelectionDecision select_conventional(const RankingTable& ranking);

/// Uniform choice. rank_used is left at 1 since the ranking is never consulted;
/// callers that need the position use RankingTable::rank_of.
SelectionDecision select_random(int relays, Rng& rng);

}  // namespace imprelay
