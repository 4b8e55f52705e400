#include "imprelay/relay_selector.hpp"

#include <algorithm>
#include <array>
#include <boost/random/uniform_int_distribution.hpp>
#include <utility>

namespace imprelay {

namespace {

constexpr std::array<std::pair<Protocol, std::string_view>, 5> kProtocolNames{{
    {Protocol::nth_best_map, "nth_best_map"},
    {Protocol::nth_best_memoryless, "nth_best_memoryless"},
    {Protocol::nth_best_genie, "nth_best_genie"},
    {Protocol::conventional, "conventional"},
    {Protocol::random, "random"},
}};

int argmax(std::span<const double> values) {
  if (values.empty()) throw DomainError("selection over zero relays");
  int best = 0;
  for (std::size_t m = 1; m < values.size(); ++m) {
    if (values[m] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(m);
  }
  return best;
}

}  // namespace

std::string_view to_string(Protocol p) {
  for (const auto& [value, name] : kProtocolNames) {
    if (value == p) return name;
  }
  return "unknown";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (const auto& [value, n] : kProtocolNames) {
    if (n == name) return value;
  }
  return std::nullopt;
}

std::string_view to_string(FallbackRule f) {
  return f == FallbackRule::partial ? "partial" : "max_min";
}

std::optional<FallbackRule> parse_fallback(std::string_view name) {
  if (name == "partial") return FallbackRule::partial;
  if (name == "max_min") return FallbackRule::max_min;
  return std::nullopt;
}

std::optional<DetectorKind> detector_for(Protocol p) {
  switch (p) {
    case Protocol::nth_best_map: return DetectorKind::map;
    case Protocol::nth_best_memoryless: return DetectorKind::memoryless;
    case Protocol::nth_best_genie: return DetectorKind::genie;
    case Protocol::conventional:
    case Protocol::random: return std::nullopt;
  }
  return std::nullopt;
}

int RankingTable::rank_of(int relay) const {
  const auto it = std::find(order.begin(), order.end(), relay);
  if (it == order.end()) throw DomainError("relay not present in ranking");
  return static_cast<int>(it - order.begin()) + 1;
}

void rank_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd,
                  RankingTable& out) {
  if (gamma_sr.empty() || gamma_sr.size() != gamma_rd.size()) {
    throw DomainError("rank_max_min: need matching, non-empty SNR arrays");
  }
  const std::size_t m = gamma_sr.size();
  out.key.resize(m);
  out.order.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.key[i] = std::min(gamma_sr[i], gamma_rd[i]);
  // Insertion sort: stable, allocation-free, and fastest at typical M.
  for (std::size_t i = 0; i < m; ++i) {
    const double k = out.key[i];
    std::size_t j = i;
    while (j > 0 && out.key[static_cast<std::size_t>(out.order[j - 1])] < k) {
      out.order[j] = out.order[j - 1];
      --j;
    }
    out.order[j] = static_cast<int>(i);
  }
}

RankingTable rank_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd) {
  RankingTable t;
  rank_max_min(gamma_sr, gamma_rd, t);
  return t;
}

int select_all_bad(std::span<const double> gamma_sr, double rho) {
  if (!(rho >= 1.0)) throw DomainError("select_all_bad: rho must be >= 1");
  // Dividing by rho > 0 never changes the argmax.
  return argmax(gamma_sr);
}

int select_all_bad_max_min(std::span<const double> gamma_sr, std::span<const double> gamma_rd,
                           double rho) {
  if (!(rho >= 1.0)) throw DomainError("select_all_bad_max_min: rho must be >= 1");
  if (gamma_sr.size() != gamma_rd.size()) throw DomainError("select_all_bad_max_min: size mismatch");
  std::vector<double> key(gamma_sr.size());
  for (std::size_t m = 0; m < key.size(); ++m) key[m] = std::min(gamma_sr[m] / rho, gamma_rd[m]);
  return argmax(key);
}

SelectionDecision select_nth_best(const RankingTable& ranking,
                                  std::span<const NoiseState> detected,
                                  std::span<const double> gamma_sr,
                                  std::span<const double> gamma_rd, double rho,
                                  FallbackRule rule) {
  if (detected.size() != ranking.size()) throw DomainError("select_nth_best: one state per relay");
  for (std::size_t pos = 0; pos < ranking.order.size(); ++pos) {
    const int relay = ranking.order[pos];
    if (detected[static_cast<std::size_t>(relay)] == NoiseState::good) {
      return {relay, static_cast<int>(pos) + 1, false, std::nullopt};
    }
  }
  const int relay = rule == FallbackRule::partial ? select_all_bad(gamma_sr, rho)
                                                  : select_all_bad_max_min(gamma_sr, gamma_rd, rho);
  return {relay, ranking.rank_of(relay), true, std::nullopt};
}

SelectionDecision select_conventional(const RankingTable& ranking) {
  if (ranking.order.empty()) throw DomainError("select_conventional: empty ranking");
  return {ranking.order.front(), 1, false, std::nullopt};
}

SelectionDecision select_random(int relays, Rng& rng) {
  if (relays < 1) throw DomainError("select_random: need at least one relay");
  boost::random::uniform_int_distribution<int> pick(0, relays - 1);
  return {pick(rng), 1, false, std::nullopt};
}

}  // namespace imprelay
