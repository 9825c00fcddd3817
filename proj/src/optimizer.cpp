// SPDX-License-Identifier: Apache-2.0
#include "splitchain/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "segment_dp.hpp"
#include "splitchain/error.hpp"

namespace splitchain {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Two-step baselines treat step-1 objectives this close as equal.
constexpr double kBaselineTie = 1e-12;

using Clock = std::chrono::steady_clock;

struct Evaluated {
  Tour tour;
  LatencyBreakdown latency;
};

Evaluated evaluate(const Scenario& sc, const SplitAssignment& split) {
  const AugmentedNetwork aug =
      build_augmented(sc.network, sc.model, split, sc.candidates, sc.request);
  Tour tour = find_tour(aug);
  LatencyBreakdown latency = total_latency(sc.network, sc.model, sc.request, split, tour.path);
  return {std::move(tour), latency};
}

bool has_repeated_host(const ServicePath& path) {
  std::set<NodeIndex> seen;
  for (NodeIndex h : path.hosts) {
    if (!seen.insert(h).second) return true;
  }
  return false;
}

Solution make_solution(Scheme scheme, const SplitAssignment& split, Evaluated eval,
                       Clock::time_point started) {
  Solution out{split, std::move(eval.tour.path), eval.latency, scheme, {}, 0, 0, 0.0, false};
  out.multi_hosted = has_repeated_host(out.path);
  out.solve_time_s = std::chrono::duration<double>(Clock::now() - started).count();
  return out;
}

NodeIndex reference_of(const Scenario& sc) {
  return sc.reference_node.value_or(sc.request.destination);
}

// Cheapest feasible candidate per slot, ignoring routing.
SplitAssignment capacity_aware_split(const Scenario& sc) {
  const Request& rq = sc.request;
  auto cost = [&](int k, LayerRange range) {
    double best = kInf;
    for (NodeIndex host : sc.candidates.slot(k)) {
      const NodeSpec& node = sc.network.node(host);
      if (!capacity_feasible(node, sc.model, range, rq.batch, rq.mode).feasible()) continue;
      double c = 0.0;
      for (Direction dir : directions(rq.mode)) c += comp_delay(node, sc.model, range, rq.batch, dir);
      best = std::min(best, c);
    }
    return best;
  };
  auto result = detail::segment_dp(sc.model.layer_count(), sc.submodels(), cost);
  if (!result) throw InfeasibleError("no split fits the candidate hosts");
  return SplitAssignment(sc.model.layer_count(), std::move(result->starts));
}

Solution two_step(const Scenario& sc, Scheme scheme, const detail::SegmentCost& cost,
                  Clock::time_point started) {
  auto result = detail::segment_dp(sc.model.layer_count(), sc.submodels(), cost, kBaselineTie);
  if (!result) throw InfeasibleError("no split satisfies the capacity of the modeled nodes");
  const SplitAssignment split(sc.model.layer_count(), std::move(result->starts));
  Solution out = make_solution(scheme, split, evaluate(sc, split), started);
  out.evaluated_splits = 1;
  return out;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Bcd: return "bcd";
    case Scheme::Exact: return "exact";
    case Scheme::CompMs: return "comp-ms";
    case Scheme::CommMs: return "comm-ms";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view text) {
  if (text == "bcd") return Scheme::Bcd;
  if (text == "exact") return Scheme::Exact;
  if (text == "comp-ms") return Scheme::CompMs;
  if (text == "comm-ms") return Scheme::CommMs;
  throw ParseError("unknown scheme '" + std::string(text) +
                   "' (expected bcd, exact, comp-ms or comm-ms)");
}

void Scenario::validate() const {
  request.validate(network);
  const int K = submodels();
  if (K < 2 || K > model.layer_count()) {
    throw ValidationError("sub-model count " + std::to_string(K) + " outside 2.." +
                          std::to_string(model.layer_count()));
  }
  if (candidates.slot(1).size() != 1 || candidates.slot(1).front() != request.source) {
    throw ValidationError("first candidate slot must hold exactly the source");
  }
  if (candidates.slot(K).size() != 1 || candidates.slot(K).front() != request.destination) {
    throw ValidationError("last candidate slot must hold exactly the destination");
  }
  for (int k = 1; k <= K; ++k) {
    for (NodeIndex n : candidates.slot(k)) {
      if (n >= network.node_count()) throw ValidationError("candidate node off the network");
    }
  }
  if (std::isnan(epsilon) || epsilon < 0.0) throw ValidationError("epsilon must be >= 0");
  if (t_max < 1) throw ValidationError("t_max must be >= 1");
  if (reference_node && *reference_node >= network.node_count()) {
    throw ValidationError("reference node off the network");
  }
}

Solution bcd_solve(const Scenario& sc) {
  sc.validate();
  const auto started = Clock::now();
  SplitAssignment split = even_split(sc.model.layer_count(), sc.submodels());
  std::optional<Evaluated> current;
  try {
    current = evaluate(sc, split);
  } catch (const InfeasibleError&) {
    split = capacity_aware_split(sc);
    current = evaluate(sc, split);
  }
  SplitAssignment best_split = split;
  Evaluated best = *current;
  std::vector<double> trace{current->latency.total};
  int iterations = 0;
  for (int t = 1; t <= sc.t_max; ++t) {
    const Segmentation seg =
        k_sequence_segmentation(current->tour.path, sc.request, sc.network, sc.model, sc.candidates);
    split = seg.split;
    current = evaluate(sc, split);
    ++iterations;
    const double previous = trace.back();
    trace.push_back(current->latency.total);
    if (current->latency.total <= best.latency.total) {
      best = *current;
      best_split = split;
    }
    if (std::abs(current->latency.total - previous) <= sc.epsilon) break;
  }
  Solution out = make_solution(Scheme::Bcd, best_split, std::move(best), started);
  out.trace = std::move(trace);
  out.iterations = iterations;
  out.evaluated_splits = static_cast<std::uint64_t>(iterations) + 1;
  return out;
}

std::uint64_t split_count(int layer_count, int submodels) {
  if (submodels < 1 || layer_count < submodels) return 0;
  const std::uint64_t n = static_cast<std::uint64_t>(layer_count - 1);
  std::uint64_t r = static_cast<std::uint64_t>(submodels - 1);
  r = std::min(r, n - r);
  std::uint64_t value = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    // value * (n - r + i) is divisible by i; reduce first to keep the product small.
    const std::uint64_t g = std::gcd(value, i);
    const std::uint64_t factor = (n - r + i) / (i / g);
    value /= g;
    if (value > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    value *= factor;
  }
  return value;
}

Solution exact_solve(const Scenario& sc) {
  sc.validate();
  const auto started = Clock::now();
  const int L = sc.model.layer_count();
  const int K = sc.submodels();
  const std::uint64_t total = split_count(L, K);
  if (total > sc.enumeration_budget) {
    throw BudgetExceededError("exhaustive search needs " + std::to_string(total) +
                              " splits, budget is " + std::to_string(sc.enumeration_budget));
  }
  // Starts s^2 < ... < s^K in lexicographic order.
  std::vector<int> starts(static_cast<std::size_t>(K - 1));
  for (int i = 0; i < K - 1; ++i) starts[static_cast<std::size_t>(i)] = i + 2;
  std::optional<SplitAssignment> best_split;
  std::optional<Evaluated> best;
  std::uint64_t evaluated = 0;
  while (true) {
    const SplitAssignment split(L, starts);
    ++evaluated;
    try {
      Evaluated eval = evaluate(sc, split);
      if (!best || eval.latency.total < best->latency.total) {
        best = std::move(eval);
        best_split = split;
      }
    } catch (const InfeasibleError&) {
    }
    int i = K - 2;
    while (i >= 0 && starts[static_cast<std::size_t>(i)] == L - (K - 2 - i)) --i;
    if (i < 0) break;
    ++starts[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < K - 1; ++j) {
      starts[static_cast<std::size_t>(j)] = starts[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  if (!best) throw InfeasibleError("no split admits a feasible placement and route");
  Solution out = make_solution(Scheme::Exact, *best_split, std::move(*best), started);
  out.evaluated_splits = evaluated;
  return out;
}

Solution comp_ms_solve(const Scenario& sc) {
  sc.validate();
  const auto started = Clock::now();
  const Request& rq = sc.request;
  const NodeSpec& source = sc.network.node(rq.source);
  const NodeSpec& reference = sc.network.node(reference_of(sc));
  auto cost = [&](int k, LayerRange range) {
    const NodeSpec& node = k == 1 ? source : reference;
    if (!capacity_feasible(node, sc.model, range, rq.batch, rq.mode).feasible()) return kInf;
    double c = 0.0;
    for (Direction dir : directions(rq.mode)) c += comp_delay(node, sc.model, range, rq.batch, dir);
    return c;
  };
  return two_step(sc, Scheme::CompMs, cost, started);
}

Solution comm_ms_solve(const Scenario& sc) {
  sc.validate();
  const auto started = Clock::now();
  const Request& rq = sc.request;
  const int K = sc.submodels();
  const NodeSpec& source = sc.network.node(rq.source);
  const NodeSpec& reference = sc.network.node(reference_of(sc));
  auto cost = [&](int k, LayerRange range) {
    const NodeSpec& node = k == 1 ? source : reference;
    if (!capacity_feasible(node, sc.model, range, rq.batch, rq.mode).feasible()) return kInf;
    if (k == K) return 0.0;
    double bytes = 0.0;
    for (Direction dir : directions(rq.mode)) {
      bytes += static_cast<double>(rq.batch) * smashed_bytes(sc.model, range.last(), dir);
    }
    return bytes;
  };
  return two_step(sc, Scheme::CommMs, cost, started);
}

Solution solve(const Scenario& scenario, Scheme scheme) {
  switch (scheme) {
    case Scheme::Bcd: return bcd_solve(scenario);
    case Scheme::Exact: return exact_solve(scenario);
    case Scheme::CompMs: return comp_ms_solve(scenario);
    case Scheme::CommMs: return comm_ms_solve(scenario);
  }
  throw ValidationError("unknown scheme");
}

}  // namespace splitchain
