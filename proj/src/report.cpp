// SPDX-License-Identifier: Apache-2.0
#include "splitchain/report.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "splitchain/error.hpp"
#include "splitchain/quantity.hpp"

namespace splitchain {
namespace {

constexpr const char* kColumns[] = {"scheme",     "K",          "b",          "mode",
                                    "objective_s", "comp_fw_s",  "comp_bw_s",  "trans_fw_s",
                                    "trans_bw_s",  "prop_fw_s",  "prop_bw_s",  "iterations",
                                    "solve_time_s", "feasible",  "seed"};
constexpr std::size_t kColumnCount = std::size(kColumns);

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view text, std::string_view column) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("report column " + std::string(column) + ": bad integer '" +
                     std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view text, std::string_view column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("report column " + std::string(column) + ": bad number '" +
                     std::string(text) + "'");
  }
  return value;
}

std::string format_bytes(double bytes) { return format_double(bytes); }

}  // namespace

std::string report_header() {
  std::string out;
  for (std::size_t i = 0; i < kColumnCount; ++i) {
    if (i > 0) out += '\t';
    out += kColumns[i];
  }
  return out;
}

std::string format_report_row(const ReportRow& row) {
  std::string out;
  auto field = [&](const std::string& value) {
    if (!out.empty()) out += '\t';
    out += value;
  };
  field(row.scheme);
  field(std::to_string(row.K));
  field(std::to_string(row.b));
  field(row.mode);
  for (double v : {row.objective_s, row.comp_fw_s, row.comp_bw_s, row.trans_fw_s, row.trans_bw_s,
                   row.prop_fw_s, row.prop_bw_s}) {
    field(format_double(v));
  }
  field(std::to_string(row.iterations));
  field(format_double(row.solve_time_s));
  field(row.feasible ? "true" : "false");
  field(std::to_string(row.seed));
  return out;
}

std::string format_report(std::span<const ReportRow> rows) {
  std::string out = report_header() + "\n";
  for (const auto& row : rows) out += format_report_row(row) + "\n";
  return out;
}

std::vector<ReportRow> parse_report(std::string_view text) {
  std::vector<ReportRow> rows;
  bool header_seen = false;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != report_header()) throw ParseError("report header does not match");
      header_seen = true;
      continue;
    }
    const auto cells = split_tabs(line);
    if (cells.size() != kColumnCount) {
      throw ParseError("report row has " + std::to_string(cells.size()) + " columns, expected " +
                       std::to_string(kColumnCount));
    }
    ReportRow row;
    row.scheme = std::string(cells[0]);
    row.K = parse_integer<int>(cells[1], kColumns[1]);
    row.b = parse_integer<int>(cells[2], kColumns[2]);
    row.mode = std::string(cells[3]);
    double* reals[] = {&row.objective_s, &row.comp_fw_s,  &row.comp_bw_s, &row.trans_fw_s,
                       &row.trans_bw_s,  &row.prop_fw_s,  &row.prop_bw_s};
    for (std::size_t i = 0; i < std::size(reals); ++i) {
      *reals[i] = parse_real(cells[4 + i], kColumns[4 + i]);
    }
    row.iterations = parse_integer<int>(cells[11], kColumns[11]);
    row.solve_time_s = parse_real(cells[12], kColumns[12]);
    if (cells[13] == "true") {
      row.feasible = true;
    } else if (cells[13] == "false") {
      row.feasible = false;
    } else {
      throw ParseError("report column feasible must be true or false");
    }
    row.seed = parse_integer<std::uint64_t>(cells[14], kColumns[14]);
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("report has no header");
  return rows;
}

ReportRow make_row(const Scenario& scenario, const Solution& solution, bool include_timing) {
  ReportRow row;
  row.scheme = std::string(to_string(solution.scheme));
  row.K = scenario.submodels();
  row.b = scenario.request.batch;
  row.mode = std::string(to_string(scenario.request.mode));
  row.objective_s = solution.latency.total;
  row.comp_fw_s = solution.latency.comp_fw;
  row.comp_bw_s = solution.latency.comp_bw;
  row.trans_fw_s = solution.latency.trans_fw;
  row.trans_bw_s = solution.latency.trans_bw;
  row.prop_fw_s = solution.latency.prop_fw;
  row.prop_bw_s = solution.latency.prop_bw;
  row.iterations = solution.iterations;
  row.solve_time_s = include_timing ? solution.solve_time_s : 0.0;
  row.feasible = true;
  row.seed = scenario.seed;
  return row;
}

ReportRow make_infeasible_row(const Scenario& scenario, Scheme scheme) {
  ReportRow row;
  row.scheme = std::string(to_string(scheme));
  row.K = scenario.submodels();
  row.b = scenario.request.batch;
  row.mode = std::string(to_string(scenario.request.mode));
  row.objective_s = std::numeric_limits<double>::infinity();
  row.feasible = false;
  row.seed = scenario.seed;
  return row;
}

std::string format_solution_graph(const Scenario& scenario, const Solution& solution) {
  const PhysicalNetwork& net = scenario.network;
  const ModelProfile& model = scenario.model;
  const Request& rq = scenario.request;
  const int K = solution.split.submodel_count();
  std::ostringstream out;
  out << "scheme " << to_string(solution.scheme) << " K " << K << " b " << rq.batch << " mode "
      << to_string(rq.mode) << " objective_s " << format_double(solution.latency.total) << "\n";
  out << "split " << to_string(solution.split) << "\n";
  std::map<NodeIndex, double> memory;
  for (int k = 1; k <= K; ++k) {
    const LayerRange range = solution.split.range(k);
    const NodeIndex host = solution.path.hosts[static_cast<std::size_t>(k - 1)];
    const CapacityCheck cap = capacity_feasible(net.node(host), model, range, rq.batch, rq.mode);
    memory[host] += cap.mem_required;
    out << "submodel " << k << " layers " << range.first << "-" << range.last() << " host "
        << net.node(host).id << " mem_bytes " << format_bytes(cap.mem_required) << " disk_bytes "
        << format_bytes(cap.disk_required) << "\n";
  }
  for (int r = 1; r <= K + 1; ++r) {
    const auto& route = solution.path.routes[static_cast<std::size_t>(r - 1)];
    out << "subpath " << r << " route";
    for (std::size_t i = 0; i < route.size(); ++i) out << (i == 0 ? " " : " -> ") << net.node(route[i]).id;
    out << " hops " << route.size() - 1;
    if (r >= 2 && r <= K) {
      const int boundary = solution.split.range(r - 1).last();
      for (Direction dir : directions(rq.mode)) {
        out << (dir == Direction::Forward ? " smashed_fw_bytes " : " smashed_bw_bytes ")
            << format_bytes(static_cast<double>(rq.batch) * smashed_bytes(model, boundary, dir));
      }
    }
    out << "\n";
  }
  for (const auto& [node, bytes] : memory) {
    out << "node " << net.node(node).id << " mem_bytes " << format_bytes(bytes) << " capacity "
        << format_bytes(net.node(node).c_mem) << "\n";
  }
  if (solution.multi_hosted) out << "note multi-hosted\n";
  return out.str();
}

std::vector<ReportRow> run_sweep(const ScenarioFile& file, const SweepOptions& options) {
  if (options.k_values.empty() || options.batches.empty() || options.schemes.empty()) {
    throw ValidationError("sweep needs at least one K, one batch size and one scheme");
  }
  std::vector<SweepCell> cells;
  for (Scheme scheme : options.schemes) {
    for (int k : options.k_values) {
      for (int b : options.batches) cells.push_back({scheme, k, b});
    }
  }
  std::vector<ReportRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const SweepCell& cell = cells[i];
      try {
        const Scenario sc = file.instantiate(cell.K, cell.b);
        try {
          rows[i] = make_row(sc, solve(sc, cell.scheme), options.include_timing);
        } catch (const InfeasibleError&) {
          rows[i] = make_infeasible_row(sc, cell.scheme);
        } catch (const BudgetExceededError&) {
          rows[i] = make_infeasible_row(sc, cell.scheme);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(cells.size())));
  std::vector<std::thread> threads;
  for (unsigned j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

}  // namespace splitchain
