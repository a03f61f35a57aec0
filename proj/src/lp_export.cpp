#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "drsync/mip.hpp"

namespace drsync {

namespace {

std::string x(int k, int a) { return "x_" + std::to_string(k) + "_" + std::to_string(a); }
std::string r(int k, int n) { return "r_" + std::to_string(k) + "_" + std::to_string(n); }

void write_terms(std::ostream& os, const std::vector<std::pair<long, std::string>>& terms) {
  int on_line = 0;
  bool first = true;
  for (const auto& [c, v] : terms) {
    if (c == 0) continue;
    if (on_line == 8) {
      os << "\n   ";
      on_line = 0;
    }
    if (c < 0) os << (first ? "-" : " - ");
    else if (!first) os << " + ";
    const long a = c < 0 ? -c : c;
    if (a != 1) os << a << ' ';
    os << v;
    first = false;
    ++on_line;
  }
  if (first) os << "0 " << (terms.empty() ? "x_none" : terms.front().second);
}

}  // namespace

std::vector<Row> model_rows(const Model& m) {
  std::vector<Row> rows;
  if (!m.graph || !m.instance) return rows;
  const auto& g = *m.graph;
  const auto& inst = *m.instance;
  const auto& L = inst.legal;
  const int K = m.driver_count;
  const auto& src_out = g.out_arcs(TimeGraph::kSource);
  const auto& sink_in = g.in_arcs(TimeGraph::kSink);
  auto t = [&](int n) { return static_cast<long>(g.node(n).time); };
  auto sum_k = [&](const std::vector<int>& arcs, long coef) {
    std::vector<std::pair<long, std::string>> terms;
    for (int k = 0; k < K; ++k) {
      for (int a : arcs) terms.emplace_back(coef, x(k, a));
    }
    return terms;
  };

  for (int k = 0; k < K; ++k) {
    const std::string ks = std::to_string(k);
    for (const auto& n : g.nodes()) {
      if (n.is_depot()) continue;
      Row row{"flow_" + ks + "_" + std::to_string(n.id), {}, "=", 0};
      for (int a : g.in_arcs(n.id)) row.terms.emplace_back(1, x(k, a));
      for (int a : g.out_arcs(n.id)) row.terms.emplace_back(-1, x(k, a));
      rows.push_back(std::move(row));
    }
    Row act{"activation_" + ks, {}, "<=", 1};
    for (int a : src_out) act.terms.emplace_back(1, x(k, a));
    rows.push_back(act);
    Row ret{"return_" + ks, {}, "=", 0};
    for (int a : src_out) ret.terms.emplace_back(1, x(k, a));
    for (int a : sink_in) ret.terms.emplace_back(-1, x(k, a));
    rows.push_back(std::move(ret));
  }

  for (std::size_t ri = 0; ri < g.ride_count(); ++ri) {
    const int rr = static_cast<int>(ri);
    const int segs = static_cast<int>(g.stop_count(rr)) - 1;
    for (int s = 0; s < segs; ++s) {
      const std::string base = std::to_string(rr) + "_" + std::to_string(s);
      std::vector<int> leaving;
      std::map<int, std::pair<std::vector<int>, std::vector<int>>> stations;
      for (int a : g.segment_arcs(rr, s)) {
        const auto& arc = g.arc(a);
        if (arc.leg != LegKind::from_station) leaving.push_back(a);
        if (arc.leg == LegKind::to_station) stations[arc.to].first.push_back(a);
        if (arc.leg == LegKind::from_station) stations[arc.from].second.push_back(a);
      }
      rows.push_back({"cover_" + base, sum_k(leaving, 1), "=", 1});
      for (const auto& [node, io] : stations) {
        Row row{"station_" + base + "_" + std::to_string(node), sum_k(io.first, 1), "=", 0};
        auto out = sum_k(io.second, -1);
        row.terms.insert(row.terms.end(), out.begin(), out.end());
        rows.push_back(std::move(row));
      }
    }
    // The bus leaves an interior stop from the copy it arrived at.
    for (int p = 1; p < segs; ++p) {
      for (int c : g.stop_copies(rr, p)) {
        std::vector<int> in, out;
        for (int a : g.segment_arcs(rr, p - 1)) {
          if (g.arc(a).to == c && g.arc(a).leg != LegKind::to_station) in.push_back(a);
        }
        for (int a : g.segment_arcs(rr, p)) {
          if (g.arc(a).from == c && g.arc(a).leg != LegKind::from_station) out.push_back(a);
        }
        Row row{"sync_" + std::to_string(rr) + "_" + std::to_string(p) + "_" + std::to_string(c), sum_k(in, 1), "=", 0};
        auto o = sum_k(out, -1);
        row.terms.insert(row.terms.end(), o.begin(), o.end());
        rows.push_back(std::move(row));
      }
    }
  }

  for (const auto& arc : g.arcs()) {
    if (arc.family != ArcFamily::deadhead) continue;
    Row row{"deadhead_" + std::to_string(arc.id), sum_k({arc.id}, 1), "<=", 0};
    auto tw = sum_k({arc.twin}, -(K - 1));
    row.terms.insert(row.terms.end(), tw.begin(), tw.end());
    rows.push_back(std::move(row));
  }

  for (int k = 0; k < K; ++k) {
    const std::string ks = std::to_string(k);
    for (const auto& arc : g.arcs()) {
      if (arc.family == ArcFamily::depot || arc.consumption < 0) continue;
      // r_j >= r_i + c - t_cs (1 - x)
      Row row{"resource_" + ks + "_" + std::to_string(arc.id),
              {{1, r(k, arc.to)}, {-1, r(k, arc.from)}, {-L.t_cs, x(k, arc.id)}},
              ">=",
              static_cast<long>(arc.consumption) - L.t_cs};
      rows.push_back(std::move(row));
    }
    Row steer{"daily_steering_" + ks, {}, "<=", L.t_ds};
    for (const auto& arc : g.arcs()) {
      if (arc.mode == 1) steer.terms.emplace_back(arc.duration, x(k, arc.id));
    }
    rows.push_back(std::move(steer));
    Row work{"daily_working_" + ks, {}, "<=", L.t_dw};
    for (int a : sink_in) work.terms.emplace_back(t(g.arc(a).from), x(k, a));
    for (int a : src_out) work.terms.emplace_back(-t(g.arc(a).to), x(k, a));
    rows.push_back(std::move(work));
    if (k + 1 < K) {
      Row sym{"symmetry_" + ks, {}, "<=", 0};
      for (int a : src_out) sym.terms.emplace_back(1, x(k + 1, a));
      for (int a : src_out) sym.terms.emplace_back(-1, x(k, a));
      rows.push_back(std::move(sym));
    }
  }

  if (inst.exchange_policy == ExchangePolicy::none) {
    // Riders stay on a bus between its pickup and its delivery.
    for (int k = 0; k < K; ++k) {
      for (const auto& n : g.nodes()) {
        if (n.is_depot()) continue;
        std::map<int, Row> per_ride;
        for (int a : g.in_arcs(n.id)) {
          const auto& arc = g.arc(a);
          if (arc.ride < 0) continue;
          per_ride[arc.ride].terms.emplace_back(1, x(k, a));
        }
        for (int a : g.out_arcs(n.id)) {
          const auto& arc = g.arc(a);
          if (arc.ride < 0) continue;
          per_ride[arc.ride].terms.emplace_back(-1, x(k, a));
        }
        for (auto& [ride, row] : per_ride) {
          const bool interior = std::find(g.stop_copies(ride, 0).begin(), g.stop_copies(ride, 0).end(), n.id) ==
                                    g.stop_copies(ride, 0).end() &&
                                std::find(g.stop_copies(ride, static_cast<int>(g.stop_count(ride)) - 1).begin(),
                                          g.stop_copies(ride, static_cast<int>(g.stop_count(ride)) - 1).end(),
                                          n.id) == g.stop_copies(ride, static_cast<int>(g.stop_count(ride)) - 1).end();
          if (!interior) continue;
          row.name = "onboard_" + std::to_string(k) + "_" + std::to_string(ride) + "_" + std::to_string(n.id);
          row.sense = "=";
          rows.push_back(std::move(row));
        }
      }
    }
  }

  rows.push_back({"lower_bound", sum_k(src_out, 1), ">=", m.lower_bound});
  for (int k = 0; k < std::min(m.lower_bound, K); ++k) {
    Row out{"active_out_" + std::to_string(k), {}, ">=", 1};
    for (int a : src_out) out.terms.emplace_back(1, x(k, a));
    rows.push_back(std::move(out));
    Row in{"active_in_" + std::to_string(k), {}, ">=", 1};
    for (int a : sink_in) in.terms.emplace_back(1, x(k, a));
    rows.push_back(std::move(in));
  }
  if (m.cardinality_cap) rows.push_back({"cap", sum_k(src_out, 1), "<=", *m.cardinality_cap});
  return rows;
}

std::string model_to_lp(const Model& m) {
  std::ostringstream os;
  os << "\\ drsync driver model";
  if (m.instance) os << ' ' << m.instance->name;
  os << "\n\\ drivers " << m.driver_count << ", binaries " << m.binary_count() << ", continuous "
     << m.continuous_count() << "\n";
  os << "Minimize\n";
  const bool empty = !m.graph || m.driver_count == 0;
  if (!empty) {
    std::vector<std::pair<long, std::string>> obj;
    for (int k = 0; k < m.driver_count; ++k) {
      for (int a : m.graph->out_arcs(TimeGraph::kSource)) obj.emplace_back(1, x(k, a));
    }
    os << " obj: ";
    write_terms(os, obj);
    os << "\n";
  }
  os << "Subject To\n";
  if (!empty) {
    for (const auto& row : model_rows(m)) {
      if (row.terms.empty()) continue;
      os << ' ' << row.name << ": ";
      write_terms(os, row.terms);
      os << ' ' << row.sense << ' ' << row.rhs << "\n";
    }
    os << "Bounds\n";
    for (int k = 0; k < m.driver_count; ++k) {
      for (const auto& n : m.graph->nodes()) os << " 0 <= " << r(k, n.id) << " <= " << m.instance->legal.t_cs << "\n";
    }
    os << "Binaries\n";
    for (int k = 0; k < m.driver_count; ++k) {
      for (const auto& a : m.graph->arcs()) os << ' ' << x(k, a.id) << "\n";
    }
  }
  os << "End\n";
  return os.str();
}

void export_model(const Model& m, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write model file '" + path + "'");
  f << model_to_lp(m);
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace drsync
