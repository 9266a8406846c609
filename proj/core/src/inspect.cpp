#include "gmatch/inspect.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace gmatch {

std::pair<std::vector<double>, std::vector<double>> node_importance(const ForwardTrace& trace) {
  if (!trace.fusion_p.valid() || !trace.fusion_q.valid()) {
    throw std::logic_error("node_importance needs a populated forward trace");
  }
  std::vector<double> p(trace.fusion_p.data().begin(), trace.fusion_p.data().end());
  std::vector<double> q(trace.fusion_q.data().begin(), trace.fusion_q.data().end());
  return {std::move(p), std::move(q)};
}

std::vector<double> edge_importance(const ForwardTrace& trace, const SentencePairGraph& graph) {
  const auto [wp, wq] = node_importance(trace);
  if (static_cast<int>(wp.size()) != graph.premise_len ||
      static_cast<int>(wq.size()) != graph.hypothesis_len) {
    throw std::logic_error("trace and graph disagree on sentence lengths");
  }
  auto node_weight = [&](int v) {
    return v < graph.premise_len ? wp[v] : wq[v - graph.premise_len];
  };
  std::vector<double> weights;
  weights.reserve(graph.edges.size());
  for (const Edge& e : graph.edges) {
    weights.push_back(node_weight(e.src) + node_weight(e.dst));
  }
  return weights;
}

ImportanceReport importance_report(const ForwardTrace& trace, const SentencePairGraph& graph) {
  ImportanceReport report;
  const auto [wp, wq] = node_importance(trace);
  report.node_weights = wp;
  report.node_weights.insert(report.node_weights.end(), wq.begin(), wq.end());
  report.edge_weights = edge_importance(trace, graph);
  report.logits.assign(trace.logits.data().begin(), trace.logits.data().end());
  report.predicted_label = static_cast<int>(
      std::max_element(report.logits.begin(), report.logits.end()) - report.logits.begin());
  return report;
}

double default_dot_threshold(const ImportanceReport& report) {
  if (report.edge_weights.empty()) return 0;
  double total = 0;
  for (double w : report.edge_weights) total += w;
  return 0.5 * total / static_cast<double>(report.edge_weights.size());
}

namespace {

std::string escape_dot(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '\\' || c == '"') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Linear rescale onto [0.1, 1.0]; constant inputs all map to 1.
std::vector<double> rescale(const std::vector<double>& ws) {
  const auto [lo_it, hi_it] = std::minmax_element(ws.begin(), ws.end());
  const double lo = *lo_it, hi = *hi_it;
  std::vector<double> out(ws.size(), 1.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < ws.size(); ++i) {
      out[i] = 0.1 + 0.9 * (ws[i] - lo) / (hi - lo);
    }
  }
  return out;
}

std::string node_id(const SentencePairGraph& g, int v) {
  return v < g.premise_len ? "p" + std::to_string(v)
                           : "q" + std::to_string(v - g.premise_len);
}

const char* edge_style(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kLocalDep: return "solid";
    case EdgeKind::kLocalSeq: return "solid";
    case EdgeKind::kInteractive: return "dashed";
    case EdgeKind::kSelf: return "dotted";
  }
  return "solid";
}

}  // namespace

std::string export_dot(const SentencePairGraph& graph, const ImportanceReport& report,
                       double threshold) {
  if (static_cast<int>(report.node_weights.size()) != graph.num_nodes() ||
      report.edge_weights.size() != graph.edges.size()) {
    throw std::logic_error("report does not match the graph");
  }
  const std::vector<double> node_scale = rescale(report.node_weights);
  const std::vector<double> edge_scale = rescale(report.edge_weights);

  std::ostringstream os;
  os << "digraph match {\n";
  os << "  graph [rankdir=LR];\n";
  os << "  node [shape=ellipse, style=filled];\n";
  for (int side = 0; side < 2; ++side) {
    os << "  subgraph cluster_" << (side == 0 ? 'p' : 'q') << " {\n";
    os << "    label=\"" << (side == 0 ? "premise" : "hypothesis") << "\";\n";
    const int begin = side == 0 ? 0 : graph.premise_len;
    const int end = side == 0 ? graph.premise_len : graph.num_nodes();
    for (int v = begin; v < end; ++v) {
      // Darkness tracks importance: scale 1 renders black, 0.1 near-white.
      const int gray = static_cast<int>(std::lround(100.0 * (1.0 - node_scale[v])));
      const char* font = node_scale[v] > 0.55 ? "white" : "black";
      os << "    " << node_id(graph, v) << " [label=\"" << escape_dot(graph.nodes[v])
         << "\", fillcolor=\"gray" << gray << "\", fontcolor=\"" << font << "\"];\n";
    }
    os << "  }\n";
  }
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    if (e.kind == EdgeKind::kInteractive && report.edge_weights[i] < threshold) continue;
    std::ostringstream width;
    width.precision(3);
    width << std::fixed << 0.5 + 3.0 * edge_scale[i];
    os << "  " << node_id(graph, e.src) << " -> " << node_id(graph, e.dst) << " [penwidth="
       << width.str() << ", style=" << edge_style(e.kind) << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string report_to_json(const ImportanceReport& report, const SentencePairGraph& graph,
                           const std::string& pair_id, const std::string& label_name) {
  nlohmann::json j;
  j["pair_id"] = pair_id;
  j["predicted_label"] = label_name;
  j["logits"] = report.logits;
  j["node_weights"]["premise"] = std::vector<double>(
      report.node_weights.begin(), report.node_weights.begin() + graph.premise_len);
  j["node_weights"]["hypothesis"] = std::vector<double>(
      report.node_weights.begin() + graph.premise_len, report.node_weights.end());
  auto& edges = j["edges"] = nlohmann::json::array();
  for (std::size_t i = 0; i < graph.edges.size(); ++i) {
    const Edge& e = graph.edges[i];
    edges.push_back({{"src", e.src},
                     {"dst", e.dst},
                     {"rel", e.relation},
                     {"kind", edge_kind_name(e.kind)},
                     {"weight", report.edge_weights[i]}});
  }
  return j.dump(2) + "\n";
}

}  // namespace gmatch
