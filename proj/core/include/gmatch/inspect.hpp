#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gmatch/graph.hpp"
#include "gmatch/model.hpp"

namespace gmatch {

// Per-pair interpretability summary. node_weights holds the fusion
// attention over combined node ids (premise then hypothesis), each
// sentence's block summing to 1; edge_weights is parallel to graph.edges.
struct ImportanceReport {
  std::vector<double> node_weights;
  std::vector<double> edge_weights;
  int predicted_label = -1;
  std::vector<double> logits;
};

// The fusion attention vectors exactly as the forward pass used them.
std::pair<std::vector<double>, std::vector<double>> node_importance(const ForwardTrace& trace);

// Edge weight = fusion weight of its head node + fusion weight of its tail
// node (a SELF loop scores twice its node).
std::vector<double> edge_importance(const ForwardTrace& trace, const SentencePairGraph& graph);

ImportanceReport importance_report(const ForwardTrace& trace, const SentencePairGraph& graph);

// 0.5 * mean(edge weights); the rendering cutoff used when no explicit
// threshold is given.
double default_dot_threshold(const ImportanceReport& report);

// Graphviz digraph with the two sentences as clusters. Node fill darkness
// and edge pen width scale linearly with the weights (rescaled to
// [0.1, 1.0]); interactive edges with weight strictly below `threshold`
// are omitted.
std::string export_dot(const SentencePairGraph& graph, const ImportanceReport& report,
                       double threshold);

// JSON body for the inspect command, mirroring the report plus the graph.
std::string report_to_json(const ImportanceReport& report, const SentencePairGraph& graph,
                           const std::string& pair_id, const std::string& label_name);

}  // namespace gmatch
