#pragma once

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

#include "xylokit/graph.hpp"

namespace xylokit {

/// A parsed network description: the finalized graph plus the holder that
/// wraps the whole layer stack.
struct NetworkGraph {
    std::unique_ptr<Graph> graph;
    ModuleId root = -1;
};

/// Builds a graph from the network description format: an ordered layer list
/// (or an object with a "layers" field) of
///   {"type":"linear","rows":R,"cols":C,"weights":<matrix>}
///   {"type":"lif","n":N,"channels":1|2,"tau_mem":...,"tau_syn":...,
///    "threshold":...,"bias":...,"w_rec":<matrix, optional>}
///   {"type":"residual","body":[...nested layers...]}
/// where <matrix> is either nested arrays or
/// {"init":"uniform","low":x,"high":y,"seed":s} and LIF parameters accept a
/// scalar (broadcast) or an array of length N; tau_syn additionally accepts
/// one array per channel. Throws ParseError on malformed input and the
/// graph module constructors' errors on bad values.
NetworkGraph parse_network(const nlohmann::json& doc);

/// Reads and parses a network description file.
NetworkGraph load_network(const std::string& path);

}  // namespace xylokit
