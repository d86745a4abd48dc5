#include "xylokit/mapper.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json_util.hpp"

namespace xylokit {

std::string DesignRuleReport::to_string() const {
    std::ostringstream out;
    for (const auto& v : violations) {
        out << v.rule << ": " << v.message;
        if (!v.where.empty()) out << " (" << v.where << ")";
        out << "\n";
    }
    return out.str();
}

namespace {

// Shared structural analysis behind check_design_rules and map_graph.
struct Analysis {
    DesignRuleReport report;
    std::vector<ModuleId> lif_order;          // topological, final last
    ModuleId entry_linear = -1;
    ModuleId final_lif = -1;
    int hidden_total = 0;
    std::unordered_map<ModuleId, int> offset; // hidden LIF -> first global index

    struct LinearRoute {
        ModuleId linear;
        ModuleId src_lif;  // -1 for the graph input
        ModuleId dst_lif;
    };
    std::vector<LinearRoute> routes;

    struct Skip {
        ModuleId src_lif;
        int src_idx;
        ModuleId dst_lif;
        int dst_idx;
        ModuleId holder;
    };
    std::vector<Skip> skips;
};

void add(DesignRuleReport& r, std::string rule, std::string message, std::string where = {}) {
    r.violations.push_back({std::move(rule), std::move(message), std::move(where)});
}

// The unique LIF source of a node, or -1 (0 or several LIF sources).
ModuleId unique_lif_source(const Graph& g, NodeId n) {
    ModuleId found = -1;
    for (ModuleId m : g.node(n).source_modules) {
        if (g.module(m).kind != ModuleKind::LIFNeurons) continue;
        if (found >= 0 && found != m) return -1;
        found = m;
    }
    return found;
}

// Index of node n among module m's resolved outputs, or -1.
int output_index(const Graph& g, ModuleId m, NodeId n) {
    const auto outs = g.resolved_outputs(m);
    for (std::size_t i = 0; i < outs.size(); ++i)
        if (outs[i] == n) return static_cast<int>(i);
    return -1;
}

Analysis analyze(const Graph& g, ModuleId root) {
    Analysis a;

    std::vector<TraversalEntry> order;
    try {
        order = traverse(g, root);
    } catch (const CycleError& e) {
        add(a.report, "R1", e.what());
        return a;
    }
    if (order.empty()) {
        add(a.report, "R1", "graph is empty");
        return a;
    }
    const Graph::Component comp = g.component(root);

    std::vector<ModuleId> entries;    // sourceless modules
    std::vector<ModuleId> terminals;  // sinkless modules
    for (const TraversalEntry& e : order) {
        const GraphModule& m = g.module(e.module);
        bool sourceless = true;
        for (NodeId n : g.resolved_inputs(e.module))
            if (!g.node(n).source_modules.empty()) sourceless = false;
        bool sinkless = true;
        for (NodeId n : g.resolved_outputs(e.module))
            if (!g.node(n).sink_modules.empty()) sinkless = false;
        if (sourceless) entries.push_back(e.module);
        if (sinkless) terminals.push_back(e.module);

        if (m.kind == ModuleKind::LIFNeurons) a.lif_order.push_back(e.module);
    }

    // R1: every path starts with a linear and strictly alternates.
    for (ModuleId id : entries)
        if (g.module(id).kind != ModuleKind::LinearWeights)
            add(a.report, "R1", "graph must begin with LinearWeights", g.module(id).name);
    for (ModuleId id : terminals)
        if (g.module(id).kind != ModuleKind::LIFNeurons)
            add(a.report, "R1", "every path must end with LIFNeurons", g.module(id).name);

    std::vector<ModuleId> linear_entries;
    for (ModuleId id : entries)
        if (g.module(id).kind == ModuleKind::LinearWeights) linear_entries.push_back(id);
    std::vector<ModuleId> lif_terminals;
    for (ModuleId id : terminals)
        if (g.module(id).kind == ModuleKind::LIFNeurons) lif_terminals.push_back(id);

    if (linear_entries.size() != 1)
        add(a.report, "R1",
            "expected exactly one entry LinearWeights module, found " +
                std::to_string(linear_entries.size()));
    if (lif_terminals.size() != 1)
        add(a.report, "R1",
            "expected exactly one terminal LIFNeurons layer, found " +
                std::to_string(lif_terminals.size()));
    if (linear_entries.size() == 1) a.entry_linear = linear_entries.front();
    if (lif_terminals.size() == 1) a.final_lif = lif_terminals.front();

    // Alternation and routing of every linear.
    for (const TraversalEntry& e : order) {
        const GraphModule& m = g.module(e.module);
        if (m.kind == ModuleKind::LinearWeights) {
            std::set<ModuleId> src_set, dst_set;
            bool clean = true;
            bool has_source = false, missing_source = false;
            for (NodeId n : g.resolved_inputs(e.module)) {
                const auto& srcs = g.node(n).source_modules;
                if (srcs.empty()) missing_source = true;
                for (ModuleId s : srcs) {
                    has_source = true;
                    if (g.module(s).kind != ModuleKind::LIFNeurons) {
                        add(a.report, "R1", "LinearWeights fed by " +
                                                std::string(to_string(g.module(s).kind)),
                            m.name);
                        clean = false;
                    } else {
                        src_set.insert(s);
                    }
                }
            }
            if (has_source && missing_source) {
                add(a.report, "R1", "LinearWeights with partially connected inputs", m.name);
                clean = false;
            }
            if (src_set.size() > 1) {
                add(a.report, "R1", "LinearWeights fed by more than one LIF layer", m.name);
                clean = false;
            }
            for (NodeId n : g.resolved_outputs(e.module))
                for (ModuleId s : g.node(n).sink_modules) {
                    if (g.module(s).kind != ModuleKind::LIFNeurons) {
                        add(a.report, "R1", "LinearWeights feeding " +
                                                std::string(to_string(g.module(s).kind)),
                            m.name);
                        clean = false;
                    } else {
                        dst_set.insert(s);
                    }
                }
            if (dst_set.size() > 1) {
                add(a.report, "R1", "LinearWeights fans out to more than one LIF layer",
                    m.name);
                clean = false;
            }
            if (clean && dst_set.size() == 1) {
                Analysis::LinearRoute route;
                route.linear = e.module;
                route.src_lif = src_set.empty() ? -1 : *src_set.begin();
                route.dst_lif = *dst_set.begin();
                a.routes.push_back(route);
            }
        } else if (m.kind == ModuleKind::LIFNeurons) {
            for (NodeId n : g.resolved_inputs(e.module))
                for (ModuleId s : g.node(n).source_modules)
                    if (g.module(s).kind != ModuleKind::LinearWeights)
                        add(a.report, "R1", "LIFNeurons fed by " +
                                                std::string(to_string(g.module(s).kind)),
                            m.name);
        }
    }

    // No two linears between the same pair of layers (weights must land at
    // exactly one coordinate of the global matrix).
    std::map<std::pair<ModuleId, ModuleId>, int> route_count;
    for (const auto& r : a.routes) ++route_count[{r.src_lif, r.dst_lif}];
    for (const auto& [key, count] : route_count)
        if (count > 1)
            add(a.report, "R1", "parallel LinearWeights modules between the same layers");

    if (a.entry_linear >= 0 && a.final_lif >= 0) {
        for (const auto& r : a.routes)
            if (r.linear == a.entry_linear && r.dst_lif == a.final_lif)
                add(a.report, "R1",
                    "network needs at least one hidden LIF layer between input and output");
    }

    // Hidden numbering in traversal order.
    for (ModuleId lif : a.lif_order) {
        if (lif == a.final_lif) continue;
        a.offset[lif] = a.hidden_total;
        a.hidden_total += g.module(lif).lif().neurons;
    }

    // R2: input width ("Max. input channels" = 16).
    if (a.entry_linear >= 0) {
        const auto rows = g.module(a.entry_linear).linear().weights.rows();
        if (rows > 16)
            add(a.report, "R2",
                "Max. input channels: observed " + std::to_string(rows) + ", allowed 16",
                g.module(a.entry_linear).name);
    }

    // R3: hidden budget ("Max. hidden LIF neurons" = 1000).
    if (a.hidden_total > 1000)
        add(a.report, "R3",
            "Max. hidden LIF neurons: observed " + std::to_string(a.hidden_total) +
                ", allowed 1000");

    // R4: output budget ("Max. output LIF neurons" = 8).
    if (a.final_lif >= 0) {
        const int n = g.module(a.final_lif).lif().neurons;
        if (n > 8)
            add(a.report, "R4",
                "Max. output LIF neurons: observed " + std::to_string(n) + ", allowed 8",
                g.module(a.final_lif).name);
    }

    // R5: synapse channels (hidden <= 2, output path exactly 1, no output
    // recurrence).
    for (ModuleId lif : a.lif_order) {
        const LifPayload& p = g.module(lif).lif();
        if (lif == a.final_lif) {
            if (p.channels != 1)
                add(a.report, "R5",
                    "Max. input synapses per output neuron: observed " +
                        std::to_string(p.channels) + ", allowed 1",
                    g.module(lif).name);
            if (p.params.w_rec)
                add(a.report, "R5", "recurrent weights on the output layer are not supported",
                    g.module(lif).name);
        } else if (p.channels > 2) {
            add(a.report, "R5",
                "Max. input synapses per hidden neuron: observed " +
                    std::to_string(p.channels) + ", allowed 2",
                g.module(lif).name);
        }
    }

    // R6: skip pairs must join hidden LIF outputs, one alias per source
    // neuron ("Max. alias targets (hidden neurons only)" = 1).
    std::map<std::pair<ModuleId, int>, int> alias_count;
    for (ModuleId holder : g.holders_in(comp)) {
        for (const auto& [in_raw, out_raw] : g.module(holder).holder().skip_pairs) {
            const NodeId in_node = g.canonical(in_raw);
            const NodeId out_node = g.canonical(out_raw);
            const ModuleId src = unique_lif_source(g, in_node);
            const ModuleId dst = unique_lif_source(g, out_node);
            if (src < 0) {
                add(a.report, "R6", "skip source is not a LIF output",
                    g.module(holder).name);
                continue;
            }
            if (dst < 0) {
                add(a.report, "R6", "skip target is not a LIF output",
                    g.module(holder).name);
                continue;
            }
            if (src == a.final_lif || dst == a.final_lif) {
                add(a.report, "R6",
                    "Max. alias targets (hidden neurons only): skip touches the output layer",
                    g.module(holder).name);
                continue;
            }
            Analysis::Skip skip;
            skip.src_lif = src;
            skip.src_idx = output_index(g, src, in_node);
            skip.dst_lif = dst;
            skip.dst_idx = output_index(g, dst, out_node);
            skip.holder = holder;
            if (skip.src_idx < 0 || skip.dst_idx < 0) {
                add(a.report, "R6", "skip pair does not line up with LIF outputs",
                    g.module(holder).name);
                continue;
            }
            if (++alias_count[{src, skip.src_idx}] > 1) {
                add(a.report, "R6",
                    "Max. alias targets (hidden neurons only): observed " +
                        std::to_string(alias_count[{src, skip.src_idx}]) +
                        " aliases on one neuron, allowed 1",
                    g.module(src).name + "[" + std::to_string(skip.src_idx) + "]");
                continue;
            }
            a.skips.push_back(skip);
        }
    }

    return a;
}

}  // namespace

DesignRuleReport check_design_rules(const Graph& g, ModuleId root) {
    if (!g.finalized())
        throw MappingError("check_design_rules: graph must be finalized first");
    return analyze(g, root).report;
}

FloatSpecification map_graph(const Graph& g, ModuleId root, double dt) {
    if (!g.finalized()) throw MappingError("map_graph: graph must be finalized first");
    if (!(dt > 0.0)) throw DomainError("map_graph: dt must be positive");

    const Analysis a = analyze(g, root);
    if (!a.report.ok())
        throw MappingError("design rule violations:\n" + a.report.to_string());

    FloatSpecification spec;
    spec.dt = dt;
    spec.input_channels =
        static_cast<int>(g.module(a.entry_linear).linear().weights.rows());
    spec.hidden = a.hidden_total;
    spec.outputs = g.module(a.final_lif).lif().neurons;
    spec.synapse_channels = 1;
    for (ModuleId lif : a.lif_order)
        if (lif != a.final_lif)
            spec.synapse_channels = std::max(spec.synapse_channels,
                                             g.module(lif).lif().channels);

    const int C = spec.input_channels;
    const int H = spec.hidden;
    const int O = spec.outputs;
    for (int s = 0; s < 2; ++s) {
        spec.w_in[s] = Eigen::MatrixXd::Zero(C, H);
        spec.w_rec[s] = Eigen::MatrixXd::Zero(H, H);
    }
    spec.w_out = Eigen::MatrixXd::Zero(H, O);
    spec.tau_mem_hid.resize(H);
    spec.tau_syn_hid[0].resize(H);
    spec.tau_syn_hid[1].resize(H);
    spec.threshold_hid.resize(H);
    spec.bias_hid.resize(H);
    spec.aliases.assign(H, -1);

    // Weight placement: entry linear -> w_in, linear into the final layer ->
    // w_out, everything else -> a block of the global hidden matrix.
    for (const auto& route : a.routes) {
        const Eigen::MatrixXd& w = g.module(route.linear).linear().weights;
        if (route.dst_lif == a.final_lif) {
            const int base = a.offset.at(route.src_lif);
            for (Eigen::Index j = 0; j < w.rows(); ++j)
                for (Eigen::Index o = 0; o < w.cols(); ++o)
                    spec.w_out(base + j, o) = w(j, o);
            continue;
        }
        const LifPayload& dst = g.module(route.dst_lif).lif();
        const int dst_base = a.offset.at(route.dst_lif);
        const int n = dst.neurons;
        if (route.src_lif < 0) {
            for (int s = 0; s < dst.channels; ++s)
                for (int c = 0; c < C; ++c)
                    for (int i = 0; i < n; ++i)
                        spec.w_in[s](c, dst_base + i) = w(c, s * n + i);
        } else {
            const int src_base = a.offset.at(route.src_lif);
            const int src_n = g.module(route.src_lif).lif().neurons;
            for (int s = 0; s < dst.channels; ++s)
                for (int j = 0; j < src_n; ++j)
                    for (int i = 0; i < n; ++i)
                        spec.w_rec[s](src_base + j, dst_base + i) = w(j, s * n + i);
        }
    }

    // Per-layer recurrences land on the diagonal blocks.
    for (ModuleId lif : a.lif_order) {
        if (lif == a.final_lif) continue;
        const LifPayload& p = g.module(lif).lif();
        const int base = a.offset.at(lif);
        if (p.params.w_rec) {
            const Eigen::MatrixXd& wr = *p.params.w_rec;
            for (int s = 0; s < p.channels; ++s)
                for (int j = 0; j < p.neurons; ++j)
                    for (int i = 0; i < p.neurons; ++i)
                        spec.w_rec[s](base + j, base + i) = wr(j, s * p.neurons + i);
        }
        for (int i = 0; i < p.neurons; ++i) {
            spec.tau_mem_hid(base + i) = p.params.tau_mem(i);
            spec.tau_syn_hid[0](base + i) = p.params.tau_syn[0](i);
            const Eigen::VectorXd& ts1 =
                (p.channels == 2 && p.params.tau_syn[1].size() == p.neurons)
                    ? p.params.tau_syn[1]
                    : p.params.tau_syn[0];
            spec.tau_syn_hid[1](base + i) = ts1(i);
            spec.threshold_hid(base + i) = p.params.threshold(i);
            spec.bias_hid(base + i) = p.params.bias(i);
        }
    }

    const LifPayload& out = g.module(a.final_lif).lif();
    spec.tau_mem_out = out.params.tau_mem;
    spec.tau_syn_out = out.params.tau_syn[0];
    spec.threshold_out = out.params.threshold;
    spec.bias_out = out.params.bias;

    for (const auto& skip : a.skips)
        spec.aliases[a.offset.at(skip.src_lif) + skip.src_idx] =
            a.offset.at(skip.dst_lif) + skip.dst_idx;

    if (spec.hidden > 1000)
        throw MappingError("Max. hidden LIF neurons: observed " +
                           std::to_string(spec.hidden) + ", allowed 1000");
    return spec;
}

std::string serialize_spec(const FloatSpecification& spec) {
    using jsonu::json;
    json j;
    j["format"] = "xylokit-spec-1";
    j["dt"] = spec.dt;
    j["input_channels"] = spec.input_channels;
    j["hidden_neurons"] = spec.hidden;
    j["output_neurons"] = spec.outputs;
    j["synapse_channels"] = spec.synapse_channels;
    j["w_in"] = jsonu::slices_to_json(spec.w_in);
    j["w_rec"] = jsonu::slices_to_json(spec.w_rec);
    j["w_out"] = jsonu::matrix_to_json(spec.w_out);
    j["tau_mem_hid"] = jsonu::vector_to_json(spec.tau_mem_hid);
    j["tau_syn_hid"] =
        json::array({jsonu::vector_to_json(spec.tau_syn_hid[0]),
                     jsonu::vector_to_json(spec.tau_syn_hid[1])});
    j["threshold_hid"] = jsonu::vector_to_json(spec.threshold_hid);
    j["bias_hid"] = jsonu::vector_to_json(spec.bias_hid);
    j["tau_mem_out"] = jsonu::vector_to_json(spec.tau_mem_out);
    j["tau_syn_out"] = jsonu::vector_to_json(spec.tau_syn_out);
    j["threshold_out"] = jsonu::vector_to_json(spec.threshold_out);
    j["bias_out"] = jsonu::vector_to_json(spec.bias_out);
    j["aliases"] = spec.aliases;
    return j.dump(2) + "\n";
}

FloatSpecification parse_spec(const std::string& text) {
    using jsonu::json;
    const json j = jsonu::parse_text(text);
    jsonu::expect_format(j, "xylokit-spec-1");
    FloatSpecification spec;
    spec.dt = jsonu::get_number<double>(j, "dt");
    if (!(spec.dt > 0.0)) throw ParseError("dt must be positive");
    spec.input_channels = jsonu::get_int(j, "input_channels");
    spec.hidden = jsonu::get_int(j, "hidden_neurons");
    spec.outputs = jsonu::get_int(j, "output_neurons");
    spec.synapse_channels = jsonu::get_int(j, "synapse_channels");
    spec.w_in = jsonu::slices_from_json<double>(jsonu::require(j, "w_in"), "w_in");
    spec.w_rec = jsonu::slices_from_json<double>(jsonu::require(j, "w_rec"), "w_rec");
    spec.w_out = jsonu::matrix_from_json<double>(jsonu::require(j, "w_out"), "w_out");
    spec.tau_mem_hid =
        jsonu::vector_from_json<double>(jsonu::require(j, "tau_mem_hid"), "tau_mem_hid");
    const json& ts = jsonu::require(j, "tau_syn_hid");
    if (!ts.is_array() || ts.size() != 2)
        throw ParseError("tau_syn_hid: expected two channel arrays");
    spec.tau_syn_hid[0] = jsonu::vector_from_json<double>(ts[0], "tau_syn_hid[0]");
    spec.tau_syn_hid[1] = jsonu::vector_from_json<double>(ts[1], "tau_syn_hid[1]");
    spec.threshold_hid =
        jsonu::vector_from_json<double>(jsonu::require(j, "threshold_hid"), "threshold_hid");
    spec.bias_hid = jsonu::vector_from_json<double>(jsonu::require(j, "bias_hid"), "bias_hid");
    spec.tau_mem_out =
        jsonu::vector_from_json<double>(jsonu::require(j, "tau_mem_out"), "tau_mem_out");
    spec.tau_syn_out =
        jsonu::vector_from_json<double>(jsonu::require(j, "tau_syn_out"), "tau_syn_out");
    spec.threshold_out =
        jsonu::vector_from_json<double>(jsonu::require(j, "threshold_out"), "threshold_out");
    spec.bias_out = jsonu::vector_from_json<double>(jsonu::require(j, "bias_out"), "bias_out");
    const json& al = jsonu::require(j, "aliases");
    if (!al.is_array()) throw ParseError("aliases: expected an array");
    spec.aliases.clear();
    for (const auto& v : al) {
        if (!v.is_number_integer()) throw ParseError("aliases: non-integer entry");
        spec.aliases.push_back(v.get<int>());
    }

    const auto expect = [](bool ok, const std::string& what) {
        if (!ok) throw ParseError("inconsistent specification: " + what);
    };
    expect(spec.w_in[0].rows() == spec.input_channels && spec.w_in[0].cols() == spec.hidden,
           "w_in shape");
    expect(spec.w_rec[0].rows() == spec.hidden && spec.w_rec[0].cols() == spec.hidden,
           "w_rec shape");
    expect(spec.w_out.rows() == spec.hidden && spec.w_out.cols() == spec.outputs,
           "w_out shape");
    expect(spec.tau_mem_hid.size() == spec.hidden, "tau_mem_hid length");
    expect(spec.tau_syn_hid[0].size() == spec.hidden, "tau_syn_hid length");
    expect(spec.tau_syn_hid[1].size() == spec.hidden, "tau_syn_hid length");
    expect(spec.threshold_hid.size() == spec.hidden, "threshold_hid length");
    expect(spec.bias_hid.size() == spec.hidden, "bias_hid length");
    expect(spec.tau_mem_out.size() == spec.outputs, "tau_mem_out length");
    expect(spec.tau_syn_out.size() == spec.outputs, "tau_syn_out length");
    expect(spec.threshold_out.size() == spec.outputs, "threshold_out length");
    expect(spec.bias_out.size() == spec.outputs, "bias_out length");
    expect(static_cast<int>(spec.aliases.size()) == spec.hidden, "aliases length");
    return spec;
}

}  // namespace xylokit
