#include "xylokit/netdesc.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"
#include "xylokit/prng.hpp"

namespace xylokit {

namespace {

using nlohmann::json;

Eigen::MatrixXd parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                             const std::string& what) {
    if (j.is_object()) {
        const std::string init = jsonu::require(j, "init").get<std::string>();
        if (init != "uniform")
            throw ParseError(what + ": unknown init '" + init + "'");
        const double low = jsonu::get_number<double>(j, "low");
        const double high = jsonu::get_number<double>(j, "high");
        if (!(high >= low)) throw ParseError(what + ": init range is empty");
        const auto seed = jsonu::get_number<std::uint64_t>(j, "seed");
        SplitMix64 gen(seed);
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = gen.next_range(low, high);
        return m;
    }
    Eigen::MatrixXd m = jsonu::matrix_from_json<double>(j, what);
    if (m.rows() != rows || m.cols() != cols)
        throw ParseError(what + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " matrix, got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
    return m;
}

Eigen::VectorXd parse_param(const json& j, int n, const std::string& what) {
    if (j.is_number()) return Eigen::VectorXd::Constant(n, j.get<double>());
    Eigen::VectorXd v = jsonu::vector_from_json<double>(j, what);
    if (v.size() != n)
        throw ParseError(what + ": expected " + std::to_string(n) + " values, got " +
                         std::to_string(v.size()));
    return v;
}

ModuleId build_layer(Graph& g, const json& layer, int index);

ModuleId build_stack(Graph& g, const json& layers, const std::string& what) {
    if (!layers.is_array() || layers.empty())
        throw ParseError(what + ": expected a non-empty layer array");
    std::vector<ModuleId> stages;
    for (std::size_t i = 0; i < layers.size(); ++i)
        stages.push_back(build_layer(g, layers[i], static_cast<int>(i)));
    return compose_sequential(g, stages);
}

ModuleId build_layer(Graph& g, const json& layer, int index) {
    if (!layer.is_object())
        throw ParseError("layer " + std::to_string(index) + ": expected an object");
    const std::string type = jsonu::require(layer, "type").get<std::string>();
    const std::string label = "layer " + std::to_string(index) + " (" + type + ")";

    if (type == "linear") {
        const int rows = jsonu::get_int(layer, "rows");
        const int cols = jsonu::get_int(layer, "cols");
        if (rows <= 0 || cols <= 0) throw ParseError(label + ": rows/cols must be positive");
        return make_linear(g, parse_matrix(jsonu::require(layer, "weights"), rows, cols,
                                           label + " weights"));
    }
    if (type == "lif") {
        const int n = jsonu::get_int(layer, "n");
        if (n <= 0) throw ParseError(label + ": n must be positive");
        const int channels = layer.contains("channels") ? jsonu::get_int(layer, "channels") : 1;
        LifParams p;
        p.tau_mem = parse_param(jsonu::require(layer, "tau_mem"), n, label + " tau_mem");
        const json& ts = jsonu::require(layer, "tau_syn");
        if (ts.is_array() && !ts.empty() && ts[0].is_array()) {
            if (static_cast<int>(ts.size()) > channels)
                throw ParseError(label + ": more tau_syn arrays than channels");
            p.tau_syn[0] = parse_param(ts[0], n, label + " tau_syn[0]");
            if (ts.size() == 2) p.tau_syn[1] = parse_param(ts[1], n, label + " tau_syn[1]");
        } else {
            p.tau_syn[0] = parse_param(ts, n, label + " tau_syn");
        }
        p.threshold = parse_param(jsonu::require(layer, "threshold"), n, label + " threshold");
        p.bias = layer.contains("bias") ? parse_param(layer["bias"], n, label + " bias")
                                        : Eigen::VectorXd::Zero(n);
        if (layer.contains("w_rec"))
            p.w_rec = parse_matrix(layer["w_rec"], n, Eigen::Index(n) * channels,
                                   label + " w_rec");
        return make_lif(g, p, n, channels);
    }
    if (type == "residual") {
        ModuleId body = build_stack(g, jsonu::require(layer, "body"), label + " body");
        return compose_residual(g, body);
    }
    throw ParseError(label + ": unknown layer type");
}

}  // namespace

NetworkGraph parse_network(const json& doc) {
    const json* layers = nullptr;
    if (doc.is_array())
        layers = &doc;
    else if (doc.is_object() && doc.contains("layers"))
        layers = &doc.at("layers");
    else
        throw ParseError("network description: expected a layer array or a 'layers' field");

    NetworkGraph net;
    net.graph = std::make_unique<Graph>();
    net.root = build_stack(*net.graph, *layers, "network");
    net.graph->finalize();
    net.graph->audit();
    return net;
}

NetworkGraph load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_network(jsonu::parse_text(buf.str()));
}

}  // namespace xylokit
