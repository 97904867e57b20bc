#include "fingait/weights_io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <vector>

using nlohmann::json;

namespace fingait {

namespace {

void fail(const std::string& msg) { throw std::runtime_error("weights file: " + msg); }

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) fail(where + " must be a JSON object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) fail("unknown field '" + it.key() + "' in " + where);
    }
    for (const auto& key : allowed) {
        if (!obj.contains(key)) fail("missing field '" + key + "' in " + where);
    }
}

std::vector<double> read_array(const json& arrays, const std::string& name,
                               const std::vector<std::size_t>& shape) {
    if (!arrays.contains(name)) fail("missing weight array '" + name + "'");
    const json& entry = arrays.at(name);
    require_keys(entry, {"shape", "data"}, "weight array '" + name + "'");

    std::vector<std::size_t> file_shape;
    for (const auto& d : entry.at("shape")) file_shape.push_back(d.get<std::size_t>());
    if (file_shape != shape) fail("shape mismatch for '" + name + "'");

    std::size_t count = 1;
    for (std::size_t d : shape) count *= d;
    std::vector<double> data = entry.at("data").get<std::vector<double>>();
    if (data.size() != count) fail("data length does not match shape for '" + name + "'");
    return data;
}

json write_array(const std::vector<double>& data, const std::vector<std::size_t>& shape) {
    return json{{"shape", shape}, {"data", data}};
}

void read_normalization(const json& root, std::size_t dim, std::vector<double>& mean,
                        std::vector<double>& stdev) {
    const json& norm = root.at("normalization");
    require_keys(norm, {"mean", "std"}, "normalization");
    mean = norm.at("mean").get<std::vector<double>>();
    stdev = norm.at("std").get<std::vector<double>>();
    if (mean.size() != dim || stdev.size() != dim) fail("normalization length mismatch");
}

const char* kGateNames[4] = {"input_gate", "forget_gate", "cell_gate", "output_gate"};

LstmWeights load_lstm(const json& root) {
    require_keys(root, {"format_version", "kind", "input_dim", "hidden_dim", "normalization",
                        "weights"},
                 "lstm weights file");
    LstmWeights w;
    w.input_dim = root.at("input_dim").get<std::size_t>();
    w.hidden_dim = root.at("hidden_dim").get<std::size_t>();
    if (w.input_dim != kLstmInputDim) fail("lstm input_dim must be 6");
    if (w.hidden_dim == 0) fail("lstm hidden_dim must be positive");
    read_normalization(root, w.input_dim, w.feature_mean, w.feature_std);

    const json& arrays = root.at("weights");
    std::set<std::string> expected{"projection_kernel", "projection_bias"};
    for (const char* gate : kGateNames) {
        expected.insert(std::string(gate) + "_kernel");
        expected.insert(std::string(gate) + "_recurrent");
        expected.insert(std::string(gate) + "_bias");
    }
    require_keys(arrays, expected, "weights");

    const std::size_t in = w.input_dim, H = w.hidden_dim, row = in + H;
    for (int g = 0; g < 4; ++g) {
        const std::string base = kGateNames[g];
        const auto kernel = read_array(arrays, base + "_kernel", {H, in});
        const auto recurrent = read_array(arrays, base + "_recurrent", {H, H});
        w.gate_bias[g] = read_array(arrays, base + "_bias", {H});
        // Interleave into the fused [kernel | recurrent] row layout.
        w.gate_weights[g].resize(H * row);
        for (std::size_t r = 0; r < H; ++r) {
            for (std::size_t c = 0; c < in; ++c)
                w.gate_weights[g][r * row + c] = kernel[r * in + c];
            for (std::size_t c = 0; c < H; ++c)
                w.gate_weights[g][r * row + in + c] = recurrent[r * H + c];
        }
    }
    w.projection = read_array(arrays, "projection_kernel", {1, H});
    w.projection_bias = read_array(arrays, "projection_bias", {1})[0];
    w.validate();
    return w;
}

DnnWeights load_dnn(const json& root) {
    require_keys(root, {"format_version", "kind", "input_dim", "layers", "normalization",
                        "weights"},
                 "dnn weights file");
    DnnWeights w;
    w.input_dim = root.at("input_dim").get<std::size_t>();
    if (w.input_dim != 4) fail("dnn input_dim must be 4");
    w.hidden_dims = root.at("layers").get<std::vector<std::size_t>>();
    if (w.hidden_dims.empty()) fail("dnn needs at least one hidden layer");
    read_normalization(root, w.input_dim, w.feature_mean, w.feature_std);

    const json& arrays = root.at("weights");
    std::set<std::string> expected{"projection_kernel", "projection_bias"};
    for (std::size_t l = 0; l < w.hidden_dims.size(); ++l) {
        expected.insert("hidden" + std::to_string(l) + "_kernel");
        expected.insert("hidden" + std::to_string(l) + "_bias");
    }
    require_keys(arrays, expected, "weights");

    std::size_t prev = w.input_dim;
    for (std::size_t l = 0; l < w.hidden_dims.size(); ++l) {
        const std::string base = "hidden" + std::to_string(l);
        w.kernels.push_back(read_array(arrays, base + "_kernel", {w.hidden_dims[l], prev}));
        w.biases.push_back(read_array(arrays, base + "_bias", {w.hidden_dims[l]}));
        prev = w.hidden_dims[l];
    }
    w.projection = read_array(arrays, "projection_kernel", {1, prev});
    w.projection_bias = read_array(arrays, "projection_bias", {1})[0];
    w.validate();
    return w;
}

json load_root(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        fail("parse error in '" + path + "': " + e.what());
    }
    if (!root.is_object()) fail("top level must be a JSON object");
    if (!root.contains("format_version") || root.at("format_version").get<int>() != kWeightsFormatVersion)
        fail("unsupported format_version");
    return root;
}

void write_root(const json& root, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail("cannot write '" + path + "'");
    out << root.dump(2) << '\n';
}

} // namespace

std::variant<LstmWeights, DnnWeights> load_weights(const std::string& path) {
    const json root = load_root(path);
    if (!root.contains("kind")) fail("missing field 'kind'");
    const std::string kind = root.at("kind").get<std::string>();
    if (kind == "lstm") return load_lstm(root);
    if (kind == "dnn") return load_dnn(root);
    fail("unknown kind '" + kind + "'");
    return {}; // unreachable
}

void save_weights(const LstmWeights& w, const std::string& path) {
    w.validate();
    const std::size_t in = w.input_dim, H = w.hidden_dim, row = in + H;
    json arrays;
    for (int g = 0; g < 4; ++g) {
        std::vector<double> kernel(H * in), recurrent(H * H);
        for (std::size_t r = 0; r < H; ++r) {
            for (std::size_t c = 0; c < in; ++c)
                kernel[r * in + c] = w.gate_weights[g][r * row + c];
            for (std::size_t c = 0; c < H; ++c)
                recurrent[r * H + c] = w.gate_weights[g][r * row + in + c];
        }
        const std::string base = kGateNames[g];
        arrays[base + "_kernel"] = write_array(kernel, {H, in});
        arrays[base + "_recurrent"] = write_array(recurrent, {H, H});
        arrays[base + "_bias"] = write_array(w.gate_bias[g], {H});
    }
    arrays["projection_kernel"] = write_array(w.projection, {1, H});
    arrays["projection_bias"] = write_array({w.projection_bias}, {1});

    json root{{"format_version", kWeightsFormatVersion},
              {"kind", "lstm"},
              {"input_dim", w.input_dim},
              {"hidden_dim", w.hidden_dim},
              {"normalization", {{"mean", w.feature_mean}, {"std", w.feature_std}}},
              {"weights", arrays}};
    write_root(root, path);
}

void save_weights(const DnnWeights& w, const std::string& path) {
    w.validate();
    json arrays;
    for (std::size_t l = 0; l < w.hidden_dims.size(); ++l) {
        const std::string base = "hidden" + std::to_string(l);
        const std::size_t prev = l == 0 ? w.input_dim : w.hidden_dims[l - 1];
        arrays[base + "_kernel"] = write_array(w.kernels[l], {w.hidden_dims[l], prev});
        arrays[base + "_bias"] = write_array(w.biases[l], {w.hidden_dims[l]});
    }
    arrays["projection_kernel"] = write_array(w.projection, {1, w.hidden_dims.back()});
    arrays["projection_bias"] = write_array({w.projection_bias}, {1});

    json root{{"format_version", kWeightsFormatVersion},
              {"kind", "dnn"},
              {"input_dim", w.input_dim},
              {"layers", w.hidden_dims},
              {"normalization", {{"mean", w.feature_mean}, {"std", w.feature_std}}},
              {"weights", arrays}};
    write_root(root, path);
}

} // namespace fingait
