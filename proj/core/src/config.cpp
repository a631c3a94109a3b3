#include "lidarseg/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "lidarseg/errors.hpp"

namespace lidarseg {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    }
}

template <typename Int>
Int to_int(const std::string& key, const std::string& v) {
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
}

std::string num(double d) {
    std::ostringstream os;
    os.precision(9);
    os << d;
    return os.str();
}

}  // namespace

void PipelineConfig::validate() const {
    refine.validate();
    sampling.validate();
    graph.validate();
    if (!(loss_eps > 0.0 && loss_eps < 0.5)) throw ConfigError("loss.eps must lie in (0, 0.5)");
}

std::map<std::string, std::string> PipelineConfig::to_map() const {
    return {
        {"graph.build", build_graph ? "true" : "false"},
        {"graph.m", num(graph.m)},
        {"graph.max_nodes", std::to_string(graph.max_nodes)},
        {"graph.tau", num(graph.tau)},
        {"graph.w1", num(graph.w1)},
        {"graph.w2", num(graph.w2)},
        {"loss.eps", num(loss_eps)},
        {"loss.graph_weight", num(loss_weights.graph)},
        {"loss.point_weight", num(loss_weights.point)},
        {"refine.stride", std::to_string(refine.stride)},
        {"refine.tau_depth", num(refine.tau_depth)},
        {"refine.window_size", std::to_string(refine.window_size)},
        {"sampling.kernel", std::string(to_string(sampling.kernel))},
        {"sampling.neighbor_radius", std::to_string(sampling.neighbor_radius)},
        {"sampling.pad_sigma", num(sampling.pad_sigma)},
        {"sampling.pos_ratio", num(sampling.pos_ratio)},
        {"sampling.propagate", propagate ? "true" : "false"},
        {"sampling.s", std::to_string(sampling.s)},
        {"sampling.tau_d", num(sampling.tau_d)},
        {"seed", std::to_string(seed)},
    };
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "refine.window_size") refine.window_size = to_int<int>(key, value);
    else if (key == "refine.stride") refine.stride = to_int<int>(key, value);
    else if (key == "refine.tau_depth") refine.tau_depth = to_double(key, value);
    else if (key == "sampling.s") sampling.s = to_int<int>(key, value);
    else if (key == "sampling.pos_ratio") sampling.pos_ratio = to_double(key, value);
    else if (key == "sampling.pad_sigma") sampling.pad_sigma = to_double(key, value);
    else if (key == "sampling.tau_d") sampling.tau_d = to_double(key, value);
    else if (key == "sampling.neighbor_radius") sampling.neighbor_radius = to_int<int>(key, value);
    else if (key == "sampling.kernel") sampling.kernel = kernel_from_string(value);
    else if (key == "sampling.propagate") propagate = to_bool(key, value);
    else if (key == "graph.w1") graph.w1 = to_double(key, value);
    else if (key == "graph.w2") graph.w2 = to_double(key, value);
    else if (key == "graph.m") graph.m = to_double(key, value);
    else if (key == "graph.tau") graph.tau = to_double(key, value);
    else if (key == "graph.max_nodes") graph.max_nodes = to_int<std::size_t>(key, value);
    else if (key == "graph.build") build_graph = to_bool(key, value);
    else if (key == "loss.eps") loss_eps = to_double(key, value);
    else if (key == "loss.point_weight") loss_weights.point = to_double(key, value);
    else if (key == "loss.graph_weight") loss_weights.graph = to_double(key, value);
    else if (key == "seed") seed = to_int<std::uint64_t>(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

PipelineConfig parse_config(const std::string& text) {
    PipelineConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        cfg.set(key, value);
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace lidarseg
