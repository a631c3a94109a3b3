#include "lidarseg/io_formats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "lidarseg/errors.hpp"

namespace lidarseg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------- binary helpers

void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(const std::string& buf, std::size_t off) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[off + k])) << (8 * k);
    return v;
}

float get_f32(const std::string& buf, std::size_t off) { return std::bit_cast<float>(get_u32(buf, off)); }

std::string read_binary(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_binary(const std::string& bytes, const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing " + path.string());
}

[[noreturn]] void bad(const fs::path& path, const std::string& what) {
    throw DataError(path.string() + ": " + what);
}

// ---------------------------------------------------------------- json helpers

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(what + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

std::string dump(const json& j) { return j.dump() + "\n"; }

json num(double v) { return round_sig9(v); }

template <typename T>
T get(const json& j, const char* key, const std::string& ctx) {
    if (!j.is_object() || !j.contains(key)) throw DataError(ctx + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw DataError(ctx + ": key '" + key + "' has the wrong type (" + e.what() + ")");
    }
}

double finite_number(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw DataError(ctx + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw DataError(ctx + ": non-finite number");
    return v;
}

std::vector<double> number_array(const json& j, const char* key, std::size_t n, const std::string& ctx) {
    if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != n) {
        throw DataError(ctx + ": '" + key + "' must be an array of " + std::to_string(n) + " numbers");
    }
    std::vector<double> out;
    for (const auto& v : j.at(key)) out.push_back(finite_number(v, ctx + "." + key));
    return out;
}

Vec3 vec3(const json& j, const char* key, const std::string& ctx) {
    const auto a = number_array(j, key, 3, ctx);
    return {a[0], a[1], a[2]};
}

json to_json(const Vec3& v) { return json::array({num(v.x()), num(v.y()), num(v.z())}); }

// Calibration and boxes keep full precision (shortest round-trip form).
json exact_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json camera_to_json(const CalibratedCamera& cam) {
    json ext = json::array();
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) ext.push_back(cam.extrinsic(r, c));
    json m = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) m.push_back(cam.camera_matrix(r, c));
    return {{"extrinsic", ext},
            {"camera_matrix", m},
            {"image_size", json::array({cam.image_size.height, cam.image_size.width})}};
}

ImageSize image_size_from_json(const json& j, const std::string& ctx) {
    if (!j.contains("image_size") || !j.at("image_size").is_array() || j.at("image_size").size() != 2 ||
        !j.at("image_size")[0].is_number_integer() || !j.at("image_size")[1].is_number_integer()) {
        throw DataError(ctx + ": 'image_size' must be [height, width]");
    }
    return {j.at("image_size")[0].get<int>(), j.at("image_size")[1].get<int>()};
}

CalibratedCamera camera_from_json(const json& j, const std::string& ctx) {
    CalibratedCamera cam;
    const auto ext = number_array(j, "extrinsic", 16, ctx);
    const auto m = number_array(j, "camera_matrix", 12, ctx);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) cam.extrinsic(r, c) = ext[static_cast<std::size_t>(r * 4 + c)];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 4; ++c) cam.camera_matrix(r, c) = m[static_cast<std::size_t>(r * 4 + c)];
    cam.image_size = image_size_from_json(j, ctx);
    try {
        cam.validate();
    } catch (const DataError& e) {
        throw DataError(ctx + ": " + e.what());
    }
    return cam;
}

json box_to_json(const Box3D& b) {
    return {{"center", exact_json(b.center)},
            {"size", exact_json(b.size)},
            {"yaw", b.yaw},
            {"class_id", b.class_id},
            {"instance_id", b.instance_id}};
}

Box3D box_from_json(const json& j, const std::string& ctx) {
    Box3D b;
    b.center = vec3(j, "center", ctx);
    b.size = vec3(j, "size", ctx);
    if (!j.contains("yaw")) throw DataError(ctx + ": missing key 'yaw'");
    b.yaw = finite_number(j.at("yaw"), ctx + ".yaw");
    b.class_id = get<std::int32_t>(j, "class_id", ctx);
    b.instance_id = get<std::int64_t>(j, "instance_id", ctx);
    try {
        b.validate();
    } catch (const DataError& e) {
        throw DataError(ctx + ": " + e.what());
    }
    return b;
}

std::string optional_file(const json& j, const char* key, const std::string& ctx) {
    if (!j.contains(key) || j.at(key).is_null()) return {};
    if (!j.at(key).is_string()) throw DataError(ctx + ": '" + key + "' must be a file name");
    return j.at(key).get<std::string>();
}

}  // namespace

double round_sig9(double value) {
    if (!std::isfinite(value) || value == 0.0) return value == 0.0 ? 0.0 : value;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------- point / tensor files

PointCloud read_point_file(const fs::path& path, std::size_t expected_count) {
    const std::string buf = read_binary(path);
    const std::size_t expected = expected_count * 16;
    if (buf.size() != expected) {
        bad(path, "expected " + std::to_string(expected) + " bytes for " + std::to_string(expected_count) +
                      " points (N x 4 float32), got " + std::to_string(buf.size()));
    }
    PointCloud cloud;
    cloud.points.reserve(expected_count);
    cloud.intensity.reserve(expected_count);
    for (std::size_t i = 0; i < expected_count; ++i) {
        const std::size_t off = i * 16;
        const float x = get_f32(buf, off), y = get_f32(buf, off + 4), z = get_f32(buf, off + 8),
                    it = get_f32(buf, off + 12);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(it)) {
            bad(path, "non-finite value in point " + std::to_string(i) + " at byte offset " + std::to_string(off));
        }
        cloud.points.emplace_back(x, y, z);
        cloud.intensity.push_back(it);
    }
    return cloud;
}

void write_point_file(const PointCloud& cloud, const fs::path& path) {
    cloud.validate();
    std::string out;
    out.reserve(cloud.size() * 16);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Vec3& p = cloud.points[i];
        put_f32(out, static_cast<float>(p.x()));
        put_f32(out, static_cast<float>(p.y()));
        put_f32(out, static_cast<float>(p.z()));
        put_f32(out, cloud.intensity.empty() ? 0.0f : cloud.intensity[i]);
    }
    write_binary(out, path);
}

FeatureMap read_tensor_file(const fs::path& path) {
    const std::string buf = read_binary(path);
    if (buf.size() < kTensorHeaderBytes) {
        bad(path, "file has " + std::to_string(buf.size()) + " bytes, shorter than the 16-byte header");
    }
    if (std::memcmp(buf.data(), kTensorMagic, 4) != 0) bad(path, "wrong magic at byte offset 0, expected 'LWFM'");
    const std::uint32_t h = get_u32(buf, 4);
    const std::uint32_t w = get_u32(buf, 8);
    const std::uint32_t c = get_u32(buf, 12);
    if (h == 0 || w == 0 || c == 0) bad(path, "zero dimension in header (byte offsets 4..15)");
    const std::size_t count = static_cast<std::size_t>(h) * w * c;
    const std::size_t expected = kTensorHeaderBytes + count * 4;
    if (buf.size() != expected) {
        bad(path, "header declares " + std::to_string(h) + "x" + std::to_string(w) + "x" + std::to_string(c) +
                      " values (" + std::to_string(expected) + " bytes), file has " + std::to_string(buf.size()));
    }
    std::vector<float> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t off = kTensorHeaderBytes + i * 4;
        values[i] = get_f32(buf, off);
        if (!std::isfinite(values[i])) bad(path, "non-finite value at byte offset " + std::to_string(off));
    }
    return FeatureMap(static_cast<int>(h), static_cast<int>(w), static_cast<int>(c), std::move(values));
}

void write_tensor_file(const FeatureMap& tensor, const fs::path& path) {
    tensor.validate();
    std::string out(kTensorMagic, 4);
    put_u32(out, static_cast<std::uint32_t>(tensor.height()));
    put_u32(out, static_cast<std::uint32_t>(tensor.width()));
    put_u32(out, static_cast<std::uint32_t>(tensor.channels()));
    out.reserve(kTensorHeaderBytes + tensor.values().size() * 4);
    for (float f : tensor.values()) put_f32(out, f);
    write_binary(out, path);
}

std::vector<PredictionMap> read_prediction_file(const fs::path& path) {
    const FeatureMap t = read_tensor_file(path);
    std::vector<PredictionMap> maps;
    for (int k = 0; k < t.channels(); ++k) {
        PredictionMap m(t.height(), t.width());
        for (int y = 0; y < t.height(); ++y)
            for (int x = 0; x < t.width(); ++x) m.at(x, y) = t.at(x, y)[static_cast<std::size_t>(k)];
        try {
            m.validate();
        } catch (const DataError& e) {
            bad(path, "prediction channel " + std::to_string(k) + ": " + e.what());
        }
        maps.push_back(std::move(m));
    }
    return maps;
}

void write_prediction_file(const std::vector<PredictionMap>& maps, const fs::path& path) {
    if (maps.empty()) throw StructuralError("no prediction maps to write");
    const int h = maps.front().height;
    const int w = maps.front().width;
    FeatureMap t(h, w, static_cast<int>(maps.size()));
    for (std::size_t k = 0; k < maps.size(); ++k) {
        if (maps[k].height != h || maps[k].width != w) throw StructuralError("prediction maps differ in size");
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) t.at(x, y)[k] = static_cast<float>(maps[k].at(x, y));
    }
    write_tensor_file(t, path);
}

// ---------------------------------------------------------------- frames

void FrameBundle::assign_default_file_names() {
    if (points_file.empty()) points_file = frame_id + ".points.bin";
    if (features && features_file.empty()) features_file = frame_id + ".features.lwfm";
    if (predictions && predictions_file.empty()) predictions_file = frame_id + ".pred.lwfm";
    if (image && image_file.empty()) image_file = frame_id + ".ppm";
}

static FrameBundle read_frame_impl(const fs::path& descriptor) {
    const std::string ctx = descriptor.string();
    const json j = parse_json(read_text_file(descriptor), ctx);
    if (!j.is_object()) throw DataError(ctx + ": frame descriptor must be a JSON object");
    const int version = get<int>(j, "format_version", ctx);
    if (version != kFormatVersion) throw DataError(ctx + ": unsupported format_version " + std::to_string(version));

    const fs::path dir = descriptor.parent_path();
    FrameBundle f;
    f.frame_id = get<std::string>(j, "frame_id", ctx);
    if (f.frame_id.empty()) throw DataError(ctx + ": empty frame_id");

    if (!j.contains("points") || !j.at("points").is_object()) throw DataError(ctx + ": missing 'points' object");
    const json& pts = j.at("points");
    f.points_file = get<std::string>(pts, "file", ctx + ".points");
    const auto count = get<std::size_t>(pts, "count", ctx + ".points");
    f.cloud = read_point_file(dir / f.points_file, count);

    if (!j.contains("camera")) throw DataError(ctx + ": missing key 'camera'");
    f.camera = camera_from_json(j.at("camera"), ctx + ".camera");

    if (!j.contains("boxes") || !j.at("boxes").is_array()) throw DataError(ctx + ": 'boxes' must be an array");
    for (std::size_t k = 0; k < j.at("boxes").size(); ++k) {
        f.boxes.push_back(box_from_json(j.at("boxes")[k], ctx + ".boxes[" + std::to_string(k) + "]"));
    }
    for (std::size_t a = 0; a < f.boxes.size(); ++a)
        for (std::size_t b = a + 1; b < f.boxes.size(); ++b)
            if (f.boxes[a].instance_id == f.boxes[b].instance_id) {
                throw DataError(ctx + ": duplicate instance_id " + std::to_string(f.boxes[a].instance_id));
            }

    f.features_file = optional_file(j, "features", ctx);
    if (!f.features_file.empty()) f.features = read_tensor_file(dir / f.features_file);

    f.predictions_file = optional_file(j, "predictions", ctx);
    if (!f.predictions_file.empty()) {
        f.predictions = read_prediction_file(dir / f.predictions_file);
        if (f.predictions->size() != f.boxes.size()) {
            throw DataError(ctx + ": prediction file has " + std::to_string(f.predictions->size()) +
                            " channels for " + std::to_string(f.boxes.size()) + " boxes");
        }
    }

    f.image_file = optional_file(j, "image", ctx);
    if (!f.image_file.empty()) {
        f.image = read_ppm(dir / f.image_file);
        if (f.image->height != f.camera.image_size.height || f.image->width != f.camera.image_size.width) {
            throw DataError(ctx + ": image size does not match camera image_size");
        }
    }
    return f;
}

FrameBundle read_frame(const fs::path& descriptor) {
    try {
        return read_frame_impl(descriptor);
    } catch (const json::exception& e) {
        throw DataError(descriptor.string() + ": " + e.what());
    }
}

fs::path write_frame(const FrameBundle& frame_in, const fs::path& dir) {
    FrameBundle frame = frame_in;
    frame.assign_default_file_names();
    frame.camera.validate();
    fs::create_directories(dir);

    json j;
    j["format_version"] = kFormatVersion;
    j["frame_id"] = frame.frame_id;
    j["points"] = {{"file", frame.points_file}, {"count", frame.cloud.size()}};
    j["camera"] = camera_to_json(frame.camera);
    j["boxes"] = json::array();
    for (const auto& b : frame.boxes) j["boxes"].push_back(box_to_json(b));

    write_point_file(frame.cloud, dir / frame.points_file);
    if (frame.features) {
        j["features"] = frame.features_file;
        write_tensor_file(*frame.features, dir / frame.features_file);
    }
    if (frame.predictions) {
        j["predictions"] = frame.predictions_file;
        write_prediction_file(*frame.predictions, dir / frame.predictions_file);
    }
    if (frame.image) {
        j["image"] = frame.image_file;
        write_ppm(*frame.image, dir / frame.image_file);
    }
    const fs::path descriptor = dir / (frame.frame_id + ".json");
    write_text_file(dump(j), descriptor);
    return descriptor;
}

std::vector<fs::path> list_frames(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".json") continue;
        const std::string name = e.path().filename().string();
        if (name.ends_with(".groundtruth.json")) continue;
        out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------- labels

namespace {

json record_to_json(const PseudoLabelRecord& r) {
    json samples = json::array();
    for (const auto& s : r.samples) {
        samples.push_back({{"u", num(s.u)},
                           {"v", num(s.v)},
                           {"label", s.label},
                           {"origin", std::string(to_string(s.origin))},
                           {"source_index", s.source_index}});
    }
    json config = json::object();
    for (const auto& [k, v] : r.config) config[k] = v;
    return {{"frame_id", r.frame_id},
            {"instance_id", r.instance_id},
            {"class_id", r.class_id},
            {"rect", json::array({num(r.rect.x_min), num(r.rect.y_min), num(r.rect.x_max), num(r.rect.y_max)})},
            {"samples", samples},
            {"graph", r.graph_ref.empty() ? json(nullptr) : json(r.graph_ref)},
            {"config", config}};
}

PseudoLabelRecord record_from_json(const json& j, const std::string& ctx) {
    PseudoLabelRecord r;
    r.frame_id = get<std::string>(j, "frame_id", ctx);
    r.instance_id = get<std::int64_t>(j, "instance_id", ctx);
    r.class_id = get<std::int32_t>(j, "class_id", ctx);
    const auto rect = number_array(j, "rect", 4, ctx);
    r.rect = {rect[0], rect[1], rect[2], rect[3]};
    if (r.rect.x_min > r.rect.x_max || r.rect.y_min > r.rect.y_max) throw DataError(ctx + ": inverted rect");
    if (!j.contains("samples") || !j.at("samples").is_array()) throw DataError(ctx + ": 'samples' must be an array");
    for (std::size_t k = 0; k < j.at("samples").size(); ++k) {
        const json& s = j.at("samples")[k];
        const std::string sctx = ctx + ".samples[" + std::to_string(k) + "]";
        PseudoLabelSample out;
        out.u = finite_number(s.at("u"), sctx + ".u");
        out.v = finite_number(s.at("v"), sctx + ".v");
        out.label = get<int>(s, "label", sctx);
        if (out.label < -1 || out.label > 1) throw DataError(sctx + ": label must be -1, 0 or 1");
        out.origin = origin_from_string(get<std::string>(s, "origin", sctx));
        out.source_index = get<std::int64_t>(s, "source_index", sctx);
        r.samples.push_back(out);
    }
    if (!j.contains("graph")) throw DataError(ctx + ": missing key 'graph'");
    if (!j.at("graph").is_null()) r.graph_ref = get<std::string>(j, "graph", ctx);
    if (!j.contains("config") || !j.at("config").is_object()) throw DataError(ctx + ": 'config' must be an object");
    for (const auto& [k, v] : j.at("config").items()) {
        if (!v.is_string()) throw DataError(ctx + ".config." + k + ": values are strings");
        r.config[k] = v.get<std::string>();
    }
    return r;
}

}  // namespace

std::string labels_to_json(const std::vector<PseudoLabelRecord>& records) {
    json j;
    j["format_version"] = kFormatVersion;
    j["generator"] = "lidarseg";
    j["record_count"] = records.size();
    j["records"] = json::array();
    for (const auto& r : records) j["records"].push_back(record_to_json(r));
    return dump(j);
}

static std::vector<PseudoLabelRecord> labels_impl(const std::string& text) {
    const json j = parse_json(text, "labels");
    if (get<int>(j, "format_version", "labels") != kFormatVersion) throw DataError("labels: unsupported format_version");
    if (!j.contains("records") || !j.at("records").is_array()) throw DataError("labels: 'records' must be an array");
    std::vector<PseudoLabelRecord> out;
    for (std::size_t k = 0; k < j.at("records").size(); ++k) {
        out.push_back(record_from_json(j.at("records")[k], "labels.records[" + std::to_string(k) + "]"));
    }
    if (get<std::size_t>(j, "record_count", "labels") != out.size()) throw DataError("labels: record_count mismatch");
    return out;
}

std::vector<PseudoLabelRecord> labels_from_json(const std::string& text) {
    try {
        return labels_impl(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("labels: ") + e.what());
    }
}

void write_labels(const std::vector<PseudoLabelRecord>& records, const fs::path& path) {
    write_text_file(labels_to_json(records), path);
}

std::vector<PseudoLabelRecord> read_labels(const fs::path& path) { return labels_from_json(read_text_file(path)); }

// ---------------------------------------------------------------- graphs

std::string graphs_to_json(const std::vector<GraphRecord>& graphs) {
    json arr = json::array();
    for (const auto& g : graphs) {
        json nodes = json::array();
        for (const auto& n : g.graph.nodes()) {
            nodes.push_back({{"point_index", n.point_index},
                             {"u", num(n.u)},
                             {"v", num(n.v)},
                             {"position", to_json(n.position)}});
        }
        json edges = json::array();
        for (const auto& e : g.graph.edges()) edges.push_back(json::array({e.i, e.j, num(e.weight)}));
        const GraphConfig& p = g.graph.params();
        arr.push_back({{"frame_id", g.frame_id},
                       {"instance_id", g.instance_id},
                       {"params", {{"w1", num(p.w1)}, {"w2", num(p.w2)}, {"m", num(p.m)}, {"tau", num(p.tau)},
                                   {"max_nodes", p.max_nodes}}},
                       {"nodes", nodes},
                       {"edges", edges}});
    }
    json j;
    j["format_version"] = kFormatVersion;
    j["graphs"] = arr;
    return dump(j);
}

static std::vector<GraphRecord> graphs_impl(const std::string& text) {
    const json j = parse_json(text, "graphs");
    if (get<int>(j, "format_version", "graphs") != kFormatVersion) throw DataError("graphs: unsupported format_version");
    if (!j.contains("graphs") || !j.at("graphs").is_array()) throw DataError("graphs: 'graphs' must be an array");
    std::vector<GraphRecord> out;
    for (std::size_t k = 0; k < j.at("graphs").size(); ++k) {
        const json& g = j.at("graphs")[k];
        const std::string ctx = "graphs[" + std::to_string(k) + "]";
        GraphRecord rec;
        rec.frame_id = get<std::string>(g, "frame_id", ctx);
        rec.instance_id = get<std::int64_t>(g, "instance_id", ctx);
        const json& p = g.at("params");
        GraphConfig params;
        params.w1 = get<double>(p, "w1", ctx);
        params.w2 = get<double>(p, "w2", ctx);
        params.m = get<double>(p, "m", ctx);
        params.tau = get<double>(p, "tau", ctx);
        params.max_nodes = get<std::size_t>(p, "max_nodes", ctx);
        std::vector<GraphNode> nodes;
        for (const auto& n : g.at("nodes")) {
            nodes.push_back({get<std::size_t>(n, "point_index", ctx), finite_number(n.at("u"), ctx),
                             finite_number(n.at("v"), ctx), vec3(n, "position", ctx)});
        }
        std::vector<GraphEdge> edges;
        for (const auto& e : g.at("edges")) {
            if (!e.is_array() || e.size() != 3) throw DataError(ctx + ": edges are [i, j, weight]");
            edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), finite_number(e[2], ctx)});
        }
        rec.graph = SimilarityGraph::from_edges(std::move(nodes), params, std::move(edges));
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<GraphRecord> graphs_from_json(const std::string& text) {
    try {
        return graphs_impl(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("graphs: ") + e.what());
    }
}

void write_graphs(const std::vector<GraphRecord>& graphs, const fs::path& path) {
    write_text_file(graphs_to_json(graphs), path);
}

std::vector<GraphRecord> read_graphs(const fs::path& path) { return graphs_from_json(read_text_file(path)); }

// ---------------------------------------------------------------- scenes

namespace {

SceneSpec parse_scene(const std::string& text) {
    const std::string ctx = "scene";
    const json j = parse_json(text, ctx);
    const double deg = std::numbers::pi / 180.0;

    if (j.contains("random_seed")) {
        RandomSceneOptions opt;
        SceneSpec spec = random_parallax_scene(get<std::uint64_t>(j, "random_seed", ctx), opt);
        if (j.contains("frame_id")) spec.frame_id = get<std::string>(j, "frame_id", ctx);
        return spec;
    }

    SceneSpec spec;
    if (j.contains("frame_id")) spec.frame_id = get<std::string>(j, "frame_id", ctx);
    if (j.contains("seed")) spec.seed = get<std::uint64_t>(j, "seed", ctx);
    if (j.contains("ground_z")) spec.ground_z = get<double>(j, "ground_z", ctx);
    if (j.contains("lidar_origin")) spec.lidar_origin = vec3(j, "lidar_origin", ctx);
    if (j.contains("glass_pass_probability")) spec.glass_pass_probability = get<double>(j, "glass_pass_probability", ctx);

    const json& scan = j.at("scan");
    spec.scan.azimuth_min = get<double>(scan, "azimuth_min_deg", ctx + ".scan") * deg;
    spec.scan.azimuth_max = get<double>(scan, "azimuth_max_deg", ctx + ".scan") * deg;
    spec.scan.azimuth_step = get<double>(scan, "azimuth_step_deg", ctx + ".scan") * deg;
    if (scan.contains("max_range")) spec.scan.max_range = get<double>(scan, "max_range", ctx + ".scan");
    if (scan.contains("elevations_deg")) {
        for (const auto& e : scan.at("elevations_deg")) spec.scan.elevations.push_back(finite_number(e, ctx) * deg);
    } else {
        spec.scan.elevations = uniform_elevations(get<double>(scan, "elevation_min_deg", ctx + ".scan") * deg,
                                                  get<double>(scan, "elevation_max_deg", ctx + ".scan") * deg,
                                                  get<int>(scan, "rings", ctx + ".scan"));
    }

    const json& cam = j.at("camera");
    if (cam.contains("extrinsic")) {
        spec.camera = camera_from_json(cam, ctx + ".camera");
    } else {
        const Vec3 position = vec3(cam, "position", ctx + ".camera") - spec.lidar_origin;
        const double yaw = cam.contains("yaw_deg") ? get<double>(cam, "yaw_deg", ctx) * deg : 0.0;
        spec.camera = make_forward_camera(position, yaw, get<double>(cam, "focal", ctx + ".camera"),
                                          image_size_from_json(cam, ctx + ".camera"));
    }

    if (j.contains("objects")) {
        for (std::size_t k = 0; k < j.at("objects").size(); ++k) {
            spec.objects.push_back(box_from_json(j.at("objects")[k], ctx + ".objects[" + std::to_string(k) + "]"));
        }
    }
    if (j.contains("occluders")) {
        for (const auto& o : j.at("occluders")) {
            const auto a = number_array(o, "a", 2, ctx + ".occluders");
            const auto b = number_array(o, "b", 2, ctx + ".occluders");
            spec.occluders.push_back({Eigen::Vector2d(a[0], a[1]), Eigen::Vector2d(b[0], b[1]),
                                      get<double>(o, "z_min", ctx), get<double>(o, "z_max", ctx)});
        }
    }
    spec.validate();
    return spec;
}

}  // namespace

SceneSpec scene_from_json(const std::string& text) {
    try {
        return parse_scene(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("scene: ") + e.what());
    }
}

SceneSpec read_scene(const fs::path& path) {
    try {
        return scene_from_json(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_ground_truth(const GroundTruth& truth, const fs::path& path) {
    json visible = json::array();
    for (bool b : truth.camera_visible) visible.push_back(b ? 1 : 0);
    json j;
    j["format_version"] = kFormatVersion;
    j["owner"] = truth.owner;
    j["camera_visible"] = visible;
    write_text_file(dump(j), path);
}

std::string read_text_file(const fs::path& path) { return read_binary(path); }

void write_text_file(const std::string& text, const fs::path& path) { write_binary(text, path); }

}  // namespace lidarseg
