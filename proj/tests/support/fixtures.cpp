#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include <Eigen/Geometry>

namespace fixtures {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Eigen::Matrix3d random_rotation(Rng& rng) {
    Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    q.normalize();
    return q.toRotationMatrix();
}

lidarseg::CalibratedCamera random_camera(Rng& rng, lidarseg::ImageSize size) {
    lidarseg::CalibratedCamera cam;
    cam.image_size = size;
    cam.extrinsic.topLeftCorner<3, 3>() = random_rotation(rng);
    cam.extrinsic.topRightCorner<3, 1>() = lidarseg::Vec3(uniform(rng, -2, 2), uniform(rng, -2, 2), uniform(rng, -2, 2));
    const double f = uniform(rng, 300, 900);
    cam.camera_matrix.setZero();
    cam.camera_matrix(0, 0) = f;
    cam.camera_matrix(1, 1) = f * uniform(rng, 0.95, 1.05);
    cam.camera_matrix(0, 2) = size.width / 2.0 + uniform(rng, -10, 10);
    cam.camera_matrix(1, 2) = size.height / 2.0 + uniform(rng, -10, 10);
    cam.camera_matrix(2, 2) = 1.0;
    return cam;
}

lidarseg::CalibratedCamera principal_camera() {
    lidarseg::CalibratedCamera cam;
    cam.image_size = {100, 100};
    cam.camera_matrix << 100, 0, 50, 0, 0, 100, 50, 0, 0, 0, 1, 0;
    return cam;
}

lidarseg::Box3D random_box(Rng& rng, double spread) {
    lidarseg::Box3D b;
    b.center = lidarseg::Vec3(uniform(rng, -spread, spread), uniform(rng, -spread, spread), uniform(rng, -spread, spread));
    b.size = lidarseg::Vec3(uniform(rng, 0.3, 5), uniform(rng, 0.3, 3), uniform(rng, 0.3, 2.5));
    b.yaw = uniform(rng, -3.14159, 3.14159);
    b.class_id = uniform_int(rng, 0, 5);
    b.instance_id = uniform_int(rng, 1, 1000);
    return b;
}

lidarseg::Vec3 from_camera_frame(const lidarseg::CalibratedCamera& cam, const lidarseg::Vec3& p_cam) {
    const Eigen::Matrix3d R = cam.extrinsic.topLeftCorner<3, 3>();
    const lidarseg::Vec3 t = cam.extrinsic.topRightCorner<3, 1>();
    return R.transpose() * (p_cam - t);
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lidarseg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lidarseg::FrameBundle bundle_from(const lidarseg::SimulatedFrame& sim, const std::string& frame_id,
                                  std::uint64_t seed, bool features, bool predictions) {
    lidarseg::FrameBundle f;
    f.frame_id = frame_id;
    f.cloud = sim.cloud;
    f.camera = sim.camera;
    f.boxes = sim.boxes;
    const auto size = sim.camera.image_size;
    const int h = std::max(1, size.height / 4), w = std::max(1, size.width / 4);
    if (features) f.features = lidarseg::synthesize_features(sim.truth, h, w, 8, seed);
    if (predictions && !sim.boxes.empty()) {
        std::vector<lidarseg::PredictionMap> maps;
        for (const auto& b : sim.boxes) {
            lidarseg::PredictionMap m(h, w, 0.2);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double u = (x + 0.5) * size.width / w, v = (y + 0.5) * size.height / h;
                    if (sim.truth.mask_at(u, v) == b.instance_id) m.at(x, y) = 0.8;
                }
            maps.push_back(std::move(m));
        }
        f.predictions = std::move(maps);
    }
    return f;
}

}  // namespace fixtures
