#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "lidarseg/geometry.hpp"
#include "lidarseg/io_formats.hpp"
#include "lidarseg/simulator.hpp"
#include "lidarseg/rng.hpp"

namespace fixtures {

using lidarseg::Rng;

double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

/// Uniformly distributed rotation (normalized Gaussian quaternion).
Eigen::Matrix3d random_rotation(Rng& rng);

/// Random orthonormal extrinsic, pinhole camera matrix with focal 300-900 px and the
/// principal point near the image center.
lidarseg::CalibratedCamera random_camera(Rng& rng, lidarseg::ImageSize size = {480, 640});

/// Identity extrinsic, M = [[100,0,50,0],[0,100,50,0],[0,0,1,0]], 100 x 100 image.
lidarseg::CalibratedCamera principal_camera();

lidarseg::Box3D random_box(Rng& rng, double spread = 5.0);

/// LiDAR-frame point at the given camera-frame position.
lidarseg::Vec3 from_camera_frame(const lidarseg::CalibratedCamera& cam, const lidarseg::Vec3& p_cam);

/// Frame bundle of a simulated scene. Features are synthesized at a quarter of the image
/// resolution; predictions are 0.8 inside each instance's mask and 0.2 elsewhere.
lidarseg::FrameBundle bundle_from(const lidarseg::SimulatedFrame& sim, const std::string& frame_id,
                                  std::uint64_t seed, bool features = true, bool predictions = true);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

std::string file_bytes(const std::filesystem::path& path);

}  // namespace fixtures
