#include "c2p/geometry.hpp"

#include <fstream>

#include "binary_io.hpp"

namespace c2p {

bool CameraPose::orthonormal(double tol) const {
    Mat3 rtr = rotation.transposed() * rotation;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double want = (i == j) ? 1.0 : 0.0;
            if (std::fabs(rtr.m[i][j] - want) > tol) return false;
        }
    return std::fabs(rotation.det() - 1.0) <= tol;
}

std::vector<Vec3> world_to_camera(const PointCloudFrame& frame,
                                  const CameraPose& pose) {
    std::vector<Vec3> out;
    out.reserve(frame.size());
    for (std::size_t i = 0; i < frame.size(); ++i) {
        const Vec3& p = frame.points[i];
        if (!p.finite())
            throw NumericError("world_to_camera: non-finite coordinate at point " +
                               std::to_string(i));
        out.push_back(pose.to_camera(p));
    }
    return out;
}

std::optional<ProjectedPixel> project(const Vec3& point_cam,
                                      const CameraIntrinsics& intr) {
    if (!(point_cam.z > 0.0)) return std::nullopt;
    double uf = std::floor(intr.fx * point_cam.x / point_cam.z + intr.cx);
    double vf = std::floor(intr.fy * point_cam.y / point_cam.z + intr.cy);
    if (uf < 0.0 || vf < 0.0 || uf >= static_cast<double>(intr.width) ||
        vf >= static_cast<double>(intr.height))
        return std::nullopt;
    return ProjectedPixel{static_cast<std::uint32_t>(uf),
                          static_cast<std::uint32_t>(vf), point_cam.z};
}

Vec3 unproject_pixel(std::uint32_t u, std::uint32_t v, double depth,
                     const CameraIntrinsics& intr) {
    double x = (static_cast<double>(u) + 0.5 - intr.cx) * depth / intr.fx;
    double y = (static_cast<double>(v) + 0.5 - intr.cy) * depth / intr.fy;
    return {x, y, depth};
}

CameraPose look_at(const Vec3& camera_pos, const Vec3& target,
                   const Vec3& up_hint) {
    Vec3 diff = target - camera_pos;
    double dist = diff.norm();
    if (dist == 0.0)
        throw ConfigError("look_at: camera position equals target");
    Vec3 forward = diff / dist;

    auto usable = [&](const Vec3& up) {
        double n = up.norm();
        if (n == 0.0) return false;
        return forward.cross(up / n).norm() > 1e-6;
    };

    Vec3 up = up_hint;
    if (!usable(up)) up = Vec3{1, 0, 0};
    if (!usable(up)) up = Vec3{0, 1, 0};

    Vec3 right = up.cross(forward);
    right = right / right.norm();
    Vec3 true_up = forward.cross(right);

    Mat3 r = Mat3::from_rows(right, true_up, forward);
    Vec3 t = (r * camera_pos) * -1.0;
    return {r, t};
}

Vec3 centroid(const PointCloudFrame& frame) {
    if (frame.empty())
        throw ConfigError("centroid: empty frame");
    Vec3 sum{0, 0, 0};
    for (const Vec3& p : frame.points) sum = sum + p;
    return sum / static_cast<double>(frame.size());
}

void write_depth_image(const std::string& path, const DepthImage& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw FormatError("cannot open for writing: " + path);
    os.write("C2PD", 4);
    detail::put_u32(os, 1);
    detail::put_u32(os, img.width());
    detail::put_u32(os, img.height());
    for (std::uint32_t v = 0; v < img.height(); ++v)
        for (std::uint32_t u = 0; u < img.width(); ++u) {
            float d = img.empty_at(u, v)
                          ? std::numeric_limits<float>::infinity()
                          : static_cast<float>(img.depth_at(u, v));
            detail::put_f32(os, d);
        }
    if (!os)
        throw FormatError("write failed: " + path);
}

DepthImage read_depth_image(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open: " + path);
    detail::Reader r(is);
    r.expect_magic("C2PD", "C2PD");
    std::uint32_t version = r.u32("version");
    if (version != 1)
        throw FormatError("unsupported C2PD version " + std::to_string(version),
                          4);
    std::uint32_t w = r.u32("width");
    std::uint32_t h = r.u32("height");
    DepthImage img(w, h);
    for (std::uint32_t v = 0; v < h; ++v)
        for (std::uint32_t u = 0; u < w; ++u) {
            float d = r.f32("depth");
            if (std::isfinite(d)) img.record(u, v, d, 0);
        }
    return img;
}

}  // namespace c2p
