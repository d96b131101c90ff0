#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "c2p/error.hpp"

namespace c2p {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    bool operator==(const Vec3& o) const = default;

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

// Row-major 3x3 matrix.
struct Mat3 {
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    static Mat3 identity() { return Mat3{}; }
    static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
        Mat3 r;
        r.m[0][0] = r0.x; r.m[0][1] = r0.y; r.m[0][2] = r0.z;
        r.m[1][0] = r1.x; r.m[1][1] = r1.y; r.m[1][2] = r1.z;
        r.m[2][0] = r2.x; r.m[2][1] = r2.y; r.m[2][2] = r2.z;
        return r;
    }
    static Mat3 rotation_z(double radians) {
        double c = std::cos(radians), s = std::sin(radians);
        Mat3 r;
        r.m[0][0] = c; r.m[0][1] = -s; r.m[0][2] = 0;
        r.m[1][0] = s; r.m[1][1] = c;  r.m[1][2] = 0;
        r.m[2][0] = 0; r.m[2][1] = 0;  r.m[2][2] = 1;
        return r;
    }

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

// One frame of a 4D sequence: a set of 3D world-space points.
struct PointCloudFrame {
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

// Ordered list of frames plus optional per-frame labels (used by the
// synthetic datasets and the linear probe).
struct Sequence {
    std::vector<PointCloudFrame> frames;
    std::string id;
    std::vector<std::uint32_t> labels;  // empty or one label per frame

    std::size_t length() const { return frames.size(); }
    bool has_labels() const { return !labels.empty(); }
};

struct CameraIntrinsics {
    double fx = 64.0, fy = 64.0;
    double cx = 32.0, cy = 32.0;
    std::uint32_t width = 64, height = 64;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0))
            throw ConfigError("intrinsics: focal lengths must be positive");
        if (width < 1 || height < 1)
            throw ConfigError("intrinsics: image size must be at least 1x1");
    }
};

// Extrinsic pose with the fixed convention camera = R * world + t,
// camera looking down +z.
struct CameraPose {
    Mat3 rotation;
    Vec3 translation;

    Vec3 to_camera(const Vec3& world) const {
        return rotation * world + translation;
    }
    Vec3 to_world(const Vec3& cam) const {
        return rotation.transposed() * (cam - translation);
    }
    CameraPose inverse() const {
        Mat3 rt = rotation.transposed();
        return {rt, rt * (translation * -1.0)};
    }

    // R'R = I and det(R) = +1, both within tol.
    bool orthonormal(double tol = 1e-9) const;
};

// Z-buffer output of projecting one frame: per-pixel nearest camera-space
// depth and the index of the winning source point.
class DepthImage {
public:
    static constexpr std::uint32_t kNoIndex = 0xFFFFFFFFu;

    DepthImage() = default;
    DepthImage(std::uint32_t width, std::uint32_t height)
        : width_(width), height_(height),
          depth_(static_cast<std::size_t>(width) * height,
                 std::numeric_limits<double>::infinity()),
          index_(static_cast<std::size_t>(width) * height, kNoIndex) {}

    std::uint32_t width() const { return width_; }
    std::uint32_t height() const { return height_; }

    double depth_at(std::uint32_t u, std::uint32_t v) const {
        return depth_[pixel(u, v)];
    }
    std::uint32_t index_at(std::uint32_t u, std::uint32_t v) const {
        return index_[pixel(u, v)];
    }
    bool empty_at(std::uint32_t u, std::uint32_t v) const {
        return index_[pixel(u, v)] == kNoIndex;
    }

    // Records point `idx` at depth z; keeps the nearer point, ties going
    // to the lower index (callers submit indices in ascending order).
    void record(std::uint32_t u, std::uint32_t v, double z, std::uint32_t idx) {
        std::size_t p = pixel(u, v);
        if (z < depth_[p]) {
            depth_[p] = z;
            index_[p] = idx;
        }
    }

private:
    std::size_t pixel(std::uint32_t u, std::uint32_t v) const {
        return static_cast<std::size_t>(v) * width_ + u;
    }

    std::uint32_t width_ = 0, height_ = 0;
    std::vector<double> depth_;
    std::vector<std::uint32_t> index_;
};

struct ProjectedPixel {
    std::uint32_t u = 0, v = 0;
    double depth = 0.0;
};

// camera = R * world + t for every point. Throws NumericError on
// non-finite coordinates.
std::vector<Vec3> world_to_camera(const PointCloudFrame& frame,
                                  const CameraPose& pose);

// Pinhole projection with floor pixel assignment. Returns nullopt
// ("culled") for z <= 0 or pixels outside the image.
std::optional<ProjectedPixel> project(const Vec3& point_cam,
                                      const CameraIntrinsics& intr);

// Inverse of project for a pixel center: camera-space point
// ((u+0.5-cx) z/fx, (v+0.5-cy) z/fy, z).
Vec3 unproject_pixel(std::uint32_t u, std::uint32_t v, double depth,
                     const CameraIntrinsics& intr);

// Pose whose +z axis points from camera_pos toward target. If up_hint is
// parallel to the view direction within 1e-6, falls back to (1,0,0)
// (and (0,1,0) if that is parallel too).
CameraPose look_at(const Vec3& camera_pos, const Vec3& target,
                   const Vec3& up_hint);

// Arithmetic mean of the points. Throws ConfigError on an empty frame.
Vec3 centroid(const PointCloudFrame& frame);

// "C2PD" depth image file: magic, u32 LE version=1, u32 width, u32
// height, then width*height f32 LE row-major with +inf for empty pixels.
void write_depth_image(const std::string& path, const DepthImage& img);
DepthImage read_depth_image(const std::string& path);

}  // namespace c2p
