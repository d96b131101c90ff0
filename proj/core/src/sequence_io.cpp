#include "c2p/sequence_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "binary_io.hpp"

namespace c2p {

namespace {
constexpr std::uint8_t kFlagCameras = 0x01;
constexpr std::uint8_t kFlagLabels = 0x02;
}

void write_sequence(const std::string& path, const Sequence& seq,
                    const std::vector<FrameCamera>* cameras) {
    if (seq.has_labels() && seq.labels.size() != seq.length())
        throw ConfigError("write_sequence: label count does not match frame count");
    if (cameras && !cameras->empty() && cameras->size() != seq.length())
        throw ConfigError("write_sequence: camera count does not match frame count");

    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw FormatError("cannot open for writing: " + path);

    bool with_cameras = cameras && !cameras->empty();
    std::uint8_t flags = 0;
    if (with_cameras) flags |= kFlagCameras;
    if (seq.has_labels()) flags |= kFlagLabels;

    os.write("C2PS", 4);
    detail::put_u32(os, 1);
    detail::put_u32(os, static_cast<std::uint32_t>(seq.length()));
    detail::put_u8(os, flags);
    for (const PointCloudFrame& f : seq.frames) {
        detail::put_u32(os, static_cast<std::uint32_t>(f.size()));
        for (const Vec3& p : f.points) {
            detail::put_f32(os, static_cast<float>(p.x));
            detail::put_f32(os, static_cast<float>(p.y));
            detail::put_f32(os, static_cast<float>(p.z));
        }
    }
    if (with_cameras) {
        for (const FrameCamera& c : *cameras) {
            detail::put_f32(os, static_cast<float>(c.intrinsics.fx));
            detail::put_f32(os, static_cast<float>(c.intrinsics.fy));
            detail::put_f32(os, static_cast<float>(c.intrinsics.cx));
            detail::put_f32(os, static_cast<float>(c.intrinsics.cy));
            detail::put_u32(os, c.intrinsics.width);
            detail::put_u32(os, c.intrinsics.height);
            const double t[3] = {c.pose.translation.x, c.pose.translation.y,
                                 c.pose.translation.z};
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j)
                    detail::put_f32(os,
                                    static_cast<float>(c.pose.rotation.m[i][j]));
                detail::put_f32(os, static_cast<float>(t[i]));
            }
        }
    }
    if (seq.has_labels())
        for (std::uint32_t lab : seq.labels) detail::put_u32(os, lab);

    if (!os)
        throw FormatError("write failed: " + path);
}

SequenceFile read_sequence(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open: " + path);
    detail::Reader r(is);
    r.expect_magic("C2PS", "C2PS");
    std::uint32_t version = r.u32("version");
    if (version != 1)
        throw FormatError("unsupported C2PS version " + std::to_string(version),
                          4);
    std::uint32_t L = r.u32("frame count");
    std::uint8_t flags = r.u8("flags");
    if (flags & ~(kFlagCameras | kFlagLabels))
        throw FormatError("unknown C2PS flags", r.offset() - 1);

    SequenceFile out;
    out.sequence.frames.resize(L);
    for (std::uint32_t i = 0; i < L; ++i) {
        std::uint32_t n = r.u32("point count");
        PointCloudFrame& f = out.sequence.frames[i];
        f.points.resize(n);
        for (std::uint32_t j = 0; j < n; ++j) {
            std::size_t at = r.offset();
            Vec3& p = f.points[j];
            p.x = r.f32("x");
            p.y = r.f32("y");
            p.z = r.f32("z");
            if (!p.finite())
                throw FormatError("non-finite point coordinate", at);
        }
    }
    if (flags & kFlagCameras) {
        out.cameras.resize(L);
        for (std::uint32_t i = 0; i < L; ++i) {
            FrameCamera& c = out.cameras[i];
            c.intrinsics.fx = r.f32("fx");
            c.intrinsics.fy = r.f32("fy");
            c.intrinsics.cx = r.f32("cx");
            c.intrinsics.cy = r.f32("cy");
            c.intrinsics.width = r.u32("width");
            c.intrinsics.height = r.u32("height");
            double t[3];
            for (int row = 0; row < 3; ++row) {
                for (int col = 0; col < 3; ++col)
                    c.pose.rotation.m[row][col] = r.f32("rotation");
                t[row] = r.f32("translation");
            }
            c.pose.translation = {t[0], t[1], t[2]};
        }
    }
    if (flags & kFlagLabels) {
        out.sequence.labels.resize(L);
        for (std::uint32_t i = 0; i < L; ++i)
            out.sequence.labels[i] = r.u32("label");
    }
    // Trailing bytes mean the file does not match its own header.
    if (is.peek() != std::char_traits<char>::eof())
        throw FormatError("trailing bytes after C2PS payload", r.offset());
    return out;
}

void export_xyz(const std::string& prefix, const Sequence& seq) {
    for (std::size_t i = 0; i < seq.length(); ++i) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%04zu.xyz", i);
        std::ofstream os(prefix + suffix);
        if (!os)
            throw FormatError("cannot open for writing: " + prefix + suffix);
        for (const Vec3& p : seq.frames[i].points) {
            char line[96];
            std::snprintf(line, sizeof line, "%.9g %.9g %.9g\n", p.x, p.y, p.z);
            os << line;
        }
    }
}

}  // namespace c2p
