#pragma once

#include <string>
#include <vector>

#include "c2p/geometry.hpp"

namespace c2p {

// Per-frame camera block as stored in C2PS files.
struct FrameCamera {
    CameraIntrinsics intrinsics;
    CameraPose pose;
};

struct SequenceFile {
    Sequence sequence;
    std::vector<FrameCamera> cameras;  // empty, or one per frame

    bool has_cameras() const { return !cameras.empty(); }
};

// "C2PS" sequence file: magic, u32 LE version=1, u32 L, u8 flags
// (bit0 = cameras, bit1 = labels), then per frame u32 n_i followed by
// n_i * 3 f32 LE coordinates; if bit0, per frame fx,fy,cx,cy (f32),
// width,height (u32), 12 f32 row-major [R|t]; if bit1, L u32 labels.
// write_sequence followed by read_sequence is byte identity.
void write_sequence(const std::string& path, const Sequence& seq,
                    const std::vector<FrameCamera>* cameras = nullptr);

SequenceFile read_sequence(const std::string& path);

// One "x y z" line per point, one file per frame, for external viewers.
// Files are named <prefix>_NNNN.xyz.
void export_xyz(const std::string& prefix, const Sequence& seq);

}  // namespace c2p
