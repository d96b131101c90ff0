#pragma once

#include <string>

#include "c2p/params.hpp"

namespace c2p {

// "C2PW" checkpoint: magic, u32 version=1, u32 entry count, then per
// entry u16 name length, name bytes, u8 rank, extents as u32, data as
// f64 LE. Entries appear in ParamSet order; write/read round-trips
// byte-identically.
void write_checkpoint(const std::string& path, const ParamSet& params);

// Loaded tensors are gradient-tracked leaves.
ParamSet read_checkpoint(const std::string& path);

// Copies values from `src` into identically named entries of `dst`;
// throws if a name or shape is missing/mismatched.
void load_into(ParamSet& dst, const ParamSet& src);

}  // namespace c2p
