#include "c2p/checkpoint.hpp"

#include <cmath>
#include <fstream>

#include "binary_io.hpp"

namespace c2p {

ag::Tensor init_uniform(ag::Shape shape, std::size_t fan_in, Pcg32& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::vector<double> data(ag::numel(shape));
    for (double& v : data) v = rng.uniform(-bound, bound);
    return ag::Tensor::from_data(std::move(shape), std::move(data), true);
}

void write_checkpoint(const std::string& path, const ParamSet& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw FormatError("cannot open for writing: " + path);
    os.write("C2PW", 4);
    detail::put_u32(os, 1);
    detail::put_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, t] : params) {
        if (name.size() > 0xFFFF)
            throw ConfigError("parameter name too long: " + name);
        detail::put_u16(os, static_cast<std::uint16_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        detail::put_u8(os, static_cast<std::uint8_t>(t.rank()));
        for (std::size_t e : t.shape())
            detail::put_u32(os, static_cast<std::uint32_t>(e));
        for (double v : t.data()) detail::put_f64(os, v);
    }
    if (!os)
        throw FormatError("write failed: " + path);
}

ParamSet read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw FormatError("cannot open: " + path);
    detail::Reader r(is);
    r.expect_magic("C2PW", "C2PW");
    std::uint32_t version = r.u32("version");
    if (version != 1)
        throw FormatError("unsupported C2PW version " + std::to_string(version),
                          4);
    std::uint32_t count = r.u32("entry count");
    ParamSet out;
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint16_t name_len = r.u16("name length");
        std::string name(name_len, '\0');
        r.bytes(name.data(), name_len, "name");
        std::uint8_t rank = r.u8("rank");
        ag::Shape shape(rank);
        for (std::uint8_t j = 0; j < rank; ++j) shape[j] = r.u32("extent");
        std::vector<double> data(ag::numel(shape));
        for (double& v : data) v = r.f64("tensor data");
        out.add(name,
                ag::Tensor::from_data(std::move(shape), std::move(data), true));
    }
    return out;
}

void load_into(ParamSet& dst, const ParamSet& src) {
    for (auto& [name, t] : dst) {
        const ag::Tensor& loaded = src.at(name);
        if (loaded.shape() != t.shape())
            throw ConfigError("checkpoint shape mismatch for " + name + ": " +
                              ag::shape_str(loaded.shape()) + " vs " +
                              ag::shape_str(t.shape()));
        auto dstv = t.mutable_data();
        auto srcv = loaded.data();
        std::copy(srcv.begin(), srcv.end(), dstv.begin());
    }
}

}  // namespace c2p
