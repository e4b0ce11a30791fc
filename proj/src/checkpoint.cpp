#include "rgs/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace rgs {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', '4', 'G', 'S'};
constexpr int kFloatsPerGaussian = 65;

void put_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t get_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const GaussianStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot open for writing: " + path);
    out.write(kMagic, 4);
    put_u32(out, kCheckpointVersion);
    put_u32(out, (std::uint32_t)store.size());
    put_u32(out, (std::uint32_t)store.active_sh_degree);

    std::vector<float> rec(kFloatsPerGaussian);
    for (int i = 0; i < store.size(); ++i) {
        int k = 0;
        for (int a = 0; a < 4; ++a) rec[k++] = (float)store.mean[i][a];
        for (int a = 0; a < 4; ++a) rec[k++] = (float)store.log_scales[i][a];
        Vec8 rc = store.rotor[i].coeffs();
        for (int a = 0; a < 8; ++a) rec[k++] = (float)rc[a];
        rec[k++] = (float)store.opacity_logit[i];
        for (int ch = 0; ch < 3; ++ch)
            for (int c = 0; c < 16; ++c) rec[k++] = (float)store.sh[i](ch, c);
        out.write(reinterpret_cast<const char*>(rec.data()), rec.size() * sizeof(float));
    }
    if (!out) throw CheckpointError("write failed: " + path);
}

GaussianStore load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) throw CheckpointError("bad magic: " + path);
    std::uint32_t version = get_u32(in);
    if (version != kCheckpointVersion)
        throw CheckpointError("unsupported version " + std::to_string(version));
    std::uint32_t count = get_u32(in);
    std::uint32_t sh_degree = get_u32(in);
    if (!in || sh_degree > 3) throw CheckpointError("malformed header: " + path);

    GaussianStore store;
    store.active_sh_degree = (int)sh_degree;
    std::vector<float> rec(kFloatsPerGaussian);
    for (std::uint32_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(rec.data()), rec.size() * sizeof(float));
        if (!in) throw CheckpointError("truncated: " + path);
        Gaussian4D g;
        int k = 0;
        for (int a = 0; a < 4; ++a) g.mean[a] = rec[k++];
        for (int a = 0; a < 4; ++a) g.log_scales[a] = rec[k++];
        Vec8 rc;
        for (int a = 0; a < 8; ++a) rc[a] = rec[k++];
        g.rotor = Rotor4::from_coeffs(rc);
        g.opacity_logit = rec[k++];
        for (int ch = 0; ch < 3; ++ch)
            for (int c = 0; c < 16; ++c) g.sh(ch, c) = rec[k++];
        store.push_back(g);
    }
    return store;
}

}  // namespace rgs
