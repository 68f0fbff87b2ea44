#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "specrec/errors.hpp"
#include "specrec/svd.hpp"

static_assert(std::endian::native == std::endian::little,
              "factor container assumes a little-endian host");

namespace specrec {

namespace {

constexpr char kMagic[4] = {'S', 'R', 'F', '1'};

void write_block(std::ofstream& out, const double* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
}

void read_block(std::ifstream& in, double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!in) throw Error("factor container truncated");
}

}  // namespace

void save_factors(const TruncatedSVD& f, const std::string& dir, double tolerance,
                  std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);

    std::ofstream bin(base / "factors.bin", std::ios::binary);
    if (!bin) throw Error("cannot write " + (base / "factors.bin").string());
    bin.write(kMagic, 4);
    const std::int64_t header[3] = {f.n_rows(), f.n_cols(), f.k};
    bin.write(reinterpret_cast<const char*>(header), sizeof(header));
    // column-major float64 blocks: U, sigma, V
    write_block(bin, f.U.data(), static_cast<std::size_t>(f.U.size()));
    write_block(bin, f.sigma.data(), static_cast<std::size_t>(f.sigma.size()));
    write_block(bin, f.V.data(), static_cast<std::size_t>(f.V.size()));
    if (!bin) throw Error("failed writing factor container");

    nlohmann::json meta = {
        {"n", f.n_rows()},          {"m", f.n_cols()},
        {"k", f.k},                 {"tolerance", tolerance},
        {"seed", seed},             {"sign_convention", f.sign_convention},
        {"rank_truncated", f.rank_truncated},
    };
    std::ofstream side(base / "factors.json");
    side << meta.dump(2) << "\n";
    if (!side) throw Error("failed writing factor sidecar");
}

TruncatedSVD load_factors(const std::string& dir) {
    const std::filesystem::path base(dir);

    std::ifstream side(base / "factors.json");
    if (!side) throw Error("cannot open " + (base / "factors.json").string());
    nlohmann::json meta = nlohmann::json::parse(side);

    std::ifstream bin(base / "factors.bin", std::ios::binary);
    if (!bin) throw Error("cannot open " + (base / "factors.bin").string());
    char magic[4];
    bin.read(magic, 4);
    if (!bin || !std::equal(magic, magic + 4, kMagic)) {
        throw Error("bad factor container magic");
    }
    std::int64_t header[3];
    bin.read(reinterpret_cast<char*>(header), sizeof(header));
    if (!bin || header[0] < 0 || header[1] < 0 || header[2] < 0) {
        throw Error("bad factor container header");
    }
    const index_t n = header[0];
    const index_t m = header[1];
    const int k = static_cast<int>(header[2]);
    if (meta.value("n", -1) != n || meta.value("m", -1) != m || meta.value("k", -1) != k) {
        throw Error("factor sidecar disagrees with binary container");
    }

    TruncatedSVD f;
    f.U.resize(n, k);
    f.sigma.resize(k);
    f.V.resize(m, k);
    read_block(bin, f.U.data(), static_cast<std::size_t>(f.U.size()));
    read_block(bin, f.sigma.data(), static_cast<std::size_t>(f.sigma.size()));
    read_block(bin, f.V.data(), static_cast<std::size_t>(f.V.size()));
    f.k = k;
    f.sign_convention = meta.value("sign_convention", false);
    f.rank_truncated = meta.value("rank_truncated", false);
    return f;
}

}  // namespace specrec
