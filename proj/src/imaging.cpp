#include "skinprob/imaging.hpp"

#include "skinprob/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace skinprob {

const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return "io-failure";
    case ErrorKind::format: return "format-error";
    case ErrorKind::empty_training_set: return "empty-training-set";
    case ErrorKind::no_skin_region: return "no-skin-region";
    case ErrorKind::invalid_pose: return "invalid-pose";
    case ErrorKind::infeasible_params: return "infeasible-params";
    case ErrorKind::invalid_argument: return "invalid-argument";
    }
    return "unknown";
}

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw Error(ErrorKind::invalid_argument,
                    "raster dimensions must be positive, got " + std::to_string(width) + "x" +
                        std::to_string(height));
    }
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    if (path.empty()) throw Error(ErrorKind::io, "empty path");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw Error(ErrorKind::io, "read failed on '" + path.string() + "'");
    return bytes;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    if (path.empty()) throw Error(ErrorKind::io, "empty path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::io, "write failed on '" + path.string() + "'");
}

bool is_space(std::uint8_t c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

// Minimal netpbm header reader: magic, then whitespace/comment separated
// decimal fields, then exactly one whitespace byte before the raster.
class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::string magic() {
        if (bytes_.size() < 2) throw Error(ErrorKind::format, "file too short for netpbm magic");
        pos_ = 2;
        return {static_cast<char>(bytes_[0]), static_cast<char>(bytes_[1])};
    }

    long field() {
        skip_separators();
        if (pos_ >= bytes_.size() || bytes_[pos_] < '0' || bytes_[pos_] > '9') {
            throw Error(ErrorKind::format, "malformed netpbm header");
        }
        long value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) throw Error(ErrorKind::format, "header value too large");
            ++pos_;
        }
        return value;
    }

    std::size_t raster_start() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw Error(ErrorKind::format, "missing whitespace before raster");
        }
        return pos_ + 1;
    }

private:
    void skip_separators() {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
            } else {
                break;
            }
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> header(const char* magic, int width, int height, int maxval) {
    std::string h = std::string(magic) + "\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n";
    if (maxval > 0) h += std::to_string(maxval) + "\n";
    return {h.begin(), h.end()};
}

}  // namespace

ImageRGB::ImageRGB(int width, int height, Rgb fill) : width_(width), height_(height) {
    check_dims(width, height);
    data_.resize(pixel_count() * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill[0];
        data_[i + 1] = fill[1];
        data_[i + 2] = fill[2];
    }
}

ImageRGB::ImageRGB(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != pixel_count() * 3) {
        throw Error(ErrorKind::invalid_argument, "image data length must equal width*height*3");
    }
}

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height),
      bits_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill ? 1 : 0) {
    check_dims(width, height);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::invalid_argument, "mask length must equal width*height");
    }
    if (std::any_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b > 1; })) {
        throw Error(ErrorKind::invalid_argument, "mask values must be 0 or 1");
    }
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask BinaryMask::complement() const {
    BinaryMask out = *this;
    for (auto& b : out.bits_) b ^= 1;
    return out;
}

ImageRGB decode_ppm(std::span<const std::uint8_t> bytes) {
    HeaderReader reader(bytes);
    if (reader.magic() != "P6") throw Error(ErrorKind::format, "not a binary PPM (P6)");
    const long width = reader.field();
    const long height = reader.field();
    const long maxval = reader.field();
    if (width < 1 || height < 1) throw Error(ErrorKind::format, "PPM dimensions must be positive");
    if (maxval != 255) throw Error(ErrorKind::format, "PPM maxval must be 255");
    const std::size_t start = reader.raster_start();
    const std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3;
    if (bytes.size() - start < need) throw Error(ErrorKind::format, "truncated PPM raster");
    std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(start),
                                   bytes.begin() + static_cast<std::ptrdiff_t>(start + need));
    return ImageRGB(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> encode_ppm(const ImageRGB& img) {
    auto out = header("P6", img.width(), img.height(), 255);
    out.insert(out.end(), img.bytes().begin(), img.bytes().end());
    return out;
}

ImageRGB load_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_ppm(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

void save_image(const ImageRGB& img, const std::filesystem::path& path) {
    write_file(path, encode_ppm(img));
}

std::vector<std::uint8_t> encode_pbm(const BinaryMask& mask) {
    auto out = header("P4", mask.width(), mask.height(), 0);
    const int row_bytes = (mask.width() + 7) / 8;
    for (int y = 0; y < mask.height(); ++y) {
        for (int b = 0; b < row_bytes; ++b) {
            std::uint8_t packed = 0;
            for (int bit = 0; bit < 8; ++bit) {
                const int x = b * 8 + bit;
                if (x < mask.width() && mask.at(x, y)) packed |= static_cast<std::uint8_t>(0x80u >> bit);
            }
            out.push_back(packed);
        }
    }
    return out;
}

ImageRGB mask_to_image(const BinaryMask& mask) {
    ImageRGB img(mask.width(), mask.height());
    auto dst = img.bytes();
    const auto src = mask.bits();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const std::uint8_t v = src[i] ? 255 : 0;
        dst[3 * i] = dst[3 * i + 1] = dst[3 * i + 2] = v;
    }
    return img;
}

BinaryMask decode_mask(std::span<const std::uint8_t> bytes) {
    HeaderReader reader(bytes);
    const std::string magic = reader.magic();
    if (magic == "P6") {
        const ImageRGB img = decode_ppm(bytes);
        BinaryMask mask(img.width(), img.height());
        const auto src = img.bytes();
        auto dst = mask.bits();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = (src[3 * i] | src[3 * i + 1] | src[3 * i + 2]) ? 1 : 0;
        }
        return mask;
    }
    if (magic != "P4") throw Error(ErrorKind::format, "mask must be P4 or P6");
    const long width = reader.field();
    const long height = reader.field();
    if (width < 1 || height < 1) throw Error(ErrorKind::format, "PBM dimensions must be positive");
    const std::size_t start = reader.raster_start();
    const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
    if (bytes.size() - start < row_bytes * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::format, "truncated PBM raster");
    }
    BinaryMask mask(static_cast<int>(width), static_cast<int>(height));
    for (int y = 0; y < mask.height(); ++y) {
        const std::uint8_t* row = bytes.data() + start + row_bytes * static_cast<std::size_t>(y);
        for (int x = 0; x < mask.width(); ++x) {
            mask.set(x, y, (row[x / 8] >> (7 - x % 8)) & 1u);
        }
    }
    return mask;
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
    if (path.extension() == ".pbm") {
        write_file(path, encode_pbm(mask));
    } else {
        write_file(path, encode_ppm(mask_to_image(mask)));
    }
}

BinaryMask load_mask(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_mask(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

std::array<std::uint8_t, 256> equalization_map(const std::array<std::size_t, 256>& histogram) {
    std::array<std::size_t, 256> cdf{};
    std::size_t running = 0;
    for (int v = 0; v < 256; ++v) {
        running += histogram[v];
        cdf[v] = running;
    }
    const std::size_t total = running;
    std::size_t cdf_min = 0;
    for (int v = 0; v < 256; ++v) {
        if (cdf[v] != 0) {
            cdf_min = cdf[v];
            break;
        }
    }
    std::array<std::uint8_t, 256> map{};
    if (total == cdf_min) return map;  // constant channel
    const double span = static_cast<double>(total - cdf_min);
    for (int v = 0; v < 256; ++v) {
        if (cdf[v] < cdf_min) continue;
        const double scaled = static_cast<double>(cdf[v] - cdf_min) / span * 255.0;
        map[v] = static_cast<std::uint8_t>(std::round(scaled));
    }
    return map;
}

ImageRGB equalize_histogram(const ImageRGB& img) {
    std::array<std::array<std::size_t, 256>, 3> hist{};
    const auto src = img.bytes();
    for (std::size_t i = 0; i < src.size(); i += 3) {
        ++hist[0][src[i]];
        ++hist[1][src[i + 1]];
        ++hist[2][src[i + 2]];
    }
    const std::array<std::array<std::uint8_t, 256>, 3> maps = {
        equalization_map(hist[0]), equalization_map(hist[1]), equalization_map(hist[2])};
    ImageRGB out = img;
    auto dst = out.bytes();
    for (std::size_t i = 0; i < dst.size(); i += 3) {
        dst[i] = maps[0][dst[i]];
        dst[i + 1] = maps[1][dst[i + 1]];
        dst[i + 2] = maps[2][dst[i + 2]];
    }
    return out;
}

}  // namespace skinprob
