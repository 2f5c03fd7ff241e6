#include "prida/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace prida {

namespace {

std::string lower_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

std::vector<unsigned char> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

// PGM header tokens are separated by whitespace and may be interleaved with
// '#' comments running to end of line.
class PgmHeader {
public:
    explicit PgmHeader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    std::string token()
    {
        skip_space_and_comments();
        std::string tok;
        while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]))
            tok.push_back(static_cast<char>(bytes_[pos_++]));
        if (tok.empty())
            throw FormatError("truncated PGM header");
        return tok;
    }

    long number()
    {
        const std::string tok = token();
        long v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw FormatError("malformed PGM header field '" + tok + "'");
        return v;
    }

    // Exactly one whitespace byte separates maxval from the raster.
    std::size_t raster_offset()
    {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw FormatError("PGM raster not preceded by whitespace");
        return pos_ + 1;
    }

private:
    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            if (std::isspace(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 0;
};

Image load_pgm(const std::filesystem::path& path)
{
    const auto bytes = read_bytes(path);
    PgmHeader header(bytes);
    if (header.token() != "P5")
        throw FormatError("'" + path.string() + "' is not a binary PGM (P5)");
    const long width = header.number();
    const long height = header.number();
    const long maxval = header.number();
    if (width <= 0 || height <= 0)
        throw FormatError("PGM has zero dimensions");
    if (maxval <= 0 || maxval > 65535)
        throw FormatError("PGM maxval out of range");
    const std::size_t offset = header.raster_offset();
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    if (bytes.size() < offset + n * sample_bytes)
        throw FormatError("PGM raster truncated");

    std::vector<double> data(n);
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < n; ++i) {
        unsigned value = bytes[offset + i * sample_bytes];
        if (sample_bytes == 2)
            value = (value << 8) | bytes[offset + i * 2 + 1];
        data[i] = std::min(1.0, value * scale);
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

[[noreturn]] void png_throw(png_structp, png_const_charp msg) { throw FormatError(std::string("PNG: ") + msg); }

void png_warn(png_structp, png_const_charp) {}

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image load_png(const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open '" + path.string() + "' for reading");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (!png)
        throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_read_struct(png, info, nullptr); }
    } guard{&png, &info};

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int color_type = png_get_color_type(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (color_type & PNG_COLOR_MASK_ALPHA)
        png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    if (width == 0 || height == 0)
        throw FormatError("PNG has zero dimensions");
    const int channels = png_get_channels(png, info);
    const int depth = png_get_bit_depth(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    std::vector<unsigned char> raster(rowbytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y)
        rows[y] = raster.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    const double maxval = depth == 16 ? 65535.0 : 255.0;
    std::vector<double> data(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y) {
        const unsigned char* row = rows[y];
        for (png_uint_32 x = 0; x < width; ++x) {
            double acc = 0.0;
            for (int c = 0; c < channels; ++c) {
                const std::size_t idx = static_cast<std::size_t>(x) * channels + c;
                const unsigned v = depth == 16 ? (unsigned(row[2 * idx]) << 8) | row[2 * idx + 1] : row[idx];
                acc += v / maxval;
            }
            data[static_cast<std::size_t>(y) * width + x] = acc / channels;
        }
    }
    return Image(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

unsigned char quantize8(double v) { return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

void save_pgm(const Image& img, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<char> raster(img.size());
    std::transform(img.values().begin(), img.values().end(), raster.begin(),
                   [](double v) { return static_cast<char>(quantize8(v)); });
    out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

void save_png(const Image& img, const std::filesystem::path& path)
{
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw IoError("cannot open '" + path.string() + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_throw, png_warn);
    if (!png)
        throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    struct Guard {
        png_structp* png;
        png_infop* info;
        ~Guard() { png_destroy_write_struct(png, info); }
    } guard{&png, &info};

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<unsigned char> row(static_cast<std::size_t>(img.width()));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x)
            row[static_cast<std::size_t>(x)] = quantize8(img(x, y));
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
}

} // namespace

Image load_image(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        throw IoError("no such file '" + path.string() + "'");
    const std::string ext = lower_extension(path);
    if (ext == ".png")
        return load_png(path);
    if (ext == ".pgm")
        return load_pgm(path);
    // Sniff the magic bytes for anything else.
    const auto head = read_bytes(path);
    if (head.size() >= 8 && png_sig_cmp(head.data(), 0, 8) == 0)
        return load_png(path);
    return load_pgm(path);
}

void save_image(const Image& img, const std::filesystem::path& path)
{
    if (img.empty())
        throw ArgumentError("cannot save an empty image");
    if (lower_extension(path) == ".pgm")
        save_pgm(img, path);
    else
        save_png(img, path);
}

std::string format_double(double v)
{
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, p);
    if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos)
        s += ".0";
    return s;
}

std::string format_kernel(const Kernel& k)
{
    std::ostringstream out;
    out << k.side() << ' ' << k.side() << '\n';
    for (int v = 0; v < k.side(); ++v) {
        for (int u = 0; u < k.side(); ++u) {
            char buf[64];
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, k(u, v), std::chars_format::general, 17);
            std::string s(buf, p);
            if (s.find_first_of(".e") == std::string::npos)
                s += ".0";
            out << (u ? " " : "") << s;
        }
        out << '\n';
    }
    return out.str();
}

void save_kernel(const Kernel& k, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << format_kernel(k);
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

Kernel load_kernel(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path.string() + "' for reading");
    int rows = 0, cols = 0;
    if (!(in >> rows >> cols) || rows != cols || rows <= 0)
        throw FormatError("kernel file must start with 'side side'");
    std::vector<double> w(static_cast<std::size_t>(rows) * cols);
    for (double& v : w)
        if (!(in >> v))
            throw FormatError("kernel file truncated");
    return normalized_kernel(rows, std::move(w));
}

Image kernel_preview(const Kernel& k)
{
    const double peak = k.max_weight();
    std::vector<double> px(k.weights().begin(), k.weights().end());
    for (double& v : px)
        v = peak > 0.0 ? v / peak : 0.0;
    return Image(k.side(), k.side(), std::move(px));
}

void write_trace_csv(const Trace& trace, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << "t,objective,eta_f,eta_k_max,move_l2,kl_step\r\n";
    for (const auto& r : trace) {
        out << r.t << ',' << format_double(r.objective) << ',' << format_double(r.eta_f) << ','
            << format_double(r.eta_k_max) << ',' << format_double(r.move_l2) << ',' << format_double(r.kl_step)
            << "\r\n";
    }
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
}

} // namespace prida
