#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fuzzmat/error.hpp>
#include <fuzzmat/image.hpp>

namespace fuzzmat {

namespace detail {

// Cursor over a fully loaded PGM file; keeps a byte offset for diagnostics.
struct PgmCursor {
    const std::string& data;
    size_t pos = 0;
    const std::string& path;

    bool eof() const { return pos >= data.size(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(path + ": " + msg + " (byte " + std::to_string(pos) + ")");
    }

    void skipSpaceAndComments() {
        while (!eof()) {
            char c = data[pos];
            if (c == '#') {
                while (!eof() && data[pos] != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                ++pos;
            } else {
                break;
            }
        }
    }

    long long readUint(const char* what) {
        skipSpaceAndComments();
        if (eof()) fail(std::string("truncated file while reading ") + what);
        if (data[pos] < '0' || data[pos] > '9')
            fail(std::string("expected unsigned integer for ") + what);
        long long v = 0;
        while (!eof() && data[pos] >= '0' && data[pos] <= '9') {
            v = v * 10 + (data[pos] - '0');
            if (v > 1'000'000'000LL) fail(std::string("value out of range for ") + what);
            ++pos;
        }
        return v;
    }
};

}  // namespace detail

/// Reads a PGM file (P2 ASCII or P5 binary, maxval <= 65535) into a GrayImage
/// with levels = maxval + 1. Malformed input is reported with a byte offset.
inline GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();

    detail::PgmCursor cur{data, 0, path};
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        cur.fail("malformed magic number, expected P2 or P5");
    const bool binary = data[1] == '5';
    cur.pos = 2;

    const long long width = cur.readUint("width");
    const long long height = cur.readUint("height");
    const long long maxval = cur.readUint("maxval");
    if (width < 1 || height < 1) cur.fail("width and height must be at least 1");
    if (maxval < 1 || maxval > 65535) cur.fail("maxval must be in [1, 65535]");

    const size_t count = static_cast<size_t>(width) * static_cast<size_t>(height);
    std::vector<int> px(count);

    if (binary) {
        // single whitespace byte separates maxval from the raster
        if (cur.eof()) cur.fail("truncated file before pixel data");
        ++cur.pos;
        const int bytesPer = maxval < 256 ? 1 : 2;
        for (size_t i = 0; i < count; ++i) {
            if (cur.pos + bytesPer > data.size()) cur.fail("truncated pixel payload");
            int v;
            if (bytesPer == 1) {
                v = static_cast<unsigned char>(data[cur.pos]);
            } else {
                v = (static_cast<unsigned char>(data[cur.pos]) << 8) |
                    static_cast<unsigned char>(data[cur.pos + 1]);
            }
            if (v > maxval) cur.fail("pixel value exceeds maxval");
            px[i] = v;
            cur.pos += bytesPer;
        }
    } else {
        for (size_t i = 0; i < count; ++i) {
            cur.skipSpaceAndComments();
            if (cur.eof()) cur.fail("truncated pixel payload");
            long long v = cur.readUint("pixel");
            if (v > maxval) cur.fail("pixel value exceeds maxval");
            px[i] = static_cast<int>(v);
        }
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height),
                     static_cast<int>(maxval) + 1, std::move(px));
}

/// Writes `img` as PGM: P5 binary by default, P2 ASCII otherwise.
/// The mask is not stored (PGM has no channel for it).
inline void save_pgm(const GrayImage& img, const std::string& path, bool binary = true) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open file for writing");
    const int maxval = img.levels() > 1 ? img.levels() - 1 : 1;
    out << (binary ? "P5" : "P2") << "\n"
        << img.width() << " " << img.height() << "\n"
        << maxval << "\n";
    if (binary) {
        const int bytesPer = maxval < 256 ? 1 : 2;
        for (int v : img.pixels()) {
            if (bytesPer == 2) out.put(static_cast<char>((v >> 8) & 0xff));
            out.put(static_cast<char>(v & 0xff));
        }
    } else {
        for (int r = 0; r < img.height(); ++r) {
            for (int c = 0; c < img.width(); ++c)
                out << img.at(r, c) << (c + 1 < img.width() ? ' ' : '\n');
        }
    }
    if (!out) throw Error(path + ": write failed");
}

/// P2 serialization used when streaming an image to stdout.
inline std::string to_pgm_ascii(const GrayImage& img) {
    std::ostringstream out;
    const int maxval = img.levels() > 1 ? img.levels() - 1 : 1;
    out << "P2\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
    for (int r = 0; r < img.height(); ++r)
        for (int c = 0; c < img.width(); ++c)
            out << img.at(r, c) << (c + 1 < img.width() ? ' ' : '\n');
    return out.str();
}

}  // namespace fuzzmat
