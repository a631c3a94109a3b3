#include "lidarseg/image.hpp"

#include <fstream>
#include <string>

#include "lidarseg/errors.hpp"

namespace lidarseg {

RgbImage::RgbImage(int h, int w, Rgb fill)
    : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3) {
    for (std::size_t i = 0; i < data.size(); i += 3) {
        data[i] = fill[0];
        data[i + 1] = fill[1];
        data[i + 2] = fill[2];
    }
}

Rgb RgbImage::get(int x, int y) const {
    const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
    return {data[o], data[o + 1], data[o + 2]};
}

void RgbImage::set(int x, int y, Rgb c) {
    const std::size_t o = (static_cast<std::size_t>(y) * width + x) * 3;
    data[o] = c[0];
    data[o + 1] = c[1];
    data[o + 2] = c[2];
}

void write_ppm(const RgbImage& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data.data()), static_cast<std::streamsize>(image.data.size()));
    if (!out) throw Error("failed writing " + path.string());
}

RgbImage read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::string magic;
    int w = 0, h = 0, maxval = 0;
    in >> magic;
    auto skip_comments = [&] {
        in >> std::ws;
        while (in.peek() == '#') {
            std::string line;
            std::getline(in, line);
            in >> std::ws;
        }
    };
    skip_comments();
    in >> w;
    skip_comments();
    in >> h;
    skip_comments();
    in >> maxval;
    if (magic != "P6" || w <= 0 || h <= 0 || maxval != 255) {
        throw DataError(path.string() + ": only binary 8-bit PPM (P6, maxval 255) is supported");
    }
    in.get();
    RgbImage img(h, w);
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size())) {
        throw DataError(path.string() + ": truncated pixel data, expected " + std::to_string(img.data.size()) +
                        " bytes, got " + std::to_string(in.gcount()));
    }
    return img;
}

}  // namespace lidarseg
