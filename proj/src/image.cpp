#include "gsdie/image.hpp"

#include "gsdie/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>

namespace gsdie {

ImageTensor ImageTensor::create(int height, int width, int channels, double fill) {
  if (height <= 0 || width <= 0 || (channels != 1 && channels != 3))
    throw InputError("ImageTensor: invalid shape");
  ImageTensor img;
  img.height = height;
  img.width = width;
  img.channels = channels;
  img.data.assign(static_cast<std::size_t>(height) * width * channels, fill);
  return img;
}

namespace {

int pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments.
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) throw InputError("pnm: malformed header");
  return value;
}

std::uint8_t to_byte(double v) {
  const double x = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::lround(x * 255.0));
}

}  // namespace

ImageTensor read_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image file: " + path);
  char p = 0, kind = 0;
  in.get(p);
  in.get(kind);
  if (p != 'P' || (kind != '2' && kind != '3' && kind != '5' && kind != '6'))
    throw InputError("pnm: unsupported magic in " + path);
  const bool binary = kind == '5' || kind == '6';
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  const int width = pnm_token(in);
  const int height = pnm_token(in);
  const int maxval = pnm_token(in);
  if (maxval <= 0 || maxval > 65535) throw InputError("pnm: bad maxval");
  ImageTensor img = ImageTensor::create(height, width, channels);
  const std::size_t count = img.data.size();
  if (binary) {
    in.get();  // single whitespace after maxval
    if (maxval < 256) {
      std::vector<std::uint8_t> raw(count);
      in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
      if (!in) throw InputError("pnm: truncated pixel data in " + path);
      for (std::size_t i = 0; i < count; ++i)
        img.data[i] = raw[i] / static_cast<double>(maxval);
    } else {
      std::vector<std::uint8_t> raw(count * 2);
      in.read(reinterpret_cast<char*>(raw.data()),
              static_cast<std::streamsize>(count * 2));
      if (!in) throw InputError("pnm: truncated pixel data in " + path);
      for (std::size_t i = 0; i < count; ++i) {
        const int v = raw[2 * i] * 256 + raw[2 * i + 1];  // big-endian
        img.data[i] = v / static_cast<double>(maxval);
      }
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      img.data[i] = pnm_token(in) / static_cast<double>(maxval);
  }
  return img;
}

void write_pnm(const ImageTensor& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write image file: " + path);
  out << (img.channels == 3 ? "P6" : "P5") << "\n"
      << img.width << " " << img.height << "\n255\n";
  std::vector<std::uint8_t> raw(img.data.size());
  for (std::size_t i = 0; i < img.data.size(); ++i) raw[i] = to_byte(img.data[i]);
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
}

namespace {

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

std::uint32_t adler32(const std::vector<std::uint8_t>& data) {
  std::uint32_t a = 1, b = 0;
  for (std::uint8_t byte : data) {
    a = (a + byte) % 65521u;
    b = (b + a) % 65521u;
  }
  return (b << 16) | a;
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::ofstream& out, const char type[4],
               const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> buf;
  put_u32(buf, static_cast<std::uint32_t>(payload.size()));
  buf.insert(buf.end(), type, type + 4);
  buf.insert(buf.end(), payload.begin(), payload.end());
  const std::uint32_t crc = crc32(buf.data() + 4, buf.size() - 4);
  put_u32(buf, crc);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

}  // namespace

void write_png(const ImageTensor& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write image file: " + path);
  static const std::uint8_t magic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  out.write(reinterpret_cast<const char*>(magic), 8);

  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);                          // bit depth
  ihdr.push_back(img.channels == 3 ? 2 : 0);  // colour type
  ihdr.push_back(0);                          // compression
  ihdr.push_back(0);                          // filter
  ihdr.push_back(0);                          // interlace
  put_chunk(out, "IHDR", ihdr);

  // Scanlines with filter byte 0.
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(img.height) *
              (1 + static_cast<std::size_t>(img.width) * img.channels));
  for (int r = 0; r < img.height; ++r) {
    raw.push_back(0);
    for (int c = 0; c < img.width; ++c)
      for (int ch = 0; ch < img.channels; ++ch) raw.push_back(to_byte(img.at(r, c, ch)));
  }

  // zlib stream made of stored deflate blocks.
  std::vector<std::uint8_t> idat;
  idat.push_back(0x78);
  idat.push_back(0x01);
  std::size_t pos = 0;
  do {
    const std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    const bool final = pos + len == raw.size();
    idat.push_back(final ? 1 : 0);
    idat.push_back(static_cast<std::uint8_t>(len & 0xFF));
    idat.push_back(static_cast<std::uint8_t>(len >> 8));
    idat.push_back(static_cast<std::uint8_t>(~len & 0xFF));
    idat.push_back(static_cast<std::uint8_t>((~len >> 8) & 0xFF));
    idat.insert(idat.end(), raw.begin() + static_cast<std::ptrdiff_t>(pos),
                raw.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  } while (pos < raw.size());
  put_u32(idat, adler32(raw));
  put_chunk(out, "IDAT", idat);
  put_chunk(out, "IEND", {});
}

namespace {

struct ByteReader {
  std::vector<std::uint8_t> bytes;
  std::size_t pos = 0;

  std::uint32_t u32() {
    if (pos + 4 > bytes.size()) throw InputError("png: truncated file");
    const std::uint32_t v = (static_cast<std::uint32_t>(bytes[pos]) << 24) |
                            (static_cast<std::uint32_t>(bytes[pos + 1]) << 16) |
                            (static_cast<std::uint32_t>(bytes[pos + 2]) << 8) |
                            bytes[pos + 3];
    pos += 4;
    return v;
  }
};

}  // namespace

ImageTensor read_png(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image file: " + path);
  ByteReader r;
  r.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  if (r.bytes.size() < 8 || r.bytes[1] != 'P' || r.bytes[2] != 'N' || r.bytes[3] != 'G')
    throw InputError("png: bad signature in " + path);
  r.pos = 8;
  int width = 0, height = 0, channels = 0;
  std::vector<std::uint8_t> idat;
  while (r.pos < r.bytes.size()) {
    const std::uint32_t len = r.u32();
    if (r.pos + 4 + len + 4 > r.bytes.size()) throw InputError("png: truncated chunk");
    const std::string type(r.bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                           r.bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + 4));
    r.pos += 4;
    if (type == "IHDR") {
      width = static_cast<int>(r.u32());
      height = static_cast<int>(r.u32());
      const int depth = r.bytes[r.pos];
      const int colour = r.bytes[r.pos + 1];
      const int interlace = r.bytes[r.pos + 4];
      r.pos += 5;
      if (depth != 8 || (colour != 0 && colour != 2) || interlace != 0)
        throw InputError("png: only 8-bit non-interlaced grey/RGB supported");
      channels = colour == 2 ? 3 : 1;
    } else {
      if (type == "IDAT")
        idat.insert(idat.end(), r.bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                    r.bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + len));
      r.pos += len;
    }
    r.pos += 4;  // crc
    if (type == "IEND") break;
  }
  if (width == 0 || idat.size() < 2) throw InputError("png: missing image data");

  // Inflate, stored blocks only (what write_png emits).
  std::vector<std::uint8_t> raw;
  std::size_t p = 2;  // zlib header
  while (true) {
    if (p >= idat.size()) throw InputError("png: truncated deflate stream");
    const std::uint8_t header = idat[p++];
    if ((header & 0x06) != 0)
      throw InputError("png: compressed PNG not supported; use PGM/PPM input");
    if (p + 4 > idat.size()) throw InputError("png: truncated deflate stream");
    const std::size_t len = idat[p] | (static_cast<std::size_t>(idat[p + 1]) << 8);
    p += 4;  // len + nlen
    if (p + len > idat.size()) throw InputError("png: truncated deflate stream");
    raw.insert(raw.end(), idat.begin() + static_cast<std::ptrdiff_t>(p),
               idat.begin() + static_cast<std::ptrdiff_t>(p + len));
    p += len;
    if (header & 1) break;
  }
  ImageTensor img = ImageTensor::create(height, width, channels);
  const std::size_t stride = 1 + static_cast<std::size_t>(width) * channels;
  if (raw.size() != stride * static_cast<std::size_t>(height))
    throw InputError("png: unexpected scanline payload");
  for (int row = 0; row < height; ++row) {
    if (raw[static_cast<std::size_t>(row) * stride] != 0)
      throw InputError("png: only filter 0 supported");
    for (int c = 0; c < width; ++c)
      for (int ch = 0; ch < channels; ++ch)
        img.at(row, c, ch) =
            raw[static_cast<std::size_t>(row) * stride + 1 +
                static_cast<std::size_t>(c) * channels + static_cast<std::size_t>(ch)] /
            255.0;
  }
  return img;
}

ImageTensor read_image(const std::string& path) {
  const auto dot = path.find_last_of('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (ext == "png") return read_png(path);
  if (ext == "pgm" || ext == "ppm" || ext == "pnm") return read_pnm(path);
  throw InputError("unsupported image extension (want .png/.pgm/.ppm/.pnm): " + path);
}

}  // namespace gsdie
