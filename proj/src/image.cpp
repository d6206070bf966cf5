#include "erdh/image.hpp"

#include "erdh/error.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace erdh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
  case ErrorCode::MalformedHeader: return "MalformedHeader";
  case ErrorCode::SampleOutOfRange: return "SampleOutOfRange";
  case ErrorCode::TruncatedData: return "TruncatedData";
  case ErrorCode::IoFailure: return "IoFailure";
  case ErrorCode::ShapeMismatch: return "ShapeMismatch";
  case ErrorCode::FieldOutOfRange: return "FieldOutOfRange";
  case ErrorCode::BadLength: return "BadLength";
  case ErrorCode::InputTooLong: return "InputTooLong";
  case ErrorCode::CorruptStream: return "CorruptStream";
  case ErrorCode::ContextUnavailable: return "ContextUnavailable";
  case ErrorCode::NoCapacity: return "NoCapacity";
  case ErrorCode::RangeViolation: return "RangeViolation";
  case ErrorCode::InconsistentState: return "InconsistentState";
  case ErrorCode::ImageTooSmall: return "ImageTooSmall";
  case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
  case ErrorCode::BadMagic: return "BadMagic";
  }
  return "Unknown";
}

GrayImage::GrayImage(int width, int height, int bit_depth)
    : GrayImage(width, height, bit_depth,
                std::vector<int>(static_cast<std::size_t>(width) *
                                     static_cast<std::size_t>(height),
                                 0)) {}

GrayImage::GrayImage(int width, int height, int bit_depth,
                     std::vector<int> samples)
    : width_(width), height_(height), bit_depth_(bit_depth),
      samples_(std::move(samples)) {
  if (width <= 0 || height <= 0)
    throw Error(ErrorCode::ShapeMismatch, "image dimensions must be positive");
  if (bit_depth < 1 || bit_depth > 16)
    throw Error(ErrorCode::SampleOutOfRange, "bit depth must be in [1, 16]");
  if (samples_.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::ShapeMismatch, "sample count does not match shape");
  const int maxv = max_value();
  for (int v : samples_)
    if (v < 0 || v > maxv)
      throw Error(ErrorCode::SampleOutOfRange,
                  "sample " + std::to_string(v) + " outside depth range");
}

void GrayImage::set(int row, int col, int value) {
  if (value < 0 || value > max_value())
    throw Error(ErrorCode::SampleOutOfRange,
                "sample " + std::to_string(value) + " outside depth range");
  samples_[index(row, col)] = value;
}

namespace {

class PgmTokenizer {
public:
  PgmTokenizer(const std::string &data, std::size_t start)
      : data_(data), pos_(start) {}

  // Reads one header/ASCII integer, skipping whitespace and '#' comments.
  long next_int(ErrorCode on_eof) {
    skip_space();
    if (pos_ >= data_.size())
      throw Error(on_eof, "unexpected end of PGM data");
    if (!std::isdigit(static_cast<unsigned char>(data_[pos_])))
      throw Error(ErrorCode::MalformedHeader,
                  "expected a decimal integer in PGM");
    long v = 0;
    while (pos_ < data_.size() &&
           std::isdigit(static_cast<unsigned char>(data_[pos_]))) {
      v = v * 10 + (data_[pos_] - '0');
      if (v > 1'000'000'000)
        throw Error(ErrorCode::MalformedHeader, "integer too large in PGM");
      ++pos_;
    }
    return v;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void consume_single_whitespace() {
    if (pos_ >= data_.size() ||
        !std::isspace(static_cast<unsigned char>(data_[pos_])))
      throw Error(ErrorCode::MalformedHeader, "missing raster separator");
    ++pos_;
  }

  std::size_t pos() const { return pos_; }

private:
  void skip_space() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n')
          ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string &data_;
  std::size_t pos_;
};

} // namespace

GrayImage load_pgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  if (data.size() < 2 || data[0] != 'P' || (data[1] != '5' && data[1] != '2'))
    throw Error(ErrorCode::MalformedHeader, "not a P2/P5 PGM file");
  const bool binary = data[1] == '5';

  PgmTokenizer tok(data, 2);
  const long width = tok.next_int(ErrorCode::MalformedHeader);
  const long height = tok.next_int(ErrorCode::MalformedHeader);
  const long maxval = tok.next_int(ErrorCode::MalformedHeader);
  if (width <= 0 || height <= 0)
    throw Error(ErrorCode::MalformedHeader, "PGM dimensions must be positive");
  if (maxval <= 0 || maxval > 65535)
    throw Error(ErrorCode::MalformedHeader, "PGM maxval must be in [1, 65535]");

  const int depth = maxval <= 255 ? 8 : 16;
  const std::size_t count =
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<int> samples(count);

  if (binary) {
    tok.consume_single_whitespace();
    const std::size_t bytes_per = maxval > 255 ? 2 : 1;
    const std::size_t start = tok.pos();
    if (data.size() - start < count * bytes_per)
      throw Error(ErrorCode::TruncatedData, "PGM raster shorter than w*h");
    const auto *raw = reinterpret_cast<const unsigned char *>(data.data()) + start;
    for (std::size_t i = 0; i < count; ++i) {
      samples[i] = bytes_per == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    }
  } else {
    for (std::size_t i = 0; i < count; ++i)
      samples[i] = static_cast<int>(tok.next_int(ErrorCode::TruncatedData));
  }
  for (int v : samples)
    if (v > maxval)
      throw Error(ErrorCode::SampleOutOfRange, "sample exceeds PGM maxval");
  return GrayImage(static_cast<int>(width), static_cast<int>(height), depth,
                   std::move(samples));
}

void store_pgm(const GrayImage &img, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  const int maxval = img.bit_depth() <= 8 ? 255 : 65535;
  out << "P5\n" << img.width() << ' ' << img.height() << '\n' << maxval << '\n';
  std::string raster;
  raster.reserve(img.size() * (maxval > 255 ? 2 : 1));
  for (int v : img.samples()) {
    if (maxval > 255)
      raster.push_back(static_cast<char>((v >> 8) & 0xFF));
    raster.push_back(static_cast<char>(v & 0xFF));
  }
  out.write(raster.data(), static_cast<std::streamsize>(raster.size()));
  if (!out)
    throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

std::int64_t squared_error(const GrayImage &a, const GrayImage &b) {
  if (a.width() != b.width() || a.height() != b.height() ||
      a.bit_depth() != b.bit_depth())
    throw Error(ErrorCode::ShapeMismatch, "images differ in shape or depth");
  std::int64_t sum = 0;
  const auto sa = a.samples();
  const auto sb = b.samples();
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const std::int64_t d = sa[i] - sb[i];
    sum += d * d;
  }
  return sum;
}

double mse(const GrayImage &a, const GrayImage &b) {
  return static_cast<double>(squared_error(a, b)) /
         static_cast<double>(a.size());
}

double psnr(const GrayImage &a, const GrayImage &b) {
  const double err = mse(a, b);
  if (err == 0.0)
    return kInfinitePsnr;
  const double peak = static_cast<double>(a.max_value());
  return 10.0 * std::log10(peak * peak / err);
}

GrayImage rotate90(const GrayImage &img) {
  const int h = img.height();
  const int w = img.width();
  std::vector<int> out(img.size());
  // Output is w rows by h columns.
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < h; ++j)
      out[static_cast<std::size_t>(i) * h + j] = img.at(h - 1 - j, i);
  return GrayImage(h, w, img.bit_depth(), std::move(out));
}

GrayImage rotate270(const GrayImage &img) {
  const int h = img.height();
  const int w = img.width();
  std::vector<int> out(img.size());
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < h; ++j)
      out[static_cast<std::size_t>(i) * h + j] = img.at(j, w - 1 - i);
  return GrayImage(h, w, img.bit_depth(), std::move(out));
}

} // namespace erdh
