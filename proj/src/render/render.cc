// Copyright 2026 The advocr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "advocr/error.h"
#include "advocr/image.h"
#include "advocr/render.h"

namespace advocr {

namespace font_data {
extern const std::array<std::array<std::uint8_t, 16>, 95> kGlyphs;
}  // namespace font_data

Image::Image(std::size_t height, std::size_t width, double fill)
    : height_(height), width_(width), pixels_(height * width, fill) {}

Image::Image(std::size_t height, std::size_t width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (pixels_.size() != height_ * width_) {
    throw ShapeError("image", std::to_string(height_) + "x" +
                                  std::to_string(width_) + " image given " +
                                  std::to_string(pixels_.size()) + " pixels");
  }
}

Tensor Image::ToTensor() const { return Tensor({height_, width_}, pixels_); }

Image Image::FromTensor(const Tensor& t) {
  if (t.rank() != 2) {
    throw ShapeError("image", "tensor must be [h, w], got " +
                                  ShapeToString(t.shape()));
  }
  return Image(t.dim(0), t.dim(1), t.values());
}

double L2Distance(const Image& a, const Image& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw ShapeError("l2", std::to_string(a.height()) + "x" +
                               std::to_string(a.width()) + " vs " +
                               std::to_string(b.height()) + "x" +
                               std::to_string(b.width()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    total += d * d;
  }
  return std::sqrt(total);
}

const BitmapFont::Glyph& BitmapFont::glyph(char c) const {
  if (!HasGlyph(c)) {
    throw InvalidArgument("no glyph for character code " +
                          std::to_string(static_cast<unsigned char>(c)));
  }
  return font_data::kGlyphs[static_cast<std::size_t>(c - 0x20)];
}

std::string BitmapFont::HexTable() const {
  std::ostringstream out;
  out << "# advocr embedded font: 8x16 cells, printable ASCII 0x20-0x7e\n"
      << "# columns: code, then 16 row bytes top to bottom (bit 7 = left)\n";
  char buf[8];
  for (int c = 0x20; c <= 0x7e; ++c) {
    std::snprintf(buf, sizeof(buf), "%02x", c);
    out << buf;
    for (std::uint8_t row : glyph(static_cast<char>(c))) {
      std::snprintf(buf, sizeof(buf), " %02x", row);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

const BitmapFont& EmbeddedFont() {
  static const BitmapFont font;
  return font;
}

Image RenderLine(std::string_view text, const BitmapFont& font,
                 std::size_t padding) {
  std::string missing;
  for (char c : text) {
    if (!font.HasGlyph(c) && missing.find(c) == std::string::npos) missing += c;
  }
  if (!missing.empty()) {
    throw InvalidArgument("no glyph for characters: \"" + missing + "\"");
  }
  const std::size_t gw = font.glyph_width(), gh = font.glyph_height();
  Image img(gh + 2 * padding, text.size() * gw + 2 * padding, 1.0);
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto& g = font.glyph(text[i]);
    for (std::size_t r = 0; r < gh; ++r) {
      for (std::size_t c = 0; c < gw; ++c) {
        if (g[r] & (0x80u >> c)) img.at(padding + r, padding + i * gw + c) = -1.0;
      }
    }
  }
  return img;
}

RenderedDocument RenderDocument(std::span<const std::string> lines,
                                const BitmapFont& font,
                                const DocumentLayout& layout) {
  std::vector<Image> rendered;
  std::size_t width = 0, height = 2 * layout.margin;
  for (const std::string& line : lines) {
    rendered.push_back(RenderLine(line, font, layout.padding));
    width = std::max(width, rendered.back().width());
    height += rendered.back().height();
  }
  if (!lines.empty()) height += layout.line_spacing * (lines.size() - 1);
  RenderedDocument doc;
  doc.image = Image(height, std::max<std::size_t>(width + 2 * layout.margin, 1));
  std::size_t top = layout.margin;
  for (const Image& line : rendered) {
    const LineBox box{top, top + line.height(), layout.margin,
                      layout.margin + line.width()};
    Paste(doc.image, line, box);
    doc.boxes.push_back(box);
    top += line.height() + layout.line_spacing;
  }
  return doc;
}

Image Crop(const Image& image, const LineBox& box) {
  if (box.bottom > image.height() || box.right > image.width() ||
      box.top >= box.bottom || box.left >= box.right) {
    throw ShapeError("crop", "box rows [" + std::to_string(box.top) + ", " +
                                 std::to_string(box.bottom) + ") cols [" +
                                 std::to_string(box.left) + ", " +
                                 std::to_string(box.right) +
                                 ") outside image " +
                                 std::to_string(image.height()) + "x" +
                                 std::to_string(image.width()));
  }
  Image out(box.height(), box.width());
  for (std::size_t r = 0; r < box.height(); ++r) {
    for (std::size_t c = 0; c < box.width(); ++c) {
      out.at(r, c) = image.at(box.top + r, box.left + c);
    }
  }
  return out;
}

void Paste(Image& dst, const Image& src, const LineBox& box) {
  if (box.height() != src.height() || box.width() != src.width() ||
      box.bottom > dst.height() || box.right > dst.width()) {
    throw ShapeError("paste", "source " + std::to_string(src.height()) + "x" +
                                  std::to_string(src.width()) +
                                  " does not fit box");
  }
  for (std::size_t r = 0; r < src.height(); ++r) {
    for (std::size_t c = 0; c < src.width(); ++c) {
      dst.at(box.top + r, box.left + c) = src.at(r, c);
    }
  }
}

bool TrimToInk(const Image& image, LineBox& box, double ink_threshold) {
  std::size_t top = box.bottom, bottom = box.top, left = box.right,
              right = box.left;
  for (std::size_t r = box.top; r < box.bottom; ++r) {
    for (std::size_t c = box.left; c < box.right; ++c) {
      if (image.at(r, c) < ink_threshold) {
        top = std::min(top, r);
        bottom = std::max(bottom, r + 1);
        left = std::min(left, c);
        right = std::max(right, c + 1);
      }
    }
  }
  if (top >= bottom) return false;
  box = LineBox{top, bottom, left, right};
  return true;
}

std::vector<LineBox> SegmentLines(const Image& doc,
                                  const SegmentOptions& options) {
  std::vector<bool> inked(doc.height(), false);
  for (std::size_t r = 0; r < doc.height(); ++r) {
    for (std::size_t c = 0; c < doc.width(); ++c) {
      if (doc.at(r, c) < options.ink_threshold) {
        inked[r] = true;
        break;
      }
    }
  }
  std::vector<LineBox> boxes;
  std::size_t r = 0;
  while (r < doc.height()) {
    if (!inked[r]) {
      ++r;
      continue;
    }
    const std::size_t top = r;
    std::size_t bottom = r + 1;
    std::size_t scan = bottom;
    while (scan < doc.height()) {
      if (inked[scan]) {
        bottom = ++scan;
      } else if (scan - bottom < options.max_gap) {
        ++scan;
      } else {
        break;
      }
    }
    LineBox box{top, bottom, 0, doc.width()};
    TrimToInk(doc, box, options.ink_threshold);
    boxes.push_back(box);
    r = bottom;
  }
  return boxes;
}

std::string EncodePgm(const Image& image) {
  std::string out = "P5\n" + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  out.reserve(out.size() + image.size());
  for (double v : image.pixels()) {
    const double q = std::round((v + 1.0) * 127.5);
    out.push_back(static_cast<char>(
        static_cast<unsigned char>(std::clamp(q, 0.0, 255.0))));
  }
  return out;
}

namespace {

// Reads the next whitespace-delimited header token, skipping comments.
std::string NextToken(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  std::string token;
  while (pos < bytes.size() &&
         !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    token += bytes[pos++];
  }
  return token;
}

std::size_t ParsePositive(const std::string& token, const char* what) {
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      token.size() > 9) {
    throw FormatError(std::string("PGM header: bad ") + what + " '" + token +
                      "'");
  }
  const std::size_t v = std::stoul(token);
  if (v == 0) throw FormatError(std::string("PGM header: zero ") + what);
  return v;
}

}  // namespace

Image DecodePgm(std::string_view bytes) {
  std::size_t pos = 0;
  if (NextToken(bytes, pos) != "P5") {
    throw FormatError("not a binary PGM (P5) file");
  }
  const std::size_t width = ParsePositive(NextToken(bytes, pos), "width");
  const std::size_t height = ParsePositive(NextToken(bytes, pos), "height");
  const std::size_t maxval = ParsePositive(NextToken(bytes, pos), "maxval");
  if (maxval > 255) throw FormatError("PGM maxval above 255 is unsupported");
  if (pos >= bytes.size() ||
      !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw FormatError("PGM header not terminated by whitespace");
  }
  ++pos;
  if (bytes.size() - pos < width * height) {
    throw FormatError("PGM raster truncated: expected " +
                      std::to_string(width * height) + " bytes");
  }
  Image img(height, width);
  for (std::size_t i = 0; i < width * height; ++i) {
    const auto p = static_cast<unsigned char>(bytes[pos + i]);
    img.pixels()[i] = 2.0 * static_cast<double>(p) / static_cast<double>(maxval) - 1.0;
  }
  return img;
}

void WritePgm(const std::string& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path + " for writing");
  const std::string bytes = EncodePgm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path);
}

Image ReadPgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return DecodePgm(buf.str());
}

}  // namespace advocr
