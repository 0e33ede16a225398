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

#ifndef ADVOCR_RENDER_H_
#define ADVOCR_RENDER_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <span>
#include <vector>

#include "advocr/image.h"

namespace advocr {

// Monospaced 8x16 bitmap font covering printable ASCII (0x20-0x7e). Each
// glyph row is one byte, most significant bit leftmost.
class BitmapFont {
 public:
  static constexpr std::size_t kGlyphWidth = 8;
  static constexpr std::size_t kGlyphHeight = 16;
  using Glyph = std::array<std::uint8_t, kGlyphHeight>;

  std::size_t glyph_width() const { return kGlyphWidth; }
  std::size_t glyph_height() const { return kGlyphHeight; }
  bool HasGlyph(char c) const { return c >= 0x20 && c <= 0x7e; }
  // Throws InvalidArgument when the character has no glyph.
  const Glyph& glyph(char c) const;

  // One line per glyph: the character code in hex followed by 16 row bytes.
  std::string HexTable() const;
};

// The font compiled into the library.
const BitmapFont& EmbeddedFont();

inline constexpr std::size_t kDefaultPadding = 4;

// Ink -1 on background +1. The line is glyph_height + 2*padding rows by
// len(text)*glyph_width + 2*padding columns.
Image RenderLine(std::string_view text, const BitmapFont& font = EmbeddedFont(),
                 std::size_t padding = kDefaultPadding);

// Half-open pixel rectangle [top, bottom) x [left, right).
struct LineBox {
  std::size_t top = 0;
  std::size_t bottom = 0;
  std::size_t left = 0;
  std::size_t right = 0;

  std::size_t height() const { return bottom - top; }
  std::size_t width() const { return right - left; }
  bool operator==(const LineBox&) const = default;
};

struct RenderedDocument {
  Image image;
  // One box per input line covering exactly its RenderLine image.
  std::vector<LineBox> boxes;
};

struct DocumentLayout {
  std::size_t line_spacing = 2;
  std::size_t margin = 4;
  std::size_t padding = kDefaultPadding;
};

// Lines are stacked top to bottom, left-aligned inside the margin.
RenderedDocument RenderDocument(std::span<const std::string> lines,
                                const BitmapFont& font = EmbeddedFont(),
                                const DocumentLayout& layout = {});

Image Crop(const Image& image, const LineBox& box);
void Paste(Image& dst, const Image& src, const LineBox& box);

// Shrinks a box to the rows and columns that contain ink (< threshold).
// Returns false when the box holds no ink.
bool TrimToInk(const Image& image, LineBox& box, double ink_threshold = 0.0);

struct SegmentOptions {
  double ink_threshold = 0.0;
  // Ink runs separated by at most this many blank rows belong to one line
  // (dots over i/j, colons).
  std::size_t max_gap = 3;
};

// Horizontal projection profile segmentation. Boxes are trimmed to ink and
// ordered top to bottom; an image with no ink yields no boxes.
std::vector<LineBox> SegmentLines(const Image& doc,
                                  const SegmentOptions& options = {});

// Binary PGM (P5) with maxval 255; pixel = round((v + 1) * 127.5).
std::string EncodePgm(const Image& image);
Image DecodePgm(std::string_view bytes);
void WritePgm(const std::string& path, const Image& image);
Image ReadPgm(const std::string& path);

}  // namespace advocr

#endif  // ADVOCR_RENDER_H_
