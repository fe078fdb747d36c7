// Copyright 2026 The vpattack Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Built-in monospace bitmap font: printable ASCII 0x20..0x7E, 8x14 cells.
// Rasterized once from DejaVu Sans Mono Bold (Bitstream Vera license) at
// 12 px and thresholded, so sign rendering never depends on system fonts.

#include <array>
#include <cstdint>
#include <optional>

namespace vpattack::font {

inline constexpr int kGlyphWidth = 8;
inline constexpr int kGlyphHeight = 14;
inline constexpr char kFirst = 0x20;
inline constexpr char kLast = 0x7E;

using GlyphRows = std::array<std::uint8_t, kGlyphHeight>;

// Bit 7 of each row is the leftmost pixel.
inline constexpr std::array<GlyphRows, kLast - kFirst + 1> kGlyphs{{
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x20 space
    {0x00, 0x00, 0x00, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x00, 0x10, 0x10, 0x00, 0x00},  // 0x21 !
    {0x00, 0x00, 0x00, 0x6C, 0x6C, 0x6C, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x22 "
    {0x00, 0x00, 0x00, 0x00, 0x16, 0x34, 0x7E, 0x2C, 0x2C, 0xFE, 0x48, 0x58, 0x00, 0x00},  // 0x23 #
    {0x00, 0x00, 0x00, 0x10, 0x3C, 0x74, 0x70, 0x38, 0x1C, 0x14, 0x5C, 0x3C, 0x10, 0x10},  // 0x24 $
    {0x00, 0x00, 0x00, 0x60, 0xD0, 0xD0, 0x66, 0x18, 0x4C, 0x1A, 0x1A, 0x0C, 0x00, 0x00},  // 0x25 %
    {0x00, 0x00, 0x00, 0x38, 0x60, 0x60, 0x70, 0x7A, 0xDA, 0xCE, 0x6C, 0x7E, 0x00, 0x00},  // 0x26 &
    {0x00, 0x00, 0x00, 0x10, 0x10, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x27 '
    {0x00, 0x00, 0x08, 0x18, 0x10, 0x30, 0x30, 0x30, 0x30, 0x30, 0x10, 0x18, 0x08, 0x00},  // 0x28 (
    {0x00, 0x00, 0x30, 0x30, 0x10, 0x18, 0x18, 0x18, 0x18, 0x18, 0x10, 0x30, 0x30, 0x00},  // 0x29 )
    {0x00, 0x00, 0x00, 0x10, 0x54, 0x3C, 0x3C, 0x54, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x2A *
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x10, 0x10, 0xFE, 0x10, 0x10, 0x10, 0x00, 0x00},  // 0x2B +
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x30, 0x30},  // 0x2C ,
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x3C, 0x3C, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x2D -
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00},  // 0x2E .
    {0x00, 0x00, 0x00, 0x04, 0x04, 0x08, 0x08, 0x18, 0x10, 0x30, 0x20, 0x60, 0x40, 0x00},  // 0x2F /
    {0x00, 0x00, 0x00, 0x38, 0x6C, 0x64, 0x66, 0x76, 0x66, 0x64, 0x6C, 0x38, 0x00, 0x00},  // 0x30 0
    {0x00, 0x00, 0x00, 0x78, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7E, 0x00, 0x00},  // 0x31 1
    {0x00, 0x00, 0x00, 0x38, 0x4C, 0x0C, 0x0C, 0x1C, 0x18, 0x30, 0x60, 0x7C, 0x00, 0x00},  // 0x32 2
    {0x00, 0x00, 0x00, 0x38, 0x4C, 0x0C, 0x0C, 0x38, 0x0C, 0x04, 0x4C, 0x78, 0x00, 0x00},  // 0x33 3
    {0x00, 0x00, 0x00, 0x0C, 0x1C, 0x3C, 0x2C, 0x6C, 0x4C, 0x7E, 0x0C, 0x0C, 0x00, 0x00},  // 0x34 4
    {0x00, 0x00, 0x00, 0x7C, 0x60, 0x60, 0x78, 0x0C, 0x04, 0x04, 0x4C, 0x38, 0x00, 0x00},  // 0x35 5
    {0x00, 0x00, 0x00, 0x3C, 0x64, 0x60, 0x7C, 0x6C, 0x66, 0x66, 0x6C, 0x38, 0x00, 0x00},  // 0x36 6
    {0x00, 0x00, 0x00, 0x7C, 0x0C, 0x0C, 0x1C, 0x18, 0x18, 0x30, 0x30, 0x30, 0x00, 0x00},  // 0x37 7
    {0x00, 0x00, 0x00, 0x38, 0x6C, 0x64, 0x6C, 0x38, 0x6C, 0x44, 0x6C, 0x3C, 0x00, 0x00},  // 0x38 8
    {0x00, 0x00, 0x00, 0x38, 0x6C, 0x4C, 0x4C, 0x6E, 0x3C, 0x04, 0x4C, 0x38, 0x00, 0x00},  // 0x39 9
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00},  // 0x3A :
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x18, 0x00, 0x00, 0x18, 0x18, 0x30, 0x30},  // 0x3B ;
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x06, 0x1C, 0x70, 0x70, 0x1C, 0x06, 0x00, 0x00, 0x00},  // 0x3C <
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xFE, 0x00, 0xFE, 0x00, 0x00, 0x00, 0x00},  // 0x3D =
    {0x00, 0x00, 0x00, 0x00, 0x00, 0xC0, 0x78, 0x1E, 0x0E, 0x78, 0xC0, 0x00, 0x00, 0x00},  // 0x3E >
    {0x00, 0x00, 0x00, 0x3C, 0x4C, 0x0C, 0x18, 0x10, 0x10, 0x00, 0x10, 0x10, 0x00, 0x00},  // 0x3F ?
    {0x00, 0x00, 0x00, 0x00, 0x3C, 0x66, 0xDE, 0xB6, 0xB2, 0xB2, 0xF6, 0xDE, 0x60, 0x3C},  // 0x40 @
    {0x00, 0x00, 0x00, 0x38, 0x38, 0x38, 0x2C, 0x6C, 0x7C, 0x44, 0x46, 0xC6, 0x00, 0x00},  // 0x41 A
    {0x00, 0x00, 0x00, 0x7C, 0x4C, 0x46, 0x4C, 0x7C, 0x46, 0x46, 0x46, 0x7C, 0x00, 0x00},  // 0x42 B
    {0x00, 0x00, 0x00, 0x1C, 0x30, 0x60, 0x60, 0x60, 0x60, 0x60, 0x30, 0x1C, 0x00, 0x00},  // 0x43 C
    {0x00, 0x00, 0x00, 0x78, 0x6C, 0x66, 0x66, 0x66, 0x66, 0x66, 0x6C, 0x78, 0x00, 0x00},  // 0x44 D
    {0x00, 0x00, 0x00, 0x7E, 0x60, 0x60, 0x60, 0x7C, 0x60, 0x60, 0x60, 0x7E, 0x00, 0x00},  // 0x45 E
    {0x00, 0x00, 0x00, 0x7E, 0x60, 0x60, 0x60, 0x7C, 0x60, 0x60, 0x60, 0x60, 0x00, 0x00},  // 0x46 F
    {0x00, 0x00, 0x00, 0x3C, 0x60, 0x60, 0x60, 0x60, 0x6E, 0x66, 0x66, 0x3C, 0x00, 0x00},  // 0x47 G
    {0x00, 0x00, 0x00, 0x64, 0x64, 0x64, 0x64, 0x7C, 0x64, 0x64, 0x64, 0x64, 0x00, 0x00},  // 0x48 H
    {0x00, 0x00, 0x00, 0x7C, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7C, 0x00, 0x00},  // 0x49 I
    {0x00, 0x00, 0x00, 0x3C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x0C, 0x78, 0x00, 0x00},  // 0x4A J
    {0x00, 0x00, 0x00, 0x46, 0x4C, 0x78, 0x78, 0x78, 0x78, 0x4C, 0x4C, 0x46, 0x00, 0x00},  // 0x4B K
    {0x00, 0x00, 0x00, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x60, 0x7E, 0x00, 0x00},  // 0x4C L
    {0x00, 0x00, 0x00, 0xEE, 0xEE, 0xEE, 0xFE, 0xDE, 0xD6, 0xC6, 0xC6, 0xC6, 0x00, 0x00},  // 0x4D M
    {0x00, 0x00, 0x00, 0x66, 0x66, 0x76, 0x76, 0x56, 0x5E, 0x4E, 0x4E, 0x4E, 0x00, 0x00},  // 0x4E N
    {0x00, 0x00, 0x00, 0x38, 0x6C, 0x66, 0x46, 0xC6, 0x46, 0x66, 0x6C, 0x38, 0x00, 0x00},  // 0x4F O
    {0x00, 0x00, 0x00, 0x7C, 0x66, 0x66, 0x66, 0x7C, 0x60, 0x60, 0x60, 0x60, 0x00, 0x00},  // 0x50 P
    {0x00, 0x00, 0x00, 0x38, 0x6C, 0x66, 0x46, 0xC6, 0x46, 0x66, 0x6C, 0x3C, 0x0C, 0x00},  // 0x51 Q
    {0x00, 0x00, 0x00, 0x7C, 0x6C, 0x64, 0x6C, 0x78, 0x6C, 0x6C, 0x66, 0x66, 0x00, 0x00},  // 0x52 R
    {0x00, 0x00, 0x00, 0x38, 0x64, 0x60, 0x70, 0x3C, 0x0C, 0x06, 0x4C, 0x38, 0x00, 0x00},  // 0x53 S
    {0x00, 0x00, 0x00, 0xFE, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00},  // 0x54 T
    {0x00, 0x00, 0x00, 0x46, 0x46, 0x46, 0x46, 0x46, 0x46, 0x46, 0x6C, 0x3C, 0x00, 0x00},  // 0x55 U
    {0x00, 0x00, 0x00, 0xC6, 0x46, 0x64, 0x6C, 0x6C, 0x2C, 0x38, 0x38, 0x38, 0x00, 0x00},  // 0x56 V
    {0x00, 0x00, 0x00, 0xC2, 0xC2, 0xD6, 0xDE, 0xFE, 0x6E, 0x6E, 0x6C, 0x6C, 0x00, 0x00},  // 0x57 W
    {0x00, 0x00, 0x00, 0xC6, 0x6C, 0x3C, 0x38, 0x18, 0x38, 0x7C, 0x6C, 0xC6, 0x00, 0x00},  // 0x58 X
    {0x00, 0x00, 0x00, 0xC6, 0x64, 0x6C, 0x3C, 0x38, 0x18, 0x18, 0x18, 0x18, 0x00, 0x00},  // 0x59 Y
    {0x00, 0x00, 0x00, 0x7E, 0x0E, 0x0C, 0x1C, 0x38, 0x30, 0x70, 0x60, 0x7E, 0x00, 0x00},  // 0x5A Z
    {0x00, 0x00, 0x3C, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x3C, 0x00},  // 0x5B [
    {0x00, 0x00, 0x00, 0x40, 0x60, 0x20, 0x30, 0x10, 0x18, 0x08, 0x08, 0x0C, 0x04, 0x00},  // 0x5C backslash
    {0x00, 0x00, 0x38, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x38, 0x00},  // 0x5D ]
    {0x00, 0x00, 0x00, 0x38, 0x3C, 0x46, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x5E ^
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x5F _
    {0x00, 0x00, 0x20, 0x10, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // 0x60 `
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x7C, 0x04, 0x06, 0x7E, 0x66, 0x6E, 0x7E, 0x00, 0x00},  // 0x61 a
    {0x00, 0x00, 0x60, 0x60, 0x60, 0x7C, 0x6C, 0x66, 0x66, 0x66, 0x6C, 0x7C, 0x00, 0x00},  // 0x62 b
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x3C, 0x60, 0x60, 0x60, 0x60, 0x60, 0x3C, 0x00, 0x00},  // 0x63 c
    {0x00, 0x00, 0x04, 0x04, 0x04, 0x3C, 0x6C, 0x4C, 0xC4, 0x4C, 0x6C, 0x3C, 0x00, 0x00},  // 0x64 d
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x6C, 0x46, 0x7E, 0x40, 0x60, 0x3C, 0x00, 0x00},  // 0x65 e
    {0x00, 0x00, 0x1C, 0x18, 0x10, 0x7C, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x00, 0x00},  // 0x66 f
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x3C, 0x6C, 0x44, 0x44, 0x44, 0x6C, 0x3C, 0x04, 0x4C},  // 0x67 g
    {0x00, 0x00, 0x60, 0x60, 0x60, 0x7C, 0x6C, 0x64, 0x64, 0x64, 0x64, 0x64, 0x00, 0x00},  // 0x68 h
    {0x00, 0x00, 0x18, 0x18, 0x00, 0x78, 0x18, 0x18, 0x18, 0x18, 0x18, 0x7E, 0x00, 0x00},  // 0x69 i
    {0x00, 0x00, 0x18, 0x18, 0x00, 0x78, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18, 0x18},  // 0x6A j
    {0x00, 0x00, 0x60, 0x60, 0x60, 0x6C, 0x7C, 0x78, 0x78, 0x6C, 0x6C, 0x66, 0x00, 0x00},  // 0x6B k
    {0x00, 0x00, 0xF0, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x30, 0x1C, 0x00, 0x00},  // 0x6C l
    {0x00, 0x00, 0x00, 0x00, 0x00, 0xFC, 0xD6, 0xD6, 0xD6, 0xD6, 0xD6, 0xD6, 0x00, 0x00},  // 0x6D m
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x7C, 0x6C, 0x64, 0x64, 0x64, 0x64, 0x64, 0x00, 0x00},  // 0x6E n
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x6C, 0x46, 0x46, 0x46, 0x6C, 0x38, 0x00, 0x00},  // 0x6F o
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x7C, 0x6C, 0x66, 0x66, 0x66, 0x6C, 0x7C, 0x60, 0x60},  // 0x70 p
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x3C, 0x6C, 0x4C, 0xC4, 0x4C, 0x6C, 0x3C, 0x04, 0x04},  // 0x71 q
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x3E, 0x30, 0x30, 0x20, 0x20, 0x20, 0x20, 0x00, 0x00},  // 0x72 r
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x38, 0x64, 0x60, 0x3C, 0x0C, 0x4C, 0x3C, 0x00, 0x00},  // 0x73 s
    {0x00, 0x00, 0x00, 0x30, 0x30, 0x7C, 0x30, 0x30, 0x30, 0x30, 0x30, 0x1C, 0x00, 0x00},  // 0x74 t
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x6C, 0x6C, 0x6C, 0x6C, 0x6C, 0x6C, 0x7C, 0x00, 0x00},  // 0x75 u
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x46, 0x64, 0x6C, 0x6C, 0x38, 0x38, 0x38, 0x00, 0x00},  // 0x76 v
    {0x00, 0x00, 0x00, 0x00, 0x00, 0xC2, 0xC2, 0xD6, 0x5E, 0x7E, 0x6C, 0x6C, 0x00, 0x00},  // 0x77 w
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x6C, 0x6C, 0x38, 0x18, 0x38, 0x6C, 0x66, 0x00, 0x00},  // 0x78 x
    {0x00, 0x00, 0x00, 0x00, 0x00, 0xC6, 0x64, 0x6C, 0x2C, 0x3C, 0x38, 0x18, 0x18, 0x30},  // 0x79 y
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x7C, 0x0C, 0x1C, 0x38, 0x30, 0x60, 0x7C, 0x00, 0x00},  // 0x7A z
    {0x00, 0x00, 0x1C, 0x18, 0x18, 0x10, 0x30, 0x70, 0x30, 0x10, 0x18, 0x18, 0x1C, 0x00},  // 0x7B {
    {0x00, 0x00, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x10},  // 0x7C |
    {0x00, 0x00, 0x70, 0x10, 0x10, 0x10, 0x18, 0x1C, 0x18, 0x10, 0x10, 0x10, 0x70, 0x00},  // 0x7D }
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x72, 0x1C, 0x00, 0x00, 0x00, 0x00},  // 0x7E ~
}};

inline bool has_glyph(char c) noexcept { return c >= kFirst && c <= kLast; }

inline std::optional<GlyphRows> glyph(char c) noexcept {
    if (!has_glyph(c)) {
        return std::nullopt;
    }
    return kGlyphs[static_cast<std::size_t>(c - kFirst)];
}

inline bool glyph_bit(const GlyphRows& g, int col, int row) noexcept {
    return ((g[static_cast<std::size_t>(row)] >> (kGlyphWidth - 1 - col)) & 1U) != 0;
}

}  // namespace vpattack::font
