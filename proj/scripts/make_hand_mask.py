#!/usr/bin/env python3
# Copyright 2026 The SmartHand Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes data/hand_mask.shmk: a hand-shaped 32x32 layout with 548 crossings."""
import struct
import sys
import zlib

TARGET = 548


def hand_grid():
    g = [[0] * 32 for _ in range(32)]

    def fill(r0, r1, c0, c1):
        for r in range(r0, r1):
            for c in range(c0, c1):
                g[r][c] = 1

    fill(17, 32, 8, 28)           # palm
    fill(3, 17, 8, 12)            # index
    fill(0, 17, 13, 17)           # middle
    fill(1, 17, 18, 22)           # ring
    fill(5, 17, 23, 27)           # little
    for i, r in enumerate(range(14, 27)):  # thumb, slanted
        c0 = max(0, 5 - i // 3)
        fill(r, r + 1, c0, c0 + 4)
    return g


def main(out):
    g = hand_grid()
    count = sum(map(sum, g))
    # Trim palm corners (bottom rows, outer columns first) down to the target.
    order = [(r, c) for r in range(31, 16, -1) for c in (8, 27, 9, 26)]
    for r, c in order:
        if count <= TARGET:
            break
        if g[r][c]:
            g[r][c] = 0
            count -= 1
    assert count == TARGET, count
    body = b"SHMK" + bytes(v for row in g for v in row)
    with open(out, "wb") as f:
        f.write(body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF))
    for row in g:
        print("".join("#" if v else "." for v in row))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/hand_mask.shmk")
