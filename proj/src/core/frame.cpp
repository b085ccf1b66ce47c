/* Copyright 2026 The SmartHand Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "smarthand/core/frame.hpp"

#include <algorithm>

#include "smarthand/error.hpp"

namespace smarthand::core {

bool TactileFrame::in_range() const {
  return std::all_of(values.begin(), values.end(), [](std::uint16_t v) { return v <= kAdcMax; });
}

HandMask HandMask::from_grid(const Grid<bool>& active) {
  HandMask mask;
  mask.active_ = active;
  for (std::size_t i = 0; i < kTaxels; ++i)
    if (active[i]) mask.indices_.push_back(i);
  if (mask.indices_.size() != kHandTaxels) throw MaskCountMismatch(mask.indices_.size());
  return mask;
}

void validate(const Recording& rec) {
  if (rec.label_id >= kClassCount)
    throw Error(ErrorKind::FileFormat, "label " + std::to_string(rec.label_id) + " out of range");
  if (rec.session_id >= kSessionCount)
    throw Error(ErrorKind::FileFormat, "session " + std::to_string(rec.session_id) + " out of range");
  for (std::size_t i = 0; i < rec.frames.size(); ++i) {
    if (!rec.frames[i].in_range()) throw Error(ErrorKind::FileFormat, "frame code above 4095");
    if (i > 0 && rec.frames[i].seq <= rec.frames[i - 1].seq)
      throw Error(ErrorKind::FileFormat, "frame sequence numbers not strictly increasing");
  }
}

}  // namespace smarthand::core
