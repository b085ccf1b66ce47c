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

#pragma once

#include <span>
#include <vector>

#include "smarthand/core/frame.hpp"

namespace smarthand::readout {

// Saturating-hyperbolic force-sensitive resistor:
//   R(f) = r_min + (r_open - r_min) / (1 + f / f0)
struct FsrLaw {
  double r_open_ohm = 50e3;
  double r_min_ohm = 500.0;
  double f0_newton = 1.0;

  // Throws OutOfRange if the parameters break r_min < r_open or are non-positive.
  void validate() const;
};

double resistance_from_force(const FsrLaw& law, double force_newton);

struct AdcModel {
  int bits = 12;
  double r_ref_ohm = 10e3;
  std::uint16_t full_scale = core::kAdcMax;
  // Series resistance added to every crossing (wiring); zero by default.
  double wire_ohm = 0.0;
};

struct ResistorGrid {
  core::Grid<double> resistance_ohm{};
  double r_open_ohm = 50e3;

  static ResistorGrid uniform(double r_ohm);
  double at(std::size_t row, std::size_t col) const { return resistance_ohm[core::taxel_index(row, col)]; }
  double& at(std::size_t row, std::size_t col) { return resistance_ohm[core::taxel_index(row, col)]; }
};

// Isolated: unselected electrodes are held so that no voltage appears across
// any other crossing on the sensed column; the only current into the sense
// node flows through R_ij, and the reading is the plain r_ref/R_ij divider.
// NonIsolated: unselected electrodes float and sneak paths through the rest
// of the crossbar add conductance in parallel with R_ij.
enum class ScanMode { Isolated, NonIsolated };

struct Press {
  std::size_t row = 0;
  std::size_t col = 0;
  double force_newton = 0.0;
};

// Builds a grid at r_open with the pressed crossings set from the law.
// Presses on the same crossing are merged by summing their forces.
ResistorGrid frame_from_press_map(std::span<const Press> presses, const FsrLaw& law);

// Divider code for a single current path through `r_ohm`:
//   round(full_scale * r_ref / (r_ref + r))
std::uint16_t divider_code(const AdcModel& adc, double r_ohm);

// Converts a normalized sense voltage (0..1 of the drive) into a clamped ADC code.
std::uint16_t quantize(const AdcModel& adc, double v_norm);

struct NodalSolution {
  double sense_voltage = 0.0;     // normalized to the drive voltage
  double residual_inf = 0.0;      // ||G v - i||_inf / ||i||_inf
};

// Solves the floating-electrode network with row `row` driven at 1 V and
// column `col` returned to ground through r_ref. Every other electrode floats.
// Throws SingularNetwork for non-positive or non-finite resistances or a
// numerically singular system.
NodalSolution solve_nonisolated(const ResistorGrid& grid, const AdcModel& adc, std::size_t row, std::size_t col);

namespace serial {
core::TactileFrame scan(const ResistorGrid& grid, const AdcModel& adc, ScanMode mode);
}  // namespace serial

// OpenMP variant: per-crossing solves are independent; output is identical to serial::scan.
core::TactileFrame scan(const ResistorGrid& grid, const AdcModel& adc, ScanMode mode);

// Mean absolute code difference over masked taxels.
double ghost_error(const core::TactileFrame& reference, const core::TactileFrame& measured,
                   const core::HandMask& mask);

}  // namespace smarthand::readout
