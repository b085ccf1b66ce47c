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

#include "smarthand/readout/readout.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "smarthand/error.hpp"

namespace smarthand::readout {
namespace {

constexpr std::size_t kNodes = core::kRows + core::kCols;
constexpr double kMinRcond = 1e-13;

void check_grid(const ResistorGrid& grid, const AdcModel& adc) {
  for (double r : grid.resistance_ohm)
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorKind::SingularNetwork, "crossing resistance must be positive and finite");
  if (!(adc.r_ref_ohm > 0.0) || !std::isfinite(adc.r_ref_ohm))
    throw Error(ErrorKind::SingularNetwork, "reference resistance must be positive and finite");
  if (adc.wire_ohm < 0.0) throw Error(ErrorKind::OutOfRange, "wire resistance must be non-negative");
}

std::uint16_t scan_one(const ResistorGrid& grid, const AdcModel& adc, ScanMode mode, std::size_t row,
                       std::size_t col) {
  if (mode == ScanMode::Isolated) return divider_code(adc, grid.at(row, col) + adc.wire_ohm);
  return quantize(adc, solve_nonisolated(grid, adc, row, col).sense_voltage);
}

}  // namespace

void FsrLaw::validate() const {
  if (!(r_min_ohm > 0.0) || !(r_open_ohm > r_min_ohm) || !(f0_newton > 0.0) || !std::isfinite(r_open_ohm))
    throw Error(ErrorKind::OutOfRange, "FSR law needs 0 < r_min < r_open and f0 > 0");
}

double resistance_from_force(const FsrLaw& law, double force_newton) {
  law.validate();
  if (force_newton < 0.0 || std::isnan(force_newton)) throw Error(ErrorKind::NegativeForce, "force must be >= 0");
  if (std::isinf(force_newton)) return law.r_min_ohm;
  return law.r_min_ohm + (law.r_open_ohm - law.r_min_ohm) / (1.0 + force_newton / law.f0_newton);
}

ResistorGrid ResistorGrid::uniform(double r_ohm) {
  ResistorGrid g;
  g.resistance_ohm.fill(r_ohm);
  g.r_open_ohm = r_ohm;
  return g;
}

ResistorGrid frame_from_press_map(std::span<const Press> presses, const FsrLaw& law) {
  law.validate();
  std::map<std::size_t, double> force;
  for (const auto& p : presses) {
    if (p.row >= core::kRows || p.col >= core::kCols) throw Error(ErrorKind::OutOfRange, "press outside 32x32 grid");
    if (p.force_newton < 0.0 || std::isnan(p.force_newton)) throw Error(ErrorKind::NegativeForce, "force must be >= 0");
    force[core::taxel_index(p.row, p.col)] += p.force_newton;
  }
  auto grid = ResistorGrid::uniform(law.r_open_ohm);
  for (const auto& [idx, f] : force) grid.resistance_ohm[idx] = resistance_from_force(law, f);
  return grid;
}

std::uint16_t quantize(const AdcModel& adc, double v_norm) {
  const double code = std::round(v_norm * adc.full_scale);
  return static_cast<std::uint16_t>(std::clamp(code, 0.0, static_cast<double>(adc.full_scale)));
}

std::uint16_t divider_code(const AdcModel& adc, double r_ohm) {
  return quantize(adc, adc.r_ref_ohm / (adc.r_ref_ohm + r_ohm));
}

NodalSolution solve_nonisolated(const ResistorGrid& grid, const AdcModel& adc, std::size_t row, std::size_t col) {
  if (row >= core::kRows || col >= core::kCols) throw Error(ErrorKind::OutOfRange, "scan position outside grid");
  check_grid(grid, adc);

  // Node numbering: rows 0..31, columns 32..63. The driven row is a fixed
  // potential and drops out of the unknowns.
  constexpr int kUnknowns = static_cast<int>(kNodes) - 1;
  const auto unknown = [row](std::size_t node) { return static_cast<int>(node < row ? node : node - 1); };

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(kUnknowns, kUnknowns);
  Eigen::VectorXd src = Eigen::VectorXd::Zero(kUnknowns);
  constexpr double kDrive = 1.0;

  for (std::size_t r = 0; r < core::kRows; ++r) {
    for (std::size_t c = 0; c < core::kCols; ++c) {
      const double cond = 1.0 / (grid.at(r, c) + adc.wire_ohm);
      const int b = unknown(core::kRows + c);
      g(b, b) += cond;
      if (r == row) {
        src(b) += cond * kDrive;
      } else {
        const int a = unknown(r);
        g(a, a) += cond;
        g(a, b) -= cond;
        g(b, a) -= cond;
      }
    }
  }
  const int sense = unknown(core::kRows + col);
  g(sense, sense) += 1.0 / adc.r_ref_ohm;

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(g);
  if (!(lu.rcond() > kMinRcond)) throw Error(ErrorKind::SingularNetwork, "nodal system is numerically singular");
  const Eigen::VectorXd v = lu.solve(src);

  NodalSolution out;
  out.sense_voltage = v(sense);
  out.residual_inf = (g * v - src).lpNorm<Eigen::Infinity>() / std::max(src.lpNorm<Eigen::Infinity>(), 1e-300);
  if (!std::isfinite(out.sense_voltage)) throw Error(ErrorKind::SingularNetwork, "nodal solve produced non-finite voltage");
  return out;
}

namespace serial {

core::TactileFrame scan(const ResistorGrid& grid, const AdcModel& adc, ScanMode mode) {
  check_grid(grid, adc);
  core::TactileFrame frame;
  for (std::size_t r = 0; r < core::kRows; ++r)
    for (std::size_t c = 0; c < core::kCols; ++c) frame.at(r, c) = scan_one(grid, adc, mode, r, c);
  return frame;
}

}  // namespace serial

core::TactileFrame scan(const ResistorGrid& grid, const AdcModel& adc, ScanMode mode) {
  check_grid(grid, adc);
  core::TactileFrame frame;
  // Exceptions cannot leave an OpenMP region; park the first one and rethrow.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (int idx = 0; idx < static_cast<int>(core::kTaxels); ++idx) {
    try {
      const auto r = static_cast<std::size_t>(idx) / core::kCols;
      const auto c = static_cast<std::size_t>(idx) % core::kCols;
      frame.values[static_cast<std::size_t>(idx)] = scan_one(grid, adc, mode, r, c);
    } catch (...) {
#pragma omp critical(smarthand_scan_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return frame;
}

double ghost_error(const core::TactileFrame& reference, const core::TactileFrame& measured,
                   const core::HandMask& mask) {
  double sum = 0.0;
  for (std::size_t idx : mask.indices())
    sum += std::abs(int{reference.values[idx]} - int{measured.values[idx]});
  return sum / static_cast<double>(mask.indices().size());
}

}  // namespace smarthand::readout
