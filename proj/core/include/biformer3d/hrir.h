// Copyright 2026 The BiFormer3D Authors. All Rights Reserved.
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

#ifndef BIFORMER3D_HRIR_H_
#define BIFORMER3D_HRIR_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biformer3d/matrix.h"

namespace biformer3d {

inline constexpr double kDefaultRadiusM = 1.5;

// Source position. Azimuth is measured counterclockwise from the front
// (90 deg = left ear) and normalized to [0, 360); elevation is measured from
// the horizontal plane.
class Direction {
 public:
  Direction(double azimuth_deg, double elevation_deg,
            double radius_m = kDefaultRadiusM);

  double azimuth_deg() const { return azimuth_deg_; }
  double elevation_deg() const { return elevation_deg_; }
  double radius_m() const { return radius_m_; }

  friend bool operator==(const Direction&, const Direction&) = default;

 private:
  double azimuth_deg_;
  double elevation_deg_;
  double radius_m_;
};

struct BinauralHrir {
  std::vector<double> left;
  std::vector<double> right;
  int sample_rate_hz = 48000;

  std::size_t length() const { return left.size(); }

  // Throws kInvalidField on mismatched ears, non-finite samples or a
  // non-positive rate.
  void Validate() const;
};

// One subject's directions, HRIRs and measured mask (1 = measured).
// Unmeasured rows may hold ground truth (training, evaluation) or zeros
// (inference); StackField never looks at them.
class SubjectField {
 public:
  SubjectField(std::string subject_id, std::vector<Direction> directions,
               std::vector<BinauralHrir> hrirs, std::vector<std::uint8_t> mask);

  const std::string& subject_id() const { return subject_id_; }
  const std::vector<Direction>& directions() const { return directions_; }
  const std::vector<BinauralHrir>& hrirs() const { return hrirs_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

  std::size_t size() const { return directions_.size(); }
  std::size_t hrir_length() const;
  int sample_rate_hz() const;
  std::size_t measured_count() const;
  std::size_t missing_count() const { return size() - measured_count(); }

  SubjectField WithMask(std::vector<std::uint8_t> mask) const;
  SubjectField WithHrirs(std::vector<BinauralHrir> hrirs) const;

 private:
  std::string subject_id_;
  std::vector<Direction> directions_;
  std::vector<BinauralHrir> hrirs_;
  std::vector<std::uint8_t> mask_;
};

// L x 2K; each row is left || right.
using StackedHrirs = MatrixD;

// Measured rows hold [left || right]; unmeasured rows are zero.
StackedHrirs StackField(const SubjectField& field);

// Every row regardless of the mask (the ground-truth matrix).
StackedHrirs StackAllRows(const SubjectField& field);

// Inverse of StackAllRows for one row.
BinauralHrir SplitRow(const StackedHrirs& rows, std::size_t row,
                      int sample_rate_hz);

std::vector<BinauralHrir> SplitRows(const StackedHrirs& rows,
                                    int sample_rate_hz);

// Elevation descending, then azimuth ascending, then original index.
std::vector<std::size_t> CanonicalOrder(std::span<const Direction> directions);

// Central angle in degrees, radius ignored.
double GreatCircleDeg(const Direction& a, const Direction& b);

std::vector<std::size_t> MissingIndices(std::span<const std::uint8_t> mask);
std::vector<std::size_t> MeasuredIndices(std::span<const std::uint8_t> mask);

}  // namespace biformer3d

#endif  // BIFORMER3D_HRIR_H_
