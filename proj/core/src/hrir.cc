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

#include "biformer3d/hrir.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <utility>

#include "biformer3d/error.h"

namespace biformer3d {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

void RequireField(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kInvalidField, message);
}

}  // namespace

Direction::Direction(double azimuth_deg, double elevation_deg, double radius_m)
    : azimuth_deg_(azimuth_deg),
      elevation_deg_(elevation_deg),
      radius_m_(radius_m) {
  if (!std::isfinite(azimuth_deg) || !std::isfinite(elevation_deg) ||
      !std::isfinite(radius_m)) {
    throw Error(ErrorCode::kInvalidArgument, "direction must be finite");
  }
  if (elevation_deg < -90.0 || elevation_deg > 90.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "elevation outside [-90, 90]: " + std::to_string(elevation_deg));
  }
  if (radius_m <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "radius must be positive");
  }
  double az = std::fmod(azimuth_deg, 360.0);
  if (az < 0.0) az += 360.0;
  // -1e-17 + 360 rounds to 360.
  if (az >= 360.0) az = 0.0;
  azimuth_deg_ = az;
}

void BinauralHrir::Validate() const {
  RequireField(left.size() == right.size(), "left/right length mismatch");
  RequireField(!left.empty(), "empty HRIR");
  RequireField(sample_rate_hz > 0, "sample rate must be positive");
  auto finite = [](double x) { return std::isfinite(x); };
  RequireField(std::all_of(left.begin(), left.end(), finite) &&
                   std::all_of(right.begin(), right.end(), finite),
               "non-finite HRIR sample");
}

SubjectField::SubjectField(std::string subject_id,
                           std::vector<Direction> directions,
                           std::vector<BinauralHrir> hrirs,
                           std::vector<std::uint8_t> mask)
    : subject_id_(std::move(subject_id)),
      directions_(std::move(directions)),
      hrirs_(std::move(hrirs)),
      mask_(std::move(mask)) {
  RequireField(!directions_.empty(), "field has no directions");
  RequireField(hrirs_.size() == directions_.size(),
               "hrir count differs from direction count");
  RequireField(mask_.size() == directions_.size(),
               "mask length differs from direction count");
  for (std::uint8_t m : mask_) RequireField(m <= 1, "mask entries must be 0/1");
  const std::size_t k = hrirs_.front().length();
  const int fs = hrirs_.front().sample_rate_hz;
  for (const BinauralHrir& h : hrirs_) {
    h.Validate();
    RequireField(h.length() == k, "HRIR length differs from K");
    RequireField(h.sample_rate_hz == fs, "mixed sample rates");
  }
  for (std::size_t i = 0; i < directions_.size(); ++i) {
    for (std::size_t j = i + 1; j < directions_.size(); ++j) {
      RequireField(!(directions_[i] == directions_[j]),
                   "duplicate direction at rows " + std::to_string(i) + " and " +
                       std::to_string(j));
    }
  }
}

std::size_t SubjectField::hrir_length() const { return hrirs_.front().length(); }

int SubjectField::sample_rate_hz() const { return hrirs_.front().sample_rate_hz; }

std::size_t SubjectField::measured_count() const {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1));
}

SubjectField SubjectField::WithMask(std::vector<std::uint8_t> mask) const {
  return SubjectField(subject_id_, directions_, hrirs_, std::move(mask));
}

SubjectField SubjectField::WithHrirs(std::vector<BinauralHrir> hrirs) const {
  return SubjectField(subject_id_, directions_, std::move(hrirs), mask_);
}

StackedHrirs StackAllRows(const SubjectField& field) {
  const std::size_t k = field.hrir_length();
  StackedHrirs rows(field.size(), 2 * k);
  for (std::size_t l = 0; l < field.size(); ++l) {
    const BinauralHrir& h = field.hrirs()[l];
    for (std::size_t n = 0; n < k; ++n) {
      rows(l, n) = h.left[n];
      rows(l, k + n) = h.right[n];
    }
  }
  return rows;
}

StackedHrirs StackField(const SubjectField& field) {
  StackedHrirs rows = StackAllRows(field);
  for (std::size_t l = 0; l < field.size(); ++l) {
    if (field.mask()[l] == 0) rows.row(l).setZero();
  }
  return rows;
}

BinauralHrir SplitRow(const StackedHrirs& rows, std::size_t row,
                      int sample_rate_hz) {
  if (rows.cols() % 2 != 0) {
    throw Error(ErrorCode::kShapeMismatch, "stacked row width must be even");
  }
  const std::size_t k = static_cast<std::size_t>(rows.cols() / 2);
  BinauralHrir h;
  h.sample_rate_hz = sample_rate_hz;
  h.left.resize(k);
  h.right.resize(k);
  for (std::size_t n = 0; n < k; ++n) {
    h.left[n] = rows(row, n);
    h.right[n] = rows(row, k + n);
  }
  return h;
}

std::vector<BinauralHrir> SplitRows(const StackedHrirs& rows, int sample_rate_hz) {
  std::vector<BinauralHrir> out;
  out.reserve(rows.rows());
  for (Eigen::Index l = 0; l < rows.rows(); ++l) {
    out.push_back(SplitRow(rows, l, sample_rate_hz));
  }
  return out;
}

std::vector<std::size_t> CanonicalOrder(std::span<const Direction> directions) {
  std::vector<std::size_t> order(directions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Direction& da = directions[a];
    const Direction& db = directions[b];
    if (da.elevation_deg() != db.elevation_deg()) {
      return da.elevation_deg() > db.elevation_deg();
    }
    return da.azimuth_deg() < db.azimuth_deg();
  });
  return order;
}

double GreatCircleDeg(const Direction& a, const Direction& b) {
  // atan2 form of the spherical law of cosines; stable at small angles.
  const double lat1 = a.elevation_deg() * kDegToRad;
  const double lat2 = b.elevation_deg() * kDegToRad;
  const double dlon = (b.azimuth_deg() - a.azimuth_deg()) * kDegToRad;
  const double y1 = std::cos(lat2) * std::sin(dlon);
  const double y2 = std::cos(lat1) * std::sin(lat2) -
                    std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  const double x = std::sin(lat1) * std::sin(lat2) +
                   std::cos(lat1) * std::cos(lat2) * std::cos(dlon);
  return std::atan2(std::hypot(y1, y2), x) / kDegToRad;
}

std::vector<std::size_t> MissingIndices(std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] == 0) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> MeasuredIndices(std::span<const std::uint8_t> mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != 0) out.push_back(i);
  }
  return out;
}

}  // namespace biformer3d
