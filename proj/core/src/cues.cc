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

#include "biformer3d/cues.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "biformer3d/dft.h"
#include "biformer3d/error.h"

namespace biformer3d {
namespace {

bool Silent(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

double Energy(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// RBJ lowpass with Q = 1/sqrt(2) (2nd-order Butterworth).
Biquad ButterworthLowpass(double cutoff_hz, int sample_rate_hz) {
  const double w0 = 2.0 * std::numbers::pi * cutoff_hz / sample_rate_hz;
  const double alpha = std::sin(w0) / std::numbers::sqrt2;
  const double c = std::cos(w0);
  const double a0 = 1.0 + alpha;
  return {(1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0, -2.0 * c / a0,
          (1.0 - alpha) / a0};
}

void RunBiquad(const Biquad& f, std::vector<double>& x) {
  double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y = f.b0 * v + f.b1 * x1 + f.b2 * x2 - f.a1 * y1 - f.a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

}  // namespace

CueStats CueStats::FromLabels(std::span<const CueLabels> labels) {
  double n = 0.0, sum_itd = 0.0, sum_ild = 0.0, sq_itd = 0.0, sq_ild = 0.0;
  for (const CueLabels& l : labels) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      n += 1.0;
      sum_itd += l.itd_us[i];
      sum_ild += l.ild_db[i];
      sq_itd += l.itd_us[i] * l.itd_us[i];
      sq_ild += l.ild_db[i] * l.ild_db[i];
    }
  }
  CueStats stats;
  if (n == 0.0) return stats;
  stats.itd_mean_us = sum_itd / n;
  stats.ild_mean_db = sum_ild / n;
  const double var_itd = sq_itd / n - stats.itd_mean_us * stats.itd_mean_us;
  const double var_ild = sq_ild / n - stats.ild_mean_db * stats.ild_mean_db;
  // Degenerate (constant) labels keep unit scale.
  stats.itd_std_us = var_itd > 1e-12 ? std::sqrt(var_itd) : 1.0;
  stats.ild_std_db = var_ild > 1e-12 ? std::sqrt(var_ild) : 1.0;
  return stats;
}

std::vector<double> ZeroPhaseLowpass(std::span<const double> x, double cutoff_hz,
                                     int sample_rate_hz) {
  if (!(cutoff_hz > 0.0) || cutoff_hz >= 0.5 * sample_rate_hz) {
    throw Error(ErrorCode::kInvalidArgument, "lowpass cutoff must lie in (0, fs/2)");
  }
  // Pad so neither pass truncates the filter tails.
  const std::size_t pad = std::max<std::size_t>(x.size(), 64);
  std::vector<double> y(x.size() + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), y.begin() + static_cast<std::ptrdiff_t>(pad));
  const Biquad f = ButterworthLowpass(cutoff_hz, sample_rate_hz);
  RunBiquad(f, y);
  std::reverse(y.begin(), y.end());
  RunBiquad(f, y);
  std::reverse(y.begin(), y.end());
  return y;
}

std::vector<double> CrossCorrelation(std::span<const double> a, std::span<const double> b) {
  const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(a.size());
  if (b.size() != a.size()) throw Error(ErrorCode::kShapeMismatch, "cross-correlation length mismatch");
  std::vector<double> r(2 * a.size() - 1, 0.0);
  for (std::ptrdiff_t lag = -(k - 1); lag <= k - 1; ++lag) {
    // Both branches walk the overlap from its start, so swapping a and b
    // visits the same products in the same order (exact ITD antisymmetry).
    double acc = 0.0;
    if (lag >= 0) {
      for (std::ptrdiff_t n = 0; n + lag < k; ++n) acc += a[n] * b[n + lag];
    } else {
      for (std::ptrdiff_t m = 0; m - lag < k; ++m) acc += a[m - lag] * b[m];
    }
    r[lag + k - 1] = acc;
  }
  return r;
}

double EstimateItdUs(const BinauralHrir& hrir, double lowpass_hz) {
  if (hrir.left.size() != hrir.right.size() || hrir.left.empty()) {
    throw Error(ErrorCode::kInvalidField, "ITD needs two equal-length ears");
  }
  if (Silent(hrir.left) || Silent(hrir.right)) {
    throw Error(ErrorCode::kUndefinedCue, "ITD of a silent ear is undefined");
  }
  const auto left = ZeroPhaseLowpass(hrir.left, lowpass_hz, hrir.sample_rate_hz);
  const auto right = ZeroPhaseLowpass(hrir.right, lowpass_hz, hrir.sample_rate_hz);
  const auto r = CrossCorrelation(left, right);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (r[i] > r[peak]) peak = i;
  }
  double offset = 0.0;
  if (peak > 0 && peak + 1 < r.size()) {
    const double ym = r[peak - 1], y0 = r[peak], yp = r[peak + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) offset = 0.5 * (ym - yp) / denom;
  }
  // Positive lag: the right ear lags, i.e. the left ear leads.
  const double lag = static_cast<double>(peak) - static_cast<double>(left.size() - 1) + offset;
  return lag / hrir.sample_rate_hz * 1e6;
}

double EstimateIldDb(const BinauralHrir& hrir) {
  const double el = Energy(hrir.left);
  const double er = Energy(hrir.right);
  if (el == 0.0 || er == 0.0) {
    throw Error(ErrorCode::kUndefinedCue, "ILD with a zero-energy ear is undefined");
  }
  return 10.0 * (std::log10(el) - std::log10(er));
}

std::vector<double> ErbCenterFrequencies(double lo_hz, double hi_hz, int count) {
  auto to_erb = [](double f) { return 21.4 * std::log10(1.0 + 0.00437 * f); };
  auto from_erb = [](double e) { return (std::pow(10.0, e / 21.4) - 1.0) / 0.00437; };
  std::vector<double> out;
  if (count <= 0) return out;
  const double e0 = to_erb(lo_hz), e1 = to_erb(hi_hz);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    out.push_back(from_erb(e0 + t * (e1 - e0)));
  }
  return out;
}

std::vector<double> EstimateBandIldDb(const BinauralHrir& hrir,
                                      std::span<const double> center_hz) {
  if (Energy(hrir.left) == 0.0 || Energy(hrir.right) == 0.0) {
    throw Error(ErrorCode::kUndefinedCue, "ILD with a zero-energy ear is undefined");
  }
  const auto spec_l = DftOrtho(hrir.left);
  const auto spec_r = DftOrtho(hrir.right);
  const std::size_t n = spec_l.size();
  std::vector<double> out;
  for (double fc : center_hz) {
    const double b = 1.019 * 24.7 * (4.37 * fc / 1000.0 + 1.0);
    double el = 0.0, er = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
      const double f = static_cast<double>(k) * hrir.sample_rate_hz / static_cast<double>(n);
      const double w = std::pow(1.0 + ((f - fc) / b) * ((f - fc) / b), -4.0);
      el += w * std::norm(spec_l[k]);
      er += w * std::norm(spec_r[k]);
    }
    if (el == 0.0 || er == 0.0) {
      throw Error(ErrorCode::kUndefinedCue, "empty band in per-band ILD");
    }
    out.push_back(10.0 * (std::log10(el) - std::log10(er)));
  }
  return out;
}

CueLabels LabelField(const SubjectField& field, double lowpass_hz) {
  CueLabels labels;
  labels.itd_us.reserve(field.size());
  labels.ild_db.reserve(field.size());
  for (const BinauralHrir& h : field.hrirs()) {
    labels.itd_us.push_back(EstimateItdUs(h, lowpass_hz));
    labels.ild_db.push_back(EstimateIldDb(h));
  }
  return labels;
}

}  // namespace biformer3d
