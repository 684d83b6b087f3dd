// SPDX-License-Identifier: Apache-2.0
//
// genchan - generative modeling of geometric MIMO wireless channels
// Copyright (C) 2026 genchan contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Synthetic scenario generation, dataset splitting and the CHNL channel
// tensor file format.
//
// CHNL layout (little endian):
//   magic "CHNL", version u16, flags u8 (bit 0: truth present)
//   n_samples u32, n_r u16, n_t u16, n_paths u16 (0 when truth absent)
//   normalization_scale f64
//   per-sample channel payload, f32: [real plane row-major][imag plane row-major]
//   optional truth payload, f64 triples (gain, aoa, aod) per path per sample
//
// Channels are stored at f32 precision; ground-truth parameters stay f64.

#ifndef GENCHAN_DATASETS_HPP
#define GENCHAN_DATASETS_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "genchan/pbgc.hpp"
#include "genchan/rng.hpp"

namespace genchan {

// Independent uniform ranges for one path's gain and angles.
struct PathDistribution {
  double gain_lo = 0.001, gain_hi = 0.01;
  double aoa_lo = 0.0, aoa_hi = 0.0;
  double aod_lo = 0.0, aod_hi = 0.0;

  PathDistribution() = default;
  PathDistribution(double g_lo, double g_hi, double aoa_lo_, double aoa_hi_, double aod_lo_,
                   double aod_hi_)
      : gain_lo(g_lo), gain_hi(g_hi), aoa_lo(aoa_lo_), aoa_hi(aoa_hi_), aod_lo(aod_lo_),
        aod_hi(aod_hi_) {
    if (!(gain_lo <= gain_hi) || !(aoa_lo <= aoa_hi) || !(aod_lo <= aod_hi))
      throw std::invalid_argument("PathDistribution: range low must be <= high");
    if (aoa_lo < -kPi || aoa_hi > kPi || aod_lo < -kPi || aod_hi > kPi)
      throw std::invalid_argument("PathDistribution: angle ranges must stay within [-pi, pi]");
  }
};

struct ScenarioSpec {
  std::vector<PathDistribution> paths;
  ArrayConfig array;
  std::string name;

  void validate() const {
    if (paths.empty()) throw std::invalid_argument("ScenarioSpec: needs at least one path");
  }
};

struct ChannelDataset {
  std::vector<ChannelMatrix> channels;
  std::optional<std::vector<std::vector<PathParams>>> truth;
  std::optional<ScenarioSpec> scenario;
  double normalization_scale = 1.0;

  std::size_t size() const { return channels.size(); }
};

inline double mean_frobenius_norm(const std::vector<ChannelMatrix> &channels) {
  if (channels.empty()) return 1.0;
  double acc = 0.0;
  for (const auto &h : channels) acc += h.norm();
  return acc / static_cast<double>(channels.size());
}

// Draws per-path parameters from the scenario's uniform ranges and runs them
// through the channel model. Each sample uses an RNG stream derived from
// (seed, sample index), so the dataset is reproducible bit for bit and does
// not depend on generation order.
inline ChannelDataset generate_dataset(const ScenarioSpec &spec, int count, std::uint64_t seed) {
  spec.validate();
  if (count < 0) throw std::invalid_argument("generate_dataset: count must be >= 0");
  ChannelDataset ds;
  ds.scenario = spec;
  ds.channels.reserve(count);
  std::vector<std::vector<PathParams>> truth;
  truth.reserve(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_stream_seed(seed, static_cast<std::uint64_t>(i)));
    std::vector<PathParams> paths;
    paths.reserve(spec.paths.size());
    for (const PathDistribution &d : spec.paths)
      paths.emplace_back(rng.uniform(d.gain_lo, d.gain_hi), rng.uniform(d.aoa_lo, d.aoa_hi),
                         rng.uniform(d.aod_lo, d.aod_hi));
    ds.channels.push_back(synthesize_channel(paths, spec.array));
    truth.push_back(std::move(paths));
  }
  ds.truth = std::move(truth);
  ds.normalization_scale = mean_frobenius_norm(ds.channels);
  return ds;
}

// Seeded shuffle followed by a contiguous partition; truth labels travel
// with their channels and the parent's normalization scale is carried over.
inline std::vector<ChannelDataset> split(const ChannelDataset &dataset,
                                         const std::vector<double> &fractions,
                                         std::uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("split: no fractions given");
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f > 0.0)) throw std::invalid_argument("split: fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split: fractions must sum to 1");

  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  std::vector<ChannelDataset> parts;
  parts.reserve(fractions.size());
  double cum = 0.0;
  std::size_t begin = 0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    cum += fractions[k];
    std::size_t end = (k + 1 == fractions.size())
                          ? n
                          : static_cast<std::size_t>(std::llround(cum * static_cast<double>(n)));
    ChannelDataset part;
    part.scenario = dataset.scenario;
    part.normalization_scale = dataset.normalization_scale;
    if (dataset.truth) part.truth.emplace();
    for (std::size_t at = begin; at < end; ++at) {
      part.channels.push_back(dataset.channels[order[at]]);
      if (dataset.truth) part.truth->push_back((*dataset.truth)[order[at]]);
    }
    parts.push_back(std::move(part));
    begin = end;
  }
  return parts;
}

// --- CHNL binary format --------------------------------------------------

inline constexpr std::uint16_t kChnlFormatVersion = 1;

namespace detail {

inline void chnl_write_exact(std::ofstream &os, const void *p, std::size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
}

inline void chnl_read_exact(std::ifstream &is, void *p, std::size_t n, const char *what) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n)
    throw TruncatedError(std::string("CHNL: truncated payload while reading ") + what);
}

}  // namespace detail

inline void save_dataset(const ChannelDataset &dataset, const std::filesystem::path &path) {
  const bool has_truth = dataset.truth.has_value();
  std::size_t n_paths = 0;
  if (has_truth) {
    if (dataset.truth->size() != dataset.channels.size())
      throw std::invalid_argument("save_dataset: truth count does not match channel count");
    if (!dataset.truth->empty()) n_paths = dataset.truth->front().size();
    for (const auto &t : *dataset.truth)
      if (t.size() != n_paths)
        throw std::invalid_argument("save_dataset: ragged truth lists are not supported");
  }
  int n_r = 0, n_t = 0;
  if (!dataset.channels.empty()) {
    n_r = static_cast<int>(dataset.channels.front().rows());
    n_t = static_cast<int>(dataset.channels.front().cols());
    for (const auto &h : dataset.channels)
      if (h.rows() != n_r || h.cols() != n_t)
        throw std::invalid_argument("save_dataset: channels do not share one shape");
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_dataset: cannot open " + path.string());
  os.write("CHNL", 4);
  const std::uint16_t version = kChnlFormatVersion;
  const std::uint8_t flags = has_truth ? 1 : 0;
  const std::uint32_t n_samples = static_cast<std::uint32_t>(dataset.channels.size());
  const std::uint16_t nr16 = static_cast<std::uint16_t>(n_r);
  const std::uint16_t nt16 = static_cast<std::uint16_t>(n_t);
  const std::uint16_t np16 = static_cast<std::uint16_t>(n_paths);
  detail::chnl_write_exact(os, &version, 2);
  detail::chnl_write_exact(os, &flags, 1);
  detail::chnl_write_exact(os, &n_samples, 4);
  detail::chnl_write_exact(os, &nr16, 2);
  detail::chnl_write_exact(os, &nt16, 2);
  detail::chnl_write_exact(os, &np16, 2);
  detail::chnl_write_exact(os, &dataset.normalization_scale, 8);

  std::vector<float> plane(static_cast<std::size_t>(2) * n_r * n_t);
  for (const auto &h : dataset.channels) {
    for (int r = 0; r < n_r; ++r)
      for (int t = 0; t < n_t; ++t) {
        plane[static_cast<std::size_t>(r) * n_t + t] = static_cast<float>(h(r, t).real());
        plane[static_cast<std::size_t>(n_r) * n_t + r * n_t + t] =
            static_cast<float>(h(r, t).imag());
      }
    detail::chnl_write_exact(os, plane.data(), plane.size() * sizeof(float));
  }
  if (has_truth) {
    for (const auto &t : *dataset.truth)
      for (const PathParams &p : t) {
        const double triple[3] = {p.gain, p.aoa, p.aod};
        detail::chnl_write_exact(os, triple, sizeof(triple));
      }
  }
  if (!os) throw std::runtime_error("save_dataset: write failed for " + path.string());
}

inline ChannelDataset load_dataset(const std::filesystem::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_dataset: cannot open " + path.string());
  char magic[4];
  detail::chnl_read_exact(is, magic, 4, "magic");
  if (std::string_view(magic, 4) != "CHNL")
    throw MagicError("CHNL: bad magic in " + path.string());
  std::uint16_t version;
  std::uint8_t flags;
  std::uint32_t n_samples;
  std::uint16_t n_r, n_t, n_paths;
  detail::chnl_read_exact(is, &version, 2, "version");
  if (version != kChnlFormatVersion)
    throw VersionError("CHNL: unsupported format version " + std::to_string(version));
  detail::chnl_read_exact(is, &flags, 1, "flags");
  if (flags > 1) throw ShapeError("CHNL: unknown flag bits set");
  detail::chnl_read_exact(is, &n_samples, 4, "sample count");
  detail::chnl_read_exact(is, &n_r, 2, "n_r");
  detail::chnl_read_exact(is, &n_t, 2, "n_t");
  detail::chnl_read_exact(is, &n_paths, 2, "path count");
  const bool has_truth = (flags & 1) != 0;
  if (n_samples > 0 && (n_r == 0 || n_t == 0))
    throw ShapeError("CHNL: zero antenna count with nonzero sample count");
  if (has_truth && n_samples > 0 && n_paths == 0)
    throw ShapeError("CHNL: truth flag set but path count is zero");

  ChannelDataset ds;
  detail::chnl_read_exact(is, &ds.normalization_scale, 8, "normalization scale");

  std::vector<float> plane(static_cast<std::size_t>(2) * n_r * n_t);
  ds.channels.reserve(n_samples);
  for (std::uint32_t s = 0; s < n_samples; ++s) {
    detail::chnl_read_exact(is, plane.data(), plane.size() * sizeof(float), "channel payload");
    ChannelMatrix h(n_r, n_t);
    for (int r = 0; r < n_r; ++r)
      for (int t = 0; t < n_t; ++t)
        h(r, t) = std::complex<double>(plane[static_cast<std::size_t>(r) * n_t + t],
                                       plane[static_cast<std::size_t>(n_r) * n_t + r * n_t + t]);
    ds.channels.push_back(std::move(h));
  }
  if (has_truth) {
    ds.truth.emplace();
    ds.truth->reserve(n_samples);
    for (std::uint32_t s = 0; s < n_samples; ++s) {
      std::vector<PathParams> t;
      t.reserve(n_paths);
      for (int p = 0; p < n_paths; ++p) {
        double triple[3];
        detail::chnl_read_exact(is, triple, sizeof(triple), "truth payload");
        t.emplace_back(triple[0], triple[1], triple[2]);
      }
      ds.truth->push_back(std::move(t));
    }
  }
  if (is.peek() != std::ifstream::traits_type::eof())
    throw ShapeError("CHNL: unexpected trailing bytes in " + path.string());
  return ds;
}

// --- scenario spec text format -------------------------------------------
//
// Human-readable key-value file with nested path blocks:
//
//   name = bs10-analog
//   [array]
//   n_t = 16
//   n_r = 16
//   u = 3.14159265358979312
//   [path]
//   gain = 0.001 0.01
//   aoa = 0.4 0.8
//   aod = 0.1 0.3
//
// The [array] block is optional and defaults to 16x16 antennas with u = pi.
// Every [path] block needs all three ranges.

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_key_value(const std::string &line, std::string &key, std::string &value) {
  const auto eq = line.find('=');
  if (eq == std::string::npos) return false;
  key = trim(line.substr(0, eq));
  value = trim(line.substr(eq + 1));
  return !key.empty();
}

inline double parse_real(const std::string &s, int line_no, const std::string &what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception &) {
    throw SpecParseError(line_no, "expected a real number for '" + what + "', got '" + s + "'");
  }
}

inline std::pair<double, double> parse_range(const std::string &s, int line_no,
                                             const std::string &what) {
  std::istringstream iss(s);
  std::string a, b, rest;
  if (!(iss >> a >> b) || (iss >> rest))
    throw SpecParseError(line_no, "expected two reals for '" + what + "'");
  return {parse_real(a, line_no, what), parse_real(b, line_no, what)};
}

}  // namespace detail

inline ScenarioSpec parse_scenario_spec(std::istream &in) {
  ScenarioSpec spec;
  spec.array = ArrayConfig();

  enum class Section { Top, Array, Path };
  Section section = Section::Top;
  struct PendingPath {
    std::optional<std::pair<double, double>> gain, aoa, aod;
    int line = 0;
  };
  std::optional<PendingPath> pending;
  int n_t = spec.array.n_t, n_r = spec.array.n_r;
  double u = spec.array.u;

  auto flush_path = [&spec](PendingPath &p) {
    if (!p.gain || !p.aoa || !p.aod)
      throw SpecParseError(p.line, "[path] block needs gain, aoa and aod ranges");
    try {
      spec.paths.emplace_back(p.gain->first, p.gain->second, p.aoa->first, p.aoa->second,
                              p.aod->first, p.aod->second);
    } catch (const std::invalid_argument &e) {
      throw SpecParseError(p.line, e.what());
    }
  };

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = detail::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line == "[array]") {
        if (pending) {
          flush_path(*pending);
          pending.reset();
        }
        section = Section::Array;
      } else if (line == "[path]") {
        if (pending) flush_path(*pending);
        pending = PendingPath{};
        pending->line = line_no;
        section = Section::Path;
      } else {
        throw SpecParseError(line_no, "unknown section '" + line + "'");
      }
      continue;
    }
    std::string key, value;
    if (!detail::parse_key_value(line, key, value))
      throw SpecParseError(line_no, "expected 'key = value', got '" + line + "'");
    switch (section) {
      case Section::Top:
        if (key == "name") {
          spec.name = value;
        } else {
          throw SpecParseError(line_no, "unknown top-level key '" + key + "'");
        }
        break;
      case Section::Array:
        if (key == "n_t") {
          n_t = static_cast<int>(detail::parse_real(value, line_no, key));
        } else if (key == "n_r") {
          n_r = static_cast<int>(detail::parse_real(value, line_no, key));
        } else if (key == "u") {
          u = detail::parse_real(value, line_no, key);
        } else {
          throw SpecParseError(line_no, "unknown [array] key '" + key + "'");
        }
        break;
      case Section::Path:
        if (key == "gain") {
          pending->gain = detail::parse_range(value, line_no, key);
        } else if (key == "aoa") {
          pending->aoa = detail::parse_range(value, line_no, key);
        } else if (key == "aod") {
          pending->aod = detail::parse_range(value, line_no, key);
        } else {
          throw SpecParseError(line_no, "unknown [path] key '" + key + "'");
        }
        break;
    }
  }
  if (pending) flush_path(*pending);
  try {
    spec.array = ArrayConfig(n_t, n_r, u);
  } catch (const std::invalid_argument &e) {
    throw SpecParseError(line_no, e.what());
  }
  if (spec.paths.empty())
    throw SpecParseError(line_no, "scenario needs at least one [path] block");
  return spec;
}

inline ScenarioSpec load_scenario_spec(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_scenario_spec: cannot open " + path.string());
  return parse_scenario_spec(is);
}

inline std::string write_scenario_spec(const ScenarioSpec &spec) {
  std::ostringstream os;
  os.precision(17);
  if (!spec.name.empty()) os << "name = " << spec.name << "\n\n";
  os << "[array]\n";
  os << "n_t = " << spec.array.n_t << "\n";
  os << "n_r = " << spec.array.n_r << "\n";
  os << "u = " << spec.array.u << "\n";
  for (const PathDistribution &p : spec.paths) {
    os << "\n[path]\n";
    os << "gain = " << p.gain_lo << " " << p.gain_hi << "\n";
    os << "aoa = " << p.aoa_lo << " " << p.aoa_hi << "\n";
    os << "aod = " << p.aod_lo << " " << p.aod_hi << "\n";
  }
  return os.str();
}

inline void save_scenario_spec(const ScenarioSpec &spec, const std::filesystem::path &path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_scenario_spec: cannot open " + path.string());
  os << write_scenario_spec(spec);
}

// --- scenario presets -----------------------------------------------------

// paths-6-to-8 uses the published extra-path angle boxes; the bs10/bs11
// analogs are synthetic stand-ins for ray-traced base-station scenes, with
// five disjoint angle boxes each.
inline ScenarioSpec scenario_preset(const std::string &name) {
  const ArrayConfig ula16(16, 16, kPi);
  if (name == "paths-6-to-8") {
    ScenarioSpec spec;
    spec.name = name;
    spec.array = ula16;
    spec.paths = {
        {0.001, 0.01, 0.4, 0.8, 0.1, 0.3},
        {0.001, 0.01, 0.6, 1.0, -0.3, -0.1},
        {0.001, 0.01, -0.3, 0.9, 0.6, 1.0},
    };
    return spec;
  }
  if (name == "bs10-analog") {
    ScenarioSpec spec;
    spec.name = name;
    spec.array = ula16;
    spec.paths = {
        {0.001, 0.01, -1.3, -0.9, -0.7, -0.3},
        {0.001, 0.01, -0.8, -0.4, 0.3, 0.7},
        {0.001, 0.01, -0.2, 0.2, -1.2, -0.8},
        {0.001, 0.01, 0.4, 0.8, 0.1, 0.3},
        {0.001, 0.01, 0.9, 1.3, 0.8, 1.2},
    };
    return spec;
  }
  if (name == "bs11-analog") {
    ScenarioSpec spec;
    spec.name = name;
    spec.array = ula16;
    spec.paths = {
        {0.001, 0.01, -1.2, -0.8, 0.9, 1.3},
        {0.001, 0.01, -0.5, -0.1, -1.3, -0.9},
        {0.001, 0.01, 0.1, 0.5, 0.5, 0.9},
        {0.001, 0.01, 0.7, 1.1, -0.6, -0.2},
        {0.001, 0.01, 1.0, 1.4, -0.1, 0.3},
    };
    return spec;
  }
  throw std::invalid_argument("unknown scenario preset '" + name + "'");
}

inline std::vector<std::string> scenario_preset_names() {
  return {"paths-6-to-8", "bs10-analog", "bs11-analog"};
}

}  // namespace genchan

#endif
