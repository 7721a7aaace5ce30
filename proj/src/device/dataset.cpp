// Copyright 2026 The QMLC Authors
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

#include "qmlc/device/dataset.hpp"

#include <cstdio>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qmlc/circuit/circuit_text.hpp"
#include "qmlc/common/errors.hpp"
#include "qmlc/common/rng.hpp"
#include "qmlc/device/density_matrix.hpp"
#include "qmlc/device/sampling.hpp"

namespace qmlc::device {

void DatasetConfig::validate() const {
  if (num_qubits < 1) throw ValidationError("dataset needs at least one qubit");
  if (germs.empty()) throw ValidationError("germ pool is empty");
  if (powers.empty()) throw ValidationError("repetition powers are empty");
  for (int p : powers) {
    if (p < 1) throw ValidationError("repetition powers must be >= 1");
  }
  if (shots <= 0) throw ValidationError("shots must be positive");
  if (max_depth < 1) throw ValidationError("max_depth must be positive");
  for (const auto& g : germs) {
    if (g.num_qubits() != num_qubits) throw ValidationError("germ qubit count mismatch");
  }
  if (noise.num_qubits() != num_qubits) throw ValidationError("noise model qubit count mismatch");
  noise.validate();
}

GstDataset generate_germ_dataset(const DatasetConfig& cfg) {
  cfg.validate();
  GstDataset out;
  for (std::size_t g = 0; g < cfg.germs.size(); ++g) {
    for (std::size_t k = 0; k < cfg.powers.size(); ++k) {
      const int power = cfg.powers[k];
      const auto& germ = cfg.germs[g];
      const long long length = static_cast<long long>(germ.length()) * power;
      if (length > cfg.max_depth) {
        out.warnings.push_back({g, power,
                                "germ " + circuit::format_circuit(germ) + "^" +
                                    std::to_string(power) + " has length " +
                                    std::to_string(length) + " > max_depth " +
                                    std::to_string(cfg.max_depth) + "; skipped"});
        continue;
      }
      GstRecord rec;
      rec.circuit = germ.repeated(power);
      rec.length = rec.circuit.length();
      rec.p = apply_circuit(rec.circuit, cfg.noise);
      rec.seed = split_seed(cfg.seed, g * cfg.powers.size() + k);
      rec.shots = cfg.shots;
      rec.counts = sample_counts(rec.p, cfg.shots, rec.seed);
      rec.noise_preset = cfg.noise.name;
      out.records.push_back(std::move(rec));
    }
  }
  return out;
}

namespace {

std::string join_doubles(const RealVector& v) {
  std::string s;
  char buf[64];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g", v(i));
    if (i) s += ',';
    s += buf;
  }
  return s;
}

std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

}  // namespace

void write_dataset(std::ostream& out, const std::vector<GstRecord>& records) {
  out << kDatasetFormat << '\n';
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["circuit"] = circuit::format_circuit(r.circuit);
    j["rho0"] = r.rho0;
    j["meas"] = r.measurement;
    j["shots"] = r.shots;
    j["counts"] = join_ints(r.counts);
    j["p"] = join_doubles(r.p);
    j["length"] = r.length;
    j["noise"] = r.noise_preset;
    j["seed"] = r.seed;
    out << j.dump() << '\n';
  }
}

std::vector<GstRecord> read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDatasetFormat) {
    throw ParseError(std::string("dataset header must be '") + kDatasetFormat + "'");
  }
  std::vector<GstRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      GstRecord r;
      r.circuit = circuit::parse_circuit(j.at("circuit").get<std::string>());
      r.rho0 = j.value("rho0", "zero");
      r.measurement = j.value("meas", "z");
      r.shots = j.at("shots").get<std::int64_t>();
      for (const auto& c : split_commas(j.at("counts").get<std::string>())) {
        r.counts.push_back(std::stoll(c));
      }
      const auto ps = split_commas(j.at("p").get<std::string>());
      r.p.resize(static_cast<Eigen::Index>(ps.size()));
      for (std::size_t i = 0; i < ps.size(); ++i) r.p(static_cast<Eigen::Index>(i)) = std::stod(ps[i]);
      r.length = j.at("length").get<int>();
      r.noise_preset = j.value("noise", "");
      r.seed = j.value("seed", std::uint64_t{0});
      const auto dim = std::size_t{1} << r.circuit.num_qubits();
      if (r.counts.size() != dim || static_cast<std::size_t>(r.p.size()) != dim) {
        throw ParseError("counts/p length does not match 2^Q");
      }
      std::int64_t total = 0;
      for (auto c : r.counts) total += c;
      if (total != r.shots) throw ParseError("counts do not sum to shots");
      if (r.length != r.circuit.length()) throw ParseError("length field disagrees with circuit");
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::logic_error& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace qmlc::device
