#include "xmvae/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xmvae/error.hpp"

namespace xmvae {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_array(std::string& out, const char* key, const double* values,
                  std::size_t count) {
  out += "\"";
  out += key;
  out += "\":[";
  for (std::size_t i = 0; i < count; ++i) {
    if (i) out += ',';
    out += format_real(values[i]);
  }
  out += ']';
}

}  // namespace

void write_dataset(const std::string& path,
                   const std::vector<PoseSample>& samples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open dataset for writing: " + path);
  std::string line;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const PoseSample& s = samples[i];
    line.clear();
    line += "{\"index\":" + std::to_string(i);
    line += ",\"handedness\":\"";
    line += (s.handedness == Handedness::kLeft ? 'L' : 'R');
    line += "\",\"labeled\":";
    line += s.labeled ? "true" : "false";
    line += ',';
    append_array(line, "joints3d", &s.joints3d[0].x, 3 * kHandJoints);
    line += ',';
    append_array(line, "joints2d", &s.joints2d[0].x, 2 * kHandJoints);
    line += ',';
    append_array(line, "angles", s.angles.data(), s.angles.size());
    line += "}\n";
    out << line;
  }
  if (!out) throw IoError("dataset write failed: " + path);
}

std::vector<PoseSample> read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset: " + path);

  std::vector<PoseSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("dataset line " + std::to_string(line_no) + ": " + e.what());
    }
    auto require_array = [&](const char* key, std::size_t arity) {
      if (!j.contains(key) || !j[key].is_array() || j[key].size() != arity) {
        throw FormatError("dataset line " + std::to_string(line_no) + ": field '" +
                          key + "' must be an array of " + std::to_string(arity));
      }
    };
    require_array("joints3d", 3 * kHandJoints);
    require_array("joints2d", 2 * kHandJoints);
    require_array("angles", kHandDof);
    if (!j.contains("handedness") || !j["handedness"].is_string() ||
        (j["handedness"] != "L" && j["handedness"] != "R")) {
      throw FormatError("dataset line " + std::to_string(line_no) +
                        ": handedness must be \"L\" or \"R\"");
    }
    if (!j.contains("labeled") || !j["labeled"].is_boolean()) {
      throw FormatError("dataset line " + std::to_string(line_no) +
                        ": labeled must be a boolean");
    }

    PoseSample s;
    s.handedness = j["handedness"] == "L" ? Handedness::kLeft : Handedness::kRight;
    s.labeled = j["labeled"].get<bool>();
    const auto& j3 = j["joints3d"];
    for (std::size_t k = 0; k < kHandJoints; ++k) {
      s.joints3d[k] = {j3[3 * k].get<double>(), j3[3 * k + 1].get<double>(),
                       j3[3 * k + 2].get<double>()};
    }
    const auto& j2 = j["joints2d"];
    for (std::size_t k = 0; k < kHandJoints; ++k) {
      s.joints2d[k] = {j2[2 * k].get<double>(), j2[2 * k + 1].get<double>()};
    }
    s.angles.resize(kHandDof);
    for (std::size_t k = 0; k < kHandDof; ++k) s.angles[k] = j["angles"][k].get<double>();
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace xmvae
