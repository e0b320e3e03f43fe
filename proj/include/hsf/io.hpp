#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hsf/diagnostics.hpp"
#include "hsf/flows.hpp"

namespace hsf {

inline std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Metadata emitted as the first line of a diagnostics stream; cmd_check
/// uses it to evaluate the resolution-dependent tolerances.
struct RunMeta {
  std::string kind;
  double h = 0.0;   // max active spacing
  double dt = 0.0;  // step size
  std::vector<int> sizes;
};

/// JSON-lines diagnostics stream: one meta line, then one object per record
/// with the DiagnosticsRecord field names.
class JsonlWriter {
 public:
  JsonlWriter(const std::string& path, const RunMeta& meta) : out_(path) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
    out_ << "{\"meta\":true,\"kind\":\"" << meta.kind << "\",\"h\":" << fmt_double(meta.h)
         << ",\"dt\":" << fmt_double(meta.dt) << ",\"sizes\":[";
    for (size_t i = 0; i < meta.sizes.size(); ++i)
      out_ << (i ? "," : "") << meta.sizes[i];
    out_ << "]}\n";
  }

  void write(const DiagnosticsRecord& r) {
    out_ << "{\"t\":" << fmt_double(r.t) << ",\"E\":" << fmt_double(r.E)
         << ",\"K\":" << fmt_double(r.K) << ",\"eps_max\":" << fmt_double(r.eps_max)
         << ",\"constraint_drift\":" << fmt_double(r.constraint_drift);
    if (std::isfinite(r.residual_harmonic_map))
      out_ << ",\"residual_harmonic_map\":" << fmt_double(r.residual_harmonic_map);
    if (std::isfinite(r.entropy_F)) out_ << ",\"entropy_F\":" << fmt_double(r.entropy_F);
    out_ << "}\n";
  }

 private:
  std::ofstream out_;
};

/// CSV summary with the exact header `t,E,K,eps_max,drift`.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw Error("cannot open '" + path + "' for writing");
    out_ << "t,E,K,eps_max,drift\n";
  }
  void write(const DiagnosticsRecord& r) {
    out_ << fmt_double(r.t) << ',' << fmt_double(r.E) << ',' << fmt_double(r.K) << ','
         << fmt_double(r.eps_max) << ',' << fmt_double(r.constraint_drift) << '\n';
  }

 private:
  std::ofstream out_;
};

struct DiagnosticsFile {
  RunMeta meta;
  bool has_meta = false;
  std::vector<DiagnosticsRecord> series;
};

inline DiagnosticsFile read_diagnostics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open diagnostics file '" + path + "'");
  DiagnosticsFile out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw Error("diagnostics line " + std::to_string(lineno) + ": " + e.what());
    }
    if (j.contains("meta")) {
      out.has_meta = true;
      out.meta.kind = j.value("kind", "");
      out.meta.h = j.value("h", 0.0);
      out.meta.dt = j.value("dt", 0.0);
      if (j.contains("sizes"))
        for (const auto& v : j["sizes"]) out.meta.sizes.push_back(v.get<int>());
      continue;
    }
    DiagnosticsRecord r;
    if (!j.contains("t") || !j.contains("E") || !j.contains("K") || !j.contains("eps_max"))
      throw Error("diagnostics line " + std::to_string(lineno) + ": missing record fields");
    r.t = j["t"].get<double>();
    r.E = j["E"].get<double>();
    r.K = j["K"].get<double>();
    r.eps_max = j["eps_max"].get<double>();
    r.constraint_drift = j.value("constraint_drift", 0.0);
    r.residual_harmonic_map = j.value("residual_harmonic_map",
                                      std::numeric_limits<double>::quiet_NaN());
    r.entropy_F = j.value("entropy_F", std::numeric_limits<double>::quiet_NaN());
    out.series.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// snapshots: one JSON header line, then each field as raw little-endian
// float64, row-major over axes (axis 0 slowest) with the component index
// fastest.
// ---------------------------------------------------------------------------

inline void write_snapshot(const std::string& path, const FlowState& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open snapshot '" + path + "' for writing");
  nlohmann::json j;
  j["format"] = "hsf-snapshot-v1";
  j["kind"] = kind_name(s.kind);
  j["s3"] = s.s3;
  j["time"] = s.t;
  j["byte_order"] = "little-endian";
  j["layout"] = "row-major axes (axis 0 slowest), component fastest";
  std::vector<int> sizes(s.grid.sizes.begin(), s.grid.sizes.begin() + s.grid.dim);
  std::vector<double> lengths;
  for (int a = 0; a < s.grid.dim; ++a) lengths.push_back(s.grid.length(a));
  j["grid"] = {{"sizes", sizes}, {"lengths", lengths}};
  std::vector<int> ncomp;
  for (const Field& f : s.f) ncomp.push_back(f.ncomp);
  j["ncomp"] = ncomp;
  out << j.dump() << '\n';
  for (const Field& f : s.f)
    out.write(reinterpret_cast<const char*>(f.v.data()),
              static_cast<std::streamsize>(f.v.size() * sizeof(double)));
}

struct Snapshot {
  std::string kind;
  bool s3 = false;
  double time = 0.0;
  GridSpec grid;
  std::vector<Field> fields;
};

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open snapshot '" + path + "'");
  std::string header;
  std::getline(in, header);
  nlohmann::json j = nlohmann::json::parse(header);
  if (j.value("format", "") != "hsf-snapshot-v1") throw Error("snapshot: unknown format");
  Snapshot snap;
  snap.kind = j.value("kind", "");
  snap.s3 = j.value("s3", false);
  snap.time = j.value("time", 0.0);
  std::vector<int> sizes = j["grid"]["sizes"].get<std::vector<int>>();
  std::vector<double> lengths = j["grid"]["lengths"].get<std::vector<double>>();
  snap.grid = GridSpec::torus(static_cast<int>(sizes.size()), sizes, lengths);
  for (int nc : j["ncomp"].get<std::vector<int>>()) {
    Field f(snap.grid, nc);
    in.read(reinterpret_cast<char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
    if (!in) throw Error("snapshot: truncated payload");
    snap.fields.push_back(std::move(f));
  }
  return snap;
}

}  // namespace hsf
