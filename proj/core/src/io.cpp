#include "lambda_lab/io.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "lambda_lab/error.hpp"

namespace lambda_lab {

nlohmann::json set_to_json(const FrequencySet& fset) {
  nlohmann::json points = nlohmann::json::array();
  for (std::size_t i = 0; i < fset.size(); ++i) {
    const auto n = fset.lattice(i);
    points.push_back(std::vector<std::int64_t>(n.begin(), n.end()));
  }
  const Provenance& prov = fset.provenance();
  return {{"schema", kSetSchema},
          {"kind", to_string(fset.spec().kind())},
          {"d", fset.d()},
          {"m", fset.m()},
          {"R", fset.R()},
          {"provenance", {{"method", prov.method}, {"seed", prov.seed}, {"params", prov.params}}},
          {"points", std::move(points)}};
}

FrequencySet set_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema")) throw SchemaError("frequency set: missing schema field");
  if (!j["schema"].is_string() || j["schema"].get<std::string>() != kSetSchema)
    throw SchemaError("unsupported frequency-set schema " + j["schema"].dump() + " (expected \"" +
                      std::string(kSetSchema) + "\")");
  try {
    const ManifoldSpec spec(parse_manifold_kind(j.at("kind").get<std::string>()), j.at("d").get<int>());
    if (j.at("m").get<int>() != spec.m()) throw SchemaError("frequency set: m does not match the manifold");
    const auto R = j.at("R").get<std::int64_t>();
    std::vector<std::int64_t> lat;
    for (const auto& pt : j.at("points")) {
      if (!pt.is_array() || pt.size() != static_cast<std::size_t>(spec.m()))
        throw SchemaError("frequency set: point with wrong arity");
      for (const auto& v : pt) {
        if (!v.is_number_integer()) throw SchemaError("frequency set: non-integer lattice entry " + v.dump());
        lat.push_back(v.get<std::int64_t>());
      }
    }
    Provenance prov;
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      prov.method = p.value("method", std::string("manual"));
      prov.seed = p.value("seed", std::uint64_t{0});
      prov.params = p.value("params", nlohmann::json::object());
    }
    return FrequencySet(spec, R, std::move(lat), std::move(prov));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("frequency set: ") + e.what());
  }
}

std::string dump_set(const FrequencySet& fset) { return set_to_json(fset).dump(2) + "\n"; }

void save_set(const FrequencySet& fset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << dump_set(fset);
}

FrequencySet load_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return set_from_json(j);
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const nlohmann::json& config,
                     std::vector<std::string> columns)
    : path_(path), columns_(std::move(columns)), out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
  const std::string cfg = config.dump();
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(cfg)));
  out_ << "# config: " << cfg << "\n# config_hash: " << hash << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out_ << (i ? "," : "") << columns_[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw InvalidArgument("csv row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
  out_.flush();
}

std::vector<std::string> norm_report_columns() {
  return {"set_id", "p", "method", "value", "error", "samples", "seed", "wall_ms"};
}

std::vector<std::string> norm_report_row(std::string_view set_id, const NormReport& r) {
  return {std::string(set_id),       format_number(r.p),
          std::string(to_string(r.method)), format_number(r.value),
          format_number(r.error),    std::to_string(r.samples),
          std::to_string(r.seed),    format_number(r.wall_ms)};
}

std::vector<std::string> kp_report_columns() {
  auto cols = norm_report_columns();
  cols.insert(cols.end(), {"probe", "normalization", "iterations", "restarts"});
  return cols;
}

std::vector<std::string> kp_report_row(std::string_view set_id, const KpProbeReport& r) {
  return {std::string(set_id),
          format_number(r.p),
          std::string(to_string(r.method)),
          format_number(r.bound),
          format_number(r.error),
          std::to_string(r.trials),
          std::to_string(r.seed),
          format_number(r.wall_ms),
          std::string(to_string(r.probe)),
          std::string(to_string(r.normalization)),
          std::to_string(r.iterations),
          std::to_string(r.restarts)};
}

std::filesystem::path write_plot_script(const std::filesystem::path& csv, std::string_view x_column,
                                        const std::vector<std::string>& y_columns, bool loglog) {
  std::filesystem::path script = csv;
  script.replace_extension(".plot.py");
  std::ofstream out(script, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + script.string());
  std::ostringstream ys;
  for (std::size_t i = 0; i < y_columns.size(); ++i) ys << (i ? ", " : "") << '"' << y_columns[i] << '"';
  out << "import csv\n"
         "import sys\n"
         "from pathlib import Path\n\n"
         "import matplotlib.pyplot as plt\n\n"
         "CSV = Path(__file__).with_name(\"" << csv.filename().string() << "\")\n"
         "X = \"" << x_column << "\"\n"
         "YS = [" << ys.str() << "]\n\n"
         "with open(CSV) as fh:\n"
         "    rows = list(csv.DictReader(line for line in fh if not line.startswith(\"#\")))\n\n"
         "fig, ax = plt.subplots()\n"
         "for y in YS:\n"
         "    pts = [(float(r[X]), float(r[y])) for r in rows if r.get(y) not in (None, \"\")]\n"
         "    ax.plot([p[0] for p in pts], [p[1] for p in pts], \"o-\", label=y)\n"
      << (loglog ? "ax.set_xscale(\"log\")\nax.set_yscale(\"log\")\n" : "")
      << "ax.set_xlabel(X)\n"
         "ax.legend()\n"
         "fig.savefig(sys.argv[1] if len(sys.argv) > 1 else CSV.with_suffix(\".png\"))\n";
  return script;
}

}  // namespace lambda_lab
