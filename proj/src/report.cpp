#include "nlslab/harness.hpp"
#include "nlslab/snapshot_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nlslab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column " + name);
    const auto c = static_cast<std::size_t>(it - header.begin());
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r.at(c));
    return out;
  }
};

Table read_csv(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line, cell;
  if (!std::getline(is, line)) throw std::runtime_error("empty csv " + path.string());
  std::stringstream hs(line);
  while (std::getline(hs, cell, ',')) t.header.push_back(cell);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != t.header.size()) throw std::runtime_error("ragged csv " + path.string());
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool dashed = false;
};

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// Minimal SVG line plot; log axes drop non-positive samples.
void write_svg(const fs::path& path, const std::string& title, const std::string& xlabel, const std::string& ylabel,
               std::vector<Series> series, bool logx, bool logy) {
  const double W = 640, H = 420, L = 70, Rm = 150, T = 40, B = 50;
  auto tx = [&](double v) { return logx ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (auto& s : series) {
    Series kept{s.label, {}, {}, s.dashed};
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if ((logx && !(s.x[i] > 0)) || (logy && !(s.y[i] > 0)) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
        continue;
      kept.x.push_back(tx(s.x[i]));
      kept.y.push_back(ty(s.y[i]));
      x0 = std::min(x0, kept.x.back());
      x1 = std::max(x1, kept.x.back());
      y0 = std::min(y0, kept.y.back());
      y1 = std::max(y1, kept.y.back());
    }
    s = std::move(kept);
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-300) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12 * std::max(1.0, std::abs(y1))) {
    const double pad = std::max(1e-12, 0.05 * std::abs(y1));
    y0 -= pad;
    y1 += pad;
  }
  auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - Rm); };
  auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
  auto tick = [](double v, bool lg) { return lg ? "1e" + fmt(v) : fmt(v); };

  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
     << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - Rm << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 15 << "\" text-anchor=\"middle\">" << tick(xv, logx)
       << "</text>\n";
    os << "<text x=\"" << L - 5 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << tick(yv, logy) << "</text>\n";
  }
  os << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n"
     << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2 << ")\" text-anchor=\"middle\">"
     << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    const char* color = sr.dashed ? "#777777" : kColors[s % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (sr.dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < sr.x.size(); ++i) os << px(sr.x[i]) << ',' << py(sr.y[i]) << ' ';
    os << "\"/>\n";
    const double ly = T + 14 + 16 * s;
    os << "<line x1=\"" << W - Rm + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - Rm + 30 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\"/><text x=\"" << W - Rm + 35 << "\" y=\"" << ly << "\">" << sr.label
       << "</text>\n";
  }
  os << "</svg>\n";
}

double summary_number(const RunRecord& r, const char* key) {
  const auto it = r.summary.find(key);
  return it != r.summary.end() && it->is_number() ? it->get<double>() : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ReportFiles emit_report(const RunManifest& m, const fs::path& base_dir, const fs::path& out_dir) {
  ReportFiles out;
  fs::create_directories(out_dir);

  json runs = json::array();
  std::vector<std::vector<double>> rows;
  std::vector<Series> mass_s, energy_s, scale_s, blowup_s, conc_s;
  double guide_tau = INFINITY, guide_N = 0.0;
  int complete = 0, failed = 0;

  for (const auto& r : m.runs) {
    runs.push_back({{"id", r.id},
                    {"status", r.status},
                    {"termination", r.termination},
                    {"mass_ratio", std::isfinite(r.mass_ratio) ? json(r.mass_ratio) : json(nullptr)},
                    {"mu", r.mu},
                    {"message", r.message},
                    {"summary", r.summary}});
    complete += r.status == "complete";
    failed += r.status == "failed";
    const double t_star = summary_number(r, "t_star");
    rows.push_back({static_cast<double>(r.index), r.mass_ratio, r.mu, r.status == "complete" ? 1.0 : 0.0,
                    summary_number(r, "t_end"), t_star, summary_number(r, "initial_mass"), r.wall_seconds});
    if (r.status != "complete") continue;

    const fs::path dir = base_dir / r.id;
    try {
      const auto t = read_csv(dir / "series.csv");
      mass_s.push_back({r.id, t.column("t"), t.column("mass")});
      energy_s.push_back({r.id, t.column("t"), t.column("energy")});
    } catch (const std::exception& e) {
      out.errors.push_back(r.id + "/series.csv: " + e.what());
    }
    if (fs::exists(dir / "scales.csv")) {
      try {
        const auto t = read_csv(dir / "scales.csv");
        auto ts = t.column("t");
        auto N = t.column("N");
        if (std::isfinite(t_star)) {
          Series s{r.id, {}, {}};
          for (std::size_t i = 0; i < ts.size(); ++i)
            if (ts[i] < t_star) {
              s.x.push_back(t_star - ts[i]);
              s.y.push_back(N[i]);
              if (s.x.back() < guide_tau) guide_tau = s.x.back(), guide_N = N[i];
            }
          blowup_s.push_back(std::move(s));
        } else {
          scale_s.push_back({r.id, ts, N});
        }
      } catch (const std::exception& e) {
        out.errors.push_back(r.id + "/scales.csv: " + e.what());
      }
    }
    if (fs::exists(dir / "concentration.csv")) {
      try {
        const auto t = read_csv(dir / "concentration.csv");
        conc_s.push_back({r.id, t.column("t"), t.column("mass")});
      } catch (const std::exception& e) {
        out.errors.push_back(r.id + "/concentration.csv: " + e.what());
      }
    }
  }

  auto attempt = [&](const std::string& name, auto&& fn) {
    try {
      fn(out_dir / name);
      out.written.push_back(name);
    } catch (const std::exception& e) {
      out.errors.push_back(name + ": " + e.what());
    }
  };

  attempt("report.json", [&](const fs::path& p) {
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    os << json{{"name", m.name},
               {"spec_hash", m.spec_hash},
               {"code_version", m.code_version},
               {"complete", m.complete},
               {"runs_total", m.runs.size()},
               {"runs_complete", complete},
               {"runs_failed", failed},
               {"runs", runs}}
              .dump(2)
       << '\n';
  });
  attempt("summary.csv", [&](const fs::path& p) {
    write_csv(p, {"index", "mass_ratio", "mu", "complete", "t_end", "t_star", "initial_mass", "wall_seconds"}, rows);
  });
  if (m.runs.empty()) return out;

  if (!mass_s.empty()) {
    attempt("mass.svg", [&](const fs::path& p) { write_svg(p, "mass", "t", "M(u)", mass_s, false, false); });
    attempt("energy.svg", [&](const fs::path& p) { write_svg(p, "energy", "t", "E(u)", energy_s, false, false); });
  }
  if (!blowup_s.empty()) {
    // reference slope -1/2 through the sample closest to T*
    Series g{"slope -1/2", {}, {}, true};
    for (double tau = guide_tau; std::isfinite(tau) && tau <= 1e4 * guide_tau; tau *= 10) {
      g.x.push_back(tau);
      g.y.push_back(guide_N * std::sqrt(guide_tau / tau));
    }
    blowup_s.push_back(std::move(g));
    attempt("scales_blowup.svg",
            [&](const fs::path& p) { write_svg(p, "frequency scale", "T* - t", "N", blowup_s, true, true); });
  }
  if (!scale_s.empty())
    attempt("scales.svg", [&](const fs::path& p) { write_svg(p, "frequency scale", "t", "N", scale_s, false, true); });
  if (!conc_s.empty())
    attempt("concentration.svg",
            [&](const fs::path& p) { write_svg(p, "mass in the parabolic ball", "t", "mass", conc_s, false, false); });
  return out;
}

}  // namespace nlslab
