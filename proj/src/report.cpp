#include "dwlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace dwlab {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Manifest::add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
void Manifest::add(const std::string& key, double value) { add(key, format_real(value)); }
void Manifest::add(const std::string& key, int value) { add(key, std::to_string(value)); }
void Manifest::add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

std::string Manifest::text() const {
  std::string out;
  for (const auto& [k, v] : rows_) out += k + " = " + v + "\n";
  return out;
}

void Manifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text();
}

void ensure_dir(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw std::runtime_error("cannot create directory '" + path + "': " + ec.message());
}

void write_norms_csv(const std::string& path, const std::vector<NormRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "t,L1,L2,Linf,H1dot,energy,forcing,xnorm\n";
  for (const auto& r : records) {
    out << format_real(r.t) << ',' << format_real(r.l1) << ',' << format_real(r.l2) << ','
        << format_real(r.linf) << ',' << format_real(r.h1dot) << ',' << format_real(r.energy) << ','
        << format_real(r.forcing) << ',' << format_real(r.xnorm) << '\n';
  }
}

namespace {

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
}

}  // namespace

void write_decay_plot_script(const std::string& path, const std::string& csv_name) {
  write_text(path, R"py(#!/usr/bin/env python3
import csv, os, sys
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, ")py" + csv_name + R"py("))))
t = [1.0 + float(r["t"]) for r in rows]
fig, ax = plt.subplots()
for col in ("Linf", "L2", "H1dot"):
    ys = [float(r[col]) for r in rows]
    pts = [(a, b) for a, b in zip(t, ys) if b > 0]
    if pts:
        ax.loglog(*zip(*pts), label=col)
ax.set_xlabel("1 + t")
ax.set_ylabel("norm")
ax.legend()
fig.savefig(os.path.join(here, "decay.png"), dpi=120)
)py");
}

void write_sweep_plot_script(const std::string& path, const std::string& csv_name) {
  write_text(path, R"py(#!/usr/bin/env python3
import csv, math, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, ")py" + csv_name + R"py("))))
series = {}
for r in rows:
    if r["ok"] != "true":
        continue
    t = float(r["T_est"])
    series.setdefault(r["nonlinearity"], []).append((float(r["epsilon"]), t))
fig, ax = plt.subplots()
for name, pts in series.items():
    pts.sort()
    finite = [(e, t) for e, t in pts if math.isfinite(t)]
    if finite:
        ax.plot(*zip(*finite), marker="o", label=name)
ax.set_xscale("log")
ax.set_xlabel("epsilon")
ax.set_ylabel("T_est")
ax.legend()
fig.savefig(os.path.join(here, "lifespan.png"), dpi=120)
)py");
}

void write_certificate_plot_script(const std::string& path, const std::string& csv_name) {
  write_text(path, R"py(#!/usr/bin/env python3
import csv, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
rows = list(csv.DictReader(open(os.path.join(here, ")py" + csv_name + R"py("))))
R = [float(r["R"]) for r in rows]
fig, ax = plt.subplots()
ax.loglog(R, [float(r["I_R"]) for r in rows], label="I_R")
ax.loglog(R, [float(r["Y"]) for r in rows], label="Y(R)")
ax.set_xlabel("R")
ax.legend()
fig.savefig(os.path.join(here, "functionals.png"), dpi=120)
)py");
}

}  // namespace dwlab
