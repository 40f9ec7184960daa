#include "bubbletower/io.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace bt {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_csv(const std::string& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF on every platform
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "");
    out << "\n";
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw std::invalid_argument("write_csv: row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << format_g17(row[i]) << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

std::uint64_t fnv1a(std::span<const unsigned char> bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return fnv1a(data);
}

StudyManifest make_manifest(const std::string& command, const std::string& resolved_config) {
    StudyManifest m;
    m.command = command;
    m.resolved_config = resolved_config;
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    m.timestamp = buf;
    m.config_hash = fnv1a({reinterpret_cast<const unsigned char*>(resolved_config.data()),
                           resolved_config.size()});
    return m;
}

void write_manifest(const std::string& path, const StudyManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["resolved_config"] = m.resolved_config;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["config_hash"] = m.config_hash;
    j["outputs"] = m.outputs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

void write_snapshot(const std::string& path, const SectorGrid& grid,
                    std::span<const double> values) {
    if (values.size() != grid.size())
        throw std::invalid_argument("write_snapshot: value count mismatch");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    auto put = [&out](double v) {
        static_assert(sizeof(double) == 8);
        out.write(reinterpret_cast<const char*>(&v), 8); // x86-64: little-endian
    };
    put(static_cast<double>(grid.ns()));
    put(static_cast<double>(grid.nth()));
    put(static_cast<double>(grid.nt()));
    put(grid.R_max);
    put(static_cast<double>(grid.k));
    put(static_cast<double>(grid.N));
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * 8));
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    auto get = [&in]() {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        if (!in) throw std::runtime_error("snapshot truncated");
        return v;
    };
    Snapshot s;
    s.n_s = static_cast<std::int64_t>(get());
    s.n_th = static_cast<std::int64_t>(get());
    s.n_t = static_cast<std::int64_t>(get());
    s.R_max = get();
    s.k = static_cast<std::int64_t>(get());
    s.N = static_cast<std::int64_t>(get());
    const std::size_t n =
        static_cast<std::size_t>(s.n_s) * static_cast<std::size_t>(s.n_th) *
        static_cast<std::size_t>(s.n_t);
    s.values.resize(n);
    in.read(reinterpret_cast<char*>(s.values.data()), static_cast<std::streamsize>(n * 8));
    if (!in) throw std::runtime_error("snapshot truncated");
    return s;
}

void write_plot_script(const std::string& path, const std::string& csv_name,
                       const std::string& xlabel, const std::string& ylabel, bool loglog) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "#!/usr/bin/env python3\n"
        << "import csv, sys\n"
        << "import matplotlib\n"
        << "matplotlib.use('Agg')\n"
        << "import matplotlib.pyplot as plt\n"
        << "rows = list(csv.reader(open('" << csv_name << "')))\n"
        << "head, data = rows[0], [[float(v) for v in r] for r in rows[1:]]\n"
        << "x = [r[0] for r in data]\n"
        << "for c in range(1, len(head)):\n"
        << "    plt.plot(x, [r[c] for r in data], marker='o', label=head[c])\n"
        << (loglog ? "plt.xscale('log'); plt.yscale('log')\n" : "")
        << "plt.xlabel('" << xlabel << "'); plt.ylabel('" << ylabel << "')\n"
        << "plt.legend(); plt.grid(True, which='both', alpha=0.3)\n"
        << "plt.savefig('" << csv_name << ".png', dpi=150)\n"
        << "print('wrote " << csv_name << ".png')\n";
}

} // namespace bt
