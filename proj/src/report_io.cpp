#include "gstein/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gstein::io {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream openOut(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

}  // namespace

void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
    auto out = openOut(path);
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) {
        if (r.size() != header.size()) {
            throw std::logic_error("csv row width does not match header of " + path.string());
        }
        line(r);
    }
}

void writeFieldCsv(const std::filesystem::path& path, const SolutionField& field) {
    auto out = openOut(path);
    out << "t,x,u\n";
    const auto& g = field.grid();
    for (std::size_t k = 0; k < field.layerCount(); ++k) {
        const std::string t = num(field.times()[k]);
        const auto u = field.layer(k);
        for (std::size_t i = 0; i < g.nx; ++i) {
            out << t << ',' << num(g.node(i)) << ',' << num(u[i]) << '\n';
        }
    }
}

void writeIntegrandCsv(const std::filesystem::path& path, const SteinIdentityReport& report) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < report.sGrid.size(); ++i) {
        rows.push_back({num(report.sGrid[i]), num(report.integrandSup[i]), num(report.integrandInf[i])});
    }
    writeCsv(path, {"s", "integrand_sup", "integrand_inf"}, rows);
}

void writeRateCsv(const std::filesystem::path& path, const RateReport& report) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : report.rows) {
        rows.push_back({std::to_string(r.n), num(r.error), num(r.bound), r.pass ? "true" : "false",
                        num(report.regularity.alpha), num(report.regularity.CAlpha), num(r.budget)});
    }
    writeCsv(path, {"n", "error", "bound", "pass", "alpha", "C_alpha", "budget"}, rows);
}

void writeTraceCsv(const std::filesystem::path& path, const Trace& trace) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& s : trace.steps) {
        rows.push_back({std::to_string(s.i), num(s.a), num(s.increment), num(s.stepBound)});
    }
    writeCsv(path, {"i", "A_i", "increment", "step_bound"}, rows);
}

void Summary::add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

void Summary::write(const std::filesystem::path& path) const {
    auto out = openOut(path);
    for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
}

}  // namespace gstein::io
