#include "gstein/measure_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "gstein/errors.hpp"

namespace gstein::io {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parseNumber(const std::string& token, std::size_t lineNo) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(token, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != token.size()) {
        throw InvalidModel("line " + std::to_string(lineNo) + ": bad number '" + token + "'");
    }
    return v;
}

DiscreteMeasure parseMeasureLine(std::string_view line, std::size_t lineNo) {
    std::istringstream in{std::string(line)};
    std::vector<Atom> atoms;
    std::string token;
    while (in >> token) {
        const auto at = token.find('@');
        if (at == std::string::npos) {
            throw InvalidModel("line " + std::to_string(lineNo) + ": expected weight@position, got '" + token + "'");
        }
        atoms.push_back({parseNumber(token.substr(at + 1), lineNo), parseNumber(token.substr(0, at), lineNo)});
    }
    try {
        return DiscreteMeasure(std::move(atoms));
    } catch (const InvalidModel& e) {
        throw InvalidModel("line " + std::to_string(lineNo) + ": " + e.what());
    }
}

std::string formatReal(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<UncertaintySet> parseUncertaintySets(std::string_view text) {
    std::vector<UncertaintySet> sets;
    std::vector<DiscreteMeasure> current;
    auto flush = [&] {
        if (!current.empty()) {
            sets.emplace_back(std::move(current));
            current.clear();
        }
    };
    std::size_t lineNo = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        const std::string_view raw = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++lineNo;
        const std::string_view line = trim(raw);
        if (line.empty()) {
            flush();
            continue;
        }
        if (line.front() == '#') continue;
        current.push_back(parseMeasureLine(line, lineNo));
    }
    flush();
    if (sets.empty()) {
        throw InvalidModel("no measures found");
    }
    return sets;
}

std::string formatMeasure(const DiscreteMeasure& mu) {
    std::string out;
    for (const Atom& a : mu.atoms()) {
        if (!out.empty()) out += ' ';
        out += formatReal(a.weight);
        out += '@';
        out += formatReal(a.position);
    }
    return out;
}

std::string formatUncertaintySets(const std::vector<UncertaintySet>& sets) {
    std::string out;
    for (std::size_t s = 0; s < sets.size(); ++s) {
        if (s > 0) out += '\n';
        for (const auto& mu : sets[s]) {
            out += formatMeasure(mu);
            out += '\n';
        }
    }
    return out;
}

std::vector<UncertaintySet> readUncertaintySets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidModel("cannot open model file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseUncertaintySets(buf.str());
}

}  // namespace gstein::io
