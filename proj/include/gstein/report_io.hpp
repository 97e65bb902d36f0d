#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gstein/clt.hpp"
#include "gstein/gheat.hpp"
#include "gstein/stein.hpp"

namespace gstein::io {

// Shortest round-trip decimal form ("%.17g"), so every value carries at
// least 15 significant digits.
std::string num(double v);

/// `t,x,u`, one row per node, stored layers in time order.
void writeFieldCsv(const std::filesystem::path& path, const SolutionField& field);

/// `s,integrand_sup,integrand_inf`
void writeIntegrandCsv(const std::filesystem::path& path, const SteinIdentityReport& report);

/// `n,error,bound,pass,alpha,C_alpha,budget`
void writeRateCsv(const std::filesystem::path& path, const RateReport& report);

/// `i,A_i,increment,step_bound`
void writeTraceCsv(const std::filesystem::path& path, const Trace& trace);

/// Generic table writer; rows must match the header's column count.
void writeCsv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

/// key=value lines in insertion order.
class Summary {
public:
    void add(const std::string& key, const std::string& value);
    void add(const std::string& key, double value) { add(key, num(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    void write(const std::filesystem::path& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace gstein::io
