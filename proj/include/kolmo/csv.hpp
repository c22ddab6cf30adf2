#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace kolmo {

/// 17 significant digits, "%.17g"; round-trips every double.
std::string format_double(double v);

/// Minimal CSV writer with a fixed header. Fields are written as given;
/// callers only emit numbers and identifier-like strings.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    CsvWriter& field(const std::string& s);
    CsvWriter& field(double v);
    CsvWriter& field(std::int64_t v);
    CsvWriter& field(std::uint64_t v);
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(bool v) { return field(std::string(v ? "1" : "0")); }
    void end_row();
    void close();

  private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_;
    std::size_t pending_ = 0;
};

}  // namespace kolmo
