#include "kolmo/csv.hpp"

#include "kolmo/error.hpp"

#include <cstdio>

namespace kolmo {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
    if (!out_) fail(ErrorCode::io_error, "cannot open " + path.string() + " for writing");
    for (const auto& h : header) field(h);
    end_row();
}

CsvWriter& CsvWriter::field(const std::string& s) {
    if (pending_ > 0) out_ << ',';
    out_ << s;
    ++pending_;
    return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(format_double(v)); }
CsvWriter& CsvWriter::field(std::int64_t v) { return field(std::to_string(v)); }
CsvWriter& CsvWriter::field(std::uint64_t v) { return field(std::to_string(v)); }

void CsvWriter::end_row() {
    require(pending_ == columns_, ErrorCode::internal, "csv: row width does not match header");
    out_ << '\n';
    pending_ = 0;
}

void CsvWriter::close() {
    out_.close();
    if (!out_) fail(ErrorCode::io_error, "error while writing " + path_.string());
}

}  // namespace kolmo
