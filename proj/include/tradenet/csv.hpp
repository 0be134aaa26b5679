#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tradenet {

struct CsvLine {
    std::string_view text; // without trailing '\n' / '\r'
    uint64_t number = 0;   // 1-based file line number
};

// Chunked line reader. Memory stays bounded by the chunk size plus the
// longest single line regardless of file size; peak_buffer_bytes() reports
// the high-water mark so callers can assert the streaming bound.
class LineReader {
public:
    explicit LineReader(std::istream& in, size_t chunk_size = 1 << 20);

    // The returned view is valid until the next call.
    std::optional<CsvLine> next();

    size_t peak_buffer_bytes() const { return peak_; }

private:
    void refill();

    std::istream& in_;
    size_t chunk_size_;
    std::string buf_;
    std::vector<uint32_t> newlines_;
    size_t nl_index_ = 0;
    size_t consumed_ = 0;
    uint64_t line_no_ = 0;
    size_t peak_ = 0;
    bool eof_ = false;
};

// Splits on `delim`. Unquoted dialect: delimiters never appear inside
// fields. Views alias `line`.
void split_fields(std::string_view line, char delim, std::vector<std::string_view>& out);

} // namespace tradenet
