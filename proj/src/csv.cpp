#include "tradenet/csv.hpp"

#include "tradenet/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace tradenet {

LineReader::LineReader(std::istream& in, size_t chunk_size)
    : in_(in), chunk_size_(std::max<size_t>(chunk_size, 64)) {
    buf_.reserve(chunk_size_ + chunk_size_ / 4);
}

void LineReader::refill() {
    // Keep only the unconsumed tail (a partial line; it contains no '\n').
    buf_.erase(0, consumed_);
    consumed_ = 0;
    size_t old = buf_.size();
    buf_.resize(old + chunk_size_);
    in_.read(buf_.data() + old, static_cast<std::streamsize>(chunk_size_));
    size_t got = static_cast<size_t>(in_.gcount());
    buf_.resize(old + got);
    if (got == 0) eof_ = true;

    newlines_.clear();
    nl_index_ = 0;
    kernels::find_byte_offsets(buf_.data(), buf_.size(), '\n', newlines_);

    peak_ = std::max(peak_, buf_.capacity() + newlines_.capacity() * sizeof(uint32_t));
}

std::optional<CsvLine> LineReader::next() {
    for (;;) {
        if (nl_index_ < newlines_.size()) {
            size_t start = consumed_;
            size_t end = newlines_[nl_index_++];
            consumed_ = end + 1;
            std::string_view text(buf_.data() + start, end - start);
            if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
            return CsvLine{text, ++line_no_};
        }
        if (eof_) {
            if (consumed_ < buf_.size()) {
                // final line without a trailing newline
                std::string_view text(buf_.data() + consumed_, buf_.size() - consumed_);
                consumed_ = buf_.size();
                if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
                return CsvLine{text, ++line_no_};
            }
            return std::nullopt;
        }
        refill();
    }
}

void split_fields(std::string_view line, char delim, std::vector<std::string_view>& out) {
    out.clear();
    static thread_local std::vector<uint32_t> offsets;
    offsets.clear();
    kernels::find_byte_offsets(line.data(), line.size(), delim, offsets);
    size_t prev = 0;
    for (uint32_t off : offsets) {
        out.push_back(line.substr(prev, off - prev));
        prev = off + 1;
    }
    out.push_back(line.substr(prev));
}

} // namespace tradenet
