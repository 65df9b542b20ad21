#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace values_miner::csv {

// RFC 4180 reader: comma separated, double-quoted fields may contain commas,
// doubled quotes and newlines. A UTF-8 BOM at the start is skipped.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Next record, or nullopt at end of input.
    std::optional<std::vector<std::string>> next();

    /// 1-based physical line number where the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 0;
    bool started_ = false;
};

/// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

} // namespace values_miner::csv
