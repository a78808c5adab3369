#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace normstance {

// ---------------------------------------------------------------------------
// Warnings
// ---------------------------------------------------------------------------

// Degenerate-but-legal situations (empty denominators, missing groups) are
// reported through a process-wide sink rather than thrown. The default sink
// writes to stderr; tests install a capturing sink.
using WarningSink = std::function<void(std::string_view)>;

void warn(std::string_view message);

// Installs `sink` and returns the previous one. Passing an empty function
// silences warnings.
WarningSink set_warning_sink(WarningSink sink);

// RAII capture of warnings. Swaps the process-wide sink, so it must not be
// used while other threads may emit warnings.
class WarningCapture {
public:
    WarningCapture();
    ~WarningCapture();
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

    const std::vector<std::string>& messages() const noexcept { return messages_; }

private:
    std::vector<std::string> messages_;
    WarningSink previous_;
};

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

// splitmix64 finalizer; used to derive independent stream seeds from a run
// seed plus a salt (round index, fold id, ...).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// ---------------------------------------------------------------------------
// Text formats
// ---------------------------------------------------------------------------

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Fixed decimal places, e.g. format_fixed(0.1, 2) == "0.10".
std::string format_fixed(double value, int decimals);

std::string csv_escape(std::string_view field);

// Splits one CSV record. Supports double-quoted fields with "" escapes; does
// not support embedded newlines.
std::vector<std::string> split_csv_line(std::string_view line);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based source line per row

    // Column index by name; nullopt when absent.
    std::optional<std::size_t> column(std::string_view name) const;
};

// Reads a CSV file with a header line. Blank lines are skipped. Rows whose
// width differs from the header raise ParseError.
CsvTable read_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace normstance
