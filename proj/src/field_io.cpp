#include "sqg/field_io.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <system_error>

namespace sqg {
namespace {

class Cursor {
public:
    explicit Cursor(const std::string& text) : text_(text) {}

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ >= text_.size(); }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    void skip_blanks() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    void expect(std::string_view word) {
        if (text_.compare(pos_, word.size(), word) != 0)
            throw FormatError("expected '" + std::string(word) + "'", pos_);
        pos_ += word.size();
    }

    template <class T>
    T number(const char* what) {
        T value{};
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) throw FormatError(std::string("bad ") + what, pos_);
        pos_ += static_cast<std::size_t>(ptr - first);
        return value;
    }

    void end_of_line() {
        skip_blanks();
        if (pos_ < text_.size() && text_[pos_] == '\r') ++pos_;
        if (pos_ >= text_.size() || text_[pos_] != '\n') throw FormatError("expected end of header line", pos_);
        ++pos_;
    }

private:
    const std::string& text_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string format_field(const PhysicalField& field, double t, double alpha) {
    const Grid2D& g = field.grid();
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "SQGFIELD v1 n=%d L=%.17g t=%.17g alpha=%.17g\n", g.n(), g.box_length(), t,
                  alpha);
    out += buf;
    out.reserve(out.size() + static_cast<std::size_t>(g.n()) * g.n() * 25);
    for (int j = 0; j < g.n(); ++j) {
        for (int i = 0; i < g.n(); ++i) {
            std::snprintf(buf, sizeof buf, i + 1 < g.n() ? "%.17g " : "%.17g\n", field(i, j));
            out += buf;
        }
    }
    return out;
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << text;
        os.flush();
        if (!os) throw Error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

void dump_field(const PhysicalField& field, double t, double alpha, const std::filesystem::path& path) {
    write_atomically(path, format_field(field, t, alpha));
}

FieldDump parse_field(const std::string& text) {
    Cursor c(text);
    c.expect("SQGFIELD");
    c.skip_blanks();
    c.expect("v1");
    c.skip_blanks();
    c.expect("n=");
    const int n = c.number<int>("grid size");
    c.skip_blanks();
    c.expect("L=");
    const double L = c.number<double>("box length");
    c.skip_blanks();
    c.expect("t=");
    const double t = c.number<double>("time");
    c.skip_blanks();
    c.expect("alpha=");
    const double alpha = c.number<double>("alpha");
    const std::size_t header_end = c.offset();
    c.end_of_line();

    std::optional<Grid2D> grid;
    try {
        grid.emplace(n, L);
    } catch (const InvalidGrid& e) {
        throw FormatError(std::string("invalid grid in header: ") + e.what(), header_end);
    }

    RealArray values(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            c.skip_space();
            if (c.at_end())
                throw FormatError("payload ends after " + std::to_string(j * n + i) + " of " +
                                      std::to_string(n * n) + " values",
                                  c.offset());
            values(i, j) = c.number<double>("value");
        }
    c.skip_space();
    if (!c.at_end()) throw FormatError("payload longer than n^2 values", c.offset());
    try {
        return {PhysicalField(*grid, std::move(values)), t, alpha};
    } catch (const NonFiniteField& e) {
        throw FormatError(e.what(), header_end);
    }
}

FieldDump load_field_dump(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_field(ss.str());
}

PhysicalField load_field(const std::filesystem::path& path) { return load_field_dump(path).field; }

}  // namespace sqg
