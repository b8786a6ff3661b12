#include "hsps/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "hsps/error.hpp"

namespace hsps::io {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    char buf[17];
    auto res = std::to_chars(buf, buf + sizeof buf, v, 16);
    std::string s(buf, res.ptr);
    return std::string(16 - s.size(), '0') + s;
}

void Table::add(std::vector<std::string> row)
{
    if (row.size() != header.size()) throw std::logic_error("Table: row width does not match header");
    rows.push_back(std::move(row));
}

namespace {

void join(std::string& out, const std::vector<std::string>& cells)
{
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        const auto& c = cells[k];
        if (c.find_first_of(",\"\n") == std::string::npos) {
            out += c;
        } else {
            out += '"';
            for (char ch : c) {
                if (ch == '"') out += '"';
                out += ch;
            }
            out += '"';
        }
    }
    out += '\n';
}

}  // namespace

std::string Table::to_csv() const
{
    std::string out;
    join(out, header);
    for (const auto& r : rows) join(out, r);
    return out;
}

std::string matrix_csv(const Eigen::MatrixXd& m)
{
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_number(std::string_view s, double& v)
{
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::vector<XyPoint> parse_xy_csv(std::string_view text)
{
    std::vector<XyPoint> out;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        std::vector<double> vals(cells.size());
        bool numeric = true;
        for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_number(cells[k], vals[k]);

        if (!numeric) {
            if (!seen_content) {
                seen_content = true;  // header
                continue;
            }
            throw DataError("line " + std::to_string(line_no) + ": non-numeric value");
        }
        seen_content = true;
        if (vals.size() < 2 || vals.size() > 3) {
            throw DataError("line " + std::to_string(line_no) + ": expected 2 or 3 columns, got " +
                            std::to_string(vals.size()));
        }
        XyPoint p{vals[0], vals[1], {}};
        if (vals.size() == 3) p.sigma = vals[2];
        out.push_back(p);
    }
    return out;
}

std::vector<XyPoint> read_xy_csv(const std::filesystem::path& path)
{
    try {
        return parse_xy_csv(read_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

}  // namespace hsps::io
