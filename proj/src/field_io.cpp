#include "hedgepde/field_io.hpp"

#include "hedgepde/errors.hpp"

#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

namespace hedgepde {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_number(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty()) {
        throw DomainError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::string config_header(std::string_view config_hash) {
    return "# hedgepde config_hash=" + std::string(config_hash);
}

namespace {

void write_row(std::ostream& os, const double* first, int count) {
    for (int j = 0; j < count; ++j) {
        if (j) os << ',';
        os << format_number(first[j]);
    }
    os << '\n';
}

// "# tag key=value key=value" -> map; throws when the tag differs.
std::map<std::string, std::string> parse_descriptor(const std::string& line, const std::string& tag) {
    std::istringstream in(line);
    std::string hash, word;
    in >> hash >> word;
    if (hash != "#" || word != tag) throw DomainError("expected '# " + tag + "' header, got: " + line);
    std::map<std::string, std::string> kv;
    while (in >> word) {
        const auto eq = word.find('=');
        if (eq == std::string::npos) throw DomainError("malformed header entry: " + word);
        kv[word.substr(0, eq)] = word.substr(eq + 1);
    }
    return kv;
}

std::string need(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw DomainError("field header lacks " + key);
    return it->second;
}

std::string next_line(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("unexpected end of field file");
    return line;
}

// Skips the optional config-hash line and returns the grid descriptor line.
std::string descriptor_line(std::istream& is) {
    std::string line = next_line(is);
    if (line.rfind("# hedgepde", 0) == 0) line = next_line(is);
    return line;
}

double read_time(std::istream& is) {
    const std::string line = next_line(is);
    if (line.rfind("# t=", 0) != 0) throw DomainError("expected '# t=' header, got: " + line);
    return parse_number(std::string_view(line).substr(4));
}

void read_rows(std::istream& is, std::vector<double>& out, int rows, int cols) {
    out.clear();
    out.reserve(static_cast<std::size_t>(rows) * cols);
    for (int i = 0; i < rows; ++i) {
        const std::string line = next_line(is);
        std::string_view rest(line);
        int count = 0;
        while (true) {
            const auto comma = rest.find(',');
            out.push_back(parse_number(rest.substr(0, comma)));
            ++count;
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (count != cols) throw DomainError("field row " + std::to_string(i) + " has wrong column count");
    }
}

}  // namespace

void write_field_csv(std::ostream& os, const Field1D& f, std::string_view config_hash) {
    os << config_header(config_hash) << '\n';
    os << "# grid1d x_max=" << format_number(f.grid.x_max) << " n_x=" << f.grid.n_x << '\n';
    os << "# t=" << format_number(f.t) << '\n';
    for (int i = 0; i < f.grid.n_x; ++i) write_row(os, &f.values[static_cast<std::size_t>(i)], 1);
}

void write_field_csv(std::ostream& os, const Field2D& f, std::string_view config_hash) {
    const Grid2D& g = f.grid;
    os << config_header(config_hash) << '\n';
    os << "# grid2d x_max=" << format_number(g.x_grid.x_max) << " n_x=" << g.n_x()
       << " z_min=" << format_number(g.z_min) << " z_max=" << format_number(g.z_max) << " n_z=" << g.n_z
       << '\n';
    os << "# t=" << format_number(f.t) << '\n';
    for (int i = 0; i < g.n_x(); ++i) write_row(os, &f.values[g.index(i, 0)], g.n_z);
}

Field1D read_field1d_csv(std::istream& is) {
    const auto kv = parse_descriptor(descriptor_line(is), "grid1d");
    Field1D f;
    f.grid = Grid1D{parse_number(need(kv, "x_max")), std::stoi(need(kv, "n_x"))};
    f.t = read_time(is);
    read_rows(is, f.values, f.grid.n_x, 1);
    return f;
}

Field2D read_field2d_csv(std::istream& is) {
    const auto kv = parse_descriptor(descriptor_line(is), "grid2d");
    Field2D f;
    f.grid = Grid2D{Grid1D{parse_number(need(kv, "x_max")), std::stoi(need(kv, "n_x"))},
                    parse_number(need(kv, "z_min")), parse_number(need(kv, "z_max")),
                    std::stoi(need(kv, "n_z"))};
    f.t = read_time(is);
    read_rows(is, f.values, f.grid.n_x(), f.grid.n_z);
    return f;
}

}  // namespace hedgepde
