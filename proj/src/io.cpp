#include "mvig/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mvig {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string grid_to_csv(const OccupancyGrid& grid) {
    std::string out;
    out.reserve(grid.size() * 2);
    for (int y = 0; y < grid.height; ++y) {
        for (int x = 0; x < grid.width; ++x) {
            if (x) out.push_back(',');
            out.push_back(static_cast<char>('0' + grid.at(x, y)));
        }
        out.push_back('\n');
    }
    return out;
}

OccupancyGrid grid_from_csv(const std::string& text, double resolution,
                            Vec2 origin) {
    std::vector<std::vector<std::uint8_t>> rows;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        std::vector<std::uint8_t> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            if (cell != "0" && cell != "1" && cell != "2")
                throw std::runtime_error("grid_from_csv: invalid cell '" + cell + "'");
            row.push_back(static_cast<std::uint8_t>(cell[0] - '0'));
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("grid_from_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("grid_from_csv: empty input");
    OccupancyGrid grid(static_cast<int>(rows.front().size()),
                       static_cast<int>(rows.size()), resolution, origin);
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) grid.at(x, y) = rows[y][x];
    return grid;
}

namespace {

std::string pgm_header(int width, int height) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "P5\n%d %d\n255\n", width, height);
    return buf;
}

}  // namespace

std::string grid_to_pgm(const OccupancyGrid& grid) {
    std::string out = pgm_header(grid.width, grid.height);
    for (std::uint8_t c : grid.cells)
        out.push_back(static_cast<char>(c == kFree ? 255 : (c == kOccupied ? 0 : 128)));
    return out;
}

std::string field_to_csv(const Field& field) {
    std::string out;
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (x) out.push_back(',');
            out += format_double(field.at(x, y));
        }
        out.push_back('\n');
    }
    return out;
}

std::string field_to_pgm(const Field& field) {
    std::string out = pgm_header(field.width, field.height);
    for (double v : field.values) {
        int level = static_cast<int>(v * 255.0 + 0.5);
        if (level < 0) level = 0;
        if (level > 255) level = 255;
        out.push_back(static_cast<char>(level));
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open for writing: " + path);
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!file) throw std::runtime_error("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open: " + path);
    std::ostringstream out;
    out << file.rdbuf();
    return out.str();
}

}  // namespace mvig
